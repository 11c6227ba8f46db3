import numpy as np
import pytest

from kgvacua import catalog, spectral
from kgvacua.catalog import SpatialModel
from kgvacua.errors import SingularityError


def test_ultrastatic_n4_eigenvalues():
    s = catalog.make_spec("static", num_points=4, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    assert np.allclose(np.sort(op.eigenvalues), [1, 3, 3, 5], atol=1e-12)


def test_zero_mode_without_mass_or_curvature():
    s = catalog.make_spec("static", num_points=8, mass=0.0, curvature_offset=0.0)
    assert np.min(spectral.build_spatial_operator(s, 0.0).eigenvalues) == pytest.approx(0.0, abs=1e-12)


def test_t8_conformal_coupling_spectrum_is_time_independent():
    s = catalog.make_spec("frw_t8", num_points=4, mass=1.0, coupling=1 / 6, hubble=1.0)
    op = spectral.build_spatial_operator(s, 1.0)
    assert np.allclose(np.sort(op.eigenvalues), [1, 3, 3, 5], atol=1e-12)


def test_spectral_power_examples():
    s = catalog.make_spec("static", num_points=4, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    P = spectral.spectral_power(op, -0.5)
    ev = np.sort(np.linalg.eigvals(P).real)
    assert np.allclose(ev, np.sort([1, 3 ** -0.5, 3 ** -0.5, 5 ** -0.5]), atol=1e-12)
    assert np.allclose(spectral.spectral_power(op, 0), np.eye(4))
    assert np.allclose(spectral.spectral_power(op, 1), op.matrix())


def test_negative_power_of_singular_operator():
    s = catalog.make_spec("static", num_points=4, mass=0.0)
    op = spectral.build_spatial_operator(s, 0.0)
    with pytest.raises(SingularityError) as e:
        spectral.spectral_power(op, -0.5)
    assert e.value.index == 0


def test_sobolev_norm_single_mode():
    s = catalog.make_spec("static", num_points=8, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    k = 3
    psi = op.eigenvectors[:, k]
    assert spectral.mu_norm(op, psi) == pytest.approx(1.0)
    assert spectral.sobolev_norm(op, psi, spectral.SobolevOrder(1.0)) == pytest.approx(op.eigenvalues[k])
    assert spectral.sobolev_norm(op, psi, spectral.SobolevOrder(0.0)) == pytest.approx(1.0)


def test_norm_equivalence_inequality(rng):
    s = catalog.make_spec("static", num_points=16, mass=0.7)
    op = spectral.build_spatial_operator(s, 0.0)
    c2 = spectral.norm_equivalence_constant(op)
    for _ in range(100):
        psi = rng.standard_normal(16)
        g = spectral.graph_norm_sq(op, psi)
        h = spectral.sobolev_norm(op, psi, spectral.SobolevOrder(1.0)) ** 2
        assert h <= g <= c2 * h * (1 + 1e-12)


def test_operator_bounds():
    s = catalog.make_spec("static", num_points=16, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    for sv in (1.0, 0.5):
        assert spectral.operator_bound_check(op, sv) == pytest.approx(1.0, abs=1e-10)
    for sv in (0.25, 0.5, 1.0):
        assert spectral.shifted_inverse_power_norm(op, sv, 1.0) <= 1.0 + 1e-12


def test_lattice_eigenvalues_converge_at_second_order():
    length = 2 * np.pi
    errs = []
    for n in (16, 32, 64, 128):
        lam = spectral.lattice_eigenvalues(SpatialModel(num_points=n, length=length))
        errs.append(max(abs(lam[k] - spectral.continuum_eigenvalue(k, length)) for k in (1, 2, 3)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(np.abs(ratios - 4.0) < 0.25 * 4.0)


def test_mode_basis_orthonormal(family_spec):
    b = spectral.mode_basis(family_spec)
    G = b.vectors.T @ (b.base_weights[:, None] * b.vectors)
    assert np.allclose(G, np.eye(G.shape[0]), atol=1e-12)


def test_static_profile_operator_is_weighted_symmetric():
    sp = catalog.SpatialModel(num_points=12, length=12.0, lapse_profile=catalog.SpatialProfile(1.0, 0.3, 1),
                              static_metric_profile=catalog.SpatialProfile(1.0, 0.2, 2))
    s = catalog.make_spec("static", spatial=sp, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    M = op.matrix()
    W = np.diag(op.weights)
    assert np.allclose(W @ M, (W @ M).T, atol=1e-12)
    assert np.all(op.eigenvalues > 0)
