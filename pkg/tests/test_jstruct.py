import numpy as np
import pytest

from kgvacua import catalog, jstruct, phase, spectral, vacua
from kgvacua.errors import InvalidStructureError
from kgvacua.jstruct import ComplexStructureBlocks
from kgvacua.phase import BlockMatrix2, PhaseVector


def single_mode(w=2.0, A=0.0):
    return ComplexStructureBlocks.from_AY([[A]], [[1.0 / w]], [1.0], [1.0])


def test_single_mode_action_and_square():
    b = single_mode()
    for sigma in (1, -1):
        J = jstruct.assemble_J(b.with_orientation(sigma))
        v = (J @ PhaseVector([1.0], [0.0])).stacked()
        assert abs(v[0]) < 1e-15 and abs(abs(v[1]) - 2.0) < 1e-15
        assert np.allclose((J @ (J @ PhaseVector([1.0], [0.0]))).stacked(), [-1.0, 0.0])


def test_identity_blocks():
    b = ComplexStructureBlocks.from_AY(np.zeros((3, 3)), np.eye(3), np.ones(3), np.ones(3), orientation=1)
    J = jstruct.assemble_J(b).dense()
    assert np.allclose(J, np.block([[np.zeros((3, 3)), -np.eye(3)], [np.eye(3), np.zeros((3, 3))]]))
    assert jstruct.square_residual(jstruct.assemble_J(b)) < 1e-14


def test_orientation_of_single_mode():
    assert jstruct.select_orientation(single_mode()) == -1
    b = single_mode()
    flipped = ComplexStructureBlocks(-b.A, -b.B, b.density, b.weights)
    assert jstruct.select_orientation(flipped) == 1


def test_inner_product_single_mode():
    b = jstruct.oriented(single_mode())
    p = PhaseVector([1.0], [0.0])
    ip = jstruct.inner_product(b, p, p)
    assert ip.real == pytest.approx(4.0) and ip.imag == 0.0


def test_inner_product_hermitian(rng):
    s = catalog.make_spec("frw_t8", num_points=6)
    b = jstruct.oriented(vacua.Vacuum(s).blocks(0.3))
    for p1, p2 in phase.random_pairs(rng, 6, 20):
        a = jstruct.inner_product(b, p1, p2)
        c = jstruct.inner_product(b, p2, p1)
        assert a == pytest.approx(np.conj(c), abs=1e-10)


def test_indefinite_structure_rejected():
    b = ComplexStructureBlocks.from_AY([[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [1.0, 1.0])
    with pytest.raises(InvalidStructureError):
        jstruct.select_orientation(b)


def test_t4_mode_blocks():
    # conformal time de Sitter, zero mode with H_V = 4: Y = 1/2, Z = -1/2
    s = catalog.make_spec("frw_conformal", num_points=4, curvature_offset=4.0)
    v = vacua.Vacuum(s)
    k = int(np.argmin(np.abs(v.lam)))
    assert v.y_jets(0.0)[0, k] == pytest.approx(0.5)
    assert v.z_jets(0.0)[0, k] == pytest.approx(-0.5)
    J = jstruct.assemble_J(v.blocks(0.0))
    assert jstruct.square_residual(J) < 1e-12


def test_static_blocks_and_adjoint():
    s = catalog.make_spec("static", num_points=8, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    b = vacua.static_vacuum(op)
    JY = jstruct.assemble_JY(b).dense()
    assert np.allclose(JY[:8, 8:], b.Y)
    assert np.allclose(JY[8:, :8], -spectral.spectral_power(op, 0.5), atol=1e-12)
    assert jstruct.check_adjoint(b, "scalar") < 1e-12
    assert jstruct.check_adjoint(b, "density") < 1e-12
    assert jstruct.sobolev_boundedness(b, op, 0.5) == pytest.approx(1.0, abs=1e-10)
    assert jstruct.sobolev_boundedness(b, op, 1.0) == pytest.approx(1.0, abs=1e-10)


def test_commuting_pair_relations(rng):
    s = catalog.make_spec("static", num_points=6, mass=1.0)
    op = spectral.build_spatial_operator(s, 0.0)
    vals = rng.uniform(0.5, 2.0, 6)
    b = ComplexStructureBlocks.from_AY(op.from_values(rng.uniform(-1, 1, 6)), op.from_values(vals),
                                       np.ones(6), op.weights)
    assert max(b.relation_residuals().values()) < 1e-10


def test_broken_blocks_negative_control(rng):
    n = 5
    A = rng.standard_normal((n, n))
    Y = rng.standard_normal((n, n)) + 3 * np.eye(n)
    b = ComplexStructureBlocks.from_AY(A, Y, np.ones(n), np.ones(n))
    assert jstruct.check_adjoint(b, "density") > 0.1


def test_similarity_check_controls(rng):
    s = catalog.make_spec("frw_t8", num_points=5)
    J = jstruct.assemble_J(vacua.Vacuum(s).blocks(0.2))
    I = BlockMatrix2.from_dense(np.eye(10))
    assert jstruct.similarity_check(J, J, I) == 0.0
    X = BlockMatrix2.from_dense(rng.standard_normal((10, 10)) + 4 * np.eye(10))
    assert jstruct.similarity_check(J, J, X) > 1e-3


def test_battery_every_family(family_spec, rng):
    t = float(np.mean(family_spec.interval))
    b = vacua.Vacuum(family_spec).blocks(t)
    r = jstruct.battery(b, phase.measure_transform(family_spec, t), family_spec.spatial.dx, rng, 20)
    assert r.square <= 1e-10 and r.symplectic <= 1e-10
    assert r.adjoint_scalar <= 1e-10 and r.adjoint_density <= 1e-10
    assert r.gram_min > 0 and r.orientation == -1
    assert r.signs["B_min_form"] > 0 and r.signs["D_max_form"] < 0
