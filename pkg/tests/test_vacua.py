import math

import numpy as np
import pytest

from kgvacua import catalog, conservation, vacua
from kgvacua.errors import ScreeningError, SingularityError


def test_static_general_family_values():
    assert vacua.static_general_family(2.0, 0.0, 0.37) == pytest.approx(0.5)
    assert vacua.static_general_family(2.0, 0.1, 0.0) == pytest.approx((0.2 + math.sqrt(1.04)) / 2, abs=1e-10)
    assert (0.2 + math.sqrt(1.04)) / 2 == pytest.approx(0.6099019514, abs=1e-10)


def test_static_general_family_solves_gelfand_dikii(rng):
    w = 2.0
    for _ in range(20):
        c1 = complex(*rng.uniform(-0.7, 0.7, 2))
        t = rng.uniform(-2, 2)
        y = vacua.static_general_jet(w, c1, t)
        gd = y[0] * y[2] - 0.5 * y[1] ** 2 + 2 * w * w * y[0] ** 2 - 2
        assert abs(gd) <= 1e-10


def test_static_vacuum_n4():
    s = catalog.make_spec("static", num_points=4, mass=1.0)
    y = vacua.Vacuum(s).y_jets(0.0)[0]
    assert np.allclose(np.sort(y), np.sort([1, 3 ** -0.5, 3 ** -0.5, 5 ** -0.5]))


def test_expanding_constant_lapse_two():
    s = catalog.make_spec("expanding", num_points=4, mass=1.0, lapse=catalog.const_profile(2.0))
    y = vacua.Vacuum(s).y_jets(0.0)[0]
    assert np.min(np.abs(y - 0.5)) < 1e-14


def test_t6_mode_example():
    # a = e^t, N = 1, t = 0, zero mode with m^2 = 4
    s = catalog.make_spec("frw_t6", num_points=4, mass=2.0)
    v = vacua.Vacuum(s)
    k = int(np.argmin(np.abs(v.lam)))
    assert v.y_jets(0.0)[0, k] == pytest.approx(0.5)
    assert -v.z_jets(0.0)[0, k] == pytest.approx(0.5)


def test_t8_conformal_coupling_is_time_independent():
    s = catalog.make_spec("frw_t8", num_points=8, coupling=1 / 6, hubble=2.0)
    v = vacua.Vacuum(s)
    assert np.allclose(v.y_jets(-1.0)[0], v.y_jets(1.0)[0])


def test_singular_mode_reported():
    s = catalog.make_spec("static", num_points=4, mass=0.0)
    with pytest.raises(SingularityError) as e:
        vacua.Vacuum(s).y_jets(0.0)
    assert e.value.index == 0


def test_mode_families_positive_real(rng):
    for fam in ("desitter_l10", "radiation_l10b", "desitter_l11", "radiation_l11b"):
        s = catalog.make_spec(fam, num_points=8)
        v = vacua.Vacuum(s)
        lo, hi = s.interval
        for t in np.linspace(lo, hi, 7):
            assert np.all(v.y_jets(t)[0] > 0)


def test_l10_small_mass_recovers_constant():
    params = dict(m=1e-6, H=1.0, xi=1 / 6, hv2=4.0)
    for t in (-1.0, 0.0, 1.0):
        assert vacua.mode_vacuum_L10(params, t) == pytest.approx(0.5, abs=1e-8)


def test_screening_rejects_nonpositive_constants():
    s = catalog.make_spec("desitter_l10", num_points=4)
    with pytest.raises(ScreeningError):
        vacua.mode_solution(s, 1.0, constants=(-1.0, 0.0, 0.0), calibrate=False).jet(0.0)


def test_calibration_normalises_invariant():
    s = catalog.make_spec("radiation_l10b", num_points=8)
    v = vacua.Vacuum(s)
    for hv2, sol in v._solutions.items():
        for t in (0.5, 2.0, 8.0):
            y = sol.jet(t)
            assert abs(sol.invariant(t, sol.q_of(t)) - 2.0) < 1e-8
            assert y[0] > 0


def test_grid_jets_match_pointwise():
    s = catalog.make_spec("radiation_l11b", num_points=8)
    v = vacua.Vacuum(s)
    times = np.linspace(1.0, 1.5, 6)
    g = v.y_jets_grid(times)
    for i, t in enumerate(times):
        assert np.allclose(g[i], v.y_jets(t), rtol=1e-11, atol=1e-13)


def test_conformal_similarity_values():
    s = catalog.make_spec("frw_conformal", num_points=8)
    r = vacua.conformal_similarity(s, 0.4, np.random.default_rng(1), 20)
    assert r["similarity"] <= 1e-9 and r["similarity_Y"] <= 1e-9
    assert r["symplectic"] <= 1e-10


def test_t4_analytic_conservation():
    s = catalog.make_spec("frw_conformal", num_points=8)
    tr = conservation.BlockTrajectory.from_vacuum(vacua.Vacuum(s), np.linspace(-1, 1, 5))
    assert max(conservation.all_residuals(tr, s).values()) <= 1e-9
