import math

import numpy as np
import pytest

from kgvacua import catalog, evolution, vacua
from kgvacua.errors import DomainError
from kgvacua.phase import PhaseVector


def test_oscillator_quarter_period():
    # static zero mode with m = 2 oscillates as cos(2t)
    s = catalog.make_spec("static", num_points=4, mass=2.0)
    basis_state = PhaseVector(np.full(4, 1.0), np.zeros(4))
    out = evolution.evolve(s, basis_state, 0.0, math.pi / 4, 1e-3)
    assert np.allclose(out.phi, 0.0, atol=1e-10)
    assert np.allclose(out.pi, -2.0, atol=1e-10)


def test_identity_at_equal_times():
    s = catalog.make_spec("frw_t8", num_points=6)
    assert np.array_equal(evolution.propagator_matrix(s, 0.3, 0.3, 0.01).dense(), np.eye(12))


def test_reversibility(rng):
    s = catalog.make_spec("frw_t6", num_points=6)
    p = PhaseVector(*rng.standard_normal((2, 6)))
    back = evolution.evolve(s, evolution.evolve(s, p, 0.0, 1.0, 1e-3), 1.0, 0.0, 1e-3)
    assert np.allclose(back.stacked(), p.stacked(), atol=1e-9)


def test_symplectic_preservation(family_spec):
    t1, t2 = evolution.transport_interval(family_spec)
    assert evolution.symplectic_preservation(family_spec, t1, t2, 1e-3, pairs=10) <= 1e-8


def test_symplectic_drift_fourth_order():
    s = catalog.make_spec("frw_conformal", num_points=16)
    conv = evolution.step_convergence(lambda h: evolution.symplectic_preservation(s, 0.0, 1.0, h, pairs=10),
                                      [8e-3, 4e-3, 2e-3])
    for r in conv["ratios"]:
        assert 12 <= r <= 20


def test_transport_static_and_t4():
    s = catalog.make_spec("static", num_points=8)
    r = evolution.transport_residual(s, vacua.Vacuum(s), 0.0, 1.0, 1e-2)
    assert r.residual <= 1e-9 and r.naive == 0
    s = catalog.make_spec("frw_conformal", num_points=8)
    r = evolution.transport_residual(s, vacua.Vacuum(s), 0.0, 1.0, 1e-3)
    assert r.residual <= 1e-7 and r.naive > 0.1
    frozen = evolution.transport_residual(s, vacua.Vacuum(s), 0.0, 1.0, 1e-3, frozen=True)
    assert frozen.residual > 1e-2


def test_bad_steps():
    s = catalog.make_spec("frw_t8", num_points=4)
    for step in (0.0, -1e-3, 2.0):
        with pytest.raises(DomainError):
            evolution.propagator_matrix(s, 0.0, 1.0, step)
    with pytest.raises(DomainError):
        evolution.propagator_matrix(s, 0.0, 100.0, 0.1)


def test_jobs_bitwise_identical():
    s = catalog.make_spec("desitter_l11", num_points=16)
    a = evolution.mode_propagators(s, 0.0, 1.0, 0.01, jobs=1)
    b = evolution.mode_propagators(s, 0.0, 1.0, 0.01, jobs=4)
    assert np.array_equal(a, b)


def test_rk4_step_convergence():
    s = catalog.make_spec("frw_t7", num_points=8)
    v = vacua.Vacuum(s)
    conv = evolution.step_convergence(lambda h: evolution.transport_residual(s, v, 0.0, 1.0, h).residual,
                                      [0.08, 0.04, 0.02])
    for r in conv["ratios"]:
        assert 12 <= r <= 20
