import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from kgvacua import catalog, jstruct, phase, spectral, specfun, vacua
from kgvacua.jstruct import ComplexStructureBlocks
from kgvacua.phase import PhaseVector

finite = st.floats(-3, 3, allow_nan=False)
vec = st.lists(finite, min_size=4, max_size=4)
OP = spectral.build_spatial_operator(catalog.make_spec("static", num_points=4, mass=1.0), 0.0)


@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.lists(st.floats(0.2, 5), min_size=4, max_size=4))
@settings(max_examples=50, deadline=None)
def test_commuting_blocks_give_complex_structure(a, y):
    b = ComplexStructureBlocks.from_AY(OP.from_values(np.array(a)), OP.from_values(np.array(y)),
                                       np.ones(4), OP.weights)
    J = jstruct.assemble_J(b)
    assert jstruct.square_residual(J) <= 1e-9
    assert max(b.relation_residuals().values()) <= 1e-9
    assert jstruct.check_adjoint(b, "density") <= 1e-9


@given(vec, vec, vec, vec)
def test_epsilon_product_is_symplectic_form(p1, q1, p2, q2):
    a, b = PhaseVector(p1, q1), PhaseVector(p2, q2)
    assert math.isclose(phase.epsilon_product(a, b, 0.5), phase.symplectic_form(a, b, 0.5), abs_tol=1e-12)
    assert math.isclose(phase.symplectic_form(a, b), -phase.symplectic_form(b, a), abs_tol=1e-12)


@given(st.floats(-1.9, 1.9), st.floats(0.3, 2.0), st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_conformal_map_preserves_symplectic_form(t, hubble, seed):
    s = catalog.make_spec("frw_conformal", num_points=4, hubble=hubble)
    X = phase.conformal_map(s, t)
    pairs = phase.random_pairs(np.random.default_rng(seed), 4, 3)
    assert phase.symplectic_invariance_residual(X, pairs, s.spatial.dx) <= 1e-10
    assert phase.epsilon_adjoint_residual(X) <= 1e-12


@given(st.floats(0.5, 3), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(-2, 2))
def test_static_general_gelfand_dikii(w, re, im, t):
    y = vacua.static_general_jet(w, complex(re, im) / w, t)
    gd = y[0] * y[2] - 0.5 * y[1] ** 2 + 2 * w * w * y[0] ** 2 - 2
    assert abs(gd) <= 1e-9 * max(1.0, abs(y[0]) ** 2 * w * w)


@given(st.floats(-4.5, 6), st.floats(-4, 4))
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    if abs(z) < 1e-3 or (abs(y) < 1e-6 and x <= 0 and abs(x - round(x)) < 1e-3):
        return
    lhs = specfun.gamma_complex(z + 1)
    rhs = z * specfun.gamma_complex(z)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(lhs))
