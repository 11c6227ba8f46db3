import numpy as np
import pytest

from kgvacua import catalog, phase
from kgvacua.phase import BlockMatrix2, PhaseVector


def test_symplectic_form_examples():
    assert phase.symplectic_form(PhaseVector([1.0], [0.0]), PhaseVector([0.0], [1.0]), 1.0) == -1.0
    p1 = PhaseVector([1.0, 0.0], [0.0, 0.0])
    p2 = PhaseVector([0.0, 0.0], [2.0, 0.0])
    assert phase.symplectic_form(p1, p2, 0.5) == pytest.approx(-1.0)


def test_symplectic_antisymmetry(rng):
    for p1, p2 in phase.random_pairs(rng, 7, 20):
        assert phase.symplectic_form(p1, p1) == pytest.approx(0.0, abs=1e-12)
        assert phase.symplectic_form(p1, p2) == pytest.approx(-phase.symplectic_form(p2, p1))


def test_epsilon_product_matches_symplectic_form(rng):
    for p1, p2 in phase.random_pairs(rng, 5, 100):
        assert abs(phase.epsilon_product(p1, p2, 0.3) - phase.symplectic_form(p1, p2, 0.3)) <= 1e-12


def test_epsilon_matrix_identities():
    E = phase.epsilon_matrix(4)
    assert np.allclose(E @ E, -np.eye(8))
    assert np.allclose(E.T, -E)


def test_measure_transform_examples():
    T = phase.measure_transform(catalog.make_spec("static", num_points=4), 0.3)
    assert np.allclose(T.dense(), np.eye(8))
    s = catalog.make_spec("frw_t6", num_points=4, hubble=1.0)
    T = phase.measure_transform(s, 1.0)
    assert np.allclose(T.lr, np.exp(-3.0) * np.eye(4))
    assert np.allclose((T @ T.inverse()).dense(), np.eye(8), atol=1e-12)


def test_conformal_map_examples(rng):
    s = catalog.make_spec("expanding", num_points=3)
    assert np.allclose(phase.conformal_map(s, 0.4).dense(), np.eye(6))
    s = catalog.make_spec("frw_conformal", num_points=3, hubble=1.0)
    X = phase.conformal_map(s, 0.0)
    assert np.allclose(X.ul, np.eye(3)) and np.allclose(X.ll, np.eye(3))
    assert np.allclose(X.ur, 0) and np.allclose(X.lr, np.eye(3))
    X = phase.conformal_map(s, 0.7)
    assert phase.symplectic_invariance_residual(X, phase.random_pairs(rng, 3, 50)) <= 1e-10


def test_block_matrix_roundtrip(rng):
    M = rng.standard_normal((6, 6))
    B = BlockMatrix2.from_dense(M)
    assert np.array_equal(B.dense(), M)
    p = PhaseVector.from_stacked(rng.standard_normal(6))
    assert np.allclose((B @ p).stacked(), M @ p.stacked())


def test_mismatched_pair():
    with pytest.raises(ValueError):
        phase.symplectic_form(PhaseVector([1.0], [0.0]), PhaseVector([1.0, 2.0], [0.0, 0.0]))
