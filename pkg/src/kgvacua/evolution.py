"""Classical time evolution of Cauchy data and transport of complex structures.

The evolution runs per mode in the time independent eigenbasis of the spacetime:
phi'' + f phi' + (alpha lam + beta) phi = 0 is integrated with classic RK4
for the two fundamental solutions of every mode.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import catalog, jstruct, kernels, phase, spectral
from .errors import DomainError
from .phase import BlockMatrix2, PhaseVector


def _grid(spec, t1, t2, step):
    catalog.check_time(spec, t1)
    catalog.check_time(spec, t2)
    if not step > 0:
        raise DomainError("step must be positive")
    span = t2 - t1
    if span == 0:
        return 0, 0.0
    if step > abs(span) * (1 + 1e-12):
        raise DomainError(f"step {step} exceeds the interval length {abs(span)}")
    nsteps = int(math.ceil(abs(span) / step - 1e-9))
    return nsteps, span / nsteps


def _samples(spec, t1, h, nsteps):
    ts = t1 + 0.5 * h * np.arange(2 * nsteps + 1)
    fs = np.empty(ts.shape)
    al = np.empty(ts.shape)
    be = np.empty(ts.shape)
    for j, t in enumerate(ts):
        # the last sample lands on t2 up to rounding
        t = min(max(t, spec.interval[0]), spec.interval[1])
        a, b, _, _, _, _ = catalog.coefficient_maps(spec, t)
        al[j], be[j] = a, b
        fs[j] = catalog.friction(spec, t)
    return fs, al, be


def mode_propagators(spec, t1: float, t2: float, step: float, jobs: int = 1) -> np.ndarray:
    """(n, 2, 2) maps of (phi_k, d_t phi_k) from t1 to t2, one per basis mode."""
    basis = spectral.mode_basis(spec)
    lam = np.ascontiguousarray(basis.base_eigenvalues, dtype=float)
    n = lam.shape[0]
    nsteps, h = _grid(spec, t1, t2, step)
    if nsteps == 0:
        return np.tile(np.eye(2), (n, 1, 1))
    fs, al, be = _samples(spec, t1, h, nsteps)
    if jobs <= 1 or n < 2:
        return np.asarray(kernels.rk4_modes(fs, al, be, lam, h, nsteps))
    chunks = np.array_split(np.arange(n), min(jobs, n))
    with ThreadPoolExecutor(max_workers=len(chunks)) as ex:
        parts = list(ex.map(lambda idx: np.asarray(kernels.rk4_modes(fs, al, be, lam[idx].copy(), h, nsteps)),
                            chunks))
    return np.concatenate(parts, axis=0)


def _density(spec, t):
    return spectral.lapse_sites(spec, t) / spectral.sqrt_h(spec, t)


def evolve(spec, state: PhaseVector, t1: float, t2: float, step: float, jobs: int = 1) -> PhaseVector:
    """Cauchy data (phi, pi) at t2 from data at t1; pi = sqrt(h) N^{-1} d_t phi."""
    if state.n != spec.spatial.num_points:
        raise ValueError(f"state has {state.n} sites, spec has {spec.spatial.num_points}")
    P = mode_propagators(spec, t1, t2, step, jobs)
    if t1 == t2:
        return PhaseVector(state.phi.copy(), state.pi.copy(), t2)
    basis = spectral.mode_basis(spec)
    V, w = basis.vectors, basis.base_weights
    c = V.T @ (w * state.phi)
    d = V.T @ (w * (state.pi * _density(spec, t1)))
    c2 = P[:, 0, 0] * c + P[:, 0, 1] * d
    d2 = P[:, 1, 0] * c + P[:, 1, 1] * d
    return PhaseVector(V @ c2, (V @ d2) / _density(spec, t2), t2)


def propagator_matrix(spec, t1: float, t2: float, step: float, jobs: int = 1) -> BlockMatrix2:
    """E_{t2,t1} as a 2n x 2n block matrix acting on (phi, pi)."""
    P = mode_propagators(spec, t1, t2, step, jobs)
    if t1 == t2:
        return BlockMatrix2.from_dense(np.eye(2 * spec.spatial.num_points))
    basis = spectral.mode_basis(spec)
    V, w = basis.vectors, basis.base_weights
    L = V.T * w[None, :]
    blk = lambda i, j: (V * P[:, i, j][None, :]) @ L  # noqa: E731
    r1 = _density(spec, t1)
    r2 = _density(spec, t2)
    # (phi, pi) -> (phi, v) -> modes -> back, with pi = v / density
    return BlockMatrix2(blk(0, 0), blk(0, 1) * r1[None, :],
                        blk(1, 0) / r2[:, None], blk(1, 1) * r1[None, :] / r2[:, None])


def symplectic_preservation(spec, t1: float, t2: float, step: float, rng=None, pairs: int = 50,
                            jobs: int = 1) -> float:
    """max over random pairs of |Omega(E P1, E P2) - Omega(P1, P2)| / (dx |P1| |P2|)."""
    rng = np.random.default_rng(0) if rng is None else rng
    E = propagator_matrix(spec, t1, t2, step, jobs)
    prs = phase.random_pairs(rng, spec.spatial.num_points, pairs)
    return phase.symplectic_invariance_residual(E, prs, spec.spatial.dx)


@dataclass
class TransportResult:
    residual: float
    naive: float
    orientation: int
    t1: float
    t2: float
    step: float

    def as_dict(self):
        return dict(self.__dict__)


def _rel(a, b):
    return float(np.linalg.norm(a) / np.linalg.norm(b))


def transport_residual(spec, vacuum, t1: float, t2: float, step: float, frozen: bool = False,
                       jobs: int = 1) -> TransportResult:
    """||J_{t1} - E^{-1} J_{t2} E||_F / ||J_{t1}||_F and the naive ||J_{t1} - J_{t2}||_F / ||J_{t1}||_F.

    vacuum provides blocks(t). With frozen=True the structure at t1 is used at
    t2 as well, the negative control of a time independent J.
    """
    dx = spec.spatial.dx
    b1 = vacuum.blocks(t1)
    sigma = jstruct.select_orientation(b1, dx)
    J1 = jstruct.assemble_J(b1.with_orientation(sigma)).dense()
    J2 = J1 if frozen else jstruct.assemble_J(vacuum.blocks(t2).with_orientation(sigma)).dense()
    E = propagator_matrix(spec, t1, t2, step, jobs).dense()
    moved = np.linalg.solve(E, J2 @ E)
    return TransportResult(_rel(J1 - moved, J1), _rel(J1 - J2, J1), sigma, t1, t2, step)


def transport_interval(spec) -> tuple:
    """Unit interval used by the transport checks."""
    return (1.0, 2.0) if spec.family in catalog.SQRT_FAMILIES else (0.0, 1.0)


def step_convergence(fn, steps) -> dict:
    """Residuals fn(step) for successive steps and their ratios."""
    errs = np.array([fn(h) for h in steps])
    return {"steps": list(map(float, steps)), "errors": errs.tolist(),
            "ratios": (errs[:-1] / errs[1:]).tolist()}
