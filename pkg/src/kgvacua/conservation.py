"""Residuals of the Conservation Equations and the auxiliary mode equations.

Trajectories come in two forms. Mode form holds one scalar per basis mode
(arrays of shape (T,) or (T, K)); all blocks commute there, residuals are
absolute. Matrix form holds (T, n, n) blocks; residuals are Frobenius norms
divided by ||Y||_F.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import catalog, spectral
from .errors import DomainError, SingularityError

ANALYTIC = "analytic"
FD4 = "fd4"
_MODES = (ANALYTIC, FD4)


class Coefficients(NamedTuple):
    """w^2, d_t w^2 and [f, f', f''] at one time, per mode or as matrices."""
    w2: np.ndarray
    dw2: np.ndarray
    f: float
    df: float
    d2f: float


def constant_coefficients(w2, f: float = 0.0) -> Callable[[float], Coefficients]:
    w2 = np.asarray(w2, dtype=float)
    z = np.zeros_like(w2)
    return lambda t: Coefficients(w2, z, float(f), 0.0, 0.0)


def mode_coefficients(spec, base_eigenvalues) -> Callable[[float], Coefficients]:
    """Per-mode coefficients for basis eigenvalues lam: w^2 = alpha lam + beta."""
    lam = np.asarray(base_eigenvalues, dtype=float)

    def build(t):
        alpha, beta, da, db, _, _ = catalog.coefficient_maps(spec, t)
        f = catalog.friction_jet(spec, t)
        return Coefficients(alpha * lam + beta, da * lam + db, *map(float, f))
    return build


def matrix_coefficients(spec) -> Callable[[float], Coefficients]:
    """Lattice w^2(t) and its time derivative as n x n matrices."""
    basis = spectral.mode_basis(spec)
    V, lam = basis.vectors, basis.base_eigenvalues
    left = V.T * basis.base_weights[None, :]

    def build(t):
        alpha, beta, da, db, _, _ = catalog.coefficient_maps(spec, t)
        f = catalog.friction_jet(spec, t)
        w2 = (V * (alpha * lam + beta)[None, :]) @ left
        dw2 = (V * (da * lam + db)[None, :]) @ left
        return Coefficients(w2, dw2, *map(float, f))
    return build


# --- finite differences ------------------------------------------------------

def _uniform_step(times):
    h = np.diff(times)
    if not np.all(h > 0):
        raise DomainError("time grid must be strictly increasing")
    if np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise DomainError("finite difference mode needs a uniform time grid")
    return float(h[0])


def fd_derivative(values, times, order: int) -> np.ndarray:
    """Central differences along axis 0; 4th order for d/dt and d2/dt2, 2nd order for d3/dt3.

    The two points at each end are NaN.
    """
    v = np.asarray(values, dtype=float)
    h = _uniform_step(np.asarray(times, dtype=float))
    out = np.full_like(v, np.nan)
    m2, m1, p1, p2 = v[:-4], v[1:-3], v[3:-1], v[4:]
    if order == 1:
        out[2:-2] = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h)
    elif order == 2:
        out[2:-2] = (-p2 + 16 * p1 - 30 * v[2:-2] + 16 * m1 - m2) / (12 * h * h)
    elif order == 3:
        out[2:-2] = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h ** 3)
    else:
        raise ValueError("order must be 1, 2 or 3")
    return out


# --- trajectories ------------------------------------------------------------

@dataclass
class BlockTrajectory:
    times: np.ndarray
    Y_values: np.ndarray
    Z_values: np.ndarray
    derivative_mode: str = ANALYTIC
    dY: Optional[np.ndarray] = None
    d2Y: Optional[np.ndarray] = None
    d3Y: Optional[np.ndarray] = None
    dZ: Optional[np.ndarray] = None
    d2Z: Optional[np.ndarray] = None
    base_eigenvalues: Optional[np.ndarray] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.Y_values = np.asarray(self.Y_values, dtype=float)
        self.Z_values = np.asarray(self.Z_values, dtype=float)
        if self.derivative_mode not in _MODES:
            raise ValueError(f"derivative_mode must be one of {_MODES}")
        T = self.times.shape[0]
        if self.times.ndim != 1 or np.any(np.diff(self.times) <= 0):
            raise DomainError("time grid must be strictly increasing")
        if self.Y_values.shape != self.Z_values.shape or self.Y_values.shape[0] != T:
            raise ValueError("Y and Z must share the shape (T, ...)")
        if self.derivative_mode == FD4:
            if T < 5:
                raise DomainError("finite difference mode needs at least 5 grid points")
            _uniform_step(self.times)
            self.dY = fd_derivative(self.Y_values, self.times, 1)
            self.d2Y = fd_derivative(self.Y_values, self.times, 2)
            self.d3Y = fd_derivative(self.Y_values, self.times, 3)
            self.dZ = fd_derivative(self.Z_values, self.times, 1)
            self.d2Z = fd_derivative(self.Z_values, self.times, 2)

    @property
    def matrix_form(self) -> bool:
        return self.Y_values.ndim == 3

    def _need(self, *names):
        for nm in names:
            if getattr(self, nm) is None:
                raise ValueError(f"analytic trajectory lacks {nm}")

    @classmethod
    def from_vacuum(cls, vacuum, times, modes=None, matrix=False, derivative_mode=ANALYTIC):
        """Sample a vacua.Vacuum; mode form over the chosen basis modes or full matrices."""
        times = np.asarray(times, dtype=float)
        spec = vacuum.spec
        yj = vacuum.y_jets_grid(times)  # (T, 4, K)
        fj = np.array([catalog.friction_jet(spec, t) for t in times])  # (T, 3)
        y0, y1, y2, y3 = (yj[:, i, :] for i in range(4))
        f0, f1, f2 = (fj[:, i, None] for i in range(3))
        z0 = 0.5 * (y1 - y0 * f0)
        z1 = 0.5 * (y2 - y1 * f0 - y0 * f1)
        z2 = 0.5 * (y3 - y2 * f0 - 2 * y1 * f1 - y0 * f2)
        lam = vacuum.lam
        if matrix:
            basis = spectral.mode_basis(spec)
            V = basis.vectors
            left = V.T * basis.base_weights[None, :]
            mats = lambda a: np.einsum("ik,tk,kj->tij", V, a, left)  # noqa: E731
            arrs = [mats(a) for a in (y0, z0, y1, y2, y3, z1, z2)]
        else:
            sel = slice(None) if modes is None else np.asarray(modes)
            arrs = [a[:, sel] for a in (y0, z0, y1, y2, y3, z1, z2)]
            lam = lam[sel]
        Y, Z, dY, d2Y, d3Y, dZ, d2Z = arrs
        if derivative_mode == FD4:
            return cls(times, Y, Z, FD4, base_eigenvalues=None if matrix else lam)
        return cls(times, Y, Z, ANALYTIC, dY, d2Y, d3Y, dZ, d2Z, None if matrix else lam)


def default_builder(traj: BlockTrajectory, spec) -> Callable[[float], Coefficients]:
    if traj.matrix_form:
        return matrix_coefficients(spec)
    if traj.base_eigenvalues is None:
        raise ValueError("mode trajectory without base eigenvalues needs an explicit op_builder")
    return mode_coefficients(spec, traj.base_eigenvalues)


# --- algebra helpers ---------------------------------------------------------

def _coeffs(traj, spec, op_builder):
    b = op_builder if op_builder is not None else default_builder(traj, spec)
    return [b(t) for t in traj.times]


class _Alg:
    """Products, inverses and commutators for mode or matrix form."""

    def __init__(self, matrix: bool, n: int = 0):
        self.matrix = matrix
        self.I = np.eye(n) if matrix else 1.0

    def mul(self, *xs):
        out = xs[0]
        for x in xs[1:]:
            out = out @ x if self.matrix else out * x
        return out

    def comm(self, a, b):
        if not self.matrix:
            return np.zeros(np.broadcast(a, b).shape)
        return a @ b - b @ a

    def fmat(self, f):
        return f * self.I

    def inv(self, y, index):
        if self.matrix:
            try:
                c = np.linalg.cond(y)
            except np.linalg.LinAlgError:
                c = np.inf
            if not np.isfinite(c) or c > 1e14:
                raise SingularityError(f"Y is singular at time index {index}", index=index)
            return np.linalg.inv(y)
        y = np.asarray(y, dtype=float)
        if np.any(y == 0):
            raise SingularityError(f"Y vanishes at time index {index}", index=index)
        return 1.0 / y

    def norm(self, r, y):
        if self.matrix:
            if np.any(~np.isfinite(r)):
                return np.nan
            return float(np.linalg.norm(r) / max(np.linalg.norm(y), 1e-300))
        return np.abs(r)


def _setup(traj):
    n = traj.Y_values.shape[1] if traj.matrix_form else 0
    return _Alg(traj.matrix_form, n)


def _finish(rows, traj):
    return np.asarray(rows, dtype=float)


# --- residual operations -----------------------------------------------------

def residuals_conservation(traj: BlockTrajectory, spec=None, op_builder=None) -> dict:
    """Residual curves of (I) d_t Z = -Y w^2 + Y^{-1}(1 + Z^2), (II) d_t Y = Y^{-1} Z Y + Y f + Z,
    (III) [Z, Y^2] = Y^2 [Y, f] and (IV) [Z, Y^{-1}(1 + Z^2)] = [Z, Y w^2]."""
    traj._need("dY", "dZ")
    alg = _setup(traj)
    cs = _coeffs(traj, spec, op_builder)
    res = {"I": [], "II": [], "III": [], "IV": []}
    for i, c in enumerate(cs):
        Y, Z = traj.Y_values[i], traj.Z_values[i]
        Yi = alg.inv(Y, i)
        F = alg.fmat(c.f)
        one_z2 = alg.I + alg.mul(Z, Z)
        Yw = alg.mul(Y, c.w2)
        r1 = traj.dZ[i] + Yw - alg.mul(Yi, one_z2)
        r2 = traj.dY[i] - alg.mul(Yi, Z, Y) - alg.mul(Y, F) - Z
        Y2 = alg.mul(Y, Y)
        r3 = alg.comm(Z, Y2) - alg.mul(Y2, alg.comm(Y, F))
        r4 = alg.comm(Z, alg.mul(Yi, one_z2)) - alg.comm(Z, Yw)
        for key, r in zip(("I", "II", "III", "IV"), (r1, r2, r3, r4)):
            res[key].append(alg.norm(r, Y))
    return {k: _finish(v, traj) for k, v in res.items()}


def residuals_kg_pair(traj: BlockTrajectory, spec=None, op_builder=None) -> dict:
    """Residual curves of the two second order equations obtained from the Klein-Gordon equation.

    me1: Z'' + f Z' + [w^2, Z] + 2 Y' w^2 + [f, Y] w^2 + Y (w^2)' = 0
    me2: 2 Z' + [f, Z] - Y'' + Y' f + Y f' + [Y', f] + [Y, w^2] + [f, Y] f = 0
    """
    if traj.times.shape[0] < 5:
        raise DomainError("at least 5 grid points are required")
    traj._need("dY", "d2Y", "dZ", "d2Z")
    alg = _setup(traj)
    cs = _coeffs(traj, spec, op_builder)
    out = {"me1": [], "me2": []}
    for i, c in enumerate(cs):
        Y, Z = traj.Y_values[i], traj.Z_values[i]
        dY, d2Y, dZ, d2Z = traj.dY[i], traj.d2Y[i], traj.dZ[i], traj.d2Z[i]
        F, dF = alg.fmat(c.f), alg.fmat(c.df)
        fy = alg.comm(F, Y)
        r1 = (d2Z + alg.mul(F, dZ) + alg.comm(c.w2, Z) + 2 * alg.mul(dY, c.w2)
              + alg.mul(fy, c.w2) + alg.mul(Y, c.dw2))
        r2 = (2 * dZ + alg.comm(F, Z) - d2Y + alg.mul(dY, F) + alg.mul(Y, dF)
              + alg.comm(dY, F) + alg.comm(Y, c.w2) + alg.mul(fy, F))
        out["me1"].append(alg.norm(r1, Y))
        out["me2"].append(alg.norm(r2, Y))
    return {k: _finish(v, traj) for k, v in out.items()}


def _q(alg, c):
    return alg.fmat(c.df + 0.5 * c.f * c.f) - 2 * c.w2


def residual_gelfand_dikii(traj: BlockTrajectory, spec=None, op_builder=None) -> np.ndarray:
    """Y Y'' - (Y')^2 / 2 - Y^2 (f' + f^2/2 - 2 w^2) - 2 per time (commuting case)."""
    traj._need("dY", "d2Y")
    alg = _setup(traj)
    cs = _coeffs(traj, spec, op_builder)
    rows = []
    for i, c in enumerate(cs):
        Y, dY, d2Y = traj.Y_values[i], traj.dY[i], traj.d2Y[i]
        r = alg.mul(Y, d2Y) - 0.5 * alg.mul(dY, dY) - alg.mul(Y, Y, _q(alg, c)) - 2 * alg.I
        rows.append(alg.norm(r, Y))
    return _finish(rows, traj)


def residual_third_order(traj: BlockTrajectory, spec=None, op_builder=None) -> np.ndarray:
    """Y''' - 2 Y' (f' + f^2/2 - 2 w^2) - Y (f'' + f f' - 2 (w^2)') per time."""
    if traj.derivative_mode == FD4 and traj.times.shape[0] < 7:
        raise DomainError("third derivative stencils need at least 7 grid points")
    traj._need("dY", "d3Y")
    alg = _setup(traj)
    cs = _coeffs(traj, spec, op_builder)
    rows = []
    for i, c in enumerate(cs):
        Y, dY, d3Y = traj.Y_values[i], traj.dY[i], traj.d3Y[i]
        dq = alg.fmat(c.d2f + c.f * c.df) - 2 * c.dw2
        r = d3Y - 2 * alg.mul(dY, _q(alg, c)) - alg.mul(Y, dq)
        rows.append(alg.norm(r, Y))
    return _finish(rows, traj)


def derived_Z_from_Y(traj: BlockTrajectory, spec=None, op_builder=None) -> np.ndarray:
    """Z = (Y' - Y f) / 2 in the commuting case."""
    traj._need("dY")
    if op_builder is not None:
        f = np.array([op_builder(t).f for t in traj.times])
    else:
        f = np.array([catalog.friction(spec, t) for t in traj.times])
    shape = (-1,) + (1,) * (traj.Y_values.ndim - 1)
    return 0.5 * (traj.dY - traj.Y_values * f.reshape(shape))


def all_residuals(traj: BlockTrajectory, spec=None, op_builder=None) -> dict:
    """Max over the grid (ignoring FD edge points) of every residual curve."""
    b = op_builder if op_builder is not None else default_builder(traj, spec)
    curves = dict(residuals_conservation(traj, spec, b))
    curves.update(residuals_kg_pair(traj, spec, b))
    curves["gelfand_dikii"] = residual_gelfand_dikii(traj, spec, b)
    if traj.derivative_mode == ANALYTIC or traj.times.shape[0] >= 7:
        curves["third_order"] = residual_third_order(traj, spec, b)
    return {k: float(np.nanmax(v)) for k, v in curves.items()}


# --- convergence -------------------------------------------------------------

def fd_convergence(sampler: Callable[[np.ndarray], BlockTrajectory], residual: Callable,
                   centers, steps, op_builder=None, spec=None) -> dict:
    """FD residual at fixed centre times for a sequence of halving steps.

    sampler(times) returns an FD trajectory on the given 7 point grid; the
    residual is read at the middle point. Returns errors and successive
    ratios err(h) / err(h / 2).
    """
    errs = []
    for h in steps:
        worst = 0.0
        for t0 in centers:
            grid = t0 + h * np.arange(-3, 4)
            tr = sampler(grid)
            r = residual(tr, spec, op_builder)
            if isinstance(r, dict):
                r = np.nanmax(np.stack([np.atleast_1d(np.asarray(v)[3]) for v in r.values()]))
            else:
                r = np.nanmax(np.asarray(r)[3])
            worst = max(worst, float(r))
        errs.append(worst)
    errs = np.array(errs)
    ratios = errs[:-1] / errs[1:]
    return {"steps": list(map(float, steps)), "errors": errs.tolist(), "ratios": ratios.tolist()}


def observed_order(ratios, factor: float = 2.0) -> list:
    return [float(np.log(r) / np.log(factor)) for r in ratios]
