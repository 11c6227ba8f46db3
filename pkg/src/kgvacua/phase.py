"""Discretised phase space: Cauchy data, symplectic form and the maps T and X."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import catalog, spectral
from .errors import DomainError, UnsupportedFamilyError

EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class PhaseVector:
    """Cauchy data (phi, pi); pi is a density, pi = sqrt(h) N^{-1} d_t phi."""
    phi: np.ndarray
    pi: np.ndarray
    time_tag: float = 0.0

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if phi.shape != pi.shape or phi.ndim != 1:
            raise ValueError("phi and pi must be 1D arrays of equal length")
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(pi))):
            raise ValueError("phase vector components must be finite")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "pi", pi)

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.phi, self.pi])

    @classmethod
    def from_stacked(cls, x, time_tag=0.0) -> "PhaseVector":
        x = np.asarray(x, dtype=float)
        n = x.shape[0] // 2
        return cls(x[:n], x[n:], time_tag)


@dataclass(frozen=True)
class BlockMatrix2:
    ul: np.ndarray
    ur: np.ndarray
    ll: np.ndarray
    lr: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(b) for b in (self.ul, self.ur, self.ll, self.lr)}
        if len(shapes) != 1:
            raise ValueError("blocks must share one shape")
        (s,) = shapes
        if len(s) != 2 or s[0] != s[1]:
            raise ValueError("blocks must be square")

    @property
    def n(self) -> int:
        return np.shape(self.ul)[0]

    def dense(self) -> np.ndarray:
        return np.block([[self.ul, self.ur], [self.ll, self.lr]])

    @classmethod
    def from_dense(cls, m) -> "BlockMatrix2":
        m = np.asarray(m)
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:])

    @classmethod
    def diagonal(cls, d_upper, d_lower) -> "BlockMatrix2":
        z = np.zeros((len(d_upper), len(d_upper)))
        return cls(np.diag(d_upper), z, z.copy(), np.diag(d_lower))

    def __matmul__(self, other):
        if isinstance(other, BlockMatrix2):
            return BlockMatrix2.from_dense(self.dense() @ other.dense())
        if isinstance(other, PhaseVector):
            return PhaseVector.from_stacked(self.dense() @ other.stacked(), other.time_tag)
        return self.dense() @ other

    def inverse(self) -> "BlockMatrix2":
        return BlockMatrix2.from_dense(np.linalg.inv(self.dense()))

    def site_block(self, i: int) -> np.ndarray:
        return np.array([[self.ul[i, i], self.ur[i, i]], [self.ll[i, i], self.lr[i, i]]])


def _check_pair(p1: PhaseVector, p2: PhaseVector):
    if p1.n != p2.n:
        raise ValueError(f"dimension mismatch: {p1.n} vs {p2.n}")


def symplectic_form(p1: PhaseVector, p2: PhaseVector, dx: float = 1.0) -> float:
    """Omega = sum_i (pi1_i phi2_i - pi2_i phi1_i) dx."""
    _check_pair(p1, p2)
    return float(np.sum(p1.pi * p2.phi - p2.pi * p1.phi) * dx)


def epsilon_apply(p: PhaseVector) -> PhaseVector:
    """epsilon (phi, pi) = (pi, -phi)."""
    return PhaseVector(p.pi, -p.phi, p.time_tag)


def epsilon_product(p1: PhaseVector, p2: PhaseVector, dx: float = 1.0) -> float:
    """Omega written through the auxiliary L2 + L2 pairing: <epsilon Phi1, Phi2>."""
    _check_pair(p1, p2)
    e = epsilon_apply(p1)
    return float((np.dot(e.phi, p2.phi) + np.dot(e.pi, p2.pi)) * dx)


def epsilon_matrix(n: int) -> np.ndarray:
    return np.kron(EPSILON, np.eye(n))


def symplectic_matrix(n: int, dx: float = 1.0) -> np.ndarray:
    """Matrix S with Omega(Phi1, Phi2) = Phi1^T S Phi2 on stacked vectors."""
    return dx * epsilon_matrix(n).T


def measure_transform(spec, t: float) -> BlockMatrix2:
    """T = diag(1, N / sqrt(h)) per site; maps (phi, pi) to (phi, d_t phi)."""
    N = spectral.lapse_sites(spec, t)
    s = spectral.sqrt_h(spec, t)
    if np.any(N <= 0) or np.any(s <= 0):
        raise DomainError("measure transform needs positive lapse and density")
    return BlockMatrix2.diagonal(np.ones_like(N), N / s)


_CONFORMAL = (catalog.EXPANDING, catalog.FRW_CONFORMAL, catalog.FRW_T6, catalog.FRW_T8,
              catalog.FRW_T7, catalog.DESITTER_L10, catalog.RADIATION_L10B)


def conformal_lapse(spec) -> catalog.TimeProfile:
    """Nbar = N / a as a time profile of the conformally related metric."""
    N, a = spec.lapse, spec.scale
    if N.kind == "exp" and a.kind == "exp":
        return catalog.TimeProfile("exp", c=N.c / a.c, rate=N.rate - a.rate)
    if N == a:
        return catalog.const_profile()
    if a.kind == "const":
        return catalog.TimeProfile(N.kind, c=N.c / a.c, rate=N.rate, amp=N.amp / a.c, func=N.func)
    return catalog.TimeProfile("callable", func=lambda s: N(s) / a(s))


def conformal_map(spec, t: float) -> BlockMatrix2:
    """X = [[a, 0], [Nbar^{-1} sqrt(hbar) a', a^{-1}]] sitewise, Nbar = N / a.

    X takes Cauchy data of g = a^2 gbar (field phi = a^{-1} phibar) to the
    data (phibar, pibar) of the conformally related metric gbar.
    """
    if spec.family not in _CONFORMAL:
        raise UnsupportedFamilyError(f"{spec.family} has no conformal phase space map")
    catalog.check_time(spec, t)
    a = spec.scale.jet(t)
    nbar = spec.lapse(t) / a[0]
    n = spec.spatial.num_points
    one = np.ones(n)
    z = np.zeros((n, n))
    return BlockMatrix2(a[0] * np.eye(n), z, np.diag(one * a[1] / nbar), np.eye(n) / a[0])


def barred_spec(spec):
    """The Expanding spacetime gbar = a^{-2} g with lapse N / a and unit scale factor."""
    if spec.family not in (catalog.EXPANDING, catalog.FRW_CONFORMAL):
        raise UnsupportedFamilyError(f"{spec.family} has no massless conformal partner")
    return catalog.SpacetimeSpec(
        family=catalog.EXPANDING, lapse=conformal_lapse(spec), scale=catalog.const_profile(),
        mass=0.0, coupling=spec.coupling, hubble=spec.hubble, spatial=spec.spatial,
        spatial_dim_weight=spec.spatial_dim_weight)


def scalar_conformal_map(spec, t: float) -> BlockMatrix2:
    """S = Tbar X T^{-1}: the conformal map between (phi, d_t phi) coordinates."""
    X = conformal_map(spec, t)
    T = measure_transform(spec, t)
    Tb = measure_transform(barred_spec(spec), t)
    return Tb @ X @ T.inverse()


def literal_XT(spec, t: float) -> BlockMatrix2:
    """T X T^{-1} with a single measure transform."""
    T = measure_transform(spec, t)
    return T @ conformal_map(spec, t) @ T.inverse()


def epsilon_adjoint_residual(X: BlockMatrix2) -> float:
    """|| epsilon X^T epsilon^T - X^{-1} ||_F / ||X^{-1}||_F."""
    E = epsilon_matrix(X.n)
    Xd = X.dense()
    Xi = np.linalg.inv(Xd)
    return float(np.linalg.norm(E @ Xd.T @ E.T - Xi) / np.linalg.norm(Xi))


def symplectic_invariance_residual(X, pairs, dx: float = 1.0) -> float:
    """max |Omega(X P1, X P2) - Omega(P1, P2)| / (dx |P1| |P2|) over pairs.

    The denominator bounds |Omega(P1, P2)| by Cauchy-Schwarz, so the ratio
    stays meaningful for nearly Omega-orthogonal pairs.
    """
    worst = 0.0
    for p1, p2 in pairs:
        w0 = symplectic_form(p1, p2, dx)
        w1 = symplectic_form(X @ p1, X @ p2, dx)
        scale = dx * np.linalg.norm(p1.stacked()) * np.linalg.norm(p2.stacked())
        worst = max(worst, abs(w1 - w0) / scale)
    return worst


def random_pairs(rng: np.random.Generator, n: int, count: int):
    out = []
    for _ in range(count):
        v = rng.standard_normal((4, n))
        out.append((PhaseVector(v[0], v[1]), PhaseVector(v[2], v[3])))
    return out
