"""Lattice discretisation of the spatial Klein-Gordon operator and its spectral calculus."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import catalog
from .catalog import SpacetimeSpec, SpatialModel
from .errors import DomainError, SingularityError


def lattice_eigenvalues(spatial: SpatialModel) -> np.ndarray:
    """kappa_k^2 = (2/dx^2)(1 - cos(2 pi k / n)), k = 0..n-1."""
    n = spatial.num_points
    k = np.arange(n)
    return 2.0 / spatial.dx ** 2 * (1.0 - np.cos(2 * math.pi * k / n))


def lattice_laplacian(spatial: SpatialModel) -> np.ndarray:
    """Periodic second difference matrix for -d^2/dx^2."""
    n = spatial.num_points
    L = 2.0 * np.eye(n)
    idx = np.arange(n)
    L[idx, (idx + 1) % n] -= 1.0
    L[idx, (idx - 1) % n] -= 1.0
    if n == 2:
        L = np.array([[2.0, -2.0], [-2.0, 2.0]])
    return L / spatial.dx ** 2


def static_operator_matrix(spec: SpacetimeSpec):
    """w^2 for the Static family on the lattice, with its measure mu.

    Conservative stencil -(N/s) D(K D phi) with s = sqrt(h), K = s N h^{11}
    evaluated at half-integer sites, plus N^2 (m^2 + xi Rbar).
    """
    sp = spec.spatial
    x = sp.sites
    xh = x + 0.5 * sp.dx
    ones = np.ones_like(x)
    lapse = sp.lapse_profile(x, sp.length) if sp.lapse_profile is not None else ones
    lapse_h = sp.lapse_profile(xh, sp.length) if sp.lapse_profile is not None else ones
    hb = sp.static_metric_profile(x, sp.length) if sp.static_metric_profile is not None else ones
    hb_h = sp.static_metric_profile(xh, sp.length) if sp.static_metric_profile is not None else ones
    if np.any(lapse <= 0) or np.any(lapse_h <= 0):
        raise DomainError("non-positive lapse at a lattice site")
    s = np.sqrt(hb)
    K = lapse_h / np.sqrt(hb_h)  # sqrt(h) N h^{11} with h_11 = hbar
    n = sp.num_points
    idx = np.arange(n)
    M = np.zeros((n, n))
    Km = np.roll(K, 1)  # K at i - 1/2
    M[idx, idx] += K + Km
    M[idx, (idx + 1) % n] -= K
    M[idx, (idx - 1) % n] -= Km
    M *= (lapse / s)[:, None] / sp.dx ** 2
    M[idx, idx] += lapse ** 2 * (spec.mass ** 2 + sp.curvature_offset)
    mu = s / lapse * sp.dx
    return M, mu


def _weighted_eigh(M, mu):
    """Eigenpairs of a mu-self-adjoint M via the symmetric conjugate mu^{1/2} M mu^{-1/2}."""
    r = np.sqrt(mu)
    S = r[:, None] * M / r[None, :]
    S = 0.5 * (S + S.T)
    lam, Q = np.linalg.eigh(S)
    return lam, Q / r[:, None]


@lru_cache(maxsize=64)
def _laplacian_basis(n: int, length: float):
    sp = SpatialModel(num_points=n, length=length)
    lam, V = _weighted_eigh(lattice_laplacian(sp), np.full(n, sp.dx))
    lam.setflags(write=False)
    V.setflags(write=False)
    return lam, V


def _static_basis(spec):
    M, mu = static_operator_matrix(spec)
    lam, V = _weighted_eigh(M, mu)
    return lam, V, mu


@dataclass(frozen=True)
class ModeBasis:
    """Time independent eigenbasis shared by all operators of a spec.

    base_eigenvalues are kappa^2 (homogeneous) or eigenvalues of the static
    operator; vectors are orthonormal for base_weights.
    """
    base_eigenvalues: np.ndarray
    vectors: np.ndarray
    base_weights: np.ndarray


_BASIS_CACHE: dict = {}


def mode_basis(spec: SpacetimeSpec) -> ModeBasis:
    sp = spec.spatial
    if spec.homogeneous:
        lam, V = _laplacian_basis(sp.num_points, sp.length)
        return ModeBasis(lam, V, np.full(sp.num_points, sp.dx))
    key = (sp, spec.mass)
    if key not in _BASIS_CACHE:
        lam, V, mu = _static_basis(spec)
        _BASIS_CACHE[key] = ModeBasis(lam, V, mu)
    return _BASIS_CACHE[key]


def measure(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """mu_i = N^{-1} sqrt(h) dx at every site."""
    if not spec.homogeneous:
        return mode_basis(spec).base_weights
    N = spec.lapse(t)
    a = spec.scale(t)
    return np.full(spec.spatial.num_points, a ** spec.spatial_dim_weight / N * spec.spatial.dx)


def sqrt_h(spec: SpacetimeSpec, t: float) -> np.ndarray:
    sp = spec.spatial
    if not spec.homogeneous:
        hb = sp.static_metric_profile(sp.sites, sp.length) if sp.static_metric_profile is not None else np.ones(sp.num_points)
        return np.sqrt(hb)
    return np.full(sp.num_points, spec.scale(t) ** spec.spatial_dim_weight)


def lapse_sites(spec: SpacetimeSpec, t: float) -> np.ndarray:
    sp = spec.spatial
    if not spec.homogeneous:
        return sp.lapse_profile(sp.sites, sp.length) if sp.lapse_profile is not None else np.ones(sp.num_points)
    return np.full(sp.num_points, spec.lapse(t))


@dataclass(frozen=True)
class SpectralOperator:
    dimension: int
    weights: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    time_tag: float

    def function(self, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Matrix of g(H) = sum_k g(lam_k) v_k <v_k, . >_mu."""
        V = self.eigenvectors
        return (V * g(self.eigenvalues)[None, :]) @ (V.T * self.weights[None, :])

    def from_values(self, values: np.ndarray) -> np.ndarray:
        """Matrix acting as the given per-mode values in this eigenbasis."""
        V = self.eigenvectors
        return (V * np.asarray(values)[None, :]) @ (V.T * self.weights[None, :])

    def matrix(self) -> np.ndarray:
        return self.function(lambda lam: lam)

    def coefficients(self, psi: np.ndarray) -> np.ndarray:
        """Mode coefficients <v_k, psi>_mu."""
        return self.eigenvectors.T @ (self.weights * psi)

    def mu_inner(self, u, v) -> float:
        return float(np.sum(self.weights * u * v))


def _make_operator(spec, t, which):
    basis = mode_basis(spec)
    alpha, beta, _, _, gamma, delta = catalog.coefficient_maps(spec, t)
    lam = basis.base_eigenvalues
    vals = alpha * lam + beta if which == "kg" else gamma * lam + delta
    mu = measure(spec, t)
    # rescale so the columns are orthonormal for the current measure
    V = basis.vectors * np.sqrt(basis.base_weights[0] / mu[0]) if spec.homogeneous else basis.vectors
    order = np.argsort(vals, kind="stable")
    return SpectralOperator(spec.spatial.num_points, mu, vals[order], V[:, order], float(t)), order


def build_spatial_operator(spec: SpacetimeSpec, t: float) -> SpectralOperator:
    """The positive operator H_V of the family's closed-form vacuum at time t.

    For Static and Expanding this is w^2 itself; for the other families
    it differs from w^2 by the scalar terms absorbed in the closed form
    (see ``kg_operator``). For the Bessel, Airy and Whittaker families it is
    H_V^2 = -Delta + xi Rbar (+ (6 xi - 1) H^2 for the de Sitter case).
    """
    return _make_operator(spec, t, "hv")[0]


def kg_operator(spec: SpacetimeSpec, t: float) -> SpectralOperator:
    """The lattice w^2(t) entering phi'' + f phi' + w^2 phi = 0."""
    return _make_operator(spec, t, "kg")[0]


def spectral_power(op: SpectralOperator, s: float) -> np.ndarray:
    if s == 0:
        return np.eye(op.dimension)
    if s < 0:
        bad = np.nonzero(op.eigenvalues <= 0)[0]
        if bad.size:
            k = int(bad[0])
            raise SingularityError(f"negative power of an operator with eigenvalue "
                                   f"{op.eigenvalues[k]:.3g} at mode index {k}", index=k)
    elif np.any(op.eigenvalues < 0) and s != int(s):
        k = int(np.nonzero(op.eigenvalues < 0)[0][0])
        raise SingularityError(f"fractional power of a negative eigenvalue at mode index {k}", index=k)
    if s == 1:
        return op.matrix()
    return op.function(lambda lam: np.power(lam, s))


@dataclass(frozen=True)
class SobolevOrder:
    s: float
    shift: Optional[float] = None

    def __post_init__(self):
        if self.shift is not None and self.shift < 1:
            raise ValueError("shift rho must be >= 1")


def mu_norm(op: SpectralOperator, psi) -> float:
    return math.sqrt(max(op.mu_inner(psi, psi), 0.0))


def sobolev_norm(op: SpectralOperator, psi, order: SobolevOrder) -> float:
    """||H^s psi||_mu, or ||(H + rho)^s psi||_mu when a shift is given."""
    psi = np.asarray(psi, dtype=float)
    if order.shift is not None:
        shifted = SpectralOperator(op.dimension, op.weights, op.eigenvalues + order.shift,
                                   op.eigenvectors, op.time_tag)
        return mu_norm(op, spectral_power(shifted, order.s) @ psi)
    return mu_norm(op, spectral_power(op, order.s) @ psi)


def graph_norm_sq(op: SpectralOperator, psi) -> float:
    """||H psi||^2 + ||psi||^2 in L^2(mu)."""
    return sobolev_norm(op, psi, SobolevOrder(1.0)) ** 2 + mu_norm(op, psi) ** 2


def norm_equivalence_constant(op: SpectralOperator) -> float:
    """c2 = 1 + 1/eps where ||H psi||^2 >= eps ||psi||^2, i.e. eps = lam_min^2."""
    lam_min = float(np.min(np.abs(op.eigenvalues)))
    if lam_min <= 0:
        raise SingularityError("operator is not strictly positive", index=int(np.argmin(np.abs(op.eigenvalues))))
    return 1.0 + 1.0 / lam_min ** 2


def _weighted_operator_norm(op, A, left_power, right_power):
    """sup ||H^{l} A psi|| / ||H^{r} psi|| in L^2(mu)."""
    r = np.sqrt(op.weights)
    Bm = spectral_power(op, left_power) @ A @ spectral_power(op, -right_power)
    return float(np.linalg.norm(r[:, None] * Bm / r[None, :], 2))


def operator_bound_check(op: SpectralOperator, s: float) -> float:
    """max of ||H||_{W^{2s} -> W^{2s-2}} and ||H^{-1}||_{W^{2s-2} -> W^{2s}}."""
    H = spectral_power(op, 1.0)
    Hinv = spectral_power(op, -1.0)
    fwd = _weighted_operator_norm(op, H, s - 1.0, s)
    back = _weighted_operator_norm(op, Hinv, s, s - 1.0)
    return max(fwd, back)


def shifted_inverse_power_norm(op: SpectralOperator, s: float, rho: float = 1.0) -> float:
    """||(H + rho)^{-s}|| on L^2(mu)."""
    shifted = SpectralOperator(op.dimension, op.weights, op.eigenvalues + rho, op.eigenvectors, op.time_tag)
    r = np.sqrt(op.weights)
    P = spectral_power(shifted, -s)
    return float(np.linalg.norm(r[:, None] * P / r[None, :], 2))


def continuum_eigenvalue(k: int, length: float) -> float:
    return (2 * math.pi * k / length) ** 2
