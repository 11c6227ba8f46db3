"""Closed-form vacua: block sets (Y, A) and per-mode trajectories Y(t), Z(t).

For every family the blocks are functions of one time independent mode
basis. Y follows the family's closed form and Z = (Y' - Y f) / 2, A = -Z.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import catalog, kernels, spectral, specfun
from .catalog import SpacetimeSpec
from .errors import ScreeningError, SingularityError, UnsupportedFamilyError
from .jstruct import ComplexStructureBlocks

CLOSED_FAMILIES = (catalog.STATIC, catalog.EXPANDING, catalog.FRW_CONFORMAL, catalog.FRW_T6,
                   catalog.FRW_T7, catalog.FRW_T8, catalog.FRW_T9)
REALITY_TOL = 1e-8
_BINOM = ((1,), (1, 1), (1, 2, 1), (1, 3, 3, 1))


def product_jet(u, w):
    """Jet of u*w up to third order from the jets of u and w."""
    return np.array([sum(_BINOM[k][j] * u[j] * w[k - j] for j in range(k + 1)) for k in range(4)])


def ratio_jet(a, N):
    """Jet of a / N."""
    q0 = a[0] / N[0]
    q1 = (a[1] - q0 * N[1]) / N[0]
    q2 = (a[2] - 2 * q1 * N[1] - q0 * N[2]) / N[0]
    q3 = (a[3] - 3 * q2 * N[1] - 3 * q1 * N[2] - q0 * N[3]) / N[0]
    return np.array([q0, q1, q2, q3])


def chain_jet(g, zd):
    """Jet in t of g(z(t)) from the z-jet g = [g, g', g'', g'''] and zd = [z', z'', z''']."""
    z1, z2, z3 = zd
    return np.array([g[0], g[1] * z1, g[2] * z1 * z1 + g[1] * z2,
                     g[3] * z1 ** 3 + 3 * g[2] * z1 * z2 + g[1] * z3])


def z_from_y(yjet, fjet):
    """[Z, Z', Z''] from Z = (Y' - Y f) / 2."""
    y0, y1, y2, y3 = yjet
    f0, f1, f2 = fjet
    return np.array([0.5 * (y1 - y0 * f0),
                     0.5 * (y2 - y1 * f0 - y0 * f1),
                     0.5 * (y3 - y2 * f0 - 2 * y1 * f1 - y0 * f2)])


def _screen(y, t):
    if abs(y.imag) > REALITY_TOL * max(abs(y), 1e-300):
        raise ScreeningError(f"Y({t}) is not real (imaginary part {y.imag:.3g})")
    if not y.real > 0:
        raise ScreeningError(f"Y({t}) = {y.real:.6g} is not positive")


# --- static family of Y with constants ------------------------------------

def static_general_family(w: float, c1: complex, t: float) -> float:
    """Y(t) = 2 Re(c1 e^{2iwt}) / w + sqrt(1 + 4|c1|^2) / w."""
    if not w > 0:
        raise SingularityError("mode frequency must be positive")
    y = (2.0 * (complex(c1) * cmath.exp(2j * w * t)).real + math.sqrt(1.0 + 4.0 * abs(c1) ** 2)) / w
    if not y > 0:
        raise ScreeningError(f"Y = {y} is not positive")
    return y


def static_general_jet(w: float, c1: complex, t: float) -> np.ndarray:
    e = complex(c1) * cmath.exp(2j * w * t)
    base = 2.0 * np.array([e, 2j * w * e, -4 * w * w * e, -8j * w ** 3 * e]).real / w
    base[0] += math.sqrt(1.0 + 4.0 * abs(c1) ** 2) / w
    return base


# --- special function mode solutions --------------------------------------

@dataclass
class ModeSolution:
    """Y(t) for one H_V eigenvalue of a Bessel, Airy or Whittaker family.

    Y = c1 P11 + c2 P12 + c3 P22 with the family's basis products; the
    constants are rescaled once so that the Gelfand-Dikii invariant equals 2
    in a least squares sense over three reference times.
    """
    family: str
    hv2: float
    mass: float
    hubble: float
    coupling: float
    constants: Optional[tuple] = None
    reference_times: tuple = ()
    calibration: float = 1.0
    _wr: tuple = field(default=(), repr=False)

    def __post_init__(self):
        fam = self.family
        m, H = self.mass, self.hubble
        if fam == catalog.DESITTER_L10:
            if not self.hv2 > 0:
                raise ScreeningError("H_V^2 must be positive for the Bessel de Sitter modes")
            self.hv = math.sqrt(self.hv2)
            self.alpha = 1j * self.hv / H
            default = (1.0 / self.hv, 0.0, 0.0)
        elif fam == catalog.DESITTER_L11:
            M2 = m * m + 2 * (6 * self.coupling - 9.0 / 8.0) * H * H
            if not M2 > 0:
                raise ScreeningError("M^2 <= 0: the real order branch is not supported")
            self.M = math.sqrt(M2)
            self.hv = math.sqrt(max(self.hv2, 0.0))
            self.alpha = -1j * self.M / H
            default = (1.0 / self.M, 0.0, 0.0)
        elif fam == catalog.RADIATION_L10B:
            self.alpha = None
            c = math.pi / m ** (2.0 / 3.0)
            default = (c, 0.0, c)
        elif fam == catalog.RADIATION_L11B:
            self.alpha = -1j * self.hv2 / (2 * m)
            default = None
        else:
            raise UnsupportedFamilyError(f"{fam} has no special function mode solution")
        if self.constants is None:
            if default is None:
                default = self._whittaker_default()
            self.constants = tuple(default)
        if self.reference_times:
            self.calibrate(self.reference_times)

    # basis jets in t
    def _bessel_v(self, t):
        H = self.hubble
        a = self.alpha
        if self.family == catalog.DESITTER_L10:
            z = self.mass / H * math.exp(H * t)
            zd = (H * z, H * H * z, H ** 3 * z)
        else:
            if self.hv == 0.0:
                e = cmath.exp(1j * self.M * t)
                k = 1j * self.M
                return np.array([e, k * e, k * k * e, k ** 3 * e])
            z = self.hv / H * math.exp(-H * t)
            zd = (-H * z, H * H * z, -(H ** 3) * z)
        pref = 2.0 ** a * specfun.gamma_complex(1 + a)
        return pref * chain_jet(specfun.bessel_j_jet(a, z), zd)

    def z_of(self, t):
        H, m = self.hubble, self.mass
        fam = self.family
        if fam == catalog.DESITTER_L10:
            return m / H * math.exp(H * t)
        if fam == catalog.DESITTER_L11:
            return self.hv / H * math.exp(-H * t)
        if fam == catalog.RADIATION_L10B:
            return -(self.hv2 + m * m * t) / m ** (4.0 / 3.0)
        return 2j * m * t

    def _zd(self, t):
        """(z', z'', z''') of the family's argument map."""
        H, m = self.hubble, self.mass
        fam = self.family
        if fam == catalog.DESITTER_L10:
            z = self.z_of(t)
            return (H * z, H * H * z, H ** 3 * z)
        if fam == catalog.DESITTER_L11:
            z = self.z_of(t)
            return (-H * z, H * H * z, -(H ** 3) * z)
        if fam == catalog.RADIATION_L10B:
            return (-m ** (2.0 / 3.0), 0.0, 0.0)
        return (2j * m, 0.0, 0.0)

    def _basis(self, t):
        """t-jets of the basis solutions: [v] for Bessel, [Ai, Bi] or [M, W] otherwise."""
        fam = self.family
        if fam in (catalog.DESITTER_L10, catalog.DESITTER_L11):
            return [self._bessel_v(t)]
        if fam == catalog.RADIATION_L10B:
            zd = self._zd(t)
            return [chain_jet(g, zd) for g in specfun.airy_jet(self.z_of(t))]
        return list(self._whittaker_jets(t))

    def _marchable(self, times):
        fam = self.family
        if fam == catalog.DESITTER_L11 and self.hv == 0.0:
            return False
        if fam == catalog.RADIATION_L10B:
            # Ai is recessive for z > 0
            return all(self.z_of(t) <= 0 for t in times)
        return True

    def _basis_grid(self, times):
        """Basis t-jets on a grid, continued from the first point (list of (T, 4) arrays)."""
        if len(times) < 2 or not self._marchable(times):
            per = [self._basis(t) for t in times]
            return [np.array([p[i] for p in per]) for i in range(len(per[0]))]
        fam = self.family
        zs = [self.z_of(t) for t in times]
        if fam in (catalog.DESITTER_L10, catalog.DESITTER_L11):
            kind, p1, p2 = kernels.BESSEL, self.alpha, 0.0
            pref = 2.0 ** self.alpha * specfun.gamma_complex(1 + self.alpha)
            j, dj = specfun._bessel_value_deriv(complex(self.alpha), complex(zs[0]))
            starts = [(pref * j, pref * dj)]
        elif fam == catalog.RADIATION_L10B:
            kind, p1, p2 = kernels.AIRY, 0.0, 0.0
            ai, dai, bi, dbi = specfun._airy_value_deriv(float(zs[0]))
            starts = [(ai, dai), (bi, dbi)]
        else:
            kind, p1, p2 = kernels.WHITTAKER, self.alpha, 0.25
            k, mu, z0 = complex(self.alpha), 0.25 + 0j, complex(zs[0])
            starts = [specfun._whittaker_m(k, mu, z0), specfun._whittaker_w(k, mu, z0)]
        out = []
        for y0, dy0 in starts:
            zj = specfun.march_jets(kind, p1, p2, zs, y0, dy0)
            tj = np.array([chain_jet(zj[i], self._zd(t)) for i, t in enumerate(times)])
            if fam == catalog.RADIATION_L10B:
                tj = tj.real
            out.append(tj)
        return out

    def _combine(self, basis):
        if len(basis) == 1:
            v = basis[0]
            vb = np.conj(v)
            return product_jet(v, vb), product_jet(vb, vb), product_jet(v, v)
        u, w = basis
        return product_jet(u, u), product_jet(u, w), product_jet(w, w)

    def _products(self, t):
        return self._combine(self._basis(t))

    def _whittaker_jets(self, t):
        mj, wj = specfun.whittaker_jet(self.alpha, 0.25, self.z_of(t))
        zd = (2j * self.mass, 0.0, 0.0)
        return chain_jet(mj, zd), chain_jet(wj, zd)

    def _whittaker_default(self):
        """Y = |W|^2 written in the (M, W) basis: conj(W) = p M + q W."""
        t0 = 1.0
        mj, wj = self._whittaker_jets(t0)
        cw = np.conj(wj)
        wr = lambda u, v: u[0] * v[1] - u[1] * v[0]  # noqa: E731
        d = wr(mj, wj)
        p = wr(cw, wj) / d
        q = wr(mj, cw) / d
        self._wr = (p, q)
        return (0.0, p, q)

    def jet_complex(self, t):
        p11, p12, p22 = self._products(t)
        c1, c2, c3 = (self.calibration * c for c in self.constants)
        return c1 * p11 + c2 * p12 + c3 * p22

    def jet(self, t, screen=True):
        y = self.jet_complex(t)
        if screen:
            _screen(y[0], t)
        return y.real

    def jet_grid(self, times, screen=True):
        """(T, 4) jets on a grid; values are continued point to point along the grid."""
        basis = self._basis_grid([float(t) for t in times])
        per = [self._combine([b[i] for b in basis]) for i in range(len(times))]
        c1, c2, c3 = (self.calibration * c for c in self.constants)
        y = np.array([c1 * p11 + c2 * p12 + c3 * p22 for p11, p12, p22 in per])
        if screen:
            for t, v in zip(times, y[:, 0]):
                _screen(v, t)
        return y.real

    def __call__(self, t):
        return float(self.jet(t)[0])

    def invariant(self, t, q):
        """Y Y'' - Y'^2 / 2 - q Y^2 for q = f' + f^2/2 - 2 w^2."""
        y = self.jet(t, screen=False)
        return y[0] * y[2] - 0.5 * y[1] ** 2 - q * y[0] ** 2

    def q_of(self, t):
        H, m = self.hubble, self.mass
        fam = self.family
        if fam == catalog.DESITTER_L10:
            p = self.hv2 + m * m * math.exp(2 * H * t)
        elif fam == catalog.DESITTER_L11:
            p = self.hv2 * math.exp(-2 * H * t) + self.M ** 2
        elif fam == catalog.RADIATION_L10B:
            p = self.hv2 + m * m * t
        else:
            p = m * m + self.hv2 / t + 3.0 / (16.0 * t * t)
        return -2.0 * p

    def calibrate(self, times):
        self.calibration = 1.0
        inv = np.array([self.invariant(t, self.q_of(t)) for t in times])
        s = float(np.sum(inv) / np.sum(inv * inv)) * 2.0
        if not s > 0:
            raise ScreeningError("calibration needs a positive invariant; constants give a negative Y")
        self.calibration = math.sqrt(s)
        self.reference_times = tuple(times)
        for t in times:
            self.jet(t)
        return self.calibration

    @property
    def calibrated_constants(self):
        return tuple(self.calibration * complex(c) for c in self.constants)


def mode_solution(spec: SpacetimeSpec, hv2: float, constants=None, calibrate=True) -> ModeSolution:
    lo, hi = spec.interval
    refs = tuple(lo + (hi - lo) * r for r in (0.25, 0.5, 0.75)) if calibrate else ()
    return ModeSolution(spec.family, float(hv2), spec.mass, spec.hubble, spec.coupling,
                        constants=constants, reference_times=refs)


def mode_vacuum_L10(params: dict, t: float) -> float:
    """Bessel de Sitter modes; params holds hv2, m, H, xi and optional constants."""
    return _mode_value(catalog.DESITTER_L10, params, t)


def mode_vacuum_L10b(params: dict, t: float) -> float:
    return _mode_value(catalog.RADIATION_L10B, params, t)


def mode_vacuum_L11(params: dict, t: float) -> float:
    return _mode_value(catalog.DESITTER_L11, params, t)


def mode_vacuum_L11b(params: dict, t: float) -> float:
    return _mode_value(catalog.RADIATION_L11B, params, t)


def _mode_value(family, params, t):
    p = dict(params)
    spec = catalog.make_spec(family, mass=p.get("m", 1.0), hubble=p.get("H", 1.0),
                             coupling=p.get("xi", catalog._DEFAULTS[family].get("coupling", 0.0)))
    sol = mode_solution(spec, p["hv2"], p.get("constants"), p.get("calibrate", True))
    return sol(t)


# --- trajectories ----------------------------------------------------------

@dataclass(frozen=True)
class VacuumTrajectory:
    provenance: str
    constants: tuple
    mode_eigenvalue: float
    times: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    dY: np.ndarray
    d2Y: np.ndarray
    d3Y: np.ndarray
    dZ: np.ndarray
    d2Z: np.ndarray
    alpha: Optional[complex] = None
    z_map: Optional[Callable] = field(default=None, compare=False)


# --- vacuum per spec --------------------------------------------------------

class Vacuum:
    """Closed-form vacuum of a spec, evaluated mode by mode in the fixed basis."""

    def __init__(self, spec: SpacetimeSpec, constants=None, calibrate: bool = True):
        self.spec = spec
        self.provenance = spec.anchor
        self.basis = spectral.mode_basis(spec)
        self.lam = self.basis.base_eigenvalues
        self.constants = constants if constants is not None else spec.constants
        self._solutions = {}
        self._calibrate = calibrate
        if spec.family in catalog.MODE_FAMILIES:
            _, _, _, _, gamma, delta = catalog.coefficient_maps(spec, spec.interval[0])
            self.hv2 = gamma * self.lam + delta
            for v in np.unique(np.round(self.hv2, 12)):
                self._solutions[float(v)] = mode_solution(spec, float(v), self.constants, calibrate)
        elif spec.family not in CLOSED_FAMILIES:
            raise UnsupportedFamilyError(spec.family)
        else:
            self.hv2 = None

    def solution_for(self, k: int) -> ModeSolution:
        return self._solutions[float(np.round(self.hv2[k], 12))]

    @property
    def calibrated_constants(self) -> dict:
        return {v: [[c.real, c.imag] for c in s.calibrated_constants] for v, s in self._solutions.items()}

    def y_jets(self, t: float) -> np.ndarray:
        """(4, K) array of [Y, Y', Y'', Y'''] per basis mode."""
        spec = self.spec
        catalog.check_time(spec, t)
        if spec.family in catalog.MODE_FAMILIES:
            cache = {v: s.jet(t) for v, s in self._solutions.items()}
            return np.stack([cache[float(np.round(h, 12))] for h in self.hv2], axis=1)
        if spec.family == catalog.STATIC:
            lamc = self.lam
            lj = np.array([1.0, 0.0, 0.0, 0.0])
        else:
            lj = ratio_jet(spec.scale.jet(t), spec.lapse.jet(t))
            _, _, _, _, gamma, delta = catalog.coefficient_maps(spec, t)
            lamc = (gamma * self.lam + delta) * lj[0] ** 2
        if np.any(lamc <= 0):
            k = int(np.nonzero(lamc <= 0)[0][0])
            raise SingularityError(f"H_V has a non-positive eigenvalue at mode index {k}", index=k)
        return lj[:, None] * (1.0 / np.sqrt(lamc))[None, :]

    def y_jets_grid(self, times) -> np.ndarray:
        """(T, 4, K) jets on a time grid; mode solutions are continued along the grid."""
        times = [float(t) for t in times]
        if self.spec.family not in catalog.MODE_FAMILIES:
            return np.array([self.y_jets(t) for t in times])
        for t in times:
            catalog.check_time(self.spec, t)
        cache = {v: s.jet_grid(times) for v, s in self._solutions.items()}
        return np.stack([cache[float(np.round(h, 12))] for h in self.hv2], axis=2)

    def z_jets(self, t: float) -> np.ndarray:
        """(3, K) array of [Z, Z', Z'']."""
        return z_from_y(self.y_jets(t), catalog.friction_jet(self.spec, t))

    def blocks(self, t: float, orientation: int = -1) -> ComplexStructureBlocks:
        y = self.y_jets(t)
        z = self.z_jets(t)
        return blocks_from_modes(self.spec, t, y[0], -z[0], orientation)

    def trajectory(self, k: int, times) -> VacuumTrajectory:
        times = np.asarray(times, dtype=float)
        yj = np.array([self.y_jets(t)[:, k] for t in times])
        zj = np.array([z_from_y(y, catalog.friction_jet(self.spec, t)) for y, t in zip(yj, times)])
        sol = self.solution_for(k) if self.spec.family in catalog.MODE_FAMILIES else None
        if sol is not None:
            consts = sol.calibrated_constants
            alpha, zmap = sol.alpha, sol.z_of
            eig = sol.hv2
        else:
            consts, alpha, zmap, eig = (), None, None, float(self.lam[k])
        return VacuumTrajectory(self.provenance, consts, eig, times, yj[:, 0], zj[:, 0],
                                yj[:, 1], yj[:, 2], yj[:, 3], zj[:, 1], zj[:, 2], alpha, zmap)


def blocks_from_modes(spec: SpacetimeSpec, t: float, y, a, orientation=-1) -> ComplexStructureBlocks:
    """Blocks whose scalar parts act as Y_k, A_k on basis mode k.

    C and D come from their per-mode values whenever N / sqrt(h) is
    constant in space, which avoids the rounding of B^{-1} A B.
    """
    basis = spectral.mode_basis(spec)
    V, w = basis.vectors, basis.base_weights
    left = V.T * w[None, :]

    def mat(vals):
        return (V * vals[None, :]) @ left

    density = spectral.lapse_sites(spec, t) / spectral.sqrt_h(spec, t)
    mu = spectral.measure(spec, t)
    Yi = mat(1.0 / y)
    C = D = None
    if np.all(density == density[0]):
        C = mat(-a)
        D = mat(-(1.0 + a * a) / (y * density[0]))
    return ComplexStructureBlocks.from_AY(mat(a), mat(y), density, mu, orientation, t, Y_inv=Yi, C=C, D=D)


# --- named constructors ------------------------------------------------------

def static_vacuum(op: spectral.SpectralOperator, dx: float = 1.0, orientation: int = -1) -> ComplexStructureBlocks:
    """A = 0, Y = H_V^{-1/2}; density N / sqrt(h) recovered as dx / mu."""
    Y = spectral.spectral_power(op, -0.5)
    Yi = spectral.spectral_power(op, 0.5)
    density = dx / op.weights
    return ComplexStructureBlocks.from_AY(np.zeros_like(Y), Y, density, op.weights, orientation,
                                          op.time_tag, Y_inv=Yi)


def _family_blocks(spec, t, families, orientation):
    if spec.family not in families:
        raise UnsupportedFamilyError(f"{spec.family} does not match {', '.join(families)}")
    return Vacuum(spec).blocks(t, orientation)


def expanding_vacuum(spec, t, orientation=-1):
    return _family_blocks(spec, t, (catalog.EXPANDING,), orientation)


def frw_conformal_vacuum(spec, t, orientation=-1):
    return _family_blocks(spec, t, (catalog.FRW_CONFORMAL,), orientation)


def frw_massive_vacuum(spec, t, orientation=-1):
    return _family_blocks(spec, t, (catalog.FRW_T6, catalog.FRW_T7, catalog.FRW_T8, catalog.FRW_T9),
                          orientation)


def vacuum_blocks(spec, t, orientation=-1):
    return Vacuum(spec).blocks(t, orientation)


def conformal_similarity(spec: SpacetimeSpec, t: float, rng=None, pairs: int = 50) -> dict:
    """Compare the FRWConformal structure with its Expanding partner through X.

    similarity: ||J - X^{-1} Jbar X||_F / ||J||_F on densities; similarity_Y
    the same for J_Y through S = Tbar X T^{-1}; symplectic: invariance of
    Omega under X on random pairs; adjoint_XT: eps X_T^T eps^T = X_T^{-1}
    for the literal T X T^{-1}.
    """
    from . import jstruct, phase

    if spec.family != catalog.FRW_CONFORMAL:
        raise UnsupportedFamilyError(f"{spec.family} is not the conformally coupled FRW family")
    rng = np.random.default_rng(0) if rng is None else rng
    dx = spec.spatial.dx
    bar = phase.barred_spec(spec)
    b = Vacuum(spec).blocks(t)
    bb = Vacuum(bar).blocks(t)
    sigma = jstruct.select_orientation(b, dx)
    sigma_bar = jstruct.select_orientation(bb, dx)
    b, bb = b.with_orientation(sigma), bb.with_orientation(sigma_bar)
    X = phase.conformal_map(spec, t)
    S = phase.scalar_conformal_map(spec, t)
    prs = phase.random_pairs(rng, spec.spatial.num_points, pairs)
    return {
        "similarity": jstruct.similarity_check(jstruct.assemble_J(b), jstruct.assemble_J(bb), X),
        "similarity_Y": jstruct.similarity_check(jstruct.assemble_JY(b), jstruct.assemble_JY(bb), S),
        "symplectic": phase.symplectic_invariance_residual(X, prs, dx),
        "adjoint_XT": phase.epsilon_adjoint_residual(phase.literal_XT(spec, t)),
        "orientation": sigma,
        "orientation_bar": sigma_bar,
    }
