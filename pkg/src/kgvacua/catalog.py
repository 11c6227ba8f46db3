"""Spacetime families and their scalar coefficient functions.

Every family is a metric -N(t)^2 dt^2 + a(t)^2 hbar on a periodic 1D lattice,
with density weight sqrt(h) = a^d sqrt(hbar). The coefficient functions
here (friction f, time dependent mass M^2, curvature term) feed the
spatial operator w^2 and the mode equation phi'' + f phi' + w^2 phi = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedFamilyError

STATIC = "Static"
EXPANDING = "Expanding"
FRW_CONFORMAL = "FRWConformal"
FRW_T6 = "FRWMassiveT6"
FRW_T7 = "FRWMassiveT7"
FRW_T8 = "FRWMassiveT8"
FRW_T9 = "FRWMassiveT9"
DESITTER_L10 = "DeSitterModesL10"
RADIATION_L10B = "RadiationModesL10b"
DESITTER_L11 = "DeSitterCosmicL11"
RADIATION_L11B = "RadiationCosmicL11b"

FAMILIES = (STATIC, EXPANDING, FRW_CONFORMAL, FRW_T6, FRW_T7, FRW_T8, FRW_T9,
            DESITTER_L10, RADIATION_L10B, DESITTER_L11, RADIATION_L11B)

# config names
ALIASES = {
    "static": STATIC,
    "expanding": EXPANDING,
    "frw_conformal": FRW_CONFORMAL,
    "frw_t4": FRW_CONFORMAL,
    "frw_t6": FRW_T6,
    "frw_t7": FRW_T7,
    "frw_t8": FRW_T8,
    "frw_t9": FRW_T9,
    "desitter_l10": DESITTER_L10,
    "radiation_l10b": RADIATION_L10B,
    "desitter_l11": DESITTER_L11,
    "radiation_l11b": RADIATION_L11B,
}
CONFIG_NAME = {}
for _k, _v in ALIASES.items():
    CONFIG_NAME.setdefault(_v, _k)

# anchor tags naming the result each family realises
ANCHORS = {
    STATIC: "Theorem t0",
    EXPANDING: "Theorem t1",
    FRW_CONFORMAL: "Theorem t4",
    FRW_T6: "Theorem t6",
    FRW_T7: "Theorem t7",
    FRW_T8: "Theorem t8",
    FRW_T9: "Theorem t9",
    DESITTER_L10: "Lemma 10",
    RADIATION_L10B: "Lemma 10b",
    DESITTER_L11: "Lemma 11",
    RADIATION_L11B: "Lemma 11b",
}

# anchor tags of the identities behind each report check
CHECK_ANCHORS = {
    "J_squared": "Eq. eq:jabcd",
    "symplectic": "Eq. eq:symplectic",
    "adjoint": "Eq. adcs",
    "gram_positive": "Eq. cip",
    "block_signs": "Eq. sop",
    "conservation_equations": "Prop. 2",
    "kg_pair": "Eq. me1/me2",
    "gelfand_dikii": "Eq. eq:diffeq",
    "third_order": "Eq. ddiffeq",
    "fd_convergence": "Prop. 2",
    "gelfand_dikii_fd": "Eq. eq:diffeq",
    "transport": "Eq. con",
    "transport_convergence": "Eq. con",
    "time_dependence": "Eq. con",
    "symplectic_evolution": "Eq. tev",
    "conformal_similarity": "Lemma tcts",
    "conformal_symplectic": "Lemma tctsb",
}

SQRT_FAMILIES = (RADIATION_L10B, RADIATION_L11B)
MODE_FAMILIES = (DESITTER_L10, RADIATION_L10B, DESITTER_L11, RADIATION_L11B)
HOMOGENEOUS = FAMILIES[1:]


def canonical_family(name: str) -> str:
    if name in FAMILIES:
        return name
    key = name.strip().lower()
    if key in ALIASES:
        return ALIASES[key]
    raise UnsupportedFamilyError(f"unknown family {name!r}")


# --- time profiles ---------------------------------------------------------

_FD_STEP = 1e-3


@dataclass(frozen=True)
class TimeProfile:
    """Positive function of time with analytic derivatives up to third order.

    kind is one of const (value c), exp (c e^{rate t}), sqrt (c t^{1/2}),
    sinusoid (c + amp sin(rate t)), cosh (c cosh(rate t)) or callable
    (derivatives by 4th order central differences).
    """
    kind: str = "const"
    c: float = 1.0
    rate: float = 1.0
    amp: float = 0.0
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def jet(self, t: float) -> np.ndarray:
        c, r = self.c, self.rate
        k = self.kind
        if k == "const":
            return np.array([c, 0.0, 0.0, 0.0])
        if k == "exp":
            e = c * math.exp(r * t)
            return np.array([e, r * e, r * r * e, r ** 3 * e])
        if k == "sqrt":
            if t <= 0:
                raise DomainError("t^(1/2) profile requires t > 0")
            s = math.sqrt(t)
            return c * np.array([s, 0.5 / s, -0.25 / (s * t), 0.375 / (s * t * t)])
        if k == "sinusoid":
            sn, cs = math.sin(r * t), math.cos(r * t)
            a = self.amp
            return np.array([c + a * sn, a * r * cs, -a * r * r * sn, -a * r ** 3 * cs])
        if k == "cosh":
            ch, sh = math.cosh(r * t), math.sinh(r * t)
            return c * np.array([ch, r * sh, r * r * ch, r ** 3 * sh])
        if k == "callable":
            return _fd_jet(self.func, t)
        raise ConfigError(f"unknown time profile kind {k!r}")

    def __call__(self, t: float) -> float:
        return float(self.jet(t)[0])


def _fd_jet(fn, t, h=_FD_STEP):
    v = [fn(t + j * h) for j in (-3, -2, -1, 0, 1, 2, 3)]
    d1 = (v[1] - 8 * v[2] + 8 * v[4] - v[5]) / (12 * h)
    d2 = (-v[1] + 16 * v[2] - 30 * v[3] + 16 * v[4] - v[5]) / (12 * h * h)
    d3 = (v[0] - 8 * v[1] + 13 * v[2] - 13 * v[4] + 8 * v[5] - v[6]) / (8 * h ** 3)
    return np.array([v[3], d1, d2, d3])


def exp_profile(rate: float = 1.0, c: float = 1.0) -> TimeProfile:
    return TimeProfile("exp", c=c, rate=rate)


def const_profile(c: float = 1.0) -> TimeProfile:
    return TimeProfile("const", c=c)


def sqrt_profile(c: float = 1.0) -> TimeProfile:
    return TimeProfile("sqrt", c=c)


def sinusoid_profile(c: float = 2.0, amp: float = 1.0, rate: float = 1.0) -> TimeProfile:
    return TimeProfile("sinusoid", c=c, amp=amp, rate=rate)


def cosh_profile(rate: float = 1.0, c: float = 1.0) -> TimeProfile:
    return TimeProfile("cosh", c=c, rate=rate)


# --- spatial model ---------------------------------------------------------

@dataclass(frozen=True)
class SpatialProfile:
    """c0 + c1 cos(2 pi harmonic x / L), or an arbitrary callable of (x, L)."""
    c0: float = 1.0
    c1: float = 0.0
    harmonic: int = 1
    func: Optional[Callable[[np.ndarray, float], np.ndarray]] = field(default=None, compare=False)

    def __call__(self, x, length):
        x = np.asarray(x, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(x, length), dtype=float) * np.ones_like(x)
        return self.c0 + self.c1 * np.cos(2 * math.pi * self.harmonic * x / length)


@dataclass(frozen=True)
class SpatialModel:
    num_points: int = 64
    length: float = 64.0
    curvature_offset: float = 0.0
    lapse_profile: Optional[SpatialProfile] = None
    static_metric_profile: Optional[SpatialProfile] = None

    def __post_init__(self):
        if int(self.num_points) != self.num_points or self.num_points < 2:
            raise ConfigError(f"num_points must be an integer >= 2, got {self.num_points}")
        if not self.length > 0:
            raise ConfigError(f"length must be positive, got {self.length}")
        for name in ("lapse_profile", "static_metric_profile"):
            prof = getattr(self, name)
            if prof is not None:
                vals = np.concatenate([prof(self.sites, self.length), prof(self.sites + 0.5 * self.dx, self.length)])
                if np.any(vals <= 0):
                    raise ConfigError(f"{name} must be strictly positive")

    @property
    def dx(self) -> float:
        return self.length / self.num_points

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.num_points) * self.dx


# --- spacetime spec --------------------------------------------------------

@dataclass(frozen=True)
class SpacetimeSpec:
    family: str
    lapse: TimeProfile = field(default_factory=const_profile)
    scale: TimeProfile = field(default_factory=const_profile)
    mass: float = 0.0
    coupling: float = 0.0
    hubble: float = 1.0
    spatial: SpatialModel = field(default_factory=SpatialModel)
    spatial_dim_weight: int = 3
    constants: Optional[tuple] = None

    @property
    def interval(self) -> tuple:
        return (0.1, 10.0) if self.family in SQRT_FAMILIES else (-2.0, 2.0)

    @property
    def anchor(self) -> str:
        return ANCHORS[self.family]

    @property
    def homogeneous(self) -> bool:
        return self.family != STATIC

    def with_(self, **kw) -> "SpacetimeSpec":
        return make_spec(self.family, **{**self._fields(), **kw})

    def _fields(self):
        return dict(lapse=self.lapse, scale=self.scale, mass=self.mass, coupling=self.coupling,
                    hubble=self.hubble, spatial=self.spatial,
                    spatial_dim_weight=self.spatial_dim_weight, constants=self.constants)


_DEFAULTS = {
    STATIC: dict(mass=1.0),
    EXPANDING: dict(mass=1.0, lapse=sinusoid_profile(2.0, 1.0, 1.0)),
    FRW_CONFORMAL: dict(curvature_offset=0.5),
    FRW_T6: dict(mass=1.0),
    FRW_T7: dict(mass=1.0, coupling=0.0, scale=cosh_profile(0.5)),
    FRW_T8: dict(mass=1.0, coupling=1.0 / 6.0),
    FRW_T9: dict(coupling=0.0, curvature_offset=0.5),
    DESITTER_L10: dict(mass=1.0, coupling=1.0 / 6.0, curvature_offset=0.5),
    RADIATION_L10B: dict(mass=1.0, curvature_offset=0.5),
    DESITTER_L11: dict(mass=1.0, coupling=1.0 / 6.0),
    RADIATION_L11B: dict(mass=1.0, coupling=0.0),
}


def make_spec(family: str, **kw) -> SpacetimeSpec:
    """Build a spec, applying family defaults and the constraints each family imposes."""
    family = canonical_family(family)
    d = dict(_DEFAULTS[family])
    offset = kw.pop("curvature_offset", d.pop("curvature_offset", None))
    n = kw.pop("num_points", None)
    length = kw.pop("length", None)
    d.update({k: v for k, v in kw.items() if v is not None})
    spatial = d.get("spatial", SpatialModel())
    upd = {}
    if offset is not None:
        upd["curvature_offset"] = float(offset)
    if n is not None:
        upd["num_points"] = int(n)
        if length is None:
            upd["length"] = float(n) * spatial.dx
    if length is not None:
        upd["length"] = float(length)
    if upd:
        spatial = replace(spatial, **upd)
    d["spatial"] = spatial
    H = float(d.get("hubble", 1.0))
    xi = float(d.get("coupling", 0.0))
    if family == STATIC:
        d["lapse"] = const_profile()
        d["scale"] = const_profile()
    elif family != STATIC and (spatial.lapse_profile is not None or spatial.static_metric_profile is not None):
        raise ConfigError("spatial lapse/metric profiles are only supported by the Static family")
    if family == EXPANDING:
        d["scale"] = const_profile()
    if family == FRW_CONFORMAL:
        if d.get("mass", 0.0) != 0.0:
            raise ConfigError("FRWConformal is massless")
        d["coupling"] = 1.0 / 6.0
        d.setdefault("scale", exp_profile(H))
        d.setdefault("lapse", d["scale"])
    elif family == FRW_T6:
        d["coupling"] = 1.0 / 6.0
        d.setdefault("scale", exp_profile(H))
    elif family == FRW_T7:
        d["lapse"] = d["scale"]
    elif family in (FRW_T8, DESITTER_L10):
        d["scale"] = exp_profile(H)
        d["lapse"] = d["scale"]
    elif family == FRW_T9:
        if xi > 1.0 / 6.0:
            raise ConfigError("the forced mass 2(1-6 xi)H^2 is negative for xi > 1/6")
        d["scale"] = exp_profile(H)
        d["lapse"] = const_profile()
        d["mass"] = math.sqrt(2.0 * (1.0 - 6.0 * xi) * H * H)
    elif family == RADIATION_L10B:
        d["coupling"] = 1.0 / 6.0
        d["scale"] = sqrt_profile()
        d["lapse"] = d["scale"]
    elif family == DESITTER_L11:
        d["scale"] = exp_profile(H)
        d["lapse"] = const_profile()
    elif family == RADIATION_L11B:
        d["scale"] = sqrt_profile()
        d["lapse"] = const_profile()
    if d.get("mass", 0.0) < 0:
        raise ConfigError("mass must be nonnegative")
    if family in (RADIATION_L10B, RADIATION_L11B, DESITTER_L10) and not d.get("mass", 0.0) > 0:
        raise ConfigError(f"{family} requires m > 0")
    if d.get("spatial_dim_weight", 3) < 1:
        raise ConfigError("spatial_dim_weight must be a positive integer")
    return SpacetimeSpec(family=family, **d)


def check_time(spec: SpacetimeSpec, t: float) -> None:
    lo, hi = spec.interval
    if not (lo - 1e-12 <= t <= hi + 1e-12):
        raise DomainError(f"t = {t} outside the working interval [{lo}, {hi}] of {spec.family}")


def _jets(spec, t):
    check_time(spec, t)
    N = spec.lapse.jet(t)
    a = spec.scale.jet(t)
    if N[0] <= 0 or a[0] <= 0:
        raise DomainError(f"lapse and scale factor must be positive (t = {t})")
    return N, a


def _log_derivative_jet(p):
    """Derivatives 0..2 of p'/p from the jet of p."""
    g0 = p[1] / p[0]
    g1 = p[2] / p[0] - g0 ** 2
    g2 = p[3] / p[0] - 3 * g0 * p[2] / p[0] + 2 * g0 ** 3
    return np.array([g0, g1, g2])


def friction_jet(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """[f, f', f''] with f = -N'/N + d a'/a."""
    if spec.family == STATIC:
        check_time(spec, t)
        return np.zeros(3)
    N, a = _jets(spec, t)
    return -_log_derivative_jet(N) + spec.spatial_dim_weight * _log_derivative_jet(a)


def friction(spec: SpacetimeSpec, t: float) -> float:
    return float(friction_jet(spec, t)[0])


def mass_term_jet(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """[M^2, (M^2)'] for the family's (possibly time dependent) mass term."""
    m2 = spec.mass ** 2
    fam = spec.family
    if fam not in (FRW_T6, FRW_T7, FRW_T8):
        check_time(spec, t)
        return np.array([m2, 0.0])
    N, a = _jets(spec, t)
    out = np.array([m2 / a[0] ** 2, -2 * m2 * a[1] / a[0] ** 3])
    if fam == FRW_T7:
        k = 1.0 - 6.0 * spec.coupling
        out += k * np.array([a[2] / a[0] ** 3, a[3] / a[0] ** 3 - 3 * a[2] * a[1] / a[0] ** 4])
    return out


def mass_term(spec: SpacetimeSpec, t: float) -> float:
    return float(mass_term_jet(spec, t)[0])


def curvature_scalar_term_jet(spec: SpacetimeSpec, t: float) -> np.ndarray:
    """[C, C'] with C = (a'/a)^2 - a'N'/(aN) + a''/a, the time dependent part of N^2 R / 6."""
    if spec.family == STATIC:
        check_time(spec, t)
        return np.zeros(2)
    N, a = _jets(spec, t)
    la = _log_derivative_jet(a)
    ln = _log_derivative_jet(N)
    # a''/a = (a'/a)' + (a'/a)^2
    app = la[1] + la[0] ** 2
    dapp = la[2] + 2 * la[0] * la[1]
    c = la[0] ** 2 - la[0] * ln[0] + app
    dc = 2 * la[0] * la[1] - la[1] * ln[0] - la[0] * ln[1] + dapp
    return np.array([c, dc])


def curvature_scalar_term(spec: SpacetimeSpec, t: float) -> float:
    return float(curvature_scalar_term_jet(spec, t)[0])


def coefficient_maps(spec: SpacetimeSpec, t: float):
    """Affine maps from a lattice eigenvalue lam to the operators at time t.

    Returns (alpha, beta, d_alpha, d_beta, gamma, delta) such that the
    mode frequency is w^2 = alpha*lam + beta, its time derivative is
    d_alpha*lam + d_beta, and the positive operator of the family's closed
    form is H_V = gamma*lam + delta. For the Static family lam is already an
    eigenvalue of the full operator, so alpha = gamma = 1.
    """
    if spec.family == STATIC:
        check_time(spec, t)
        return 1.0, 0.0, 0.0, 0.0, 1.0, 0.0
    N, a = _jets(spec, t)
    xi = spec.coupling
    off = spec.spatial.curvature_offset
    H = spec.hubble
    fam = spec.family
    r = (N[0] / a[0]) ** 2
    dr = 2 * r * (N[1] / N[0] - a[1] / a[0])
    m2, dm2 = mass_term_jet(spec, t)
    c, dc = curvature_scalar_term_jet(spec, t)
    n2, dn2 = N[0] ** 2, 2 * N[0] * N[1]
    alpha, d_alpha = r, dr
    beta = r * off + n2 * m2 + 6 * xi * c
    d_beta = dr * off + dn2 * m2 + n2 * dm2 + 6 * xi * dc
    if fam == EXPANDING:
        gamma, delta = n2, n2 * (off + spec.mass ** 2)
    elif fam == FRW_CONFORMAL:
        gamma, delta = r, r * off
    elif fam == FRW_T6:
        gamma, delta = r, r * (off + spec.mass ** 2)
    elif fam == FRW_T7:
        gamma, delta = 1.0, off + spec.mass ** 2
    elif fam == FRW_T8:
        gamma, delta = 1.0, off + spec.mass ** 2 + (6 * xi - 1) * H * H
    elif fam == FRW_T9:
        gamma, delta = 1.0 / a[0] ** 2, off / a[0] ** 2
    elif fam == DESITTER_L10:
        gamma, delta = 1.0, off + (6 * xi - 1) * H * H
    else:  # L10b, L11, L11b: H_V^2 = -Delta + xi Rbar
        gamma, delta = 1.0, off
    return alpha, beta, d_alpha, d_beta, gamma, delta


@dataclass(frozen=True)
class PositivityReport:
    passed: bool
    margin: float
    condition: str
    eps_min: float

    def as_dict(self):
        return {"passed": self.passed, "margin": self.margin, "condition": self.condition,
                "eps_min": self.eps_min}


def check_positivity_condition(spec: SpacetimeSpec, eps_min: float = 1e-9) -> PositivityReport:
    """Evaluate the family's strict positivity inequality on the discrete spectrum."""
    from .spectral import lattice_eigenvalues, static_operator_matrix

    fam = spec.family
    off = spec.spatial.curvature_offset
    m2 = spec.mass ** 2
    H = spec.hubble
    xi = spec.coupling
    if fam == STATIC:
        mat, mu = static_operator_matrix(spec)
        s = np.sqrt(mu)
        lam_min = float(np.linalg.eigvalsh((s[:, None] * mat) / s[None, :])[0])
        margin, cond = lam_min, "min spec(-Delta + N^2 (m^2 + xi Rbar)) > eps"
    else:
        k2min = float(lattice_eigenvalues(spec.spatial).min())
        if fam in (EXPANDING, FRW_T6, FRW_T7):
            margin, cond = k2min + off + m2, "xi Rbar > -m^2 + eps"
        elif fam in (FRW_CONFORMAL, FRW_T9):
            margin, cond = k2min + off, "xi Rbar > eps"
        elif fam == FRW_T8:
            margin, cond = k2min + off + m2 + (6 * xi - 1) * H * H, "spec(H_V) > eps"
        elif fam == DESITTER_L10:
            margin, cond = k2min + off + (6 * xi - 1) * H * H, "xi Rbar > -(6 xi - 1) H^2 + eps"
        elif fam == DESITTER_L11:
            margin, cond = m2 + 2 * (6 * xi - 9.0 / 8.0) * H * H, "m^2 > -2(6 xi - 9/8) H^2 + eps"
        elif fam == RADIATION_L10B:
            # no stated inequality; require H_V^2 >= 0 and a positive mode frequency
            base = k2min + off
            margin = base + m2 * spec.interval[0] if base >= 0 else base
            cond = "H_V^2 >= 0 and H_V^2 + m^2 t > eps"
        else:
            base = k2min + off
            t_hi = spec.interval[1]
            margin = m2 + base / t_hi + 3.0 / (16 * t_hi * t_hi) if base >= 0 else base
            cond = "H_V^2 >= 0 and m^2 + H_V^2/t + 3/(16 t^2) > eps"
    return PositivityReport(bool(margin > eps_min), float(margin), cond, eps_min)
