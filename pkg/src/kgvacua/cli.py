"""Scenario files, suite orchestration and reports.

A scenario is a TOML document with the sections spacetime, lattice, time,
suite, tolerances and vacuum. Only spacetime.family is required; every
other key has a documented default (see DEFAULTS).
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import re
import sys
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import catalog, conservation, evolution, jstruct, phase, vacua
from .errors import ConfigError, KGVacuaError

SCHEMA_VERSION = "1.0"
OUTPUT_ENV = "KGVACUA_OUTPUT_DIR"
SECTIONS = ("scenario", "spacetime", "lattice", "time", "suite", "tolerances", "vacuum")
ALL_CHECKS = ("positivity", "algebra", "conservation", "fd_convergence", "gelfand_dikii_fd",
              "transport", "conformal")

DEFAULTS = {
    "scenario": {"name": "scenario"},
    "lattice": {"n": 64},
    "time": {"samples": 5, "conservation_samples": 9, "step": 1e-3,
             "convergence_steps": [0.08, 0.04, 0.02]},
    "suite": {"checks": list(ALL_CHECKS), "pairs": 50, "seed": 0},
    "tolerances": {"algebra": 1e-10, "conservation": 1e-8, "gelfand_dikii_fd": 1e-6,
                   "transport": 1e-7, "symplectic_evolution": 1e-8, "similarity": 1e-9,
                   "convergence_band": 0.25, "rounding_floor": 1e-10},
    "vacuum": {"calibrate": True},
}
# tolerances not multiplied by --tolerance-scale
_UNSCALED = ("convergence_band",)
NAIVE_MIN = 1e-2


def load_schema(name: str) -> dict:
    return json.loads(resources.files("kgvacua").joinpath("schema", f"{name}.schema.json").read_text())


# --- scenario -----------------------------------------------------------------

@dataclass
class Scenario:
    data: dict
    source: str = "<string>"

    @property
    def name(self) -> str:
        return self.data["scenario"]["name"]

    def section(self, key):
        return self.data.get(key, {})

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.data == other.data

    def spec(self) -> catalog.SpacetimeSpec:
        return _build_spec(self.data)


def _locate(text: str, path) -> tuple:
    """(line, column) of the key at the given section/key path, or of the section header."""
    path = [p for p in path if isinstance(p, str)]
    if not path:
        return None, None
    lines = text.splitlines()
    section, key = path[0], path[1] if len(path) > 1 else None
    current = None
    header = None
    for i, raw in enumerate(lines, 1):
        s = raw.strip()
        m = re.match(r"^\[\s*([A-Za-z0-9_\-\.]+)\s*\]", s)
        if m:
            current = m.group(1)
            if current == section:
                header = (i, raw.index("[") + 1)
            continue
        if current == section and key is not None:
            m = re.match(r"^(\s*)" + re.escape(key) + r"\s*=", raw)
            if m:
                return i, len(m.group(1)) + 1
    return header if header else (None, None)


def _toml_location(err) -> tuple:
    line = getattr(err, "lineno", None)
    col = getattr(err, "colno", None)
    if line is None:
        m = re.search(r"line (\d+), column (\d+)", str(err))
        if m:
            line, col = int(m.group(1)), int(m.group(2))
    return line, col


def _resolve(raw: dict) -> dict:
    data = {}
    for sec in SECTIONS:
        d = copy.deepcopy(DEFAULTS.get(sec, {}))
        d.update(copy.deepcopy(raw.get(sec, {})))
        data[sec] = d
    spec = _build_spec(data)
    lo, hi = spec.interval
    t = data["time"]
    t.setdefault("t_start", lo)
    t.setdefault("t_end", hi)
    a, b = evolution.transport_interval(spec)
    t.setdefault("transport_start", a)
    t.setdefault("transport_end", b)
    data["spacetime"]["family"] = catalog.CONFIG_NAME[spec.family]
    return data


def _profile(d, cls):
    return None if d is None else cls(**d)


def _build_spec(data: dict) -> catalog.SpacetimeSpec:
    st = data["spacetime"]
    lat = data.get("lattice", {})
    family = catalog.canonical_family(st["family"])
    kw = {k: st[k] for k in ("mass", "coupling", "hubble", "curvature_offset", "spatial_dim_weight") if k in st}
    if "lapse" in st:
        kw["lapse"] = _profile(st["lapse"], catalog.TimeProfile)
    if "scale" in st:
        kw["scale"] = _profile(st["scale"], catalog.TimeProfile)
    if "lapse_profile" in st or "metric_profile" in st:
        kw["spatial"] = catalog.SpatialModel(
            lapse_profile=_profile(st.get("lapse_profile"), catalog.SpatialProfile),
            static_metric_profile=_profile(st.get("metric_profile"), catalog.SpatialProfile))
    vac = data.get("vacuum", {})
    if vac.get("constants") is not None:
        kw["constants"] = tuple(complex(re_, im) for re_, im in vac["constants"])
    return catalog.make_spec(family, num_points=lat.get("n", 64), length=lat.get("length"), **kw)


def _validate_times(data: dict, text: str):
    spec = _build_spec(data)
    lo, hi = spec.interval
    t = data["time"]
    for a, b in (("t_start", "t_end"), ("transport_start", "transport_end")):
        for key in (a, b):
            if not lo - 1e-12 <= t[key] <= hi + 1e-12:
                raise ConfigError(f"time.{key} = {t[key]} outside the working interval [{lo}, {hi}]",
                                  *_locate(text, ["time", key]))
        if not t[a] < t[b]:
            raise ConfigError(f"time.{a} must be smaller than time.{b}", *_locate(text, ["time", a]))
    if t["step"] > t["transport_end"] - t["transport_start"]:
        raise ConfigError("time.step exceeds the transport interval", *_locate(text, ["time", "step"]))


def scenario_from_dict(raw: dict, text: str = "", source: str = "<string>") -> Scenario:
    validator = jsonschema.Draft202012Validator(load_schema("scenario"))
    err = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if err is not None:
        where = ".".join(str(p) for p in err.absolute_path) or "document"
        raise ConfigError(f"{where}: {err.message}", *_locate(text, list(err.absolute_path)))
    try:
        data = _resolve(raw)
    except KGVacuaError as e:
        line, col = _locate(text, ["spacetime", "family"]) if "family" in str(e) else _locate(text, ["spacetime"])
        raise ConfigError(str(e), line, col) from None
    _validate_times(data, text)
    return Scenario(data, source)


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse and validate a scenario document; errors carry line and column."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        msg = str(e).split(" (at line")[0]
        raise ConfigError(f"{source}: {msg}", *_toml_location(e)) from None
    return scenario_from_dict(raw, text, source)


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {p}: {e.strerror}") from None
    return parse_scenario(text, str(p))


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k} = {_toml_value(x)}" for k, x in v.items() if x is not None) + "}"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def serialize(scenario: Scenario) -> str:
    out = []
    for sec in SECTIONS:
        d = scenario.data.get(sec, {})
        items = [(k, v) for k, v in d.items() if v is not None]
        if not items:
            continue
        out.append(f"[{sec}]")
        out.extend(f"{k} = {_toml_value(v)}" for k, v in items)
        out.append("")
    return "\n".join(out)


# --- report helpers -------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _clean(obj):
    """JSON friendly copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, complex):
        return [_num(obj.real), _num(obj.imag)]
    return obj


def _check(name, residual, tolerance, passed=None, details=None, anchor=None):
    residual = _num(residual)
    if passed is None:
        passed = residual is not None and residual <= tolerance
    c = {"name": name, "anchor": anchor or catalog.CHECK_ANCHORS[name], "status": "pass" if passed else "fail",
         "passed": bool(passed), "residual": residual, "tolerance": _num(tolerance)}
    if details:
        c["details"] = _clean(details)
    return c


def _skip(name, reason, anchor=None):
    return {"name": name, "anchor": anchor or catalog.CHECK_ANCHORS.get(name, name), "status": "skipped",
            "passed": True, "reason": reason}


def _error(name, exc, anchor=None):
    return {"name": name, "anchor": anchor or catalog.CHECK_ANCHORS.get(name, name), "status": "error",
            "passed": False, "reason": f"{type(exc).__name__}: {exc}"}


def _converged(conv, nominal, band, floor):
    errs = conv["errors"]
    if max(errs) <= floor:
        return True, "rounding floor"
    ok = all(abs(r - nominal) <= band * nominal for r in conv["ratios"])
    return ok, "ratio"


# --- check groups -----------------------------------------------------------------

class _Context:
    def __init__(self, scenario: Scenario, spec, rng, tol, jobs):
        self.scenario = scenario
        self.spec = spec
        self.rng = rng
        self.tol = tol
        self.jobs = jobs
        self.time = scenario.data["time"]
        self.pairs = scenario.data["suite"]["pairs"]
        self._vacuum = None
        self.orientation = None

    @property
    def vacuum(self):
        if self._vacuum is None:
            calibrate = self.scenario.data["vacuum"].get("calibrate", True)
            self._vacuum = vacua.Vacuum(self.spec, calibrate=calibrate)
        return self._vacuum

    def sample_times(self, key="samples"):
        return np.linspace(self.time["t_start"], self.time["t_end"], self.time[key])


def _group_positivity(ctx):
    rep = catalog.check_positivity_condition(ctx.spec)
    return [_check("positivity", rep.margin, rep.eps_min, passed=rep.passed,
                   details={"condition": rep.condition, "margin": rep.margin}, anchor=ctx.spec.anchor)]


def _group_algebra(ctx):
    spec, dx = ctx.spec, ctx.spec.spatial.dx
    rows = []
    for t in ctx.sample_times():
        b = ctx.vacuum.blocks(float(t))
        T = phase.measure_transform(spec, float(t))
        r = jstruct.battery(b, T, dx, ctx.rng, ctx.pairs)
        rows.append((float(t), r))
    sig = sorted({r.orientation for _, r in rows})
    ctx.orientation = sig[0] if len(sig) == 1 else None
    tol = ctx.tol["algebra"]
    sq = max(r.square for _, r in rows)
    sy = max(r.symplectic for _, r in rows)
    ad = max(max(r.adjoint_scalar, r.adjoint_density) for _, r in rows)
    gm = min(r.gram_min for _, r in rows)
    bmin = min(r.signs["B_min_form"] for _, r in rows)
    dmax = max(r.signs["D_max_form"] for _, r in rows)
    per = {f"{t:.6g}": {"square": r.square, "symplectic": r.symplectic, "adjoint_scalar": r.adjoint_scalar,
                        "adjoint_density": r.adjoint_density, "gram_min": r.gram_min,
                        "similarity_T": r.similarity_T} for t, r in rows}
    return [
        _check("J_squared", sq, tol, details={"per_time": {k: v["square"] for k, v in per.items()}}),
        _check("symplectic", sy, tol, details={"pairs": ctx.pairs}),
        _check("adjoint", ad, tol, details={"scalar": max(r.adjoint_scalar for _, r in rows),
                                            "density": max(r.adjoint_density for _, r in rows),
                                            "similarity_T": max(r.similarity_T for _, r in rows)}),
        _check("gram_positive", gm, 0.0, passed=gm > 0, details={"orientation": sig}),
        _check("block_signs", max(-bmin, dmax, 0.0), 0.0, passed=bmin > 0 and dmax < 0,
               details={"B_min_form": bmin, "D_max_form": dmax}),
    ]


def _group_conservation(ctx):
    tr = conservation.BlockTrajectory.from_vacuum(ctx.vacuum, ctx.sample_times("conservation_samples"))
    r = conservation.all_residuals(tr, ctx.spec)
    tol = ctx.tol["conservation"]
    cons = {k: r[k] for k in ("I", "II", "III", "IV")}
    kg = {k: r[k] for k in ("me1", "me2")}
    return [
        _check("conservation_equations", max(cons.values()), tol, details=cons),
        _check("kg_pair", max(kg.values()), tol, details=kg),
        _check("gelfand_dikii", r["gelfand_dikii"], tol),
        _check("third_order", r["third_order"], tol),
    ]


def _centres(ctx):
    lo, hi = ctx.spec.interval
    return [lo + (hi - lo) * r for r in (0.3, 0.5, 0.7)]


# basis indices of the FD checks: the lowest modes with wavenumbers 1, 2 and 4
# on a homogeneous lattice, so the same physical modes are probed at every n
FD_MODES = (1, 3, 7)


def _fd_modes(ctx):
    n = ctx.spec.spatial.num_points
    return sorted({min(k, n - 1) for k in FD_MODES})


def _group_fd_convergence(ctx):
    vac = ctx.vacuum
    modes = _fd_modes(ctx)
    lam = vac.lam[modes]
    b = conservation.mode_coefficients(ctx.spec, lam)
    sampler = lambda g: conservation.BlockTrajectory.from_vacuum(vac, g, modes=modes, derivative_mode="fd4")  # noqa: E731
    steps = ctx.time["convergence_steps"]
    band, floor = ctx.tol["convergence_band"], ctx.tol["rounding_floor"]
    out = {}
    ok_all = True
    worst = 0.0
    for name, fn, stp, nominal in (
            ("conservation", conservation.residuals_conservation, steps, 16.0),
            ("kg_pair", conservation.residuals_kg_pair, steps, 16.0),
            ("third_order", conservation.residual_third_order, [s / 2 for s in steps], 4.0)):
        conv = conservation.fd_convergence(sampler, fn, _centres(ctx), stp, op_builder=b)
        ok, how = _converged(conv, nominal, band, floor)
        ok_all &= ok
        dev = 0.0 if how == "rounding floor" else max(abs(r / nominal - 1) for r in conv["ratios"])
        worst = max(worst, dev)
        out[name] = dict(conv, nominal=nominal, verdict=how)
    return [_check("fd_convergence", worst, band, passed=ok_all, details=out)]


def _group_gd_fd(ctx):
    vac = ctx.vacuum
    modes = _fd_modes(ctx)
    b = conservation.mode_coefficients(ctx.spec, vac.lam[modes])
    worst = 0.0
    for c in _centres(ctx):
        g = c + 1e-4 * np.arange(-3, 4)
        tr = conservation.BlockTrajectory.from_vacuum(vac, g, modes=modes, derivative_mode="fd4")
        worst = max(worst, float(np.nanmax(conservation.residual_gelfand_dikii(tr, op_builder=b))))
    return [_check("gelfand_dikii_fd", worst, ctx.tol["gelfand_dikii_fd"], details={"dt": 1e-4, "modes": modes})]


def _group_transport(ctx):
    spec, t = ctx.spec, ctx.time
    t1, t2, step = t["transport_start"], t["transport_end"], t["step"]
    res = evolution.transport_residual(spec, ctx.vacuum, t1, t2, step, jobs=ctx.jobs)
    neg = evolution.transport_residual(spec, ctx.vacuum, t1, t2, step, frozen=True, jobs=ctx.jobs)
    conv = evolution.step_convergence(
        lambda h: evolution.transport_residual(spec, ctx.vacuum, t1, t2, h, jobs=ctx.jobs).residual,
        t["convergence_steps"])
    ok, how = _converged(conv, 16.0, ctx.tol["convergence_band"], ctx.tol["rounding_floor"])
    dev = 0.0 if how == "rounding floor" else max(abs(r / 16.0 - 1) for r in conv["ratios"])
    sym = evolution.symplectic_preservation(spec, t1, t2, step, ctx.rng, ctx.pairs, ctx.jobs)
    out = [
        _check("transport", res.residual, ctx.tol["transport"],
               details={"t1": t1, "t2": t2, "step": step, "naive": res.naive,
                        "frozen_structure": neg.residual}),
        _check("transport_convergence", dev, ctx.tol["convergence_band"], passed=ok, details=dict(conv, verdict=how)),
        _check("symplectic_evolution", sym, ctx.tol["symplectic_evolution"]),
    ]
    if spec.family in (catalog.STATIC, catalog.EXPANDING):
        out.append(_skip("time_dependence", "the structure is time independent for this family"))
    else:
        out.append(_check("time_dependence", res.naive, NAIVE_MIN, passed=res.naive > NAIVE_MIN,
                          details={"frozen_structure": neg.residual}))
    return out


def _group_conformal(ctx):
    if ctx.spec.family != catalog.FRW_CONFORMAL:
        return [_skip("conformal_similarity", "only defined for the conformally coupled FRW family"),
                _skip("conformal_symplectic", "only defined for the conformally coupled FRW family")]
    rows = [vacua.conformal_similarity(ctx.spec, float(t), ctx.rng, ctx.pairs) for t in ctx.sample_times()]
    sim = max(max(r["similarity"], r["similarity_Y"]) for r in rows)
    sym = max(r["symplectic"] for r in rows)
    adj = max(r["adjoint_XT"] for r in rows)
    return [_check("conformal_similarity", sim, ctx.tol["similarity"],
                   details={"density": max(r["similarity"] for r in rows),
                            "scalar": max(r["similarity_Y"] for r in rows)}),
            _check("conformal_symplectic", sym, ctx.tol["algebra"], details={"adjoint_XT": adj})]


_GROUPS = {
    "positivity": (_group_positivity, ("positivity",)),
    "algebra": (_group_algebra, ("J_squared", "symplectic", "adjoint", "gram_positive", "block_signs")),
    "conservation": (_group_conservation, ("conservation_equations", "kg_pair", "gelfand_dikii", "third_order")),
    "fd_convergence": (_group_fd_convergence, ("fd_convergence",)),
    "gelfand_dikii_fd": (_group_gd_fd, ("gelfand_dikii_fd",)),
    "transport": (_group_transport, ("transport", "transport_convergence", "symplectic_evolution",
                                     "time_dependence")),
    "conformal": (_group_conformal, ("conformal_similarity", "conformal_symplectic")),
}


def run_suite(scenario: Scenario, seed=None, tolerance_scale: float = 1.0, jobs: int = 1,
              timing: bool = False) -> dict:
    """Run the selected check groups in a fixed order; failures are recorded, not raised."""
    t0 = _time.perf_counter()
    data = scenario.data
    seed = data["suite"]["seed"] if seed is None else int(seed)
    tol = {k: (v if k in _UNSCALED else v * tolerance_scale) for k, v in data["tolerances"].items()}
    spec = scenario.spec()
    ctx = _Context(scenario, spec, np.random.default_rng(seed), tol, jobs)
    selected = [g for g in ALL_CHECKS if g in data["suite"]["checks"]]
    checks = []
    clock = {}
    blocked = None
    for g in selected:
        fn, names = _GROUPS[g]
        start = _time.perf_counter()
        if blocked is not None:
            checks.extend(_skip(n, blocked, spec.anchor if n == "positivity" else None) for n in names)
            continue
        try:
            got = fn(ctx)
        except (KGVacuaError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
            got = [_error(n, e, spec.anchor if n == "positivity" else None) for n in names]
        checks.extend(got)
        clock[g] = _time.perf_counter() - start
        if g == "positivity" and not all(c["passed"] for c in got):
            blocked = "positivity condition failed"
    consts = {}
    if ctx._vacuum is not None and spec.family in catalog.MODE_FAMILIES:
        consts = {repr(k): v for k, v in sorted(ctx._vacuum.calibrated_constants.items())}
    report = {
        "scenario": _clean(data),
        "source": scenario.source,
        "family": spec.family,
        "anchor": spec.anchor,
        "seed": seed,
        "jobs": int(jobs),
        "orientation": ctx.orientation,
        "calibrated_constants": _clean(consts),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    if timing:
        clock["total"] = _time.perf_counter() - t0
        report["timing"] = clock
    return report


def merge(reports) -> dict:
    reports = list(reports)
    return {"schema_version": SCHEMA_VERSION, "passed": all(r["passed"] for r in reports), "reports": reports}


def validate_report(doc: dict) -> None:
    jsonschema.validate(doc, load_schema("report"))


# --- output ----------------------------------------------------------------

CHECK_COLUMNS = ("scenario", "family", "check", "anchor", "status", "residual", "tolerance")
MODE_COLUMNS = ("t", "mode_index", "Y", "Z", "residual_I", "residual_II", "residual_III", "residual_IV")


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CHECK_COLUMNS)
    for r in doc["reports"]:
        for c in r["checks"]:
            w.writerow([r["scenario"]["scenario"]["name"], r["family"], c["name"], c["anchor"], c["status"],
                        "" if c.get("residual") is None else repr(c["residual"]),
                        "" if c.get("tolerance") is None else repr(c["tolerance"])])
    return buf.getvalue()


def mode_rows(scenario: Scenario):
    """Rows (t, mode_index, Y, Z, residual_I..IV) over the sample grid and all modes."""
    spec = scenario.spec()
    t = scenario.data["time"]
    times = np.linspace(t["t_start"], t["t_end"], t["samples"])
    vac = vacua.Vacuum(spec, calibrate=scenario.data["vacuum"].get("calibrate", True))
    tr = conservation.BlockTrajectory.from_vacuum(vac, times)
    res = conservation.residuals_conservation(tr, spec)
    rows = []
    for i, tt in enumerate(times):
        for k in range(tr.Y_values.shape[1]):
            rows.append((float(tt), k, float(tr.Y_values[i, k]), float(tr.Z_values[i, k]),
                         *(float(res[e][i, k]) for e in ("I", "II", "III", "IV"))))
    return rows


def modes_csv(scenario: Scenario) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MODE_COLUMNS)
    for row in mode_rows(scenario):
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def emit(doc: dict, fmt: str = "json", path=None, stem: str = "report") -> str:
    """Write doc as JSON or CSV to path, to $KGVACUA_OUTPUT_DIR/<stem>.<fmt>, or return it for stdout."""
    text = to_json(doc) if fmt == "json" else to_csv(doc)
    target = _target(path, stem, fmt)
    if target is not None:
        _write(target, text)
    return text


def _target(path, stem, ext):
    if path:
        return Path(path)
    d = os.environ.get(OUTPUT_ENV)
    return Path(d) / f"{stem}.{ext}" if d else None


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from None


# --- command line ------------------------------------------------------------

def _parse_param(s: str):
    m = re.fullmatch(r"([A-Za-z_][\w\.]*)=([^:]+):([^:]+):(\d+)", s)
    if not m:
        raise ConfigError(f"--param must look like key=a:b:n, got {s!r}")
    key, a, b, n = m.group(1), float(m.group(2)), float(m.group(3)), int(m.group(4))
    if n < 1:
        raise ConfigError("--param needs n >= 1")
    return key, a, b, n


def _sweep_key(key: str):
    if "." in key:
        sec, k = key.split(".", 1)
        return sec, k
    for sec in ("spacetime", "lattice", "time", "tolerances", "vacuum"):
        if key in load_schema("scenario")["properties"][sec]["properties"]:
            return sec, key
    raise ConfigError(f"unknown sweep parameter {key!r}")


def sweep_scenarios(scenario: Scenario, param: str):
    key, a, b, n = _parse_param(param)
    sec, k = _sweep_key(key)
    schema = load_schema("scenario")["properties"]
    if sec not in schema or k not in schema[sec].get("properties", {}):
        raise ConfigError(f"unknown sweep parameter {key!r}")
    integer = schema[sec]["properties"][k].get("type") == "integer"
    out = []
    for v in np.linspace(a, b, n):
        raw = copy.deepcopy(scenario.data)
        val = int(round(v)) if integer else float(v)
        raw[sec][k] = val
        raw["scenario"]["name"] = f"{scenario.name}[{key}={val}]"
        # let interval dependent defaults follow the swept value
        if sec == "spacetime":
            for tk in ("t_start", "t_end", "transport_start", "transport_end"):
                raw["time"].pop(tk, None)
        out.append(scenario_from_dict(raw, "", scenario.source))
    return out


def _run_many(scenarios, args):
    run = lambda s: run_suite(s, seed=args.seed, tolerance_scale=args.tolerance_scale,  # noqa: E731
                              jobs=args.jobs, timing=args.timing)
    if args.jobs > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as ex:
            return list(ex.map(run, scenarios))
    return [run(s) for s in scenarios]


def _finish(doc, args, stem):
    validate_report(doc)
    text = emit(doc, args.format, args.output, stem)
    if _target(args.output, stem, args.format) is None:
        sys.stdout.write(text)
    return 0 if doc["passed"] else 1


def _cmd_verify(args):
    scenarios = [load_scenario(p) for p in args.scenarios]
    doc = merge(_run_many(scenarios, args))
    return _finish(doc, args, Path(args.scenarios[0]).stem if len(args.scenarios) == 1 else "verify")


def _cmd_sweep(args):
    base = load_scenario(args.scenario)
    doc = merge(_run_many(sweep_scenarios(base, args.param), args))
    return _finish(doc, args, f"{Path(args.scenario).stem}_sweep")


def _cmd_modes(args):
    sc = load_scenario(args.scenario)
    text = modes_csv(sc)
    target = _target(args.csv, f"{Path(args.scenario).stem}_modes", "csv")
    if target is None:
        sys.stdout.write(text)
    else:
        _write(target, text)
    return 0


def _cmd_report(args):
    reports = []
    for p in args.merge:
        try:
            doc = json.loads(Path(p).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read report {p}: {e}") from None
        try:
            validate_report(doc)
        except jsonschema.ValidationError as e:
            raise ConfigError(f"{p} is not a valid report: {e.message}") from None
        reports.extend(doc["reports"])
    return _finish(merge(reports), args, "merged")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply every tolerance")
    common.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None,
                        help=f"output file (default: ${OUTPUT_ENV}/<name>.<format>, else stdout)")
    common.add_argument("--timing", action="store_true", help="include wall clock times (not deterministic)")
    p = argparse.ArgumentParser(prog="kgvacua", description="Verify conserved complex structures on lattice spacetimes.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the check suite on scenario files")
    v.add_argument("scenarios", nargs="+")
    v.set_defaults(func=_cmd_verify)
    s = sub.add_parser("sweep", parents=[common], help="run one scenario over a parameter range")
    s.add_argument("scenario")
    s.add_argument("--param", required=True, help="key=a:b:n, e.g. mass=0.5:2:4 or spacetime.hubble=1:2:3")
    s.set_defaults(func=_cmd_sweep)
    m = sub.add_parser("modes", help="write per-mode trajectories as CSV")
    m.add_argument("scenario")
    m.add_argument("--csv", default=None, help="output path (default: $%s or stdout)" % OUTPUT_ENV)
    m.set_defaults(func=_cmd_modes)
    r = sub.add_parser("report", parents=[common], help="merge JSON reports")
    r.add_argument("--merge", nargs="+", required=True)
    r.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"kgvacua: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"kgvacua: {e}", file=sys.stderr)
        return 2
