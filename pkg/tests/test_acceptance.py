"""Acceptance criteria 1-8; each test records one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, FAMILY_NAMES
from kgvacua import catalog, cli, conservation, jstruct, phase, spectral, specfun, vacua
from kgvacua.catalog import SpatialModel

FRW = [f for f in FAMILY_NAMES if f not in ("static", "expanding")]


def verdict(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


def scenario(family, n=64, length=None):
    text = f'[scenario]\nname = "{family}"\n[spacetime]\nfamily = "{family}"\n[lattice]\nn = {n}\n'
    if length is not None:
        text += f"length = {length}\n"
    return cli.parse_scenario(text)


def checks(report):
    return {c["name"]: c for c in report["checks"]}


@pytest.fixture(scope="module")
def reports():
    return {f: checks(cli.run_suite(scenario(f))) for f in FAMILY_NAMES}


def test_1_algebraic_battery():
    start = time.perf_counter()
    worst = {"square": 0.0, "symplectic": 0.0, "adjoint": 0.0}
    gram = math.inf
    orientations = set()
    for f in FAMILY_NAMES:
        spec = catalog.make_spec(f, num_points=64)
        vac = vacua.Vacuum(spec)
        rng = np.random.default_rng(0)
        for t in np.linspace(*spec.interval, 5):
            r = jstruct.battery(vac.blocks(t), phase.measure_transform(spec, t), spec.spatial.dx, rng, 50)
            worst["square"] = max(worst["square"], r.square)
            worst["symplectic"] = max(worst["symplectic"], r.symplectic)
            worst["adjoint"] = max(worst["adjoint"], r.adjoint_scalar, r.adjoint_density)
            gram = min(gram, r.gram_min)
            orientations.add(r.orientation)
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-10 and gram > 0 and elapsed <= 60
    verdict(1, "algebraic battery", ok,
            f"J^2 {worst['square']:.1e}, symplectic {worst['symplectic']:.1e}, adjoint {worst['adjoint']:.1e}, "
            f"gram_min {gram:.2e}, sigma {sorted(orientations)}, {elapsed:.1f} s")


def test_2_conservation_equations(reports):
    worst = 0.0
    band = 0.0
    ok = True
    for f, c in reports.items():
        for name in ("conservation_equations", "kg_pair"):
            worst = max(worst, c[name]["residual"])
            ok &= c[name]["residual"] <= 1e-8
        fd = c["fd_convergence"]["details"]
        for group in ("conservation", "kg_pair"):
            d = fd[group]
            if d["verdict"] == "ratio":
                dev = max(abs(r / 16.0 - 1) for r in d["ratios"])
                band = max(band, dev)
                ok &= dev <= 0.25
            else:
                ok &= max(d["errors"]) <= 1e-10
    verdict(2, "conservation equations", ok, f"analytic {worst:.1e}, FD ratio deviation {band:.1%}")


def test_3_transport(reports):
    worst = 0.0
    band = 0.0
    ok = True
    naive = math.inf
    for f, c in reports.items():
        tr = c["transport"]
        worst = max(worst, tr["residual"])
        ok &= tr["residual"] <= 1e-7 and tr["details"]["step"] == 1e-3
        conv = c["transport_convergence"]["details"]
        if conv["verdict"] == "ratio":
            dev = max(abs(r / 16.0 - 1) for r in conv["ratios"])
            band = max(band, dev)
            ok &= dev <= 0.25
        else:
            ok &= max(conv["errors"]) <= 1e-10
        if f in FRW:
            naive = min(naive, tr["details"]["naive"])
            ok &= tr["details"]["naive"] > 1e-2
    verdict(3, "conserved structure transport", ok,
            f"residual {worst:.1e}, step ratio deviation {band:.1%}, smallest FRW naive {naive:.2e}")


C2 = np.array([2, -27, 270, -490, 270, -27, 2]) / 180.0
C1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0


def ode_residual(f, q, z, p=None, h=5e-3):
    v = np.array([f(z + k * h) for k in range(-3, 4)])
    d2 = C2 @ v / h ** 2
    d1 = C1 @ v / h
    r = d2 + q(z) * v[3] + (0 if p is None else p(z) * d1)
    return abs(r) / max(1.0, abs(d2), abs(q(z) * v[3]))


def special_function_ode_worst():
    worst = 0.0
    for nu in (0, 1, -2.3, 3.1, 0.7j, 1.5j):
        for z in np.linspace(0.5, 25, 50):
            worst = max(worst, ode_residual(lambda x: specfun.bessel_j(nu, x), lambda x: 1 - nu * nu / x / x, z,
                                            lambda x: 1 / x))
    for i in (0, 1):
        for z in np.linspace(-10, 5, 50):
            worst = max(worst, ode_residual(lambda x: specfun.airy(x)[i], lambda x: -x, z))
    for kappa in (-1, 0, 0.5, 0.3j, -0.5j):
        for mu in (0.3, 0.5j, 1.0, 0.25):
            q = lambda x: -0.25 + kappa / x + (0.25 - mu * mu) / x / x  # noqa: E731
            for i in (0, 1):
                for z in np.linspace(0.5, 20, 50):
                    worst = max(worst, ode_residual(lambda x: specfun.whittaker(kappa, mu, x)[i], q, z))
    for z in np.linspace(-4.7, 6.3, 50):
        for y in (0.0, 0.8, -2.5):
            g = specfun.gamma_complex(complex(z, y))
            worst = max(worst, abs(specfun.gamma_complex(complex(z + 1, y)) - complex(z, y) * g) / max(1.0, abs(g)))
    return worst


def test_4_special_functions():
    errs = {
        "J0(1)": abs(specfun.bessel_j(0, 1.0) - 0.7651976865579666),
        "Ai(0)": abs(specfun.airy(0.0)[0] - 3.0 ** (-2 / 3) / math.gamma(2 / 3)),
        "Bi(0)": abs(specfun.airy(0.0)[1] - 3.0 ** (-1 / 6) / math.gamma(2 / 3)),
        "|G(1+i)|^2": abs(abs(specfun.gamma_complex(1 + 1j)) ** 2 - math.pi / math.sinh(math.pi)),
    }
    red = 0.0
    for z in np.linspace(0.2, 12, 25):
        m, w = specfun.whittaker(0, 0.5, z)
        red = max(red, abs(m - 2 * math.sinh(z / 2)) / max(1.0, abs(m)), abs(w - math.exp(-z / 2)))
    ode = special_function_ode_worst()
    ok = (max(errs["J0(1)"], errs["Ai(0)"], errs["Bi(0)"]) <= 1e-12 and errs["|G(1+i)|^2"] <= 1e-10
          and red <= 1e-10 and ode <= 1e-8)
    verdict(4, "special functions", ok,
            ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + f", reductions {red:.1e}, ODE {ode:.1e}")


def test_5_mode_solutions(reports):
    ok = True
    gd = 0.0
    band = 0.0
    for f in ("desitter_l10", "radiation_l10b", "desitter_l11", "radiation_l11b"):
        c = reports[f]
        d = c["fd_convergence"]["details"]["third_order"]
        if d["verdict"] == "ratio":
            dev = max(abs(r / 4.0 - 1) for r in d["ratios"])
            band = max(band, dev)
            ok &= dev <= 0.25
        else:
            ok &= max(d["errors"]) <= 1e-10
        gd = max(gd, c["gelfand_dikii_fd"]["residual"])
        ok &= c["gelfand_dikii_fd"]["residual"] <= 1e-6 and c["gelfand_dikii_fd"]["details"]["dt"] == 1e-4
    verdict(5, "mode solutions", ok, f"third order ratio deviation {band:.1%}, Gelfand-Dikii {gd:.1e}")


def y_gap(a, b, times):
    va, vb = vacua.Vacuum(a), vacua.Vacuum(b)
    return max(float(np.max(np.abs(va.y_jets(t)[:2] - vb.y_jets(t)[:2]))) for t in times)


def test_6_reduction_chain():
    times = [-1.0, 0.0, 0.7]
    l10 = y_gap(catalog.make_spec("desitter_l10", num_points=16, mass=1e-6, curvature_offset=0.5),
                catalog.make_spec("frw_t8", num_points=16, mass=1e-6, coupling=1 / 6, curvature_offset=0.5), times)
    t4 = catalog.make_spec("frw_conformal", num_points=16, scale=catalog.const_profile(),
                           lapse=catalog.exp_profile(0.5))
    t4_t1 = y_gap(t4, catalog.make_spec("expanding", num_points=16, mass=0.0, lapse=catalog.exp_profile(0.5),
                                        curvature_offset=t4.spatial.curvature_offset), times)
    t6_t4 = y_gap(catalog.make_spec("frw_t6", num_points=16, mass=0.0, lapse=catalog.exp_profile(1.0),
                                    curvature_offset=0.5),
                  catalog.make_spec("frw_conformal", num_points=16, curvature_offset=0.5), times)
    static = vacua.Vacuum(catalog.make_spec("static", num_points=16))
    w = np.sqrt(static.lam)
    y = static.y_jets(0.0)[0]
    sg = max(abs(vacua.static_general_family(wk, 0.0, t) - yk) for wk, yk in zip(w, y) for t in times)
    ok = l10 <= 1e-8 and t4_t1 == 0 and t6_t4 == 0 and sg == 0
    verdict(6, "reduction chain", ok, f"L10->t8 {l10:.1e}, t4->t1 {t4_t1:.1e}, t6->t4 {t6_t4:.1e}, "
                                      f"static_general->static {sg:.1e}")


def test_7_conformal_similarity():
    spec = catalog.make_spec("frw_conformal", num_points=64)
    rng = np.random.default_rng(0)
    sim = sym = 0.0
    for t in np.linspace(*spec.interval, 5):
        r = vacua.conformal_similarity(spec, t, rng, 50)
        sim = max(sim, r["similarity"], r["similarity_Y"])
        sym = max(sym, r["symplectic"])
    verdict(7, "conformal similarity", sim <= 1e-9 and sym <= 1e-10, f"similarity {sim:.1e}, symplectic {sym:.1e}")


def stable_values(report):
    """Residuals that measure truncation on fixed physical modes, plus low mode Y values."""
    c = checks(report)
    out = {}
    for group, d in c["fd_convergence"]["details"].items():
        for i, e in enumerate(d["errors"]):
            out[f"fd:{group}:{i}"] = e
    return out


def test_8_discretisation():
    length = 2 * np.pi
    errs = []
    for n in (16, 32, 64, 128):
        lam = spectral.lattice_eigenvalues(SpatialModel(num_points=n, length=length))
        errs.append(max(abs(lam[k] - spectral.continuum_eigenvalue(k, length)) for k in (1, 2, 3)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    order_ok = bool(np.all(np.abs(ratios / 4.0 - 1) <= 0.25))

    drift = 0.0
    status_ok = True
    for f in FAMILY_NAMES:
        r64 = cli.run_suite(scenario(f, 64, 64.0))
        r128 = cli.run_suite(scenario(f, 128, 64.0))
        s64 = {c["name"]: c["status"] for c in r64["checks"]}
        s128 = {c["name"]: c["status"] for c in r128["checks"]}
        status_ok &= s64 == s128
        a, b = stable_values(r64), stable_values(r128)
        for k in a:
            if max(a[k], b[k]) > 1e-10:
                drift = max(drift, abs(a[k] - b[k]) / max(a[k], b[k]))
        va = vacua.Vacuum(scenario(f, 64, 64.0).spec())
        vb = vacua.Vacuum(scenario(f, 128, 64.0).spec())
        t = float(np.mean(va.spec.interval))
        ya, yb = va.y_jets(t)[0][list(cli.FD_MODES)], vb.y_jets(t)[0][list(cli.FD_MODES)]
        drift = max(drift, float(np.max(np.abs(ya - yb) / np.abs(yb))))
    ok = order_ok and status_ok and drift <= 0.01
    verdict(8, "discretisation sanity", ok,
            f"eigenvalue ratios {', '.join(f'{r:.3f}' for r in ratios)}, statuses identical {status_ok}, "
            f"n=64 vs n=128 drift {drift:.2%}")
