"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from oracles import path_survival
from orrw import closed_forms as cf
from orrw.exact import (build_meta_chain, crossing_index, exact_alpha_oracle,
                        exp_moment_diagnostic, survival_curve)
from orrw.fixtures import STARTS, fixture
from orrw.graphs import cover_family
from orrw.rates import alpha_c, alpha_c_boundary_form, rate_I
from orrw.simulate import estimate_tail_decay

ALPHA_TOL = 1e-6
RATE_TOL = 1e-4
EXACT_TOL = 1e-12
SLOPE_TOL = 1e-3
ALPHA_STAR3_DELTA1 = 0.346574
X_GRID = np.round(np.arange(0, 0.5001, 0.025), 3)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail
    return emit


def test_ac1_closed_form_exponent(report):
    t0 = time.perf_counter()
    worst = 0.0
    for tag in ("star3", "path3", "triangle", "path4"):
        g = fixture(tag)
        fam = cover_family(g)
        for d in (0.3, 0.5, 1, 2, 5, 20):
            ref = cf.alpha_closed(tag, d)
            for v in (alpha_c(g, d, fam), alpha_c_boundary_form(g, d, fam),
                      exact_alpha_oracle(g, d, fam).alpha):
                worst = max(worst, abs(v - ref))
    elapsed = time.perf_counter() - t0
    report("AC1 closed-form exponent", worst <= ALPHA_TOL and elapsed < 5,
           f"max error {worst:.2e} (tol {ALPHA_TOL}), {elapsed:.2f}s (limit 5s)")


def test_ac2_rate_function(report):
    t0 = time.perf_counter()
    star3, path3 = fixture("star3"), fixture("path3")
    worst = 0.0
    for d in (0.5, 1, 2, 5):
        for x in X_GRID:
            worst = max(worst,
                        abs(rate_I(star3, d, [0.5, x, 0.5 - x]).value - cf.star3_rate(d, x)),
                        abs(rate_I(path3, d, [x, 0.5, 0.5 - x]).value - cf.path3_rate(d, x)))
    elapsed = time.perf_counter() - t0
    report("AC2 rate function", worst <= RATE_TOL and elapsed < 60,
           f"max error {worst:.2e} (tol {RATE_TOL}), {elapsed:.2f}s (limit 60s)")


def test_ac3_exact_survival(report):
    g = fixture("star3")
    fam = cover_family(g)
    worst = 0.0
    curves = {}
    for d in (1, 2):
        exact = survival_curve(build_meta_chain(g, d, fam, exact=True), 12).survival
        brute = path_survival(g, d, fam, 12)
        worst = max(worst, max(abs(float(a - b)) for a, b in zip(exact[1:], brute[1:])))
        curves[d] = exact
    p5, p3 = curves[1][5], curves[2][3]
    ok = worst <= EXACT_TOL and abs(p5 - 0.25) <= EXACT_TOL and abs(p3 - 2 / 3) <= EXACT_TOL
    report("AC3 exact survival", ok,
           f"max error {worst:.2e}, P(>5 | delta=1) = {p5}, P(>3 | delta=2) = {p3}")


def test_ac4_decay_rate_consistency(report):
    worst, worst_at, band_ok = 0.0, None, True
    for name in STARTS:
        g = fixture(name)
        fam = cover_family(g)
        assert g.n_edges <= 6
        for d in (0.5, 1, 2, 5):
            a = alpha_c(g, d, fam)
            c = survival_curve(build_meta_chain(g, d, fam), 200)
            dev = abs(-c.log_survival[200] / 200 - a)
            if dev > worst:
                worst, worst_at = dev, (name, d)
            log_ratio = a * np.arange(20, 201) + c.log_survival[20:201]
            band_ok &= bool(np.isfinite(log_ratio).all()) and log_ratio.max() - log_ratio.min() < math.log(20)
    report("AC4 decay-rate consistency", worst <= SLOPE_TOL and band_ok,
           f"max |slope(200) - alpha_c| = {worst:.2e} at {worst_at} (tol {SLOPE_TOL}); "
           f"band {'bounded' if band_ok else 'unbounded'}")


def test_ac5_monte_carlo(report, monkeypatch):
    monkeypatch.setenv("ORRW_THREADS", "1")
    g = fixture("star3")
    t0 = time.perf_counter()
    est = estimate_tail_decay(g, 1.0, cover_family(g), start="0", n_grid=range(5, 26),
                              samples=100_000, rng_seed=0, window=(5, 25))
    elapsed = time.perf_counter() - t0
    z = (est.slope + ALPHA_STAR3_DELTA1) / est.stderr
    report("AC5 Monte Carlo agreement", abs(z) <= 2 and elapsed < 30,
           f"slope {est.slope:.4f} +- {est.stderr:.4f} (z = {z:.2f}), {elapsed:.2f}s (limit 30s)")


def test_ac6_exponential_moment(report):
    verdicts = []
    for tag in ("star3", "path4"):
        g = fixture(tag)
        fam = cover_family(g)
        a = alpha_c(g, 1.0, fam)
        c = survival_curve(build_meta_chain(g, 1.0, fam), 2000)
        verdicts.append((tag, exp_moment_diagnostic(c, 0.9 * a).converges,
                         exp_moment_diagnostic(c, a).converges,
                         exp_moment_diagnostic(c, 1.1 * a).converges))
    ok = all(v[1] and not v[2] and not v[3] for v in verdicts)
    report("AC6 exponential-moment threshold", ok,
           "; ".join(f"{t}: 0.9a {'conv' if a else 'div'}, a {'conv' if b else 'div'}, "
                     f"1.1a {'conv' if c else 'div'}" for t, a, b, c in verdicts))


def test_ac7_analytic_properties(report):
    star3, path3 = fixture("star3"), fixture("path3")
    measures = [(star3, [0.5, x, 0.5 - x]) for x in X_GRID] + \
               [(path3, [x, 0.5, 0.5 - x]) for x in X_GRID]
    deltas = (1.0, 1.5, 2.0, 3.0, 5.0)
    fails = []

    # (i) below one the rate is the simple-walk rate
    if max(abs(rate_I(g, 0.5, nu).value - rate_I(g, 1.0, nu).value) for g, nu in measures) > 1e-8:
        fails.append("i")
    # (ii) and (iii) monotone and log-Lipschitz above one
    mono = lip = True
    for g, nu in measures:
        vals = [rate_I(g, d, nu).value for d in deltas]
        for (d1, v1), (d2, v2) in zip(zip(deltas, vals), zip(deltas[1:], vals[1:])):
            mono &= v2 <= v1 + 1e-8
            if math.isfinite(v1) and math.isfinite(v2):
                lip &= abs(v2 - v1) <= math.log(d2 / d1) + 1e-8
    witness = [0.5, 0.5, 0.0]
    drop = rate_I(star3, 1.0, witness).value - rate_I(star3, 2.0, witness).value
    if not (mono and drop > 1e-3):
        fails.append("ii")
    if not lip:
        fails.append("iii")
    # (iv) kink at delta = 1
    h = 1e-3
    i0 = rate_I(star3, 1.0, witness).value
    right = (rate_I(star3, 1 + h, witness).value - i0) / h
    left = (i0 - rate_I(star3, 1 - h, witness).value) / h
    if not abs(right - left) > 0.1:
        fails.append("iv")
    # (v) exponent strictly decreasing
    for name in ("star3", "path3", "triangle", "path4", "lollipop"):
        g = fixture(name)
        vals = [alpha_c(g, d, cover_family(g)) for d in np.geomspace(0.05, 20, 15)]
        if not all(a - b > 1e-9 for a, b in zip(vals, vals[1:])):
            fails.append(f"v:{name}")
    # (vi) small-delta behaviour
    small = {n: alpha_c(fixture(n), 0.001, cover_family(fixture(n))) for n in ("star3", "triangle", "path4")}
    if not (small["star3"] > 3 and small["triangle"] > 3 and small["path4"] < 0.5):
        fails.append("vi")
    report("AC7 analytic-property battery", not fails,
           f"failed items {fails}" if fails else
           f"drop {drop:.4f}, derivatives left {left:.4f} right {right:.4f}, "
           f"alpha(0.001) = {small['star3']:.3f}/{small['triangle']:.3f}/{small['path4']:.3f}")


def test_ac8_tail_crossing(report):
    Ns = {}
    for tag in ("star3", "path4"):
        g = fixture(tag)
        fam = cover_family(g)
        lo = survival_curve(build_meta_chain(g, 1.0, fam), 1000)
        hi = survival_curve(build_meta_chain(g, 2.0, fam), 1000)
        Ns[tag] = crossing_index(lo, hi)
    ok = all(N is not None and N <= 500 for N in Ns.values())
    report("AC8 tail crossing", ok, f"N = {Ns}")
