"""Built-in oracle checks run by ``orrw verify``."""
from __future__ import annotations

import math

import numpy as np

from . import closed_forms as cf
from .exact import (build_meta_chain, crossing_index, exact_alpha_oracle, exp_moment_diagnostic,
                    survival_curve)
from .fixtures import STARTS, fixture
from .graphs import cover_family
from .rates import alpha_c, alpha_c_boundary_form, rate_I
from .simulate import estimate_tail_decay

TAGGED = ("star3", "path3", "triangle", "path4")


def _brute_survival(g, delta, family, n_max):
    """P(T > n) by enumerating every path with exact weights."""
    from fractions import Fraction
    delta = Fraction(delta)
    out = [Fraction(0)] * (n_max + 1)

    def walk(x, mask, n, p):
        out[n] += p
        if n == n_max:
            return
        adj = g.adjacency[x]
        total = sum(delta if mask >> e & 1 else 1 for _, e in adj)
        for y, e in adj:
            m2 = mask | 1 << e
            if m2 not in family:
                continue
            walk(y, m2, n + 1, p * (delta if mask >> e & 1 else 1) / total)

    out[0] = Fraction(0)
    walk(g.start, 0, 0, Fraction(1))
    return out


def run_checks(strict: bool = False, mc_samples: int = 100_000):
    """List of (name, ok, detail, gating)."""
    res = []

    def add(name, ok, detail, gating=True):
        res.append((name, bool(ok), detail, gating))

    worst = 0.0
    for tag in TAGGED:
        g = fixture(tag)
        fam = cover_family(g)
        for d in (0.3, 0.5, 1, 2, 5, 20):
            ref = cf.alpha_closed(tag, d)
            for v in (alpha_c(g, d, fam), alpha_c_boundary_form(g, d, fam),
                      exact_alpha_oracle(g, d, fam).alpha):
                worst = max(worst, abs(v - ref))
    add("exponent closed forms", worst <= 1e-6, f"max error {worst:.2e}")

    worst = 0.0
    star3, path3 = fixture("star3"), fixture("path3")
    for d in (0.5, 1, 2, 5):
        for x in np.round(np.arange(0, 0.5001, 0.025), 3):
            worst = max(worst, abs(rate_I(star3, d, [0.5, x, 0.5 - x]).value - cf.star3_rate(d, x)),
                        abs(rate_I(path3, d, [x, 0.5, 0.5 - x]).value - cf.path3_rate(d, x)))
    add("rate closed forms", worst <= 1e-4, f"max error {worst:.2e}")

    fam = cover_family(star3)
    worst = 0.0
    for d in (1, 2):
        exact = survival_curve(build_meta_chain(star3, d, fam, exact=True), 12).survival
        brute = _brute_survival(star3, d, fam, 12)
        worst = max(worst, max(abs(float(a - b)) for a, b in zip(exact[1:], brute[1:])))
    s1 = survival_curve(build_meta_chain(star3, 1, fam, exact=True), 5).survival[5]
    s2 = survival_curve(build_meta_chain(star3, 2, fam, exact=True), 3).survival[3]
    add("exact survival", worst <= 1e-12 and s1 == 0.25 and abs(s2 - 2 / 3) < 1e-15,
        f"max error {worst:.2e}, P(>5)={float(s1):.6f}, P(>3)={float(s2):.6f}")

    slope_dev, band_ok = 0.0, True
    for name in STARTS:
        g = fixture(name)
        fam_g = cover_family(g)
        for d in (0.5, 1, 2, 5):
            a = exact_alpha_oracle(g, d, fam_g).alpha
            c = survival_curve(build_meta_chain(g, d, fam_g), 200)
            slope_dev = max(slope_dev, abs(-c.log_survival[200] / 200 - a))
            band = a * np.arange(20, 201) + c.log_survival[20:201]
            band_ok &= bool(np.isfinite(band).all()) and band.max() - band.min() < math.log(20)
    add("tail band e^(n alpha) P(T > n)", band_ok, "bounded on n in [20, 200]")
    add("slope at n = 200 within 1e-3", slope_dev <= 1e-3,
        f"max deviation {slope_dev:.2e} (finite-horizon prefactor term log(c)/n)", strict)

    est = estimate_tail_decay(star3, 1.0, fam, n_grid=range(5, 26), samples=mc_samples,
                              rng_seed=0, window=(5, 25))
    z = (est.slope + 0.346574) / est.stderr
    add("Monte Carlo slope", abs(z) <= 2, f"slope {est.slope:.4f} +- {est.stderr:.4f}")

    ok = True
    for tag in ("star3", "path4"):
        g = fixture(tag)
        f = cover_family(g)
        a = exact_alpha_oracle(g, 1, f).alpha
        c = survival_curve(build_meta_chain(g, 1, f), 2000)
        ok &= exp_moment_diagnostic(c, 0.9 * a).converges
        ok &= not exp_moment_diagnostic(c, a).converges
        ok &= not exp_moment_diagnostic(c, 1.1 * a).converges
    add("exponential moment threshold", ok, "converges at 0.9 alpha, diverges at alpha, 1.1 alpha")

    add("analytic properties", *_analytic_battery())

    Ns = []
    for tag in ("star3", "path4"):
        g = fixture(tag)
        f = cover_family(g)
        N = crossing_index(survival_curve(build_meta_chain(g, 1, f), 1000),
                           survival_curve(build_meta_chain(g, 2, f), 1000))
        Ns.append(N)
    add("tail crossing", all(N is not None and N <= 500 for N in Ns), f"N = {Ns}")
    return res


def _analytic_battery():
    """Rate and exponent properties in delta on the three-vertex fixtures."""
    star3, path3 = fixture("star3"), fixture("path3")
    grid = np.round(np.arange(0, 0.5001, 0.025), 3)
    measures = [(star3, [0.5, x, 0.5 - x]) for x in grid] + [(path3, [x, 0.5, 0.5 - x]) for x in grid]
    deltas = (1.0, 1.5, 2.0, 3.0, 5.0)
    fails = []
    if max(abs(rate_I(g, 0.5, nu).value - rate_I(g, 1.0, nu).value) for g, nu in measures) > 1e-8:
        fails.append("I_0.5 = I_1")
    mono = lip = True
    for g, nu in measures:
        vals = [rate_I(g, d, nu).value for d in deltas]
        for d1, d2, v1, v2 in zip(deltas, deltas[1:], vals, vals[1:]):
            mono &= v2 <= v1 + 1e-8
            if math.isfinite(v1) and math.isfinite(v2):
                lip &= abs(v2 - v1) <= math.log(d2 / d1) + 1e-8
    witness = [0.5, 0.5, 0.0]
    i0 = rate_I(star3, 1.0, witness).value
    if not (mono and i0 - rate_I(star3, 2.0, witness).value > 1e-3):
        fails.append("monotone")
    if not lip:
        fails.append("log-Lipschitz")
    right = (rate_I(star3, 1.001, witness).value - i0) / 1e-3
    left = (i0 - rate_I(star3, 0.999, witness).value) / 1e-3
    if not abs(right - left) > 0.1:
        fails.append("kink at 1")
    for name in ("star3", "path3", "triangle", "path4"):
        g = fixture(name)
        vals = [alpha_c(g, d, cover_family(g)) for d in np.geomspace(0.05, 20, 12)]
        if not all(a - b > 1e-9 for a, b in zip(vals, vals[1:])):
            fails.append(f"alpha decreasing on {name}")
    small = [alpha_c(fixture(n), 0.001, cover_family(fixture(n))) for n in ("star3", "triangle", "path4")]
    if not (small[0] > 3 and small[1] > 3 and small[2] < 0.5):
        fails.append("small delta")
    detail = (f"one-sided derivatives {left:.3f} / {right:.3f}" if not fails
              else "failed: " + ", ".join(fails))
    return not fails, detail
