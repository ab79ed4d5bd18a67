import math

import numpy as np
import pytest

from orrw.dv import (DVResult, dv_functional, dv_infimum, dv_via_potential, kkt_check,
                     tree_kernel)
from orrw.exact import perron_decay
from orrw.fixtures import STARTS, fixture
from orrw.graphs import build_graph, enumerate_S


@pytest.mark.parametrize("delta", [0.3, 1, 2, 7])
def test_forced_circulation(star3, delta):
    r = dv_functional(star3, 0b01, [0.5, 0.5, 0], delta)
    assert r.value == pytest.approx(0.5 * math.log((1 + delta) / delta), abs=1e-12)
    assert r.kkt_residual < 1e-12
    p = dv_via_potential(star3, 0b01, [0.5, 0.5, 0], delta)
    assert p.value == pytest.approx(r.value, abs=1e-6)


def test_point_mass_is_infinite(star3):
    assert dv_functional(star3, 3, [0, 1, 0], 1.0).value == math.inf


def test_support_violation(star3):
    with pytest.raises(ValueError):
        dv_functional(star3, 0b01, [0.5, 0, 0.5], 1.0)


@pytest.mark.parametrize("name", ["star3", "path3", "path4", "triangle", "lollipop"])
def test_zero_only_at_degree_measure(name):
    g = fixture(name)
    deg = np.array([g.degree(x) for x in range(g.n_vertices)], dtype=float)
    pi = deg / deg.sum()
    assert abs(dv_functional(g, g.full_mask, pi, 1.0).value) < 1e-12
    rng = np.random.default_rng(0)
    other = pi + 0.05 * rng.standard_normal(len(pi))
    other = np.abs(other) / np.abs(other).sum()
    v = dv_functional(g, g.full_mask, other, 1.0).value
    assert v > 1e-6


def test_kkt_triangle_and_perturbation(triangle):
    r = dv_functional(triangle, 7, np.ones(3) / 3, 2.0)
    assert r.kkt_residual <= 1e-6
    F = r.circulation.copy()
    for x, y in [(0, 1), (1, 2), (2, 0)]:
        F[x, y] += 0.02
        F[y, x] -= 0.02
    assert kkt_check(DVResult(0.0, F), triangle, 7, 2.0) > 1e-3


@pytest.mark.parametrize("delta", [0.5, 3.0])
def test_potential_matches_functional(triangle, delta):
    rng = np.random.default_rng(5)
    seen = 0
    while seen < 6:
        nu = rng.dirichlet(np.ones(3))
        if nu.max() >= 0.5:
            continue
        seen += 1
        a = dv_functional(triangle, 7, nu, delta)
        b = dv_via_potential(triangle, 7, nu, delta)
        assert b.converged
        assert abs(a.value - b.value) < 1e-6
        assert a.kkt_residual < 1e-8


def test_tree_kernel_path3(path3):
    q = tree_kernel(path3, [0.25, 0.5, 0.25])
    assert q[1, 0] == pytest.approx(0.5) and q[1, 2] == pytest.approx(0.5)
    assert q[0, 1] == pytest.approx(1) and q[2, 1] == pytest.approx(1)


def test_tree_kernel_path_formula():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 4)], 0)
    nu = np.array([0.1, 0.25, 0.27, 0.2, 0.08]) / 0.9
    q = tree_kernel(g, nu)
    for i in range(1, 5):
        want = sum((-1) ** (j - 1) * nu[i - j] for j in range(1, i + 1)) / nu[i]
        assert q[i, i - 1] == pytest.approx(want, abs=1e-12)
    np.testing.assert_allclose(nu @ q, nu, atol=1e-12)


def test_tree_kernel_leaves(star3):
    q = tree_kernel(fixture("star4"), [0.5, 0.2, 0.2, 0.1])
    assert q[1, 0] == q[2, 0] == q[3, 0] == 1
    with pytest.raises(ValueError):
        tree_kernel(star3, [0.3, 0.4, 0.3])


@pytest.mark.parametrize("name", list(STARTS))
@pytest.mark.parametrize("delta", [0.5, 2.0])
def test_spectral_identity(name, delta):
    g = fixture(name)
    for mask in enumerate_S(g):
        assert abs(dv_infimum(g, mask, delta).value - perron_decay(g, delta, mask)) < 1e-6


def test_mirror_descent_agrees(triangle):
    for mask in enumerate_S(triangle):
        a = dv_infimum(triangle, mask, 2.0).value
        b = dv_infimum(triangle, mask, 2.0, method="mirror").value
        assert abs(a - b) < 1e-8
