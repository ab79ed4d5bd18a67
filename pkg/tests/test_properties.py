"""Property-based checks of the structural invariants."""
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from orrw.dv import dv_functional
from orrw.fixtures import STARTS, fixture
from orrw.graphs import cover_family, downward_closure, enumerate_S, is_decreasing
from orrw.kernels import base_kernel, lifted_kernel, relative_entropy, restricted_kernel
from orrw.graphs import lift
from orrw.rates import rate_I
from orrw.simulate import trajectory_from_path

GRAPHS = {name: fixture(name) for name in STARTS}
SLOW = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
FAST = settings(max_examples=100, deadline=None)

names = st.sampled_from(sorted(GRAPHS))
deltas = st.floats(0.01, 100.0)


def probability(k, min_mass=0.0):
    return st.lists(st.floats(min_mass, 1.0), min_size=k, max_size=k).filter(
        lambda v: sum(v) > 1e-3).map(lambda v: np.array(v) / sum(v))


@FAST
@given(st.integers(2, 6).flatmap(lambda k: st.tuples(probability(k), probability(k, 1e-3))))
def test_relative_entropy_nonnegative(pair):
    gamma, rho = pair
    v = relative_entropy(gamma, rho)
    assert v >= -1e-12
    assert abs(relative_entropy(rho, rho)) < 1e-12


@FAST
@given(names, deltas, st.data())
def test_kernels_are_stochastic(name, delta, data):
    g = GRAPHS[name]
    mask = data.draw(st.integers(0, g.full_mask))
    P = base_kernel(g, mask, delta)
    np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)
    assert (P >= 0).all()
    Q = lifted_kernel(lift(g), mask, delta)
    np.testing.assert_allclose(Q.sum(axis=1), 1.0, atol=1e-12)
    R = restricted_kernel(g, mask, delta)
    assert (R.sum(axis=1) <= 1 + 1e-12).all()


@FAST
@given(names, deltas, deltas, st.data())
def test_traversed_edges_gain_weight_with_delta(name, d1, d2, data):
    assume(d1 < d2)
    g = GRAPHS[name]
    mask = data.draw(st.sampled_from(enumerate_S(g)))
    P1, P2 = base_kernel(g, mask, d1), base_kernel(g, mask, d2)
    for x in range(g.n_vertices):
        for y, e in g.adjacency[x]:
            if mask >> e & 1:
                assert P2[x, y] >= P1[x, y] - 1e-15


@FAST
@given(names, st.data())
def test_downward_closure(name, data):
    g = GRAPHS[name]
    S = enumerate_S(g)
    seeds = data.draw(st.lists(st.sampled_from(S), min_size=1, max_size=3))
    closed = downward_closure(g, seeds)
    assert set(seeds) <= closed
    assert is_decreasing(closed, g)
    assert closed == {s for s in S if any(s & m == s for m in seeds)}


@FAST
@given(names, st.data())
def test_traversed_set_grows_at_renewals(name, data):
    g = GRAPHS[name]
    path = [g.start]
    for _ in range(data.draw(st.integers(1, 40))):
        path.append(data.draw(st.sampled_from(g.adjacency[path[-1]]))[0])
    t = trajectory_from_path(g, path)
    for j in range(1, len(path)):
        a, b = t.traversed[j - 1], t.traversed[j]
        assert a & b == a
        grew = bin(b).count("1") - bin(a).count("1")
        assert grew in (0, 1)
        if a:
            assert (grew == 1) == (j in t.renewal_times)


# the rate function on a measure with the star3 invariance constraint
star_x = st.floats(0.0, 0.5)


def star_nu(x):
    return [0.5, x, 0.5 - x]


@SLOW
@given(star_x, st.sampled_from([0.3, 0.7]))
def test_rate_below_one_equals_simple_walk(x, delta):
    g = GRAPHS["star3"]
    assert abs(rate_I(g, delta, star_nu(x)).value - rate_I(g, 1.0, star_nu(x)).value) < 1e-8


@SLOW
@given(star_x, st.floats(1.0, 20.0), st.floats(1.0, 20.0))
def test_rate_monotone_and_log_lipschitz(x, d1, d2):
    assume(d1 < d2)
    g = GRAPHS["star3"]
    a = rate_I(g, d1, star_nu(x)).value
    b = rate_I(g, d2, star_nu(x)).value
    assert a >= b - 1e-8
    assert abs(b - a) <= math.log(d2 / d1) + 1e-8


# measures with positive flow on every triangle edge: mixtures of edge midpoints
MIDPOINTS = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
triangle_nu = probability(3, 0.05).map(lambda w: w @ MIDPOINTS)


@SLOW
@given(triangle_nu, st.floats(1.0, 10.0), st.floats(1.0, 10.0))
def test_rate_triangle_properties(nu, d1, d2):
    assume(d1 < d2)
    g = GRAPHS["triangle"]
    a = rate_I(g, d1, nu).value
    b = rate_I(g, d2, nu).value
    assert a >= b - 1e-8
    assert abs(b - a) <= math.log(d2 / d1) + 1e-8


@SLOW
@given(triangle_nu, triangle_nu, st.floats(0.05, 0.95), st.floats(0.3, 5.0))
def test_dv_convexity(n1, n2, lam, delta):
    g = GRAPHS["triangle"]
    J = lambda nu: dv_functional(g, g.full_mask, nu, delta).value
    assert J(lam * n1 + (1 - lam) * n2) <= lam * J(n1) + (1 - lam) * J(n2) + 1e-8


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_cover_family_excludes_full_set(name):
    g = GRAPHS[name]
    fam = cover_family(g)
    assert g.full_mask not in fam and is_decreasing(fam, g)
