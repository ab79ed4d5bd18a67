"""Exact law of the first exit time from a decreasing family.

The walk's next step depends on its past only through the traversed edge set,
so (last arc, traversed set) is a Markov chain.  States whose set has left the
family are merged into one absorbing sink.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .graphs import DecreasingFamily, FiniteGraph, LiftedGraph, lift, mask_edges, vertex_set
from .kernels import lifted_kernel, restricted_kernel

MAX_EDGES_CHAIN = 16
MAX_EDGES_RATIONAL = 3
MAX_STEPS_RATIONAL = 20
MAX_STEPS = 100_000


class ConvergenceError(RuntimeError):
    pass


def _weight(mask: int, e: int, delta):
    return delta if mask >> e & 1 else 1


@dataclass
class MetaChain:
    """Live states ``(arc, traversed mask)``; mass leaving them is absorbed."""

    states: list[tuple[int, int]]
    initial: list          # probability of each live state after one step
    initial_absorbed: object
    rows: list[list[tuple[int, object]]]   # live -> [(live index, prob)]
    exact: bool
    unstoppable: bool

    def matrix(self) -> sp.csr_matrix:
        data, ri, ci = [], [], []
        for i, row in enumerate(self.rows):
            for j, p in row:
                ri.append(i)
                ci.append(j)
                data.append(float(p))
        n = len(self.states)
        return sp.csr_matrix((data, (ri, ci)), shape=(n, n))


def build_meta_chain(g: FiniteGraph, delta, family: DecreasingFamily, exact: bool = False) -> MetaChain:
    """Reachable live states of the (arc, traversed set) chain.

    ``exact=True`` keeps probabilities as fractions (delta is converted with
    ``Fraction``); it is meant for brute-force comparisons on tiny graphs.
    """
    if g.n_edges > MAX_EDGES_CHAIN:
        raise ValueError(f"exact chain limited to {MAX_EDGES_CHAIN} edges")
    if exact:
        if g.n_edges > MAX_EDGES_RATIONAL:
            raise ValueError(f"rational mode limited to {MAX_EDGES_RATIONAL} edges")
        delta = Fraction(delta) if not isinstance(delta, Fraction) else delta
        one = Fraction(1)
    else:
        delta = float(delta)
        one = 1.0
    if not delta > 0:
        raise ValueError("delta must be positive")
    lifted = lift(g)
    index: dict[tuple[int, int], int] = {}
    states: list[tuple[int, int]] = []

    def state_of(z: int, mask: int) -> int:
        key = (z, mask)
        if key not in index:
            index[key] = len(states)
            states.append(key)
        return index[key]

    x0 = g.start
    deg0 = g.degree(x0)
    init: dict[int, object] = {}
    absorbed0 = 0 * one
    for y, e in g.adjacency[x0]:
        z = 2 * e if g.edges[e][1] == y else 2 * e + 1
        p = one / deg0
        if (1 << e) in family:
            i = state_of(z, 1 << e)
            init[i] = init.get(i, 0 * one) + p
        else:
            absorbed0 += p

    rows: list[list[tuple[int, object]]] = []
    k = 0
    while k < len(states):
        z, mask = states[k]
        x = lifted.head[z]
        weights = [(w, _weight(mask, w >> 1, delta)) for w in lifted.out[z]]
        total = sum(wt for _, wt in weights)
        row = []
        for w, wt in weights:
            m2 = mask | 1 << (w >> 1)
            if m2 in family:
                row.append((state_of(w, m2), wt / total))
        rows.append(row)
        k += 1
    initial = [init.get(i, 0 * one) for i in range(len(states))]
    return MetaChain(states, initial, absorbed0, rows, exact, family.is_everything)


@dataclass
class SurvivalCurve:
    """P(T > n) for n = 0..n_max, with logs kept separately to avoid underflow."""

    survival: list
    log_survival: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.survival) - 1


def survival_curve(chain: MetaChain, n_max: int) -> SurvivalCurve:
    """Forward iteration of the live mass."""
    if not 0 <= n_max <= MAX_STEPS:
        raise ValueError(f"n_max must lie in [0, {MAX_STEPS}]")
    if chain.exact:
        if n_max > MAX_STEPS_RATIONAL:
            raise ValueError(f"rational mode limited to {MAX_STEPS_RATIONAL} steps")
        return _survival_exact(chain, n_max)
    Q = chain.matrix().T.tocsr()
    v = np.array([float(p) for p in chain.initial])
    logs = np.empty(n_max + 1)
    logs[0] = 0.0
    scale = 0.0
    for n in range(1, n_max + 1):
        if n > 1:
            v = Q @ v
        s = v.sum()
        if s <= 0:
            logs[n:] = -math.inf
            break
        scale += math.log(s)
        v /= s
        logs[n] = scale
    return SurvivalCurve(list(np.exp(logs)), logs)


def _survival_exact(chain: MetaChain, n_max: int) -> SurvivalCurve:
    v = dict((i, p) for i, p in enumerate(chain.initial) if p)
    out = [Fraction(1)]
    for n in range(1, n_max + 1):
        if n > 1:
            nxt: dict[int, Fraction] = {}
            for i, p in v.items():
                for j, q in chain.rows[i]:
                    nxt[j] = nxt.get(j, 0) + p * q
            v = nxt
        out.append(sum(v.values(), Fraction(0)))
    logs = np.array([math.log(p) if p > 0 else -math.inf for p in out])
    return SurvivalCurve(out, logs)


# -- spectral decay -------------------------------------------------------------

def spectral_radius(M: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Perron root of an irreducible non-negative matrix.

    Power iteration on M + I (which is primitive) bracketed by the
    Collatz-Wielandt bounds min(Av/v) <= rho <= max(Av/v).
    """
    n = M.shape[0]
    A = M + np.eye(n)
    v = np.ones(n) / n
    for _ in range(max_iter):
        w = A @ v
        ratios = w / v
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol:
            return 0.5 * (lo + hi) - 1.0
        v = w / w.sum()
    raise ConvergenceError("power iteration did not converge")


def _block_radius(M: np.ndarray, entry: list[int]) -> float:
    """Largest Perron root over communicating classes reachable from ``entry``."""
    n = M.shape[0]
    ncomp, labels = connected_components(sp.csr_matrix(M > 0), directed=True, connection="strong")
    if ncomp == 1:
        return spectral_radius(M)
    reach = set(entry)
    stack = list(entry)
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(M[i] > 0):
            if j not in reach:
                reach.add(int(j))
                stack.append(int(j))
    best = 0.0
    for c in range(ncomp):
        idx = [i for i in range(n) if labels[i] == c]
        if not reach.intersection(idx):
            continue
        sub = M[np.ix_(idx, idx)]
        if len(idx) == 1 and sub[0, 0] == 0:
            continue
        best = max(best, spectral_radius(sub))
    return best


def perron_decay(g: FiniteGraph, delta: float, mask: int, space: str = "vertex") -> float:
    """-log of the spectral radius of the walk killed when it leaves ``mask``.

    ``space="vertex"`` uses the vertex kernel restricted to the edges of
    ``mask``; ``space="arc"`` uses the arc kernel restricted to its arcs.
    """
    if space == "vertex":
        V = vertex_set(g, mask)
        M = restricted_kernel(g, mask, delta)[np.ix_(V, V)]
        entry = [V.index(g.start)] if g.start in V else list(range(len(V)))
    elif space == "arc":
        lifted = lift(g)
        arcs = lifted.arcs_of(mask)
        M = lifted_kernel(lifted, mask, delta)[np.ix_(arcs, arcs)]
        entry = [i for i, z in enumerate(arcs) if lifted.tail[z] == g.start] or list(range(len(arcs)))
    else:
        raise ValueError(f"unknown space {space!r}")
    rho = _block_radius(M, entry)
    if rho >= 1.0 - 1e-15:
        return 0.0
    return -math.log(rho)


@dataclass
class OracleValue:
    alpha: float
    subset: int
    unstoppable: bool


def exact_alpha_oracle(g: FiniteGraph, delta: float, family: DecreasingFamily,
                       space: str = "vertex") -> OracleValue:
    """Smallest killed-walk decay rate over the family."""
    if family.is_everything:
        return OracleValue(0.0, g.full_mask, True)
    best = None
    for mask in sorted(family.members):
        a = perron_decay(g, delta, mask, space)
        if best is None or a < best.alpha - 1e-13:
            best = OracleValue(a, mask, False)
    return best


@dataclass
class MomentDiagnostic:
    verdict: str
    ratio: float
    partial_sums: np.ndarray

    @property
    def converges(self) -> bool:
        return self.verdict == "converges"


def exp_moment_diagnostic(curve: SurvivalCurve, alpha: float, tol: float = 1e-6) -> MomentDiagnostic:
    """Ratio test for E exp(alpha T) = 1 + sum_n (e^alpha - 1) e^(alpha n) P(T > n).

    The geometric ratio of the terms is estimated over the second half of the
    curve with an even window (walks on bipartite graphs have period two).
    A ratio within ``tol`` of 1 or above counts as divergence.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    logs = np.asarray(curve.log_survival, dtype=float)
    n = len(logs)
    if n < 20:
        raise ValueError("curve too short for a stable ratio (needs 20 points)")
    log_terms = alpha * np.arange(n) + logs
    last = n - 1
    width = 2 * ((n // 2) // 2)
    a, b = log_terms[last - width], log_terms[last]
    if not math.isfinite(b):
        ratio = 0.0
    else:
        ratio = math.exp((b - a) / width)
    with np.errstate(over="ignore"):
        terms = math.expm1(alpha) * np.exp(log_terms)
    partial = 1.0 + np.cumsum(terms)
    verdict = "converges" if ratio < 1.0 - tol else "diverges"
    return MomentDiagnostic(verdict, ratio, partial)


def crossing_index(low: SurvivalCurve, high: SurvivalCurve) -> int | None:
    """Smallest N with low(n) < high(n) for every computed n > N."""
    a = np.asarray(low.log_survival)
    b = np.asarray(high.log_survival)
    m = min(len(a), len(b))
    bad = np.flatnonzero(~(a[:m] < b[:m]))
    if len(bad) == 0:
        return -1
    N = int(bad.max())
    return None if N >= m - 1 else N
