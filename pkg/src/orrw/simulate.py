"""Simulation of the once-reinforced walk and Monte Carlo tail estimates.

Each sample owns a Philox stream keyed by (seed, sample index), so results do
not depend on batching, worker count, or which stepping kernel is used.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graphs import DecreasingFamily, FiniteGraph, arc_between
from .workers import worker_count

try:
    from ._walk import advance as _advance
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised when the extension is absent
    from ._walk_py import advance as _advance
    BACKEND = "python"

MAX_HORIZON = 1_000_000
MIN_SAMPLES = 1000
MIN_SURVIVORS = 50


def sample_stream(seed: int, sample: int) -> np.random.Generator:
    """Counter-based stream for one sample."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(sample)))


@dataclass
class WalkState:
    graph: FiniteGraph = field(repr=False)
    vertex: int
    traversed: int = 0
    n: int = 0
    counts: tuple = ()

    @classmethod
    def initial(cls, g: FiniteGraph) -> "WalkState":
        return cls(g, g.start, 0, 0, (0,) * g.n_edges)


def choose_edge(g: FiniteGraph, x: int, mask: int, delta: float, u: float) -> tuple[int, int]:
    """Neighbour and edge picked by the uniform ``u``, weights accumulated in order."""
    adj = g.adjacency[x]
    total = 0.0
    for _, e in adj:
        total += delta if mask >> e & 1 else 1.0
    target = u * total
    acc = 0.0
    for y, e in adj:
        acc += delta if mask >> e & 1 else 1.0
        if target < acc:
            return y, e
    return adj[-1]


def step(state: WalkState, delta: float, rng: np.random.Generator) -> WalkState:
    y, e = choose_edge(state.graph, state.vertex, state.traversed, delta, rng.random())
    counts = list(state.counts)
    counts[e] += 1
    return WalkState(state.graph, y, state.traversed | 1 << e, state.n + 1, tuple(counts))


@dataclass
class Trajectory:
    vertices: list[int]
    arcs: list[int]
    traversed: list[int]      # mask after each step, index 0 = before moving
    renewal_times: list[int]
    empirical: np.ndarray
    lifted_empirical: np.ndarray


def trajectory_from_path(g: FiniteGraph, path: list[int]) -> Trajectory:
    """Bookkeeping for a given vertex path."""
    arcs, masks = [], [0]
    renewals = [0]
    for j in range(1, len(path)):
        z = arc_between(g, path[j - 1], path[j])
        arcs.append(z)
        e = z >> 1
        prev = masks[-1]
        # the first traversal opens the first stage, which starts at time 0
        if not prev >> e & 1 and prev:
            renewals.append(j)
        masks.append(prev | 1 << e)
    n = len(path) - 1
    L = np.zeros(g.n_vertices)
    Z = np.zeros(2 * g.n_edges)
    for j in range(n):
        L[path[j]] += 1.0 / n
        Z[arcs[j]] += 1.0 / n
    return Trajectory(list(path), arcs, masks, renewals, L, Z)


def run(g: FiniteGraph, delta: float, steps: int, rng: np.random.Generator) -> Trajectory:
    if steps < 1:
        raise ValueError("steps must be at least 1")
    state = WalkState.initial(g)
    path = [state.vertex]
    for _ in range(steps):
        state = step(state, delta, rng)
        path.append(state.vertex)
    return trajectory_from_path(g, path)


def stopping_time(traj: Trajectory, family: DecreasingFamily) -> int | None:
    """First n > 0 with the traversed set outside the family; None if not yet."""
    for n in range(1, len(traj.traversed)):
        if traj.traversed[n] not in family:
            return n
    return None


# -- batched exit times -----------------------------------------------------------

def _csr(g: FiniteGraph):
    ptr = [0]
    nbr, edge = [], []
    for x in range(g.n_vertices):
        for y, e in g.adjacency[x]:
            nbr.append(y)
            edge.append(e)
        ptr.append(len(nbr))
    return (np.array(ptr, dtype=np.int64), np.array(nbr, dtype=np.int64),
            np.array(edge, dtype=np.int64))


def family_table(g: FiniteGraph, family: DecreasingFamily) -> np.ndarray:
    table = np.zeros(1 << g.n_edges, dtype=np.uint8)
    for m in family.members:
        table[m] = 1
    return table


def exit_times(g: FiniteGraph, delta: float, family: DecreasingFamily, horizon: int,
               samples: int, seed: int = 0, first: int = 0, backend=None,
               block: int = 32) -> np.ndarray:
    """Exit time of each sample, or -1 if the walk is still inside at ``horizon``."""
    if horizon > MAX_HORIZON:
        raise ValueError(f"horizon is capped at {MAX_HORIZON} steps")
    advance = _advance if backend is None else backend
    ptr, nbr, edge = _csr(g)
    table = family_table(g, family)
    ids = np.arange(first, first + samples)
    gens = [sample_stream(seed, i) for i in ids]
    vertex = np.full(samples, g.start, dtype=np.int64)
    mask = np.zeros(samples, dtype=np.int64)
    stop = np.full(samples, -1, dtype=np.int64)
    done = 0
    width = block
    while done < horizon:
        active = np.flatnonzero(stop < 0)
        if len(active) == 0:
            break
        width = min(width, horizon - done)
        U = np.empty((len(active), width))
        for r, i in enumerate(active):
            U[r] = gens[i].random(width)
        v, m, s = vertex[active], mask[active], stop[active]
        advance(ptr, nbr, edge, float(delta), table, U, v, m, s, done)
        vertex[active], mask[active], stop[active] = v, m, s
        done += width
        width *= 2
    return stop


@dataclass
class DecayEstimate:
    slope: float
    intercept: float
    stderr: float
    window: tuple[int, int]
    samples: int
    rows: list = field(default_factory=list)   # (n, survivors, samples, p_hat, stderr)


def survival_table(stop: np.ndarray, n_grid) -> list[tuple[int, int, int, float, float]]:
    N = len(stop)
    rows = []
    for n in n_grid:
        k = int(np.count_nonzero((stop < 0) | (stop > n)))
        p = k / N
        rows.append((int(n), k, N, p, math.sqrt(p * (1 - p) / N)))
    return rows


def fit_decay(rows, window: tuple[int, int] | None = None) -> tuple[float, float, float, tuple[int, int]]:
    """Least-squares slope of log survival with a delta-method standard error.

    With an explicit window every grid point inside it is used; otherwise
    points with fewer than 50 survivors are dropped.  Points with no
    survivors are always dropped.
    """
    N = rows[0][2]
    pts = []
    for n, k, _, p, _ in rows:
        if window is not None and not window[0] <= n <= window[1]:
            continue
        if k == 0:
            warnings.warn(f"no survivors at n={n}; point dropped")
            continue
        if window is None and k < MIN_SURVIVORS:
            continue
        pts.append((n, p))
    if len(pts) < 2:
        raise ValueError("not enough surviving grid points to fit a slope")
    n = np.array([a for a, _ in pts], dtype=float)
    p = np.array([b for _, b in pts])
    y = np.log(p)
    w = (n - n.mean()) / np.sum((n - n.mean()) ** 2)
    slope = float(w @ y)
    intercept = float(y.mean() - slope * n.mean())
    # Cov(log p_i, log p_j) ~ (1 / S(min(n_i, n_j)) - 1) / N for nested events
    pmin = np.maximum.outer(p, p)
    C = (1.0 / pmin - 1.0) / N
    stderr = float(math.sqrt(max(w @ C @ w, 0.0)))
    return slope, intercept, stderr, (int(n.min()), int(n.max()))


def estimate_tail_decay(g: FiniteGraph, delta: float, family: DecreasingFamily, start=None,
                        n_grid=None, samples: int = 100_000, rng_seed: int = 0,
                        window: tuple[int, int] | None = None, backend=None) -> DecayEstimate:
    """Monte Carlo slope of log P(T > n) over ``n_grid``.

    ``start`` must match the graph's start vertex label when given (the graph
    fixes the start).
    """
    if start is not None and start != g.labels[g.start]:
        raise ValueError("start vertex differs from the graph's start")
    if samples < MIN_SAMPLES:
        raise ValueError(f"at least {MIN_SAMPLES} samples are required")
    n_grid = list(range(1, 26)) if n_grid is None else [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be increasing")
    horizon = n_grid[-1]
    if horizon > MAX_HORIZON:
        raise ValueError(f"horizon is capped at {MAX_HORIZON} steps")
    stop = _parallel_exit_times(g, delta, family, horizon, samples, rng_seed, backend)
    rows = survival_table(stop, n_grid)
    if rows[0][1] == 0:
        raise ValueError("every sample stopped before the first grid point")
    slope, intercept, se, win = fit_decay(rows, window)
    return DecayEstimate(slope, intercept, se, win, samples, rows)


def _chunk(args):
    g, delta, family, horizon, count, seed, first, backend = args
    return exit_times(g, delta, family, horizon, count, seed, first, backend)


def _parallel_exit_times(g, delta, family, horizon, samples, seed, backend):
    workers = worker_count()
    if workers <= 1 or samples < 2 * MIN_SAMPLES:
        return exit_times(g, delta, family, horizon, samples, seed, 0, backend)
    from concurrent.futures import ThreadPoolExecutor
    bounds = np.linspace(0, samples, workers + 1).astype(int)
    jobs = [(g, delta, family, horizon, int(b - a), seed, int(a), backend)
            for a, b in zip(bounds, bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chunk, jobs))
    return np.concatenate(parts)
