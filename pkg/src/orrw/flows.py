"""Entropy-cost programs over staged circulations.

A program has arcs ``a = (tail, head)`` grouped into stages.  Each stage carries
a circulation ``f_k`` (inflow equals outflow at every node) and the stage mass
``m_k(x)`` is the outflow at ``x``.  The objective

    sum_a f_a * log(f_a / (m_k(tail a) * P_a)) + sum_a cost_a * f_a

is convex and positively homogeneous in each stage.  Masses are tied either by
``sum_k m_k = marginal`` or by total flow 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog


@dataclass
class FlowProgram:
    n_nodes: int
    tails: np.ndarray
    heads: np.ndarray
    log_p: np.ndarray
    stage: np.ndarray
    n_stages: int = 1
    marginal: np.ndarray | None = None
    cost: np.ndarray | None = None

    def __post_init__(self):
        self.tails = np.asarray(self.tails, dtype=np.int64)
        self.heads = np.asarray(self.heads, dtype=np.int64)
        self.log_p = np.asarray(self.log_p, dtype=float)
        self.stage = np.asarray(self.stage, dtype=np.int64)
        if self.cost is None:
            self.cost = np.zeros(len(self.tails))
        else:
            self.cost = np.asarray(self.cost, dtype=float)
        if self.marginal is not None:
            self.marginal = np.asarray(self.marginal, dtype=float)

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    def block(self) -> np.ndarray:
        """Index of the (stage, tail) block each arc belongs to."""
        return self.stage * self.n_nodes + self.tails

    def constraints(self) -> tuple[np.ndarray, np.ndarray]:
        nn, ns, na = self.n_nodes, self.n_stages, self.n_arcs
        extra = nn if self.marginal is not None else 1
        A = np.zeros((ns * nn + extra, na))
        cols = np.arange(na)
        np.add.at(A, (self.stage * nn + self.tails, cols), 1.0)
        np.add.at(A, (self.stage * nn + self.heads, cols), -1.0)
        b = np.zeros(A.shape[0])
        if self.marginal is not None:
            A[ns * nn + self.tails, cols] = 1.0
            b[ns * nn:] = self.marginal
        else:
            A[ns * nn, :] = 1.0
            b[-1] = 1.0
        nonzero = np.abs(A).sum(axis=1) > 0
        if (~nonzero & (b != 0)).any():
            # a node with prescribed mass but no arcs at all
            A = np.vstack([A[nonzero], np.zeros((1, na))])
            b = np.concatenate([b[nonzero], [1.0]])
            return A, b
        return A[nonzero], b[nonzero]

    def objective(self, f: np.ndarray) -> float:
        m = np.zeros(self.n_stages * self.n_nodes)
        blk = self.block()
        np.add.at(m, blk, f)
        pos = f > 0
        terms = np.zeros_like(f)
        terms[pos] = f[pos] * (np.log(f[pos]) - np.log(m[blk[pos]]) - self.log_p[pos])
        return float(terms.sum() + self.cost @ f)

    def masses(self, f: np.ndarray) -> np.ndarray:
        m = np.zeros(self.n_stages * self.n_nodes)
        np.add.at(m, self.block(), f)
        return m.reshape(self.n_stages, self.n_nodes)


@dataclass
class FlowSolution:
    value: float
    flow: np.ndarray | None
    feasible: bool
    gap_bound: float = 0.0
    iterations: int = 0


def support_pass(A: np.ndarray, b: np.ndarray,
                 scale: np.ndarray | None = None) -> tuple[np.ndarray | None, np.ndarray]:
    """Find every arc that is positive in some feasible point.

    Solves the homogenised LP  max sum z  s.t.  A g = t b,  0 <= z <= min(g, 1).
    Feasible points form a cone, so the optimum has z = 1 exactly on the arcs
    that can carry flow, and g / t is a feasible point positive on all of them.
    ``scale`` gives a typical size per arc; the LP runs in g / scale so that
    arcs with tiny flow are not lost below the solver's tolerances.
    """
    m, n = A.shape
    s = np.ones(n) if scale is None else np.asarray(scale, dtype=float)
    A = A * s[None, :]
    c = np.concatenate([np.zeros(n), -np.ones(n), [0.0]])
    A_eq = np.hstack([A, np.zeros((m, n)), -b[:, None]])
    rows = np.abs(A_eq).max(axis=1)
    A_eq = A_eq / np.where(rows > 0, rows, 1.0)[:, None]
    A_ub = np.hstack([-np.eye(n), np.eye(n), np.zeros((n, 1))])
    bounds = [(0, None)] * n + [(0, 1)] * n + [(0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=np.zeros(m),
                  bounds=bounds, method="highs")
    if res.status == 2:
        return None, np.zeros(n, dtype=bool)
    if res.status != 0:
        raise RuntimeError(f"support LP failed: {res.message}")
    g, z, t = res.x[:n], res.x[n:2 * n], res.x[-1]
    sup = z > 0.5
    if t <= 1e-12 or not sup.any():
        return None, np.zeros(n, dtype=bool)
    return np.where(sup, s * g / t, 0.0), sup


def bregman_project(k: np.ndarray, A: np.ndarray, b: np.ndarray, y0: np.ndarray | None = None,
                    tol: float = 1e-14, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """KL projection of positive ``k`` onto ``{f : A f = b}``.

    Newton on the dual ``sum k exp(-A^T y) + b.y``; redundant rows are handled
    by a least-squares step.
    """
    logk = np.log(k)
    y = np.zeros(A.shape[0]) if y0 is None else y0.copy()
    scale = max(1.0, float(np.abs(b).max()))

    def evaluate(y):
        f = np.exp(np.clip(logk - A.T @ y, -745.0, 700.0))
        return f.sum() + b @ y, f

    F, f = evaluate(y)
    for _ in range(max_iter):
        r = b - A @ f
        if np.abs(r).max() <= tol * scale:
            break
        H = (A * f) @ A.T
        d = -np.linalg.lstsq(H, r, rcond=None)[0]
        slope = r @ d
        t = 1.0
        while True:
            Fn, fn = evaluate(y + t * d)
            if Fn <= F + 1e-4 * t * slope or t < 1e-12:
                break
            t *= 0.5
        if Fn > F and t < 1e-12:
            break
        y, F, f = y + t * d, Fn, fn
    return f, y


def _reduce(prog: FlowProgram, keep: np.ndarray) -> FlowProgram:
    return FlowProgram(prog.n_nodes, prog.tails[keep], prog.heads[keep], prog.log_p[keep],
                       prog.stage[keep], prog.n_stages, prog.marginal, prog.cost[keep])


def feasible_start(prog: FlowProgram):
    """Support mask and an exactly feasible point positive on that support."""
    A, b = prog.constraints()
    scale = None
    if prog.marginal is not None:
        # an arc carries at most the marginal mass at either end
        mt = np.minimum(prog.marginal[prog.tails], prog.marginal[prog.heads])
        scale = np.where(mt > 0, mt, 1.0)
    f0, sup = support_pass(A, b, scale)
    if f0 is None:
        return None, sup, None
    sub = _reduce(prog, sup)
    A2, b2 = sub.constraints()
    f, _ = bregman_project(f0[sup], A2, b2)
    return f, sup, sub


def _barrier(prog: FlowProgram, f: np.ndarray, mu_end: float, max_newton: int):
    A, _ = prog.constraints()
    N = null_space(A)
    if N.shape[1] == 0:
        return f, 0, 0.0
    blk = prog.block()
    _, blk_id = np.unique(blk, return_inverse=True)
    B = np.zeros((len(f), blk_id.max() + 1))
    B[np.arange(len(f)), blk_id] = 1.0
    lp, c = prog.log_p, prog.cost
    n = len(f)

    def parts(f, mu):
        m = B.T @ f
        val = float(f @ (np.log(f) - np.log(m[blk_id]) - lp) + c @ f)
        return val, val - mu * np.log(f).sum(), m

    mu = 1.0
    newton = 0
    while True:
        for _ in range(max_newton):
            val, F, m = parts(f, mu)
            grad = np.log(f) - np.log(m[blk_id]) - lp + c - mu / f
            H = -(B / m) @ B.T
            H[np.diag_indices(n)] += 1.0 / f + mu / f ** 2
            Hz = N.T @ H @ N
            gz = N.T @ grad
            try:
                dz = np.linalg.solve(Hz, -gz)
            except np.linalg.LinAlgError:
                dz = -np.linalg.lstsq(Hz, gz, rcond=None)[0]
            d = N @ dz
            dec = -gz @ dz
            newton += 1
            if dec < 1e-15 * max(1.0, abs(F)) or not np.isfinite(dec):
                break
            t = 1.0
            neg = d < 0
            if neg.any():
                t = min(1.0, 0.99 * float(np.min(-f[neg] / d[neg])))
            slope = grad @ d
            while True:
                fn = f + t * d
                if (fn > 0).all():
                    _, Fn, _ = parts(fn, mu)
                    if Fn <= F + 0.25 * t * slope:
                        break
                t *= 0.5
                if t < 1e-14:
                    fn = f
                    break
            if fn is f:
                break
            f = fn
        if mu <= mu_end:
            break
        mu *= 0.1
    return f, newton, n * mu


def solve_program(prog: FlowProgram, method: str = "newton", mu_end: float = 1e-15,
                  max_newton: int = 100, tol: float = 1e-13, max_iter: int = 100_000) -> FlowSolution:
    """Minimise the staged entropy cost; ``value`` is inf when nothing is feasible.

    ``method="newton"`` follows a log-barrier central path (the returned
    ``gap_bound`` is arcs * final barrier weight).  ``method="mirror"`` runs
    entropic mirror descent with unit step and exact KL projection.
    """
    f, sup, sub = feasible_start(prog)
    if f is None:
        return FlowSolution(math.inf, None, False)
    if method == "newton":
        f, its, gap = _barrier(sub, f, mu_end, max_newton)
    elif method == "mirror":
        f, its = _mirror(sub, f, tol, max_iter)
        gap = math.nan
    else:
        raise ValueError(f"unknown method {method!r}")
    full = np.zeros(prog.n_arcs)
    full[sup] = f
    return FlowSolution(sub.objective(f), full, True, gap, its)


def _mirror(prog: FlowProgram, f: np.ndarray, tol: float, max_iter: int):
    A, b = prog.constraints()
    blk = prog.block()
    y = None
    prev = prog.objective(f)
    its = 0
    for its in range(1, max_iter + 1):
        m = np.zeros(prog.n_stages * prog.n_nodes)
        np.add.at(m, blk, f)
        k = m[blk] * np.exp(prog.log_p - prog.cost)
        k = np.maximum(k, 1e-300)
        f, y = bregman_project(k, A, b, y)
        cur = prog.objective(f)
        if abs(prev - cur) < tol:
            break
        prev = cur
    return f, its


def i_projection(prog: FlowProgram) -> FlowSolution:
    """Exact optimum of a one-stage program with prescribed marginal.

    With the marginal fixed the objective is KL(f || marginal(tail) * P), so
    the optimum is a single KL projection.
    """
    if prog.marginal is None or prog.n_stages != 1:
        raise ValueError("i_projection needs one stage and a fixed marginal")
    f, sup, sub = feasible_start(prog)
    if f is None:
        return FlowSolution(math.inf, None, False)
    A, b = sub.constraints()
    k = sub.marginal[sub.tails] * np.exp(sub.log_p)
    f, _ = bregman_project(k, A, b)
    full = np.zeros(prog.n_arcs)
    full[sup] = f
    return FlowSolution(sub.objective(f), full, True, 0.0, 1)
