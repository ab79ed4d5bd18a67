"""Donsker-Varadhan cost of a vertex measure on a subgraph.

J(nu) is the least entropy cost sum_x nu(x) R(q(x,.) || p(x,.)) over kernels q
that move along the subgraph and keep nu invariant.  In flow form
f(x, y) = nu(x) q(x, y) is a circulation with outflow nu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flows import FlowProgram, i_projection, solve_program
from .graphs import FiniteGraph, mask_edges, vertex_set
from .kernels import SUPPORT_EPS, base_kernel, restricted_kernel


@dataclass
class DVResult:
    value: float
    circulation: np.ndarray | None
    kkt_residual: float = 0.0

    @property
    def measure(self) -> np.ndarray | None:
        if self.circulation is None:
            return None
        return self.circulation.sum(axis=1)


def subgraph_arcs(g: FiniteGraph, mask: int) -> list[tuple[int, int]]:
    """Both orientations of every edge in ``mask``."""
    arcs = []
    for e in mask_edges(mask):
        u, v = g.edges[e]
        arcs += [(u, v), (v, u)]
    return arcs


def subgraph_program(g: FiniteGraph, mask: int, delta: float, nu=None) -> tuple[FlowProgram, list]:
    P = base_kernel(g, mask, delta)
    arcs = subgraph_arcs(g, mask)
    tails = [a for a, _ in arcs]
    heads = [b for _, b in arcs]
    logp = [math.log(P[a, b]) for a, b in arcs]
    prog = FlowProgram(g.n_vertices, tails, heads, logp, np.zeros(len(arcs), dtype=int), 1,
                       marginal=None if nu is None else np.asarray(nu, dtype=float))
    return prog, arcs


def _as_matrix(n: int, arcs, flow) -> np.ndarray:
    F = np.zeros((n, n))
    for (a, b), v in zip(arcs, flow):
        F[a, b] += v
    return F


def _check_measure(g: FiniteGraph, nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (g.n_vertices,):
        raise ValueError(f"measure must have {g.n_vertices} entries")
    if (nu < 0).any():
        raise ValueError("negative mass")
    if abs(nu.sum() - 1.0) > 1e-9:
        raise ValueError("measure must sum to 1")
    return np.where(nu > SUPPORT_EPS, nu, 0.0)


def dv_functional(g: FiniteGraph, mask: int, nu, delta: float) -> DVResult:
    """Cost of ``nu`` on the subgraph ``mask``; value inf if nothing keeps nu invariant."""
    nu = _check_measure(g, nu)
    inside = np.zeros(g.n_vertices, dtype=bool)
    inside[vertex_set(g, mask)] = True
    if (nu[~inside] > 0).any():
        raise ValueError("measure charges vertices outside the subgraph")
    prog, arcs = subgraph_program(g, mask, delta, nu)
    sol = i_projection(prog)
    if not sol.feasible:
        return DVResult(math.inf, None, 0.0)
    res = DVResult(sol.value, _as_matrix(g.n_vertices, arcs, sol.flow))
    res.kkt_residual = kkt_check(res, g, mask, delta)
    return res


def dv_infimum(g: FiniteGraph, mask: int, delta: float, method: str = "newton") -> DVResult:
    """Least cost over all probability measures on the vertices of ``mask``."""
    prog, arcs = subgraph_program(g, mask, delta)
    sol = solve_program(prog, method=method)
    return DVResult(sol.value, _as_matrix(g.n_vertices, arcs, sol.flow))


def kernel_from_circulation(F: np.ndarray, fallback: np.ndarray | None = None) -> np.ndarray:
    """q(x, y) = f(x, y) / m(x); rows with no mass copy ``fallback``."""
    m = F.sum(axis=1)
    q = np.zeros_like(F)
    pos = m > 0
    q[pos] = F[pos] / m[pos, None]
    if fallback is not None:
        q[~pos] = fallback[~pos]
    return q


def kkt_check(result: DVResult, g: FiniteGraph, mask: int, delta: float) -> float:
    """Largest violation of the optimality condition of the entropy cost.

    At an optimum log(q(x,y) / p(x,y)) splits as a(x) + b(y) over the arcs that
    carry flow, i.e. the optimal arc-to-arc kernel depends on the target arc
    alone.  The fit is by least squares over the potentials; zero rows skipped.
    """
    if result.circulation is None or not math.isfinite(result.value):
        raise ValueError("needs a finite result")
    F = result.circulation
    P = base_kernel(g, mask, delta)
    q = kernel_from_circulation(F)
    xs, ys = np.nonzero(F > SUPPORT_EPS)
    if len(xs) == 0:
        return 0.0
    n = g.n_vertices
    r = np.log(q[xs, ys]) - np.log(P[xs, ys])
    D = np.zeros((len(xs), 2 * n))
    D[np.arange(len(xs)), xs] = 1.0
    D[np.arange(len(xs)), n + ys] = 1.0
    coef = np.linalg.lstsq(D, r, rcond=None)[0]
    return float(np.abs(r - D @ coef).max())


@dataclass
class PotentialResult:
    value: float
    converged: bool
    iterations: int


def dv_via_potential(g: FiniteGraph, mask: int, nu, delta: float, tol: float = 1e-9,
                     max_iter: int = 500) -> PotentialResult:
    """-inf over u > 0 of sum_x nu(x) log((P u)(x) / u(x)), P restricted to the subgraph.

    Newton ascent on phi = log u over the support of nu.  When the infimum is
    only approached at infinity the value is still returned but
    ``converged`` is False.
    """
    nu = _check_measure(g, nu)
    S = np.flatnonzero(nu > 0)
    P = restricted_kernel(g, mask, delta)[np.ix_(S, S)]
    w = nu[S]
    if (P.sum(axis=1) == 0).any():
        return PotentialResult(math.inf, True, 0)
    logP = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), -np.inf)
    k = len(S)

    def parts(phi):
        z = logP + phi[None, :] - phi[:, None]
        zmax = z.max(axis=1)
        e = np.exp(z - zmax[:, None])
        s = e.sum(axis=1)
        val = float(w @ (np.log(s) + zmax))
        W = e / s[:, None]
        return val, W

    phi = np.zeros(k)
    val, W = parts(phi)
    converged = False
    its = 0
    for its in range(1, max_iter + 1):
        grad = W.T @ w - w
        if np.abs(grad).max() < tol:
            converged = True
            break
        H = np.diag(W.T @ w) - (W.T * w) @ W
        d = -np.linalg.lstsq(H[1:, 1:], grad[1:], rcond=None)[0]
        d = np.concatenate([[0.0], d])
        slope = grad @ d
        if slope >= 0:
            d, slope = -grad, -grad @ grad
        t = 1.0
        while True:
            vn, Wn = parts(phi + t * d)
            if vn <= val + 1e-4 * t * slope or t < 1e-14:
                break
            t *= 0.5
        if val - vn < 1e-16 and t < 1e-14:
            break
        phi, val, W = phi + t * d, vn, Wn
    return PotentialResult(-val, converged, its)


def tree_kernel(g: FiniteGraph, nu) -> np.ndarray:
    """The only kernel keeping ``nu`` invariant on a tree, built from the leaves.

    On a tree every circulation is symmetric, so the flow on the edge from v
    to its parent is nu(v) minus the flow v receives from its children.
    Vertices without mass get simple random walk rows.
    """
    if g.n_edges != g.n_vertices - 1:
        raise ValueError("graph is not a tree")
    nu = _check_measure(g, nu)
    S = set(np.flatnonzero(nu > 0).tolist())
    root = min(S)
    parent = {root: None}
    order = [root]
    for x in order:
        for y, _ in g.adjacency[x]:
            if y in S and y not in parent:
                parent[y] = x
                order.append(y)
    if len(order) != len(S):
        raise ValueError("support of the measure is not connected")
    n = g.n_vertices
    F = np.zeros((n, n))
    for v in reversed(order[1:]):
        p = parent[v]
        inflow = sum(F[u, v] for u, _ in g.adjacency[v] if parent.get(u) == v)
        up = nu[v] - inflow
        if up < -1e-12:
            raise ValueError("measure is not invariant for any kernel on the tree")
        F[v, p] = F[p, v] = max(up, 0.0)
    if abs(F[root].sum() - nu[root]) > 1e-12:
        raise ValueError("measure is not invariant for any kernel on the tree")
    srw = base_kernel(g, g.full_mask, 1.0)
    return kernel_from_circulation(F, srw)
