"""Once-reinforced transition kernels and relative entropy."""
from __future__ import annotations

import math

import numpy as np

from .graphs import FiniteGraph, LiftedGraph

SUPPORT_EPS = 1e-15


def _check_delta(delta: float) -> None:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")


def edge_weight(mask: int, e: int, delta: float) -> float:
    return delta if mask >> e & 1 else 1.0


def base_kernel(g: FiniteGraph, mask: int, delta: float) -> np.ndarray:
    """Vertex kernel of the walk whose traversed set is ``mask``.

    Each incident edge has weight ``delta`` if it belongs to ``mask`` and 1
    otherwise; the walk picks an edge with probability proportional to weight.
    """
    _check_delta(delta)
    n = g.n_vertices
    P = np.zeros((n, n))
    for x in range(n):
        w = [edge_weight(mask, e, delta) for _, e in g.adjacency[x]]
        total = sum(w)
        for (y, _), wy in zip(g.adjacency[x], w):
            P[x, y] = wy / total
    return P


def restricted_kernel(g: FiniteGraph, mask: int, delta: float) -> np.ndarray:
    """``base_kernel`` with every transition off the edges of ``mask`` removed."""
    P = base_kernel(g, mask, delta)
    keep = np.zeros_like(P, dtype=bool)
    for e, (u, v) in enumerate(g.edges):
        if mask >> e & 1:
            keep[u, v] = keep[v, u] = True
    return np.where(keep, P, 0.0)


def lifted_kernel(lifted: LiftedGraph, mask: int, delta: float) -> np.ndarray:
    """Arc kernel: moving from z1 to z2 costs the vertex step tail(z2) -> head(z2)."""
    P = base_kernel(lifted.graph, mask, delta)
    n = lifted.n_arcs
    K = np.zeros((n, n))
    for z1 in range(n):
        for z2 in lifted.out[z1]:
            K[z1, z2] = P[lifted.tail[z2], lifted.head[z2]]
    return K


def support(v) -> np.ndarray:
    return np.asarray(v, dtype=float) > SUPPORT_EPS


def relative_entropy(gamma, rho) -> float:
    """Sum of gamma*log(gamma/rho) in nats; inf off absolute continuity."""
    gamma = np.asarray(gamma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if gamma.shape != rho.shape:
        raise ValueError("measures must share an index set")
    if (gamma < 0).any() or (rho < 0).any():
        raise ValueError("negative mass")
    sg, sr = support(gamma), support(rho)
    if (sg & ~sr).any():
        return math.inf
    return float(np.sum(gamma[sg] * np.log(gamma[sg] / rho[sg])))


def entropy_cost(nu, q, p) -> float:
    """Sum over x of nu(x) * R(q(x, .) || p(x, .))."""
    nu = np.asarray(nu, dtype=float)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != p.shape or q.shape[0] != nu.shape[0]:
        raise ValueError("shape mismatch")
    total = 0.0
    for x in np.flatnonzero(support(nu)):
        r = relative_entropy(q[x], p[x])
        if math.isinf(r):
            return math.inf
        total += nu[x] * r
    return total
