"""Rate function of the empirical measure and the critical exponent."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np

from .dv import DVResult, _check_measure, dv_functional, dv_infimum, subgraph_arcs, subgraph_program
from .flows import FlowProgram, feasible_start, solve_program
from .graphs import (DecreasingFamily, FiniteGraph, LiftedGraph, edge_boundary,
                     enumerate_growth_sequences, lift, mask_edges, sequence_edges)
from .kernels import base_kernel
from .workers import ordered_map

INACTIVE = 1e-10
TIE = 1e-11


@dataclass
class Decomposition:
    """Stage weights, stage measures and stage circulations of an optimum."""

    sequence: tuple[int, ...]
    weights: np.ndarray
    measures: list
    circulations: list

    @property
    def active(self) -> list[bool]:
        return [r >= INACTIVE for r in self.weights]


@dataclass
class RateValue:
    value: float
    decomposition: Decomposition | None
    audit: list = field(default_factory=list)

    @property
    def sequence(self) -> tuple[int, ...] | None:
        return None if self.decomposition is None else self.decomposition.sequence


def sequence_label(g: FiniteGraph, seq: Sequence[int]) -> str:
    return ">".join(g.edge_label(e) for e in sequence_edges(seq))


def sequence_program(g: FiniteGraph, seq: Sequence[int], delta: float, nu) -> tuple[FlowProgram, list]:
    tails, heads, logp, stage, arcs = [], [], [], [], []
    for k, mask in enumerate(seq):
        P = base_kernel(g, mask, delta)
        for a, b in subgraph_arcs(g, mask):
            tails.append(a)
            heads.append(b)
            logp.append(math.log(P[a, b]))
            stage.append(k)
            arcs.append((k, a, b))
    prog = FlowProgram(g.n_vertices, tails, heads, logp, stage, len(seq), marginal=nu)
    return prog, arcs


def _solve_sequence(g, delta, nu, seq, method="newton"):
    prog, arcs = sequence_program(g, seq, delta, nu)
    sol = solve_program(prog, method=method)
    return sol, arcs


def rate_I(g: FiniteGraph, delta: float, nu, sequences=None, method: str = "newton") -> RateValue:
    """Minimum over growth sequences of the staged entropy cost of ``nu``.

    Infinite exactly when no circulation on the whole graph has outflow nu.
    Near-ties (within 1e-11) go to the earliest sequence in enumeration order.
    """
    nu = _check_measure(g, nu)
    full_prog, _ = subgraph_program(g, g.full_mask, 1.0, nu)
    f0, _, _ = feasible_start(full_prog)
    if f0 is None:
        return RateValue(math.inf, None, [])
    if sequences is None:
        sequences = enumerate_growth_sequences(g)
    audit = []
    best = None
    for seq in sequences:
        sol, arcs = _solve_sequence(g, delta, nu, seq, method)
        audit.append((tuple(seq), sol.value))
        if best is None or sol.value < best[0] - TIE:
            best = (sol.value, tuple(seq), sol, arcs)
    value, seq, sol, arcs = best
    n = g.n_vertices
    circ = [np.zeros((n, n)) for _ in seq]
    for (k, a, b), v in zip(arcs, sol.flow):
        circ[k][a, b] += v
    weights = np.array([c.sum() for c in circ])
    measures = [c.sum(axis=1) / r if r >= INACTIVE else None for c, r in zip(circ, weights)]
    return RateValue(value, Decomposition(seq, weights, measures, circ), audit)


def rate_I1(g: FiniteGraph, nu) -> float:
    """Cost of ``nu`` for the simple random walk on the whole graph."""
    return dv_functional(g, g.full_mask, nu, 1.0).value


@dataclass
class AlphaValue:
    value: float
    subset: int
    detail: object = None


def _family_masks(family) -> list[int]:
    return sorted(family.members if isinstance(family, DecreasingFamily) else family)


def alpha_c_detail(g: FiniteGraph, delta: float, family, method: str = "newton") -> AlphaValue:
    """Variational exponent: least cost over subsets in the family and measures on them."""
    best = None
    for mask in _family_masks(family):
        res: DVResult = dv_infimum(g, mask, delta, method)
        if best is None or res.value < best.value - TIE:
            best = AlphaValue(max(res.value, 0.0), mask, res)
    return best


def alpha_c(g: FiniteGraph, delta: float, family) -> float:
    return alpha_c_detail(g, delta, family).value


def boundary_terms(lifted: LiftedGraph, mask: int, delta: float) -> dict[int, float]:
    """log((d - k + k delta) / (d delta)) for arcs over the edge boundary of ``mask``.

    d is the out-degree of the arc in the lifted graph and k the number of its
    out-neighbours inside ``mask``.
    """
    terms = {}
    for z in lifted.arcs_of(edge_boundary(lifted.graph, mask)):
        d = len(lifted.out[z])
        k = sum(1 for w in lifted.out[z] if mask >> (w >> 1) & 1)
        terms[z] = math.log((d - k + k * delta) / (d * delta))
    return terms


def lifted_program(lifted: LiftedGraph, mask: int, delta: float) -> tuple[FlowProgram, list]:
    """Arc-space program: simple-walk arc kernel inside ``mask`` plus boundary costs."""
    arcs = lifted.arcs_of(mask)
    index = {z: i for i, z in enumerate(arcs)}
    terms = boundary_terms(lifted, mask, delta)
    tails, heads, logp, cost = [], [], [], []
    for z in arcs:
        d = len(lifted.out[z])
        for w in lifted.out[z]:
            if w in index:
                tails.append(index[z])
                heads.append(index[w])
                logp.append(-math.log(d))
                cost.append(terms.get(z, 0.0))
    prog = FlowProgram(len(arcs), tails, heads, logp, np.zeros(len(tails), dtype=int), 1,
                       cost=np.array(cost))
    return prog, arcs


def alpha_c_boundary_detail(g: FiniteGraph, delta: float, family) -> AlphaValue:
    lifted = lift(g)
    best = None
    for mask in _family_masks(family):
        prog, arcs = lifted_program(lifted, mask, delta)
        sol = solve_program(prog)
        mu = np.zeros(lifted.n_arcs)
        mu[arcs] = prog.masses(sol.flow)[0]
        if best is None or sol.value < best.value - TIE:
            best = AlphaValue(max(sol.value, 0.0), mask, mu)
    return best


def alpha_c_boundary_form(g: FiniteGraph, delta: float, family) -> float:
    """Exponent as lifted simple-walk cost plus the boundary penalty."""
    return alpha_c_boundary_detail(g, delta, family).value


def _alpha_row(delta, g, family):
    return (delta, alpha_c(g, delta, family))


def sweep_alpha(g: FiniteGraph, family, deltas) -> list[tuple[float, float]]:
    deltas = list(deltas)
    if not deltas:
        raise ValueError("empty delta grid")
    return ordered_map(partial(_alpha_row, g=g, family=family), deltas)


def _rate_row(item, g, delta):
    param, nu = item
    r = rate_I(g, delta, nu)
    label = "" if r.sequence is None else sequence_label(g, r.sequence)
    return (param, r.value, label)


def sweep_rate(g: FiniteGraph, delta: float, nu_grid) -> list[tuple[float, float, str]]:
    """``nu_grid`` is a list of (parameter, measure) pairs."""
    nu_grid = list(nu_grid)
    if not nu_grid:
        raise ValueError("empty measure grid")
    return ordered_map(partial(_rate_row, g=g, delta=delta), nu_grid)
