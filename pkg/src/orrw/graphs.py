"""Finite graphs, connected edge subsets and the lifted arc graph.

Edge subsets are plain ``int`` bit masks: bit ``i`` set means edge ``i`` is a
member.  Vertices are renumbered so that the start vertex has index 0.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

MAX_EDGES_FAMILY = 20
MAX_EDGES_SEQUENCES = 10


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGraph:
    """Simple connected undirected graph with a distinguished start vertex.

    ``edges[i] = (u, v)`` with ``u < v`` in vertex order.  ``adjacency[x]`` lists
    ``(neighbour, edge index)`` pairs in edge-index order.
    """

    labels: tuple
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[tuple[int, int], ...], ...]
    start: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.edges)) - 1

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])

    def index_of(self, label: Hashable) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GraphError(f"unknown vertex label {label!r}") from None

    def edge_index(self, u: int, v: int) -> int:
        for y, e in self.adjacency[u]:
            if y == v:
                return e
        raise GraphError(f"no edge between {u} and {v}")

    def edge_label(self, e: int) -> str:
        u, v = self.edges[e]
        return f"{self.labels[u]}-{self.labels[v]}"


def build_graph(edge_pairs: Iterable[tuple[Hashable, Hashable]], start: Hashable) -> FiniteGraph:
    """Validate an edge list and return a graph with ``start`` as vertex 0."""
    pairs = [tuple(p) for p in edge_pairs]
    if len(pairs) < 2:
        raise GraphError("at least two edges are required")
    order: list = []
    seen = set()
    for p in pairs:
        if len(p) != 2:
            raise GraphError(f"malformed edge {p!r}")
        for lab in p:
            if lab not in seen:
                seen.add(lab)
                order.append(lab)
    if start not in seen:
        raise GraphError(f"start vertex {start!r} is not on any edge")
    order.remove(start)
    labels = (start, *order)
    index = {lab: i for i, lab in enumerate(labels)}

    edges = []
    present = set()
    for a, b in pairs:
        if a == b:
            raise GraphError(f"loop at {a!r}")
        u, v = sorted((index[a], index[b]))
        if (u, v) in present:
            raise GraphError(f"parallel edge {a!r}-{b!r}")
        present.add((u, v))
        edges.append((u, v))

    adj: list[list[tuple[int, int]]] = [[] for _ in labels]
    for e, (u, v) in enumerate(edges):
        adj[u].append((v, e))
        adj[v].append((u, e))

    # connectivity by BFS from the start vertex
    reached = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y, _ in adj[x]:
            if y not in reached:
                reached.add(y)
                queue.append(y)
    if len(reached) != len(labels):
        raise GraphError("graph is disconnected")

    return FiniteGraph(tuple(labels), tuple(edges), tuple(tuple(a) for a in adj), 0)


def read_edge_file(path, start: str) -> FiniteGraph:
    """Read one edge per line (two whitespace-separated labels, '#' comments)."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphError(f"{path}:{lineno}: expected two vertex labels")
            pairs.append((parts[0], parts[1]))
    return build_graph(pairs, start)


# -- edge subsets -----------------------------------------------------------

def mask_edges(mask: int) -> list[int]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def mask_of(edges: Iterable[int]) -> int:
    m = 0
    for e in edges:
        m |= 1 << e
    return m


def vertex_set(g: FiniteGraph, mask: int) -> list[int]:
    """Sorted endpoints of the edges in ``mask``."""
    vs = set()
    for e in mask_edges(mask):
        vs.update(g.edges[e])
    return sorted(vs)


def is_connected_subset(g: FiniteGraph, mask: int) -> bool:
    edges = mask_edges(mask)
    if not edges:
        return False
    incident: dict[int, list[int]] = {}
    for e in edges:
        for x in g.edges[e]:
            incident.setdefault(x, []).append(e)
    seen = {edges[0]}
    queue = deque([edges[0]])
    while queue:
        e = queue.popleft()
        for x in g.edges[e]:
            for f in incident[x]:
                if f not in seen:
                    seen.add(f)
                    queue.append(f)
    return len(seen) == len(edges)


def in_S(g: FiniteGraph, mask: int) -> bool:
    """Connected, non-empty, and touching the start vertex."""
    if mask <= 0 or mask > g.full_mask:
        return False
    if not any(mask >> e & 1 for _, e in g.adjacency[g.start]):
        return False
    return is_connected_subset(g, mask)


def _edge_neighbours(g: FiniteGraph) -> list[int]:
    """For each edge, the mask of edges sharing an endpoint with it."""
    nb = []
    for e, (u, v) in enumerate(g.edges):
        m = 0
        for x in (u, v):
            for _, f in g.adjacency[x]:
                if f != e:
                    m |= 1 << f
        nb.append(m)
    return nb


def _touching(g: FiniteGraph, mask: int, nb: list[int]) -> int:
    out = 0
    for e in mask_edges(mask):
        out |= nb[e]
    return out & ~mask


def enumerate_S(g: FiniteGraph) -> list[int]:
    """All connected edge subsets containing an edge at the start, ascending."""
    if g.n_edges > MAX_EDGES_FAMILY:
        raise GraphError(f"subset enumeration limited to {MAX_EDGES_FAMILY} edges")
    nb = _edge_neighbours(g)
    found = set()
    stack = [1 << e for _, e in g.adjacency[g.start]]
    found.update(stack)
    while stack:
        m = stack.pop()
        grow = _touching(g, m, nb)
        while grow:
            low = grow & -grow
            grow ^= low
            m2 = m | low
            if m2 not in found:
                found.add(m2)
                stack.append(m2)
    return sorted(found)


@dataclass(frozen=True)
class DecreasingFamily:
    """Downward closed (within the connected start subsets) family of masks."""

    graph: FiniteGraph = field(repr=False)
    members: frozenset

    def __contains__(self, mask: int) -> bool:
        return mask in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def is_everything(self) -> bool:
        """True when the full edge set belongs to the family."""
        return self.graph.full_mask in self.members


def cover_family(g: FiniteGraph) -> DecreasingFamily:
    """Every connected start subset except the full edge set."""
    full = g.full_mask
    return DecreasingFamily(g, frozenset(m for m in enumerate_S(g) if m != full))


def is_decreasing(family: Iterable[int] | DecreasingFamily, g: FiniteGraph) -> bool:
    members = set(family.members if isinstance(family, DecreasingFamily) else family)
    if not members:
        raise GraphError("family must be non-empty")
    for m in members:
        if not in_S(g, m):
            raise GraphError(f"subset {mask_edges(m)} is not a connected start subset")
    # removing one edge at a time reaches every smaller member
    for m in members:
        for e in mask_edges(m):
            sub = m & ~(1 << e)
            if sub and in_S(g, sub) and sub not in members:
                return False
    return True


def make_family(g: FiniteGraph, masks: Iterable[int], close: bool = False) -> DecreasingFamily:
    """Validate ``masks`` as a decreasing family, optionally closing it downward."""
    members = set(masks)
    if close:
        members = downward_closure(g, members)
    if not is_decreasing(members, g):
        raise GraphError("family is not closed downward")
    return DecreasingFamily(g, frozenset(members))


def downward_closure(g: FiniteGraph, masks: Iterable[int]) -> set[int]:
    out = set()
    stack = list(masks)
    while stack:
        m = stack.pop()
        if m in out:
            continue
        if not in_S(g, m):
            raise GraphError(f"subset {mask_edges(m)} is not a connected start subset")
        out.add(m)
        for e in mask_edges(m):
            sub = m & ~(1 << e)
            if sub and in_S(g, sub):
                stack.append(sub)
    return out


def full_family(g: FiniteGraph) -> DecreasingFamily:
    return DecreasingFamily(g, frozenset(enumerate_S(g)))


# -- growth sequences ---------------------------------------------------------

def enumerate_growth_sequences(g: FiniteGraph, anchor: int | None = None) -> list[tuple[int, ...]]:
    """All orders in which edges can be first traversed, as tuples of nested masks.

    Stage ``k`` has ``k + 1`` edges, the first touches the start vertex and each
    new edge touches the previous stage.  Output is lexicographic in the order
    edges are added.
    """
    b = g.n_edges
    if b > MAX_EDGES_SEQUENCES:
        raise GraphError(f"sequence enumeration limited to {MAX_EDGES_SEQUENCES} edges")
    firsts = sorted(e for _, e in g.adjacency[g.start])
    if anchor is not None:
        if anchor not in firsts:
            raise GraphError("anchor edge must touch the start vertex")
        firsts = [anchor]
    nb = _edge_neighbours(g)
    out: list[tuple[int, ...]] = []

    def extend(stages: list[int]) -> None:
        m = stages[-1]
        if len(stages) == b:
            out.append(tuple(stages))
            return
        for e in mask_edges(_touching(g, m, nb)):
            stages.append(m | 1 << e)
            extend(stages)
            stages.pop()

    for e in firsts:
        extend([1 << e])
    return out


def sequence_edges(seq: Sequence[int]) -> list[int]:
    """Edge added at each stage of a growth sequence."""
    out = []
    prev = 0
    for m in seq:
        out.append((m & ~prev).bit_length() - 1)
        prev = m
    return out


# -- lifted graph ---------------------------------------------------------------

@dataclass(frozen=True)
class LiftedGraph:
    """Directed graph on oriented edges.

    Arc ``2e`` is edge ``e`` with orientation +1 (head is the larger endpoint),
    arc ``2e + 1`` has orientation -1.  ``z1 -> z2`` iff ``head(z1) == tail(z2)``.
    """

    graph: FiniteGraph = field(repr=False)
    head: tuple[int, ...]
    tail: tuple[int, ...]
    out: tuple[tuple[int, ...], ...]

    @property
    def n_arcs(self) -> int:
        return len(self.head)

    @staticmethod
    def edge(z: int) -> int:
        return z >> 1

    @staticmethod
    def sign(z: int) -> int:
        return -1 if z & 1 else 1

    def arcs_of(self, mask: int) -> list[int]:
        out = []
        for e in mask_edges(mask):
            out.extend((2 * e, 2 * e + 1))
        return out


def lift(g: FiniteGraph) -> LiftedGraph:
    head, tail = [], []
    for u, v in g.edges:
        head += [v, u]
        tail += [u, v]
    leaving: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for z, t in enumerate(tail):
        leaving[t].append(z)
    out = tuple(tuple(leaving[h]) for h in head)
    return LiftedGraph(g, tuple(head), tuple(tail), out)


def arc_between(g: FiniteGraph, x: int, y: int) -> int:
    """Arc index of the oriented edge x -> y."""
    e = g.edge_index(x, y)
    return 2 * e if g.edges[e][1] == y else 2 * e + 1


def edge_boundary(g: FiniteGraph, mask: int) -> int:
    """Edges of ``mask`` sharing an endpoint with some edge outside it."""
    outside = g.full_mask & ~mask
    nb = _edge_neighbours(g)
    return mask_of(e for e in mask_edges(mask) if nb[e] & outside)


def lifted_boundary(lifted: LiftedGraph, mask: int) -> set[int]:
    """Arcs of ``mask`` with an out-neighbour leaving ``mask``."""
    return {z for z in lifted.arcs_of(mask)
            if any(not mask >> (w >> 1) & 1 for w in lifted.out[z])}
