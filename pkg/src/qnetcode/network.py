"""Directed acyclic k-pair instances.

A :class:`Network` is immutable once built. Every ordering it exposes is a
pure function of the declaration order of nodes and edges, so repeated runs
over the same network visit nodes and registers identically.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BadPairs,
    BadSourceFanIn,
    BadTargetDegree,
    CycleDetected,
    DanglingInternalNode,
    DuplicateNode,
    UnknownEndpoint,
    UnknownNode,
)


@dataclass(frozen=True)
class Edge:
    """A directed edge ``tail -> head``.

    Real edges carry their position in the global edge list as ``index``.
    The implicit incoming edge of the i-th source is represented with
    ``tail=None`` and ``index=i`` (1-based pair index).
    """

    tail: str | None
    head: str
    index: int

    @property
    def is_virtual(self) -> bool:
        return self.tail is None

    def __str__(self) -> str:
        if self.tail is None:
            return f"(virtual)->{self.head}"
        return f"{self.tail}->{self.head}"


@dataclass(frozen=True, eq=False)
class Network:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    pairs: tuple[tuple[str, str], ...]
    _in: dict = field(repr=False, compare=False)
    _out: dict = field(repr=False, compare=False)
    _pos: dict = field(repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (self.nodes, self.edges, self.pairs) == (other.nodes, other.edges, other.pairs)

    def __hash__(self):
        return hash((self.nodes, self.edges, self.pairs))

    # -- basic queries ----------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.pairs)

    @property
    def targets(self) -> tuple[str, ...]:
        return tuple(t for _, t in self.pairs)

    def is_source(self, v: str) -> bool:
        return v in self.sources

    def is_target(self, v: str) -> bool:
        return v in self.targets

    def source_index(self, v: str) -> int:
        """1-based pair index of source ``v``."""
        return self.sources.index(v) + 1

    def target_index(self, v: str) -> int:
        return self.targets.index(v) + 1

    @property
    def internal_nodes(self) -> tuple[str, ...]:
        ends = set(self.sources) | set(self.targets)
        return tuple(v for v in self.nodes if v not in ends)

    @property
    def output_edges(self) -> tuple[Edge, ...]:
        """The edge into each target, in pair order."""
        return tuple(self._in[t][0] for t in self.targets)

    def output_edge(self, i: int) -> Edge:
        return self.output_edges[i - 1]

    @property
    def internal_edges(self) -> tuple[Edge, ...]:
        targets = set(self.targets)
        return tuple(e for e in self.edges if e.head not in targets)

    def virtual_edge(self, i: int) -> Edge:
        return Edge(None, self.sources[i - 1], i)

    def _check(self, v: str) -> None:
        if v not in self._pos:
            raise UnknownNode(f"unknown node {v!r}")

    def incoming_edges(self, v: str) -> tuple[Edge, ...]:
        """Incoming edges of ``v`` by edge index; a source gets its virtual edge."""
        self._check(v)
        if self.is_source(v):
            return (self.virtual_edge(self.source_index(v)),)
        return self._in[v]

    def outgoing_edges(self, v: str) -> tuple[Edge, ...]:
        self._check(v)
        return self._out[v]

    def fan_in(self, v: str) -> int:
        return len(self.incoming_edges(v))

    def fan_out(self, v: str) -> int:
        return len(self.outgoing_edges(v))

    def out_position(self, e: Edge) -> int:
        """1-based position of ``e`` among the outgoing edges of its tail."""
        return self._out[e.tail].index(e) + 1

    def edge(self, tail: str, head: str) -> Edge:
        """The unique edge ``tail -> head``."""
        found = [e for e in self._out.get(tail, ()) if e.head == head]
        if not found:
            raise UnknownEndpoint(f"no edge {tail}->{head}")
        if len(found) > 1:
            raise UnknownEndpoint(f"{len(found)} parallel edges {tail}->{head}; use the edge index")
        return found[0]

    # -- orderings --------------------------------------------------------

    def topological_order(self) -> list[str]:
        """Kahn's algorithm, ties broken by node declaration order."""
        return _kahn(self.nodes, self.edges, self._pos)

    def reverse_topological_internal(self) -> list[str]:
        """Internal nodes ordered so each precedes every node feeding into it.

        Computed by Kahn's algorithm on the reversed graph restricted to
        internal nodes, ties broken by declaration order. For the butterfly
        this yields ``n3, n4, n2, n1``.
        """
        internal = set(self.internal_nodes)
        flipped = [Edge(e.head, e.tail, e.index) for e in self.edges
                   if e.tail in internal and e.head in internal]
        return _kahn(self.internal_nodes, flipped, self._pos)


def _kahn(nodes: Sequence[str], edges: Iterable[Edge], pos: dict) -> list[str]:
    indeg = {v: 0 for v in nodes}
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for e in edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    heap = [(pos[v], v) for v in nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (pos[w], w))
    if len(order) != len(indeg):
        stuck = [v for v in nodes if indeg[v] > 0]
        raise CycleDetected(f"edges: cycle through {', '.join(stuck)}")
    return order


def build_network(nodes: Sequence[str], edges: Sequence[Sequence[str]],
                  pairs: Sequence[Sequence[str]]) -> Network:
    """Validate and build a k-pair instance.

    Args:
        nodes: node names, unique.
        edges: ``(tail, head)`` pairs; list position becomes the edge index.
        pairs: ``(source, target)`` pairs in order.

    Raises:
        DuplicateNode, UnknownEndpoint, CycleDetected, BadSourceFanIn,
        BadTargetDegree, DanglingInternalNode, BadPairs.
    """
    nodes = tuple(nodes)
    pos: dict[str, int] = {}
    for i, v in enumerate(nodes):
        if not isinstance(v, str) or not v:
            raise DuplicateNode(f"nodes[{i}]: node names must be non-empty strings, got {v!r}")
        if v in pos:
            raise DuplicateNode(f"nodes[{i}]: duplicate node {v!r}")
        pos[v] = i

    edge_list = []
    for j, pair in enumerate(edges):
        tail, head = pair
        for end in (tail, head):
            if end not in pos:
                raise UnknownEndpoint(f"edges[{j}]: unknown endpoint {end!r}")
        if tail == head:
            raise CycleDetected(f"edges[{j}]: self-loop on {tail!r}")
        edge_list.append(Edge(tail, head, j))
    edge_list = tuple(edge_list)

    pair_list = []
    for j, pair in enumerate(pairs):
        s, t = pair
        for end in (s, t):
            if end not in pos:
                raise UnknownEndpoint(f"pairs[{j}]: unknown node {end!r}")
        pair_list.append((s, t))
    pair_list = tuple(pair_list)
    if not pair_list:
        raise BadPairs("pairs: at least one source-target pair is required")
    ends = [v for p in pair_list for v in p]
    if len(set(ends)) != len(ends):
        raise BadPairs("pairs: every source and target must be a distinct node")

    _kahn(nodes, edge_list, pos)

    inc: dict[str, list[Edge]] = {v: [] for v in nodes}
    out: dict[str, list[Edge]] = {v: [] for v in nodes}
    for e in edge_list:
        out[e.tail].append(e)
        inc[e.head].append(e)

    for j, (s, t) in enumerate(pair_list):
        if inc[s]:
            raise BadSourceFanIn(f"pairs[{j}]: source {s!r} has fan-in {len(inc[s])}, expected 0")
        if not out[s]:
            raise DanglingInternalNode(f"pairs[{j}]: source {s!r} has fan-out 0")
        if len(inc[t]) != 1 or out[t]:
            raise BadTargetDegree(
                f"pairs[{j}]: target {t!r} has fan-in {len(inc[t])} and fan-out "
                f"{len(out[t])}, expected 1 and 0")
    ends = set(ends)
    for v in nodes:
        if v not in ends and (not inc[v] or not out[v]):
            raise DanglingInternalNode(
                f"nodes[{pos[v]}]: internal node {v!r} has fan-in {len(inc[v])} "
                f"and fan-out {len(out[v])}; both must be nonzero")

    return Network(
        nodes=nodes,
        edges=edge_list,
        pairs=pair_list,
        _in={v: tuple(es) for v, es in inc.items()},
        _out={v: tuple(es) for v, es in out.items()},
        _pos=pos,
    )
