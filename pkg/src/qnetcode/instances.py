"""Ready-made k-pair instances with solutions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .coding import CodingScheme, all_digits, build_scheme
from .network import Network, build_network

BUTTERFLY_NODES = ["s1", "s2", "n1", "n2", "n3", "n4", "t1", "t2"]
# edge order fixes the register labels R1..R7 of the worked butterfly trace:
# R1=(s1,n3) R2=(s1,n1) R3=(s2,n4) R4=(s2,n1) R5=(n1,n2) R6=(n2,n3) R7=(n2,n4)
BUTTERFLY_EDGES = [
    ("s1", "n3"), ("s1", "n1"), ("s2", "n4"), ("s2", "n1"),
    ("n1", "n2"), ("n2", "n3"), ("n2", "n4"),
    ("n4", "t1"), ("n3", "t2"),
]
BUTTERFLY_PAIRS = [("s1", "t1"), ("s2", "t2")]

# outcome names used in the worked butterfly trace
BUTTERFLY_ALIASES = {
    "a1": "edge:s1>n3", "a2": "edge:n2>n3",
    "b1": "edge:s2>n4", "b2": "edge:n2>n4",
    "c": "edge:n1>n2",
    "d1": "edge:s1>n1", "d2": "edge:s2>n1",
    "e1": "src:1", "e2": "src:2",
}


def _table(d: int, m: int, fn) -> list[list[int]]:
    return [[int(y) % d for y in fn(*row)] for row in all_digits(d, m)]


def butterfly(d: int = 2) -> tuple[Network, CodingScheme]:
    """Butterfly network with the sum/difference solution over Z_d.

    For d = 2 this is the XOR scheme: sources and n2 copy, n1 adds, n3 and
    n4 subtract the side input (the same as adding when d = 2).
    """
    net = build_network(BUTTERFLY_NODES, BUTTERFLY_EDGES, BUTTERFLY_PAIRS)
    copy2 = _table(d, 1, lambda y: (y, y))
    tables = {
        "s1": copy2,
        "s2": copy2,
        "n1": _table(d, 2, lambda y1, y2: (y1 + y2,)),
        "n2": copy2,
        "n3": _table(d, 2, lambda x1, s: (s - x1,)),   # inputs (s1,n3), (n2,n3)
        "n4": _table(d, 2, lambda x2, s: (s - x2,)),   # inputs (s2,n4), (n2,n4)
    }
    return net, build_scheme(net, d, tables)


def identity(d: int = 2) -> tuple[Network, CodingScheme]:
    net = build_network(["s1", "t1"], [("s1", "t1")], [("s1", "t1")])
    return net, build_scheme(net, d, {"s1": _table(d, 1, lambda y: (y,))})


def chain(d: int = 3, perm: Sequence[int] | None = None) -> tuple[Network, CodingScheme]:
    """``s1 -> a -> t1``; s1 applies ``perm`` and a undoes it."""
    perm = list(range(1, d)) + [0] if perm is None else list(perm)
    inv = list(np.argsort(perm))
    net = build_network(["s1", "a", "t1"], [("s1", "a"), ("a", "t1")], [("s1", "t1")])
    tables = {"s1": [[perm[y]] for y in range(d)], "a": [[int(inv[y])] for y in range(d)]}
    return net, build_scheme(net, d, tables)


def random_instance(rng, d: int = 2, k: int = 2, extra_nodes: int = 2,
                    extra_edges: int = 3, max_fan_in: int = 3) -> tuple[Network, CodingScheme]:
    """A random solvable instance with a generally nonlinear solution.

    Each pair gets a chain ``s_i -> c_i -> t_i``; the chain symbol is
    scrambled by a random bijection on every hop and unscrambled by the next
    node. Extra "mixer" nodes and side edges carry arbitrary random
    functions of their inputs, which the chain nodes receive but ignore.
    All edges respect one random total order, so the graph is acyclic.
    """
    sources = [f"s{i}" for i in range(1, k + 1)]
    relays = [f"c{i}" for i in range(1, k + 1)]
    targets = [f"t{i}" for i in range(1, k + 1)]
    mixers = [f"m{j}" for j in range(1, extra_nodes + 1)]

    # sources first, targets last, relays and mixers shuffled between them;
    # the last middle node is a relay so every mixer has somewhere to send
    middle = relays + mixers
    middle = [middle[i] for i in rng.permutation(len(middle))]
    if middle[-1] not in relays:
        j = next(i for i, v in enumerate(middle) if v in relays)
        middle[j], middle[-1] = middle[-1], middle[j]
    order = sources + middle + targets
    rank = {v: i for i, v in enumerate(order)}

    edges = [(s, c) for s, c in zip(sources, relays)] + [(c, t) for c, t in zip(relays, targets)]
    fan_in = {v: 0 for v in order}
    for _, h in edges:
        fan_in[h] += 1
    for m in mixers:
        earlier = [v for v in sources + middle if rank[v] < rank[m]]
        later = [v for v in middle if rank[v] > rank[m]]
        src = earlier[rng.integers(len(earlier))]
        dst = later[rng.integers(len(later))]
        edges += [(src, m), (m, dst)]
        fan_in[m] += 1
        fan_in[dst] += 1
    for _ in range(extra_edges):
        u, w = sorted(rng.choice(len(order), size=2, replace=False))
        tail, head = order[u], order[w]
        if (head in sources or head in targets or tail in targets
                or fan_in[head] >= max_fan_in or (tail, head) in edges):
            continue
        edges.append((tail, head))
        fan_in[head] += 1
    nodes = order
    # edges are declared in a shuffled order to exercise arbitrary orderings
    edges = [edges[i] for i in rng.permutation(len(edges))]
    net = build_network(nodes, edges, list(zip(sources, targets)))

    chain_in = {}     # node -> position of its chain input among incoming edges
    scramble = {}     # chain edge -> permutation applied by its producer
    for s, c, t in zip(sources, relays, targets):
        e1, e2 = net.edge(s, c), net.edge(c, t)
        scramble[e1] = rng.permutation(d)
        scramble[e2] = np.arange(d)
        chain_in[c] = net.incoming_edges(c).index(e1)

    tables = {}
    for v in net.nodes:
        if net.is_target(v):
            continue
        m = net.fan_in(v)
        rows = all_digits(d, m)
        outs = net.outgoing_edges(v)
        table = rng.integers(0, d, size=(d ** m, len(outs)))
        if net.is_source(v):
            carried = rows[:, 0]
        elif v in chain_in:
            e_in = net.incoming_edges(v)[chain_in[v]]
            carried = np.argsort(scramble[e_in])[rows[:, chain_in[v]]]
        else:
            carried = None
        for ell, e in enumerate(outs):
            if e in scramble:
                table[:, ell] = scramble[e][carried]
        tables[v] = table.tolist()
    return net, build_scheme(net, d, tables)
