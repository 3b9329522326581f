"""Classical coding schemes stored as dense truth tables.

Symbols are the integers ``0..d-1``. A local code with fan-in ``m`` and
fan-out ``n`` is a ``(d**m, n)`` integer table; row ``r`` holds the outputs
for the input tuple whose base-d digits (first input most significant)
spell ``r``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    NoCodeForNode,
    NonPrimeAlphabet,
    NotAPermutation,
    SymbolOutOfRange,
    TableTooLarge,
)
from .network import Edge, Network

# default caps; both are module attributes so callers can raise them
MAX_TABLE_ROWS = 2 ** 12
MAX_INPUT_SPACE = 2 ** 20


def digits_to_index(digits: Sequence[int], d: int) -> int:
    r = 0
    for z in digits:
        r = r * d + int(z)
    return r


def index_to_digits(r: int, d: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        r, z = divmod(r, d)
        out.append(z)
    return tuple(reversed(out))


def all_digits(d: int, width: int) -> np.ndarray:
    """``(d**width, width)`` array; row r holds the big-endian digits of r."""
    r = np.arange(d ** width)
    powers = d ** np.arange(width - 1, -1, -1)
    return (r[:, None] // powers[None, :]) % d


class LocalCode:
    """The functions ``f_{v,1..n}`` of one node as a read-only truth table."""

    def __init__(self, node: str, d: int, fan_in: int, table) -> None:
        table = np.array(table, dtype=np.int64)
        if table.ndim != 2:
            raise ArityMismatch(f"{node}: truth table must be a 2-d array of rows")
        rows = d ** fan_in
        if rows > MAX_TABLE_ROWS:
            raise TableTooLarge(
                f"{node}: fan-in {fan_in} over d={d} needs {rows} rows (cap {MAX_TABLE_ROWS})")
        if table.shape[0] != rows:
            raise ArityMismatch(
                f"{node}: expected {rows} rows for d={d}, m={fan_in}, got {table.shape[0]}")
        if table.shape[1] < 1:
            raise ArityMismatch(f"{node}: truth table rows must be non-empty")
        if table.size and (table.min() < 0 or table.max() >= d):
            raise SymbolOutOfRange(f"{node}: truth table symbols must lie in 0..{d - 1}")
        table.flags.writeable = False
        self.node = node
        self.d = d
        self.fan_in = fan_in
        self.table = table

    @property
    def fan_out(self) -> int:
        return self.table.shape[1]

    def row(self, inputs: Sequence[int]) -> int:
        if len(inputs) != self.fan_in:
            raise ArityMismatch(f"{self.node}: expected {self.fan_in} inputs, got {len(inputs)}")
        for z in inputs:
            if not 0 <= z < self.d:
                raise SymbolOutOfRange(f"{self.node}: input symbol {z} outside 0..{self.d - 1}")
        return digits_to_index(inputs, self.d)

    def __call__(self, inputs: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(y) for y in self.table[self.row(inputs)])

    def output(self, ell: int, inputs: Sequence[int]) -> int:
        """``f_{v,ell}(inputs)`` with 1-based ``ell``."""
        if not 1 <= ell <= self.fan_out:
            raise ArityMismatch(f"{self.node}: output {ell} outside 1..{self.fan_out}")
        return int(self.table[self.row(inputs), ell - 1])

    def __eq__(self, other):
        if not isinstance(other, LocalCode):
            return NotImplemented
        return (self.node, self.d, self.fan_in) == (other.node, other.d, other.fan_in) and \
            np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.node, self.d, self.fan_in, self.table.shape, self.table.tobytes()))

    def __repr__(self):
        return f"LocalCode({self.node!r}, d={self.d}, m={self.fan_in}, n={self.fan_out})"


@dataclass(frozen=True, eq=False)
class CodingScheme:
    d: int
    codes: Mapping[str, LocalCode]

    def __getitem__(self, v: str) -> LocalCode:
        try:
            return self.codes[v]
        except KeyError:
            raise NoCodeForNode(f"no local code for node {v!r}") from None

    def __eq__(self, other):
        if not isinstance(other, CodingScheme):
            return NotImplemented
        return self.d == other.d and dict(self.codes) == dict(other.codes)

    def __hash__(self):
        return hash((self.d, tuple(sorted(self.codes.items()))))

    def tables(self) -> dict[str, list[list[int]]]:
        return {v: c.table.tolist() for v, c in self.codes.items()}


def build_scheme(net: Network, d: int, tables: Mapping[str, object]) -> CodingScheme:
    """Attach a truth table to every non-target node of ``net``.

    Raises:
        NoCodeForNode: a non-target node has no table, or a target has one.
        ArityMismatch: row count or column count disagrees with the node's
            effective fan-in / fan-out.
    """
    if int(d) != d or d < 2:
        raise SymbolOutOfRange(f"alphabet size must be an integer >= 2, got {d!r}")
    d = int(d)
    codes = {}
    for v in net.nodes:
        if net.is_target(v):
            if v in tables:
                raise NoCodeForNode(f"coding.{v}: targets must not carry a truth table")
            continue
        if v not in tables:
            raise NoCodeForNode(f"coding.{v}: missing truth table")
        code = LocalCode(v, d, net.fan_in(v), tables[v])
        if code.fan_out != net.fan_out(v):
            raise ArityMismatch(
                f"coding.{v}: rows have {code.fan_out} columns, node has fan-out {net.fan_out(v)}")
        codes[v] = code
    extra = set(tables) - set(net.nodes)
    if extra:
        raise NoCodeForNode(f"coding: tables for unknown nodes {sorted(extra)}")
    return CodingScheme(d, codes)


def eval_local(scheme: CodingScheme, v: str, ell: int, inputs: Sequence[int]) -> int:
    return scheme[v].output(ell, inputs)


def _check_inputs(scheme: CodingScheme, net: Network, x: Sequence[int]) -> tuple[int, ...]:
    x = tuple(int(z) for z in x)
    if len(x) != net.k:
        raise ArityMismatch(f"expected {net.k} source symbols, got {len(x)}")
    for z in x:
        if not 0 <= z < scheme.d:
            raise SymbolOutOfRange(f"source symbol {z} outside 0..{scheme.d - 1}")
    return x


def global_encoding(scheme: CodingScheme, net: Network, e: Edge, x: Sequence[int],
                    _memo: dict | None = None) -> int:
    """Symbol carried by edge ``e`` on input ``x``, by direct recursion."""
    x = _check_inputs(scheme, net, x)
    memo = {} if _memo is None else _memo

    def g(edge: Edge) -> int:
        if edge in memo:
            return memo[edge]
        v = edge.tail
        ell = net.out_position(edge)
        if net.is_source(v):
            val = eval_local(scheme, v, ell, (x[net.source_index(v) - 1],))
        else:
            val = eval_local(scheme, v, ell, [g(u) for u in net.incoming_edges(v)])
        memo[edge] = val
        return val

    return g(e)


def classical_run(scheme: CodingScheme, net: Network, x: Sequence[int]) -> dict[Edge, int]:
    """One forward pass of the scheme in topological order."""
    x = _check_inputs(scheme, net, x)
    value: dict[Edge, int] = {}
    for v in net.topological_order():
        if net.is_target(v):
            continue
        if net.is_source(v):
            inputs = (x[net.source_index(v) - 1],)
        else:
            inputs = tuple(value[e] for e in net.incoming_edges(v))
        outs = scheme[v](inputs)
        for e, y in zip(net.outgoing_edges(v), outs):
            value[e] = y
    return value


def classical_run_all(scheme: CodingScheme, net: Network) -> tuple[np.ndarray, dict[Edge, np.ndarray]]:
    """Vectorised forward pass over every input in lexicographic order.

    Returns the ``(d**k, k)`` input array and, per edge, the array of
    symbols it carries.
    """
    d, k = scheme.d, net.k
    if d ** k > MAX_INPUT_SPACE:
        raise TableTooLarge(f"d**k = {d ** k} inputs exceeds the cap {MAX_INPUT_SPACE}")
    xs = all_digits(d, k)
    value: dict[Edge, np.ndarray] = {}
    for v in net.topological_order():
        if net.is_target(v):
            continue
        if net.is_source(v):
            cols = [xs[:, net.source_index(v) - 1]]
        else:
            cols = [value[e] for e in net.incoming_edges(v)]
        rows = np.zeros(len(xs), dtype=np.int64)
        for c in cols:
            rows = rows * d + c
        out = scheme[v].table[rows]
        for ell, e in enumerate(net.outgoing_edges(v)):
            value[e] = out[:, ell]
    return xs, value


@dataclass(frozen=True)
class Counterexample:
    """First failing input (lexicographic) and what each target received."""

    x: tuple[int, ...]
    target: int
    received: int
    failures: tuple[tuple[int, int], ...]  # (target index, received) for every failing target

    def __str__(self):
        parts = ", ".join(f"target {i} received {r}" for i, r in self.failures)
        return f"x=({','.join(map(str, self.x))}) {parts}"


def verify_solution(scheme: CodingScheme, net: Network) -> tuple[bool, Counterexample | None]:
    """Exhaustively check that every target ``t_i`` receives ``x_i``.

    On failure the counterexample is the first input in lexicographic order,
    with the lowest failing target index as ``target``.
    """
    xs, value = classical_run_all(scheme, net)
    got = np.stack([value[e] for e in net.output_edges], axis=1)
    bad = got != xs
    rows = np.flatnonzero(bad.any(axis=1))
    if rows.size == 0:
        return True, None
    r = int(rows[0])
    fails = tuple((int(i) + 1, int(got[r, i])) for i in np.flatnonzero(bad[r]))
    return False, Counterexample(tuple(int(z) for z in xs[r]), fails[0][0], fails[0][1], fails)


def _as_perm(p, d: int, where: str) -> np.ndarray:
    arr = np.asarray(p, dtype=np.int64)
    if arr.shape != (d,) or sorted(arr.tolist()) != list(range(d)):
        raise NotAPermutation(f"{where}: {list(np.ravel(p))} is not a permutation of 0..{d - 1}")
    return arr


def compose_with_edge_bijections(scheme: CodingScheme, net: Network,
                                 perms: Mapping[Edge, Sequence[int]]) -> CodingScheme:
    """Relabel the symbols on chosen edges by bijections.

    The producer of edge ``e`` emits ``perms[e][old]`` and every consumer
    undoes it before applying its old function, so solutions stay solutions.
    Output edges feed targets, which cannot decode, so their permutations
    must be the identity.
    """
    d = scheme.d
    fwd: dict[Edge, np.ndarray] = {}
    for e, p in perms.items():
        arr = _as_perm(p, d, f"edge {e}")
        if e.is_virtual or e not in net.edges:
            raise NotAPermutation(f"edge {e} is not an edge of the network")
        if net.is_target(e.head) and not np.array_equal(arr, np.arange(d)):
            raise NotAPermutation(f"edge {e} feeds a target; only the identity is allowed there")
        fwd[e] = arr
    inv = {e: np.argsort(p) for e, p in fwd.items()}

    codes = {}
    for v, code in scheme.codes.items():
        m = code.fan_in
        digits = all_digits(d, m)
        for j, e in enumerate(net.incoming_edges(v)):
            if e in inv:
                digits[:, j] = inv[e][digits[:, j]]
        old_rows = digits @ (d ** np.arange(m - 1, -1, -1))
        table = code.table[old_rows].copy()
        for ell, e in enumerate(net.outgoing_edges(v)):
            if e in fwd:
                table[:, ell] = fwd[e][table[:, ell]]
        codes[v] = LocalCode(v, d, m, table)
    return CodingScheme(d, codes)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


def is_linear(scheme: CodingScheme, net: Network | None = None) -> bool:
    """True iff every local function is F_d-linear in its inputs.

    A map is linear iff it equals the combination of its values on unit
    vectors, which is what gets checked here across every row; that is
    equivalent to exhausting additivity and homogeneity.
    """
    d = scheme.d
    if not _is_prime(d):
        raise NonPrimeAlphabet(f"linearity over F_d needs prime d, got {d}")
    for code in scheme.codes.values():
        m = code.fan_in
        digits = all_digits(d, m)
        if np.any(code.table[0] != 0):
            return False
        units = d ** np.arange(m - 1, -1, -1)  # row index of each unit vector
        coeff = code.table[units]             # (m, n)
        if not np.array_equal((digits @ coeff) % d, code.table):
            return False
    return True


def random_permutations(net: Network, d: int, rng, edges: Sequence[Edge] | None = None) -> dict[Edge, list[int]]:
    """Uniformly random bijection per internal edge (identity on output edges)."""
    chosen = net.internal_edges if edges is None else edges
    return {e: rng.permutation(d).tolist() for e in chosen}


def input_tuples(d: int, k: int):
    return itertools.product(range(d), repeat=k)
