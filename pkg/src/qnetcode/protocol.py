"""Quantum k-pair transmission by simulating a classical coding scheme.

The run has three parts:

1. every non-target node, in topological order, allocates one register per
   outgoing edge and applies ``U_f`` of its local code;
2. every internal node, in reverse topological order, measures its incoming
   edge registers in the Fourier basis and sends each outcome back along
   the edge, where the upstream node removes the phase with ``Y_v``;
3. the sources measure ``S_i`` in the Fourier basis, the outcomes are routed
   forward with the same classical scheme, and each target removes the
   last phase with ``Z_i``.

EPR sharing runs parts 1 and 2 on uniform superpositions of the sources.
Every register and symbol that crosses an edge is written to a
:class:`CommLedger`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from . import qstate
from .coding import CodingScheme, classical_run, verify_solution
from .errors import SchemeNotASolution, StillEntangled
from .network import Edge, Network
from .qstate import Register, StateVector

FIDELITY_TOL = 1e-9

FORWARD, REVERSE = "Forward", "Reverse"
PART2, PART3 = "Part2", "Part3"


@dataclass(frozen=True)
class QuantumSend:
    edge: Edge
    register: Register


@dataclass(frozen=True)
class ClassicalSend:
    edge: Edge
    direction: str
    symbol: int
    phase: str


@dataclass
class CommLedger:
    quantum_sends: list[QuantumSend] = field(default_factory=list)
    classical_sends: list[ClassicalSend] = field(default_factory=list)

    def count(self, direction: str | None = None, phase: str | None = None) -> int:
        return sum(1 for c in self.classical_sends
                   if (direction is None or c.direction == direction)
                   and (phase is None or c.phase == phase))

    def classical_bits(self, d: int) -> int:
        return len(self.classical_sends) * bits_per_symbol(d)

    def per_edge(self) -> dict[Edge, dict[str, int]]:
        """Classical symbol counts per edge and direction."""
        out: dict[Edge, dict[str, int]] = {}
        for c in self.classical_sends:
            row = out.setdefault(c.edge, {FORWARD: 0, REVERSE: 0})
            row[c.direction] += 1
        return out

    def check(self, net: Network) -> list[str]:
        """Problems with the ledger's shape; empty when it obeys the accounting."""
        problems = []
        part2 = [c for c in self.classical_sends if c.phase == PART2]
        part3 = [c for c in self.classical_sends if c.phase == PART3]
        if any(c.direction != REVERSE for c in part2):
            problems.append("a Part2 send is not Reverse")
        if any(c.direction != FORWARD for c in part3):
            problems.append("a Part3 send is not Forward")
        p2_edges = [c.edge for c in part2]
        if part2 and sorted(p2_edges, key=lambda e: e.index) != list(net.internal_edges):
            problems.append("Part2 sends do not cover each internal edge exactly once")
        p3_edges = [c.edge for c in part3]
        if len(set(p3_edges)) != len(p3_edges):
            problems.append("an edge carries two Part3 symbols")
        for c in self.classical_sends:
            if c.edge.is_virtual or c.edge not in net.edges:
                problems.append(f"send on unknown edge {c.edge}")
        if len(self.quantum_sends) > len(net.edges):
            problems.append("more quantum sends than edges")
        return problems


def bits_per_symbol(d: int) -> int:
    return max(1, math.ceil(math.log2(d)))


def classical_bound_bits(net: Network, d: int) -> int:
    """At most one symbol per edge in each direction."""
    return 2 * len(net.edges) * bits_per_symbol(d)


@lru_cache(maxsize=128)
def _verified(scheme: CodingScheme, net: Network):
    return verify_solution(scheme, net)


def require_solution(scheme: CodingScheme, net: Network) -> None:
    ok, cex = _verified(scheme, net)
    if not ok:
        raise SchemeNotASolution(f"scheme does not solve the instance: {cex}")


def register_for(net: Network, e: Edge) -> Register:
    """Register carried by ``e``: ``S_i`` on virtual edges, ``T_i`` into targets."""
    if e.is_virtual:
        return qstate.source(e.index)
    if net.is_target(e.head):
        return qstate.target(net.target_index(e.head))
    return qstate.edge_reg(e.index)


def random_input(d: int, k: int, rng) -> np.ndarray:
    """Complex-Gaussian amplitudes, normalised."""
    v = rng.standard_normal(d ** k) + 1j * rng.standard_normal(d ** k)
    return v / np.linalg.norm(v)


def maximally_entangled(d: int, k: int) -> np.ndarray:
    """``(sum_j |j>|j>)/sqrt(d)`` per pair, registers ordered S1,T1,S2,T2,..."""
    pair = np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)
    out = np.ones(1, dtype=complex)
    for _ in range(k):
        out = np.kron(out, pair)
    return out


@dataclass
class ProtocolRun:
    """Everything one execution needs.

    Args:
        net, scheme: the instance and a classical solution for it.
        input_amps: amplitudes of ``|psi_S>`` over ``S_1..S_k``; ``None`` for
            EPR sharing.
        seed: seeds the generator used for every unforced outcome. Each
            measurement consumes exactly one ``random()`` draw, in protocol
            order.
        forced: Part 2 outcomes keyed by :class:`Edge`, Part 3 outcomes by
            1-based source index.
        part2_order: override for the internal-node order (not validated as
            reverse topological, so violations can be exercised).
        observer: called as ``observer(label, state)`` at every stage boundary.
    """

    net: Network
    scheme: CodingScheme
    input_amps: np.ndarray | None = None
    seed: int = 0
    forced: Mapping[Edge | int, int] = field(default_factory=dict)
    part2_order: Sequence[str] | None = None
    observer: Callable[[str, StateVector], None] | None = None
    cap: int | None = None
    state: StateVector | None = None
    ledger: CommLedger = field(default_factory=CommLedger)
    outcomes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)
        if self.input_amps is not None:
            self.input_amps = np.asarray(self.input_amps, dtype=complex).reshape(-1)
            self.state = qstate.init_state(self.scheme.d, self.net.k, self.input_amps, cap=self.cap)

    @property
    def d(self) -> int:
        return self.scheme.d

    def _emit(self, label: str) -> None:
        if self.observer is not None:
            self.observer(label, self.state)

    def _measure(self, reg: Register, key) -> int:
        a = self.state.measure_fourier(reg, forced=self.forced.get(key), rng=self.rng)
        self.outcomes[key] = a
        return a


def run_part1(run: ProtocolRun) -> None:
    """Quantum simulation of the classical scheme, node by node."""
    require_solution(run.scheme, run.net)
    net, st = run.net, run.state
    for v in net.topological_order():
        if net.is_target(v):
            continue
        ins = [register_for(net, e) for e in net.incoming_edges(v)]
        outs = [register_for(net, e) for e in net.outgoing_edges(v)]
        for r in outs:
            st.alloc(r)
        st.apply_encoding(ins, outs, run.scheme[v])
        for e, r in zip(net.outgoing_edges(v), outs):
            run.ledger.quantum_sends.append(QuantumSend(e, r))
        run._emit(f"part1:{v}")
    run._emit("part1:done")


def run_part2(run: ProtocolRun) -> None:
    """Disentangle every edge register owned by an internal node.

    Raises:
        StillEntangled: a register's phase can no longer be corrected because
            the upstream node has already disposed of its own inputs, which
            happens exactly when the node order is not reverse topological.
    """
    net, st = run.net, run.state
    order = list(run.part2_order) if run.part2_order is not None else net.reverse_topological_internal()
    if sorted(order) != sorted(net.internal_nodes):
        raise ValueError(f"part2 order {order} is not a permutation of the internal nodes")
    for w in order:
        incoming = net.incoming_edges(w)
        for e in incoming:
            needed = [register_for(net, u) for u in net.incoming_edges(e.tail)]
            gone = [r for r in needed if r not in st.registers]
            if gone:
                probs = st.marginal(register_for(net, e))
                residual = float(probs.sum() - probs.max())
                raise StillEntangled(
                    f"register {register_for(net, e)} on {e} cannot be disentangled: "
                    f"{e.tail} no longer holds {', '.join(map(str, gone))}", residual)
        outcomes = [run._measure(register_for(net, e), e) for e in incoming]
        run._emit(f"part2:{w}:measured")
        for e, a in zip(incoming, outcomes):
            v = e.tail
            run.ledger.classical_sends.append(ClassicalSend(e, REVERSE, a, PART2))
            st.drop(register_for(net, e))
            ins = [register_for(net, u) for u in net.incoming_edges(v)]
            st.apply_phase_y(ins, run.scheme[v], net.out_position(e), a)
        run._emit(f"part2:{w}:corrected")
    run._emit("part2:done")


def part3_edges(net: Network) -> list[Edge]:
    """Edges that carry a Forward symbol in Part 3.

    The outcomes travel over the internal edges exactly as the classical
    scheme routes them. The tail of an output edge already has what its
    target needs from that routing, so only output edges leaving a source
    carry an extra symbol.
    """
    return [e for e in net.edges if not net.is_target(e.head) or net.is_source(e.tail)]


def run_part3(run: ProtocolRun) -> None:
    """Remove the source registers and correct the targets' phases."""
    net, st = run.net, run.state
    k = net.k
    b = [run._measure(qstate.source(i), i) for i in range(1, k + 1)]
    run._emit("part3:measured")
    for i in range(1, k + 1):
        st.drop(qstate.source(i))
    routed = classical_run(run.scheme, net, b)
    for e in part3_edges(net):
        run.ledger.classical_sends.append(ClassicalSend(e, FORWARD, routed[e], PART3))
    for i in range(1, k + 1):
        st.apply_phase_z(qstate.target(i), routed[net.output_edge(i)])
    run._emit("part3:final")


@dataclass
class RunReport:
    mode: str                 # "full" or "epr"
    d: int
    fidelity: float
    ledger: CommLedger
    quantum_sends: int
    classical_bits: int
    bound_bits: int
    wall_time: float
    outcomes: dict
    pair_fidelities: list[float] = field(default_factory=list)
    extension: bool = False   # EPR sharing over d > 2

    @property
    def reverse_sends(self) -> int:
        return self.ledger.count(REVERSE)

    @property
    def forward_sends(self) -> int:
        return self.ledger.count(FORWARD)

    @property
    def bound_ok(self) -> bool:
        return self.classical_bits <= self.bound_bits

    @property
    def success(self) -> bool:
        ok = self.fidelity >= 1 - FIDELITY_TOL and self.bound_ok
        if self.mode == "epr":
            ok = ok and self.forward_sends == 0 and all(f >= 1 - FIDELITY_TOL for f in self.pair_fidelities)
        return ok

    def per_edge_totals(self) -> dict[Edge, dict[str, int]]:
        return self.ledger.per_edge()

    def to_text(self) -> str:
        """Structured report; deliberately omits wall time so reruns are identical."""
        lines = [f"mode: {self.mode}", f"alphabet: {self.d}", f"fidelity: {self.fidelity:.9f}"]
        for i, f in enumerate(self.pair_fidelities, 1):
            lines.append(f"pair {i} fidelity: {f:.9f}")
        lines.append(f"quantum: {self.quantum_sends} registers sent")
        if self.bound_ok:
            lines.append(f"classical: {self.classical_bits} bits ≤ {self.bound_bits} (bound OK)")
        else:
            lines.append(f"classical: {self.classical_bits} bits > {self.bound_bits} (bound VIOLATED)")
        lines.append(f"reverse: {self.reverse_sends} symbols")
        lines.append(f"forward: {self.forward_sends} symbols")
        lines.append("ledger:")
        for c in self.ledger.classical_sends:
            lines.append(f"{c.edge}\t{c.direction}\t{c.phase}\t{c.symbol}")
        lines.append("per-edge (forward, reverse):")
        for e, row in sorted(self.per_edge_totals().items(), key=lambda kv: kv[0].index):
            lines.append(f"{e}\t{row[FORWARD]}\t{row[REVERSE]}")
        return "\n".join(lines)


def _report(run: ProtocolRun, mode: str, fid: float, t0: float, pair_fids=()) -> RunReport:
    return RunReport(
        mode=mode,
        d=run.d,
        fidelity=fid,
        ledger=run.ledger,
        quantum_sends=len(run.ledger.quantum_sends),
        classical_bits=run.ledger.classical_bits(run.d),
        bound_bits=classical_bound_bits(run.net, run.d),
        wall_time=time.perf_counter() - t0,
        outcomes=dict(run.outcomes),
        pair_fidelities=list(pair_fids),
        extension=(mode == "epr" and run.d > 2),
    )


def run_full(run: ProtocolRun) -> RunReport:
    """Transmit ``input_amps`` from the sources to the targets."""
    t0 = time.perf_counter()
    require_solution(run.scheme, run.net)
    if run.state is None:
        raise ValueError("run_full needs input amplitudes")
    run_part1(run)
    run_part2(run)
    run_part3(run)
    order = [qstate.target(i) for i in range(1, run.net.k + 1)]
    fid = run.state.fidelity(run.input_amps, order)
    return _report(run, "full", fid, t0)


def run_epr(run: ProtocolRun) -> RunReport:
    """Share one maximally entangled pair per source-target pair."""
    t0 = time.perf_counter()
    require_solution(run.scheme, run.net)
    k, d = run.net.k, run.d
    run.state = StateVector(d, cap=run.cap)
    for i in range(1, k + 1):
        run.state.alloc(qstate.source(i))
        run.state.apply_fourier(qstate.source(i))
    run._emit("epr:prepared")
    run_part1(run)
    run_part2(run)
    order = [r for i in range(1, k + 1) for r in (qstate.source(i), qstate.target(i))]
    fid = run.state.fidelity(maximally_entangled(d, k), order)
    return _report(run, "epr", fid, t0, pair_fidelities(run.state, k))


def pair_fidelities(state: StateVector, k: int) -> list[float]:
    """Root fidelity of each reduced ``(S_i, T_i)`` state with the ideal pair."""
    phi = maximally_entangled(state.d, 1)
    out = []
    for i in range(1, k + 1):
        rho = state.reduced_density([qstate.source(i), qstate.target(i)])
        out.append(float(min(1.0, math.sqrt(max(0.0, np.vdot(phi, rho @ phi).real)))))
    return out


def pair_purity(state: StateVector, i: int) -> float:
    """``tr(rho^2)`` of pair i; 1 means the pair is unentangled from the rest."""
    rho = state.reduced_density([qstate.source(i), qstate.target(i)])
    return float(np.real(np.trace(rho @ rho)))


def transmit(net: Network, scheme: CodingScheme, input_amps, seed: int = 0,
             forced: Mapping | None = None) -> tuple[RunReport, StateVector]:
    """Convenience wrapper: build a run, execute it, return report and final state."""
    run = ProtocolRun(net, scheme, input_amps=input_amps, seed=seed, forced=dict(forced or {}))
    report = run_full(run)
    return report, run.state
