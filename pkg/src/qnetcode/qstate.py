"""Dense state vectors over a dynamic set of d-dimensional registers.

Registers are ordered by allocation; amplitude index ``r`` spells the
register values in base d with the first active register most significant.
Only the handful of operators the coding protocol needs are provided: the
Fourier transform ``W``, the encoding permutation ``U_f``, Fourier-basis
measurement, two diagonal phase maps and register disposal.

Phases are always ``exp(2*pi*i*(a*y mod d)/d)`` with the product reduced
mod d before it reaches the exponential.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .coding import LocalCode, all_digits
from .errors import (
    ArityMismatch,
    DimensionCap,
    DimensionMismatch,
    DuplicateRegister,
    ForcedOutcomeImpossible,
    NotNormalized,
    OutRegNotZero,
    RegisterSetMismatch,
    StillEntangled,
    UnknownRegister,
)

NORM_TOL = 1e-9
ZERO_TOL = 1e-9
FORCED_MIN_PROB = 1e-12
DUMP_MIN_MODULUS = 1e-12
DEFAULT_AMP_CAP = 2 ** 26


def amp_cap() -> int:
    """Amplitude-count cap, overridable through ``QNETCODE_AMP_CAP``."""
    raw = os.environ.get("QNETCODE_AMP_CAP")
    return int(raw) if raw else DEFAULT_AMP_CAP


@dataclass(frozen=True)
class Register:
    """``kind`` is ``"S"`` (source i), ``"R"`` (edge index) or ``"T"`` (target i)."""

    kind: str
    index: int

    def __str__(self):
        return f"{self.kind}{self.index}"


def source(i: int) -> Register:
    return Register("S", i)


def edge_reg(edge_index: int) -> Register:
    return Register("R", edge_index)


def target(i: int) -> Register:
    return Register("T", i)


@lru_cache(maxsize=None)
def roots_of_unity(d: int) -> np.ndarray:
    """``exp(2*pi*i*j/d)`` for j in 0..d-1, with exact values on the axes."""
    j = np.arange(d)
    w = np.exp(2j * np.pi * j / d)
    w.real[np.abs(w.real) < 1e-15] = 0.0
    w.imag[np.abs(w.imag) < 1e-15] = 0.0
    w.flags.writeable = False
    return w


def phase(x: int | np.ndarray, d: int) -> np.ndarray:
    """``exp(2*pi*i*x/d)`` for integer ``x`` (reduced mod d first)."""
    return roots_of_unity(d)[np.mod(x, d)]


@lru_cache(maxsize=None)
def fourier_matrix(d: int) -> np.ndarray:
    """``W[z, y] = exp(2*pi*i*y*z/d) / sqrt(d)``."""
    y = np.arange(d)
    w = phase(np.outer(y, y), d) / math.sqrt(d)
    w.flags.writeable = False
    return w


class StateVector:
    """Pure state of the active registers.

    Every mutating method checks the norm afterwards and raises
    :class:`NotNormalized` if it drifted by more than ``NORM_TOL``.
    """

    def __init__(self, d: int, registers: Sequence[Register] = (), amps=None,
                 cap: int | None = None) -> None:
        self.d = int(d)
        self.registers: list[Register] = list(registers)
        if len(set(self.registers)) != len(self.registers):
            raise DuplicateRegister("register labels must be unique")
        self.cap = amp_cap() if cap is None else cap
        size = self.d ** len(self.registers)
        if size > self.cap:
            raise DimensionCap(f"{size} amplitudes exceeds cap {self.cap}")
        if amps is None:
            amps = np.zeros(size, dtype=complex)
            amps[0] = 1.0
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if amps.size != size:
            raise DimensionMismatch(f"expected {size} amplitudes for {len(self.registers)} registers, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"amplitude norm is {norm:.12f}")
        self.amps = amps.copy()

    # -- helpers ------------------------------------------------------------

    def copy(self) -> StateVector:
        new = StateVector.__new__(StateVector)
        new.d, new.cap = self.d, self.cap
        new.registers = list(self.registers)
        new.amps = self.amps.copy()
        return new

    @property
    def n(self) -> int:
        return len(self.registers)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def axis(self, reg: Register) -> int:
        try:
            return self.registers.index(reg)
        except ValueError:
            raise UnknownRegister(f"register {reg} is not active") from None

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((self.d,) * self.n)

    def _front(self, regs: Sequence[Register]) -> tuple[np.ndarray, list[int]]:
        """View with ``regs`` moved to the leading axes, each flattened group."""
        axes = [self.axis(r) for r in regs]
        if len(set(axes)) != len(axes):
            raise DuplicateRegister("a register appears twice in one operation")
        t = np.moveaxis(self.tensor(), axes, list(range(len(axes))))
        return t, axes

    def _back(self, t: np.ndarray, axes: list[int]) -> None:
        self.amps = np.ascontiguousarray(
            np.moveaxis(t, list(range(len(axes))), axes)).reshape(-1)

    def _check_norm(self, what: str) -> None:
        norm = np.linalg.norm(self.amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"norm {norm:.12f} after {what}")

    def marginal(self, reg: Register) -> np.ndarray:
        """Computational-basis outcome probabilities of one register."""
        t, _ = self._front([reg])
        return np.sum(np.abs(t.reshape(self.d, -1)) ** 2, axis=1)

    # -- operations -----------------------------------------------------------

    def alloc(self, reg: Register) -> None:
        """Append a fresh register in ``|0>`` as the least significant digit."""
        if reg in self.registers:
            raise DuplicateRegister(f"register {reg} is already active")
        size = self.amps.size * self.d
        if size > self.cap:
            raise DimensionCap(f"allocating {reg} needs {size} amplitudes (cap {self.cap})")
        new = np.zeros(size, dtype=complex)
        new[:: self.d] = self.amps
        self.amps = new
        self.registers.append(reg)

    def apply_encoding(self, in_regs: Sequence[Register], out_regs: Sequence[Register],
                       code: LocalCode, inverse: bool = False) -> None:
        """``|y>|z> -> |y>|z + f(y) mod d>`` on each computational branch.

        On the freshly allocated ``|0>`` outputs this is exactly ``U_f``;
        the modular-add form extends it to a permutation of the whole space.
        The outputs are required to hold ``|0>`` unless ``inverse`` is set.
        """
        m, n, d = len(in_regs), len(out_regs), self.d
        if m != code.fan_in or n != code.fan_out:
            raise ArityMismatch(
                f"{code.node}: code is {code.fan_in}->{code.fan_out}, registers are {m}->{n}")
        t, axes = self._front(list(in_regs) + list(out_regs))
        t = t.reshape(d ** m, d ** n, -1)
        if not inverse:
            stray = float(np.sum(np.abs(t[:, 1:, :]) ** 2))
            if stray > ZERO_TOL:
                raise OutRegNotZero(f"{code.node}: output registers carry weight {stray:.3e} off |0>")
        zdig = all_digits(d, n)                         # (d**n, n)
        sign = -1 if inverse else 1
        shifted = (zdig[None, :, :] + sign * code.table[:, None, :]) % d
        new_z = shifted @ (d ** np.arange(n - 1, -1, -1))  # (d**m, d**n)
        out = np.empty_like(t)
        out[np.arange(d ** m)[:, None], new_z] = t
        self._back(out.reshape((d,) * self.n), axes)
        self._check_norm("apply_encoding")

    def apply_fourier(self, reg: Register) -> None:
        t, axes = self._front([reg])
        t = np.tensordot(fourier_matrix(self.d), t, axes=([1], [0]))
        self._back(t, axes)
        self._check_norm("apply_fourier")

    def fourier_distribution(self, reg: Register) -> np.ndarray:
        """Exact outcome distribution of a Fourier-basis measurement of ``reg``."""
        t, _ = self._front([reg])
        t = np.tensordot(fourier_matrix(self.d), t.reshape(self.d, -1), axes=([1], [0]))
        return np.sum(np.abs(t) ** 2, axis=1)

    def measure_fourier(self, reg: Register, forced: int | None = None, rng=None) -> int:
        """Apply ``W`` to ``reg`` and measure it in the computational basis.

        ``forced`` selects the outcome (it must have probability at least
        1e-12); otherwise one ``rng.random()`` draw is inverted through the
        cumulative distribution. The register is left in ``|a>``.
        """
        self.apply_fourier(reg)
        probs = self.marginal(reg)
        if forced is not None:
            a = int(forced)
            if not 0 <= a < self.d:
                raise ForcedOutcomeImpossible(f"outcome {a} outside 0..{self.d - 1}")
            if probs[a] < FORCED_MIN_PROB:
                raise ForcedOutcomeImpossible(f"outcome {a} on {reg} has probability {probs[a]:.3e}")
        else:
            if rng is None:
                raise ValueError("measure_fourier needs a forced outcome or an rng")
            cdf = np.cumsum(probs)
            a = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            a = min(a, self.d - 1)
            while probs[a] < FORCED_MIN_PROB:  # guard against landing on a null bin at the edge
                a -= 1
        t, axes = self._front([reg])
        t = t.copy()
        mask = np.ones(self.d, dtype=bool)
        mask[a] = False
        t[mask] = 0
        t /= math.sqrt(probs[a])
        self._back(t, axes)
        self._check_norm("measure_fourier")
        return a

    def apply_phase_y(self, in_regs: Sequence[Register], code: LocalCode, ell: int, a: int) -> None:
        """``|z> -> exp(-2*pi*i*a*f_ell(z)/d) |z>`` on the code's input registers."""
        if len(in_regs) != code.fan_in:
            raise ArityMismatch(f"{code.node}: expected {code.fan_in} registers, got {len(in_regs)}")
        if not 1 <= ell <= code.fan_out:
            raise ArityMismatch(f"{code.node}: output {ell} outside 1..{code.fan_out}")
        f = code.table[:, ell - 1]
        ph = phase(-(a % self.d) * f, self.d)
        t, axes = self._front(in_regs)
        shape = t.shape
        t = t.reshape(self.d ** len(in_regs), -1) * ph[:, None]
        self._back(t.reshape(shape), axes)
        self._check_norm("apply_phase_y")

    def apply_phase_z(self, reg: Register, b: int) -> None:
        """``|x> -> exp(-2*pi*i*b*x/d) |x>``."""
        ph = phase(-(b % self.d) * np.arange(self.d), self.d)
        t, axes = self._front([reg])
        t = t * ph.reshape((self.d,) + (1,) * (t.ndim - 1))
        self._back(t, axes)
        self._check_norm("apply_phase_z")

    def drop(self, reg: Register) -> int:
        """Remove a register holding a single basis value; returns that value."""
        probs = self.marginal(reg)
        a = int(np.argmax(probs))
        residual = float(probs.sum() - probs[a])
        if residual >= ZERO_TOL:
            raise StillEntangled(f"register {reg} still entangled (residual weight {residual:.3e})", residual)
        t, axes = self._front([reg])
        rest = t[a]
        rest = rest / np.linalg.norm(rest)
        self.registers.pop(axes[0])
        self.amps = np.ascontiguousarray(rest).reshape(-1)
        self._check_norm("drop")
        return a

    # -- inspection -----------------------------------------------------------

    def amplitudes(self, order: Sequence[Register]) -> np.ndarray:
        """Flat amplitude vector with registers permuted into ``order``."""
        if sorted(order, key=str) != sorted(self.registers, key=str) or len(order) != self.n:
            raise RegisterSetMismatch(
                f"active registers {[str(r) for r in self.registers]} vs requested {[str(r) for r in order]}")
        t, _ = self._front(order)
        return np.ascontiguousarray(t).reshape(-1)

    def fidelity(self, target_amps, order: Sequence[Register]) -> float:
        """``|<target|state>|`` with the state's registers read in ``order``."""
        target_amps = np.asarray(target_amps, dtype=complex).reshape(-1)
        ours = self.amplitudes(order)
        if target_amps.size != ours.size:
            raise DimensionMismatch(f"target has {target_amps.size} amplitudes, state {ours.size}")
        return float(min(1.0, abs(np.vdot(target_amps, ours))))

    def reduced_density(self, regs: Sequence[Register]) -> np.ndarray:
        t, _ = self._front(regs)
        mat = t.reshape(self.d ** len(regs), -1)
        return mat @ mat.conj().T

    def dump(self) -> str:
        """Debug listing: ``index<TAB>digits<TAB>re<TAB>im`` for nonzero amplitudes."""
        lines = []
        width = self.n
        for r in np.flatnonzero(np.abs(self.amps) > DUMP_MIN_MODULUS):
            digits = "".join(_digit(z) for z in _digits(int(r), self.d, width))
            a = self.amps[r]
            lines.append(f"{r}\t{digits}\t{_fmt(a.real)}\t{_fmt(a.imag)}")
        return "\n".join(lines)

    def __repr__(self):
        return f"StateVector(d={self.d}, registers=[{', '.join(map(str, self.registers))}])"


def _digits(r: int, d: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        r, z = divmod(r, d)
        out.append(z)
    return out[::-1]


def _digit(z: int) -> str:
    return "0123456789abcdefghijklmnopqrstuvwxyz"[z] if z < 36 else f"[{z}]"


def _fmt(x: float) -> str:
    s = f"{x:.9f}"
    return "0.000000000" if s == "-0.000000000" else s


def parse_dump(text: str) -> dict[int, complex]:
    """Inverse of :meth:`StateVector.dump`, keyed by amplitude index."""
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        idx, _, re, im = line.split("\t")
        out[int(idx)] = complex(float(re), float(im))
    return out


def init_state(d: int, k: int, input_amps, cap: int | None = None) -> StateVector:
    """State of the k source registers ``S_1..S_k`` holding ``input_amps``."""
    input_amps = np.asarray(input_amps, dtype=complex).reshape(-1)
    if input_amps.size != d ** k:
        raise DimensionMismatch(f"expected {d ** k} input amplitudes, got {input_amps.size}")
    return StateVector(d, [source(i) for i in range(1, k + 1)], input_amps, cap=cap)
