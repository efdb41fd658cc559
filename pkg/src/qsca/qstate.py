"""Dense state-vector simulator for the automaton's gate set.

States live on n qubits with qubit 1 the most significant index bit, so
the basis label read left to right is the binary expansion of the array
index.  The gate set is deliberately small: NOT, controlled-NOT, the
collective controlled-NOT acting qubit-wise between two equal blocks,
and the block reset that funnels a block onto its all-zero word.  The
reset comes in two variants: `literal` sums dyads over the nonzero block
words only (and therefore annihilates a component whose block is already
zero), `extended` sums over all words (fixing the zero block).  Neither
variant preserves the norm, which is why unit norm is not an invariant
of StateVector.

Gate application is written against reshaped views so the same kernels
run on single state vectors and on whole matrices (states stacked along
the second axis), which is how circuit_matrix is produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionTooLarge, ParseError

__all__ = [
    "StateVector",
    "Not",
    "Cn",
    "CollectiveCn",
    "BlockReset",
    "GateOp",
    "Circuit",
    "basis_state",
    "apply_not",
    "apply_cn",
    "apply_collective_cn",
    "apply_block_reset",
    "apply_circuit",
    "circuit_matrix",
    "uniform_superposition_nonnull",
    "parse_gatelist",
    "emit_gatelist",
    "emit_state",
]

RESET_VARIANTS = ("literal", "extended")


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over 2^n basis labels, qubit 1 most significant."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (2 ** self.n_qubits,):
            raise ValueError(
                f"expected {2 ** self.n_qubits} amplitudes, got {amp.shape}")
        amp = amp.copy()
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(bits: Sequence[int]) -> StateVector:
    """Computational basis vector labeled by the given bits."""
    bits = tuple(int(b) for b in bits)
    if not bits:
        raise ValueError("empty bit sequence")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    index = 0
    for b in bits:
        index = (index << 1) | b
    amp = np.zeros(2 ** len(bits), dtype=complex)
    amp[index] = 1.0
    return StateVector(len(bits), amp)


def uniform_superposition_nonnull(n_qubits: int) -> StateVector:
    """Unit-norm equal superposition of every nonzero basis label.

    The coefficient is 1/sqrt(2^n - 1); normalizing over the number of
    participating labels keeps the total probability at 1.
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    dim = 2 ** n_qubits
    amp = np.full(dim, 1.0 / np.sqrt(dim - 1), dtype=complex)
    amp[0] = 0.0
    return StateVector(n_qubits, amp)


# -- gate descriptions ------------------------------------------------------

@dataclass(frozen=True)
class Not:
    q: int


@dataclass(frozen=True)
class Cn:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("control and target must differ")


@dataclass(frozen=True)
class CollectiveCn:
    """Qubit-wise controlled-NOT between two disjoint equal-length blocks."""

    control_block: int
    target_block: int
    block_len: int

    def __post_init__(self):
        if self.block_len < 1:
            raise ValueError("block_len must be >= 1")
        c, t, w = self.control_block, self.target_block, self.block_len
        if c < t + w and t < c + w:
            raise ValueError("blocks overlap")


@dataclass(frozen=True)
class BlockReset:
    """Funnel one block onto its all-zero word.

    variant `literal` accumulates the nonzero block words only and
    annihilates components whose block is already zero; `extended` also
    keeps those components.
    """

    block: int
    block_len: int
    variant: str = "extended"

    def __post_init__(self):
        if self.block_len < 1:
            raise ValueError("block_len must be >= 1")
        if self.variant not in RESET_VARIANTS:
            raise ValueError(f"variant must be one of {RESET_VARIANTS}")


GateOp = Union[Not, Cn, CollectiveCn, BlockReset]


def _op_qubits(op: GateOp) -> tuple[int, ...]:
    if isinstance(op, Not):
        return (op.q,)
    if isinstance(op, Cn):
        return (op.control, op.target)
    if isinstance(op, CollectiveCn):
        return tuple(range(op.control_block, op.control_block + op.block_len)) \
            + tuple(range(op.target_block, op.target_block + op.block_len))
    if isinstance(op, BlockReset):
        return tuple(range(op.block, op.block + op.block_len))
    raise TypeError(f"not a gate op: {op!r}")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list; ops are applied first to last."""

    n_qubits: int
    ops: tuple[GateOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for op in self.ops:
            qs = _op_qubits(op)
            if min(qs) < 1 or max(qs) > self.n_qubits:
                raise ValueError(
                    f"op {op!r} out of range for {self.n_qubits} qubits")


# -- kernels ----------------------------------------------------------------
# Each kernel treats its array argument as (2^n)-by-anything flattened,
# so matrices with the state index along axis 0 work unchanged.  NOT
# writes out of place into a scratch array (a pure copy pattern streams
# better than an in-place swap); CN and reset work in place.

def _not_into(src: np.ndarray, dst: np.ndarray, n: int, q: int) -> None:
    pre = 2 ** (q - 1)
    vs = src.reshape(pre, 2, -1)
    vd = dst.reshape(pre, 2, -1)
    vd[:, 0] = vs[:, 1]
    vd[:, 1] = vs[:, 0]


def _cn_inplace(buf: np.ndarray, n: int, control: int, target: int) -> None:
    a, b = min(control, target), max(control, target)
    view = buf.reshape(2 ** (a - 1), 2, 2 ** (b - a - 1), 2, -1)
    if control < target:
        lo = view[:, 1, :, 0]
        hi = view[:, 1, :, 1]
    else:
        lo = view[:, 0, :, 1]
        hi = view[:, 1, :, 1]
    tmp = lo.copy()
    lo[...] = hi
    hi[...] = tmp


def _reset_inplace(buf: np.ndarray, n: int, block: int, block_len: int,
                   variant: str) -> None:
    pre = 2 ** (block - 1)
    view = buf.reshape(pre, 2 ** block_len, -1)
    total = view.sum(axis=1)
    if variant == "literal":
        total -= view[:, 0]
    view[:] = 0
    view[:, 0] = total


def _apply_ops(n: int, buf: np.ndarray, ops: Sequence[GateOp]) -> np.ndarray:
    """Run ops over buf, using a lazily allocated scratch for NOT swaps."""
    scratch = None
    for op in ops:
        if isinstance(op, Not):
            if scratch is None:
                scratch = np.empty_like(buf)
            _not_into(buf, scratch, n, op.q)
            buf, scratch = scratch, buf
        elif isinstance(op, Cn):
            _cn_inplace(buf, n, op.control, op.target)
        elif isinstance(op, CollectiveCn):
            for k in range(op.block_len):
                _cn_inplace(buf, n, op.control_block + k, op.target_block + k)
        elif isinstance(op, BlockReset):
            _reset_inplace(buf, n, op.block, op.block_len, op.variant)
        else:
            raise TypeError(f"not a gate op: {op!r}")
    return buf


def _checked(state: StateVector, op: GateOp) -> None:
    qs = _op_qubits(op)
    if min(qs) < 1 or max(qs) > state.n_qubits:
        raise ValueError(f"op {op!r} out of range for {state.n_qubits} qubits")


def apply_not(state: StateVector, q: int) -> StateVector:
    op = Not(q)
    _checked(state, op)
    out = np.empty_like(state.amplitudes)
    _not_into(state.amplitudes, out, state.n_qubits, q)
    return StateVector(state.n_qubits, out)


def apply_cn(state: StateVector, control: int, target: int) -> StateVector:
    op = Cn(control, target)
    _checked(state, op)
    buf = state.amplitudes.copy()
    _cn_inplace(buf, state.n_qubits, control, target)
    return StateVector(state.n_qubits, buf)


def apply_collective_cn(state: StateVector, control_block: int,
                        target_block: int, block_len: int) -> StateVector:
    op = CollectiveCn(control_block, target_block, block_len)
    _checked(state, op)
    buf = state.amplitudes.copy()
    for k in range(block_len):
        _cn_inplace(buf, state.n_qubits, control_block + k, target_block + k)
    return StateVector(state.n_qubits, buf)


def apply_block_reset(state: StateVector, block: int, block_len: int,
                      variant: str = "extended") -> StateVector:
    op = BlockReset(block, block_len, variant)
    _checked(state, op)
    buf = state.amplitudes.copy()
    _reset_inplace(buf, state.n_qubits, block, block_len, variant)
    return StateVector(state.n_qubits, buf)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit on {circuit.n_qubits} qubits, state on {state.n_qubits}")
    buf = _apply_ops(state.n_qubits, state.amplitudes.copy(), circuit.ops)
    return StateVector(state.n_qubits, buf)


def circuit_matrix(circuit: Circuit, dense_limit: int = 14) -> np.ndarray:
    """Dense matrix of a circuit, built by running it on every basis state."""
    n = circuit.n_qubits
    if n > dense_limit:
        raise DimensionTooLarge(
            f"{n} qubits exceeds the dense limit of {dense_limit}")
    mat = np.eye(2 ** n, dtype=complex)
    return _apply_ops(n, mat, circuit.ops).reshape(2 ** n, 2 ** n)


# -- text formats -----------------------------------------------------------
# One op per line, 1-based qubit indices:
#   X <q>
#   CN <control> <target>
#   CCN <control_block_start> <target_block_start> <len>
#   RESET <block_start> <len> <literal|extended>
# `#` starts a comment.

def parse_gatelist(text: str, n_qubits: int | None = None) -> Circuit:
    """Parse the gate-list format; infers the qubit count when not given."""
    ops: list[GateOp] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        name, args = fields[0].upper(), fields[1:]

        def ints(k):
            if len(args) != k:
                raise ParseError(
                    f"{name} expects {k} argument(s)", line_no=line_no)
            try:
                return [int(a) for a in args[:k]]
            except ValueError:
                raise ParseError(
                    f"bad integer in {name} line", line_no=line_no) from None

        try:
            if name == "X":
                ops.append(Not(*ints(1)))
            elif name == "CN":
                ops.append(Cn(*ints(2)))
            elif name == "CCN":
                ops.append(CollectiveCn(*ints(3)))
            elif name == "RESET":
                if len(args) != 3:
                    raise ParseError(
                        "RESET expects <start> <len> <variant>",
                        line_no=line_no)
                try:
                    start, length = int(args[0]), int(args[1])
                except ValueError:
                    raise ParseError(
                        "bad integer in RESET line", line_no=line_no) from None
                if args[2] not in RESET_VARIANTS:
                    raise ParseError(
                        f"RESET variant must be one of {RESET_VARIANTS}",
                        line_no=line_no)
                ops.append(BlockReset(start, length, args[2]))
            else:
                raise ParseError(f"unknown op {fields[0]!r}", line_no=line_no)
        except ValueError as err:
            raise ParseError(str(err), line_no=line_no) from None
    if n_qubits is None:
        n_qubits = max((max(_op_qubits(op)) for op in ops), default=1)
    try:
        return Circuit(n_qubits, tuple(ops))
    except ValueError as err:
        raise ParseError(str(err)) from None


def emit_gatelist(circuit: Circuit) -> str:
    lines = []
    for op in circuit.ops:
        if isinstance(op, Not):
            lines.append(f"X {op.q}")
        elif isinstance(op, Cn):
            lines.append(f"CN {op.control} {op.target}")
        elif isinstance(op, CollectiveCn):
            lines.append(
                f"CCN {op.control_block} {op.target_block} {op.block_len}")
        elif isinstance(op, BlockReset):
            lines.append(f"RESET {op.block} {op.block_len} {op.variant}")
        else:
            raise TypeError(f"not a gate op: {op!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def emit_state(state: StateVector) -> str:
    """Nonzero amplitudes as `index re im` lines, indices ascending, 0-based."""
    lines = []
    for idx in np.flatnonzero(state.amplitudes):
        a = state.amplitudes[idx]
        lines.append(f"{idx} {a.real:.17g} {a.imag:.17g}")
    return "\n".join(lines) + ("\n" if lines else "")
