"""Stabilizer-state simulation and the stabilizer-preservation oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import CircuitIR, Op
from .errors import (
    IllFormedFlagGadget,
    MalformedProblem,
    NondeterministicMeasurement,
    StructuralError,
)
from .gates import GateKind
from .pauli import PauliString, commutes, multiply


class Membership(str, enum.Enum):
    PLUS_ONE = "plus_one"
    MINUS_ONE = "minus_one"
    NOT_IN_GROUP = "not_in_group"


def _pack_rows(bits: np.ndarray) -> list[int]:
    packed = np.packbits(bits, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _unpack(value: int, n: int) -> np.ndarray:
    raw = np.frombuffer(value.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


class Tableau:
    """Aaronson-Gottesman tableau: rows 0..n-1 destabilizers, n..2n-1 stabilizers.

    Row signs follow the same convention as :class:`PauliString` (Y Hermitian),
    so a row with sign bit r is the Pauli ``(-1)**r * P``.
    """

    def __init__(self, num_qubits: int):
        n = num_qubits
        self.num_qubits = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1
        self.z[n + idx, idx] = 1
        self.measurements: list[int] = []
        self._cache: list[PauliString] | None = None

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.num_qubits = self.num_qubits
        t.x, t.z, t.r = self.x.copy(), self.z.copy(), self.r.copy()
        t.measurements = list(self.measurements)
        t._cache = None
        return t

    # -- rows -------------------------------------------------------------------
    def row(self, i: int) -> PauliString:
        x = int.from_bytes(np.packbits(self.x[i], bitorder="little").tobytes(), "little")
        z = int.from_bytes(np.packbits(self.z[i], bitorder="little").tobytes(), "little")
        return PauliString(self.num_qubits, x, z, 2 * int(self.r[i]))

    def stabilizers(self) -> list[PauliString]:
        if self._cache is None:
            n = self.num_qubits
            xs = _pack_rows(self.x[n:]) if n else []
            zs = _pack_rows(self.z[n:]) if n else []
            self._cache = [
                PauliString(n, x, z, 2 * int(r)) for x, z, r in zip(xs, zs, self.r[n:])
            ]
        return self._cache

    def destabilizers(self) -> list[PauliString]:
        return [self.row(i) for i in range(self.num_qubits)]

    def _rowsum(self, targets: np.ndarray, src: int) -> None:
        """rows[t] <- rows[src] * rows[t] for every t in targets (exact sign)."""
        if targets.size == 0:
            return
        x1 = self.x[src].astype(np.int16)
        z1 = self.z[src].astype(np.int16)
        x2 = self.x[targets].astype(np.int16)
        z2 = self.z[targets].astype(np.int16)
        g = np.where(
            (x1 == 1) & (z1 == 1),
            z2 - x2,
            np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
        )
        total = 2 * self.r[targets].astype(np.int64) + 2 * int(self.r[src]) + g.sum(axis=1)
        self.r[targets] = ((total % 4) // 2).astype(np.uint8)
        self.x[targets] ^= self.x[src]
        self.z[targets] ^= self.z[src]

    # -- gates ------------------------------------------------------------------
    def apply(self, kind: GateKind, qubits: Sequence[int]) -> None:
        self._cache = None
        x, z, r = self.x, self.z, self.r
        if kind is GateKind.I or kind is GateKind.TICK:
            return
        if kind.arity == 1:
            q = qubits[0]
            if kind is GateKind.H:
                r ^= x[:, q] & z[:, q]
                x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
            elif kind is GateKind.S:
                r ^= x[:, q] & z[:, q]
                z[:, q] ^= x[:, q]
            elif kind is GateKind.S_DAG:
                r ^= x[:, q] & (z[:, q] ^ 1)
                z[:, q] ^= x[:, q]
            elif kind is GateKind.X:
                r ^= z[:, q]
            elif kind is GateKind.Y:
                r ^= x[:, q] ^ z[:, q]
            elif kind is GateKind.Z:
                r ^= x[:, q]
            elif kind is GateKind.R:
                self.reset(q)
            elif kind is GateKind.M:
                self.measurements.append(self.measure(q))
            return
        a, b = qubits
        if kind is GateKind.CX:
            r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
        elif kind is GateKind.CZ:
            r ^= x[:, a] & x[:, b] & (z[:, a] ^ z[:, b])
            z[:, a] ^= x[:, b]
            z[:, b] ^= x[:, a]
        elif kind is GateKind.SWAP:
            x[:, [a, b]] = x[:, [b, a]]
            z[:, [a, b]] = z[:, [b, a]]

    def apply_pauli(self, p: PauliString) -> None:
        """Apply a Pauli operator to the state (flips signs of anticommuting rows)."""
        self._cache = None
        px = _unpack(p.x, self.num_qubits)
        pz = _unpack(p.z, self.num_qubits)
        anti = (self.x.astype(np.int64) @ pz + self.z.astype(np.int64) @ px) & 1
        self.r ^= anti.astype(np.uint8)

    def _random_pivot(self, q: int) -> int | None:
        n = self.num_qubits
        hits = np.flatnonzero(self.x[n:, q])
        return None if hits.size == 0 else n + int(hits[0])

    def is_deterministic(self, q: int) -> bool:
        return self._random_pivot(q) is None

    def peek_z(self, q: int) -> int:
        """Outcome of a deterministic Z measurement of qubit q (0 or 1)."""
        status = self.stabilizes(PauliString.single(self.num_qubits, q, "Z"))
        if status is Membership.NOT_IN_GROUP:
            raise NondeterministicMeasurement(f"measurement of qubit {q} is random")
        return 0 if status is Membership.PLUS_ONE else 1

    def measure(self, q: int) -> int:
        if not self.is_deterministic(q):
            raise NondeterministicMeasurement(f"measurement of qubit {q} is random")
        return self.peek_z(q)

    def reset(self, q: int) -> None:
        """Project qubit q onto |0> (collapsing it first if it is entangled)."""
        self._cache = None
        n = self.num_qubits
        p = self._random_pivot(q)
        if p is None:
            if self.peek_z(q):
                self.apply(GateKind.X, (q,))
            return
        others = np.flatnonzero(self.x[:, q])
        self._rowsum(others[others != p], p)
        self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
        self.x[p] = 0
        self.z[p] = 0
        self.z[p, q] = 1
        self.r[p] = 0

    # -- queries ----------------------------------------------------------------
    def stabilizes(self, s: PauliString) -> Membership:
        """Is s (or -s) an element of this state's stabilizer group?"""
        if s.num_qubits != self.num_qubits:
            raise ValueError(f"Pauli has {s.num_qubits} qubits, tableau has {self.num_qubits}")
        if not s.is_hermitian:
            raise ValueError("stabilizer query must be Hermitian")
        n = self.num_qubits
        if n == 0:
            return Membership.PLUS_ONE if s.phase == 0 else Membership.MINUS_ONE
        sx = _unpack(s.x, n).astype(np.int64)
        sz = _unpack(s.z, n).astype(np.int64)
        anti = (self.x.astype(np.int64) @ sz + self.z.astype(np.int64) @ sx) & 1
        if anti[n:].any():
            return Membership.NOT_IN_GROUP
        stabs = self.stabilizers()
        acc = PauliString(n)
        for i in np.flatnonzero(anti[:n]):
            acc = multiply(acc, stabs[i])
        if acc.x != s.x or acc.z != s.z:
            raise AssertionError("tableau lost full rank")
        return Membership.PLUS_ONE if acc.phase == s.phase else Membership.MINUS_ONE

    def check_invariants(self) -> bool:
        """Destabilizer i anticommutes only with stabilizer i; stabilizers commute."""
        n = self.num_qubits
        x = self.x.astype(np.int64)
        z = self.z.astype(np.int64)
        gram = (x @ z.T + z @ x.T) & 1
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        idx = np.arange(n)
        expected[idx, n + idx] = 1
        expected[n + idx, idx] = 1
        # destabilizers among themselves are unconstrained
        gram[:n, :n] = 0
        return bool(np.array_equal(gram, expected))


def simulate(c: CircuitIR, num_qubits: int | None = None) -> Tableau:
    """Run c on |0...0>; deterministic measurement outcomes land in ``.measurements``."""
    n = max(c.num_qubits, num_qubits or 0)
    t = Tableau(n)
    run(t, c.ops())
    return t


def run(t: Tableau, ops: Iterable[Op]) -> Tableau:
    for op in ops:
        try:
            t.apply(op.kind, op.qubits)
        except NondeterministicMeasurement as exc:
            raise NondeterministicMeasurement(
                f"nondeterministic measurement in instruction {op.instruction} "
                f"({op.kind.value} {op.qubits[0]})"
            ) from exc
    return t


def stabilizes(t: Tableau, s: PauliString) -> Membership:
    return t.stabilizes(s)


# -- oracle -------------------------------------------------------------------------
class GenStatus(str, enum.Enum):
    PASS = "pass"
    SIGN_FAIL = "sign_fail"
    FAIL = "fail"


@dataclass
class StabReport:
    statuses: list[GenStatus]
    satisfied_count: int
    valid: bool
    num_qubits: int = 0
    flag_outcomes: list[int] = field(default_factory=list)

    @property
    def num_generators(self) -> int:
        return len(self.statuses)

    def to_dict(self) -> dict:
        return {
            "per_generator": [s.value for s in self.statuses],
            "satisfied": self.satisfied_count,
            "total": self.num_generators,
            "valid": self.valid,
        }


def validate_generator_set(generators: Sequence[PauliString]) -> int:
    """Raise MalformedProblem unless generators form a usable commuting set."""
    if not generators:
        raise MalformedProblem("empty generator set")
    n = generators[0].num_qubits
    for g in generators:
        if g.num_qubits != n:
            raise MalformedProblem("generators disagree on qubit count")
        if not g.is_hermitian:
            raise MalformedProblem(f"generator {g} is not Hermitian")
    for i, a in enumerate(generators):
        for b in generators[i + 1 :]:
            if not commutes(a, b):
                raise MalformedProblem(f"generators {a} and {b} anticommute")
    return n


def check_data_measurements(c: CircuitIR, data_qubits: Iterable[int]) -> None:
    data = set(data_qubits)
    for op in c.ops():
        if op.kind is GateKind.M and op.qubits[0] in data:
            raise StructuralError(
                f"instruction {op.instruction} measures data qubit {op.qubits[0]}"
            )


def deterministic_flag_outcomes(c: CircuitIR, data_qubits: Iterable[int]) -> list[int]:
    """Fault-free outcomes of every M in c; each must be deterministic."""
    check_data_measurements(c, data_qubits)
    try:
        return simulate(c).measurements
    except NondeterministicMeasurement as exc:
        raise IllFormedFlagGadget(f"ill-formed flag gadget: {exc}") from exc


def check_stabilizers(c: CircuitIR, generators: Sequence[PauliString]) -> StabReport:
    n = validate_generator_set(generators)
    check_data_measurements(c, range(n))
    total = max(n, c.num_qubits)
    try:
        t = simulate(c, total)
    except NondeterministicMeasurement as exc:
        raise IllFormedFlagGadget(f"ill-formed flag gadget: {exc}") from exc
    statuses = []
    for g in generators:
        m = t.stabilizes(g.extended(total))
        statuses.append(
            GenStatus.PASS
            if m is Membership.PLUS_ONE
            else GenStatus.SIGN_FAIL
            if m is Membership.MINUS_ONE
            else GenStatus.FAIL
        )
    ok = sum(s is GenStatus.PASS for s in statuses)
    return StabReport(statuses, ok, ok == len(statuses), total, list(t.measurements))
