"""Circuit text format, IR, and cost metrics.

Grammar (version 1)::

    circuit     := (line '\\n')*
    line        := ws* (instruction)? ws* ('#' anything)?
    instruction := GATE (ws+ INDEX)*
    GATE        := I | X | Y | Z | H | S | S_DAG | CX | CZ | SWAP | R | M | TICK
                   (case-insensitive; CNOT is accepted for CX)
    INDEX       := decimal digits

Two-qubit gates take an even number of targets read as consecutive pairs
(``CX 0 2 1 3`` applies CX(0,2) and CX(1,3)); pairs inside one instruction must
be disjoint.  Single-qubit gates broadcast over their targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .errors import ParseError
from .gates import TWO_QUBIT_GATES, GateKind, lookup

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Instruction:
    kind: GateKind
    targets: tuple[int, ...] = ()

    def applications(self) -> Iterator[tuple[int, ...]]:
        """Individual gate applications of a (possibly broadcast) instruction."""
        k = self.kind.arity
        if k == 0:
            return
        for i in range(0, len(self.targets), k):
            yield self.targets[i : i + k]

    def __str__(self) -> str:
        return " ".join([self.kind.value, *map(str, self.targets)])


class Op(NamedTuple):
    """One gate application, tagged with the instruction it came from."""

    kind: GateKind
    qubits: tuple[int, ...]
    instruction: int


class CostTuple(NamedTuple):
    """Lexicographically ordered (two-qubit gate count, depth)."""

    g2q: int
    depth: int


@dataclass(frozen=True)
class CircuitIR:
    instructions: tuple[Instruction, ...] = ()
    source_text: str | None = field(default=None, compare=False, repr=False)

    @property
    def num_qubits(self) -> int:
        return max((max(ins.targets) + 1 for ins in self.instructions if ins.targets), default=0)

    def ops(self) -> Iterator[Op]:
        for idx, ins in enumerate(self.instructions):
            for qs in ins.applications():
                yield Op(ins.kind, qs, idx)

    def qubits_used(self) -> set[int]:
        return {q for ins in self.instructions for q in ins.targets}

    def measured_qubits(self) -> list[int]:
        return [op.qubits[0] for op in self.ops() if op.kind is GateKind.M]

    def __add__(self, other: "CircuitIR") -> "CircuitIR":
        return CircuitIR(self.instructions + other.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    def __str__(self) -> str:
        return emit_circuit(self)


def make_instruction(kind: GateKind | str, *targets: int) -> Instruction:
    kind = GateKind(kind)
    ins = Instruction(kind, tuple(targets))
    _validate(ins, line=None)
    return ins


def _validate(ins: Instruction, line: int | None) -> None:
    kind, targets = ins.kind, ins.targets
    if kind is GateKind.TICK:
        if targets:
            raise ParseError("TICK takes no targets", line=line)
        return
    if not targets:
        raise ParseError(f"{kind.value} needs at least one target", line=line)
    if any(t < 0 for t in targets):
        raise ParseError(f"negative qubit index in {ins}", line=line)
    if kind in TWO_QUBIT_GATES:
        if len(targets) % 2:
            raise ParseError(f"{kind.value} needs an even number of targets", line=line)
        seen: set[int] = set()
        for a, b in ins.applications():
            if a == b:
                raise ParseError(f"duplicate target {a} in {kind.value} pair", line=line)
            if a in seen or b in seen:
                raise ParseError(f"overlapping pairs in {kind.value} instruction", line=line)
            seen.update((a, b))


def parse_circuit(text: str) -> CircuitIR:
    instructions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        name, *rest = body.split()
        kind = lookup(name)
        if kind is None:
            raise ParseError(f"unknown gate {name!r}", line=lineno)
        targets = []
        for tok in rest:
            if tok.startswith("-") and tok[1:].isdigit():
                raise ParseError(f"negative qubit index {tok}", line=lineno)
            if not tok.isdigit():
                raise ParseError(f"bad qubit target {tok!r}", line=lineno)
            targets.append(int(tok))
        ins = Instruction(kind, tuple(targets))
        _validate(ins, lineno)
        instructions.append(ins)
    return CircuitIR(tuple(instructions), source_text=text)


def emit_circuit(c: CircuitIR) -> str:
    return "".join(f"{ins}\n" for ins in c.instructions)


def two_qubit_gate_count(c: CircuitIR) -> int:
    return sum(len(ins.targets) // 2 for ins in c.instructions if ins.kind in TWO_QUBIT_GATES)


def schedule(c: CircuitIR) -> list[tuple[Op, int]]:
    """ASAP layer (1-based) of every gate application, in program order."""
    ready: dict[int, int] = {}
    out = []
    for op in c.ops():
        layer = 1 + max((ready.get(q, 0) for q in op.qubits), default=0)
        for q in op.qubits:
            ready[q] = layer
        out.append((op, layer))
    return out


def depth(c: CircuitIR) -> int:
    return max((layer for _, layer in schedule(c)), default=0)


def layered_view(c: CircuitIR) -> list[list[Op]]:
    """Gate applications grouped by ASAP layer; layer count equals depth(c)."""
    sched = schedule(c)
    layers: list[list[Op]] = [[] for _ in range(max((l for _, l in sched), default=0))]
    for op, layer in sched:
        layers[layer - 1].append(op)
    return layers


def cost(c: CircuitIR) -> CostTuple:
    return CostTuple(two_qubit_gate_count(c), depth(c))


def from_ops(ops: list[tuple[GateKind, tuple[int, ...]]]) -> CircuitIR:
    """Build a circuit with one instruction per gate application."""
    return CircuitIR(tuple(make_instruction(k, *qs) for k, qs in ops))
