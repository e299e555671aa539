"""The fixed gate alphabet understood by the circuit parser and simulators."""

from __future__ import annotations

import enum


class GateKind(str, enum.Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    S_DAG = "S_DAG"
    CX = "CX"
    CZ = "CZ"
    SWAP = "SWAP"
    R = "R"
    M = "M"
    TICK = "TICK"

    @property
    def arity(self) -> int:
        """Qubits per gate application (0 for TICK)."""
        if self is GateKind.TICK:
            return 0
        if self in TWO_QUBIT_GATES:
            return 2
        return 1

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.R, GateKind.M, GateKind.TICK)

    @property
    def inverse(self) -> "GateKind":
        if self is GateKind.S:
            return GateKind.S_DAG
        if self is GateKind.S_DAG:
            return GateKind.S
        if not self.is_unitary:
            raise ValueError(f"{self.value} has no inverse")
        return self


TWO_QUBIT_GATES = frozenset({GateKind.CX, GateKind.CZ, GateKind.SWAP})
PAULI_GATES = frozenset({GateKind.I, GateKind.X, GateKind.Y, GateKind.Z})

# Accepted spellings beyond the canonical names (matched case-insensitively).
ALIASES = {"CNOT": GateKind.CX}


def lookup(name: str) -> GateKind | None:
    key = name.upper()
    if key in ALIASES:
        return ALIASES[key]
    try:
        return GateKind(key)
    except ValueError:
        return None
