"""Exact n-qubit Pauli algebra in bit-packed symplectic form.

A :class:`PauliString` stores the value ``i**phase * P_0 (x) P_1 (x) ...``
where qubit ``q`` carries X when only bit ``q`` of ``x`` is set, Z when only
bit ``q`` of ``z`` is set and the Hermitian Y when both are set.  With this
convention a Hermitian Pauli has phase 0 (``+``) or 2 (``-``).

The bit-vectors are plain Python integers, so every symplectic operation is a
handful of word-parallel big-int instructions regardless of qubit count.

Literal grammar accepted by :func:`parse_pauli`::

    literal := sign? body
    sign    := ('+' | '-') 'i'?  |  'i'
    body    := dense | sparse
    dense   := one character from {I, _, X, Y, Z} per qubit
    sparse  := term ('*' term)*      term := ('X' | 'Y' | 'Z' | 'I') index

Dense literals are the canonical emitted form.
"""

from __future__ import annotations

import re

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BoundsError, ParseError, UnsupportedGateError
from .gates import GateKind

_SIGN_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def _mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True, slots=True)
class PauliString:
    num_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if self.num_qubits < 0:
            raise ValueError("num_qubits must be non-negative")
        m = _mask(self.num_qubits)
        if self.x & ~m or self.z & ~m:
            raise ValueError("bit-vector wider than num_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -------------------------------------------------------
    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls(num_qubits)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, pauli: str) -> "PauliString":
        if not 0 <= qubit < num_qubits:
            raise BoundsError(f"qubit {qubit} out of range for {num_qubits} qubits")
        bit = 1 << qubit
        x = bit if pauli in "XY" else 0
        z = bit if pauli in "ZY" else 0
        if pauli not in ("X", "Y", "Z", "I"):
            raise ValueError(f"not a single-qubit Pauli: {pauli!r}")
        return cls(num_qubits, x, z)

    @classmethod
    def from_bits(
        cls, xs: Sequence[int], zs: Sequence[int], phase: int = 0
    ) -> "PauliString":
        if len(xs) != len(zs):
            raise ValueError("x and z bit lists differ in length")
        x = sum(1 << q for q, b in enumerate(xs) if b)
        z = sum(1 << q for q, b in enumerate(zs) if b)
        return cls(len(xs), x, z, phase)

    # -- views ----------------------------------------------------------------
    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian Paulis."""
        if not self.is_hermitian:
            raise ValueError("sign is only defined for Hermitian Paulis")
        return 1 if self.phase == 0 else -1

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def support(self) -> int:
        return self.x | self.z

    def x_bits(self) -> list[int]:
        return [(self.x >> q) & 1 for q in range(self.num_qubits)]

    def z_bits(self) -> list[int]:
        return [(self.z >> q) & 1 for q in range(self.num_qubits)]

    def __getitem__(self, qubit: int) -> str:
        if not 0 <= qubit < self.num_qubits:
            raise IndexError(qubit)
        return "IXZY"[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    def unsigned(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, 0)

    def negated(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, self.phase + 2)

    def extended(self, num_qubits: int) -> "PauliString":
        """Pad with identity on new high qubits."""
        if num_qubits < self.num_qubits:
            raise ValueError("cannot shrink a PauliString")
        return PauliString(num_qubits, self.x, self.z, self.phase)

    def shifted(self, offset: int, num_qubits: int) -> "PauliString":
        """Relabel qubit q as q + offset inside a register of num_qubits."""
        return PauliString(num_qubits, self.x << offset, self.z << offset, self.phase)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return self.negated()

    def __str__(self) -> str:
        return emit_pauli(self)

    def __repr__(self) -> str:
        return f"PauliString({emit_pauli(self)!r})"


# -- text -----------------------------------------------------------------------
def _split_sign(text: str) -> tuple[int, int]:
    """Return (phase, index where the body starts)."""
    phase = 0
    i = 0
    if i < len(text) and text[i] in "+-":
        phase = 0 if text[i] == "+" else 2
        i += 1
    if i < len(text) and text[i] == "i":
        phase += 1
        i += 1
    return phase, i


def parse_pauli(text: str, num_qubits: int | None = None) -> PauliString:
    """Parse a dense (``+XZ_Y``) or sparse (``-X0*Z3``) Pauli literal.

    ``num_qubits`` is required for sparse literals and, when given for a dense
    literal, must equal its length.
    """
    stripped = text.strip()
    lead = len(text) - len(text.lstrip())
    phase, start = _split_sign(stripped)
    body = stripped[start:]
    if not body:
        raise ParseError("empty Pauli literal", column=lead + start + 1)
    if any(ch.isdigit() for ch in body):
        return _parse_sparse(body, phase, num_qubits, lead + start)
    n = len(body)
    if num_qubits is not None and n != num_qubits:
        raise BoundsError(f"dense literal has {n} sites, expected {num_qubits}")
    x = z = 0
    for q, ch in enumerate(body):
        if ch in "I_":
            continue
        if ch == "X":
            x |= 1 << q
        elif ch == "Z":
            z |= 1 << q
        elif ch == "Y":
            x |= 1 << q
            z |= 1 << q
        else:
            raise ParseError(f"unexpected character {ch!r}", column=lead + start + q + 1)
    return PauliString(n, x, z, phase)


def parse_generators(texts: Iterable[str], num_qubits: int | None = None) -> list[PauliString]:
    """Parse a list of literals sharing one qubit count.

    Without ``num_qubits`` the count comes from the dense literals, or from the
    largest sparse index when every literal is sparse.
    """
    texts = [t for t in (t.strip() for t in texts) if t]
    if num_qubits is None:
        dense = [t for t in texts if not any(ch.isdigit() for ch in t)]
        if dense:
            num_qubits = len(dense[0]) - _split_sign(dense[0])[1]
        else:
            idx = [int(m) for t in texts for m in re.findall(r"\d+", t)]
            num_qubits = max(idx, default=-1) + 1
    return [parse_pauli(t, num_qubits) for t in texts]


def _parse_sparse(body: str, phase: int, num_qubits: int | None, offset: int) -> PauliString:
    if num_qubits is None:
        raise ParseError("sparse Pauli literal needs an explicit qubit count")
    x = z = 0
    seen: set[int] = set()
    col = offset
    for term in body.split("*"):
        if len(term) < 2 or term[0] not in "IXYZ" or not term[1:].isdigit():
            bad = next(
                (j for j, ch in enumerate(term) if (j == 0 and ch not in "IXYZ") or (j and not ch.isdigit())),
                0,
            )
            raise ParseError(f"malformed sparse term {term!r}", column=col + bad + 1)
        q = int(term[1:])
        if q >= num_qubits:
            raise BoundsError(
                f"qubit index {q} out of range for {num_qubits} qubits", column=col + 2
            )
        if q in seen:
            raise ParseError(f"qubit {q} repeated", column=col + 2)
        seen.add(q)
        if term[0] in "XY":
            x |= 1 << q
        if term[0] in "ZY":
            z |= 1 << q
        col += len(term) + 1
    return PauliString(num_qubits, x, z, phase)


def emit_pauli(p: PauliString) -> str:
    body = "".join("_" if c == "I" else c for c in (p[q] for q in range(p.num_qubits)))
    return _SIGN_TEXT[p.phase] + body


def emit_sparse(p: PauliString) -> str:
    """Sparse literal (``+X0*Z3``); the identity is written as ``+I0``."""
    terms = [f"{p[q]}{q}" for q in range(p.num_qubits) if (p.support >> q) & 1]
    if not terms:
        terms = ["I0"] if p.num_qubits else []
    return _SIGN_TEXT[p.phase] + "*".join(terms)


# -- algebra --------------------------------------------------------------------
def _check_pair(a: PauliString, b: PauliString) -> None:
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}")


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """0 when a and b commute, 1 when they anticommute."""
    _check_pair(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def commutes(a: PauliString, b: PauliString) -> bool:
    return symplectic_product(a, b) == 0


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a * b`` including the power of i."""
    _check_pair(a, b)
    ax, az, bx, bz = a.x, a.z, b.x, b.z
    # Per-site products that pick up +i: XY, YZ, ZX; -i: YX, ZY, XZ.
    a_x, a_y, a_z = ax & ~az, ax & az, az & ~ax
    b_x, b_y, b_z = bx & ~bz, bx & bz, bz & ~bx
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    phase = a.phase + b.phase + plus.bit_count() - minus.bit_count()
    return PauliString(a.num_qubits, ax ^ bx, az ^ bz, phase)


def weight(p: PauliString, support: Iterable[int] | None = None) -> int:
    """Number of non-identity sites, optionally restricted to ``support``."""
    bits = p.support
    if support is not None:
        m = 0
        for q in support:
            if not 0 <= q < p.num_qubits:
                raise BoundsError(f"support qubit {q} out of range")
            m |= 1 << q
        bits &= m
    return bits.bit_count()


def conjugate_by_gate(
    p: PauliString, gate: GateKind | str, targets: Sequence[int]
) -> PauliString:
    """Return ``U p U^dagger`` for a single application of a Clifford gate."""
    kind = GateKind(gate) if not isinstance(gate, GateKind) else gate
    if not kind.is_unitary:
        raise UnsupportedGateError(f"{kind.value} is not a unitary Clifford gate")
    if len(targets) != kind.arity:
        raise ValueError(f"{kind.value} takes {kind.arity} target(s), got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {list(targets)}")
    for q in targets:
        if not 0 <= q < p.num_qubits:
            raise BoundsError(f"target {q} out of range for {p.num_qubits} qubits")

    x, z, phase = p.x, p.z, p.phase
    if kind.arity == 1:
        q = targets[0]
        xq, zq = (x >> q) & 1, (z >> q) & 1
        flip = 0
        if kind is GateKind.H:
            flip = xq & zq
            x = (x & ~(1 << q)) | (zq << q)
            z = (z & ~(1 << q)) | (xq << q)
        elif kind is GateKind.S:
            flip = xq & zq
            z ^= xq << q
        elif kind is GateKind.S_DAG:
            flip = xq & (zq ^ 1)
            z ^= xq << q
        elif kind is GateKind.X:
            flip = zq
        elif kind is GateKind.Y:
            flip = xq ^ zq
        elif kind is GateKind.Z:
            flip = xq
        return PauliString(p.num_qubits, x, z, phase + 2 * flip)

    a, b = targets
    xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
    flip = 0
    if kind is GateKind.CX:
        flip = xa & zb & (xb ^ za ^ 1)
        x ^= xa << b
        z ^= zb << a
    elif kind is GateKind.CZ:
        flip = xa & xb & (za ^ zb)
        z ^= (xb << a) | (xa << b)
    elif kind is GateKind.SWAP:
        if xa != xb:
            x ^= (1 << a) | (1 << b)
        if za != zb:
            z ^= (1 << a) | (1 << b)
    return PauliString(p.num_qubits, x, z, phase + 2 * flip)
