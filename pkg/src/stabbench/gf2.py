"""GF(2) linear algebra on rows packed into Python integers.

Row ``r`` is an int whose bit ``j`` is entry ``j``.  Symplectic vectors use
the layout ``x | (z << n)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .pauli import PauliString


def symplectic_vector(p: PauliString) -> int:
    return p.x | (p.z << p.num_qubits)


class EchelonBasis:
    """Incrementally maintained reduced basis keyed by pivot bit."""

    def __init__(self, rows: Iterable[int] = ()):
        self._pivots: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self._pivots.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        """Insert v; returns False if it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        self._pivots[r.bit_length() - 1] = r
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0


def rank(rows: Iterable[int]) -> int:
    return len(EchelonBasis(rows))


def independent_subset(rows: Sequence[int]) -> list[int]:
    """Indices of a greedy maximal independent subset, in input order."""
    basis = EchelonBasis()
    return [i for i, r in enumerate(rows) if basis.add(r)]


def solve(rows: Sequence[int], rhs: Sequence[int], width: int) -> int | None:
    """Find u with popcount(rows[i] & u) % 2 == rhs[i] for all i.

    Returns one solution as a packed int, or None if inconsistent.
    """
    aug_bit = 1 << width
    pivots: dict[int, int] = {}
    order: list[int] = []
    for r, b in zip(rows, rhs):
        v = r | (aug_bit if b & 1 else 0)
        for p in order:
            if (v >> p) & 1:
                v ^= pivots[p]
        low = v & (aug_bit - 1)
        if not low:
            if v:
                return None
            continue
        p = (low & -low).bit_length() - 1
        for q in order:
            if (pivots[q] >> p) & 1:
                pivots[q] ^= v
        pivots[p] = v
        order.append(p)
    u = 0
    for p, v in pivots.items():
        if v & aug_bit:
            u |= 1 << p
    return u


def nullspace(rows: Sequence[int], width: int) -> list[int]:
    """Basis of {u : popcount(r & u) even for every row r}."""
    pivots: dict[int, int] = {}
    for r in rows:
        v = r
        for p, row in pivots.items():
            if (v >> p) & 1:
                v ^= row
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        for q in list(pivots):
            if (pivots[q] >> p) & 1:
                pivots[q] ^= v
        pivots[p] = v
    basis = []
    for f in range(width):
        if f in pivots:
            continue
        u = 1 << f
        for p, row in pivots.items():
            if (row >> f) & 1:
                u |= 1 << p
        basis.append(u)
    return basis
