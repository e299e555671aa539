"""Stabilizer code instances, validation, direct products and distance search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..gf2 import EchelonBasis, symplectic_vector
from ..pauli import PauliString, emit_sparse, multiply, parse_pauli

FAMILIES = (
    "rotated_surface",
    "color_hex",
    "color_sqoct",
    "iceberg",
    "hypercube",
    "bb",
    "named",
    "tensor_product",
)

# brute_force_distance gives up above this many candidate Paulis
DEFAULT_SEARCH_BUDGET = 20_000_000


@dataclass(frozen=True)
class CodeInstance:
    id: str
    family: str
    num_qubits: int
    generators: tuple[PauliString, ...]
    num_logical: int
    distance: int
    parents: tuple[str, str] | None = None
    params: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.num_qubits

    @property
    def k_i(self) -> int:
        """Number of stabilizer generators."""
        return len(self.generators)

    @property
    def all_z(self) -> bool:
        return all(g.x == 0 for g in self.generators)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "family": self.family,
            "params": self.params,
            "n": self.num_qubits,
            "k": self.num_logical,
            "d": self.distance,
            "num_generators": self.k_i,
            "parents": list(self.parents) if self.parents else None,
            "generators": [emit_sparse(g) for g in self.generators],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CodeInstance":
        n = int(data["n"])
        gens = tuple(parse_pauli(text, n) for text in data["generators"])
        parents = tuple(data["parents"]) if data.get("parents") else None
        return cls(
            id=data["id"],
            family=data["family"],
            num_qubits=n,
            generators=gens,
            num_logical=int(data["k"]),
            distance=int(data["d"]),
            parents=parents,  # type: ignore[arg-type]
            params=dict(data.get("params") or {}),
        )


def make_code(
    id: str,
    family: str,
    generators: Sequence[PauliString],
    distance: int,
    params: dict[str, Any] | None = None,
    parents: tuple[str, str] | None = None,
) -> CodeInstance:
    if not generators:
        n = 0
    else:
        n = generators[0].num_qubits
    return CodeInstance(
        id=id,
        family=family,
        num_qubits=n,
        generators=tuple(generators),
        num_logical=n - len(generators),
        distance=distance,
        parents=parents,
        params=dict(params or {}),
    )


def css_generators(x_rows: Sequence[int], z_rows: Sequence[int], n: int) -> list[PauliString]:
    """X-type generators from x_rows followed by Z-type ones from z_rows."""
    return [PauliString(n, x=r) for r in x_rows] + [PauliString(n, z=r) for r in z_rows]


def empty_code() -> CodeInstance:
    return CodeInstance("empty", "named", 0, (), 0, 0)


# -- validation --------------------------------------------------------------------
@dataclass
class ValidationFailure:
    check: str
    detail: str
    indices: tuple[int, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"check": self.check, "detail": self.detail, "indices": list(self.indices)}


@dataclass
class ValidationReport:
    code_id: str
    failures: list[ValidationFailure]
    rank: int
    num_generators: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        return {
            "code_id": self.code_id,
            "ok": self.ok,
            "rank": self.rank,
            "num_generators": self.num_generators,
            "failures": [f.to_dict() for f in self.failures],
        }


def validate_code(c: CodeInstance) -> ValidationReport:
    """Structural checks on a code; collects every failure instead of raising."""
    failures: list[ValidationFailure] = []
    gens = list(c.generators)
    for i, g in enumerate(gens):
        if g.num_qubits != c.num_qubits:
            failures.append(ValidationFailure("width", f"generator {i} acts on {g.num_qubits} qubits", (i,)))
        elif not g.is_hermitian:
            failures.append(ValidationFailure("hermitian", f"generator {i} has phase i^{g.phase}", (i,)))
        elif g.is_identity:
            failures.append(ValidationFailure("identity", f"generator {i} is a multiple of identity", (i,)))
    if failures:
        return ValidationReport(c.id, failures, 0, len(gens))

    n = c.num_qubits
    vecs = [symplectic_vector(g) for g in gens]
    xs = [g.x for g in gens]
    zs = [g.z for g in gens]
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if ((xs[i] & zs[j]).bit_count() + (zs[i] & xs[j]).bit_count()) & 1:
                failures.append(ValidationFailure("commutation", f"generators {i} and {j} anticommute", (i, j)))

    # Gaussian elimination that also tracks the signed product of the rows used.
    basis: dict[int, tuple[int, PauliString, int]] = {}
    rank = 0
    for i, (v, g) in enumerate(zip(vecs, gens)):
        acc, used = g, 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = (v, acc, used)
                rank += 1
                break
            bv, bp, bu = basis[top]
            v ^= bv
            acc = multiply(acc, bp)
            used ^= bu
        else:
            idx = tuple(j for j in range(len(gens)) if (used >> j) & 1)
            failures.append(ValidationFailure("rank", f"generator {i} is dependent on earlier ones", idx))
            if acc.phase == 2:
                failures.append(ValidationFailure("minus_identity", "a product of generators equals -I", idx))
    if n - len(gens) != c.num_logical and rank == len(gens):
        failures.append(
            ValidationFailure("parameters", f"n - k_i = {n - len(gens)} but num_logical is {c.num_logical}")
        )
    return ValidationReport(c.id, failures, rank, len(gens))


# -- products ----------------------------------------------------------------------
def tensor_product(a: CodeInstance, b: CodeInstance) -> CodeInstance:
    """Joint stabilizer group of a and b on disjoint registers (a first)."""
    if a.num_qubits == 0:
        return b
    if b.num_qubits == 0:
        return a
    n = a.num_qubits + b.num_qubits
    gens = [g.extended(n) for g in a.generators]
    gens += [g.shifted(a.num_qubits, n) for g in b.generators]
    return CodeInstance(
        id=f"{a.id}+{b.id}",
        family="tensor_product",
        num_qubits=n,
        generators=tuple(gens),
        num_logical=a.num_logical + b.num_logical,
        distance=min(a.distance, b.distance),
        parents=(a.id, b.id),
    )


# -- distance ----------------------------------------------------------------------
def _is_css(c: CodeInstance) -> bool:
    return all(g.x == 0 or g.z == 0 for g in c.generators)


def _search_cost(n: int, max_weight: int, per_site: int) -> int:
    return sum(math.comb(n, w) * per_site**w for w in range(1, max_weight + 1))


def _min_binary_logical(n: int, checks: Sequence[int], group: Sequence[int], max_weight: int) -> int | None:
    """Smallest |u| with u orthogonal to every check and u outside span(group)."""
    syn = [sum(1 << j for j, r in enumerate(checks) if (r >> q) & 1) for q in range(n)]
    span = EchelonBasis(group)
    for w in range(1, max_weight + 1):
        for support in itertools.combinations(range(n), w):
            s = 0
            for q in support:
                s ^= syn[q]
            if s:
                continue
            u = 0
            for q in support:
                u |= 1 << q
            if not span.contains(u):
                return w
    return None


def brute_force_distance(
    c: CodeInstance, max_weight: int, budget: int = DEFAULT_SEARCH_BUDGET
) -> int | None:
    """Minimum weight of a Pauli that commutes with every generator but is not in the group.

    Enumerates candidates by increasing weight.  Returns None when no such
    Pauli has weight <= max_weight, or when the search would exceed budget.
    """
    n = c.num_qubits
    max_weight = min(max_weight, n)
    gens = list(c.generators)
    if _is_css(c):
        if 2 * _search_cost(n, max_weight, 1) > budget:
            return None
        xg = [g.x for g in gens if g.x]
        zg = [g.z for g in gens if g.z]
        dx = _min_binary_logical(n, zg, xg, max_weight)
        dz = _min_binary_logical(n, xg, zg, max_weight)
        found = [d for d in (dx, dz) if d is not None]
        return min(found) if found else None

    if _search_cost(n, max_weight, 3) > budget:
        return None
    # syndrome of a single-qubit X, Z on each qubit (Y is their xor)
    sx = [sum(1 << j for j, g in enumerate(gens) if (g.z >> q) & 1) for q in range(n)]
    sz = [sum(1 << j for j, g in enumerate(gens) if (g.x >> q) & 1) for q in range(n)]
    span = EchelonBasis(symplectic_vector(g) for g in gens)
    for w in range(1, max_weight + 1):
        for support in itertools.combinations(range(n), w):
            for letters in itertools.product((1, 2, 3), repeat=w):
                s = 0
                x = z = 0
                for q, p in zip(support, letters):
                    if p & 1:
                        s ^= sx[q]
                        x |= 1 << q
                    if p & 2:
                        s ^= sz[q]
                        z |= 1 << q
                if s == 0 and not span.contains(x | (z << n)):
                    return w
    return None
