"""Deterministic state-preparation synthesis and task baselines.

``synthesize_prep`` reduces the generator matrix to single-qubit Z checks
with H, S, CX and CZ column operations (rows are combined freely), then
emits the inverse of that reduction.  Signs are repaired afterwards with
terminal X/Z gates found by solving a GF(2) system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import CircuitIR, cost, from_ops
from .codes.model import CodeInstance
from .gates import TWO_QUBIT_GATES, GateKind
from .gf2 import solve, symplectic_vector
from .pauli import PauliString
from .tableau import GenStatus, check_stabilizers, validate_generator_set

H, S, CX, CZ = GateKind.H, GateKind.S, GateKind.CX, GateKind.CZ


def _reduction_gates(generators: Sequence[PauliString], n: int) -> list[tuple[GateKind, tuple[int, ...]]]:
    """Gates G with G S G^dagger generated by single-qubit Zs (signs ignored)."""
    k = len(generators)
    x = np.array([[(g.x >> q) & 1 for q in range(n)] for g in generators], dtype=np.uint8).reshape(k, n)
    z = np.array([[(g.z >> q) & 1 for q in range(n)] for g in generators], dtype=np.uint8).reshape(k, n)
    gates: list[tuple[GateKind, tuple[int, ...]]] = []

    def h(q):
        gates.append((H, (q,)))
        x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()

    def s(q):
        gates.append((S, (q,)))
        z[:, q] ^= x[:, q]

    def cx(a, b):
        gates.append((CX, (a, b)))
        x[:, b] ^= x[:, a]
        z[:, a] ^= z[:, b]

    def cz(a, b):
        gates.append((CZ, (a, b)))
        z[:, a] ^= x[:, b]
        z[:, b] ^= x[:, a]

    free = np.ones(n, dtype=bool)
    done = np.zeros(k, dtype=bool)
    for _ in range(k):
        # prefer rows that are already pure Z on the free qubits: they need no H
        candidates = [i for i in range(k) if not done[i] and (x[i] | z[i])[free].any()]
        if not candidates:
            raise ValueError("generators are not independent")
        pure_z = [i for i in candidates if not x[i][free].any()]
        i = pure_z[0] if pure_z else candidates[0]
        row_free = np.flatnonzero(free & ((x[i] | z[i]) == 1))
        if pure_z:
            p = int(row_free[-1])
            for q in row_free[:-1]:
                cx(int(q), p)
        else:
            p = int(np.flatnonzero(free & (x[i] == 1))[0])
            for q in np.flatnonzero(free & (x[i] == 1)):
                if q != p:
                    cx(p, int(q))
            for q in np.flatnonzero(free & (z[i] == 1)):
                if q != p:
                    cz(p, int(q))
            if z[i, p]:
                s(p)
            h(p)
        # row i is now Z_p on the free qubits; clear p from every other row
        others = np.flatnonzero(z[:, p] == 1)
        for j in others:
            if j != i:
                x[j] ^= x[i]
                z[j] ^= z[i]
        free[p] = False
        done[i] = True
    return gates


def synthesize_prep(generators: Sequence[PauliString] | CodeInstance) -> CircuitIR:
    """Circuit on |0...0> whose output is a +1 eigenstate of every generator."""
    gens = list(generators.generators if isinstance(generators, CodeInstance) else generators)
    n = validate_generator_set(gens)
    ops = [(k.inverse, qs) for k, qs in reversed(_reduction_gates(gens, n))]
    if n and not any(n - 1 in qs for _, qs in ops):
        # keep the register width explicit even if the last qubit is idle
        ops.append((GateKind.I, (n - 1,)))
    report = check_stabilizers(from_ops(ops), gens)
    if any(st is GenStatus.FAIL for st in report.statuses):  # pragma: no cover
        raise AssertionError("reduction left a generator unsatisfied")
    if not report.valid:
        # Pauli anticommuting with exactly the sign-failing generators; the
        # low half of u pairs with x bits (so it is the fix's z part)
        rows = [symplectic_vector(g) for g in gens]
        rhs = [int(st is GenStatus.SIGN_FAIL) for st in report.statuses]
        u = solve(rows, rhs, 2 * n)
        if u is None:  # pragma: no cover
            raise AssertionError("sign system inconsistent for independent generators")
        px, pz = u >> n, u & ((1 << n) - 1)
        letters = {(1, 0): GateKind.X, (0, 1): GateKind.Z, (1, 1): GateKind.Y}
        for q in range(n):
            bits = ((px >> q) & 1, (pz >> q) & 1)
            if bits in letters:
                ops.append((letters[bits], (q,)))
    return from_ops(ops)


# -- baselines -------------------------------------------------------------------
@dataclass
class Baseline:
    circuit: CircuitIR
    metadata: dict


def inflate(c: CircuitIR, stride: int = 2) -> tuple[CircuitIR, int]:
    """Insert a cancelling copy pair after every ``stride``-th two-qubit gate.

    Returns the new circuit and the number of inserted pairs.
    """
    ops = []
    pairs = 0
    seen = 0
    for op in c.ops():
        ops.append((op.kind, op.qubits))
        if op.kind in TWO_QUBIT_GATES:
            if seen % stride == 0:
                ops.extend([(op.kind, op.qubits)] * 2)
                pairs += 1
            seen += 1
    return from_ops(ops), pairs


def make_b2_baseline(code: CodeInstance, stride: int = 2) -> Baseline:
    prep = synthesize_prep(code)
    out, pairs = inflate(prep, stride)
    before, after = cost(prep), cost(out)
    return Baseline(
        out,
        {
            "inflation": "cancelling-pairs",
            "stride": stride,
            "inserted_pairs": pairs,
            "synth_cost": list(before),
            "baseline_cost": list(after),
            "inflation_factor": (after.g2q / before.g2q) if before.g2q else 1.0,
        },
    )


def make_b3_baseline(code: CodeInstance, workers: int = 1) -> Baseline:
    from .faults import ft_score

    prep = synthesize_prep(code)
    rep = ft_score(prep, code, workers=workers)
    return Baseline(
        prep,
        {
            "baseline_ft": f"{rep.ft_score.numerator}/{rep.ft_score.denominator}",
            "dangerous_count": rep.dangerous_count,
            "b3_headroom": rep.ft_score < 1,
        },
    )
