"""Deterministic circuit rewrites used by the built-in reference agent."""

from __future__ import annotations

from ..circuit import CircuitIR, from_ops
from ..gates import GateKind

SELF_INVERSE = {GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.CX, GateKind.CZ, GateKind.SWAP}
SYMMETRIC = {GateKind.CZ, GateKind.SWAP}


def _key(kind: GateKind, qubits: tuple[int, ...]) -> tuple:
    return (kind, tuple(sorted(qubits)) if kind in SYMMETRIC else qubits)


def cancel_adjacent_inverses(c: CircuitIR) -> CircuitIR:
    """Drop gate pairs that multiply to identity with nothing between them on their wires.

    Works as a stack, so cancellations cascade (``A B B A`` vanishes).
    """
    out: list[tuple[GateKind, tuple[int, ...]] | None] = []
    last: dict[int, int] = {}
    for op in c.ops():
        kind, qs = op.kind, op.qubits
        if kind is GateKind.TICK:
            continue
        idx = {last.get(q) for q in qs}
        if len(idx) == 1 and None not in idx:
            j = idx.pop()
            prev = out[j]
            if prev is not None and all(q in qs for q in prev[1]) and len(prev[1]) == len(qs):
                pk, pq = prev
                inverse = pk in SELF_INVERSE and _key(pk, pq) == _key(kind, qs)
                inverse = inverse or (pk.is_unitary and pk.inverse is kind and pk is not kind and pq == qs)
                if inverse:
                    out[j] = None
                    for q in qs:
                        # rewind each wire to its previous surviving gate
                        k = j - 1
                        while k >= 0 and (out[k] is None or q not in out[k][1]):
                            k -= 1
                        if k >= 0:
                            last[q] = k
                        else:
                            last.pop(q, None)
                    continue
        out.append((kind, qs))
        for q in qs:
            last[q] = len(out) - 1
    kept = [o for o in out if o is not None]
    width = c.num_qubits
    if width and not any(width - 1 in qs for _, qs in kept):
        kept.append((GateKind.I, (width - 1,)))
    return from_ops(kept)


def add_flag_gadgets(c: CircuitIR, num_data: int, min_run: int = 2) -> CircuitIR:
    """Wrap spreading gate runs in flag gadgets.

    A run is a maximal stretch of a wire's gates in which the wire is the
    control of CX/CZ gates (X faults spread) or the target of CX gates (Z
    faults spread).  Control runs get CX(q, f) at both ends; target runs get
    a |+> flag with CX(f, q) at both ends.  Every flag is measured at the end.
    """
    ops = [(op.kind, op.qubits) for op in c.ops() if op.kind is not GateKind.TICK]
    per_wire: dict[int, list[tuple[int, str | None]]] = {}
    for i, (kind, qs) in enumerate(ops):
        for pos, q in enumerate(qs):
            role = None
            if kind is GateKind.CX:
                role = "control" if pos == 0 else "target"
            elif kind is GateKind.CZ:
                role = "control"
            per_wire.setdefault(q, []).append((i, role))

    before: dict[int, list] = {}
    after: dict[int, list] = {}
    flags: list[tuple[int, str]] = []
    next_flag = max(num_data, c.num_qubits)
    for q in sorted(per_wire):
        seq = per_wire[q]
        start = 0
        while start < len(seq):
            role = seq[start][1]
            end = start
            while end + 1 < len(seq) and role is not None and seq[end + 1][1] == role:
                end += 1
            if role is not None and end - start + 1 >= min_run:
                f = next_flag
                next_flag += 1
                first, last = seq[start][0], seq[end][0]
                if role == "control":
                    gadget = (GateKind.CX, (q, f))
                    before.setdefault(first, []).append(gadget)
                    after.setdefault(last, []).append(gadget)
                else:
                    before.setdefault(first, []).extend([(GateKind.H, (f,)), (GateKind.CX, (f, q))])
                    after.setdefault(last, []).extend([(GateKind.CX, (f, q)), (GateKind.H, (f,))])
                flags.append((f, role))
            start = end + 1

    out = []
    for i, op in enumerate(ops):
        out.extend(before.get(i, []))
        out.append(op)
        out.extend(after.get(i, []))
    out.extend((GateKind.M, (f,)) for f, _ in flags)
    return from_ops(out)
