"""Single-fault enumeration, Pauli-frame propagation and the FT score.

A fault location ``(qubit, layer, pauli)`` injects a single-qubit Pauli after
ASAP layer ``layer`` (0 = before the first layer).  The injected Pauli is
conjugated through the remaining layers: resets erase the frame on their qubit
and measurements record a flip when the frame has an X component there.

Two routes compute the same thing:

* :func:`propagate_fault` walks one fault gate by gate with exact phases;
* :func:`ft_score` sweeps the circuit backwards once, keeping the final
  symplectic image (error bits plus measurement flips) of every single-qubit
  X and Z at every layer boundary, so each location costs one lookup.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple

from .circuit import CircuitIR, Op, layered_view
from .codes.model import CodeInstance
from .errors import Cancelled, InvalidCandidate
from .gates import GateKind
from .pauli import PauliString, conjugate_by_gate
from .tableau import check_stabilizers


class FaultPauli(str, enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


class FaultLocation(NamedTuple):
    qubit: int
    layer: int
    pauli: FaultPauli


@dataclass
class PropagationResult:
    error: PauliString
    data_weight: int
    flag_flips: list[int]
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "error": str(self.error),
            "data_weight": self.data_weight,
            "flag_flips": self.flag_flips,
            "flagged": self.flagged,
        }


def enumerate_fault_locations(c: CircuitIR, num_qubits: int | None = None) -> list[FaultLocation]:
    """Every (qubit, layer, pauli) with layer in [0, depth]; idle wires included."""
    n = max(c.num_qubits, num_qubits or 0)
    m = len(layered_view(c))
    return [FaultLocation(q, j, p) for j in range(m + 1) for q in range(n) for p in FaultPauli]


def _measurement_index(c: CircuitIR) -> dict[tuple[int, tuple[int, ...]], int]:
    """Position in the measurement record of every M application."""
    out = {}
    for op in c.ops():
        if op.kind is GateKind.M:
            out[(op.instruction, op.qubits)] = len(out)
    return out


def _check_location(f: FaultLocation, n: int, m: int) -> None:
    if not 0 <= f.qubit < n:
        raise ValueError(f"fault qubit {f.qubit} outside register of {n} qubits")
    if not 0 <= f.layer <= m:
        raise ValueError(f"fault layer {f.layer} outside [0, {m}]")


def propagate_fault(
    c: CircuitIR,
    f: FaultLocation,
    data_qubits: Iterable[int],
    num_qubits: int | None = None,
) -> PropagationResult:
    """Exact gate-by-gate frame propagation of one fault.

    ``flagged`` is true when any measurement outcome flips relative to the
    fault-free run (which must itself read all zeros to be accepted).
    """
    data = set(data_qubits)
    n = max(c.num_qubits, num_qubits or 0, max(data, default=-1) + 1)
    layers = layered_view(c)
    _check_location(f, n, len(layers))
    mindex = _measurement_index(c)
    flips = [0] * len(mindex)
    frame = PauliString.single(n, f.qubit, FaultPauli(f.pauli).value)
    for layer in layers[f.layer :]:
        for op in layer:
            frame = _step(frame, op, flips, mindex)
    dmask = sum(1 << q for q in data if q < n)
    return PropagationResult(
        error=frame,
        data_weight=((frame.x | frame.z) & dmask).bit_count(),
        flag_flips=flips,
        flagged=any(flips),
    )


def _step(frame: PauliString, op: Op, flips: list[int], mindex) -> PauliString:
    kind = op.kind
    if kind is GateKind.R:
        keep = ~(1 << op.qubits[0])
        return PauliString(frame.num_qubits, frame.x & keep, frame.z & keep, frame.phase)
    if kind is GateKind.M:
        flips[mindex[(op.instruction, op.qubits)]] = (frame.x >> op.qubits[0]) & 1
        return frame
    if kind is GateKind.TICK:
        return frame
    return conjugate_by_gate(frame, kind, op.qubits)


def weight_of_variant(c: CircuitIR, f: FaultLocation, data_qubits: Iterable[int] | None = None) -> int:
    data = set(range(c.num_qubits)) if data_qubits is None else set(data_qubits)
    return propagate_fault(c, f, data).data_weight


# -- whole-circuit sweep ------------------------------------------------------------
def boundary_images(c: CircuitIR, n: int) -> tuple[list[list[int]], int]:
    """Final images of single-qubit X and Z injected after each layer.

    Returns ``images`` with ``images[j][q]`` the image of X_q and
    ``images[j][n + q]`` that of Z_q after layer j, packed as
    ``x | z << n | flips << 2n``, plus the measurement count.  Phases are
    dropped; they never affect weights or flips.
    """
    layers = layered_view(c)
    mindex = _measurement_index(c)
    img = [1 << q for q in range(n)] + [1 << (n + q) for q in range(n)]
    out = [img]
    for layer in reversed(layers):
        img = list(img)
        for op in layer:
            _pull_back(img, op, n, mindex)
        out.append(img)
    out.reverse()
    return out, len(mindex)


def _pull_back(img: list[int], op: Op, n: int, mindex) -> None:
    """Turn images-after-op into images-before-op, in place."""
    kind, qs = op.kind, op.qubits
    if kind in (GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.TICK):
        return
    if kind is GateKind.H:
        q = qs[0]
        img[q], img[n + q] = img[n + q], img[q]
    elif kind in (GateKind.S, GateKind.S_DAG):
        q = qs[0]
        img[q] ^= img[n + q]
    elif kind is GateKind.CX:
        a, b = qs
        img[a] ^= img[b]
        img[n + b] ^= img[n + a]
    elif kind is GateKind.CZ:
        a, b = qs
        img[a] ^= img[n + b]
        img[b] ^= img[n + a]
    elif kind is GateKind.SWAP:
        a, b = qs
        img[a], img[b] = img[b], img[a]
        img[n + a], img[n + b] = img[n + b], img[n + a]
    elif kind is GateKind.R:
        q = qs[0]
        img[q] = 0
        img[n + q] = 0
    elif kind is GateKind.M:
        q = qs[0]
        img[q] ^= 1 << (2 * n + mindex[(op.instruction, qs)])
    else:  # pragma: no cover
        raise ValueError(f"cannot propagate through {kind}")


@dataclass
class FTReport:
    total_locations: int
    dangerous_count: int
    flagged_dangerous: int
    ft_score: Fraction
    max_unflagged_weight: int
    is_fault_tolerant: bool
    threshold: int
    fault_free_accepted: bool
    false_flags: int = 0
    flag_qubit_faults: int = 0
    unflagged_dangerous: list[FaultLocation] = field(default_factory=list)

    def to_dict(self, max_examples: int = 20) -> dict:
        return {
            "total_locations": self.total_locations,
            "dangerous_count": self.dangerous_count,
            "flagged_dangerous": self.flagged_dangerous,
            "ft_score": f"{self.ft_score.numerator}/{self.ft_score.denominator}",
            "ft_score_float": float(self.ft_score),
            "max_unflagged_weight": self.max_unflagged_weight,
            "is_fault_tolerant": self.is_fault_tolerant,
            "threshold": self.threshold,
            "fault_free_accepted": self.fault_free_accepted,
            "false_flags": self.false_flags,
            "flag_qubit_faults": self.flag_qubit_faults,
            "unflagged_dangerous_examples": [
                {"qubit": f.qubit, "layer": f.layer, "pauli": f.pauli.value}
                for f in self.unflagged_dangerous[:max_examples]
            ],
        }


class _Tally(NamedTuple):
    dangerous: int
    flagged_dangerous: int
    max_unflagged: int
    false_flags: int
    flag_faults: int
    unflagged: list[FaultLocation]


def _tally_layers(
    images: list[list[int]], layers: range, n: int, data_mask: int, t: int
) -> _Tally:
    nn = 2 * n
    full = (1 << n) - 1
    dangerous = flagged_d = max_unflagged = false_flags = flag_faults = 0
    unflagged: list[FaultLocation] = []
    for j in layers:
        img = images[j]
        for q in range(n):
            ix, iz = img[q], img[n + q]
            for p, v in ((FaultPauli.X, ix), (FaultPauli.Y, ix ^ iz), (FaultPauli.Z, iz)):
                w = (((v & full) | ((v >> n) & full)) & data_mask).bit_count()
                flagged = (v >> nn) != 0
                if not (data_mask >> q) & 1:
                    flag_faults += 1
                if w > t:
                    dangerous += 1
                    if flagged:
                        flagged_d += 1
                    else:
                        unflagged.append(FaultLocation(q, j, p))
                elif flagged:
                    false_flags += 1
                if not flagged and w > max_unflagged:
                    max_unflagged = w
    return _Tally(dangerous, flagged_d, max_unflagged, false_flags, flag_faults, unflagged)


def _tally_chunk(args) -> _Tally:
    return _tally_layers(*args)


def ft_score(
    c: CircuitIR,
    code: CodeInstance,
    workers: int = 1,
    should_cancel: Callable[[], bool] | None = None,
    check_preparation: bool = True,
) -> FTReport:
    """Fraction of dangerous single faults (data weight > t) that trip a flag.

    Raises InvalidCandidate if c does not prepare the code state and
    IllFormedFlagGadget if a fault-free measurement is random.
    """
    n = max(code.num_qubits, c.num_qubits)
    if check_preparation:
        rep = check_stabilizers(c, code.generators)
        if not rep.valid:
            raise InvalidCandidate(
                f"circuit prepares {rep.satisfied_count}/{rep.num_generators} generators"
            )
        outcomes = rep.flag_outcomes
    else:
        from .tableau import deterministic_flag_outcomes

        outcomes = deterministic_flag_outcomes(c, range(code.num_qubits))
    baseline = sum(b << i for i, b in enumerate(outcomes))
    t = (code.distance - 1) // 2
    data_mask = (1 << code.num_qubits) - 1

    images, _ = boundary_images(c, n)
    num_layers = len(images)
    # chunk by layer boundary; reduction below is order independent
    step = max(1, num_layers // max(1, 4 * workers))
    chunks = [range(s, min(s + step, num_layers)) for s in range(0, num_layers, step)]
    tallies: list[_Tally] = []
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [
                pool.submit(_tally_chunk, (images, ch, n, data_mask, t))
                for ch in chunks
            ]
            for fut in futures:
                if should_cancel and should_cancel():
                    for other in futures:
                        other.cancel()
                    raise Cancelled("fault-tolerance evaluation cancelled")
                tallies.append(fut.result())
    else:
        for ch in chunks:
            if should_cancel and should_cancel():
                raise Cancelled("fault-tolerance evaluation cancelled")
            tallies.append(_tally_layers(images, ch, n, data_mask, t))

    dangerous = sum(x.dangerous for x in tallies)
    flagged_d = sum(x.flagged_dangerous for x in tallies)
    score = Fraction(flagged_d, dangerous) if dangerous else Fraction(1)
    accepted = baseline == 0
    return FTReport(
        total_locations=n * num_layers * 3,
        dangerous_count=dangerous,
        flagged_dangerous=flagged_d,
        ft_score=score,
        max_unflagged_weight=max((x.max_unflagged for x in tallies), default=0),
        is_fault_tolerant=score == 1 and accepted,
        threshold=t,
        fault_free_accepted=accepted,
        false_flags=sum(x.false_flags for x in tallies),
        flag_qubit_faults=sum(x.flag_faults for x in tallies),
        unflagged_dangerous=[f for x in tallies for f in x.unflagged],
    )


def iter_results(
    c: CircuitIR, data_qubits: Iterable[int], num_qubits: int | None = None
) -> Iterator[tuple[FaultLocation, PropagationResult]]:
    """Exact propagation for every location (slow path, for inspection and tests)."""
    data = set(data_qubits)
    n = max(c.num_qubits, num_qubits or 0, max(data, default=-1) + 1)
    for f in enumerate_fault_locations(c, n):
        yield f, propagate_fault(c, f, data, n)
