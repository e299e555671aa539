"""Problem instances: a code plus the task-specific baseline the agent starts from."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from ..circuit import CostTuple, cost, emit_circuit, parse_circuit
from ..codes.model import CodeInstance
from ..pauli import emit_pauli
from ..scoring import Task, frac_str
from ..synth import make_b2_baseline, make_b3_baseline


@dataclass
class ProblemInstance:
    code: CodeInstance
    task: Task
    baseline_text: str | None = None
    baseline_cost: CostTuple | None = None
    baseline_ft: Fraction | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def id(self) -> str:
        return f"{self.task.value}:{self.code.id}"

    @property
    def has_headroom(self) -> bool:
        return self.task is not Task.B3 or (self.baseline_ft is not None and self.baseline_ft < 1)

    def inputs(self) -> dict[str, Any]:
        """What the agent is told about the problem."""
        out: dict[str, Any] = {
            "code_id": self.code.id,
            "num_qubits": self.code.n,
            "generators": [emit_pauli(g) for g in self.code.generators],
        }
        if self.task is Task.B2:
            out["baseline_circuit"] = self.baseline_text
            out["baseline_cost"] = {"g2q": self.baseline_cost.g2q, "depth": self.baseline_cost.depth}
        if self.task is Task.B3:
            out["baseline_circuit"] = self.baseline_text
            out["baseline_ft"] = frac_str(self.baseline_ft)
            out["distance"] = self.code.distance
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "task": self.task.value,
            "code": self.code.to_dict(),
            "baseline_circuit": self.baseline_text,
            "baseline_cost": list(self.baseline_cost) if self.baseline_cost else None,
            "baseline_ft": frac_str(self.baseline_ft) if self.baseline_ft is not None else None,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ProblemInstance":
        return cls(
            code=CodeInstance.from_dict(d["code"]),
            task=Task(d["task"]),
            baseline_text=d.get("baseline_circuit"),
            baseline_cost=CostTuple(*d["baseline_cost"]) if d.get("baseline_cost") else None,
            baseline_ft=Fraction(d["baseline_ft"]) if d.get("baseline_ft") else None,
            metadata=dict(d.get("metadata") or {}),
        )


def make_instance(code: CodeInstance, task: Task | str, workers: int = 1) -> ProblemInstance:
    task = Task(task)
    if task is Task.B1:
        return ProblemInstance(code, task)
    if task is Task.B2:
        b = make_b2_baseline(code)
        return ProblemInstance(code, task, emit_circuit(b.circuit), cost(b.circuit), metadata=b.metadata)
    b = make_b3_baseline(code, workers=workers)
    return ProblemInstance(
        code, task, emit_circuit(b.circuit), cost(b.circuit), Fraction(b.metadata["baseline_ft"]), b.metadata
    )


def _make(args) -> ProblemInstance:
    return make_instance(*args)


def build_instances(codes: Iterable[CodeInstance], task: Task | str, workers: int = 1) -> list[ProblemInstance]:
    """Instances for every code, in order.  B3 drops codes without headroom."""
    jobs = [(c, Task(task)) for c in codes]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            out = list(pool.map(_make, jobs, chunksize=4))
    else:
        out = [_make(j) for j in jobs]
    return [p for p in out if p.has_headroom]


def baseline_circuit(p: ProblemInstance):
    return parse_circuit(p.baseline_text or "")
