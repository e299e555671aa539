"""The three verification tools, stateless and as budgeted sessions.

Responses are plain JSON-ready dicts.  Every response carries ``success`` and
``quality`` (a fraction string) so scores can be recomputed from the raw
attempt log alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from ..circuit import CostTuple, cost, parse_circuit
from ..codes.model import CodeInstance
from ..errors import StabBenchError, StructuralError
from ..faults import ft_score
from ..pauli import PauliString
from ..scoring import InstanceResult, Task, b1_success, b2_improvement, b2_quality, better, frac_str
from ..tableau import check_stabilizers
from .instances import ProblemInstance

TOOL_NAMES = {
    Task.B1: "check_stabilizers",
    Task.B2: "evaluate_optimization",
    Task.B3: "check_fault_tolerance",
}


def error_payload(exc: BaseException) -> dict[str, Any]:
    code = getattr(exc, "code", "internal_error")
    out: dict[str, Any] = {"code": code, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            out[attr] = getattr(exc, attr)
    return out


def check_stabilizers_tool(circuit_text: str, generators: Sequence[PauliString]) -> dict[str, Any]:
    c = parse_circuit(circuit_text)
    rep = check_stabilizers(c, generators)
    ok, q = b1_success(rep)
    return {**rep.to_dict(), "success": ok, "quality": frac_str(q if ok else Fraction(0))}


def evaluate_optimization_tool(
    circuit_text: str, generators: Sequence[PauliString], baseline: CostTuple | str
) -> dict[str, Any]:
    c = parse_circuit(circuit_text)
    n = generators[0].num_qubits if generators else 0
    if c.num_qubits > n:
        raise StructuralError(f"candidate uses qubit {c.num_qubits - 1}; only 0..{n - 1} are allowed")
    base = cost(parse_circuit(baseline)) if isinstance(baseline, str) else CostTuple(*baseline)
    rep = check_stabilizers(c, generators)
    cand = cost(c)
    improved = b2_improvement(cand, base)
    ok = rep.valid and improved
    q = b2_quality(base, cand) if ok else Fraction(0)
    return {
        "valid": rep.valid,
        "preserved": rep.satisfied_count,
        "total": rep.num_generators,
        "per_generator": [s.value for s in rep.statuses],
        "g2q": cand.g2q,
        "depth": cand.depth,
        "baseline": {"g2q": base.g2q, "depth": base.depth},
        "improvement": improved,
        "success": ok,
        "quality": frac_str(q),
    }


def check_fault_tolerance_tool(
    circuit_text: str,
    code: CodeInstance,
    baseline_ft: Fraction | str | None = None,
    workers: int = 1,
    should_cancel: Callable[[], bool] | None = None,
) -> dict[str, Any]:
    c = parse_circuit(circuit_text)
    rep = check_stabilizers(c, code.generators)
    out: dict[str, Any] = {
        "valid": rep.valid,
        "preserved": rep.satisfied_count,
        "total": rep.num_generators,
        "per_generator": [s.value for s in rep.statuses],
    }
    base = Fraction(baseline_ft) if baseline_ft is not None else None
    if not rep.valid:
        return {**out, "ft_score": None, "success": False, "quality": "0/1"}
    ft = ft_score(c, code, workers=workers, should_cancel=should_cancel, check_preparation=False)
    ok = base is None or ft.ft_score > base
    q = ft.ft_score if ok and base is not None else Fraction(0)
    return {
        **out,
        "ft_score": frac_str(ft.ft_score),
        "ft_score_float": float(ft.ft_score),
        "baseline_ft": frac_str(base) if base is not None else None,
        "ft_report": ft.to_dict(),
        "success": ok and base is not None,
        "quality": frac_str(q),
    }


def evaluate(
    instance: ProblemInstance,
    circuit_text: str,
    workers: int = 1,
    should_cancel: Callable[[], bool] | None = None,
) -> dict[str, Any]:
    """Run the task's tool; oracle errors become an ``error`` payload."""
    try:
        if instance.task is Task.B1:
            return check_stabilizers_tool(circuit_text, instance.code.generators)
        if instance.task is Task.B2:
            return evaluate_optimization_tool(circuit_text, instance.code.generators, instance.baseline_cost)
        return check_fault_tolerance_tool(
            circuit_text, instance.code, instance.baseline_ft, workers, should_cancel
        )
    except StabBenchError as exc:
        if exc.code == "cancelled":
            raise
        return {"error": error_payload(exc), "success": False, "quality": "0/1"}


def result_from_response(instance: ProblemInstance, response: dict[str, Any], attempt: int) -> InstanceResult:
    cand = None
    if "g2q" in response:
        cand = CostTuple(response["g2q"], response["depth"])
    ft = response.get("ft_score")
    return InstanceResult(
        code_id=instance.code.id,
        task=instance.task,
        success=bool(response.get("success")),
        quality=Fraction(response.get("quality", "0/1")),
        satisfied_generators=int(response.get("satisfied", response.get("preserved", 0)) or 0),
        candidate_cost=cand,
        ft=Fraction(ft) if ft else None,
        attempts_used=attempt,
    )


class BudgetExhausted(StabBenchError):
    code = "budget_exhausted"


@dataclass
class OracleSession:
    """One instance's tool, metered by an attempt budget; keeps the best result."""

    instance: ProblemInstance
    attempts: int = 10
    workers: int = 1
    used: int = 0
    history: list[dict[str, Any]] = field(default_factory=list)
    best: InstanceResult | None = None

    @property
    def remaining(self) -> int:
        return self.attempts - self.used

    @property
    def tool(self) -> str:
        return TOOL_NAMES[self.instance.task]

    def submit(self, circuit_text: str, should_cancel: Callable[[], bool] | None = None) -> dict[str, Any]:
        if self.remaining <= 0:
            return {
                "tool": self.tool,
                "error": {"code": BudgetExhausted.code, "message": f"all {self.attempts} attempts used"},
                "remaining_attempts": 0,
                "success": False,
                "quality": "0/1",
            }
        # the attempt is spent before evaluation so malformed input still counts
        self.used += 1
        response = {"tool": self.tool, **evaluate(self.instance, circuit_text, self.workers, should_cancel)}
        response["remaining_attempts"] = self.remaining
        response["attempt"] = self.used
        self.history.append({"attempt": self.used, "circuit": circuit_text, "response": response})
        self.best = better(self.best, result_from_response(self.instance, response, self.used))
        return response
