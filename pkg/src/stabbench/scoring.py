"""Success predicates, quality factors and suite-level score aggregation.

Every score is an exact ``Fraction``; floats appear only when serializing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .circuit import CostTuple
from .tableau import StabReport


class Task(str, enum.Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"


# stabilizer-count buckets for the difficulty breakdown (upper bounds inclusive)
SIZE_BUCKETS: tuple[tuple[int, int], ...] = ((1, 10), (11, 38), (39, 100), (101, 132), (133, 200), (201, 10**9))

B2_GATE_WEIGHT = Fraction(3, 4)
B2_DEPTH_WEIGHT = Fraction(1, 4)


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_frac(text: str | int | float | Fraction) -> Fraction:
    return Fraction(text)


@dataclass
class InstanceResult:
    code_id: str
    task: Task
    success: bool
    quality: Fraction = Fraction(0)
    satisfied_generators: int = 0
    candidate_cost: CostTuple | None = None
    ft: Fraction | None = None
    attempts_used: int = 0

    def __post_init__(self) -> None:
        self.task = Task(self.task)
        self.quality = Fraction(self.quality)
        if not 0 <= self.quality <= 1:
            raise ValueError(f"quality {self.quality} outside [0, 1]")
        if self.ft is not None:
            self.ft = Fraction(self.ft)
        if self.candidate_cost is not None:
            self.candidate_cost = CostTuple(*self.candidate_cost)

    def rank_key(self) -> tuple[bool, Fraction]:
        return (self.success, self.quality if self.success else Fraction(0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "code_id": self.code_id,
            "task": self.task.value,
            "success": self.success,
            "quality": frac_str(self.quality),
            "satisfied_generators": self.satisfied_generators,
            "candidate_cost": list(self.candidate_cost) if self.candidate_cost else None,
            "ft": frac_str(self.ft) if self.ft is not None else None,
            "attempts_used": self.attempts_used,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "InstanceResult":
        return cls(
            code_id=d["code_id"],
            task=Task(d["task"]),
            success=bool(d["success"]),
            quality=parse_frac(d.get("quality", 0)),
            satisfied_generators=int(d.get("satisfied_generators", 0)),
            candidate_cost=CostTuple(*d["candidate_cost"]) if d.get("candidate_cost") else None,
            ft=parse_frac(d["ft"]) if d.get("ft") is not None else None,
            attempts_used=int(d.get("attempts_used", 0)),
        )


# -- per-task predicates ---------------------------------------------------------
def b1_success(report: StabReport) -> tuple[bool, Fraction]:
    return report.valid, Fraction(1)


def b2_improvement(candidate: Sequence[int], baseline: Sequence[int]) -> bool:
    """Strict lexicographic (G_2Q, depth) improvement; ties are not improvements."""
    return tuple(candidate) < tuple(baseline)


def _delta(base: int, new: int) -> Fraction:
    if base <= 0:
        return Fraction(0)
    return min(Fraction(1), max(Fraction(0), Fraction(base - new, base)))


def b2_quality(baseline: Sequence[int], candidate: Sequence[int]) -> Fraction:
    (bg, bd), (og, od) = baseline, candidate
    return B2_GATE_WEIGHT * _delta(bg, og) + B2_DEPTH_WEIGHT * _delta(bd, od)


def b2_result(report: StabReport, baseline: CostTuple, candidate: CostTuple) -> tuple[bool, Fraction]:
    ok = report.valid and b2_improvement(candidate, baseline)
    return ok, (b2_quality(baseline, candidate) if ok else Fraction(0))


def b3_validity_and_quality(base_ft: Fraction, candidate_ft: Fraction, report: StabReport) -> tuple[bool, Fraction]:
    ok = report.valid and Fraction(candidate_ft) > Fraction(base_ft)
    return ok, (Fraction(candidate_ft) if ok else Fraction(0))


def better(a: InstanceResult | None, b: InstanceResult) -> InstanceResult:
    """Keep the best of two attempts: success first, then quality; earlier wins ties."""
    if a is None or b.rank_key() > a.rank_key():
        return b
    return a


# -- aggregation -----------------------------------------------------------------
@dataclass
class TaskScore:
    task: Task
    s_cap: int = 0
    s_qual: Fraction = Fraction(0)
    k_max: int = 0
    attempted: int = 0
    successes: int = 0
    ft_positive: int = 0
    ft_positive_sum: Fraction = Fraction(0)
    g2q_reduction_sum: Fraction = Fraction(0)
    per_code: dict[str, dict[str, Any]] = field(default_factory=dict)
    buckets: dict[str, dict[str, Any]] = field(default_factory=dict)

    @property
    def success_rate(self) -> Fraction:
        return Fraction(self.successes, self.attempted) if self.attempted else Fraction(0)

    @property
    def mean_ft_positive(self) -> Fraction | None:
        return self.ft_positive_sum / self.ft_positive if self.ft_positive else None

    @property
    def mean_g2q_reduction(self) -> Fraction | None:
        """Mean relative two-qubit-gate reduction over successful B2 results."""
        return self.g2q_reduction_sum / self.successes if self.successes and self.task is Task.B2 else None

    def to_dict(self) -> dict[str, Any]:
        mft = self.mean_ft_positive
        mg = self.mean_g2q_reduction
        return {
            "task": self.task.value,
            "s_cap": self.s_cap,
            "s_qual": frac_str(self.s_qual),
            "s_qual_float": float(self.s_qual),
            "k_max": self.k_max,
            "attempted": self.attempted,
            "successes": self.successes,
            "success_rate": float(self.success_rate),
            "ft_positive": self.ft_positive,
            "mean_ft_positive": frac_str(mft) if mft is not None else None,
            "mean_g2q_reduction": frac_str(mg) if mg is not None else None,
            "per_code": self.per_code,
            "buckets": self.buckets,
        }


@dataclass
class ScoreReport:
    tasks: dict[Task, TaskScore]
    k_max: int

    def __getitem__(self, task: Task | str) -> TaskScore:
        return self.tasks[Task(task)]

    def to_dict(self) -> dict[str, Any]:
        return {"k_max": self.k_max, "tasks": {t.value: s.to_dict() for t, s in self.tasks.items()}}


def bucket_label(k: int) -> str:
    for lo, hi in SIZE_BUCKETS:
        if lo <= k <= hi:
            return f"{lo}-{hi}" if hi < 10**9 else f"{lo}+"
    return "0"


def aggregate(
    results: Iterable[InstanceResult],
    k_by_code: Mapping[str, int],
    baselines: Mapping[str, CostTuple] | None = None,
) -> ScoreReport:
    """Sum k_i over successes (capability) and q_i * k_i (quality), per task.

    ``k_by_code`` maps every code id to its generator count; unknown ids raise
    KeyError.  At most one result per (code, task) is allowed.
    """
    k_max = sum(k_by_code.values())
    tasks: dict[Task, TaskScore] = {}
    seen: set[tuple[str, Task]] = set()
    for r in results:
        if r.code_id not in k_by_code:
            raise KeyError(f"unknown code id {r.code_id!r}")
        key = (r.code_id, r.task)
        if key in seen:
            raise ValueError(f"duplicate result for {r.code_id} / {r.task.value}")
        seen.add(key)
        k = k_by_code[r.code_id]
        ts = tasks.setdefault(r.task, TaskScore(r.task, k_max=k_max))
        ts.attempted += 1
        cap = k if r.success else 0
        qual = r.quality * k if r.success else Fraction(0)
        ts.s_cap += cap
        ts.s_qual += qual
        if r.success:
            ts.successes += 1
            if r.task is Task.B2 and baselines and r.code_id in baselines and r.candidate_cost:
                ts.g2q_reduction_sum += _delta(baselines[r.code_id].g2q, r.candidate_cost.g2q)
        if r.ft is not None and r.ft > 0:
            ts.ft_positive += 1
            ts.ft_positive_sum += r.ft
        ts.per_code[r.code_id] = {"k": k, "success": r.success, "quality": frac_str(r.quality)}
        b = ts.buckets.setdefault(bucket_label(k), {"codes": 0, "successes": 0, "k_total": 0, "s_cap": 0})
        b["codes"] += 1
        b["successes"] += int(r.success)
        b["k_total"] += k
        b["s_cap"] += cap
    return ScoreReport(tasks, k_max)


def cumulative_curve(report: ScoreReport, task: Task, k_by_code: Mapping[str, int]) -> list[tuple[int, int]]:
    """(stabilizer count, cumulative S_cap over codes of at most that size) points."""
    ts = report.tasks.get(Task(task))
    if ts is None:
        return []
    acc = 0
    out = []
    for k in sorted(set(k_by_code.values())):
        acc += sum(v["k"] for cid, v in ts.per_code.items() if v["success"] and v["k"] == k)
        out.append((k, acc))
    return out
