"""Run-record JSON (schema ``stabbench-run/1``) and score recomputation.

Layout::

    schema, status ("running" | "complete" | "aborted")
    config      model_label, prompt, task, attempts, timeout_seconds, agent, suite, workers
    started_at, finished_at      ISO-8601 UTC wall-clock timestamps
    planned     [{instance_id, code_id, k}]   every instance the run intends to drive
    instances   [{instance_id, code_id, task, k, status, stop_reason, error,
                  elapsed_s, attempts: [{attempt, circuit, response, elapsed_s, late}],
                  result}]
    scores      ScoreReport as JSON (a cache; ``recompute_scores`` rebuilds it)

Scores are always derivable from the attempt log: an instance's result is the
best (success, quality) over its on-time attempts, re-scored from the raw
validity, cost and FT fields.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from ..circuit import CostTuple
from ..errors import StabBenchError
from ..scoring import (
    SIZE_BUCKETS,
    InstanceResult,
    ScoreReport,
    Task,
    aggregate,
    b2_improvement,
    b2_quality,
    better,
    bucket_label,
)

RUN_SCHEMA = "stabbench-run/1"

# fields that legitimately differ between two otherwise identical runs
VOLATILE_KEYS = frozenset({"started_at", "finished_at", "elapsed_s"})


class RecordError(StabBenchError, ValueError):
    code = "record_error"


class PersistenceError(StabBenchError, OSError):
    code = "persistence_error"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def new_record(config: dict[str, Any], planned: Iterable[dict[str, Any]]) -> dict[str, Any]:
    return {
        "schema": RUN_SCHEMA,
        "status": "running",
        "config": dict(config),
        "started_at": utc_now(),
        "finished_at": None,
        "planned": list(planned),
        "instances": [],
        "scores": None,
    }


def save_record(path: str | Path, record: dict[str, Any]) -> None:
    """Atomic replace; on failure the record goes to a recovery file and we raise."""
    p = Path(path)
    text = json.dumps(record, indent=1) + "\n"
    try:
        fd, tmp = tempfile.mkstemp(prefix=p.name + ".", suffix=".tmp", dir=p.parent)
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except OSError as exc:
        recovery = Path(tempfile.gettempdir()) / f"{p.stem}.recovery-{os.getpid()}.json"
        try:
            recovery.write_text(text)
            where = f"partial record saved to {recovery}"
        except OSError:
            where = "recovery write failed too"
        raise PersistenceError(f"cannot write run record {p}: {exc}; {where}") from exc


def load_record(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise RecordError(f"run record {p} does not exist") from None
    except json.JSONDecodeError as exc:
        raise RecordError(f"{p}: not valid JSON ({exc})") from None
    if not isinstance(data, dict) or data.get("schema") != RUN_SCHEMA:
        raise RecordError(f"{p}: expected schema {RUN_SCHEMA!r}")
    for key in ("config", "planned", "instances"):
        if key not in data:
            raise RecordError(f"{p}: missing field {key!r}")
    return data


def _attempt_result(inst: dict[str, Any], task: Task, resp: dict[str, Any], attempt: int) -> InstanceResult:
    """Re-derive success and quality from the raw oracle fields.

    The stored ``success``/``quality`` flags are not trusted: validity, cost
    tuples and FT values are re-scored against the instance baseline.
    """
    valid = resp.get("valid") is True and "error" not in resp
    cand = CostTuple(resp["g2q"], resp["depth"]) if "g2q" in resp else None
    ft = Fraction(resp["ft_score"]) if resp.get("ft_score") is not None else None
    success, quality = valid, Fraction(int(valid))
    if task is Task.B2:
        base = inst.get("baseline_cost")
        success = valid and cand is not None and base is not None and b2_improvement(cand, base)
        quality = b2_quality(base, cand) if success else Fraction(0)
    elif task is Task.B3:
        base_ft = inst.get("baseline_ft")
        success = valid and ft is not None and base_ft is not None and ft > Fraction(base_ft)
        quality = ft if success else Fraction(0)
    elif not valid:
        quality = Fraction(0)
    return InstanceResult(
        code_id=inst["code_id"],
        task=task,
        success=success,
        quality=quality,
        satisfied_generators=int(resp.get("satisfied", resp.get("preserved", 0)) or 0),
        candidate_cost=cand,
        ft=ft,
        attempts_used=attempt,
    )


def result_from_instance(inst: dict[str, Any]) -> InstanceResult:
    """Best on-time attempt; a failure result if there is none."""
    best = None
    task = Task(inst["task"])
    for a in inst.get("attempts", []):
        if a.get("late"):
            continue
        best = better(best, _attempt_result(inst, task, a.get("response") or {}, int(a.get("attempt", 0))))
    if best is None:
        best = InstanceResult(inst["code_id"], task, False)
    best.attempts_used = len(inst.get("attempts", []))
    return best


def recompute_scores(record: dict[str, Any]) -> ScoreReport:
    k_by_code = {p["code_id"]: int(p["k"]) for p in record["planned"]}
    for inst in record["instances"]:
        k_by_code.setdefault(inst["code_id"], int(inst["k"]))
    baselines = {}
    for inst in record["instances"]:
        if inst.get("baseline_cost"):
            baselines[inst["code_id"]] = CostTuple(*inst["baseline_cost"])
    return aggregate((result_from_instance(i) for i in record["instances"]), k_by_code, baselines)


def strip_volatile(obj: Any) -> Any:
    """Copy without timestamps and timings, for determinism comparisons."""
    if isinstance(obj, dict):
        return {k: strip_volatile(v) for k, v in obj.items() if k not in VOLATILE_KEYS}
    if isinstance(obj, list):
        return [strip_volatile(v) for v in obj]
    return obj


def bucket_rows(record: dict[str, Any]) -> list[dict[str, Any]]:
    """Per size bucket: codes, successes and capability, plus a running total."""
    report = recompute_scores(record)
    rows = []
    for task, ts in sorted(report.tasks.items(), key=lambda kv: kv[0].value):
        acc = 0
        for lo, hi in SIZE_BUCKETS:
            label = bucket_label(lo)
            b = ts.buckets.get(label)
            if not b:
                continue
            acc += b["s_cap"]
            rows.append({"task": task.value, "bucket": label, **b, "cumulative_s_cap": acc})
    return rows


def curve_rows(record: dict[str, Any]) -> list[dict[str, Any]]:
    """Cumulative capability against stabilizer count (one row per distinct k)."""
    report = recompute_scores(record)
    rows = []
    for task, ts in sorted(report.tasks.items(), key=lambda kv: kv[0].value):
        acc = 0
        by_k: dict[int, list] = {}
        for v in ts.per_code.values():
            by_k.setdefault(v["k"], []).append(v)
        for k in sorted(by_k):
            solved = sum(v["k"] for v in by_k[k] if v["success"])
            acc += solved
            rows.append({"task": task.value, "k": k, "codes": len(by_k[k]), "s_cap_at_k": solved, "cumulative_s_cap": acc})
    return rows


def to_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
