"""Drive agents through problem instances and persist the run record."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from ..errors import Cancelled, StabBenchError
from ..scoring import Task
from .agents import PROTOCOL, AgentError, AgentTimeout, make_agent
from .instances import ProblemInstance
from .records import new_record, recompute_scores, result_from_instance, save_record, utc_now
from .tools import TOOL_NAMES, OracleSession

log = logging.getLogger(__name__)

DEFAULT_ATTEMPTS = 10


@dataclass
class HarnessConfig:
    task: Task
    agent: str = "reference"
    attempts: int = DEFAULT_ATTEMPTS
    timeout_seconds: float = 900.0
    model_label: str = ""
    prompt: str = ""
    suite: str = "shipped"
    workers: int = 1
    oracle_workers: int = 1

    def __post_init__(self) -> None:
        self.task = Task(self.task)
        if self.attempts < 1:
            raise ValueError("attempt budget must be at least 1")
        if not self.timeout_seconds > 0:
            raise ValueError("timeout must be positive")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["task"] = self.task.value
        d["model_label"] = self.model_label or self.agent
        return d


def _message(kind: str, instance: ProblemInstance, **extra: Any) -> dict[str, Any]:
    return {"protocol": PROTOCOL, "type": kind, "instance_id": instance.id, **extra}


def run_instance(instance: ProblemInstance, config: HarnessConfig) -> dict[str, Any]:
    """One agent dialogue under the attempt budget and wall-clock deadline."""
    start = time.monotonic()
    deadline = start + config.timeout_seconds
    expired = lambda: time.monotonic() > deadline  # noqa: E731
    session = OracleSession(instance, config.attempts, config.oracle_workers)
    attempts: list[dict[str, Any]] = []
    status, stop_reason, error = "finished", None, None
    agent = make_agent(config.agent)
    try:
        agent.open()
        msg = _message(
            "instance",
            instance,
            task=instance.task.value,
            tool=TOOL_NAMES[instance.task],
            inputs=instance.inputs(),
            remaining_attempts=session.remaining,
            prompt=config.prompt,
        )
        while True:
            if expired():
                status, stop_reason = "timeout", "deadline"
                break
            reply = agent.reply(msg, deadline)
            if reply.get("give_up") or "circuit" not in reply:
                stop_reason = "gave_up"
                break
            if expired():
                status, stop_reason = "timeout", "deadline"
                break
            t0 = time.monotonic()
            try:
                response = session.submit(str(reply["circuit"]), should_cancel=expired)
            except Cancelled:
                status, stop_reason = "timeout", "deadline"
                break
            late = expired()
            attempts.append(
                {
                    "attempt": session.used,
                    "circuit": reply["circuit"],
                    "response": response,
                    "elapsed_s": round(time.monotonic() - t0, 6),
                    "late": late,
                }
            )
            if late:
                status, stop_reason = "timeout", "deadline"
                break
            if session.remaining <= 0:
                stop_reason = "budget_exhausted"
                break
            msg = _message("feedback", instance, response=response, remaining_attempts=session.remaining)
        try:
            agent.reply(_message("end", instance), deadline=None)
        except AgentError:
            pass
    except AgentTimeout:
        status, stop_reason = "timeout", "deadline"
    except (AgentError, OSError) as exc:
        status, error = "error", f"{type(exc).__name__}: {exc}"
    finally:
        agent.close()
    rec = {
        "instance_id": instance.id,
        "code_id": instance.code.id,
        "task": instance.task.value,
        "k": instance.code.k_i,
        "baseline_cost": list(instance.baseline_cost) if instance.baseline_cost else None,
        "baseline_ft": instance.inputs().get("baseline_ft"),
        "status": status,
        "stop_reason": stop_reason,
        "error": error,
        "elapsed_s": round(time.monotonic() - start, 6),
        "attempts": attempts,
    }
    rec["result"] = result_from_instance(rec).to_dict()
    return rec


def _run_job(args) -> tuple[int, dict[str, Any]]:
    idx, instance, config = args
    return idx, run_instance(instance, config)


def run_benchmark(
    instances: Sequence[ProblemInstance],
    config: HarnessConfig,
    record_path: str | Path | None = None,
    on_instance: Callable[[dict[str, Any]], None] | None = None,
) -> dict[str, Any]:
    """Run every instance; the record is rewritten atomically after each one."""
    planned = [{"instance_id": p.id, "code_id": p.code.id, "k": p.code.k_i} for p in instances]
    record = new_record(config.to_dict(), planned)
    done: dict[int, dict[str, Any]] = {}

    def commit(idx: int, inst: dict[str, Any]) -> None:
        done[idx] = inst
        record["instances"] = [done[i] for i in sorted(done)]
        if on_instance:
            on_instance(inst)
        if record_path is not None:
            save_record(record_path, record)

    if record_path is not None:
        save_record(record_path, record)
    jobs = [(i, p, config) for i, p in enumerate(instances)]
    try:
        if config.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                futures = [pool.submit(_run_job, j) for j in jobs]
                for fut in as_completed(futures):
                    commit(*fut.result())
        else:
            for j in jobs:
                commit(*_run_job(j))
    except (KeyboardInterrupt, StabBenchError):
        record["status"] = "aborted"
        record["finished_at"] = utc_now()
        record["scores"] = recompute_scores(record).to_dict()
        if record_path is not None:
            save_record(record_path, record)
        raise
    record["status"] = "complete"
    record["finished_at"] = utc_now()
    record["scores"] = recompute_scores(record).to_dict()
    if record_path is not None:
        save_record(record_path, record)
    return record
