"""HTTP front end for the oracles, budgeted sessions, suite lookup and scoring."""

from __future__ import annotations

import os
import threading
import uuid
import warnings
from functools import lru_cache
from typing import Any, Callable

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from ..circuit import parse_circuit
from ..codes import Suite, load_suite_file, make_code, suite_stats
from ..errors import StabBenchError
from ..faults import FaultLocation, FaultPauli, propagate_fault
from ..harness.instances import ProblemInstance, make_instance
from ..harness.records import RUN_SCHEMA, recompute_scores
from ..harness.tools import (
    OracleSession,
    check_fault_tolerance_tool,
    check_stabilizers_tool,
    evaluate_optimization_tool,
    error_payload,
)
from ..pauli import parse_generators
from ..scoring import Task
from . import schemas


def _default_suite() -> Suite:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return load_suite_file(os.environ.get("STABBENCH_SUITE") or None)


def create_app(suite_loader: Callable[[], Suite] = _default_suite) -> FastAPI:
    app = FastAPI(title="stabbench", version="0.1.0")
    sessions: dict[str, OracleSession] = {}
    lock = threading.Lock()

    @lru_cache(maxsize=1)
    def suite() -> Suite:
        return suite_loader()

    @lru_cache(maxsize=512)
    def instance(task: str, code_id: str) -> ProblemInstance:
        code = suite().by_id().get(code_id)
        if code is None:
            raise HTTPException(404, f"unknown code {code_id!r}")
        return make_instance(code, task)

    @app.exception_handler(StabBenchError)
    async def _stab_error(request: Request, exc: StabBenchError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": error_payload(exc)})

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    # -- stateless oracles (no attempt accounting) --------------------------------
    @app.post("/oracle/check_stabilizers", response_model=schemas.CheckStabilizersResponse)
    def oracle_check(req: schemas.CheckStabilizersRequest) -> dict[str, Any]:
        return check_stabilizers_tool(req.circuit, parse_generators(req.generators, req.num_qubits))

    @app.post("/oracle/evaluate_optimization", response_model=schemas.EvaluateOptimizationResponse)
    def oracle_optimize(req: schemas.EvaluateOptimizationRequest) -> dict[str, Any]:
        gens = parse_generators(req.generators, req.num_qubits)
        return evaluate_optimization_tool(req.circuit, gens, req.baseline_circuit)

    @app.post("/oracle/check_fault_tolerance")
    def oracle_ft(req: schemas.CheckFaultToleranceRequest) -> dict[str, Any]:
        gens = parse_generators(req.generators, req.num_qubits)
        code = make_code("request", "named", gens, req.distance)
        base = req.baseline_ft
        if base is None and req.baseline_circuit is not None:
            base = check_fault_tolerance_tool(req.baseline_circuit, code).get("ft_score")
        return check_fault_tolerance_tool(req.circuit, code, base)

    @app.post("/oracle/propagate_fault", response_model=schemas.PropagateFaultResponse)
    def oracle_propagate(req: schemas.PropagateFaultRequest) -> dict[str, Any]:
        c = parse_circuit(req.circuit)
        n = max(c.num_qubits, req.num_qubits or 0)
        data = req.data_qubits if req.data_qubits is not None else range(n)
        try:
            res = propagate_fault(c, FaultLocation(req.qubit, req.layer, FaultPauli(req.pauli)), data, n)
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from None
        return res.to_dict()

    # -- suite -----------------------------------------------------------------
    @app.get("/suite", response_model=schemas.SuiteSummary)
    def suite_summary() -> dict[str, Any]:
        s = suite()
        stats = suite_stats(s)
        return {
            **{k: stats[k] for k in ("num_codes", "total_generators", "declared_total_generators", "k_deviation")},
            "codes": [
                {"id": c.id, "family": c.family, "n": c.n, "k_i": c.k_i, "d": c.distance} for c in s.codes
            ],
        }

    @app.get("/suite/stats")
    def suite_full_stats() -> dict[str, Any]:
        return suite_stats(suite())

    @app.get("/instances/{instance_id}")
    def get_instance(instance_id: str) -> dict[str, Any]:
        task, sep, code_id = instance_id.partition(":")
        if not sep or task not in Task.__members__:
            raise HTTPException(404, "instance ids look like B1:steane")
        return instance(task, code_id).to_dict()

    # -- budgeted sessions -------------------------------------------------------
    def _info(sid: str, s: OracleSession) -> dict[str, Any]:
        return {
            "session_id": sid,
            "instance_id": s.instance.id,
            "task": s.instance.task.value,
            "tool": s.tool,
            "attempts": s.attempts,
            "remaining_attempts": s.remaining,
            "inputs": s.instance.inputs(),
            "best": s.best.to_dict() if s.best else None,
        }

    def _session(sid: str) -> OracleSession:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"no session {sid!r}")
        return s

    @app.post("/sessions", response_model=schemas.SessionInfo, status_code=201)
    def create_session(req: schemas.SessionCreate) -> dict[str, Any]:
        inst = instance(req.task, req.code_id)
        sid = uuid.uuid4().hex
        with lock:
            sessions[sid] = OracleSession(inst, req.attempts)
        return _info(sid, sessions[sid])

    @app.get("/sessions/{sid}", response_model=schemas.SessionInfo)
    def get_session(sid: str) -> dict[str, Any]:
        return _info(sid, _session(sid))

    @app.post("/sessions/{sid}/{tool}")
    def session_tool(sid: str, tool: str, req: schemas.SubmitRequest) -> dict[str, Any]:
        s = _session(sid)
        if tool not in ("submit", s.tool):
            raise HTTPException(404, f"session {sid} offers {s.tool!r}, not {tool!r}")
        with lock:
            return s.submit(req.circuit)

    # -- scoring ---------------------------------------------------------------
    @app.post("/score")
    def score(req: schemas.ScoreRequest) -> dict[str, Any]:
        if req.record.get("schema") != RUN_SCHEMA:
            raise HTTPException(422, f"expected a {RUN_SCHEMA} record")
        try:
            return recompute_scores(req.record).to_dict()
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(422, f"malformed run record: {exc}") from None

    return app


app = create_app()
