"""Request and response bodies for the HTTP service."""

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class ErrorBody(BaseModel):
    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None


class CheckStabilizersRequest(BaseModel):
    circuit: str
    generators: list[str] = Field(min_length=1)
    num_qubits: Optional[int] = None


class CheckStabilizersResponse(BaseModel):
    per_generator: list[str]
    satisfied: int
    total: int
    valid: bool
    success: bool
    quality: str


class EvaluateOptimizationRequest(BaseModel):
    circuit: str
    generators: list[str] = Field(min_length=1)
    baseline_circuit: str
    num_qubits: Optional[int] = None


class CostBody(BaseModel):
    g2q: int
    depth: int


class EvaluateOptimizationResponse(BaseModel):
    valid: bool
    preserved: int
    total: int
    per_generator: list[str]
    g2q: int
    depth: int
    baseline: CostBody
    improvement: bool
    success: bool
    quality: str


class CheckFaultToleranceRequest(BaseModel):
    circuit: str
    generators: list[str] = Field(min_length=1)
    distance: int = Field(ge=1)
    num_qubits: Optional[int] = None
    baseline_ft: Optional[str] = None
    baseline_circuit: Optional[str] = None


class PropagateFaultRequest(BaseModel):
    circuit: str
    qubit: int = Field(ge=0)
    layer: int = Field(ge=0)
    pauli: Literal["X", "Y", "Z"]
    data_qubits: Optional[list[int]] = None
    num_qubits: Optional[int] = None


class PropagateFaultResponse(BaseModel):
    error: str
    data_weight: int
    flag_flips: list[int]
    flagged: bool


class SessionCreate(BaseModel):
    task: Literal["B1", "B2", "B3"]
    code_id: str
    attempts: int = Field(default=10, ge=1)


class SessionInfo(BaseModel):
    session_id: str
    instance_id: str
    task: str
    tool: str
    attempts: int
    remaining_attempts: int
    inputs: dict[str, Any]
    best: Optional[dict[str, Any]] = None


class SubmitRequest(BaseModel):
    circuit: str


class ScoreRequest(BaseModel):
    record: dict[str, Any]


class SuiteSummary(BaseModel):
    num_codes: int
    total_generators: int
    declared_total_generators: int
    k_deviation: int
    codes: list[dict[str, Any]]
