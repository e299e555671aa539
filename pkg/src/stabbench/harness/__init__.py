"""Benchmark harness: instances, oracle tools, agents, runner and run records."""

from .agents import PROTOCOL, NullAgent, ReferenceAgent, make_agent
from .instances import ProblemInstance, build_instances, make_instance
from .records import RUN_SCHEMA, load_record, recompute_scores, save_record
from .runner import HarnessConfig, run_benchmark, run_instance
from .tools import OracleSession, evaluate

__all__ = [
    "PROTOCOL",
    "RUN_SCHEMA",
    "HarnessConfig",
    "NullAgent",
    "OracleSession",
    "ProblemInstance",
    "ReferenceAgent",
    "build_instances",
    "evaluate",
    "load_record",
    "make_agent",
    "make_instance",
    "recompute_scores",
    "run_benchmark",
    "run_instance",
    "save_record",
]
