"""Agents and the line-delimited JSON wire protocol.

Harness to agent::

    {"protocol": "stabbench-agent/1", "type": "instance", "instance_id": ...,
     "task": "B1", "tool": "check_stabilizers", "inputs": {...},
     "remaining_attempts": 10, "prompt": "..."}
    {"protocol": ..., "type": "feedback", "instance_id": ..., "response": {...},
     "remaining_attempts": 9}
    {"protocol": ..., "type": "end", "instance_id": ...}

Agent to harness, one line per ``instance``/``feedback`` message::

    {"circuit": "H 0\\nCX 0 1\\n"}    or    {"give_up": true}

External agents get a fresh connection (child process or TCP socket) per
instance.
"""

from __future__ import annotations

import json
import os
import selectors
import shlex
import socket
import subprocess
import time
from typing import Any, Protocol

from ..circuit import emit_circuit, parse_circuit
from ..errors import StabBenchError
from ..pauli import parse_pauli
from ..scoring import Task
from ..synth import synthesize_prep
from .strategies import add_flag_gadgets, cancel_adjacent_inverses

PROTOCOL = "stabbench-agent/1"


class AgentError(StabBenchError):
    code = "agent_error"


class AgentTimeout(AgentError):
    code = "timeout"


class Agent(Protocol):
    name: str

    def open(self) -> None: ...

    def reply(self, message: dict[str, Any], deadline: float | None = None) -> dict[str, Any]: ...

    def close(self) -> None: ...


# -- in-process agents -------------------------------------------------------------
class ReferenceAgent:
    """Classical baseline: synthesis for B1, peephole cancellation for B2,
    flag gadgets around spreading gate runs for B3.  One submission each."""

    name = "reference"

    def open(self) -> None:
        pass

    def close(self) -> None:
        pass

    def reply(self, message: dict[str, Any], deadline: float | None = None) -> dict[str, Any]:
        if message.get("type") != "instance":
            return {"give_up": True}
        return {"circuit": solve(message)}


def solve(message: dict[str, Any]) -> str:
    task = Task(message["task"])
    inputs = message["inputs"]
    n = int(inputs["num_qubits"])
    if task is Task.B1:
        gens = [parse_pauli(g, n) for g in inputs["generators"]]
        return emit_circuit(synthesize_prep(gens))
    base = parse_circuit(inputs["baseline_circuit"])
    if task is Task.B2:
        return emit_circuit(cancel_adjacent_inverses(base))
    return emit_circuit(add_flag_gadgets(base, n))


class NullAgent:
    """Always submits the empty circuit (the |0...0> state)."""

    name = "null"

    def open(self) -> None:
        pass

    def close(self) -> None:
        pass

    def reply(self, message: dict[str, Any], deadline: float | None = None) -> dict[str, Any]:
        if message.get("type") != "instance":
            return {"give_up": True}
        return {"circuit": ""}


# -- external agents ---------------------------------------------------------------
def _remaining(deadline: float | None) -> float | None:
    if deadline is None:
        return None
    left = deadline - time.monotonic()
    if left <= 0:
        raise AgentTimeout("instance deadline passed while waiting for the agent")
    return left


def _decode(line: bytes) -> dict[str, Any]:
    if not line:
        raise AgentError("agent closed the connection")
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise AgentError(f"agent sent invalid JSON: {exc}") from None
    if not isinstance(msg, dict) or not ("circuit" in msg or msg.get("give_up")):
        raise AgentError("agent reply must contain 'circuit' or 'give_up'")
    return msg


class SubprocessAgent:
    """Child process speaking the protocol on stdin/stdout."""

    def __init__(self, command: str):
        self.command = command
        self.name = f"cmd:{command}"
        self.proc: subprocess.Popen | None = None
        self._buf = b""

    def open(self) -> None:
        self.proc = subprocess.Popen(
            shlex.split(self.command), stdin=subprocess.PIPE, stdout=subprocess.PIPE, bufsize=0
        )
        self._buf = b""

    def _readline(self, deadline: float | None) -> bytes:
        assert self.proc and self.proc.stdout
        sel = selectors.DefaultSelector()
        sel.register(self.proc.stdout, selectors.EVENT_READ)
        try:
            while b"\n" not in self._buf:
                if not sel.select(_remaining(deadline)):
                    raise AgentTimeout("agent did not answer before the instance deadline")
                chunk = os.read(self.proc.stdout.fileno(), 65536)
                if not chunk:
                    line, self._buf = self._buf, b""
                    return line
                self._buf += chunk
        finally:
            sel.close()
        line, _, self._buf = self._buf.partition(b"\n")
        return line

    def reply(self, message: dict[str, Any], deadline: float | None = None) -> dict[str, Any]:
        assert self.proc and self.proc.stdin
        try:
            self.proc.stdin.write((json.dumps(message) + "\n").encode())
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AgentError(f"agent process not accepting input: {exc}") from None
        if message.get("type") == "end":
            return {"give_up": True}
        return _decode(self._readline(deadline))

    def close(self) -> None:
        if self.proc is None:
            return
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
            self.proc.wait(timeout=2)
        except (subprocess.TimeoutExpired, OSError):
            self.proc.kill()
            self.proc.wait()
        finally:
            if self.proc.stdout:
                self.proc.stdout.close()
            self.proc = None


class TcpAgent:
    """Agent listening on a local socket; one connection per instance."""

    def __init__(self, host: str, port: int):
        self.host, self.port = host, port
        self.name = f"tcp:{host}:{port}"
        self.sock: socket.socket | None = None
        self._buf = b""

    def open(self) -> None:
        try:
            self.sock = socket.create_connection((self.host, self.port), timeout=10)
        except OSError as exc:
            raise AgentError(f"cannot connect to {self.name}: {exc}") from None
        self._buf = b""

    def reply(self, message: dict[str, Any], deadline: float | None = None) -> dict[str, Any]:
        assert self.sock
        try:
            self.sock.sendall((json.dumps(message) + "\n").encode())
            if message.get("type") == "end":
                return {"give_up": True}
            while b"\n" not in self._buf:
                self.sock.settimeout(_remaining(deadline))
                chunk = self.sock.recv(65536)
                if not chunk:
                    break
                self._buf += chunk
        except socket.timeout:
            raise AgentTimeout("agent did not answer before the instance deadline") from None
        except OSError as exc:
            raise AgentError(f"socket error talking to {self.name}: {exc}") from None
        line, _, self._buf = self._buf.partition(b"\n")
        return _decode(line)

    def close(self) -> None:
        if self.sock is not None:
            self.sock.close()
            self.sock = None


def make_agent(descriptor: str) -> Agent:
    """``reference``, ``null``, ``cmd:<command line>`` or ``tcp:<host>:<port>``."""
    if descriptor == "reference":
        return ReferenceAgent()
    if descriptor == "null":
        return NullAgent()
    if descriptor.startswith("cmd:"):
        return SubprocessAgent(descriptor[4:])
    if descriptor.startswith("tcp:"):
        host, _, port = descriptor[4:].rpartition(":")
        try:
            return TcpAgent(host or "127.0.0.1", int(port))
        except ValueError:
            raise ValueError(f"bad tcp agent descriptor {descriptor!r}") from None
    raise ValueError(f"unknown agent {descriptor!r} (use reference, null, cmd:..., tcp:host:port)")
