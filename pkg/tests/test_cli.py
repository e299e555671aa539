import json
import subprocess
import sys
import threading
import time

import pytest

from stabbench.circuit import emit_circuit
from stabbench.cli import main
from stabbench.codes import named_code
from stabbench.codes.suite import load_manifest
from stabbench.pauli import emit_pauli
from stabbench.synth import make_b2_baseline, synthesize_prep


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    code = named_code("steane")
    (d / "steane.circ").write_text(emit_circuit(synthesize_prep(code)))
    (d / "steane.code").write_text("# Steane code\n" + "\n".join(emit_pauli(g) for g in code.generators) + "\n")
    (d / "steane.json").write_text(json.dumps(code.to_dict()))
    (d / "base.circ").write_text(emit_circuit(make_b2_baseline(code).circuit))
    (d / "default.manifest").write_text(json.dumps(load_manifest().to_dict()))
    return d


def run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_check_stabilizers_steane(capsys, files):
    rc, out, _ = run(capsys, "oracle", "check-stabilizers", files / "steane.circ", files / "steane.code")
    assert rc == 0 and "6/6" in out
    rc, out, _ = run(capsys, "oracle", "check-stabilizers", files / "steane.circ", files / "steane.json", "--json")
    assert rc == 0 and json.loads(out)["satisfied"] == 6


def test_check_by_suite_id(capsys, files):
    rc, out, _ = run(capsys, "oracle", "check-stabilizers", files / "steane.circ", "steane")
    assert rc == 0 and "6/6" in out


def test_invalid_circuit_reports_failing_generators(capsys, files, tmp_path):
    (tmp_path / "x.circ").write_text("X 0\n")
    rc, out, _ = run(capsys, "oracle", "check-stabilizers", tmp_path / "x.circ", files / "steane.code")
    assert rc == 0 and out.startswith("invalid")


def test_oracle_parse_error_exits_nonzero(capsys, files, tmp_path):
    (tmp_path / "bad.circ").write_text("H 0\nT 1\n")
    rc, out, err = run(capsys, "oracle", "check-stabilizers", tmp_path / "bad.circ", files / "steane.code", "--json")
    assert rc != 0 and json.loads(out)["error"]["code"] == "parse_error"
    assert "line 2" in err


def test_optimize_and_ft(capsys, files):
    rc, out, _ = run(capsys, "oracle", "optimize", files / "steane.circ", files / "steane.code",
                     "--baseline", files / "base.circ", "--json")
    body = json.loads(out)
    assert rc == 0 and body["improvement"]
    rc, out, _ = run(capsys, "oracle", "ft", files / "steane.circ", files / "steane.json",
                     "--baseline-ft", "0", "--json")
    body = json.loads(out)
    assert rc == 0 and body["ft_score"] == "0/1" and not body["success"]


def test_suite_validate_prints_k(capsys, files):
    rc, out, _ = run(capsys, "suite", "validate", files / "default.manifest")
    assert rc == 0 and "K = 8144" in out


def test_suite_stats_reports_deviation(capsys):
    rc, out, _ = run(capsys, "suite", "stats", "--json")
    st = json.loads(out)
    assert rc == 0 and st["k_deviation"] == st["total_generators"] - 16340


def test_suite_build_roundtrip(capsys, tmp_path):
    out_file = tmp_path / "dataset.json"
    rc, _, _ = run(capsys, "suite", "build", "--out", out_file)
    assert rc == 0
    rc, out, _ = run(capsys, "suite", "validate", out_file, "--json")
    assert rc == 0 and json.loads(out)["num_codes"] == 192


def test_suite_env_override(capsys, files, monkeypatch):
    monkeypatch.setenv("STABBENCH_SUITE", str(files / "missing.manifest"))
    rc, _, err = run(capsys, "suite", "validate")
    assert rc != 0 and "does not exist" in err


def test_workers_env(capsys, monkeypatch):
    monkeypatch.setenv("STABBENCH_WORKERS", "lots")
    rc, _, err = run(capsys, "suite", "stats")
    assert rc != 0 and "STABBENCH_WORKERS" in err


def test_score_missing_file(capsys):
    rc, _, err = run(capsys, "score", "--run-file", "missing.json")
    assert rc != 0 and "does not exist" in err


def test_run_score_report(capsys, tmp_path):
    rec = tmp_path / "run.json"
    rc, out, _ = run(capsys, "run", "--task", "B1", "--codes", "steane,perfect5,detector4", "--out", rec)
    assert rc == 0 and "3/3" in out
    rc, out, _ = run(capsys, "score", "--run-file", rec, "--json")
    assert rc == 0 and json.loads(out)["tasks"]["B1"]["s_cap"] == 6 + 4 + 2
    rc, out, _ = run(capsys, "report", "--run-file", rec, "--buckets")
    assert rc == 0 and out.splitlines()[0].startswith("task,bucket")
    rc, out, _ = run(capsys, "report", "--run-file", rec, "--curve")
    assert out.splitlines()[-1].split(",")[-1] == "12"


def test_run_rejects_unknown_code(capsys, tmp_path):
    rc, _, err = run(capsys, "run", "--task", "B1", "--codes", "nope", "--out", tmp_path / "r.json")
    assert rc != 0 and "nope" in err


def test_run_timeout(capsys, tmp_path):
    rc, out, _ = run(capsys, "run", "--task", "B1", "--codes", "surface_d7,bb_90", "--timeout", "0.001",
                     "--out", tmp_path / "t.json", "--json")
    assert rc == 0 and json.loads(out)["s_cap"] == 0


def test_instance_show(capsys):
    rc, out, _ = run(capsys, "instance", "show", "B2:steane")
    assert rc == 0 and out.startswith("B2:steane")
    rc, _, _ = run(capsys, "instance", "show", "steane")
    assert rc != 0


def test_usage_error_exits_nonzero():
    with pytest.raises(SystemExit) as e:
        main(["run"])
    assert e.value.code != 0


def test_console_script_entry_point(files):
    r = subprocess.run(
        [sys.executable, "-m", "stabbench.cli", "oracle", "check-stabilizers",
         str(files / "steane.circ"), str(files / "steane.code")],
        capture_output=True, text=True,
    )
    assert r.returncode == 0 and "6/6" in r.stdout


@pytest.fixture(scope="module")
def server():
    uvicorn = pytest.importorskip("uvicorn")
    from stabbench.service.app import create_app

    config = uvicorn.Config(create_app(), host="127.0.0.1", port=0, log_level="error")
    srv = uvicorn.Server(config)
    t = threading.Thread(target=srv.run, daemon=True)
    t.start()
    for _ in range(200):
        if srv.started:
            break
        time.sleep(0.02)
    port = srv.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    srv.should_exit = True
    t.join(5)


def test_client_mode(capsys, files, server, tmp_path):
    rc, out, _ = run(capsys, "oracle", "check-stabilizers", files / "steane.circ", files / "steane.code",
                     "--server", server, "--json")
    assert rc == 0 and json.loads(out)["satisfied"] == 6
    rc, out, _ = run(capsys, "oracle", "ft", files / "steane.circ", files / "steane.json", "--server", server, "--json")
    assert rc == 0 and json.loads(out)["ft_score"] == "0/1"
    rc, out, _ = run(capsys, "instance", "show", "B1:steane", "--server", server)
    assert rc == 0 and json.loads(out)["id"] == "B1:steane"
    rec = tmp_path / "r.json"
    run(capsys, "run", "--task", "B1", "--codes", "steane", "--out", rec)
    rc, out, _ = run(capsys, "score", "--run-file", rec, "--server", server, "--json")
    assert rc == 0 and json.loads(out)["tasks"]["B1"]["s_cap"] == 6
    (tmp_path / "bad.circ").write_text("CX 0\n")
    rc, _, err = run(capsys, "oracle", "check-stabilizers", tmp_path / "bad.circ", files / "steane.code",
                     "--server", server)
    assert rc != 0 and "server error" in err


def test_client_mode_unreachable(capsys, files):
    rc, _, err = run(capsys, "oracle", "check-stabilizers", files / "steane.circ", files / "steane.code",
                     "--server", "http://127.0.0.1:1")
    assert rc != 0 and "cannot reach" in err
