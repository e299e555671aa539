"""Command-line entry point: ``stabbench <group> <command> ...``.

Most commands run in-process.  With ``--server URL`` the oracle, instance and
score commands are sent to a running ``stabbench serve`` instead.
``run`` always executes locally because it owns agent processes and the
run-record file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .codes import CodeInstance, Suite, load_suite_file, make_code, suite_stats
from .codes.suite import dataset_dict, load_manifest, load_suite, write_json_atomic
from .errors import StabBenchError
from .harness.instances import build_instances, make_instance
from .harness.records import RecordError, bucket_rows, curve_rows, load_record, recompute_scores, to_csv
from .harness.runner import HarnessConfig, run_benchmark
from .harness.tools import check_fault_tolerance_tool, check_stabilizers_tool, evaluate_optimization_tool
from .pauli import emit_pauli, parse_generators
from .scoring import Task

log = logging.getLogger("stabbench")

ENV_SUITE = "STABBENCH_SUITE"
ENV_WORKERS = "STABBENCH_WORKERS"


class CliError(Exception):
    pass


# -- helpers -----------------------------------------------------------------------
def _env_workers(default: int = 1) -> int:
    raw = os.environ.get(ENV_WORKERS)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"{ENV_WORKERS} must be an integer, got {raw!r}") from None


def _suite_path(arg: str | None) -> str | None:
    return arg or os.environ.get(ENV_SUITE) or None


def _load_suite(path: str | None, workers: int = 1) -> Suite:
    path = _suite_path(path)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if path is None:
            return load_suite(workers=workers)
        if not Path(path).exists():
            raise CliError(f"suite file {path} does not exist")
        return load_suite_file(path)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None


def load_code_arg(arg: str, suite_path: str | None = None, distance: int | None = None) -> CodeInstance:
    """A code from a JSON file, a file of Pauli lines, or a suite code id."""
    p = Path(arg)
    if not p.exists():
        code = _load_suite(suite_path).by_id().get(arg)
        if code is None:
            raise CliError(f"{arg} is neither a file nor a code id in the suite")
        return code
    text = _read_text(arg)
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if "n" in data and "d" in data:
            return CodeInstance.from_dict(data)
        gens = parse_generators(data["generators"], data.get("num_qubits"))
        return make_code(data.get("id", p.stem), "named", gens, int(data.get("distance", distance or 1)))
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    gens = parse_generators([ln for ln in lines if ln])
    return make_code(p.stem, "named", gens, distance or 1)


def _emit(args: argparse.Namespace, payload: Any, human: str | None = None) -> None:
    if args.json or human is None:
        print(json.dumps(payload, indent=1, default=str))
    else:
        print(human)


def _http(args: argparse.Namespace, method: str, path: str, body: dict[str, Any] | None = None) -> dict[str, Any]:
    import httpx

    url = args.server.rstrip("/") + path
    try:
        r = httpx.request(method, url, json=body, timeout=args.http_timeout)
    except httpx.HTTPError as exc:
        raise CliError(f"cannot reach {url}: {exc}") from None
    data = r.json()
    if r.status_code >= 400:
        err = data.get("error") or {"message": data.get("detail")}
        raise CliError(f"server error {r.status_code}: {err.get('message', err)}")
    return data


# -- suite -----------------------------------------------------------------------------
def cmd_suite_build(args: argparse.Namespace) -> int:
    manifest = load_manifest(_suite_path(args.manifest))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        suite = load_suite(manifest, workers=args.workers)
    write_json_atomic(args.out, dataset_dict(suite))
    _emit(args, {"out": args.out, "num_codes": len(suite.codes), "total_generators": suite.total_generators},
          f"wrote {len(suite.codes)} codes (K={suite.total_generators}) to {args.out}")
    return 0


def cmd_suite_validate(args: argparse.Namespace) -> int:
    suite = _load_suite(args.manifest, args.workers)
    st = suite_stats(suite)
    payload = {k: st[k] for k in ("num_codes", "num_base", "num_products", "total_generators",
                                  "declared_total_generators", "k_deviation")}
    payload["valid"] = True
    human = (
        f"{st['num_codes']} codes valid ({st['num_base']} base, {st['num_products']} products)\n"
        f"K = {st['total_generators']} (declared {st['declared_total_generators']}, "
        f"deviation {st['k_deviation']:+d})"
    )
    _emit(args, payload, human)
    return 0


def cmd_suite_stats(args: argparse.Namespace) -> int:
    if args.server:
        _emit(args, _http(args, "GET", "/suite/stats"))
        return 0
    st = suite_stats(_load_suite(args.manifest, args.workers))
    rows = [f"codes {st['num_codes']}  K {st['total_generators']}  declared {st['declared_total_generators']}"
            f"  deviation {st['k_deviation']:+d}"]
    for name, chk in st["range_checks"].items():
        lo, hi = chk["observed"]
        mark = "ok" if chk["within"] else "OUT OF RANGE"
        rows.append(f"  {name:<16} k in [{lo}, {hi}]  expected {chk['expected']}  {mark}")
    _emit(args, st, "\n".join(rows))
    return 0


# -- instances -------------------------------------------------------------------------
def cmd_instance_show(args: argparse.Namespace) -> int:
    if args.server:
        _emit(args, _http(args, "GET", f"/instances/{args.instance_id}"))
        return 0
    task, sep, code_id = args.instance_id.partition(":")
    if not sep or task not in Task.__members__:
        raise CliError("instance ids look like B2:steane")
    code = _load_suite(args.suite).by_id().get(code_id)
    if code is None:
        raise CliError(f"unknown code {code_id!r}")
    inst = make_instance(code, task, workers=args.workers)
    if args.json:
        _emit(args, inst.to_dict())
        return 0
    inp = inst.inputs()
    print(f"{inst.id}  n={code.n} k_i={code.k_i} d={code.distance}")
    for g in inp["generators"]:
        print(f"  {g}")
    if "baseline_circuit" in inp:
        extra = inp.get("baseline_cost") or {"ft": inp.get("baseline_ft")}
        print(f"baseline {extra}")
        print(inp["baseline_circuit"], end="")
    return 0


# -- oracles ---------------------------------------------------------------------------
def _oracle_request(args: argparse.Namespace, code: CodeInstance) -> dict[str, Any]:
    return {
        "circuit": _read_text(args.circuit),
        "generators": [emit_pauli(g) for g in code.generators],
        "num_qubits": code.n,
    }


def _oracle_out(args: argparse.Namespace, res: dict[str, Any], headline: str) -> int:
    if "error" in res:
        raise CliError(res["error"].get("message", "oracle error"))
    _emit(args, res, headline)
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    code = load_code_arg(args.code, args.suite)
    if args.server:
        res = _http(args, "POST", "/oracle/check_stabilizers", _oracle_request(args, code))
    else:
        res = check_stabilizers_tool(_read_text(args.circuit), code.generators)
    head = f"{'valid' if res.get('valid') else 'invalid'}: {res.get('satisfied')}/{res.get('total')} generators satisfied"
    if not res.get("valid") and "per_generator" in res:
        bad = [f"g{i}={s}" for i, s in enumerate(res["per_generator"]) if s != "pass"]
        head += "\n  " + " ".join(bad)
    return _oracle_out(args, res, head)


def cmd_oracle_optimize(args: argparse.Namespace) -> int:
    code = load_code_arg(args.code, args.suite)
    baseline = _read_text(args.baseline)
    if args.server:
        res = _http(args, "POST", "/oracle/evaluate_optimization",
                    {**_oracle_request(args, code), "baseline_circuit": baseline})
    else:
        res = evaluate_optimization_tool(_read_text(args.circuit), code.generators, baseline)
    b = res.get("baseline", {})
    head = (
        f"{'valid' if res.get('valid') else 'invalid'}: {res.get('preserved')}/{res.get('total')} preserved; "
        f"cost (g2q={res.get('g2q')}, depth={res.get('depth')}) vs baseline "
        f"(g2q={b.get('g2q')}, depth={b.get('depth')}); improvement={res.get('improvement')} quality={res.get('quality')}"
    )
    return _oracle_out(args, res, head)


def cmd_oracle_ft(args: argparse.Namespace) -> int:
    code = load_code_arg(args.code, args.suite, args.distance)
    if args.distance:
        code = make_code(code.id, code.family, code.generators, args.distance)
    base_circ = _read_text(args.baseline) if args.baseline else None
    if args.server:
        body = {**_oracle_request(args, code), "distance": code.distance,
                "baseline_ft": args.baseline_ft, "baseline_circuit": base_circ}
        res = _http(args, "POST", "/oracle/check_fault_tolerance", body)
    else:
        base_ft = args.baseline_ft
        if base_ft is None and base_circ is not None:
            base_ft = check_fault_tolerance_tool(base_circ, code, workers=args.workers).get("ft_score")
        res = check_fault_tolerance_tool(_read_text(args.circuit), code, base_ft, workers=args.workers)
    rep = res.get("ft_report") or {}
    head = (
        f"{'valid' if res.get('valid') else 'invalid'}: {res.get('preserved')}/{res.get('total')} preserved; "
        f"FT = {res.get('ft_score')} (t={rep.get('threshold')}, dangerous={rep.get('dangerous_count')}, "
        f"flagged={rep.get('flagged_dangerous')}, locations={rep.get('total_locations')})"
    )
    if res.get("baseline_ft") is not None:
        head += f"; baseline {res['baseline_ft']}, improvement={res.get('success')}"
    return _oracle_out(args, res, head)


# -- run / score / report --------------------------------------------------------------
def cmd_run(args: argparse.Namespace) -> int:
    suite = _load_suite(args.suite, args.workers)
    codes = suite.base_codes() if args.base_only else list(suite.codes)
    if args.codes:
        want = [c.strip() for c in args.codes.split(",") if c.strip()]
        index = suite.by_id()
        missing = [c for c in want if c not in index]
        if missing:
            raise CliError(f"unknown code ids: {', '.join(missing)}")
        codes = [index[c] for c in want]
    prompt = _read_text(args.prompt_file) if args.prompt_file else ""
    config = HarnessConfig(
        task=Task(args.task),
        agent=args.agent,
        attempts=args.attempts,
        timeout_seconds=args.timeout,
        model_label=args.model_label or "",
        prompt=prompt,
        suite=_suite_path(args.suite) or "shipped",
        workers=args.workers,
        oracle_workers=args.oracle_workers,
    )
    log.info("building %d %s instances", len(codes), config.task.value)
    instances = build_instances(codes, config.task, workers=args.workers)

    def progress(inst: dict[str, Any]) -> None:
        r = inst["result"]
        log.info("%s %s success=%s quality=%s", inst["instance_id"], inst["status"], r["success"], r["quality"])

    record = run_benchmark(instances, config, args.out, on_instance=progress)
    ts = recompute_scores(record)[config.task]
    summary = {"out": args.out, "instances": len(instances), **ts.to_dict()}
    summary.pop("per_code", None)
    summary.pop("buckets", None)
    _emit(args, summary,
          f"{config.task.value}: {ts.successes}/{ts.attempted} solved, S_cap={ts.s_cap} "
          f"S_qual={float(ts.s_qual):.4f} (K={ts.k_max}); record {args.out}")
    return 0


def _record(args: argparse.Namespace) -> dict[str, Any]:
    return load_record(args.run_file)


def cmd_score(args: argparse.Namespace) -> int:
    record = _record(args)
    if args.server:
        report = _http(args, "POST", "/score", {"record": record})
    else:
        report = recompute_scores(record).to_dict()
    lines = []
    for task, ts in sorted(report["tasks"].items()):
        lines.append(
            f"{task}: S_cap={ts['s_cap']} S_qual={ts['s_qual']} (~{float(Fraction(ts['s_qual'])):.4f}) "
            f"K={ts['k_max']} solved {ts['successes']}/{ts['attempted']}"
        )
    if record.get("status") != "complete":
        lines.append(f"(partial record: status {record.get('status')}, "
                     f"{len(record['instances'])}/{len(record['planned'])} instances)")
    _emit(args, report, "\n".join(lines) or "no instances recorded")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    record = _record(args)
    rows = curve_rows(record) if args.curve else bucket_rows(record)
    if args.json:
        _emit(args, rows)
    else:
        sys.stdout.write(to_csv(rows))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    if args.suite:
        os.environ[ENV_SUITE] = args.suite
    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


# -- parser ----------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--server", metavar="URL", help="send oracle/score requests to a running service")
    common.add_argument("--http-timeout", type=float, default=600.0, help=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, default=None, help=f"process pool size (env {ENV_WORKERS})")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="stabbench", description="Stabilizer-circuit benchmark tools.")
    sub = p.add_subparsers(dest="group", required=True)

    suite = sub.add_parser("suite", help="build, validate and summarize the code suite")
    ssub = suite.add_subparsers(dest="command", required=True)
    s = ssub.add_parser("build", parents=[common], help="materialize a manifest into a dataset file")
    s.add_argument("--manifest", help=f"manifest JSON (default: env {ENV_SUITE} or the shipped one)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_suite_build)
    s = ssub.add_parser("validate", parents=[common], help="build and validate every code; print K")
    s.add_argument("manifest", nargs="?", help="manifest or dataset JSON")
    s.set_defaults(func=cmd_suite_validate)
    s = ssub.add_parser("stats", parents=[common], help="stabilizer-count ranges and K deviation")
    s.add_argument("manifest", nargs="?")
    s.set_defaults(func=cmd_suite_stats)

    inst = sub.add_parser("instance", help="inspect problem instances")
    isub = inst.add_subparsers(dest="command", required=True)
    s = isub.add_parser("show", parents=[common], help="print an instance such as B2:steane")
    s.add_argument("instance_id")
    s.add_argument("--suite")
    s.set_defaults(func=cmd_instance_show)

    orc = sub.add_parser("oracle", help="one-shot verification tools")
    osub = orc.add_subparsers(dest="command", required=True)
    code_help = "code: JSON file, file of Pauli strings (one per line) or a suite code id"
    s = osub.add_parser("check-stabilizers", parents=[common], help="B1 stabilizer check")
    s.add_argument("circuit", help="circuit file ('-' for stdin)")
    s.add_argument("code", help=code_help)
    s.add_argument("--suite")
    s.set_defaults(func=cmd_oracle_check)
    s = osub.add_parser("optimize", parents=[common], help="B2 optimization check against a baseline")
    s.add_argument("circuit")
    s.add_argument("code", help=code_help)
    s.add_argument("--baseline", required=True, help="baseline circuit file")
    s.add_argument("--suite")
    s.set_defaults(func=cmd_oracle_optimize)
    s = osub.add_parser("ft", parents=[common], help="B3 fault-tolerance score")
    s.add_argument("circuit")
    s.add_argument("code", help=code_help)
    s.add_argument("--distance", type=int, help="code distance (overrides the code file)")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--baseline-ft", help="baseline FT score as a fraction, e.g. 3/7")
    g.add_argument("--baseline", help="baseline circuit file; its FT score is computed")
    s.add_argument("--suite")
    s.set_defaults(func=cmd_oracle_ft)

    s = sub.add_parser("run", parents=[common], help="drive an agent through the suite")
    s.add_argument("--task", required=True, choices=[t.value for t in Task])
    s.add_argument("--agent", default="reference",
                   help="reference | null | cmd:<command line> | tcp:<host>:<port>")
    s.add_argument("--attempts", type=int, default=10)
    s.add_argument("--timeout", type=float, default=900.0, help="seconds per instance")
    s.add_argument("--out", required=True, help="run-record JSON path")
    s.add_argument("--suite")
    s.add_argument("--codes", help="comma-separated code ids")
    s.add_argument("--base-only", action="store_true")
    s.add_argument("--prompt-file")
    s.add_argument("--model-label")
    s.add_argument("--oracle-workers", type=int, default=1)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("score", parents=[common], help="recompute scores from a run record")
    s.add_argument("--run-file", required=True)
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("report", parents=[common], help="difficulty-curve data as CSV")
    s.add_argument("--run-file", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--buckets", action="store_true", help="per stabilizer-count bucket (default)")
    g.add_argument("--curve", action="store_true", help="cumulative capability per distinct k")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--suite")
    s.set_defaults(func=cmd_serve)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.workers is None:
            args.workers = _env_workers()
        if args.workers < 1:
            raise CliError("--workers must be at least 1")
        return args.func(args)
    except (CliError, StabBenchError, RecordError, ValueError, KeyError) as exc:
        msg = str(exc).strip("'\"") or type(exc).__name__
        if getattr(args, "json", False):
            code = getattr(exc, "code", "cli_error")
            print(json.dumps({"error": {"code": code, "message": msg}}))
        print(f"stabbench: error: {msg}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("stabbench: interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
