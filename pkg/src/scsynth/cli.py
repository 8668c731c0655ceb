"""Command-line front end; a thin client of the HTTP service.

Every subcommand posts to the service API.  By default the requests run
against an in-process application instance, so no server is needed; pass
``--server http://host:port`` to talk to a remote one (started with
``scsynth serve``).  Exit codes: 0 success, 1 usage or spec error, 2
solver infeasible/timeout or rejected solution import.
"""

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class ServiceClient:
    """Posts requests either in-process (ASGI) or to a remote server."""

    def __init__(self, server: str | None):
        self.server = server

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        async def _run() -> tuple[int, dict]:
            if self.server:
                transport = None
                base = self.server
            else:
                from .service.app import create_app

                transport = httpx.ASGITransport(app=create_app())
                base = "http://scsynth.internal"
            async with httpx.AsyncClient(transport=transport, base_url=base, timeout=None) as client:
                response = await client.post(path, json=payload)
                try:
                    body = response.json()
                except ValueError:
                    body = {"detail": response.text}
                return response.status_code, body

        return asyncio.run(_run())


def _read_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise SystemExit(_usage_error(f"cannot read {what} {path!r}: {exc}"))
    except json.JSONDecodeError as exc:
        raise SystemExit(_usage_error(f"{what} {path!r} is not valid JSON: {exc}"))


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise SystemExit(_usage_error(f"cannot write {out!r}: {exc}"))
    print(f"wrote {out}")


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _check_http(status: int, body: dict) -> None:
    if status != 200:
        detail = body.get("detail", body)
        raise SystemExit(_usage_error(f"service rejected the request: {detail}"))


def _options_payload(args) -> dict:
    fix = getattr(args, "fix_first", "ramp")
    if fix not in ("ramp", "none"):
        data = _read_json(fix, "sequence file")
        if isinstance(data, dict):
            data = data.get("sequences", [data])[0]
        fix = list(data)
    return {
        "fix_boundary_rows": bool(getattr(args, "boundary_rows", False)),
        "fix_first_sequence": fix,
        "symbolic_select": bool(getattr(args, "symbolic_select", False)),
        "strict_binaries": bool(getattr(args, "strict_binaries", False)),
    }


def _load_sequences_arg(value: str) -> dict:
    """--sequences takes a JSON file of sequences or comma-joined builtins."""
    if Path(value).exists():
        data = _read_json(value, "sequences file")
        if isinstance(data, dict):
            data = data.get("sequences")
        if not isinstance(data, list):
            raise SystemExit(_usage_error(f"{value!r} does not contain sequences"))
        return {"sequences": data, "method": Path(value).stem}
    kinds = [k.strip() for k in value.split(",") if k.strip()]
    if not kinds:
        raise SystemExit(_usage_error("--sequences needs a file or generator kinds"))
    return {"builtin": kinds}


def cmd_synth(client: ServiceClient, args) -> int:
    problem = _read_json(args.spec, "problem spec")
    payload = {
        "problem": problem,
        "n": args.n,
        "options": _options_payload(args),
        "config": {
            "gap": args.gap,
            "time_budget": args.time,
            "seed": args.seed,
            "restarts": args.restarts,
            "mode": args.mode,
        },
        "threads": args.threads,
    }
    staged = isinstance(problem, dict) and "stages" in problem
    status, body = client.post("/v1/synth-staged" if staged else "/v1/synth", payload)
    _check_http(status, body)
    _write_output(_dump(body), args.out)
    if staged:
        for stage in body["stages"]:
            print(f"stage {stage['name']}: status={stage['status']} "
                  f"objective={stage['objective']:.6g}")
        print(f"end-to-end avg_abs_error={body['avg_abs_error']:.6g}")
        return EXIT_OK
    print(f"status={body['status']} objective={body['objective']:.6g} "
          f"avg_abs_error={body['avg_abs_error']:.6g} elapsed={body['elapsed_s']:.2f}s")
    if body["status"] == "timeout" and not body["sequences"]:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_eval(client: ServiceClient, args) -> int:
    problem = _read_json(args.spec, "problem spec")
    payload = {"problem": problem, "n": args.n, "with_scc": not args.no_scc}
    payload.update(_load_sequences_arg(args.sequences))
    status, body = client.post("/v1/eval", payload)
    _check_http(status, body)
    if args.format == "csv":
        _write_output(body["csv"], args.out)
    else:
        trimmed = {k: v for k, v in body.items() if k != "csv"}
        _write_output(_dump(trimmed), args.out)
    print(f"avg_abs_err={body['avg_abs_err']:.6g} mse={body['mse']:.6g} "
          f"({body['circuit']}, n={body['n']}, {body['method']})")
    return EXIT_OK


def cmd_export(client: ServiceClient, args) -> int:
    problem = _read_json(args.spec, "problem spec")
    payload = {"problem": problem, "n": args.n, "options": _options_payload(args)}
    status, body = client.post("/v1/export-lp", payload)
    _check_http(status, body)
    _write_output(body["lp"], args.out)
    print(f"{body['variables']} variables ({body['binaries']} binary), "
          f"{body['constraints']} constraints")
    return EXIT_OK


def cmd_import(client: ServiceClient, args) -> int:
    problem = _read_json(args.spec, "problem spec")
    try:
        solution_text = Path(args.solution).read_text()
    except OSError as exc:
        return _usage_error(f"cannot read solution {args.solution!r}: {exc}")
    payload = {
        "problem": problem,
        "n": args.n,
        "options": _options_payload(args),
        "solution": solution_text,
    }
    status, body = client.post("/v1/import-solution", payload)
    _check_http(status, body)
    if not body["feasible"]:
        violation = body.get("violation") or {}
        print(f"infeasible: constraint {violation.get('constraint')} — "
              f"{violation.get('detail')}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write_output(_dump(body), args.out)
    print(f"feasible, objective={body['objective']:.6g} "
          f"avg_abs_error={body['avg_abs_error']:.6g}")
    return EXIT_OK


def cmd_bench(client: ServiceClient, args) -> int:
    config = _read_json(args.config, "bench config")
    base = Path(args.config).resolve().parent
    for entry in config.get("problems", []):
        spec = entry.get("spec")
        if isinstance(spec, str):
            path = Path(spec)
            if not path.is_absolute():
                path = base / path
            entry["spec"] = _read_json(str(path), "problem spec")
    status, body = client.post("/v1/bench", {"config": config})
    _check_http(status, body)
    if args.format == "csv":
        _write_output(body["csv"], args.out)
    else:
        _write_output(json.dumps(body["reports"], indent=2, sort_keys=True) + "\n", args.out)
    print(f"{len(body['reports'])} report rows")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scsynth",
        description="Synthesize and evaluate SNG number sequences for stochastic circuits.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("SCSYNTH_THREADS", "1")),
                        help="worker cap for parallel solver restarts")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec_options(p, with_solver=False):
        p.add_argument("spec", help="problem document (JSON)")
        p.add_argument("--n", type=int, default=None, help="override the document's n")
        p.add_argument("--fix-first", default="ramp",
                       help="'ramp', 'none', or a JSON sequence file for the first input")
        p.add_argument("--boundary-rows", action="store_true",
                       help="fix rows 0 and N of the matrices as constants")
        p.add_argument("--symbolic-select", action="store_true",
                       help="make the MUX select stream's bits solver variables")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if with_solver:
            p.add_argument("--mode", choices=("exact", "anneal", "auto"), default="auto")
            p.add_argument("--gap", type=float, default=0.0,
                           help="acceptable relative optimality gap")
            p.add_argument("--time", type=float, default=None,
                           help="time budget in seconds (translated to a fixed step budget)")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--restarts", type=int, default=4)

    p_synth = sub.add_parser("synth", help="synthesize number sequences")
    add_spec_options(p_synth, with_solver=True)
    p_synth.set_defaults(handler=cmd_synth)

    p_eval = sub.add_parser("eval", help="evaluate sequences exhaustively")
    p_eval.add_argument("spec", help="problem document (JSON)")
    p_eval.add_argument("--sequences", required=True,
                        help="JSON sequence file or comma-joined builtins (e.g. ramp,vdc)")
    p_eval.add_argument("--n", type=int, default=None)
    p_eval.add_argument("--format", choices=("csv", "json"), default="csv")
    p_eval.add_argument("--no-scc", action="store_true", help="skip the average-SCC column")
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(handler=cmd_eval)

    p_export = sub.add_parser("export", help="export the MIP in LP format")
    add_spec_options(p_export)
    p_export.add_argument("--strict-binaries", action="store_true",
                          help="declare gate variables binary instead of continuous")
    p_export.set_defaults(handler=cmd_export)

    p_import = sub.add_parser("import", help="verify an external solver's solution")
    add_spec_options(p_import)
    p_import.add_argument("--solution", required=True, help="'name value' per line")
    p_import.set_defaults(handler=cmd_import)

    p_bench = sub.add_parser("bench", help="run a benchmark config")
    p_bench.add_argument("config", help="benchmark config (JSON)")
    p_bench.add_argument("--format", choices=("csv", "json"), default="csv")
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(handler=cmd_bench)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; 2 is reserved for infeasible here
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command == "serve":
        return cmd_serve(args)
    client = ServiceClient(args.server)
    try:
        return args.handler(client, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except httpx.HTTPError as exc:
        return _usage_error(f"cannot reach service: {exc}")


if __name__ == "__main__":
    sys.exit(main())
