"""FastAPI service wrapping the synthesis, evaluation and export pipeline."""

from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..circuit import parse_spec
from ..decompose import parse_staged_spec, synthesize_staged
from ..errors import ConfigError, InfeasibleError, SpecError
from ..evalbench import emit_report, evaluate_sequences, run_benchmark_suite, sweep_error
from ..mip_encode import EncodeOptions, build_program, export_lp, import_solution, parse_solution
from ..sn_core import NumberSequence, baseline_sequence
from ..solver import SolveConfig, solve_problem
from . import schemas


def _encode_options(model: schemas.OptionsModel) -> tuple[EncodeOptions, bool]:
    fix = model.fix_first_sequence
    if fix == "none":
        fix = None
    elif isinstance(fix, list):
        fix = tuple(fix)
    opts = EncodeOptions(
        fix_boundary_rows=model.fix_boundary_rows,
        fix_first_sequence=fix,
        symbolic_select=model.symbolic_select,
        dff_wraparound=model.dff_wraparound,
    )
    return opts, model.strict_binaries


def _solve_config(model: schemas.SolveConfigModel) -> SolveConfig:
    return SolveConfig(
        gap=Fraction(str(model.gap)),
        time_budget=model.time_budget,
        seed=model.seed,
        restarts=model.restarts,
        mode=model.mode,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="scsynth",
        version=__version__,
        description="Number-sequence synthesis and evaluation for stochastic-computing circuits",
    )

    @app.exception_handler(SpecError)
    async def spec_error(_: Request, exc: SpecError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ConfigError)
    async def config_error(_: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(_: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest):
        if req.problem.is_staged:
            raise SpecError("staged problems use /v1/synth-staged", "problem")
        problem = parse_spec(req.problem.to_document())
        n = req.n or problem.n
        opts, _ = _encode_options(req.options)
        result = solve_problem(problem, n=n, opts=opts, cfg=_solve_config(req.config),
                               threads=req.threads)
        avg, mse = sweep_error(problem.circuit, problem.function, result.sequences, n)
        return schemas.SynthResponse(
            name=problem.name,
            n=n,
            encoding=problem.encoding.value,
            sequences=[list(s.values) for s in result.sequences],
            objective=float(result.objective),
            objective_exact=str(result.objective),
            lower_bound=float(result.lower_bound),
            lower_bound_exact=str(result.lower_bound),
            status=result.status,
            gap=float(result.gap_achieved),
            avg_abs_error=float(avg),
            avg_abs_error_exact=str(avg),
            mse=float(mse),
            elapsed_s=result.elapsed,
        )

    @app.post("/v1/synth-staged", response_model=schemas.StagedSynthResponse)
    def synth_staged(req: schemas.SynthRequest):
        if not req.problem.is_staged:
            raise SpecError("problem document has no stages", "problem")
        problem = parse_staged_spec(req.problem.to_document())
        n = req.n or problem.n
        result = synthesize_staged(problem, n=n, cfg=_solve_config(req.config),
                                   threads=req.threads)
        return schemas.StagedSynthResponse(
            name=problem.name,
            n=n,
            encoding=problem.encoding.value,
            stages=[
                schemas.StageResultModel(
                    name=o.subproblem.stage.name,
                    objective=float(o.result.objective),
                    objective_exact=str(o.result.objective),
                    lower_bound=float(o.result.lower_bound),
                    status=o.result.status,
                    output_rows=o.output_rows,
                    elapsed_s=o.result.elapsed,
                )
                for o in result.outcomes
            ],
            sequences={k: list(v.values) for k, v in result.sequences.items()},
            avg_abs_error=float(result.avg_abs_error),
            avg_abs_error_exact=str(result.avg_abs_error),
            mse=float(result.mse),
        )

    @app.post("/v1/eval", response_model=schemas.EvalResponse)
    def evaluate(req: schemas.EvalRequest):
        problem = parse_spec(req.problem.to_document())
        n = req.n or problem.n
        if (req.sequences is None) == (req.builtin is None):
            raise SpecError("provide exactly one of 'sequences' or 'builtin'", "eval")
        if req.builtin is not None:
            if len(req.builtin) != problem.circuit.arity:
                raise SpecError(
                    f"{len(req.builtin)} generators for a {problem.circuit.arity}-input circuit",
                    "builtin",
                )
            sequences = [baseline_sequence(k, n) for k in req.builtin]
            method = req.method or "+".join(req.builtin)
        else:
            if len(req.sequences) != problem.circuit.arity:
                raise SpecError(
                    f"{len(req.sequences)} sequences for a {problem.circuit.arity}-input circuit",
                    "sequences",
                )
            sequences = [NumberSequence(tuple(s)) for s in req.sequences]
            method = req.method or "literal"
        report = evaluate_sequences(problem, sequences, n=n, method=method,
                                    with_scc=req.with_scc)
        return schemas.EvalResponse(
            n=report.n,
            circuit=report.circuit,
            encoding=report.encoding,
            method=report.method,
            avg_abs_err=float(report.avg_abs_error),
            avg_abs_err_exact=str(report.avg_abs_error),
            mse=float(report.mse),
            mse_exact=str(report.mse),
            avg_scc=None if report.avg_scc is None else float(report.avg_scc),
            elapsed_s=report.elapsed,
            status=report.status,
            gap=None if report.gap is None else float(report.gap),
            csv=emit_report([report]),
        )

    @app.post("/v1/export-lp", response_model=schemas.ExportResponse)
    def export(req: schemas.ExportRequest):
        problem = parse_spec(req.problem.to_document())
        n = req.n or problem.n
        opts, strict = _encode_options(req.options)
        system = build_program(problem.circuit, problem.function, n, opts, strict)
        return schemas.ExportResponse(
            lp=export_lp(system, name=f"{problem.name} n={n}"),
            variables=len(system.variables),
            binaries=sum(1 for v in system.variables if v.kind == "binary"),
            constraints=len(system.constraints),
        )

    @app.post("/v1/import-solution", response_model=schemas.ImportResponse)
    def import_sol(req: schemas.ImportRequest):
        problem = parse_spec(req.problem.to_document())
        n = req.n or problem.n
        opts, strict = _encode_options(req.options)
        system = build_program(problem.circuit, problem.function, n, opts, strict)
        assignment = parse_solution(req.solution)
        try:
            verified = import_solution(system, assignment)
        except InfeasibleError as exc:
            return schemas.ImportResponse(
                feasible=False,
                violation=schemas.ViolationModel(constraint=exc.constraint, detail=exc.detail),
            )
        avg, _ = sweep_error(problem.circuit, problem.function, verified.sequences, n)
        return schemas.ImportResponse(
            feasible=True,
            objective=float(verified.objective),
            objective_exact=str(verified.objective),
            sequences=[list(s.values) for s in verified.sequences],
            avg_abs_error=float(avg),
            avg_abs_error_exact=str(avg),
        )

    @app.post("/v1/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest):
        reports = run_benchmark_suite(req.config)
        import json as _json

        rows = _json.loads(emit_report(reports, "json"))
        return schemas.BenchResponse(reports=rows, csv=emit_report(reports, "csv"))

    return app


app = create_app()
