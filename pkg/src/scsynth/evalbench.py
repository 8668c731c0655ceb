"""Exhaustive accuracy evaluation, baseline comparisons and report emission.

Errors are measured in the value domain: the output count is decoded per the
problem encoding and compared against the function value at every grid point
(all target combinations in [0, N] per input).  All arithmetic is exact;
floats appear only in emitted reports.
"""

import csv
import io
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

from .circuit import CircuitSpec, FunctionSpec, ProblemSpec, eval_function, evaluate_masks, parse_spec
from .errors import SpecError
from .sn_core import NumberSequence, average_scc, baseline_sequence, generate


def _input_streams(sequences, n) -> list[list[int]]:
    streams = []
    for seq in sequences:
        if seq.n != n:
            raise ValueError(f"sequence length {seq.n} != n={n}")
        masks = []
        for t in range(n + 1):
            masks.append(generate(seq, t).mask)
        streams.append(masks)
    return streams


def sweep_counts(
    circuit: CircuitSpec,
    f: FunctionSpec,
    sequences,
    n: int,
    dff_wraparound: bool | None = None,
) -> tuple[Fraction, Fraction, int]:
    """Count-domain sweep: (sum |h - enc(f)|, sum (h - enc(f))^2, #cells)."""
    sequences = [s if isinstance(s, NumberSequence) else NumberSequence(tuple(s)) for s in sequences]
    if len(sequences) != circuit.arity:
        raise ValueError(
            f"circuit has {circuit.arity} inputs but {len(sequences)} sequences given"
        )
    streams = _input_streams(sequences, n)
    grid_values = [f.encoding.decode_count(t, n) for t in range(n + 1)]
    names = circuit.inputs
    total_abs = Fraction(0)
    total_sq = Fraction(0)
    cells = 0
    for targets in product(range(n + 1), repeat=circuit.arity):
        masks = {names[i]: streams[i][t] for i, t in enumerate(targets)}
        h = evaluate_masks(circuit, masks, n, dff_wraparound)[circuit.output].bit_count()
        want = eval_function(f, {names[i]: grid_values[t] for i, t in enumerate(targets)})
        err = h - f.encoding.encode_value(want, n)
        total_abs += abs(err)
        total_sq += err * err
        cells += 1
    return total_abs, total_sq, cells


def sweep_error(
    circuit: CircuitSpec,
    f: FunctionSpec,
    sequences,
    n: int,
    dff_wraparound: bool | None = None,
) -> tuple[Fraction, Fraction]:
    """(average absolute error, mean squared error) in the value domain."""
    total_abs, total_sq, cells = sweep_counts(circuit, f, sequences, n, dff_wraparound)
    scale = f.encoding.count_scale / n
    return total_abs * scale / cells, total_sq * scale * scale / cells


@dataclass(frozen=True)
class AccuracyReport:
    n: int
    circuit: str
    encoding: str
    method: str
    avg_abs_error: Fraction
    mse: Fraction
    avg_scc: Fraction | None
    elapsed: float
    status: str
    gap: Fraction | None


def evaluate_sequences(problem: ProblemSpec, sequences, n: int | None = None,
                       method: str = "literal", status: str = "evaluated",
                       gap: Fraction | None = None, elapsed: float | None = None,
                       with_scc: bool = True) -> AccuracyReport:
    """Sweep a concrete sequence assignment into an :class:`AccuracyReport`."""
    n = problem.n if n is None else n
    sequences = [s if isinstance(s, NumberSequence) else NumberSequence(tuple(s)) for s in sequences]
    start = time.perf_counter()
    avg, mse = sweep_error(problem.circuit, problem.function, sequences, n)
    scc_value = None
    if with_scc and len(sequences) == 2:
        scc_value = average_scc(sequences[0], sequences[1])
    took = time.perf_counter() - start if elapsed is None else elapsed
    return AccuracyReport(
        n=n,
        circuit=problem.name,
        encoding=problem.encoding.value,
        method=method,
        avg_abs_error=avg,
        mse=mse,
        avg_scc=scc_value,
        elapsed=took,
        status=status,
        gap=gap,
    )


def _load_problem(spec, base_dir: Path | None) -> ProblemSpec:
    if isinstance(spec, dict):
        return parse_spec(spec)
    path = Path(spec)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return parse_spec(path.read_text())


def _with_n(problem: ProblemSpec, n: int) -> ProblemSpec:
    if n == problem.n:
        return problem
    doc = dict(problem.document)
    doc["n"] = n
    if doc.get("select_stream") is not None:
        del doc["select_stream"]  # length-bound; fall back to the default
    return parse_spec(doc)


def _method_sequences(method: dict, problem: ProblemSpec, n: int) -> list[NumberSequence]:
    if "builtin" in method:
        kinds = method["builtin"]
        if isinstance(kinds, str):
            kinds = [kinds]
        if len(kinds) != problem.circuit.arity:
            raise SpecError(
                f"method {method.get('label')!r}: {len(kinds)} generators for "
                f"{problem.circuit.arity}-input circuit",
                "methods",
            )
        return [baseline_sequence(k, n) for k in kinds]
    seqs = method["sequences"]
    if len(seqs) != problem.circuit.arity:
        raise SpecError(
            f"method {method.get('label')!r}: {len(seqs)} sequences for "
            f"{problem.circuit.arity}-input circuit",
            "methods",
        )
    return [NumberSequence(tuple(s)) for s in seqs]


def run_benchmark_suite(config: dict, base_dir: Path | None = None) -> list[AccuracyReport]:
    """Run every (problem, n, method) cell of a benchmark config.

    Methods: ``{"label", "builtin": [kinds]}``, ``{"label", "sequences":
    [[...]]}`` or ``{"label", "synthesize": {solver options}}``.  Rows come
    back in config order with n ascending.
    """
    from . import solver  # local import; solver depends on this module

    reports: list[AccuracyReport] = []
    for pos, entry in enumerate(config.get("problems", [])):
        if "spec" not in entry:
            raise SpecError("problem entry needs a 'spec'", f"problems[{pos}]")
        base_problem = _load_problem(entry["spec"], base_dir)
        ns = entry.get("ns", [base_problem.n])
        for n in sorted(ns):
            problem = _with_n(base_problem, n)
            for method in entry.get("methods", []):
                label = method.get("label") or _default_label(method)
                if "synthesize" in method:
                    opts = dict(method["synthesize"] or {})
                    cfg = solver.SolveConfig(
                        gap=Fraction(str(opts.get("gap", 0))),
                        time_budget=opts.get("time_budget"),
                        seed=int(opts.get("seed", 0)),
                        restarts=int(opts.get("restarts", solver.SolveConfig.restarts)),
                        mode=str(opts.get("mode", "auto")),
                    )
                    result = solver.solve_problem(problem, n=n, cfg=cfg)
                    reports.append(
                        evaluate_sequences(
                            problem,
                            result.sequences,
                            n=n,
                            method=label,
                            status=result.status,
                            gap=result.gap_achieved,
                            elapsed=result.elapsed,
                        )
                    )
                else:
                    seqs = _method_sequences(method, problem, n)
                    reports.append(evaluate_sequences(problem, seqs, n=n, method=label))
    return reports


def _default_label(method: dict) -> str:
    if "builtin" in method:
        kinds = method["builtin"]
        return "+".join([kinds] if isinstance(kinds, str) else list(kinds))
    if "synthesize" in method:
        return "synthesized"
    return "literal"


CSV_COLUMNS = (
    "n", "circuit", "encoding", "method", "avg_abs_err", "mse",
    "avg_scc", "elapsed_s", "status", "gap",
)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def emit_report(reports, fmt: str = "csv") -> str:
    """Render reports as CSV (columns fixed) or JSON; row order preserved."""
    if fmt == "json":
        rows = []
        for r in reports:
            rows.append({
                "n": r.n,
                "circuit": r.circuit,
                "encoding": r.encoding,
                "method": r.method,
                "avg_abs_err": float(r.avg_abs_error),
                "avg_abs_err_exact": str(r.avg_abs_error),
                "mse": float(r.mse),
                "mse_exact": str(r.mse),
                "avg_scc": None if r.avg_scc is None else float(r.avg_scc),
                "elapsed_s": r.elapsed,
                "status": r.status,
                "gap": None if r.gap is None else float(r.gap),
            })
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow([
            r.n, r.circuit, r.encoding, r.method,
            _fmt(r.avg_abs_error), _fmt(r.mse), _fmt(r.avg_scc),
            repr(float(r.elapsed)), r.status, _fmt(r.gap),
        ])
    return buf.getvalue()


def parse_report_csv(text: str) -> list[dict]:
    """Inverse of the CSV emitter, for round-trip checks and tooling."""
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    for raw in reader:
        rows.append({
            "n": int(raw["n"]),
            "circuit": raw["circuit"],
            "encoding": raw["encoding"],
            "method": raw["method"],
            "avg_abs_err": float(raw["avg_abs_err"]) if raw["avg_abs_err"] else None,
            "mse": float(raw["mse"]) if raw["mse"] else None,
            "avg_scc": float(raw["avg_scc"]) if raw["avg_scc"] else None,
            "elapsed_s": float(raw["elapsed_s"]) if raw["elapsed_s"] else None,
            "status": raw["status"],
            "gap": float(raw["gap"]) if raw["gap"] else None,
        })
    return rows
