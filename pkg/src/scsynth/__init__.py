"""scsynth: number-sequence synthesis for stochastic-computing circuits.

Builds deterministic comparator-SNG number sequences that make small
stochastic circuits (multipliers, adders, squarers, ...) as accurate as
possible, either with the native exact/heuristic solver or by exporting the
underlying mixed-integer program for an external solver.  A bit-exact
simulator and exhaustive sweeps verify every result.
"""

__version__ = "0.1.0"

from .circuit import (
    CircuitSpec,
    CycleTrace,
    FunctionSpec,
    ProblemSpec,
    eval_function,
    evaluate,
    evaluate_trace,
    parse_function,
    parse_spec,
)
from .errors import ConfigError, InfeasibleError, ScsynthError, SpecError, VerificationError
from .evalbench import AccuracyReport, emit_report, run_benchmark_suite, sweep_error
from .mip_encode import (
    ConstraintSystem,
    EncodeOptions,
    build_program,
    export_lp,
    import_solution,
    parse_lp,
    parse_solution,
    recover_sequences,
)
from .sn_core import (
    Bitstream,
    Encoding,
    GeneratorKind,
    NumberSequence,
    average_scc,
    baseline_sequence,
    decode,
    generate,
    scc,
)
from .solver import SolveConfig, SynthesisResult, lower_bound, solve, solve_problem, verify

__all__ = [
    "AccuracyReport",
    "Bitstream",
    "CircuitSpec",
    "ConfigError",
    "ConstraintSystem",
    "CycleTrace",
    "EncodeOptions",
    "Encoding",
    "FunctionSpec",
    "GeneratorKind",
    "InfeasibleError",
    "NumberSequence",
    "ProblemSpec",
    "ScsynthError",
    "SolveConfig",
    "SpecError",
    "SynthesisResult",
    "VerificationError",
    "average_scc",
    "baseline_sequence",
    "build_program",
    "decode",
    "emit_report",
    "eval_function",
    "evaluate",
    "evaluate_trace",
    "export_lp",
    "generate",
    "import_solution",
    "lower_bound",
    "parse_function",
    "parse_lp",
    "parse_solution",
    "parse_spec",
    "recover_sequences",
    "run_benchmark_suite",
    "scc",
    "solve",
    "solve_problem",
    "sweep_error",
    "verify",
]
