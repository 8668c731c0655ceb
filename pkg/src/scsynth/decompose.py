"""Multi-input circuits via decomposition into two-input stages.

A staged problem document lists two-input subproblems in topological order,
each with its own gates and function over its local inputs.  Stage 0 is
synthesized like a standard problem; its full output-SN set (all grid
combinations, deduplicated with multiplicities) then replaces the symbolic
matrix on one input of the next stage, whose target for a row uses the
row's achieved value rather than the ideal upstream value.  Solutions are
locally optimal per stage, not globally.
"""

from dataclasses import dataclass
from fractions import Fraction

from .circuit import (
    CircuitSpec,
    FunctionSpec,
    Gate,
    ProblemSpec,
    eval_function,
    evaluate_masks,
    parse_function,
    parse_gates,
    parse_spec,
    validate_function_range,
)
from .errors import SpecError
from .evalbench import sweep_error
from .sn_core import Bitstream, Encoding, NumberSequence, generate
from .solver import Kernel, SolveConfig, SynthesisResult, _detect_uniform_tt, _scaled_targets, solve_kernel


@dataclass(frozen=True)
class StageSpec:
    """One two-input subproblem of a staged circuit."""

    name: str
    circuit: CircuitSpec
    function: FunctionSpec
    symbolic_inputs: tuple[str, ...]
    upstream_input: str | None


@dataclass(frozen=True)
class StagedProblem:
    name: str
    n: int
    encoding: Encoding
    inputs: tuple[str, ...]  # global symbolic inputs, in document order
    stages: tuple[StageSpec, ...]
    document: dict


@dataclass(frozen=True)
class Subproblem:
    """A stage plus its position in the synthesis order."""

    index: int
    stage: StageSpec

    @property
    def consumes_upstream(self) -> bool:
        return self.stage.upstream_input is not None


@dataclass(frozen=True)
class SnRow:
    bits: Bitstream
    value: Fraction  # achieved value under the problem encoding
    multiplicity: int


@dataclass(frozen=True)
class SnSet:
    """Deduplicated output SNs of a stage, with multiplicities."""

    rows: tuple[SnRow, ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.rows)


def parse_staged_spec(document: dict | str) -> StagedProblem:
    """Parse the staged problem document.

    Schema: ``{"n", "encoding", "inputs", "stages": [{"inputs", "gates",
    "output", "function", "symbolic_inputs", "upstream_input"}]}``.  Every
    global input must be consumed by exactly one stage; every stage after
    the first consumes the previous stage's output as its upstream input.
    """
    import json

    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}", "document") from exc
    if "stages" not in document:
        raise SpecError("staged document needs a 'stages' list", "stages")

    n = document.get("n")
    if not isinstance(n, int) or n < 2:
        raise SpecError(f"n must be an integer >= 2, got {n!r}", "n")
    try:
        encoding = Encoding(document.get("encoding", ""))
    except ValueError as exc:
        raise SpecError("encoding must be unipolar or bipolar", "encoding") from exc
    inputs = tuple(document.get("inputs", ()))
    if not inputs:
        raise SpecError("'inputs' must list the global inputs", "inputs")

    stages = []
    consumed: set[str] = set()
    wraparound = bool(document.get("dff_wraparound", False))
    for pos, raw in enumerate(document["stages"]):
        loc = f"stages[{pos}]"
        if not isinstance(raw, dict):
            raise SpecError("stage must be an object", loc)
        local_inputs = tuple(raw.get("inputs", ()))
        if not 1 <= len(local_inputs) <= 2:
            raise SpecError(f"stage needs 1 or 2 inputs, got {len(local_inputs)}", loc)
        upstream = raw.get("upstream_input")
        symbolic = tuple(raw.get("symbolic_inputs", ()))
        if pos == 0:
            if upstream is not None:
                raise SpecError("stage 0 cannot have an upstream input", loc)
        else:
            if upstream is None:
                raise SpecError("stages after the first need an upstream_input", loc)
            if upstream not in local_inputs:
                raise SpecError(f"upstream_input {upstream!r} is not a stage input", loc)
        expect_symbolic = tuple(i for i in local_inputs if i != upstream)
        if symbolic and symbolic != expect_symbolic:
            raise SpecError(
                f"symbolic_inputs {symbolic} must be the non-upstream inputs {expect_symbolic}",
                loc,
            )
        symbolic = expect_symbolic
        if not symbolic:
            raise SpecError("stage needs at least one symbolic input", loc)
        for name in symbolic:
            if name not in inputs:
                raise SpecError(f"symbolic input {name!r} is not a global input", loc)
            if name in consumed:
                raise SpecError(f"global input {name!r} consumed twice", loc)
            consumed.add(name)

        gates = parse_gates(raw.get("gates", []), set(local_inputs), f"{loc}.gates")
        output = raw.get("output")
        if not isinstance(output, str):
            raise SpecError("stage needs an 'output' gate id", loc)
        circuit = CircuitSpec(local_inputs, gates, output, None, wraparound)
        func_text = raw.get("function")
        if not isinstance(func_text, str):
            raise SpecError("stage needs a 'function'", loc)
        function = parse_function(func_text, local_inputs, encoding)
        validate_function_range(function, n)
        stages.append(
            StageSpec(
                name=str(raw.get("name", f"stage{pos}")),
                circuit=circuit,
                function=function,
                symbolic_inputs=symbolic,
                upstream_input=upstream,
            )
        )
    missing = [i for i in inputs if i not in consumed]
    if missing:
        raise SpecError(f"global inputs never consumed by a stage: {missing}", "stages")
    name = str(document.get("name", "")) or "staged-problem"
    return StagedProblem(name, n, encoding, inputs, tuple(stages), dict(document))


def decompose_circuit(problem: StagedProblem | ProblemSpec) -> list[Subproblem]:
    """Ordered subproblems of a staged problem.

    A plain one- or two-input problem decomposes into the single degenerate
    subproblem of itself.
    """
    if isinstance(problem, ProblemSpec):
        if problem.circuit.arity > 2:
            raise SpecError(
                f"{problem.circuit.arity}-input circuit needs per-stage specs "
                "('stages' in the problem document)",
                "gates",
            )
        stage = StageSpec(
            name=problem.name,
            circuit=problem.circuit,
            function=problem.function,
            symbolic_inputs=problem.circuit.inputs,
            upstream_input=None,
        )
        return [Subproblem(0, stage)]
    return [Subproblem(i, s) for i, s in enumerate(problem.stages)]


def enumerate_outputs(
    circuit: CircuitSpec,
    sequences,
    n: int,
    encoding: Encoding,
    upstream: SnSet | None = None,
    dedup: bool = True,
) -> SnSet:
    """Exhaustively generate the stage's output SNs over the whole grid.

    ``sequences`` binds the non-upstream inputs to number sequences (a dict
    by name, or positionally in circuit input order); the remaining input,
    if any, iterates over the rows of ``upstream`` carrying their
    multiplicities.  Identical output streams are merged, summing
    multiplicities; ``dedup=False`` keeps the raw grid enumeration.
    """
    from itertools import product

    if not isinstance(sequences, dict):
        if upstream is not None:
            raise ValueError("bind sequences by name (dict) when an upstream set is used")
        if len(sequences) != circuit.arity:
            raise ValueError(f"need {circuit.arity} sequences, got {len(sequences)}")
        sequences = dict(zip(circuit.inputs, sequences))
    up_name = None
    if upstream is not None:
        extra = [name for name in circuit.inputs if name not in sequences]
        if len(extra) != 1:
            raise ValueError(f"expected exactly one upstream input, got {extra}")
        up_name = extra[0]
    streams = {
        name: [generate(seq, t).mask for t in range(n + 1)] for name, seq in sequences.items()
    }
    upstream_rows = (
        [(r.bits.mask, r.multiplicity) for r in upstream.rows] if upstream is not None else [(0, 1)]
    )

    names = list(sequences)
    masks: list[int] = []
    mults: list[int] = []
    index: dict[int, int] = {}
    for up_mask, up_mult in upstream_rows:
        for combo in product(range(n + 1), repeat=len(names)):
            bound = {names[i]: streams[names[i]][t] for i, t in enumerate(combo)}
            if up_name is not None:
                bound[up_name] = up_mask
            out = evaluate_masks(circuit, bound, n)[circuit.output]
            if dedup and out in index:
                mults[index[out]] += up_mult
            else:
                index[out] = len(masks)
                masks.append(out)
                mults.append(up_mult)

    rows = tuple(
        SnRow(
            bits=Bitstream(n, mask),
            value=encoding.decode_count(mask.bit_count(), n),
            multiplicity=mult,
        )
        for mask, mult in zip(masks, mults)
    )
    return SnSet(rows)


def build_stage_kernel(sub: Subproblem, upstream: SnSet, n: int) -> Kernel:
    """Search kernel for a stage whose non-symbolic input is a concrete SN set.

    Cost cells are (upstream row r, target m) weighted by the row's
    multiplicity; the target uses the row's achieved value, so the stage
    compensates upstream rounding where it can.
    """
    stage = sub.stage
    if len(stage.symbolic_inputs) != 1 or stage.upstream_input is None:
        raise ValueError("stage kernel needs exactly one symbolic and one upstream input")
    sym = stage.symbolic_inputs[0]
    up = stage.upstream_input
    enc = stage.function.encoding
    grid = [enc.decode_count(t, n) for t in range(n + 1)]
    targets = [
        [
            enc.encode_value(eval_function(stage.function, {up: row.value, sym: grid[m]}), n)
            for m in range(n + 1)
        ]
        for row in upstream.rows
    ]
    scaled, scale = _scaled_targets(targets)
    return Kernel(
        circuit=stage.circuit,
        n=n,
        symbolic_input=sym,
        fixed_names=(up,),
        rows=tuple((row.bits.mask,) for row in upstream.rows),
        weights=tuple(row.multiplicity for row in upstream.rows),
        targets=tuple(tuple(r) for r in scaled),
        scale=scale,
        dff_wraparound=stage.circuit.dff_wraparound,
        tt=_detect_uniform_tt(stage.circuit, n, up, sym, stage.circuit.dff_wraparound),
    )


def solve_stage(
    sub: Subproblem,
    upstream: SnSet | None,
    n: int,
    cfg: SolveConfig = SolveConfig(),
    threads: int = 1,
) -> SynthesisResult:
    """Synthesize the stage's symbolic sequence(s)."""
    from .solver import solve

    stage = sub.stage
    if upstream is None:
        return solve(stage.circuit, stage.function, n, cfg=cfg, threads=threads)
    if upstream.total_multiplicity == 0 or not upstream.rows:
        raise ValueError("upstream SN set is empty")
    kernel = build_stage_kernel(sub, upstream, n)
    return solve_kernel(kernel, cfg, threads)


# --------------------------------------------------------------------------
# whole-problem pipeline

@dataclass(frozen=True)
class StageOutcome:
    subproblem: Subproblem
    result: SynthesisResult
    output_rows: int  # SnSet size after dedup (0 for the final stage)


@dataclass(frozen=True)
class StagedSynthesis:
    problem: StagedProblem
    outcomes: tuple[StageOutcome, ...]
    sequences: dict[str, NumberSequence]  # every global input
    avg_abs_error: Fraction  # end-to-end, exhaustive over the full input grid
    mse: Fraction


def compose_circuit(problem: StagedProblem) -> CircuitSpec:
    """Flatten the stages into one circuit over the global inputs."""
    gates: list[Gate] = []
    prev_output = None
    for k, stage in enumerate(problem.stages):
        mapping = {
            name: (prev_output if name == stage.upstream_input else name)
            for name in stage.circuit.inputs
        }
        for gate in stage.circuit.gates:
            args = tuple(mapping.get(a, a) for a in gate.args)
            gid = f"s{k}_{gate.id}"
            mapping[gate.id] = gid
            gates.append(Gate(gid, gate.op, args))
        prev_output = mapping[stage.circuit.output]
    return CircuitSpec(problem.inputs, tuple(gates), prev_output)


def compose_function(problem: StagedProblem) -> FunctionSpec:
    """Chain the stage functions into one expression over the global inputs."""

    def substitute(node: tuple, mapping: dict[str, tuple]) -> tuple:
        kind = node[0]
        if kind == "var":
            return mapping.get(node[1], node)
        if kind == "const":
            return node
        if kind in ("min", "max"):
            return (kind, tuple(substitute(a, mapping) for a in node[1]))
        return (kind,) + tuple(substitute(a, mapping) for a in node[1:])

    ast = None
    for stage in problem.stages:
        if ast is None:
            ast = stage.function.ast
        else:
            ast = substitute(stage.function.ast, {stage.upstream_input: ast})
    composed = FunctionSpec(
        source=f"composed({problem.name})",
        inputs=problem.inputs,
        encoding=problem.encoding,
        ast=ast,
    )
    return composed


def synthesize_staged(
    problem: StagedProblem,
    n: int | None = None,
    cfg: SolveConfig = SolveConfig(),
    threads: int = 1,
) -> StagedSynthesis:
    """Solve every stage in order, propagating concrete output-SN sets."""
    n = problem.n if n is None else n
    subs = decompose_circuit(problem)
    sequences: dict[str, NumberSequence] = {}
    outcomes: list[StageOutcome] = []
    sn_set: SnSet | None = None
    for sub in subs:
        stage = sub.stage
        result = solve_stage(sub, sn_set, n, cfg, threads)
        # solve() orders sequences by circuit inputs; for the first stage
        # that covers all symbolic inputs, later stages return only their
        # single symbolic one
        if sub.consumes_upstream:
            sequences.update(dict(zip(stage.symbolic_inputs, result.sequences)))
        else:
            sequences.update(dict(zip(stage.circuit.inputs, result.sequences)))
        last = sub is subs[-1]
        if not last:
            sn_set = enumerate_outputs(
                stage.circuit,
                {name: sequences[name] for name in stage.symbolic_inputs},
                n,
                problem.encoding,
                upstream=sn_set,
            )
        outcomes.append(StageOutcome(sub, result, 0 if last else len(sn_set.rows)))

    composed = compose_circuit(problem)
    composed_f = compose_function(problem)
    ordered = [sequences[name] for name in problem.inputs]
    avg, mse = sweep_error(composed, composed_f, ordered, n)
    return StagedSynthesis(
        problem=problem,
        outcomes=tuple(outcomes),
        sequences=sequences,
        avg_abs_error=avg,
        mse=mse,
    )


def baseline_end_to_end(
    problem: StagedProblem,
    sequences: dict[str, NumberSequence],
    n: int | None = None,
) -> tuple[Fraction, Fraction]:
    """End-to-end error of a concrete assignment of all global inputs."""
    n = problem.n if n is None else n
    composed = compose_circuit(problem)
    composed_f = compose_function(problem)
    ordered = [sequences[name] for name in problem.inputs]
    return sweep_error(composed, composed_f, ordered, n)
