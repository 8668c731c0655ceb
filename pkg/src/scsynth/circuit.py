"""Hardware and function specifications plus a cycle-accurate evaluator.

A circuit is a small DAG of AND/OR/XOR/XNOR/NOT/MUX/DFF gates over named
input streams with a single output.  The companion function specification is
an exact-rational expression over the input values that defines the value
the output stream should carry.  Problem documents (JSON) bundle both with a
stream length and encoding.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import SpecError
from .sn_core import Bitstream, Encoding

GATE_ARITY = {"AND": 2, "OR": 2, "XOR": 2, "XNOR": 2, "NOT": 1, "MUX": 3, "DFF": 1}

# Reserved argument name a MUX may use to reference the circuit's fixed
# select stream instead of a declared signal.
SELECT_REF = "R"


@dataclass(frozen=True)
class Gate:
    id: str
    op: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class CircuitSpec:
    """Gate DAG with named inputs and one output.

    Gates are stored in evaluation order: every argument refers to an input,
    an earlier gate, or (for a MUX select) the reserved name ``R`` bound to
    ``select_stream``.  DFF gates read their argument from the previous
    cycle; the initial state is 0 unless ``dff_wraparound`` is set, in which
    case cycle 0 reads the argument's last cycle.
    """

    inputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    output: str
    select_stream: Bitstream | None = None
    dff_wraparound: bool = False

    def __post_init__(self):
        known = set(self.inputs)
        if len(known) != len(self.inputs):
            raise SpecError("duplicate input names", "inputs")
        for pos, gate in enumerate(self.gates):
            loc = f"gates[{pos}]"
            if gate.op not in GATE_ARITY:
                raise SpecError(f"unknown op {gate.op!r}", loc)
            if gate.id in known or gate.id == SELECT_REF:
                raise SpecError(f"duplicate or reserved id {gate.id!r}", loc)
            if len(gate.args) != GATE_ARITY[gate.op]:
                raise SpecError(
                    f"{gate.op} takes {GATE_ARITY[gate.op]} args, got {len(gate.args)}", loc
                )
            for k, arg in enumerate(gate.args):
                if arg in known:
                    continue
                if gate.op == "MUX" and k == 2 and arg == SELECT_REF:
                    continue
                raise SpecError(f"argument {arg!r} is not an input or earlier gate", loc)
            known.add(gate.id)
        if self.output not in known:
            raise SpecError(f"output {self.output!r} does not exist", "output")

    @property
    def is_sequential(self) -> bool:
        return any(g.op == "DFF" for g in self.gates)

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def uses_select_stream(self) -> bool:
        return any(g.op == "MUX" and g.args[2] == SELECT_REF for g in self.gates)


@dataclass(frozen=True)
class FunctionSpec:
    """Exact-rational expression over input value symbols."""

    source: str
    inputs: tuple[str, ...]
    encoding: Encoding
    ast: tuple = field(compare=False, default=())


@dataclass(frozen=True)
class CycleTrace:
    """Per-signal bitstreams for one simulation (inputs and gates)."""

    n: int
    streams: dict[str, Bitstream]


@dataclass(frozen=True)
class ProblemSpec:
    """A parsed synthesis/evaluation problem document."""

    name: str
    n: int
    encoding: Encoding
    circuit: CircuitSpec
    function: FunctionSpec
    document: dict = field(compare=False, default_factory=dict)


# --------------------------------------------------------------------------
# function-expression parsing and evaluation

_BUILTINS = {
    "product": lambda names: " * ".join(names),
    "mean": lambda names: f"({' + '.join(names)}) / {len(names)}",
    "square": lambda names: f"{names[0]} * {names[0]}",
    "saturating_sum": lambda names: f"min(1, {' + '.join(names)})",
}


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "+-*/(),":
            tokens.append(c)
            i += 1
        elif c.isdigit() or c == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] == "."):
                j += 1
            tokens.append(text[i:j])
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise SpecError(f"unexpected character {c!r} in expression", "function")
    return tokens


class _ExprParser:
    def __init__(self, tokens: list[str], names: set[str]):
        self.tokens = tokens
        self.pos = 0
        self.names = names

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expect: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise SpecError("unexpected end of expression", "function")
        if expect is not None and tok != expect:
            raise SpecError(f"expected {expect!r}, got {tok!r}", "function")
        self.pos += 1
        return tok

    def parse(self) -> tuple:
        node = self.sum()
        if self.peek() is not None:
            raise SpecError(f"trailing tokens at {self.peek()!r}", "function")
        return node

    def sum(self) -> tuple:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self) -> tuple:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self) -> tuple:
        if self.peek() == "-":
            self.take()
            return ("neg", self.unary())
        return self.atom()

    def atom(self) -> tuple:
        tok = self.take()
        if tok == "(":
            node = self.sum()
            self.take(")")
            return node
        if tok in ("min", "max"):
            self.take("(")
            args = [self.sum()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.sum())
            self.take(")")
            if len(args) < 2:
                raise SpecError(f"{tok} needs at least 2 arguments", "function")
            return (tok, tuple(args))
        if tok[0].isdigit() or tok[0] == ".":
            try:
                return ("const", Fraction(tok))
            except ValueError as exc:
                raise SpecError(f"bad number {tok!r}", "function") from exc
        if tok in self.names:
            return ("var", tok)
        raise SpecError(f"unknown symbol {tok!r}", "function")


def parse_function(source: str, inputs: tuple[str, ...], encoding: Encoding) -> FunctionSpec:
    """Parse a function expression or builtin name over the given inputs."""
    text = source.strip()
    if text in _BUILTINS:
        if not inputs:
            raise SpecError(f"builtin {text!r} needs at least one input", "function")
        text = _BUILTINS[text](list(inputs))
    ast = _ExprParser(_tokenize(text), set(inputs)).parse()
    return FunctionSpec(source=source, inputs=tuple(inputs), encoding=encoding, ast=ast)


def eval_function(f: FunctionSpec, values: dict[str, Fraction]) -> Fraction:
    """Evaluate the expression exactly at the given input values."""

    def ev(node: tuple) -> Fraction:
        kind = node[0]
        if kind == "const":
            return node[1]
        if kind == "var":
            return Fraction(values[node[1]])
        if kind == "add":
            return ev(node[1]) + ev(node[2])
        if kind == "sub":
            return ev(node[1]) - ev(node[2])
        if kind == "mul":
            return ev(node[1]) * ev(node[2])
        if kind == "div":
            return ev(node[1]) / ev(node[2])
        if kind == "neg":
            return -ev(node[1])
        if kind == "min":
            return min(ev(a) for a in node[1])
        return max(ev(a) for a in node[1])

    return ev(f.ast)


def validate_function_range(f: FunctionSpec, n: int) -> None:
    """Check f stays inside the encoding's range on the full value grid."""
    lo, hi = f.encoding.value_range
    grid = [f.encoding.decode_count(i, n) for i in range(n + 1)]
    for combo in product(grid, repeat=len(f.inputs)):
        out = eval_function(f, dict(zip(f.inputs, combo)))
        if not lo <= out <= hi:
            raise SpecError(
                f"function value {out} at inputs {combo} escapes {f.encoding.value} "
                f"range [{lo}, {hi}]",
                "function",
            )


# --------------------------------------------------------------------------
# evaluation

def default_select_mask(n: int) -> int:
    """Alternating 10... select stream (bit 0 = 1) as an int mask."""
    mask = 0
    for j in range(0, n, 2):
        mask |= 1 << j
    return mask


def evaluate_masks(
    circuit: CircuitSpec,
    masks: dict[str, int],
    n: int,
    dff_wraparound: bool | None = None,
) -> dict[str, int]:
    """Core evaluator over int bitmasks; returns the mask of every signal.

    Bit j of a mask is the signal's value at cycle j.  DFF output at cycle j
    is its argument at cycle j-1 (cycle 0 per the wraparound setting), which
    is a plain shift because arguments always precede their gate.
    """
    wrap = circuit.dff_wraparound if dff_wraparound is None else dff_wraparound
    full = (1 << n) - 1
    values = dict(masks)
    if circuit.uses_select_stream():
        if circuit.select_stream is not None:
            if circuit.select_stream.n != n:
                raise ValueError(
                    f"select stream length {circuit.select_stream.n} != n={n}"
                )
            values[SELECT_REF] = circuit.select_stream.mask
        else:
            values[SELECT_REF] = default_select_mask(n)
    for gate in circuit.gates:
        a = values[gate.args[0]]
        if gate.op == "AND":
            out = a & values[gate.args[1]]
        elif gate.op == "OR":
            out = a | values[gate.args[1]]
        elif gate.op == "XOR":
            out = a ^ values[gate.args[1]]
        elif gate.op == "XNOR":
            out = ~(a ^ values[gate.args[1]]) & full
        elif gate.op == "NOT":
            out = ~a & full
        elif gate.op == "MUX":
            # select bit 1 picks the first data argument
            sel = values[gate.args[2]]
            out = (a & sel) | (values[gate.args[1]] & ~sel & full)
        else:  # DFF
            out = (a << 1) & full
            if wrap:
                out |= a >> (n - 1)
        values[gate.id] = out
    return values


def _check_inputs(circuit: CircuitSpec, inputs: dict[str, Bitstream]) -> int:
    missing = [name for name in circuit.inputs if name not in inputs]
    if missing:
        raise ValueError(f"missing input streams: {missing}")
    lengths = {inputs[name].n for name in circuit.inputs}
    if len(lengths) != 1:
        raise ValueError(f"input length mismatch: {sorted(lengths)}")
    return lengths.pop()


def evaluate(
    circuit: CircuitSpec,
    inputs: dict[str, Bitstream],
    dff_wraparound: bool | None = None,
) -> Bitstream:
    """Cycle-accurate evaluation; returns the output gate's stream."""
    n = _check_inputs(circuit, inputs)
    masks = {name: inputs[name].mask for name in circuit.inputs}
    values = evaluate_masks(circuit, masks, n, dff_wraparound)
    return Bitstream(n, values[circuit.output])


def evaluate_trace(
    circuit: CircuitSpec,
    inputs: dict[str, Bitstream],
    dff_wraparound: bool | None = None,
) -> CycleTrace:
    """Like :func:`evaluate` but keeps every signal's stream."""
    n = _check_inputs(circuit, inputs)
    masks = {name: inputs[name].mask for name in circuit.inputs}
    values = evaluate_masks(circuit, masks, n, dff_wraparound)
    return CycleTrace(n, {name: Bitstream(n, mask) for name, mask in values.items()})


def evaluate_ternary(
    circuit: CircuitSpec,
    inputs: dict[str, tuple[int, int]],
    n: int,
    dff_wraparound: bool | None = None,
) -> tuple[int, int]:
    """Three-valued evaluation for partially known inputs.

    Each signal is a ``(ones, zeros)`` mask pair: bits certainly 1 and bits
    certainly 0; a bit set in neither is unknown.  Returns the pair for the
    output signal.  Used for search bounds, where unknown input positions
    must propagate as unknowns rather than guesses.
    """
    wrap = circuit.dff_wraparound if dff_wraparound is None else dff_wraparound
    full = (1 << n) - 1
    values = dict(inputs)
    if circuit.uses_select_stream():
        sel = (
            circuit.select_stream.mask
            if circuit.select_stream is not None
            else default_select_mask(n)
        )
        values[SELECT_REF] = (sel, ~sel & full)
    for gate in circuit.gates:
        a1, a0 = values[gate.args[0]]
        if gate.op == "AND":
            b1, b0 = values[gate.args[1]]
            out = (a1 & b1, a0 | b0)
        elif gate.op == "OR":
            b1, b0 = values[gate.args[1]]
            out = (a1 | b1, a0 & b0)
        elif gate.op == "XOR":
            b1, b0 = values[gate.args[1]]
            out = ((a1 & b0) | (a0 & b1), (a1 & b1) | (a0 & b0))
        elif gate.op == "XNOR":
            b1, b0 = values[gate.args[1]]
            out = ((a1 & b1) | (a0 & b0), (a1 & b0) | (a0 & b1))
        elif gate.op == "NOT":
            out = (a0, a1)
        elif gate.op == "MUX":
            b1, b0 = values[gate.args[1]]
            s1, s0 = values[gate.args[2]]
            out = (
                (a1 & s1) | (b1 & s0) | (a1 & b1),
                (a0 & s1) | (b0 & s0) | (a0 & b0),
            )
        else:  # DFF
            ones = (a1 << 1) & full
            zeros = (a0 << 1) & full
            if wrap:
                ones |= a1 >> (n - 1)
                zeros |= a0 >> (n - 1)
            else:
                zeros |= 1  # initial state is a known 0
            out = (ones, zeros)
        values[gate.id] = out
    return values[circuit.output]


# --------------------------------------------------------------------------
# problem-document parsing

def _require(doc: dict, key: str, kind, location: str):
    if key not in doc:
        raise SpecError(f"missing required key {key!r}", location)
    value = doc[key]
    if not isinstance(value, kind):
        raise SpecError(f"{key!r} must be {kind.__name__}, got {type(value).__name__}", location)
    return value


def parse_gates(raw_gates, known: set[str], location: str) -> tuple[Gate, ...]:
    """Parse and topologically order a gate list; errors carry locations."""
    if not isinstance(raw_gates, list):
        raise SpecError("'gates' must be a list", location)
    gates = []
    ids = set()
    for pos, raw in enumerate(raw_gates):
        loc = f"{location}[{pos}]"
        if not isinstance(raw, dict):
            raise SpecError("gate must be an object", loc)
        gid = _require(raw, "id", str, loc)
        op = _require(raw, "op", str, loc).upper()
        args = _require(raw, "args", list, loc)
        if op not in GATE_ARITY:
            raise SpecError(f"unknown op {op!r}", loc)
        if len(args) != GATE_ARITY[op]:
            raise SpecError(f"{op} takes {GATE_ARITY[op]} args, got {len(args)}", loc)
        if gid in ids or gid in known or gid == SELECT_REF:
            raise SpecError(f"duplicate or reserved id {gid!r}", loc)
        ids.add(gid)
        gates.append(Gate(gid, op, tuple(str(a) for a in args)))

    # topological order over argument dependencies; DFF args are included so
    # feedback loops (out of scope) are rejected as cycles
    placed: list[Gate] = []
    resolved = set(known)
    pending = list(gates)
    while pending:
        progressed = False
        remaining = []
        for gate in pending:
            deps = [
                a
                for k, a in enumerate(gate.args)
                if not (gate.op == "MUX" and k == 2 and a == SELECT_REF)
            ]
            unknown = [a for a in deps if a not in resolved and a not in ids]
            if unknown:
                raise SpecError(
                    f"argument {unknown[0]!r} of gate {gate.id!r} is undefined", location
                )
            if all(a in resolved for a in deps):
                placed.append(gate)
                resolved.add(gate.id)
                progressed = True
            else:
                remaining.append(gate)
        if not progressed:
            cyclic = sorted(g.id for g in remaining)
            raise SpecError(f"cycle in combinational logic involving {cyclic}", location)
        pending = remaining
    return tuple(placed)


def parse_spec(document: dict | str) -> ProblemSpec:
    """Parse and validate a problem document (JSON object or text).

    Schema: ``{"n", "encoding", "inputs", "gates", "output", "function"}``
    with optional ``"select_stream"`` (ASCII bit string, index 0 = first
    cycle), ``"dff_wraparound"`` and ``"name"``.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}", "document") from exc
    if not isinstance(document, dict):
        raise SpecError("document must be a JSON object", "document")

    n = _require(document, "n", int, "n")
    if isinstance(n, bool) or n < 2:
        raise SpecError(f"n must be an integer >= 2, got {n!r}", "n")
    enc_text = _require(document, "encoding", str, "encoding")
    try:
        encoding = Encoding(enc_text)
    except ValueError as exc:
        raise SpecError(f"encoding must be unipolar or bipolar, got {enc_text!r}", "encoding") from exc

    raw_inputs = _require(document, "inputs", list, "inputs")
    if not raw_inputs or not all(isinstance(i, str) and i for i in raw_inputs):
        raise SpecError("'inputs' must be a non-empty list of names", "inputs")
    inputs = tuple(raw_inputs)

    gates = parse_gates(document.get("gates", []), set(inputs), "gates")
    output = _require(document, "output", str, "output")

    select_stream = None
    if document.get("select_stream") is not None:
        raw_sel = _require(document, "select_stream", str, "select_stream")
        if set(raw_sel) - {"0", "1"} or len(raw_sel) != n:
            raise SpecError(
                f"select_stream must be {n} ASCII bits, got {raw_sel!r}", "select_stream"
            )
        select_stream = Bitstream.from_string(raw_sel)

    wraparound = bool(document.get("dff_wraparound", False))
    try:
        circuit = CircuitSpec(inputs, gates, output, select_stream, wraparound)
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc), "gates") from exc

    func_text = _require(document, "function", str, "function")
    function = parse_function(func_text, inputs, encoding)
    validate_function_range(function, n)

    name = str(document.get("name", "")) or "problem"
    return ProblemSpec(name, n, encoding, circuit, function, dict(document))
