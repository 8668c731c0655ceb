"""Mixed-integer program construction for number-sequence synthesis.

The encoding follows the comparator-SNG structure: one matrix of binary
variables per symbolic input, where row i is the SN for target value i.
Row sums are pinned to i (value constraints), columns must be monotone down
the rows (comparator semantics), and the circuit is unrolled per grid cell
with standard linearizations of each gate.  The objective minimizes the sum
of absolute count errors via a tpos/tneg split per cell.

Gate output variables are continuous in [0, 1]; on binary inputs the gate
constraint rows pin them to the exact Boolean value, so the only integer
variables are the matrix entries themselves (a strict mode declares gate
variables binary as well).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import (
    SELECT_REF,
    CircuitSpec,
    FunctionSpec,
    default_select_mask,
    evaluate_masks,
)
from .errors import ConfigError, InfeasibleError, ScsynthError, SpecError, VerificationError
from .sn_core import NumberSequence, generate

MATRIX_PREFIXES = ("x", "y")


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" | "continuous"
    lb: Fraction = Fraction(0)
    ub: Fraction | None = None


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[str, Fraction], ...]
    relation: str  # "<=" | "=" | ">="
    rhs: Fraction


@dataclass(frozen=True)
class EncodeOptions:
    """Build options.

    ``fix_first_sequence`` fixes the first input's matrix to constants:
    ``"ramp"`` (the default), an explicit sequence, or ``None`` to leave
    both matrices symbolic.  It applies to two-input circuits only.
    ``fix_boundary_rows`` substitutes the all-zero/all-one rows 0 and N as
    constants.  ``symbolic_select`` turns the MUX select stream's bits into
    shared binary variables.  ``dff_wraparound`` overrides the circuit's
    DFF cycle-0 semantics when not ``None``.
    """

    fix_boundary_rows: bool = False
    fix_first_sequence: object = "ramp"
    symbolic_select: bool = False
    dff_wraparound: bool | None = None

    def resolve_fix_first(self, n: int) -> NumberSequence | None:
        raw = self.fix_first_sequence
        if raw is None:
            return None
        if isinstance(raw, str):
            if raw != "ramp":
                raise ConfigError(f"fix_first_sequence must be 'ramp', a sequence or None, got {raw!r}")
            return NumberSequence(tuple(range(n)))
        seq = raw if isinstance(raw, NumberSequence) else NumberSequence(tuple(raw))
        if seq.n != n:
            raise ConfigError(f"fix_first_sequence has length {seq.n}, expected {n}")
        return seq


@dataclass(frozen=True)
class ProgramMeta:
    """Layout information the exporter/importer needs beyond the raw LP."""

    n: int
    circuit: CircuitSpec
    function: FunctionSpec
    opts: EncodeOptions
    symbolic: tuple[tuple[str, str], ...]  # (input name, variable prefix)
    fixed: tuple[tuple[str, NumberSequence], ...]
    cells: tuple[tuple[int, ...], ...]
    targets: tuple[Fraction, ...]  # enc(f) per cell, cell order
    select_mask: int | None
    dff_wraparound: bool


@dataclass
class ConstraintSystem:
    """Variables, linear constraints and a minimization objective."""

    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: list[tuple[str, Fraction]] = field(default_factory=list)
    meta: ProgramMeta | None = None

    def __post_init__(self):
        self._index: dict[str, Variable] = {v.name: v for v in self.variables}

    def add_variable(self, name: str, kind: str, lb=Fraction(0), ub=None) -> str:
        if name in self._index:
            raise ValueError(f"duplicate variable {name}")
        var = Variable(name, kind, Fraction(lb), None if ub is None else Fraction(ub))
        self.variables.append(var)
        self._index[name] = var
        return name

    def add_constraint(self, name: str, coeffs, relation: str, rhs) -> None:
        terms = []
        for var, coef in coeffs:
            if var not in self._index:
                raise ValueError(f"constraint {name} references unknown variable {var}")
            coef = Fraction(coef)
            if coef != 0:
                terms.append((var, coef))
        self.constraints.append(Constraint(name, tuple(terms), relation, Fraction(rhs)))

    def variable(self, name: str) -> Variable:
        return self._index[name]

    def var_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def check_assignment(self, assignment: dict, tol: Fraction | float = 0):
        """Return the first violated constraint/bound as (name, detail), or None."""
        for var in self.variables:
            value = assignment[var.name]
            if value < var.lb - tol:
                return (f"bound:{var.name}", f"{value} < lower bound {var.lb}")
            if var.ub is not None and value > var.ub + tol:
                return (f"bound:{var.name}", f"{value} > upper bound {var.ub}")
        for con in self.constraints:
            lhs = sum(coef * assignment[var] for var, coef in con.coeffs)
            if con.relation == "<=" and lhs > con.rhs + tol:
                return (con.name, f"lhs {lhs} > rhs {con.rhs}")
            if con.relation == ">=" and lhs < con.rhs - tol:
                return (con.name, f"lhs {lhs} < rhs {con.rhs}")
            if con.relation == "=" and abs(lhs - con.rhs) > tol:
                return (con.name, f"lhs {lhs} != rhs {con.rhs}")
        return None

    def objective_value(self, assignment: dict) -> Fraction:
        return sum((coef * Fraction(assignment[var]) for var, coef in self.objective), Fraction(0))


# --------------------------------------------------------------------------
# program construction

class _Operand:
    """A gate operand per (cell, cycle): either a variable or a 0/1 constant."""

    __slots__ = ("var", "const")

    def __init__(self, var: str | None, const: int = 0):
        self.var = var
        self.const = const


def _cell_tag(cell: tuple[int, ...]) -> str:
    return "_".join(str(c) for c in cell)


def _emit(sys: ConstraintSystem, name: str, terms, relation: str, rhs) -> None:
    """Add a constraint over operands, folding constants into the rhs."""
    coeffs: dict[str, Fraction] = {}
    rhs = Fraction(rhs)
    for op, coef in terms:
        if op.var is None:
            rhs -= coef * op.const
        else:
            coeffs[op.var] = coeffs.get(op.var, Fraction(0)) + coef
    sys.add_constraint(name, list(coeffs.items()), relation, rhs)


def _encode_and(sys, tag, z, p, q):
    _emit(sys, f"{tag}_a", [(z, 1), (p, -1), (q, -1)], ">=", -1)
    _emit(sys, f"{tag}_b", [(z, 1), (p, -1)], "<=", 0)
    _emit(sys, f"{tag}_c", [(z, 1), (q, -1)], "<=", 0)


def _encode_or(sys, tag, z, p, q):
    _emit(sys, f"{tag}_a", [(z, 1), (p, -1), (q, -1)], "<=", 0)
    _emit(sys, f"{tag}_b", [(z, 1), (p, -1)], ">=", 0)
    _emit(sys, f"{tag}_c", [(z, 1), (q, -1)], ">=", 0)


def _encode_xor(sys, tag, z, p, q):
    _emit(sys, f"{tag}_a", [(z, 1), (p, -1), (q, -1)], "<=", 0)
    _emit(sys, f"{tag}_b", [(z, 1), (p, -1), (q, 1)], ">=", 0)
    _emit(sys, f"{tag}_c", [(z, 1), (p, 1), (q, -1)], ">=", 0)
    _emit(sys, f"{tag}_d", [(z, 1), (p, 1), (q, 1)], "<=", 2)


def _encode_not(sys, tag, z, p):
    _emit(sys, f"{tag}_a", [(z, 1), (p, 1)], "=", 1)


def _encode_alias(sys, tag, z, p):
    _emit(sys, f"{tag}_a", [(z, 1), (p, -1)], "=", 0)


def singleton_gate_system(op: str, inputs: tuple[int, ...], strict: bool = False
                          ) -> tuple[ConstraintSystem, str]:
    """One gate with constant binary inputs; returns (system, output var).

    Composite ops (XNOR, MUX) declare their auxiliary variables exactly as
    the full builder does, so feasibility checks exercise the production
    encodings.  MUX inputs are (data0, data1, select).
    """
    sys = ConstraintSystem()
    kind = "binary" if strict else "continuous"
    z = _Operand(sys.add_variable("z", kind, 0, 1))
    ops = [_Operand(None, b) for b in inputs]
    if op == "AND":
        _encode_and(sys, "g", z, ops[0], ops[1])
    elif op == "OR":
        _encode_or(sys, "g", z, ops[0], ops[1])
    elif op == "XOR":
        _encode_xor(sys, "g", z, ops[0], ops[1])
    elif op == "NOT":
        _encode_not(sys, "g", z, ops[0])
    elif op == "XNOR":
        w = _Operand(sys.add_variable("w", kind, 0, 1))
        _encode_xor(sys, "g_w", w, ops[0], ops[1])
        _encode_not(sys, "g", z, w)
    elif op == "MUX":
        a0 = _Operand(sys.add_variable("a0", kind, 0, 1))
        ns = _Operand(sys.add_variable("ns", kind, 0, 1))
        a1 = _Operand(sys.add_variable("a1", kind, 0, 1))
        _encode_and(sys, "g_p0", a0, ops[0], ops[2])
        _encode_not(sys, "g_pn", ns, ops[2])
        _encode_and(sys, "g_p1", a1, ops[1], ns)
        _encode_or(sys, "g_po", z, a0, a1)
    elif op == "DFF":
        _encode_alias(sys, "g", z, ops[0])
    else:
        raise ValueError(f"unknown op {op!r}")
    return sys, "z"


class _Builder:
    def __init__(self, circuit: CircuitSpec, f: FunctionSpec, n: int, opts: EncodeOptions,
                 strict_binaries: bool):
        if circuit.arity not in (1, 2):
            raise ConfigError(
                f"build_program handles 1- or 2-input circuits; {circuit.arity} inputs "
                "need the staged decomposition"
            )
        self.circuit = circuit
        self.f = f
        self.n = n
        self.opts = opts
        self.strict = strict_binaries
        self.sys = ConstraintSystem()
        self.wrap = circuit.dff_wraparound if opts.dff_wraparound is None else opts.dff_wraparound

        fix_first = opts.resolve_fix_first(n) if circuit.arity == 2 else None
        self.fixed: dict[str, NumberSequence] = {}
        self.symbolic: list[tuple[str, str]] = []
        if circuit.arity == 2 and fix_first is not None:
            self.fixed[circuit.inputs[0]] = fix_first
            self.symbolic.append((circuit.inputs[1], "y"))
        else:
            for name, prefix in zip(circuit.inputs, MATRIX_PREFIXES):
                self.symbolic.append((name, prefix))
        self.prefix_of = dict(self.symbolic)

        if circuit.arity == 2:
            self.cells = tuple((a, b) for a in range(n + 1) for b in range(n + 1))
        else:
            self.cells = tuple((a,) for a in range(n + 1))

        self.select_mask = None
        if circuit.uses_select_stream():
            self.select_mask = (
                circuit.select_stream.mask
                if circuit.select_stream is not None
                else default_select_mask(n)
            )

    # -- variables ---------------------------------------------------------

    def declare_matrix_vars(self):
        n = self.n
        for _, prefix in self.symbolic:
            for i in range(n + 1):
                if self.opts.fix_boundary_rows and i in (0, n):
                    continue
                for j in range(n):
                    self.sys.add_variable(f"{prefix}_{i}_{j}", "binary", 0, 1)

    def declare_select_vars(self):
        if self.select_mask is not None and self.opts.symbolic_select:
            for j in range(self.n):
                self.sys.add_variable(f"r_{j}", "binary", 0, 1)

    def matrix_operand(self, name: str, row: int, j: int) -> _Operand:
        if name in self.fixed:
            return _Operand(None, 1 if self.fixed[name][j] < row else 0)
        if self.opts.fix_boundary_rows and row in (0, self.n):
            return _Operand(None, 0 if row == 0 else 1)
        return _Operand(f"{self.prefix_of[name]}_{row}_{j}")

    def select_operand(self, j: int) -> _Operand:
        if self.opts.symbolic_select:
            return _Operand(f"r_{j}")
        return _Operand(None, (self.select_mask >> j) & 1)

    # -- constraint helpers --------------------------------------------------

    def emit(self, name: str, terms: list[tuple[_Operand, int]], relation: str, rhs) -> None:
        _emit(self.sys, name, terms, relation, rhs)

    def new_gate_var(self, gate_id: str, cell: tuple[int, ...], j: int) -> _Operand:
        name = f"g_{gate_id}_{_cell_tag(cell)}_{j}"
        kind = "binary" if self.strict else "continuous"
        self.sys.add_variable(name, kind, 0, 1)
        return _Operand(name)

    # -- per-cell circuit unrolling -----------------------------------------

    def encode_cell(self, cell: tuple[int, ...]):
        n = self.n
        tag_cell = _cell_tag(cell)
        # signal -> per-cycle operands
        signals: dict[str, list[_Operand]] = {}
        for pos, name in enumerate(self.circuit.inputs):
            signals[name] = [self.matrix_operand(name, cell[pos], j) for j in range(n)]
        for gate in self.circuit.gates:
            zs = [self.new_gate_var(gate.id, cell, j) for j in range(n)]
            tag = f"hw_{gate.id}_{tag_cell}"
            if gate.op == "DFF":
                src = signals[gate.args[0]]
                for j in range(n):
                    if j == 0 and not self.wrap:
                        self.emit(f"{tag}_{j}_a", [(zs[0], 1)], "=", 0)
                    else:
                        _encode_alias(self.sys, f"{tag}_{j}", zs[j], src[j - 1])
            elif gate.op == "MUX":
                d0, d1 = signals[gate.args[0]], signals[gate.args[1]]
                sel_name = gate.args[2]
                if sel_name == SELECT_REF:
                    sels = [self.select_operand(j) for j in range(n)]
                else:
                    sels = signals[sel_name]
                for j in range(n):
                    s = sels[j]
                    if s.var is None:
                        # constant select substitutes the chosen branch
                        chosen = d0[j] if s.const else d1[j]
                        _encode_alias(self.sys, f"{tag}_{j}", zs[j], chosen)
                    else:
                        # compose from AND/OR/NOT: z = (d0 and s) or (d1 and not s)
                        a0 = self.new_gate_var(f"{gate.id}__s0", cell, j)
                        ns = self.new_gate_var(f"{gate.id}__ns", cell, j)
                        a1 = self.new_gate_var(f"{gate.id}__s1", cell, j)
                        _encode_and(self.sys, f"{tag}_{j}_p0", a0, d0[j], s)
                        _encode_not(self.sys, f"{tag}_{j}_pn", ns, s)
                        _encode_and(self.sys, f"{tag}_{j}_p1", a1, d1[j], ns)
                        _encode_or(self.sys, f"{tag}_{j}_po", zs[j], a0, a1)
            else:
                for j in range(n):
                    ops = [signals[a][j] for a in gate.args]
                    if gate.op == "AND":
                        _encode_and(self.sys, f"{tag}_{j}", zs[j], ops[0], ops[1])
                    elif gate.op == "OR":
                        _encode_or(self.sys, f"{tag}_{j}", zs[j], ops[0], ops[1])
                    elif gate.op == "XOR":
                        _encode_xor(self.sys, f"{tag}_{j}", zs[j], ops[0], ops[1])
                    elif gate.op == "XNOR":
                        w = self.new_gate_var(f"{gate.id}__xor", cell, j)
                        _encode_xor(self.sys, f"{tag}_{j}_w", w, ops[0], ops[1])
                        _encode_not(self.sys, f"{tag}_{j}", zs[j], w)
                    else:  # NOT
                        _encode_not(self.sys, f"{tag}_{j}", zs[j], ops[0])
            signals[gate.id] = zs
        return signals[self.circuit.output]

    def cell_target(self, cell: tuple[int, ...]) -> Fraction:
        enc = self.f.encoding
        values = {
            name: enc.decode_count(cell[pos], self.n)
            for pos, name in enumerate(self.circuit.inputs)
        }
        from .circuit import eval_function

        return enc.encode_value(eval_function(self.f, values), self.n)

    def build(self) -> ConstraintSystem:
        n = self.n
        self.declare_matrix_vars()
        self.declare_select_vars()

        for _, prefix in self.symbolic:
            for i in range(n + 1):
                if self.opts.fix_boundary_rows and i in (0, n):
                    continue
                self.sys.add_constraint(
                    f"value_{prefix}_{i}",
                    [(f"{prefix}_{i}_{j}", Fraction(1)) for j in range(n)],
                    "=",
                    Fraction(i),
                )
            for i in range(n):
                if self.opts.fix_boundary_rows and i in (0, n - 1):
                    continue  # against a constant row the bound is vacuous
                for j in range(n):
                    self.sys.add_constraint(
                        f"mono_{prefix}_{i}_{j}",
                        [(f"{prefix}_{i}_{j}", Fraction(1)), (f"{prefix}_{i + 1}_{j}", Fraction(-1))],
                        "<=",
                        Fraction(0),
                    )

        targets = []
        for cell in self.cells:
            out_ops = self.encode_cell(cell)
            tag = _cell_tag(cell)
            tpos = self.sys.add_variable(f"tpos_{tag}", "continuous", 0, None)
            tneg = self.sys.add_variable(f"tneg_{tag}", "continuous", 0, None)
            target = self.cell_target(cell)
            targets.append(target)
            # H - (tpos - tneg) = enc(f): the signed error tpos - tneg equals
            # the cost term, |cost| = tpos + tneg under minimization
            terms = [(op, 1) for op in out_ops] + [(_Operand(tpos), -1), (_Operand(tneg), 1)]
            self.emit(f"cost_{tag}", terms, "=", target)
            self.sys.objective.append((tpos, Fraction(1)))
            self.sys.objective.append((tneg, Fraction(1)))

        self.sys.meta = ProgramMeta(
            n=n,
            circuit=self.circuit,
            function=self.f,
            opts=self.opts,
            symbolic=tuple(self.symbolic),
            fixed=tuple(self.fixed.items()),
            cells=self.cells,
            targets=tuple(targets),
            select_mask=self.select_mask,
            dff_wraparound=self.wrap,
        )
        return self.sys


def build_program(
    circuit: CircuitSpec,
    f: FunctionSpec,
    n: int,
    opts: EncodeOptions = EncodeOptions(),
    strict_binaries: bool = False,
) -> ConstraintSystem:
    """Construct the synthesis MIP for a 1- or 2-input circuit."""
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    return _Builder(circuit, f, n, opts, strict_binaries).build()


# --------------------------------------------------------------------------
# induced assignments and sequence recovery

def induced_assignment(sys: ConstraintSystem, sequences: dict[str, NumberSequence]) -> dict[str, Fraction]:
    """Exact assignment realized by concrete sequences for every input.

    Matrix variables come from the comparator rows, gate variables from
    simulation per cell, and tpos/tneg from the sign of the cost term.
    """
    meta = sys.meta
    if meta is None:
        raise ValueError("system carries no build metadata")
    n = meta.n
    for name, seq in meta.fixed:
        if name in sequences and tuple(sequences[name]) != seq.values:
            raise ValueError(f"input {name} is fixed to {seq.values} by the program")
    assignment: dict[str, Fraction] = {}
    streams: dict[str, list[int]] = {}
    for name in meta.circuit.inputs:
        seq = dict(meta.fixed).get(name) or sequences[name]
        streams[name] = [generate(seq, t).mask for t in range(n + 1)]
    for name, prefix in meta.symbolic:
        seq = sequences[name]
        for i in range(n + 1):
            if meta.opts.fix_boundary_rows and i in (0, n):
                continue
            row = streams[name][i]
            for j in range(n):
                assignment[f"{prefix}_{i}_{j}"] = Fraction((row >> j) & 1)
    if meta.select_mask is not None and meta.opts.symbolic_select:
        for j in range(n):
            assignment[f"r_{j}"] = Fraction((meta.select_mask >> j) & 1)

    for idx, cell in enumerate(meta.cells):
        masks = {
            name: streams[name][cell[pos]] for pos, name in enumerate(meta.circuit.inputs)
        }
        values = evaluate_masks(meta.circuit, masks, n, meta.dff_wraparound)
        tag = _cell_tag(cell)
        for gate in meta.circuit.gates:
            out = values[gate.id]
            for j in range(n):
                assignment[f"g_{gate.id}_{tag}_{j}"] = Fraction((out >> j) & 1)
            if gate.op == "MUX" and meta.opts.symbolic_select and gate.args[2] == SELECT_REF:
                d0 = values[gate.args[0]]
                d1 = values[gate.args[1]]
                sel = meta.select_mask
                for j in range(n):
                    s = (sel >> j) & 1
                    assignment[f"g_{gate.id}__s0_{tag}_{j}"] = Fraction((d0 >> j) & 1 if s else 0)
                    assignment[f"g_{gate.id}__ns_{tag}_{j}"] = Fraction(1 - s)
                    assignment[f"g_{gate.id}__s1_{tag}_{j}"] = Fraction(0 if s else (d1 >> j) & 1)
            elif gate.op == "XNOR":
                a = values[gate.args[0]]
                b = values[gate.args[1]]
                w = a ^ b
                for j in range(n):
                    assignment[f"g_{gate.id}__xor_{tag}_{j}"] = Fraction((w >> j) & 1)
        h = values[meta.circuit.output].bit_count()
        cost = h - meta.targets[idx]
        assignment[f"tpos_{tag}"] = max(cost, Fraction(0))
        assignment[f"tneg_{tag}"] = max(-cost, Fraction(0))
    return assignment


def recover_sequences(assignment: dict, n: int | None = None) -> tuple[NumberSequence, ...]:
    """Rebuild number sequences from matrix variables: S[j] = N - column sum.

    Rows absent from the assignment are the boundary constants (row 0 all
    zero, row N all one).  Raises :class:`VerificationError` when the result
    is not a permutation or does not regenerate the matrix rows.
    """
    matrices: dict[str, dict[tuple[int, int], Fraction]] = {}
    for name, value in assignment.items():
        parts = name.split("_")
        if len(parts) == 3 and parts[0] in MATRIX_PREFIXES:
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                continue
            matrices.setdefault(parts[0], {})[(i, j)] = Fraction(value)
    if not matrices:
        raise VerificationError("assignment contains no matrix variables")
    if n is None:
        n = 1 + max(j for cells in matrices.values() for (_, j) in cells)

    out = []
    for prefix in MATRIX_PREFIXES:
        if prefix not in matrices:
            continue
        cells = matrices[prefix]

        def entry(i: int, j: int) -> int:
            if (i, j) in cells:
                value = cells[(i, j)]
                if value not in (0, 1):
                    raise VerificationError(f"{prefix}_{i}_{j} = {value} is not binary")
                return int(value)
            if i == 0:
                return 0
            if i == n:
                return 1
            raise VerificationError(f"missing matrix variable {prefix}_{i}_{j}")

        values = []
        for j in range(n):
            col = sum(entry(i, j) for i in range(n + 1))
            values.append(n - col)
        try:
            seq = NumberSequence(tuple(values))
        except ValueError as exc:
            raise VerificationError(f"recovered {prefix} sequence is not a permutation: {exc}") from exc
        for i in range(n + 1):
            row = generate(seq, i)
            for j in range(n):
                if entry(i, j) != row.bit(j):
                    raise VerificationError(
                        f"matrix row {prefix}_{i} is not the comparator row of {values}"
                    )
        out.append(seq)
    return tuple(out)


@dataclass(frozen=True)
class VerifiedSolution:
    """An imported assignment after exact verification."""

    assignment: dict[str, Fraction]
    objective: Fraction
    sequences: tuple[NumberSequence, ...]  # in circuit input order


def parse_solution(text: str) -> dict[str, float]:
    """Parse "name value" per line; '#' starts a comment."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SpecError(f"expected 'name value', got {raw!r}", f"line {lineno}")
        try:
            out[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise SpecError(f"bad value {parts[1]!r}", f"line {lineno}") from exc
    return out


def import_solution(sys: ConstraintSystem, assignment: dict) -> VerifiedSolution:
    """Verify an external assignment and rebuild the exact solution.

    Checks every constraint within 1e-6 on the raw values, rounds the binary
    variables, re-checks exactly, and canonicalizes the continuous variables
    (gate values by simulation, tpos/tneg complementary) from the rounded
    binaries.  The reported objective is the canonical one.
    """
    missing = [v.name for v in sys.variables if v.name not in assignment]
    if missing:
        raise ValueError(f"assignment misses {len(missing)} variables, first: {missing[0]}")

    violation = sys.check_assignment(assignment, tol=1e-6)
    if violation is not None:
        raise InfeasibleError(*violation)

    rounded: dict[str, Fraction] = {}
    for var in sys.variables:
        value = assignment[var.name]
        if var.kind == "binary":
            rounded[var.name] = Fraction(1 if value >= 0.5 else 0)

    meta = sys.meta
    if meta is None:
        raise ValueError("system carries no build metadata")
    try:
        recovered = recover_sequences(rounded, meta.n) if rounded else ()
    except VerificationError as exc:
        raise InfeasibleError("value/monotonicity", str(exc)) from exc
    by_prefix = dict(zip([p for _, p in meta.symbolic], recovered))
    if len(by_prefix) != len(meta.symbolic):
        raise InfeasibleError("matrix", "assignment misses a symbolic matrix")
    sequences = {name: by_prefix[prefix] for name, prefix in meta.symbolic}

    exact = induced_assignment(sys, sequences)
    violation = sys.check_assignment(exact, tol=0)
    if violation is not None:
        raise InfeasibleError(*violation)

    fixed = dict(meta.fixed)
    ordered = tuple(
        fixed[name] if name in fixed else sequences[name] for name in meta.circuit.inputs
    )
    return VerifiedSolution(exact, sys.objective_value(exact), ordered)


# --------------------------------------------------------------------------
# LP text format

def _fmt_number(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return format(float(x), ".17g")


def _fmt_terms(terms) -> list[str]:
    chunks = []
    for pos, (var, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{_fmt_number(mag)} {var}"
        if pos == 0 and sign == "+":
            chunks.append(body)
        else:
            chunks.append(f"{sign} {body}")
    return chunks or ["0"]


def _wrap(prefix: str, chunks: list[str], width: int = 200) -> list[str]:
    lines = []
    line = prefix
    for chunk in chunks:
        if len(line) + len(chunk) + 1 > width and line != prefix:
            lines.append(line)
            line = " " + chunk
        else:
            line += " " + chunk
    lines.append(line)
    return lines


def export_lp(sys: ConstraintSystem, name: str = "scsynth") -> str:
    """Serialize to CPLEX LP text: objective, constraints, bounds, binaries."""
    lines = [f"\\ {name}", "Minimize"]
    lines.extend(_wrap(" obj:", _fmt_terms(sys.objective)))
    lines.append("Subject To")
    for con in sys.constraints:
        rel = con.relation if con.relation != "=" else "="
        chunks = _fmt_terms(con.coeffs) + [rel, _fmt_number(con.rhs)]
        lines.extend(_wrap(f" {con.name}:", chunks))
    bounds = []
    for var in sys.variables:
        if var.kind == "binary":
            continue
        if var.lb == 0 and var.ub is None:
            continue  # LP default
        if var.ub is None:
            bounds.append(f" {_fmt_number(var.lb)} <= {var.name}")
        else:
            bounds.append(f" {_fmt_number(var.lb)} <= {var.name} <= {_fmt_number(var.ub)}")
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)
    binaries = [v.name for v in sys.variables if v.kind == "binary"]
    if binaries:
        lines.append("Binary")
        for chunk_start in range(0, len(binaries), 8):
            lines.append(" " + " ".join(binaries[chunk_start:chunk_start + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass
class LpModel:
    """Parsed LP text, for round-trip checking and external-solution tooling."""

    sense: str
    objective: dict[str, float]
    constraints: list[tuple[str, dict[str, float], str, float]]
    bounds: dict[str, tuple[float, float | None]]
    binaries: set[str]

    def variable_names(self) -> set[str]:
        names = set(self.objective) | set(self.binaries) | set(self.bounds)
        for _, coeffs, _, _ in self.constraints:
            names.update(coeffs)
        return names


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def parse_lp(text: str) -> LpModel:
    """Parse the LP grammar produced by :func:`export_lp` (plus hand LPs)."""
    # strip comments, keep order
    lines = []
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if line.strip():
            lines.append(line)

    section = None
    sense = "minimize"
    tokens_by_section: dict[str, list[str]] = {"objective": [], "subject": [], "bounds": [], "binary": []}
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        lowered = stripped.lower()
        if lowered in ("minimize", "maximize", "min", "max"):
            sense = "minimize" if lowered.startswith("min") else "maximize"
            section = "objective"
        elif lowered in ("subject to", "st", "s.t.", "such that"):
            section = "subject"
        elif lowered in ("bounds", "bound"):
            section = "bounds"
        elif lowered in ("binary", "binaries", "bin"):
            section = "binary"
        elif lowered in ("general", "generals", "gen"):
            section = "general"
        elif lowered == "end":
            section = None
        else:
            if section is None:
                raise SpecError(f"content outside any LP section: {stripped!r}", "lp")
            if section == "bounds":
                tokens_by_section["bounds"].append(stripped)
            elif section in tokens_by_section:
                tokens_by_section[section].extend(stripped.replace(":", " : ").split())
        i += 1

    def parse_expr(tokens: list[str], start: int) -> tuple[dict[str, float], int]:
        coeffs: dict[str, float] = {}
        sign = 1.0
        pending: float | None = None
        k = start
        while k < len(tokens):
            tok = tokens[k]
            if tok in ("<=", ">=", "=", "<", ">"):
                break
            if k + 1 < len(tokens) and tokens[k + 1] == ":":
                break  # next label
            if tok == "+":
                pass
            elif tok == "-":
                sign = -sign
            elif _is_number(tok):
                pending = float(tok) if pending is None else pending * float(tok)
            else:
                coeffs[tok] = coeffs.get(tok, 0.0) + sign * (1.0 if pending is None else pending)
                sign, pending = 1.0, None
            k += 1
        return coeffs, k

    obj_tokens = tokens_by_section["objective"]
    if obj_tokens[:2] and obj_tokens[1] == ":":
        obj_tokens = obj_tokens[2:]
    objective, rest = parse_expr(obj_tokens, 0)
    if rest != len(obj_tokens):
        raise SpecError("trailing tokens in objective", "lp")

    constraints = []
    toks = tokens_by_section["subject"]
    k = 0
    auto = 0
    while k < len(toks):
        if k + 1 < len(toks) and toks[k + 1] == ":":
            label = toks[k]
            k += 2
        else:
            label = f"c{auto}"
        auto += 1
        coeffs, k = parse_expr(toks, k)
        if k >= len(toks):
            raise SpecError(f"constraint {label} has no relation", "lp")
        rel = toks[k]
        rel = {"<": "<=", ">": ">="}.get(rel, rel)
        k += 1
        if k >= len(toks) or not _is_number(toks[k]):
            raise SpecError(f"constraint {label} has no numeric rhs", "lp")
        rhs = float(toks[k])
        k += 1
        constraints.append((label, coeffs, rel, rhs))

    bounds: dict[str, tuple[float, float | None]] = {}
    for line in tokens_by_section["bounds"]:
        parts = line.split()
        if len(parts) == 5 and parts[1] == "<=" and parts[3] == "<=":
            bounds[parts[2]] = (float(parts[0]), float(parts[4]))
        elif len(parts) == 3 and parts[1] == "<=" and _is_number(parts[0]):
            bounds[parts[2]] = (float(parts[0]), None)
        elif len(parts) == 3 and parts[1] == "<=":
            bounds[parts[0]] = (0.0, float(parts[2]))
        elif len(parts) == 3 and parts[1] == ">=":
            bounds[parts[0]] = (float(parts[2]), None)
        elif len(parts) == 2 and parts[1].lower() == "free":
            bounds[parts[0]] = (float("-inf"), None)
        else:
            raise SpecError(f"cannot parse bound line {line!r}", "lp")

    binaries = set(tokens_by_section["binary"])
    return LpModel(sense, objective, constraints, bounds, binaries)
