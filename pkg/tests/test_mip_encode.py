import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest

from scsynth import (
    EncodeOptions,
    InfeasibleError,
    NumberSequence,
    SpecError,
    build_program,
    export_lp,
    import_solution,
    parse_lp,
    parse_solution,
    parse_spec,
    recover_sequences,
    generate,
)
from scsynth.errors import ConfigError, VerificationError
from scsynth.evalbench import sweep_counts
from scsynth.mip_encode import (
    ConstraintSystem,
    induced_assignment,
    singleton_gate_system,
)

RAMP4 = NumberSequence((0, 1, 2, 3))


def build_multiplier(n=4, opts=EncodeOptions(), **kwargs):
    p = parse_spec({
        "name": "multiplier", "n": n, "encoding": "unipolar", "inputs": ["x", "y"],
        "gates": [{"id": "z", "op": "AND", "args": ["x", "y"]}],
        "output": "z", "function": "x * y",
    })
    return p, build_program(p.circuit, p.function, n, opts, **kwargs)


class TestBuildProgram:
    def test_multiplier_structure(self):
        _, sys_ = build_multiplier()
        families = Counter(c.name.split("_")[0] for c in sys_.constraints)
        assert families == {"value": 5, "mono": 16, "hw": 300, "cost": 25}
        kinds = Counter(v.kind for v in sys_.variables)
        assert kinds == {"binary": 20, "continuous": 150}
        assert len(sys_.meta.cells) == 25

    def test_boundary_cell_target(self):
        _, sys_ = build_multiplier()
        # cell (4, 4): enc = 4 * (1 * 1) = 4
        assert sys_.meta.targets[sys_.meta.cells.index((4, 4))] == 4

    def test_bipolar_xnor_cell_target(self):
        p = parse_spec({
            "name": "mb", "n": 4, "encoding": "bipolar", "inputs": ["x", "y"],
            "gates": [{"id": "z", "op": "XNOR", "args": ["x", "y"]}],
            "output": "z", "function": "x * y",
        })
        sys_ = build_program(p.circuit, p.function, 4)
        # dec(2) = 0 for both, f = 0, enc(0) = N*(0+1)/2 = 2
        assert sys_.meta.targets[sys_.meta.cells.index((2, 2))] == 2

    def test_both_symbolic(self):
        _, sys_ = build_multiplier(opts=EncodeOptions(fix_first_sequence=None))
        prefixes = {v.name.split("_")[0] for v in sys_.variables if v.kind == "binary"}
        assert prefixes == {"x", "y"}

    def test_boundary_rows_drop_constants(self):
        _, sys_ = build_multiplier(opts=EncodeOptions(fix_boundary_rows=True))
        names = {v.name for v in sys_.variables}
        assert "y_0_0" not in names and "y_4_0" not in names
        assert "y_2_1" in names

    def test_strict_binaries(self):
        _, sys_ = build_multiplier(strict_binaries=True)
        kinds = Counter(v.kind for v in sys_.variables)
        assert kinds["binary"] == 20 + 100  # matrix plus gate variables

    def test_three_inputs_rejected(self):
        p = parse_spec({
            "name": "t", "n": 4, "encoding": "unipolar", "inputs": ["a", "b", "c"],
            "gates": [
                {"id": "m", "op": "AND", "args": ["a", "b"]},
                {"id": "z", "op": "OR", "args": ["m", "c"]},
            ],
            "output": "z", "function": "min(1, a * b + c)",
        })
        with pytest.raises(ConfigError, match="decompos"):
            build_program(p.circuit, p.function, 4)

    def test_bad_fix_first(self):
        with pytest.raises(ConfigError):
            build_multiplier(opts=EncodeOptions(fix_first_sequence=(0, 1)))
        with pytest.raises(ConfigError):
            build_multiplier(opts=EncodeOptions(fix_first_sequence="vdc"))

    def test_squarer_is_one_dimensional(self):
        p = parse_spec({
            "name": "sq", "n": 8, "encoding": "unipolar", "inputs": ["x"],
            "gates": [
                {"id": "w", "op": "DFF", "args": ["x"]},
                {"id": "z", "op": "AND", "args": ["x", "w"]},
            ],
            "output": "z", "function": "square",
        })
        sys_ = build_program(p.circuit, p.function, 8)
        cost_rows = [c for c in sys_.constraints if c.name.startswith("cost_")]
        assert len(cost_rows) == 9
        assert "tpos_3" in {v.name for v in sys_.variables}


class TestInducedAssignment:
    def test_optimal_assignment_feasible(self):
        _, sys_ = build_multiplier()
        a = induced_assignment(sys_, {"y": NumberSequence((1, 3, 0, 2))})
        assert sys_.check_assignment(a, tol=0) is None
        assert sys_.objective_value(a) == 3

    def test_symbolic_select_assignment(self):
        p = parse_spec({
            "name": "adder", "n": 4, "encoding": "unipolar", "inputs": ["x", "y"],
            "gates": [{"id": "z", "op": "MUX", "args": ["x", "y", "R"]}],
            "output": "z", "function": "mean",
        })
        sys_ = build_program(p.circuit, p.function, 4,
                             EncodeOptions(symbolic_select=True))
        assert "r_0" in {v.name for v in sys_.variables}
        a = induced_assignment(sys_, {"y": RAMP4})
        assert sys_.check_assignment(a, tol=0) is None

    @pytest.mark.parametrize("n", [4, 8])
    def test_round_trip_encoder_equals_simulator(self, n):
        # the induced assignment of any permutation pair is feasible and its
        # objective equals the simulator's count-domain error
        p, sys_ = build_multiplier(n, EncodeOptions(fix_first_sequence=None))
        rng = random.Random(n)
        for _ in range(25):
            sx = NumberSequence(tuple(rng.sample(range(n), n)))
            sy = NumberSequence(tuple(rng.sample(range(n), n)))
            a = induced_assignment(sys_, {"x": sx, "y": sy})
            assert sys_.check_assignment(a, tol=0) is None
            total, _, _ = sweep_counts(p.circuit, p.function, [sx, sy], n)
            assert sys_.objective_value(a) == total

    def test_boundary_option_preserves_optimum(self):
        # exhaustive N=4: every candidate stays feasible and the optimal
        # objective is identical with and without fixed boundary rows
        p, plain = build_multiplier(4, EncodeOptions())
        _, fixed = build_multiplier(4, EncodeOptions(fix_boundary_rows=True))
        best_plain = best_fixed = None
        for perm in itertools.permutations(range(4)):
            sy = NumberSequence(perm)
            a1 = induced_assignment(plain, {"y": sy})
            a2 = induced_assignment(fixed, {"y": sy})
            assert plain.check_assignment(a1, tol=0) is None
            assert fixed.check_assignment(a2, tol=0) is None
            o1 = plain.objective_value(a1)
            o2 = fixed.objective_value(a2)
            assert o1 == o2
            best_plain = o1 if best_plain is None else min(best_plain, o1)
            best_fixed = o2 if best_fixed is None else min(best_fixed, o2)
        assert best_plain == best_fixed == 3


class TestRecoverSequences:
    def test_ramp_identity(self):
        _, sys_ = build_multiplier(opts=EncodeOptions(fix_first_sequence=None))
        a = induced_assignment(sys_, {"x": RAMP4, "y": RAMP4})
        rec = recover_sequences(a)
        assert [s.values for s in rec] == [(0, 1, 2, 3), (0, 1, 2, 3)]

    def test_column_sums(self):
        seq = NumberSequence((0, 2, 1, 3))
        a = {}
        for i in range(5):
            row = generate(seq, i)
            for j in range(4):
                a[f"x_{i}_{j}"] = Fraction(row.bit(j))
        assert recover_sequences(a)[0].values == (0, 2, 1, 3)

    def test_degenerate_matrix_rejected(self):
        # all-zero matrix except the (implied) all-one row N: column sums
        # N-1 everywhere, duplicates
        a = {}
        for i in range(5):
            for j in range(4):
                a[f"x_{i}_{j}"] = Fraction(1 if i == 4 else 0)
        with pytest.raises(VerificationError, match="not a permutation"):
            recover_sequences(a)

    def test_non_comparator_rows_rejected(self):
        seq = NumberSequence((0, 1, 2, 3))
        a = {}
        for i in range(5):
            row = generate(seq, i)
            for j in range(4):
                a[f"x_{i}_{j}"] = Fraction(row.bit(j))
        a["x_1_0"], a["x_1_3"] = Fraction(0), Fraction(1)  # row sum kept, order broken
        with pytest.raises(VerificationError):
            recover_sequences(a)


class TestImportSolution:
    def test_feasible_import(self):
        _, sys_ = build_multiplier()
        exact = induced_assignment(sys_, {"y": NumberSequence((1, 3, 0, 2))})
        floats = {k: float(v) for k, v in exact.items()}
        verified = import_solution(sys_, floats)
        assert verified.objective == 3
        assert [s.values for s in verified.sequences] == [(0, 1, 2, 3), (1, 3, 0, 2)]

    def test_row_sum_violation(self):
        _, sys_ = build_multiplier()
        exact = induced_assignment(sys_, {"y": RAMP4})
        floats = {k: float(v) for k, v in exact.items()}
        floats["y_2_2"] = 1.0  # row 2 now sums to 3
        with pytest.raises(InfeasibleError, match="value_y_2"):
            import_solution(sys_, floats)

    def test_missing_variables(self):
        _, sys_ = build_multiplier()
        with pytest.raises(ValueError, match="misses"):
            import_solution(sys_, {"y_0_0": 0.0})

    def test_solution_parsing(self):
        text = "# comment\ny_0_0 0.0\ny_0_1 1  # trailing\n\n"
        assert parse_solution(text) == {"y_0_0": 0.0, "y_0_1": 1.0}
        with pytest.raises(SpecError):
            parse_solution("y_0_0")
        with pytest.raises(SpecError):
            parse_solution("y_0_0 zero")


class TestLpFormat:
    def test_trivial_system(self):
        sys_ = ConstraintSystem()
        sys_.add_variable("t", "continuous", 0, None)
        sys_.add_constraint("c0", [("t", 1)], ">=", 1)
        sys_.objective.append(("t", Fraction(1)))
        text = export_lp(sys_)
        assert "Minimize" in text
        assert "Subject To" in text
        assert "t >= 1" in text

    def test_round_trip_multiplier(self):
        _, sys_ = build_multiplier()
        model = parse_lp(export_lp(sys_))
        assert model.sense == "minimize"
        assert model.variable_names() == set(sys_.var_names())
        assert len(model.constraints) == len(sys_.constraints)
        assert model.binaries == {v.name for v in sys_.variables if v.kind == "binary"}
        # spot-check a folded constant: cost cell (4,4) has rhs 4
        by_name = {name: (coeffs, rel, rhs) for name, coeffs, rel, rhs in model.constraints}
        assert by_name["cost_4_4"][1] == "="
        assert by_name["cost_4_4"][2] == 4.0

    def test_fractional_rhs_survives(self):
        _, sys_ = build_multiplier()
        model = parse_lp(export_lp(sys_))
        by_name = {name: rhs for name, _, _, rhs in model.constraints}
        assert by_name["cost_1_1"] == 0.25

    def test_hand_written_lp(self):
        text = """\\ comment
Minimize
 obj: 2 x + y
Subject To
 c1: x + y >= 1
 x - 2 y <= 3
Bounds
 0 <= x <= 5
 y free
Binary
 x
End
"""
        model = parse_lp(text)
        assert model.objective == {"x": 2.0, "y": 1.0}
        assert model.constraints[0] == ("c1", {"x": 1.0, "y": 1.0}, ">=", 1.0)
        assert model.constraints[1][1] == {"x": 1.0, "y": -2.0}
        assert model.bounds["x"] == (0.0, 5.0)
        assert model.binaries == {"x"}


TRUTH = {
    "AND": lambda a, b: a & b,
    "OR": lambda a, b: a | b,
    "XOR": lambda a, b: a ^ b,
    "XNOR": lambda a, b: 1 - (a ^ b),
    "NOT": lambda a: 1 - a,
    "DFF": lambda a: a,
    "MUX": lambda d0, d1, s: d0 if s else d1,
}


def _aux_feasible(sys_, z_value) -> bool:
    """Whether some auxiliary assignment makes the system feasible."""
    aux = [v.name for v in sys_.variables if v.name != "z"]
    grid = (Fraction(0), Fraction(1, 2), Fraction(1))
    for combo in itertools.product(grid, repeat=len(aux)):
        assignment = dict(zip(aux, combo))
        assignment["z"] = z_value
        if sys_.check_assignment(assignment, tol=0) is None:
            return True
    return False


class TestGateEncodingExactness:
    @pytest.mark.parametrize("op", ["AND", "OR", "XOR", "XNOR", "NOT", "DFF", "MUX"])
    def test_exact_truth_table(self, op):
        arity = {"NOT": 1, "DFF": 1, "MUX": 3}.get(op, 2)
        for bits in itertools.product((0, 1), repeat=arity):
            want = Fraction(TRUTH[op](*bits))
            sys_, _ = singleton_gate_system(op, bits)
            assert _aux_feasible(sys_, want), f"{op}{bits}: correct output rejected"
            assert not _aux_feasible(sys_, 1 - want), f"{op}{bits}: wrong output admitted"
            assert not _aux_feasible(sys_, Fraction(1, 2)), f"{op}{bits}: fractional output admitted"
