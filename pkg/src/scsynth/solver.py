"""Native optimization of synthesis problems over permutation space.

The matrix variables of the MIP are in bijection with number sequences
(value + monotonicity constraints force every symbolic matrix to be the
comparator rows of some permutation), so the solver searches permutations
directly: exact branch-and-bound with admissible per-cell bounds for small
N, and a seeded simulated-annealing heuristic beyond that.  Every returned
objective is re-checked against the bit-exact simulator.

Determinism: results depend only on the problem, options, seed and config.
Time budgets are translated into fixed step/node budgets up front, so a
budgeted run is reproducible regardless of machine speed or thread count.
"""

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import (
    CircuitSpec,
    FunctionSpec,
    ProblemSpec,
    eval_function,
    evaluate_masks,
    evaluate_ternary,
)
from .errors import ConfigError, VerificationError
from .evalbench import sweep_counts
from .mip_encode import EncodeOptions
from .sn_core import NumberSequence, baseline_sequence, generate

# deterministic stand-ins for wall-clock budgets (kept conservative so a
# budgeted run finishes near, not past, the requested time on current CPUs)
CELL_EVALS_PER_SEC = 2_000_000
NODES_PER_SEC = 20_000
DEFAULT_RESTART_STEPS = 20_000
MAX_ANNEAL_STEPS = 5_000_000


@dataclass(frozen=True)
class SolveConfig:
    """Solver controls; ``gap`` accepts a solution within (1+gap) of the bound."""

    gap: Fraction = Fraction(0)
    time_budget: float | None = None
    seed: int = 0
    restarts: int = 4
    mode: str = "auto"  # exact | anneal | auto

    def __post_init__(self):
        object.__setattr__(self, "gap", Fraction(self.gap))
        if not 0 <= self.gap <= 1:
            raise ConfigError(f"gap must be in [0, 1], got {self.gap}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.mode not in ("exact", "anneal", "auto"):
            raise ConfigError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class SynthesisResult:
    """Synthesized sequences with objective, bound, status and timing.

    ``objective`` and ``lower_bound`` are in the count domain (sum over the
    grid of |output count - encoded target|, weighted for staged problems).
    """

    sequences: tuple[NumberSequence, ...]
    objective: Fraction
    lower_bound: Fraction
    status: str  # optimal | feasible | infeasible | timeout
    gap_achieved: Fraction
    elapsed: float

    def summary(self) -> str:
        return (
            f"status={self.status} objective={float(self.objective):.6g} "
            f"bound={float(self.lower_bound):.6g} elapsed={self.elapsed:.2f}s"
        )


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _frac_dist_scaled(t: int, scale: int) -> int:
    r = t % scale
    return min(r, scale - r)


@dataclass
class Kernel:
    """Search-space model: one symbolic sequence against fixed opponents.

    ``rows`` binds every non-symbolic circuit input to a concrete stream per
    grid row (two-input problems: the fixed first input's comparator rows;
    staged problems: deduplicated upstream SNs with multiplicities).  For
    single-input circuits ``rows`` is None and the symbolic sequence itself
    indexes the cost cells.  Targets are pre-scaled to integers.
    """

    circuit: CircuitSpec
    n: int
    symbolic_input: str
    fixed_names: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...] | None  # per row: masks aligned with fixed_names
    weights: tuple[int, ...] | None
    targets: tuple  # [row][m] scaled ints, or [a] for single-input
    scale: int
    dff_wraparound: bool
    tt: tuple[tuple[int, int], tuple[int, int]] | None  # tt[x][y], cycle-uniform only
    prefix_sequences: tuple[NumberSequence, ...] = ()  # reported before the symbolic one

    @property
    def single_input(self) -> bool:
        return self.rows is None

    @property
    def cell_count(self) -> int:
        if self.single_input:
            return len(self.targets)
        return len(self.rows) * (self.n + 1)

    def floor_scaled(self) -> int:
        if self.single_input:
            return sum(_frac_dist_scaled(t, self.scale) for t in self.targets)
        return sum(
            w * _frac_dist_scaled(t, self.scale)
            for row_targets, w in zip(self.targets, self.weights)
            for t in row_targets
        )

    # -- full-candidate evaluation ------------------------------------------

    def _symbolic_masks(self, values: tuple[int, ...]) -> list[int]:
        """Masks of generate(seq, t) for t in 0..n, built incrementally."""
        n = self.n
        pos_of = [0] * n
        for j, v in enumerate(values):
            pos_of[v] = j
        masks = [0] * (n + 1)
        acc = 0
        for t in range(n):
            acc |= 1 << pos_of[t]
            masks[t + 1] = acc
        return masks

    def cost(self, values: tuple[int, ...]) -> int:
        """Scaled count-domain objective of a candidate sequence."""
        n = self.n
        scale = self.scale
        masks = self._symbolic_masks(values)
        total = 0
        if self.single_input:
            base = {}
            for a in range(n + 1):
                base[self.symbolic_input] = masks[a]
                h = evaluate_masks(self.circuit, base, n, self.dff_wraparound)[
                    self.circuit.output
                ].bit_count()
                total += abs(scale * h - self.targets[a])
            return total
        if self.tt is not None:
            full = (1 << n) - 1
            (t00, t01), (t10, t11) = self.tt
            for row_masks, row_targets, w in zip(self.rows, self.targets, self.weights):
                x = row_masks[0]
                nx = ~x & full
                for m in range(n + 1):
                    y = masks[m]
                    z = 0
                    if t11:
                        z |= x & y
                    if t10:
                        z |= x & ~y
                    if t01:
                        z |= nx & y
                    if t00:
                        z |= nx & ~y
                    h = (z & full).bit_count()
                    total += w * abs(scale * h - row_targets[m])
            return total
        for row_masks, row_targets, w in zip(self.rows, self.targets, self.weights):
            bound = dict(zip(self.fixed_names, row_masks))
            for m in range(n + 1):
                bound[self.symbolic_input] = masks[m]
                h = evaluate_masks(self.circuit, bound, n, self.dff_wraparound)[
                    self.circuit.output
                ].bit_count()
                total += w * abs(scale * h - row_targets[m])
        return total

    def warm_candidates(self) -> list[tuple[int, ...]]:
        """Deterministic starting permutations for incumbents."""
        out = [tuple(range(self.n)), tuple(range(self.n - 1, -1, -1))]
        for kind in ("vdc", "lfsr"):
            try:
                out.append(baseline_sequence(kind, self.n).values)
            except ConfigError:
                pass
        seen = set()
        uniq = []
        for cand in out:
            if cand not in seen:
                seen.add(cand)
                uniq.append(cand)
        return uniq


def _detect_uniform_tt(circuit: CircuitSpec, n: int, fixed_name: str, sym_name: str,
                       wrap: bool) -> tuple | None:
    """Truth table when the output is a cycle-uniform function of (x, y)."""
    if circuit.is_sequential:
        return None
    full = (1 << n) - 1
    tt = [[0, 0], [0, 0]]
    for xb in (0, 1):
        for yb in (0, 1):
            masks = {fixed_name: full if xb else 0, sym_name: full if yb else 0}
            out = evaluate_masks(circuit, masks, n, wrap)[circuit.output] & full
            if out == full:
                tt[xb][yb] = 1
            elif out != 0:
                return None  # cycle-dependent (MUX select, NOT-of-DFF, ...)
    return (tuple(tt[0]), tuple(tt[1]))


def _scaled_targets(targets: list[list[Fraction]] | list[Fraction]):
    denoms = set()

    def visit(t):
        denoms.add(t.denominator)

    flat = targets if targets and isinstance(targets[0], Fraction) else [t for row in targets for t in row]
    for t in flat:
        visit(t)
    scale = 1
    for d in denoms:
        scale = _lcm(scale, d)
    if isinstance(targets[0], Fraction):
        return [int(t * scale) for t in targets], scale
    return [[int(t * scale) for t in row] for row in targets], scale


def build_kernel(
    circuit: CircuitSpec,
    f: FunctionSpec,
    n: int,
    opts: EncodeOptions = EncodeOptions(),
) -> Kernel:
    """Kernel for a standard 1- or 2-input problem.

    Two-input circuits search the second input's sequence against a fixed
    first sequence (``opts.fix_first_sequence``, default ramp).  Leaving the
    option ``None`` also fixes a ramp: for combinational circuits any joint
    optimum can be re-expressed with a ramp first sequence by applying a
    common position permutation, so this loses no generality there.
    """
    if circuit.arity not in (1, 2):
        raise ConfigError("solve handles 1- or 2-input circuits; decompose larger ones")
    wrap = circuit.dff_wraparound if opts.dff_wraparound is None else opts.dff_wraparound
    enc = f.encoding
    if circuit.arity == 1:
        targets = [
            enc.encode_value(eval_function(f, {circuit.inputs[0]: enc.decode_count(a, n)}), n)
            for a in range(n + 1)
        ]
        scaled, scale = _scaled_targets(targets)
        return Kernel(
            circuit=circuit,
            n=n,
            symbolic_input=circuit.inputs[0],
            fixed_names=(),
            rows=None,
            weights=None,
            targets=tuple(scaled),
            scale=scale,
            dff_wraparound=wrap,
            tt=None,
        )
    first = opts.resolve_fix_first(n)
    if first is None:
        first = NumberSequence(tuple(range(n)))
    x_name, y_name = circuit.inputs
    grid = [enc.decode_count(t, n) for t in range(n + 1)]
    targets = [
        [enc.encode_value(eval_function(f, {x_name: grid[a], y_name: grid[m]}), n)
         for m in range(n + 1)]
        for a in range(n + 1)
    ]
    scaled, scale = _scaled_targets(targets)
    rows = tuple((generate(first, a).mask,) for a in range(n + 1))
    return Kernel(
        circuit=circuit,
        n=n,
        symbolic_input=y_name,
        fixed_names=(x_name,),
        rows=rows,
        weights=(1,) * (n + 1),
        targets=tuple(tuple(r) for r in scaled),
        scale=scale,
        dff_wraparound=wrap,
        tt=_detect_uniform_tt(circuit, n, x_name, y_name, wrap),
        prefix_sequences=(first,),
    )


def lower_bound(circuit: CircuitSpec, f: FunctionSpec, n: int) -> Fraction:
    """Rounding floor: sum over grid cells of dist(enc(f), nearest integer).

    Admissible for any sequences because output counts are integers.
    """
    enc = f.encoding
    grid = [enc.decode_count(t, n) for t in range(n + 1)]
    total = Fraction(0)
    if circuit.arity == 1:
        for a in range(n + 1):
            t = enc.encode_value(eval_function(f, {circuit.inputs[0]: grid[a]}), n)
            total += min(t - math.floor(t), math.ceil(t) - t)
        return total
    x_name, y_name = circuit.inputs
    for a in range(n + 1):
        for m in range(n + 1):
            t = enc.encode_value(eval_function(f, {x_name: grid[a], y_name: grid[m]}), n)
            total += min(t - math.floor(t), math.ceil(t) - t)
    return total


# --------------------------------------------------------------------------
# exact branch-and-bound

class _BnB:
    """Depth-first search assigning sequence positions left to right.

    The node bound sums, per cell, the distance from the target to the set
    of output counts still achievable: exactly-known cycles contribute their
    simulated value, undetermined cells at least their rounding floor, and
    in between the reachable count window (from three-valued simulation or,
    for cycle-uniform two-input circuits, from remaining-value counting)
    clamps the distance.  Ties between child values break toward the
    smallest value, making the search order deterministic.
    """

    def __init__(self, kernel: Kernel, incumbent: tuple[int, ...], incumbent_cost: int,
                 stop_at: int, node_budget: int | None):
        self.k = kernel
        self.n = kernel.n
        self.best = incumbent
        self.best_cost = incumbent_cost
        self.stop_at = stop_at  # accept incumbent at or below this cost
        self.node_budget = node_budget
        self.nodes = 0
        self.exhausted = True

        n = self.n
        self.assigned: list[int | None] = [None] * n
        self.assigned_mask = 0
        self.value_used = [False] * n
        # ones[t]: assigned positions whose value < t (the known 1-bits of
        # the symbolic stream for target t)
        self.ones = [0] * (n + 1)
        if kernel.tt is not None and not kernel.single_input:
            self.known1 = [[0] * (n + 1) for _ in range(len(kernel.rows))]
        else:
            self.known1 = None

    # -- incremental state ---------------------------------------------------

    def _assign(self, j: int, v: int):
        self.assigned[j] = v
        self.assigned_mask |= 1 << j
        self.value_used[v] = True
        bit = 1 << j
        for t in range(v + 1, self.n + 1):
            self.ones[t] |= bit
        if self.known1 is not None:
            (t00, t01), (t10, t11) = self.k.tt
            for r, row_masks in enumerate(self.k.rows):
                xb = (row_masks[0] >> j) & 1
                inc0 = t10 if xb else t00  # y = 0, i.e. m <= v
                inc1 = t11 if xb else t01  # y = 1, i.e. m > v
                row = self.known1[r]
                if inc0:
                    for m in range(v + 1):
                        row[m] += inc0
                if inc1:
                    for m in range(v + 1, self.n + 1):
                        row[m] += inc1

    def _unassign(self, j: int, v: int):
        self.assigned[j] = None
        self.assigned_mask &= ~(1 << j)
        self.value_used[v] = False
        bit = ~(1 << j)
        for t in range(v + 1, self.n + 1):
            self.ones[t] &= bit
        if self.known1 is not None:
            (t00, t01), (t10, t11) = self.k.tt
            for r, row_masks in enumerate(self.k.rows):
                xb = (row_masks[0] >> j) & 1
                inc0 = t10 if xb else t00
                inc1 = t11 if xb else t01
                row = self.known1[r]
                if inc0:
                    for m in range(v + 1):
                        row[m] -= inc0
                if inc1:
                    for m in range(v + 1, self.n + 1):
                        row[m] -= inc1

    # -- bounds ---------------------------------------------------------------

    def _window_bound(self, lo: int, hi: int, target: int) -> int:
        scale = self.k.scale
        if target < scale * lo:
            return scale * lo - target
        if target > scale * hi:
            return target - scale * hi
        return _frac_dist_scaled(target, scale)

    def _bound_uniform(self, depth: int) -> int:
        n = self.n
        k = self.k
        scale = k.scale
        (t00, t01), (t10, t11) = k.tt
        alpha = t11 - t10 - t01 + t00
        remaining = n - depth
        # r1[m]: 1-bits the symbolic stream for target m still owes to
        # unassigned positions (value constraint)
        assigned_less = [0] * (n + 1)
        acc = 0
        for v in range(n):
            assigned_less[v + 1] = acc = acc + (1 if self.value_used[v] else 0)
        total = 0
        unassigned = ~self.assigned_mask
        for r, row_masks in enumerate(k.rows):
            w = k.weights[r]
            row_t = k.targets[r]
            row_known = self.known1[r]
            u1 = (row_masks[0] & unassigned).bit_count() if remaining else 0
            u0 = remaining - u1
            for m in range(n + 1):
                r1 = m - assigned_less[m]
                kk_min = r1 - u0 if r1 > u0 else 0
                kk_max = r1 if r1 < u1 else u1
                base = row_known[m] + t10 * u1 + t01 * r1 + t00 * (u0 - r1)
                target = row_t[m]
                if alpha == 0:
                    cell = abs(scale * base - target)
                else:
                    # best integer kk in [kk_min, kk_max] for |scale*(base+alpha*kk) - target|
                    num = target - scale * base
                    den = scale * alpha
                    kk = num // den  # floor for either sign of alpha
                    best_cell = None
                    for cand in (kk, kk + 1, kk - 1):
                        if kk_min <= cand <= kk_max:
                            val = abs(scale * (base + alpha * cand) - target)
                            if best_cell is None or val < best_cell:
                                best_cell = val
                    if best_cell is None:
                        lo_v = scale * (base + alpha * (kk_min if alpha > 0 else kk_max))
                        hi_v = scale * (base + alpha * (kk_max if alpha > 0 else kk_min))
                        best_cell = max(lo_v - target, target - hi_v, 0)
                    cell = best_cell
                total += w * cell
        return total

    def _bound_ternary(self, depth: int) -> int:
        n = self.n
        k = self.k
        full = (1 << n) - 1
        total = 0
        if k.single_input:
            for a in range(n + 1):
                ones = self.ones[a]
                zeros = self.assigned_mask & ~ones
                o1, o0 = evaluate_ternary(
                    k.circuit, {k.symbolic_input: (ones, zeros)}, n, k.dff_wraparound
                )
                total += self._window_bound(o1.bit_count(), n - o0.bit_count(), k.targets[a])
            return total
        for r, row_masks in enumerate(k.rows):
            w = k.weights[r]
            row_t = k.targets[r]
            bound_inputs = {
                name: (mask, ~mask & full) for name, mask in zip(k.fixed_names, row_masks)
            }
            for m in range(n + 1):
                ones = self.ones[m]
                zeros = self.assigned_mask & ~ones
                bound_inputs[k.symbolic_input] = (ones, zeros)
                o1, o0 = evaluate_ternary(k.circuit, bound_inputs, n, k.dff_wraparound)
                total += w * self._window_bound(
                    o1.bit_count(), n - o0.bit_count(), row_t[m]
                )
        return total

    def bound(self, depth: int) -> int:
        if self.known1 is not None:
            return self._bound_uniform(depth)
        return self._bound_ternary(depth)

    # -- search ---------------------------------------------------------------

    def run(self) -> tuple[tuple[int, ...], int, bool]:
        self._dfs(0)
        return self.best, self.best_cost, self.exhausted

    def _dfs(self, depth: int):
        if self.best_cost <= self.stop_at:
            self.exhausted = False
            return
        if self.node_budget is not None and self.nodes >= self.node_budget:
            self.exhausted = False
            return
        self.nodes += 1
        n = self.n
        if depth == n:
            cost = self.k.cost(tuple(self.assigned))
            if cost < self.best_cost:
                self.best_cost = cost
                self.best = tuple(self.assigned)
            return
        if self.bound(depth) >= self.best_cost:
            return
        for v in range(n):
            if not self.value_used[v]:
                self._assign(depth, v)
                self._dfs(depth + 1)
                self._unassign(depth, v)
                if self.best_cost <= self.stop_at:
                    return
                if self.node_budget is not None and self.nodes >= self.node_budget:
                    self.exhausted = False
                    return


def _solve_exact(kernel: Kernel, cfg: SolveConfig) -> tuple[tuple[int, ...], int, str, int]:
    """Returns (best values, best scaled cost, status, proven scaled bound)."""
    floor = kernel.floor_scaled()
    best = None
    best_cost = None
    for cand in kernel.warm_candidates():
        cost = kernel.cost(cand)
        if best_cost is None or (cost, cand) < (best_cost, best):
            best, best_cost = cand, cost
    stop_at = int(Fraction(floor) * (1 + cfg.gap))  # incumbent at/below proves the gap
    node_budget = None
    if cfg.time_budget is not None:
        node_budget = max(1_000, int(cfg.time_budget * NODES_PER_SEC))
    search = _BnB(kernel, best, best_cost, stop_at, node_budget)
    values, cost, exhausted = search.run()
    if exhausted:
        return values, cost, "optimal", cost
    if cost <= stop_at:
        return values, cost, "optimal", floor
    return values, cost, "feasible", floor


# --------------------------------------------------------------------------
# simulated annealing

def _anneal_steps(kernel: Kernel, cfg: SolveConfig) -> int:
    if cfg.time_budget is None:
        return DEFAULT_RESTART_STEPS * cfg.restarts
    # the generic evaluator (dict-based, per gate) costs ~6x the
    # truth-table fast path per cell
    unit = 1 if kernel.tt is not None else 6
    steps = int(cfg.time_budget * CELL_EVALS_PER_SEC / max(kernel.cell_count * unit, 1))
    return max(2_000, min(steps, MAX_ANNEAL_STEPS))


def _anneal_restart(kernel: Kernel, start: tuple[int, ...], seed: int, steps: int,
                    stop_at: int) -> tuple[int, tuple[int, ...]]:
    """One seeded annealing run; swap-two-positions moves, per-sweep cooling."""
    n = kernel.n
    rng = random.Random(seed)
    current = list(start)
    cur_cost = kernel.cost(tuple(current))
    best = tuple(current)
    best_cost = cur_cost
    t0 = float(n)
    temp = t0
    alpha = 0.995
    scale = float(kernel.scale)
    for step in range(steps):
        if best_cost <= stop_at:
            break
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        current[i], current[j] = current[j], current[i]
        cand_cost = kernel.cost(tuple(current))
        delta = (cand_cost - cur_cost) / scale
        if delta <= 0 or (temp > 1e-9 and rng.random() < math.exp(-delta / temp)):
            cur_cost = cand_cost
            if cand_cost < best_cost:
                best_cost = cand_cost
                best = tuple(current)
        else:
            current[i], current[j] = current[j], current[i]
        if step % n == n - 1:
            temp *= alpha
            if temp < 1e-3:
                temp = t0 * 0.05  # reheat; keeps late steps useful
    return best_cost, best


def _restart_job(args):
    kernel, start, seed, steps, stop_at = args
    return _anneal_restart(kernel, start, seed, steps, stop_at)


def _solve_anneal(kernel: Kernel, cfg: SolveConfig, threads: int) -> tuple[tuple[int, ...], int, str, int]:
    floor = kernel.floor_scaled()
    stop_at = int(Fraction(floor) * (1 + cfg.gap))
    warm = kernel.warm_candidates()
    best = None
    best_cost = None
    for cand in warm:
        cost = kernel.cost(cand)
        if best_cost is None or (cost, cand) < (best_cost, best):
            best, best_cost = cand, cost

    if best_cost <= stop_at:
        return best, best_cost, "optimal", floor

    total_steps = _anneal_steps(kernel, cfg)
    per_restart = max(1_000, total_steps // cfg.restarts)
    jobs = []
    for r in range(cfg.restarts):
        seed = cfg.seed * 1_000_003 + r
        if r == 0:
            start = best
        else:
            rng = random.Random(seed ^ 0x5EED)
            start_list = list(range(kernel.n))
            rng.shuffle(start_list)
            start = tuple(start_list)
        jobs.append((kernel, start, seed, per_restart, stop_at))

    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_restart_job, jobs))
    else:
        outcomes = [_restart_job(job) for job in jobs]
    # order-independent merge keeps parallel runs deterministic
    for cost, values in outcomes:
        if (cost, values) < (best_cost, best):
            best, best_cost = values, cost
    status = "optimal" if Fraction(best_cost) <= Fraction(floor) * (1 + cfg.gap) else "feasible"
    return best, best_cost, status, floor


# --------------------------------------------------------------------------
# entry points

def solve_kernel(kernel: Kernel, cfg: SolveConfig = SolveConfig(), threads: int = 1) -> SynthesisResult:
    """Search the kernel's permutation space and package the result."""
    start = time.perf_counter()
    mode = cfg.mode
    if mode == "auto":
        mode = "exact" if kernel.n <= 8 else "anneal"
    if mode == "exact":
        values, cost, status, bound = _solve_exact(kernel, cfg)
    else:
        values, cost, status, bound = _solve_anneal(kernel, cfg, threads)

    seq = NumberSequence(values)
    check = kernel.cost(seq.values)
    if check != cost:
        raise VerificationError(f"search bookkeeping error: {cost} != re-evaluated {check}")
    objective = Fraction(cost, kernel.scale)
    lower = Fraction(bound, kernel.scale)
    if lower > 0:
        gap_achieved = (objective - lower) / lower
    else:
        gap_achieved = Fraction(0) if objective == 0 else Fraction(1)
    elapsed = time.perf_counter() - start
    return SynthesisResult(
        sequences=kernel.prefix_sequences + (seq,),
        objective=objective,
        lower_bound=lower,
        status=status,
        gap_achieved=gap_achieved,
        elapsed=elapsed,
    )


def solve(
    circuit: CircuitSpec,
    f: FunctionSpec,
    n: int,
    opts: EncodeOptions = EncodeOptions(),
    cfg: SolveConfig = SolveConfig(),
    threads: int = 1,
) -> SynthesisResult:
    """Synthesize number sequences for a 1- or 2-input problem.

    The returned objective is cross-checked against the bit-exact simulator
    over the full grid before the result is reported.
    """
    kernel = build_kernel(circuit, f, n, opts)
    result = solve_kernel(kernel, cfg, threads)
    total, _, _ = sweep_counts(circuit, f, result.sequences, n, kernel.dff_wraparound)
    if total != result.objective:
        raise VerificationError(
            f"solver objective {result.objective} != simulated {total}"
        )
    return result


def solve_problem(
    problem: ProblemSpec,
    n: int | None = None,
    opts: EncodeOptions = EncodeOptions(),
    cfg: SolveConfig = SolveConfig(),
    threads: int = 1,
) -> SynthesisResult:
    return solve(problem.circuit, problem.function, n or problem.n, opts, cfg, threads)


def verify(result: SynthesisResult, circuit: CircuitSpec, f: FunctionSpec, n: int,
           dff_wraparound: bool | None = None) -> dict:
    """Recompute the objective from the sequences; mismatch is an error."""
    if not result.sequences:
        raise VerificationError("result has no sequences to verify")
    total, total_sq, cells = sweep_counts(circuit, f, result.sequences, n, dff_wraparound)
    if total != result.objective:
        raise VerificationError(
            f"result objective {result.objective} != simulated {total}"
        )
    scale = f.encoding.count_scale / n
    return {
        "objective": total,
        "avg_abs_error": total * scale / cells,
        "mse": total_sq * scale * scale / cells,
        "cells": cells,
        "match": True,
    }
