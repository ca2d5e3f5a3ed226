"""Closed-form counting bounds for mutation-only search over program spaces.

Everything here is derived from four integers describing a space — register
count, output-register count, instruction-set size, and the smallest size of
an optimal program — plus the current program size and edit distance.  The
module provides:

* bounds on the minimum add/remove distance to an optimum and on the sizes
  reachable within a move budget;
* open lower/upper bounds on the average number of distinct larger programs
  reachable by padding with non-effective (intron) or effective (exon)
  instructions;
* duplication-normalization bounds for bulk insertion/deletion counting;
* an upper bound on the per-application rate at which the distance to the
  optimum can shrink, and the induced minimum hitting time;
* a Lipschitz-style fitness-gap bound from semantic stretch constants.

Counting quantities are exact ``Fraction`` values where feasible; grid-scale
rate queries run in log space because the intermediate counts overflow any
fixed-width float.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import (Callable, Dict, Iterable, List, NamedTuple, Optional,
                    Sequence, Tuple, Union)

import numpy as np

from .core import Instruction, Program, execute, transform_values
from .instrset import InstructionSet
from .problems import FitnessEvaluator

Number = Union[int, float, Fraction]

DEFAULT_TOLERANCE = 1e-4
MAX_HITTING_STEPS = 10**6


@dataclass(frozen=True)
class SpaceProfile:
    """Integer description of a program space for bound evaluation."""

    num_registers: int
    num_outputs: int
    set_size: int
    optimal_size: int = 1
    max_length: Optional[int] = None

    def __post_init__(self):
        if self.num_registers < 1:
            raise ValueError("num_registers must be >= 1")
        if not (1 <= self.num_outputs <= self.num_registers):
            raise ValueError("num_outputs must be in [1, num_registers]")
        if self.set_size < 1:
            raise ValueError("set_size must be >= 1")
        if self.optimal_size < 1:
            raise ValueError("optimal_size must be >= 1")
        if self.max_length is not None and self.max_length < self.optimal_size:
            raise ValueError("max_length must admit an optimal program")


@dataclass(frozen=True)
class BoundInterval:
    """An (open) lower/upper pair; ``exact`` marks degenerate known values."""

    lower: Number
    upper: Number
    log_scale: bool = False
    exact: bool = False

    def __post_init__(self):
        slack = 1e-9 if self.log_scale else 0
        if not self.lower <= self.upper + slack:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")


@dataclass(frozen=True)
class SizeWindow:
    """Sizes reachable within a move budget; may be empty (infeasible)."""

    lower: float
    upper: float
    feasible: bool


class RateBound(NamedTuple):
    value: float
    used_truncation: bool


def edit_distance_bounds(size: int, profile: SpaceProfile) -> Tuple[int, int]:
    """Range of possible add/remove distances to an optimum for this size.

    A program of size m can need at most ``optimal_size + m`` moves (delete
    everything, build the smallest optimum) and at least ``optimal_size - m``
    when it is too short.
    """
    if size < 0:
        raise ValueError("size must be >= 0")
    return max(0, profile.optimal_size - size), profile.optimal_size + size


def reachable_size_bounds(size: int, moves: int,
                          profile: SpaceProfile) -> SizeWindow:
    """Window of program sizes reachable from ``size`` in ``moves`` moves.

    Every move adds or removes one instruction, and a path that reaches an
    optimum spends at most ``optimal_size`` of its additions on necessary
    instructions.  Infeasible (size, moves) pairs — where the window comes
    out empty — are flagged rather than clamped.
    """
    if size < 0 or moves < 0:
        raise ValueError("size and moves must be >= 0")
    m_star = profile.optimal_size
    removable = min(Fraction(moves - m_star + size, 2),
                    Fraction(moves), Fraction(size))
    lower = Fraction(size + moves) - 2 * removable
    upper = size + moves - 2 * max(0, moves - m_star)
    return SizeWindow(float(lower), float(upper), float(lower) <= upper)


def _growth_interval(count_range: Iterable[int], m2: int, span_lo: int,
                     span_hi: int, steps: int, shape: SpaceProfile,
                     log_scale: bool) -> BoundInterval:
    """Shared open-bound construction for the padding growth factors.

    ``count_range`` enumerates the per-step register-choice multiplicities i,
    each contributing (i*n/gamma)**steps to the lower bound; the upper bound
    collapses the multinomial expansion of the same sum.
    """
    n, gamma = shape.set_size, shape.num_registers
    if steps == 0:
        if log_scale:
            return BoundInterval(0.0, 0.0, log_scale=True, exact=True)
        return BoundInterval(Fraction(1), Fraction(1), exact=True)
    lower = sum(Fraction(i * n, gamma) ** steps for i in count_range)
    upper = Fraction(m2 * (span_lo + span_hi) * (span_hi - span_lo + 1) * n,
                     2 * gamma) ** steps
    if log_scale:
        return BoundInterval(_log_fraction(lower), _log_fraction(upper),
                             log_scale=True)
    return BoundInterval(lower, upper)


def _log_fraction(value: Fraction) -> float:
    if value == 0:
        return -math.inf
    return math.log(value.numerator) - math.log(value.denominator)


def intron_growth_bounds(profile: SpaceProfile, size_from: int, size_to: int,
                         *, floor_one: bool = False,
                         log_scale: bool = False) -> BoundInterval:
    """Open bounds on the mean number of distinct programs reachable by
    padding a size-``size_from`` program with non-effective instructions
    until it has ``size_to``.

    ``floor_one`` starts the lower-bound summation at 1 instead of 0; the
    zero term contributes nothing anyway, so both conventions give the same
    numbers whenever the start index is 0.
    """
    if not 0 <= size_from <= size_to:
        raise ValueError("need 0 <= size_from <= size_to")
    gamma, gout = profile.num_registers, profile.num_outputs
    start = max(1 if floor_one else 0, gamma - gout - size_from)
    return _growth_interval(range(start, gamma - gout + 1), size_to,
                            start, gamma - gout, size_to - size_from,
                            profile, log_scale)


def exon_growth_bounds(profile: SpaceProfile, size_from: int, size_to: int,
                       *, log_scale: bool = False) -> BoundInterval:
    """Open bounds on the mean number of distinct programs reachable by
    padding with effective instructions; mirror of intron_growth_bounds
    with the summation running over output-reaching register choices."""
    if not 0 <= size_from <= size_to:
        raise ValueError("need 0 <= size_from <= size_to")
    gamma, gout = profile.num_registers, profile.num_outputs
    top = min(gamma, gout + size_from)
    return _growth_interval(range(gout, top + 1), size_to, gout, top,
                            size_to - size_from, profile, log_scale)


def removal_duplication_bounds(profile: SpaceProfile, size: int,
                               removed: int) -> BoundInterval:
    """Open bounds on the duplication-normalization factor when deleting
    ``removed`` instructions from each of a family of unique programs."""
    if removed < 0:
        raise ValueError("removed must be >= 0")
    if removed == 0:
        return BoundInterval(Fraction(1), Fraction(1), exact=True)
    gamma, gout = profile.num_registers, profile.num_outputs
    upper = math.comb(size, removed) * Fraction(
        (gamma - gout) * profile.set_size, gamma) ** removed
    return BoundInterval(Fraction(1), upper)


def addition_duplication_bounds(num_programs: int, size: int,
                                added: int) -> BoundInterval:
    """Open bounds on the duplication-normalization factor when inserting
    ``added`` instructions into each of ``num_programs`` unique programs."""
    if added < 0 or num_programs < 1:
        raise ValueError("added must be >= 0 and num_programs >= 1")
    if added == 0:
        return BoundInterval(Fraction(1), Fraction(1), exact=True)
    return BoundInterval(Fraction(1),
                         Fraction(num_programs * math.comb(size + added, added)))


def improving_removal_count(size: int, step: int) -> int:
    """Upper bound on offspring of a size-``size`` program that get closer
    to the optimum when ``step`` instructions are deleted."""
    if not 0 <= step <= size:
        raise ValueError("need 0 <= step <= size")
    return math.comb(size, step)


def _log_comb(a: int, b: int) -> float:
    if b < 0 or b > a:
        return -math.inf
    return (math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1))


def _log_intron_upper(profile: SpaceProfile, m1: int, m2: int) -> float:
    k = m2 - m1
    if k == 0:
        return 0.0
    gamma, gout = profile.num_registers, profile.num_outputs
    w = max(0, gamma - gout - m1)
    base = (m2 * (gamma - gout + w) * (gamma - gout - w + 1)
            * profile.set_size / (2 * gamma))
    return k * math.log(base)


def _log_exon_upper(profile: SpaceProfile, m1: int, m2: int) -> float:
    k = m2 - m1
    if k == 0:
        return 0.0
    gamma, gout = profile.num_registers, profile.num_outputs
    top = min(gamma, gout + m1)
    base = (m2 * (gout + top) * (top - gout + 1)
            * profile.set_size / (2 * gamma))
    return k * math.log(base)


def improving_addition_count(profile: SpaceProfile, distance: int, size: int,
                             step: int, decrease: int) -> float:
    """Log of the upper bound on offspring that cut the distance to the
    optimum by ``decrease`` when ``step`` random instructions are inserted.

    Averages, over the admissible number j of superfluous-but-effective
    insertions, the count of ways to pick necessary instructions times the
    exon- and intron-padding growth bounds; j is assumed uniform.
    """
    if not 1 <= decrease <= min(distance, step):
        raise ValueError("decrease must be in [1, min(distance, step)]")
    top_j = min((step - decrease) // 2, distance - decrease)
    terms = []
    for j in range(top_j + 1):
        terms.append(_log_comb(distance, decrease + j)
                     + _log_exon_upper(profile, size + decrease + j,
                                       size + decrease + 2 * j)
                     + _log_intron_upper(profile, size + decrease + 2 * j,
                                         size + step))
    peak = max(terms)
    if peak == -math.inf:
        return -math.inf
    total = sum(math.exp(t - peak) for t in terms)
    return peak + math.log(total) - math.log(top_j + 1)


def log_total_addition_outcomes(size: int, step: int, set_size: int) -> float:
    """Log of the number of (position, instruction) outcomes of inserting
    ``step`` instructions into a size-``size`` program."""
    return _log_comb(size + step, step) + step * math.log(set_size)


def constructive_rate_bound(profile: SpaceProfile, distance: int, size: int,
                            step: int, *, truncated: bool = True) -> RateBound:
    """Upper bound on the expected per-application decrease of the distance
    to the optimum, for an operator that adds or removes ``step`` random
    instructions with equal probability.

    The raw form divides each improving-offspring bound by the total
    offspring count; since the bounds can exceed the totals, the truncated
    form caps each implied probability at 1 (and spreads it uniformly over
    the admissible decreases).  ``used_truncation`` reports whether any
    addition term actually exceeded the total.
    """
    if distance < 0 or size < 0 or step < 1:
        raise ValueError("need distance >= 0, size >= 0, step >= 1")
    if distance == 0:
        return RateBound(0.0, False)
    log_total = log_total_addition_outcomes(size, step, profile.set_size)
    max_add = min(distance, step)
    max_remove = min(distance, size, (distance + size - 1) // 2, step)
    add = 0.0
    overflowed = False
    for i in range(1, max_add + 1):
        log_ub = improving_addition_count(profile, distance, size, step, i)
        if log_ub > log_total:
            overflowed = True
        if truncated:
            add += i * math.exp(log_ub - max(log_ub, log_total)) / max_add
        else:
            add += i * math.exp(log_ub - log_total)
    if truncated:
        remove = (1 + max_remove) / 2
    else:
        remove = max_remove * (max_remove + 1) / 2
    return RateBound(0.5 * (add + remove), overflowed)


def min_hitting_time(profile: SpaceProfile, start_distance: float, size: int,
                     step: int, *, epsilon: float = DEFAULT_TOLERANCE,
                     truncated: bool = True,
                     max_steps: int = MAX_HITTING_STEPS,
                     rate_fn: Optional[Callable[[float], float]] = None
                     ) -> Optional[int]:
    """Iterations of best-case distance decrease until distance <= epsilon.

    The distance becomes fractional after the first subtraction; the rate is
    re-evaluated with the distance rounded up (the conservative choice) and
    the program size held fixed.  Returns ``None`` when the target is not
    reached within ``max_steps`` or the rate vanishes.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if rate_fn is None:
        cache: Dict[int, float] = {}

        def rate_fn(d: float) -> float:
            key = math.ceil(d)
            if key not in cache:
                cache[key] = constructive_rate_bound(
                    profile, key, size, step, truncated=truncated).value
            return cache[key]

    distance = float(start_distance)
    steps = 0
    while distance > epsilon:
        rate = rate_fn(distance)
        if rate <= 0 or steps >= max_steps:
            return None
        distance -= rate
        steps += 1
    return steps


@dataclass(frozen=True)
class StretchConstants:
    """Semantic stretch suprema feeding the fitness-gap bound.

    ``fitness_scale``: max |Δfitness| per unit of semantic distance to an
    optimum.  ``output_spread``: max semantic distance from any behavior to
    an optimal behavior.  ``aligned_step``: max distance growth when the
    same optimal-program instruction is applied to both behaviors of a
    pair.  ``mixed_step``: the same with an arbitrary instruction on one
    side.  ``exact`` marks suprema taken over a fully enumerated sample
    rather than a random one.
    """

    fitness_scale: float
    output_spread: float
    aligned_step: float
    mixed_step: float
    exact: bool = False

    def __post_init__(self):
        for name in ("fitness_scale", "output_spread", "aligned_step",
                     "mixed_step"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.mixed_step < self.aligned_step - 1e-12:
            raise ValueError("mixed_step must dominate aligned_step")


def fitness_gap_bound(distance: int, length: int,
                      consts: StretchConstants) -> float:
    """Upper bound on |fitness(program) - fitness(optimum)| for a program
    differing from an optimum in ``distance`` of ``length`` positions.

    Grows linearly in the number of differing positions and saturates at
    the fitness reachable across the whole behavior spread.
    """
    if not 0 <= distance <= length:
        raise ValueError("need 0 <= distance <= length")
    linear = ((consts.mixed_step - consts.aligned_step) * distance
              + consts.aligned_step * length)
    return consts.fitness_scale * min(linear, consts.output_spread)


def scan_stretch_constants(flat_semantics: np.ndarray,
                           fitness_values: np.ndarray,
                           optimal_indices: Sequence[int],
                           shape: Tuple[int, int],
                           instructions: Sequence[Instruction],
                           optimal_instructions: Sequence[Instruction],
                           exact: bool = False) -> StretchConstants:
    """Compute the stretch suprema over an explicit semantic sample.

    ``flat_semantics`` is (N, cases*slots); ``shape`` is (cases, slots).
    The identity transform always participates, so the suprema are
    nonnegative and the mixed scan dominates the aligned one by
    construction.
    """
    from scipy.spatial.distance import cdist

    n_sem = flat_semantics.shape[0]
    stacked = flat_semantics.reshape(n_sem, *shape)
    base_dist = cdist(flat_semantics, flat_semantics)

    transforms = [flat_semantics]
    for ins in instructions:
        transforms.append(transform_values(stacked, ins).reshape(n_sem, -1))
    # the identity occupies slot 0; instructions follow in order
    opt_keys = {0}
    for ins in optimal_instructions:
        for k, cand in enumerate(instructions):
            if cand == ins:
                opt_keys.add(k + 1)
                break

    aligned = 0.0
    for k in sorted(opt_keys):
        dist_k = cdist(transforms[k], transforms[k])
        aligned = max(aligned, float((dist_k - base_dist).max()))
    mixed = 0.0
    for k1 in range(len(transforms)):
        for k2 in sorted(opt_keys):
            dist_k = cdist(transforms[k1], transforms[k2])
            mixed = max(mixed, float((dist_k - base_dist).max()))

    opt_cols = base_dist[:, list(optimal_indices)]
    spread = float(opt_cols.max()) if len(optimal_indices) else 0.0
    scale = 0.0
    for j in optimal_indices:
        dist_j = base_dist[:, j]
        mask = dist_j > 1e-12
        if mask.any():
            gaps = np.abs(fitness_values[mask] - fitness_values[j])
            scale = max(scale, float((gaps / dist_j[mask]).max()))
    return StretchConstants(scale, spread, aligned, mixed, exact=exact)


def estimate_stretch_constants(iset: InstructionSet,
                               evaluator: FitnessEvaluator,
                               optimal_programs: Sequence[Program],
                               sample_budget: int,
                               rng: np.random.Generator,
                               max_sample_len: int = 20,
                               instruction_budget: int = 64
                               ) -> StretchConstants:
    """Sampled lower estimates of the stretch suprema.

    Random programs supply the behavior sample (the optima are always
    included); the mixed-step scan draws at most ``instruction_budget``
    instructions from the set.  Estimates can only undershoot the true
    suprema, hence ``exact=False`` on the result.
    """
    if sample_budget < 1:
        raise ValueError("sample_budget must be >= 1")
    config = evaluator.config
    programs: List[Program] = list(optimal_programs)
    for _ in range(sample_budget):
        length = int(rng.integers(0, max_sample_len + 1))
        picks = rng.integers(0, len(iset), size=length)
        programs.append(tuple(iset[int(i)] for i in picks))
    sems = [execute(p, evaluator.start, config) for p in programs]
    flat = np.stack([s.flat() for s in sems])
    fits = np.array([evaluator.fitness_of_semantics(s) for s in sems])

    optimal_instructions = sorted(
        {ins for p in optimal_programs for ins in p},
        key=lambda ins: (ins.dest, ins.op, ins.src1, ins.src2))
    if len(iset) <= instruction_budget:
        scan_set = list(iset.members)
    else:
        picks = rng.choice(len(iset), size=instruction_budget, replace=False)
        scan_set = [iset[int(i)] for i in sorted(picks)]
        scan_set.extend(i for i in optimal_instructions if i not in scan_set)

    cases = evaluator.dataset.num_cases
    slots = config.num_operands
    return scan_stretch_constants(
        flat, fits, list(range(len(optimal_programs))), (cases, slots),
        scan_set, optimal_instructions, exact=False)


@dataclass(frozen=True)
class GridPoint:
    """One (step, distance, size) cell of the rate/hitting-time sweep."""

    step: int
    distance: int
    size: int
    rate: float
    hitting_time: Optional[int]
    truncated: bool


def compute_rate_grid(profile: SpaceProfile,
                      steps: Iterable[int] = range(1, 36),
                      distances: Iterable[int] = range(1, 11),
                      sizes: Iterable[int] = range(1, 101),
                      *, epsilon: float = DEFAULT_TOLERANCE,
                      truncated: bool = True,
                      with_hitting: bool = True) -> List[GridPoint]:
    """Evaluate the rate bound (and optionally hitting time) on a grid.

    Output is sorted lexicographically by (step, distance, size).  Hitting
    times reuse the per-(size, step) rate cache, so the sweep stays cheap.
    """
    points = []
    for u in sorted(set(steps)):
        for m in sorted(set(sizes)):
            by_distance: Dict[int, RateBound] = {}

            def rate_at(d: float) -> float:
                key = math.ceil(d)
                if key not in by_distance:
                    by_distance[key] = constructive_rate_bound(
                        profile, key, m, u, truncated=truncated)
                return by_distance[key].value

            for d in sorted(set(distances)):
                rate = rate_at(d)
                hit = None
                if with_hitting:
                    hit = min_hitting_time(profile, d, m, u, epsilon=epsilon,
                                           truncated=truncated,
                                           rate_fn=rate_at)
                points.append(GridPoint(u, d, m, rate, hit,
                                        by_distance[d].used_truncation))
    points.sort(key=lambda p: (p.step, p.distance, p.size))
    return points


def write_grid_csv(points: Sequence[GridPoint], path: str,
                   header_comment: str = "") -> None:
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["u", "d", "m", "rate_ub", "hitting_time", "truncated"])
        for p in points:
            hit = "unreached" if p.hitting_time is None else p.hitting_time
            writer.writerow([p.step, p.distance, p.size, f"{p.rate:.10g}",
                             hit, int(p.truncated)])
