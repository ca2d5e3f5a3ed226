"""Exhaustive enumeration of tiny program spaces.

A tiny space is every program up to a small maximum size over a small
instruction set — small enough to hold the complete layer-by-layer census in
memory.  On such spaces the quantities that are only bounded elsewhere can be
computed exactly: the minimum add/remove distance to an optimum (by
breadth-first search over the move graph, cross-checked against an
independent subsequence recount), the per-layer distance distribution, the
exact intron/exon padding factors, and per-program fitness-gap certificates.

Every verification returns a small report object rather than asserting, so
the command-line runner and the test suite can share one code path.
"""

from __future__ import annotations

import csv
import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (Dict, Iterable, List, Mapping, Optional, Sequence, Tuple)

import numpy as np

from .bounds import (BoundInterval, SpaceProfile, StretchConstants,
                     edit_distance_bounds, exon_growth_bounds,
                     fitness_gap_bound, intron_growth_bounds,
                     scan_stretch_constants)
from .core import (Instruction, RegisterConfig, effective_register_slots,
                   execute, initial_semantics, transform_values)
from .instrset import InstructionSet

ENUMERATION_GUARD = 10**7
MAX_TINY_SET = 12
MAX_TINY_DEPTH = 5

IndexProgram = Tuple[int, ...]


def _census(set_size: int, depth: int) -> int:
    return sum(set_size**m for m in range(depth + 1))


class TinySpace:
    """All programs of size <= ``max_size`` over a small instruction set.

    Programs are canonically encoded as tuples of member indices.  Probe
    features/targets are optional; operations that need behavior raise
    without them.
    """

    def __init__(self, iset: InstructionSet, max_size: int,
                 features: Optional[np.ndarray] = None,
                 targets: Optional[np.ndarray] = None,
                 name: str = "tiny"):
        if max_size < 1:
            raise ValueError("max_size must be >= 1")
        total = _census(len(iset), max_size)
        if total > ENUMERATION_GUARD:
            raise ValueError(
                f"enumeration would visit {total} programs "
                f"(guard {ENUMERATION_GUARD})")
        if len(iset) > MAX_TINY_SET:
            raise ValueError(
                f"tiny spaces need <= {MAX_TINY_SET} instructions, got {len(iset)}")
        if max_size > MAX_TINY_DEPTH:
            raise ValueError(f"max_size must be in [1, {MAX_TINY_DEPTH}]")
        self.iset = iset
        self.config = iset.config
        self.max_size = max_size
        self.name = name
        self.features = features
        self.targets = None if targets is None else np.asarray(targets, float)
        self._start = None
        if features is not None:
            self._start = initial_semantics(self.config, features)
        self._outputs_cache: Optional[Dict[IndexProgram, np.ndarray]] = None

    @property
    def set_size(self) -> int:
        return len(self.iset)

    @property
    def total_programs(self) -> int:
        return _census(self.set_size, self.max_size)

    def layer(self, size: int) -> List[IndexProgram]:
        return list(itertools.product(range(self.set_size), repeat=size))

    def all_programs(self) -> List[IndexProgram]:
        out: List[IndexProgram] = []
        for m in range(self.max_size + 1):
            out.extend(self.layer(m))
        return out

    def materialize(self, program: IndexProgram) -> Tuple[Instruction, ...]:
        return tuple(self.iset[k] for k in program)

    def _require_probe(self):
        if self._start is None or self.targets is None:
            raise ValueError(f"space {self.name!r} has no probe data")

    def output_table(self) -> Dict[IndexProgram, np.ndarray]:
        """First-output-register vector of every program, built layer by
        layer so each program costs one instruction application."""
        self._require_probe()
        if self._outputs_cache is not None:
            return self._outputs_cache
        out_reg = self.config.output_registers[0]
        table: Dict[IndexProgram, np.ndarray] = {}
        frontier = {(): self._start.values}
        table[()] = self._start.values[:, out_reg].copy()
        for _ in range(self.max_size):
            nxt = {}
            for prog, values in frontier.items():
                for k in range(self.set_size):
                    ext = prog + (k,)
                    new_values = transform_values(values, self.iset[k])
                    nxt[ext] = new_values
                    table[ext] = new_values[:, out_reg]
            frontier = nxt
        self._outputs_cache = table
        return table

    def find_optimal_programs(self, atol: float = 1e-9) -> List[IndexProgram]:
        """Programs whose first output matches the probe targets exactly."""
        self._require_probe()
        table = self.output_table()
        return [p for p in self.all_programs()
                if np.allclose(table[p], self.targets, atol=atol, rtol=0.0)]

    def fitness_table(self) -> Dict[IndexProgram, float]:
        self._require_probe()
        targets = self.targets
        denom = float(np.sum((targets - targets.mean()) ** 2))
        table = self.output_table()
        return {p: float(np.sum((v - targets) ** 2) / denom)
                for p, v in table.items()}

    # -- exact move distances ------------------------------------------------

    def distance_map(self, optimal: Sequence[IndexProgram]
                     ) -> Dict[IndexProgram, int]:
        """Exact minimum add/remove moves to any optimal program.

        Multi-source BFS over insert/delete edges.  A shortest path never
        needs programs larger than max(|program|, |optimum|) — delete the
        off-subsequence instructions first, then insert — so searching
        within the enumerated sizes is exact; the recount below certifies
        this on every space.
        """
        if not optimal:
            raise ValueError("need at least one optimal program")
        cap = max(self.max_size, max(len(p) for p in optimal))
        n = self.set_size
        dist: Dict[IndexProgram, int] = {}
        queue: deque = deque()
        for p in sorted(optimal):
            if p not in dist:
                dist[p] = 0
                queue.append(p)
        while queue:
            prog = queue.popleft()
            d = dist[prog] + 1
            m = len(prog)
            if m > 0:
                for i in range(m):
                    shorter = prog[:i] + prog[i + 1:]
                    if shorter not in dist:
                        dist[shorter] = d
                        queue.append(shorter)
            if m < cap:
                for i in range(m + 1):
                    head, tail = prog[:i], prog[i:]
                    for k in range(n):
                        longer = head + (k,) + tail
                        if longer not in dist:
                            dist[longer] = d
                            queue.append(longer)
        return dist

    def distance_recount(self, optimal: Sequence[IndexProgram]
                         ) -> Dict[IndexProgram, int]:
        """Independent recount: distance = m + |o| - 2*LCS, minimized over
        optima, with the subsequence table vectorized across each layer."""
        if not optimal:
            raise ValueError("need at least one optimal program")
        result: Dict[IndexProgram, int] = {}
        for m in range(self.max_size + 1):
            layer = self.layer(m)
            if m == 0:
                result[()] = min(len(o) for o in optimal)
                continue
            progs = np.array(layer, dtype=np.int64)
            best = np.full(len(layer), np.iinfo(np.int64).max)
            for opt in optimal:
                k = len(opt)
                if k == 0:
                    best = np.minimum(best, m)
                    continue
                prev = np.zeros((len(layer), k + 1), dtype=np.int64)
                for i in range(m):
                    cur = np.zeros_like(prev)
                    for j in range(k):
                        hit = progs[:, i] == opt[j]
                        cur[:, j + 1] = np.where(
                            hit, prev[:, j] + 1,
                            np.maximum(prev[:, j + 1], cur[:, j]))
                    prev = cur
                best = np.minimum(best, m + k - 2 * prev[:, k])
            for prog, b in zip(layer, best):
                result[prog] = int(b)
        return result


# -- layer census ------------------------------------------------------------


@dataclass(frozen=True)
class LayerStats:
    """Exact per-layer distance census: counts[m][d] programs at size m
    whose minimum move distance is d."""

    set_size: int
    counts: Mapping[int, Mapping[int, int]]

    def __post_init__(self):
        for m, row in self.counts.items():
            if sum(row.values()) != self.set_size**m:
                raise ValueError(f"layer {m} census does not sum to n^m")

    @property
    def layers(self) -> List[int]:
        return sorted(self.counts)

    def probability(self, size: int, distance: int) -> Fraction:
        return Fraction(self.counts.get(size, {}).get(distance, 0),
                        self.set_size**size)

    def expected_distance(self, size: int) -> Fraction:
        row = self.counts[size]
        return Fraction(sum(d * c for d, c in row.items()),
                        self.set_size**size)

    def bloat_expectation(self, size: int, target_distance: int) -> Fraction:
        """Mean of (target_distance - d) over the layer, counting only
        programs already within the target distance."""
        row = self.counts.get(size, {})
        total = self.set_size**size
        acc = sum(c * (target_distance - d) for d, c in row.items()
                  if d <= target_distance)
        return Fraction(acc, total)

    def write_csv(self, path: str, header_comment: str = "") -> None:
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(["m", "d", "count", "probability"])
            for m in self.layers:
                for d, c in sorted(self.counts[m].items()):
                    writer.writerow(
                        [m, d, c, f"{float(self.probability(m, d)):.10g}"])


def layer_statistics(space: TinySpace, distances: Mapping[IndexProgram, int],
                     min_size: int = 1) -> LayerStats:
    """Census distances by layer; the empty program is skipped by default
    since its distance is pinned at the optimal size."""
    counts: Dict[int, Dict[int, int]] = {}
    for m in range(min_size, space.max_size + 1):
        counter: Counter = Counter(distances[p] for p in space.layer(m))
        counts[m] = dict(sorted(counter.items()))
    return LayerStats(space.set_size, counts)


# -- verification reports ----------------------------------------------------


@dataclass(frozen=True)
class WindowReport:
    checked: int
    violations: int
    dual_mismatches: int

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.dual_mismatches == 0


def verify_distance_window(space: TinySpace,
                           optimal: Sequence[IndexProgram]) -> WindowReport:
    """Every program's exact distance must fall inside the closed window
    [max(0, m*-m), m*+m]; the BFS and the recount must agree exactly."""
    m_star = min(len(p) for p in optimal)
    if m_star < 1:
        raise ValueError("spaces where the empty program is optimal "
                         "are not supported")
    profile = SpaceProfile(space.config.num_registers,
                           len(space.config.output_registers),
                           space.set_size, optimal_size=m_star)
    bfs = space.distance_map(optimal)
    recount = space.distance_recount(optimal)
    checked = violations = mismatches = 0
    for m in range(space.max_size + 1):
        for prog in space.layer(m):
            checked += 1
            lo, hi = edit_distance_bounds(m, profile)
            if not lo <= bfs[prog] <= hi:
                violations += 1
            if bfs[prog] != recount[prog]:
                mismatches += 1
    return WindowReport(checked, violations, mismatches)


@dataclass(frozen=True)
class SimilarityReport:
    size: int
    distance: int
    probability_low: Fraction
    probability_high: Fraction
    difference: Fraction
    within: bool


def verify_probability_similarity(stats: LayerStats, distance: int, size: int,
                                  tolerance: Fraction = Fraction(1, 10)
                                  ) -> SimilarityReport:
    """Report |p_m(d) - p_{m+1}(d)| for one (m, d) and whether it is small."""
    p_low = stats.probability(size, distance)
    p_high = stats.probability(size + 1, distance)
    diff = abs(p_high - p_low)
    return SimilarityReport(size, distance, p_low, p_high, diff,
                            diff <= tolerance)


@dataclass(frozen=True)
class GrowthReport:
    expectations: Mapping[int, Fraction]
    margins: Mapping[int, Fraction]  # keyed by the lower layer of each pair

    @property
    def strictly_increasing(self) -> bool:
        return all(m > 0 for m in self.margins.values())


def verify_expectation_growth(stats: LayerStats) -> GrowthReport:
    """Expected distance per layer and the layer-to-layer margins."""
    expectations = {m: stats.expected_distance(m) for m in stats.layers}
    margins = {}
    layers = stats.layers
    for a, b in zip(layers, layers[1:]):
        if b == a + 1:
            margins[a] = expectations[b] - expectations[a]
    return GrowthReport(expectations, margins)


@dataclass(frozen=True)
class BloatCellReport:
    size: int
    target_distance: int
    expectation_lower: Optional[Fraction]  # layer size-1 (remove direction)
    expectation_here: Fraction
    expectation_higher: Fraction           # layer size+1 (add direction)
    add_not_worse: bool                    # E_{m+1} >= E_m
    add_beats_remove: Optional[bool]       # E_{m+1} >= E_{m-1}


def verify_bloat_expectation(stats: LayerStats, size: int,
                             target_distance: int) -> BloatCellReport:
    """Exact slack expectations around one layer: growing the layer may not
    shrink the expected slack, and growing beats shrinking."""
    here = stats.bloat_expectation(size, target_distance)
    higher = stats.bloat_expectation(size + 1, target_distance)
    lower = None
    beats = None
    if size - 1 in stats.counts:
        lower = stats.bloat_expectation(size - 1, target_distance)
        beats = higher >= lower
    return BloatCellReport(size, target_distance, lower, here, higher,
                           higher >= here, beats)


@dataclass(frozen=True)
class BucketRow:
    bucket: int
    hypothesis_lhs: Optional[Fraction]
    hypothesis_rhs: Optional[Fraction]
    hypothesis_holds: Optional[bool]
    conclusion_lhs: Optional[Fraction]
    conclusion_rhs: Fraction
    conclusion_holds: Optional[bool]
    degenerate: bool


@dataclass(frozen=True)
class BucketReport:
    distance: int
    bucket_width: float
    rows: List[BucketRow]

    @property
    def implication_violations(self) -> int:
        return sum(1 for r in self.rows
                   if not r.degenerate and r.hypothesis_holds
                   and not r.conclusion_holds)


def verify_fitness_buckets(space: TinySpace,
                           distances: Mapping[IndexProgram, int],
                           distance: int,
                           bucket_width: float = 0.05) -> BucketReport:
    """Per fitness-bucket comparison of the distance-d and distance-(d+1)
    populations (cumulative over all enumerated sizes).

    For each bucket: if the bucket's share among the newly admitted
    programs is at most its current share plus its count over the newly
    admitted total, then its overall share moves by less than that current
    share.  Buckets empty at distance d, or distances admitting no new
    programs, are degenerate and flagged instead of checked.
    """
    fitness = space.fitness_table()
    inner: Counter = Counter()
    outer: Counter = Counter()
    inner_total = outer_total = 0
    for prog, d in distances.items():
        if len(prog) > space.max_size:
            continue
        bucket = int(math.floor(fitness[prog] / bucket_width))
        if d <= distance:
            inner[bucket] += 1
            inner_total += 1
        if d <= distance + 1:
            outer[bucket] += 1
            outer_total += 1
    rows = []
    fresh_total = outer_total - inner_total
    for bucket in sorted(set(inner) | set(outer)):
        b_in = inner.get(bucket, 0)
        b_out = outer.get(bucket, 0)
        conclusion_rhs = Fraction(b_in, inner_total) if inner_total else Fraction(0)
        degenerate = b_in == 0 or fresh_total == 0 or inner_total == 0
        if degenerate:
            rows.append(BucketRow(bucket, None, None, None, None,
                                  conclusion_rhs, None, True))
            continue
        hyp_lhs = Fraction(b_out - b_in, fresh_total)
        hyp_rhs = (Fraction(b_in, inner_total)
                   + Fraction(b_in, fresh_total))
        con_lhs = abs(Fraction(b_out, outer_total)
                      - Fraction(b_in, inner_total))
        rows.append(BucketRow(bucket, hyp_lhs, hyp_rhs, hyp_lhs <= hyp_rhs,
                              con_lhs, conclusion_rhs,
                              con_lhs < conclusion_rhs, False))
    return BucketReport(distance, bucket_width, rows)


# -- fitness-gap certification ----------------------------------------------


@dataclass(frozen=True)
class GapCertificate:
    constants: StretchConstants
    padded_length: int
    pairs_checked: int
    violations: int
    control_violations: int  # with the fitness scale halved
    worst_ratio: float

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.control_violations > 0


def exact_stretch_constants(space: TinySpace,
                            optimal: Sequence[IndexProgram]
                            ) -> StretchConstants:
    """Stretch suprema over the complete enumerated behavior sample."""
    space._require_probe()
    fitness = space.fitness_table()
    programs = space.all_programs()
    sems = np.stack([
        execute(space.materialize(p), space._start, space.config).flat()
        for p in programs])
    fits = np.array([fitness[p] for p in programs])
    index = {p: i for i, p in enumerate(programs)}
    optimal_instructions = sorted(
        {space.iset[k] for p in optimal for k in p},
        key=lambda ins: (ins.dest, ins.op, ins.src1, ins.src2))
    cases = space.features.shape[0]
    return scan_stretch_constants(
        sems, fits, [index[p] for p in optimal],
        (cases, space.config.num_operands),
        list(space.iset.members), optimal_instructions, exact=True)


def certify_fitness_gap(space: TinySpace, optimal: Sequence[IndexProgram],
                        constants: Optional[StretchConstants] = None,
                        slack: float = 1e-9) -> GapCertificate:
    """Check the gap bound for every (program, optimum) pair at padded
    length, plus the halved-scale negative control.

    Programs shorter than the padded length are filled with a designated
    hold instruction (identity behavior), and the distance is the number of
    differing positions.  With exact constants the bound holds for every
    pair by construction, so a clean pass certifies the implementation; the
    halved control must fail somewhere to show the check has teeth.
    """
    if constants is None:
        constants = exact_stretch_constants(space, optimal)
    halved = StretchConstants(constants.fitness_scale / 2.0,
                              constants.output_spread,
                              constants.aligned_step,
                              constants.mixed_step, exact=False)
    fitness = space.fitness_table()
    length = max(space.max_size, max(len(p) for p in optimal))
    hold = -1  # padding slot; compares unequal to every member index

    def padded(prog: IndexProgram) -> IndexProgram:
        return prog + (hold,) * (length - len(prog))

    pairs = violations = control_violations = 0
    worst = 0.0
    opt_padded = [(padded(o), fitness[o]) for o in optimal]
    for prog in space.all_programs():
        pp = padded(prog)
        f = fitness[prog]
        for po, fo in opt_padded:
            delta = sum(1 for a, b in zip(pp, po) if a != b)
            gap = abs(f - fo)
            bound = fitness_gap_bound(delta, length, constants)
            if gap > bound + slack:
                violations += 1
            if gap > fitness_gap_bound(delta, length, halved) + slack:
                control_violations += 1
            if bound > 0:
                worst = max(worst, gap / bound)
            pairs += 1
    return GapCertificate(constants, length, pairs, violations,
                          control_violations, worst)


# -- exact padding-growth factors -------------------------------------------


def _insertions(space: TinySpace, program: IndexProgram,
                want_introns: bool) -> set:
    """Distinct programs from inserting one member, keeping only intron
    (or only exon) insertions."""
    instructions = space.materialize(program)
    slots = effective_register_slots(instructions, space.config)
    out = set()
    for pos in range(len(program) + 1):
        live = slots[pos]
        for k in range(space.set_size):
            is_intron = space.iset[k].dest not in live
            if is_intron == want_introns:
                out.add(program[:pos] + (k,) + program[pos:])
    return out


def exact_growth_factors(space: TinySpace, size_from: int,
                         size_to: int) -> Tuple[Fraction, Fraction]:
    """Exact (intron_factor, exon_factor): the mean number of distinct
    size-``size_to`` programs reachable from a size-``size_from`` program
    by repeatedly inserting only introns (resp. only exons)."""
    if not 0 <= size_from <= size_to:
        raise ValueError("need 0 <= size_from <= size_to")
    work = space.set_size**size_to * max(1, size_to)
    if work > ENUMERATION_GUARD:
        raise ValueError(
            f"insertion sweep would touch ~{work} programs "
            f"(guard {ENUMERATION_GUARD})")
    results = []
    for want_introns in (True, False):
        total = 0
        bases = space.layer(size_from)
        for base in bases:
            frontier = {base}
            for _ in range(size_to - size_from):
                grown: set = set()
                for prog in frontier:
                    grown |= _insertions(space, prog, want_introns)
                frontier = grown
            total += len(frontier)
        results.append(Fraction(total, len(bases)))
    return results[0], results[1]


@dataclass(frozen=True)
class SandwichReport:
    name: str
    size_from: int
    size_to: int
    intron_exact: Fraction
    intron_bounds: BoundInterval
    exon_exact: Fraction
    exon_bounds: BoundInterval

    @property
    def intron_inside(self) -> bool:
        return self.intron_bounds.lower < self.intron_exact < self.intron_bounds.upper

    @property
    def exon_inside(self) -> bool:
        return self.exon_bounds.lower < self.exon_exact < self.exon_bounds.upper

    @property
    def passed(self) -> bool:
        return self.intron_inside and self.exon_inside


def verify_growth_sandwich(space: TinySpace, size_from: int,
                           size_to: int) -> SandwichReport:
    """Exact padding factors against their open closed-form bounds."""
    profile = SpaceProfile(space.config.num_registers,
                           len(space.config.output_registers),
                           space.set_size)
    intron_exact, exon_exact = exact_growth_factors(space, size_from, size_to)
    return SandwichReport(
        space.name, size_from, size_to,
        intron_exact, intron_growth_bounds(profile, size_from, size_to),
        exon_exact, exon_growth_bounds(profile, size_from, size_to))


# -- bundled registry --------------------------------------------------------

PROBE_POINTS = 8

CHECK_DISTANCE = "distance"
CHECK_EXPECTATION = "expectation"
CHECK_BLOAT_CELLS = "bloat-cells"
CHECK_CERTIFICATION = "certification"


@dataclass(frozen=True)
class SpaceRecipe:
    """Registry entry: a constructible tiny space plus the property checks
    it is bundled to demonstrate (every space backs the distance checks)."""

    name: str
    num_registers: int
    num_outputs: int
    members: Tuple[Tuple[int, str, int, int], ...]
    max_size: int
    target: str  # key into _TARGETS
    checks: Tuple[str, ...] = (CHECK_DISTANCE,)


_TARGETS = {
    "double": lambda x: 2.0 * x,
    "triple": lambda x: 3.0 * x,
    "square-plus": lambda x: x * x + x,
}


def build_tiny_space(recipe: SpaceRecipe) -> TinySpace:
    config = RegisterConfig(
        num_registers=recipe.num_registers, num_features=1,
        output_registers=tuple(range(recipe.num_outputs)))
    members = tuple(Instruction(*fields) for fields in recipe.members)
    iset = InstructionSet(config, members, name=recipe.name)
    x = np.linspace(-1.0, 1.0, PROBE_POINTS)
    return TinySpace(iset, recipe.max_size, x[:, None],
                     _TARGETS[recipe.target](x), name=recipe.name)


def _combo(num_registers: int, funcs: Sequence[str],
           pairs: Sequence[Tuple[int, int]]) -> Tuple[Tuple[int, str, int, int], ...]:
    return tuple((d, f, a, b) for d in range(num_registers)
                 for f in funcs for (a, b) in pairs)


BUNDLED_SPACES: Tuple[SpaceRecipe, ...] = (
    SpaceRecipe("pair-scale", 1, 1, _combo(1, ["add", "mul"], [(0, 0)]),
                5, "double", (CHECK_DISTANCE, CHECK_EXPECTATION)),
    SpaceRecipe("square-chain", 2, 1,
                _combo(2, ["add", "mul"], [(0, 2), (2, 2)]),
                3, "square-plus", (CHECK_DISTANCE, CHECK_EXPECTATION)),
    SpaceRecipe("double-sum3", 3, 1, _combo(3, ["add"], [(0, 3), (3, 3)]),
                5, "double", (CHECK_DISTANCE, CHECK_BLOAT_CELLS)),
    SpaceRecipe("double-sum4", 4, 1, _combo(4, ["add"], [(0, 4), (4, 4)]),
                4, "double", (CHECK_DISTANCE, CHECK_BLOAT_CELLS)),
    SpaceRecipe("double-path4", 4, 1, _combo(4, ["add"], [(0, 4)]),
                4, "double", (CHECK_DISTANCE, CHECK_BLOAT_CELLS)),
    SpaceRecipe("quad-mix", 1, 1,
                tuple((0, f, a, b) for f in ("add", "sub", "mul")
                      for a in (0, 1) for b in (0, 1)),
                3, "square-plus",
                (CHECK_DISTANCE, CHECK_EXPECTATION, CHECK_CERTIFICATION)),
)


@dataclass(frozen=True)
class GrowthRecipe:
    """A register/instruction profile plus one (m1, m2) sandwich query."""

    name: str
    num_registers: int
    num_outputs: int
    members: Tuple[Tuple[int, str, int, int], ...]
    size_from: int
    size_to: int


def build_growth_space(recipe: GrowthRecipe) -> TinySpace:
    config = RegisterConfig(
        num_registers=recipe.num_registers, num_features=1,
        output_registers=tuple(range(recipe.num_outputs)))
    members = tuple(Instruction(*fields) for fields in recipe.members)
    iset = InstructionSet(config, members, name=recipe.name)
    return TinySpace(iset, min(MAX_TINY_DEPTH, recipe.size_to),
                     name=recipe.name)


_REG_PAIR = _combo(2, ["add"], [(0, 1), (1, 0)])
_MIXED_PAIR = _combo(2, ["add"], [(0, 1), (1, 0), (0, 2), (2, 0)])
_RING3 = _combo(3, ["add"], [(0, 1), (1, 2), (2, 0)])
_CHAIN3 = _combo(3, ["add"], [(0, 1), (1, 2)])
_SPARSE4 = _combo(4, ["add"], [(1, 2), (3, 0)])
_RING4 = _combo(4, ["add"], [(1, 2), (2, 3), (3, 0)])

GROWTH_CONFIGS: Tuple[GrowthRecipe, ...] = (
    GrowthRecipe("reg-pair", 2, 1, _REG_PAIR, 2, 3),
    GrowthRecipe("reg-pair", 2, 1, _REG_PAIR, 3, 4),
    GrowthRecipe("reg-pair", 2, 1, _REG_PAIR, 2, 4),
    GrowthRecipe("reg-pair", 2, 1, _REG_PAIR, 1, 3),
    GrowthRecipe("mixed-pair", 2, 1, _MIXED_PAIR, 2, 3),
    GrowthRecipe("mixed-pair", 2, 1, _MIXED_PAIR, 3, 4),
    GrowthRecipe("mixed-pair", 2, 1, _MIXED_PAIR, 2, 4),
    GrowthRecipe("ring3-dual", 3, 2, _RING3, 2, 3),
    GrowthRecipe("ring3-dual", 3, 2, _RING3, 3, 4),
    GrowthRecipe("ring3-dual", 3, 2, _RING3, 1, 3),
    GrowthRecipe("chain3-dual", 3, 2, _CHAIN3, 2, 3),
    GrowthRecipe("chain3-dual", 3, 2, _CHAIN3, 3, 4),
    GrowthRecipe("sparse4", 4, 1, _SPARSE4, 1, 3),
    GrowthRecipe("ring4-dual", 4, 2, _RING4, 3, 4),
)


def run_growth_sandwiches(recipes: Iterable[GrowthRecipe] = GROWTH_CONFIGS
                          ) -> List[SandwichReport]:
    reports = []
    for recipe in recipes:
        space = build_growth_space(recipe)
        reports.append(verify_growth_sandwich(space, recipe.size_from,
                                              recipe.size_to))
    return reports
