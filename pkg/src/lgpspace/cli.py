"""Experiment runner: evolve | sample | grid | study | oracle | bounds.

Each command reads an optional ``key=value`` config file; the ``--seed``,
``--out``, ``--problem``, ``--u`` and ``--variant`` flags override file
values where they apply.  Every CSV starts with a provenance comment (a
digest of the effective configuration plus the seed list), and re-running a
command with the same configuration reproduces the files byte for byte.

Exit codes: 0 success, 1 input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as scipy_stats

from .bounds import (SpaceProfile, compute_rate_grid, constructive_rate_bound,
                     edit_distance_bounds, exon_growth_bounds,
                     intron_growth_bounds, min_hitting_time,
                     reachable_size_bounds, write_grid_csv)
from .core import DEFAULT_FUNCTIONS, RegisterConfig
from .evolution import EvolutionConfig, RunTrace, evolve, random_program
from .exhaustive import (BUNDLED_SPACES, CHECK_BLOAT_CELLS,
                         CHECK_CERTIFICATION, CHECK_EXPECTATION, SpaceRecipe,
                         TinySpace, build_tiny_space, certify_fitness_gap,
                         exact_stretch_constants, layer_statistics,
                         run_growth_sandwiches, verify_bloat_expectation,
                         verify_distance_window, verify_expectation_growth,
                         verify_fitness_buckets, verify_probability_similarity)
from .instrset import (VARIANT_NAMES, build_instruction_set, build_variant)
from .problems import (BENCHMARKS, Dataset, FitnessEvaluator,
                       generate_benchmark, generate_test_split,
                       load_dataset_csv)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2

DEFAULT_SEEDS = "0..49"


class InputError(Exception):
    """Bad arguments or configuration; reported with exit code 1."""


# -- configuration plumbing --------------------------------------------------


def read_config_file(path: str) -> Dict[str, str]:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    values: Dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def parse_int_list(text: str, what: str = "integer list") -> List[int]:
    """Comma-separated integers; ``a..b`` and ``a..b..step`` expand ranges."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split("..")
        try:
            if len(pieces) == 1:
                out.append(int(pieces[0]))
            elif len(pieces) == 2:
                out.extend(range(int(pieces[0]), int(pieces[1]) + 1))
            elif len(pieces) == 3:
                out.extend(range(int(pieces[0]), int(pieces[1]) + 1,
                                 int(pieces[2])))
            else:
                raise ValueError
        except ValueError:
            raise InputError(f"bad {what} entry {part!r}")
    if not out:
        raise InputError(f"empty {what}")
    return out


def parse_seeds(text: str) -> Tuple[int, ...]:
    seeds = parse_int_list(text, "seed list")
    if len(set(seeds)) != len(seeds):
        raise InputError("seeds must be distinct")
    return tuple(seeds)


def _get_int(cfg: Mapping[str, str], key: str, default: int) -> int:
    try:
        return int(cfg.get(key, default))
    except ValueError:
        raise InputError(f"config key {key!r} must be an integer")


def _get_float(cfg: Mapping[str, str], key: str, default: float) -> float:
    try:
        return float(cfg.get(key, default))
    except ValueError:
        raise InputError(f"config key {key!r} must be a number")


def _get_bool(cfg: Mapping[str, str], key: str, default: bool) -> bool:
    raw = cfg.get(key)
    if raw is None:
        return default
    lowered = raw.lower()
    if lowered in ("1", "yes", "true", "on"):
        return True
    if lowered in ("0", "no", "false", "off"):
        return False
    raise InputError(f"config key {key!r} must be a yes/no value")


_COMMON_KEYS = {"tag", "seeds", "out"}

_EVOLUTION_KEYS = {"population", "generations", "tournament", "elitism",
                   "p_add", "p_remove", "p_reproduce", "init_min", "init_max",
                   "max_len"}

_ALLOWED_KEYS = {
    "evolve": _COMMON_KEYS | _EVOLUTION_KEYS
    | {"problem", "cases", "registers", "variant", "u"},
    "sample": _COMMON_KEYS
    | {"problem", "cases", "registers", "variant", "sizes", "programs"},
    "grid": _COMMON_KEYS
    | {"registers", "outputs", "features", "functions", "variant",
       "set_size", "optimal_size", "u", "d", "m", "epsilon", "form",
       "hitting"},
    "study": _COMMON_KEYS | _EVOLUTION_KEYS
    | {"problems", "variants", "cases", "registers", "u"},
    "oracle": _COMMON_KEYS
    | {"spaces", "bucket_width", "similarity_tolerance", "sandwiches",
       "space_registers", "space_outputs", "space_functions",
       "space_max_size", "space_target", "space_name"},
    "bounds": {"registers", "outputs", "features", "functions", "set_size",
               "optimal_size", "size", "distance", "u", "moves", "grow_to",
               "epsilon", "form"},
}


def load_config(args: argparse.Namespace) -> Dict[str, str]:
    """Merge config-file values with flag overrides and validate the keys."""
    cfg = read_config_file(args.config) if args.config else {}
    unknown = sorted(set(cfg) - _ALLOWED_KEYS[args.command])
    if unknown:
        raise InputError(
            f"unknown config key(s) for {args.command}: {', '.join(unknown)}")
    for flag, key in (("seed", "seeds"), ("out", "out"),
                      ("problem", "problem"), ("u", "u"),
                      ("variant", "variant")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[key] = str(value)
    return cfg


def config_digest(command: str, cfg: Mapping[str, str]) -> str:
    """Short stable digest of the effective configuration (output dir aside)."""
    payload = [command]
    payload += [f"{k}={v}" for k, v in sorted(cfg.items()) if k != "out"]
    return hashlib.sha256("\n".join(payload).encode()).hexdigest()[:12]


def provenance_line(command: str, cfg: Mapping[str, str],
                    seeds: Sequence[int]) -> str:
    seed_text = ",".join(str(s) for s in seeds) if seeds else "-"
    return f"config {config_digest(command, cfg)} seeds {seed_text}"


def ensure_out_dir(cfg: Mapping[str, str]) -> Path:
    out = Path(cfg.get("out", "runs"))
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise InputError(f"output directory {out} is not writable: {exc}")
    return out


def build_evolution_config(cfg: Mapping[str, str]) -> EvolutionConfig:
    base = EvolutionConfig()
    try:
        return EvolutionConfig(
            population_size=_get_int(cfg, "population", base.population_size),
            generations=_get_int(cfg, "generations", base.generations),
            tournament_size=_get_int(cfg, "tournament", base.tournament_size),
            elitism=_get_int(cfg, "elitism", base.elitism),
            p_add=_get_float(cfg, "p_add", base.p_add),
            p_remove=_get_float(cfg, "p_remove", base.p_remove),
            p_reproduce=_get_float(cfg, "p_reproduce", base.p_reproduce),
            init_min_len=_get_int(cfg, "init_min", base.init_min_len),
            init_max_len=_get_int(cfg, "init_max", base.init_max_len),
            max_len=_get_int(cfg, "max_len", base.max_len),
        )
    except ValueError as exc:
        raise InputError(str(exc))


def resolve_dataset(problem: str, seed: int,
                    cases: Optional[int]) -> Dataset:
    """A benchmark name samples per seed; anything else is a CSV path."""
    if problem in BENCHMARKS:
        return generate_benchmark(problem, seed, cases)
    if Path(problem).exists():
        return load_dataset_csv(problem)
    raise InputError(
        f"unknown problem {problem!r}: not a benchmark "
        f"({', '.join(sorted(BENCHMARKS))}) and no such file")


def make_instruction_set(variant: str, num_registers: int,
                         num_features: int):
    config = RegisterConfig(num_registers=num_registers,
                            num_features=num_features,
                            output_registers=(0,))
    try:
        return build_variant(variant, build_instruction_set(config))
    except ValueError as exc:
        raise InputError(str(exc))


def _sanitize(tag: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in tag)


# -- evolve ------------------------------------------------------------------


def write_aggregate_csv(path: Path, traces: Sequence[RunTrace],
                        header_comment: str) -> None:
    """Mean and population std per generation across a batch of runs."""
    fields = ("best_fitness", "mean_fitness", "mean_size", "mean_exons")
    stacked = {f: np.array([getattr(t, f) for t in traces]) for f in fields}
    with open(path, "w", newline="") as fh:
        fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        header = ["generation"]
        for f in fields:
            header += [f"{f}_mean", f"{f}_std"]
        writer.writerow(header)
        for i, gen in enumerate(traces[0].generations):
            row: List[str] = [str(gen)]
            for f in fields:
                col = stacked[f][:, i]
                row += [f"{col.mean():.10g}", f"{col.std():.10g}"]
            writer.writerow(row)


def run_evolution_batch(problem: str, seeds: Sequence[int],
                        evo: EvolutionConfig, variant: str = "default",
                        registers: int = 8,
                        cases: Optional[int] = None) -> List[RunTrace]:
    """One evolve() per seed; the training sample is regenerated per seed."""
    traces = []
    for seed in sorted(seeds):
        dataset = resolve_dataset(problem, seed, cases)
        iset = make_instruction_set(variant, registers, dataset.num_features)
        evaluator = FitnessEvaluator(dataset, iset.config)
        traces.append(evolve(evaluator, iset, evo, seed))
    return traces


def cmd_evolve(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    problem = cfg.get("problem", "nguyen4")
    seeds = parse_seeds(cfg.get("seeds", DEFAULT_SEEDS))
    out = ensure_out_dir(cfg)
    cases = _get_int(cfg, "cases", 0) or None
    registers = _get_int(cfg, "registers", 8)
    variant = cfg.get("variant", "default")
    u_values = sorted(set(parse_int_list(cfg.get("u", "1"), "u list")))
    evo_base = build_evolution_config(cfg)
    tag = _sanitize(cfg.get("tag", Path(problem).stem))
    stamp = provenance_line("evolve", cfg, seeds)

    for u in u_values:
        if u < 1:
            raise InputError("u must be >= 1")
        evo = dataclasses.replace(evo_base, mutation_strength=u)
        traces = []
        for seed in sorted(seeds):
            dataset = resolve_dataset(problem, seed, cases)
            iset = make_instruction_set(variant, registers,
                                        dataset.num_features)
            evaluator = FitnessEvaluator(dataset, iset.config)
            trace = evolve(evaluator, iset, evo, seed)
            trace.write_csv(str(out / f"evolve_{tag}_u{u}_seed{seed}.csv"),
                            stamp)
            traces.append(trace)
        aggregate = out / f"evolve_{tag}_u{u}_aggregate.csv"
        write_aggregate_csv(aggregate, traces, stamp)
        best = np.array([t.best_final_fitness for t in traces])
        sizes = np.array([t.mean_size[-1] for t in traces])
        print(f"evolve {tag} u={u}: {len(traces)} runs, "
              f"best fitness {best.mean():.4g} +/- {best.std():.4g}, "
              f"final mean size {sizes.mean():.4g} -> {aggregate}")
    return EXIT_OK


# -- sample ------------------------------------------------------------------


def sample_size_fitness(evaluator: FitnessEvaluator, iset, sizes: Sequence[int],
                        num_programs: int, seed: int) -> Dict[int, float]:
    """Mean fitness of ``num_programs`` random programs per size."""
    rng = np.random.default_rng(seed)
    means = {}
    for m in sizes:
        values = [evaluator.evaluate(random_program(iset, m, rng))
                  for _ in range(num_programs)]
        means[m] = float(np.mean(values))
    return means


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    problem = cfg.get("problem", "nguyen4")
    seeds = parse_seeds(cfg.get("seeds", DEFAULT_SEEDS))
    out = ensure_out_dir(cfg)
    cases = _get_int(cfg, "cases", 0) or None
    registers = _get_int(cfg, "registers", 8)
    variant = cfg.get("variant", "default")
    sizes = sorted(set(parse_int_list(cfg.get("sizes", "5..50..5"), "sizes")))
    if sizes[0] < 1:
        raise InputError("sizes must be >= 1")
    num_programs = _get_int(cfg, "programs", 1000)
    if num_programs < 1:
        raise InputError("programs must be >= 1")
    tag = _sanitize(cfg.get("tag", Path(problem).stem))

    per_seed = []
    for seed in sorted(seeds):
        dataset = resolve_dataset(problem, seed, cases)
        iset = make_instruction_set(variant, registers, dataset.num_features)
        evaluator = FitnessEvaluator(dataset, iset.config)
        per_seed.append(sample_size_fitness(evaluator, iset, sizes,
                                            num_programs, seed))
    path = out / f"sample_{tag}.csv"
    with open(path, "w", newline="") as fh:
        fh.write(f"# {provenance_line('sample', cfg, seeds)}\n")
        writer = csv.writer(fh)
        writer.writerow(["m", "mean_rse", "std_rse"])
        for m in sizes:
            col = np.array([row[m] for row in per_seed])
            writer.writerow([m, f"{col.mean():.10g}", f"{col.std():.10g}"])
    print(f"sample {tag}: {len(sizes)} sizes x {len(seeds)} seeds "
          f"x {num_programs} programs -> {path}")
    return EXIT_OK


# -- grid --------------------------------------------------------------------


def _space_profile_from(cfg: Mapping[str, str]) -> SpaceProfile:
    registers = _get_int(cfg, "registers", 8)
    outputs = _get_int(cfg, "outputs", 1)
    features = _get_int(cfg, "features", 1)
    optimal = _get_int(cfg, "optimal_size", 11)
    set_size = _get_int(cfg, "set_size", 0)
    if not set_size:
        funcs = tuple(f.strip() for f in
                      cfg.get("functions", ",".join(DEFAULT_FUNCTIONS)).split(",")
                      if f.strip())
        config = RegisterConfig(num_registers=registers, num_features=features,
                                output_registers=tuple(range(outputs)))
        try:
            base = build_instruction_set(config, funcs)
            variant = cfg.get("variant", "default")
            set_size = len(build_variant(variant, base))
        except ValueError as exc:
            raise InputError(str(exc))
    try:
        return SpaceProfile(registers, outputs, set_size, optimal_size=optimal)
    except ValueError as exc:
        raise InputError(str(exc))


def cmd_grid(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    out = ensure_out_dir(cfg)
    profile = _space_profile_from(cfg)
    steps = sorted(set(parse_int_list(cfg.get("u", "1..35"), "u range")))
    distances = sorted(set(parse_int_list(cfg.get("d", "1..10"), "d range")))
    sizes = sorted(set(parse_int_list(cfg.get("m", "1..100"), "m range")))
    epsilon = _get_float(cfg, "epsilon", 1e-4)
    form = cfg.get("form", "truncated")
    if form not in ("truncated", "raw"):
        raise InputError("form must be 'truncated' or 'raw'")
    with_hitting = _get_bool(cfg, "hitting", True)
    tag = _sanitize(cfg.get("tag", "grid"))

    points = compute_rate_grid(profile, steps, distances, sizes,
                               epsilon=epsilon, truncated=(form == "truncated"),
                               with_hitting=with_hitting)
    path = out / f"grid_{tag}.csv"
    write_grid_csv(points, str(path), provenance_line("grid", cfg, ()))
    capped = sum(p.truncated for p in points)
    unreached = sum(p.hitting_time is None for p in points)
    print(f"grid {tag}: {len(points)} cells ({form} form), "
          f"{capped} with capped addition terms, "
          f"{unreached} cells never reach epsilon -> {path}")
    return EXIT_OK


# -- study -------------------------------------------------------------------


def rank_sum_pvalue(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided rank-sum test; exact distribution up to 25 per group."""
    method = "exact" if max(len(a), len(b)) <= 25 else "asymptotic"
    result = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                      method=method)
    return float(result.pvalue)


def test_rse_scores(problem: str, variant: str, seeds: Sequence[int],
                    evo: EvolutionConfig, registers: int = 8,
                    cases: Optional[int] = None) -> List[float]:
    """Evolve per seed on a fresh training sample and score the best
    program on an independently regenerated test sample."""
    scores = []
    for seed in sorted(seeds):
        train = generate_benchmark(problem, seed, cases)
        iset = make_instruction_set(variant, registers, train.num_features)
        evaluator = FitnessEvaluator(train, iset.config)
        trace = evolve(evaluator, iset, evo, seed)
        test = generate_test_split(problem, seed, cases)
        tester = FitnessEvaluator(test, iset.config)
        scores.append(tester.evaluate(trace.best_program))
    return scores


def cmd_study(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    problems = [p.strip() for p in
                cfg.get("problems",
                        "nguyen4,nguyen5,nguyen7,keijzer11").split(",")
                if p.strip()]
    if getattr(args, "problem", None):
        problems = [args.problem]
    for problem in problems:
        if problem not in BENCHMARKS:
            raise InputError(
                f"study needs named benchmarks (got {problem!r}); "
                f"known: {', '.join(sorted(BENCHMARKS))}")
    variants = [v.strip() for v in
                cfg.get("variants", "default,fx2,fx4").split(",") if v.strip()]
    if getattr(args, "variant", None):
        variants = ["default", args.variant] if args.variant != "default" \
            else ["default"]
    for variant in variants:
        if variant not in VARIANT_NAMES:
            raise InputError(f"unknown variant {variant!r}; "
                             f"known: {', '.join(VARIANT_NAMES)}")
    if "default" not in variants:
        raise InputError("the variant list must include 'default' "
                         "(the rank-sum baseline)")
    seeds = parse_seeds(cfg.get("seeds", DEFAULT_SEEDS))
    out = ensure_out_dir(cfg)
    cases = _get_int(cfg, "cases", 0) or None
    registers = _get_int(cfg, "registers", 8)
    u = _get_int(cfg, "u", 1)
    evo = dataclasses.replace(build_evolution_config(cfg),
                              mutation_strength=u)
    tag = _sanitize(cfg.get("tag", "study"))
    stamp = provenance_line("study", cfg, seeds)

    scores: Dict[str, Dict[str, List[float]]] = {}
    for problem in problems:
        scores[problem] = {}
        for variant in variants:
            scores[problem][variant] = test_rse_scores(
                problem, variant, seeds, evo, registers, cases)

    means = {p: {v: float(np.mean(scores[p][v])) for v in variants}
             for p in problems}
    rank_matrix = np.array(
        [scipy_stats.rankdata([means[p][v] for v in variants])
         for p in problems])
    mean_ranks = dict(zip(variants, rank_matrix.mean(axis=0)))

    path = out / f"study_{tag}.csv"
    with open(path, "w", newline="") as fh:
        fh.write(f"# {stamp}\n")
        writer = csv.writer(fh)
        writer.writerow(["problem", "variant", "mean_rse", "std_rse",
                         "p_vs_default", "significant"])
        for problem in problems:
            base = scores[problem]["default"]
            for variant in variants:
                values = scores[problem][variant]
                if variant == "default":
                    p_text, sig = "", ""
                else:
                    p = rank_sum_pvalue(values, base)
                    p_text, sig = f"{p:.10g}", str(int(p < 0.05))
                writer.writerow([problem, variant,
                                 f"{np.mean(values):.10g}",
                                 f"{np.std(values):.10g}", p_text, sig])
    ranks_path = out / f"study_{tag}_ranks.csv"
    with open(ranks_path, "w", newline="") as fh:
        fh.write(f"# {stamp}\n")
        writer = csv.writer(fh)
        writer.writerow(["variant", "mean_rank"])
        for variant in variants:
            writer.writerow([variant, f"{mean_ranks[variant]:.10g}"])

    width = max(len(v) for v in variants)
    for problem in problems:
        parts = [f"{v}:{means[problem][v]:.4g}" for v in variants]
        print(f"study {problem}: " + "  ".join(parts))
    print("mean ranks: " + "  ".join(
        f"{v:<{width}} {mean_ranks[v]:.3g}" for v in variants))
    if len(problems) >= 3 and len(variants) >= 3:
        stat, p = scipy_stats.friedmanchisquare(
            *[[means[p][v] for p in problems] for v in variants])
        print(f"friedman (informational): chi2={stat:.4g} p={p:.4g}")
    print(f"-> {path}, {ranks_path}")
    return EXIT_OK


# -- oracle ------------------------------------------------------------------


def _custom_recipe(cfg: Mapping[str, str]) -> Optional[SpaceRecipe]:
    if "space_registers" not in cfg and "space_functions" not in cfg:
        return None
    registers = _get_int(cfg, "space_registers", 2)
    outputs = _get_int(cfg, "space_outputs", 1)
    funcs = tuple(f.strip() for f in
                  cfg.get("space_functions", "add").split(",") if f.strip())
    max_size = _get_int(cfg, "space_max_size", 3)
    target = cfg.get("space_target", "double")
    name = _sanitize(cfg.get("space_name", "custom"))
    config = RegisterConfig(num_registers=registers, num_features=1,
                            output_registers=tuple(range(outputs)))
    members = tuple((i.dest, i.op, i.src1, i.src2)
                    for i in build_instruction_set(config, funcs).members)
    return SpaceRecipe(name, registers, outputs, members, max_size, target,
                       (CHECK_EXPECTATION, CHECK_BLOAT_CELLS))


def run_space_checks(space: TinySpace, recipe: SpaceRecipe,
                     bucket_width: float, similarity_tolerance: float,
                     halve_control: bool,
                     lines: List[str], rows: List[List[str]]) -> int:
    """All verifications one tiny space supports; returns the failure count."""
    failures = 0
    optimal = space.find_optimal_programs()
    if not optimal:
        raise InputError(f"space {space.name!r} has no optimal programs "
                         "for its target")
    m_star = min(len(p) for p in optimal)
    distances = space.distance_map(optimal)
    tolerance = Fraction(similarity_tolerance).limit_denominator(10**6)

    window = verify_distance_window(space, optimal)
    ok = window.passed
    failures += not ok
    lines.append(f"[{space.name}] distance window: {window.checked} programs, "
                 f"{window.violations} violations, "
                 f"{window.dual_mismatches} recount mismatches")
    rows.append([space.name, "distance-window", "pass" if ok else "FAIL",
                 f"checked={window.checked}"])

    stats = layer_statistics(space, distances)

    for m in stats.layers[:-1]:
        for d in range(0, min(m_star + 1, 3)):
            sim = verify_probability_similarity(stats, d, m, tolerance)
            lines.append(f"[{space.name}] layer share m={m} d={d}: "
                         f"|{float(sim.probability_low):.4f} - "
                         f"{float(sim.probability_high):.4f}| = "
                         f"{float(sim.difference):.4f} "
                         f"({'<=' if sim.within else '>'} "
                         f"{similarity_tolerance:g}, informational)")

    if CHECK_EXPECTATION in recipe.checks:
        growth = verify_expectation_growth(stats)
        ok = growth.strictly_increasing
        failures += not ok
        expect_text = ", ".join(f"{m}:{float(e):.4f}"
                                for m, e in sorted(growth.expectations.items()))
        lines.append(f"[{space.name}] expected distance by size: "
                     f"{expect_text} "
                     f"({'strictly increasing' if ok else 'NOT increasing'})")
        rows.append([space.name, "expectation-growth",
                     "pass" if ok else "FAIL", expect_text])

    if CHECK_BLOAT_CELLS in recipe.checks:
        bad = []
        cells = 0
        for m in range(1, space.max_size):
            for d_m in range(0, m_star + 1):
                cell = verify_bloat_expectation(stats, m, d_m)
                cells += 1
                if not cell.add_not_worse:
                    bad.append((m, d_m))
        ok = not bad
        failures += not ok
        lines.append(f"[{space.name}] slack expectation cells: {cells} checked"
                     + ("" if ok else f", violations at {bad}"))
        rows.append([space.name, "bloat-cells", "pass" if ok else "FAIL",
                     f"cells={cells}"])

    bucket_violations = 0
    bucket_rows = 0
    for d in range(0, space.max_size + m_star):
        report = verify_fitness_buckets(space, distances, d, bucket_width)
        bucket_violations += report.implication_violations
        bucket_rows += len(report.rows)
    ok = bucket_violations == 0
    failures += not ok
    lines.append(f"[{space.name}] fitness buckets (width {bucket_width:g}): "
                 f"{bucket_rows} rows, {bucket_violations} implication "
                 f"violations")
    rows.append([space.name, "fitness-buckets", "pass" if ok else "FAIL",
                 f"rows={bucket_rows}"])

    if CHECK_CERTIFICATION in recipe.checks:
        constants = exact_stretch_constants(space, optimal)
        if halve_control:
            constants = dataclasses.replace(
                constants, fitness_scale=constants.fitness_scale / 2.0,
                exact=False)
        certificate = certify_fitness_gap(space, optimal, constants=constants)
        if halve_control:
            ok = False  # deliberately broken constants must not pass
            failures += 1
            lines.append(f"[{space.name}] gap certification with halved "
                         f"scale: {certificate.violations} violations in "
                         f"{certificate.pairs_checked} pairs (expected "
                         "nonzero; negative control)")
            rows.append([space.name, "gap-certification-control", "FAIL",
                         f"violations={certificate.violations}"])
        else:
            ok = certificate.passed
            failures += not ok
            lines.append(f"[{space.name}] gap certification: "
                         f"{certificate.pairs_checked} pairs, "
                         f"{certificate.violations} violations, control "
                         f"violations {certificate.control_violations}, "
                         f"worst ratio {certificate.worst_ratio:.4f}")
            rows.append([space.name, "gap-certification",
                         "pass" if ok else "FAIL",
                         f"pairs={certificate.pairs_checked}"])
    return failures


def cmd_oracle(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    out = ensure_out_dir(cfg)
    bucket_width = _get_float(cfg, "bucket_width", 0.05)
    similarity_tolerance = _get_float(cfg, "similarity_tolerance", 0.1)
    with_sandwiches = _get_bool(cfg, "sandwiches", True)
    stamp = provenance_line("oracle", cfg, ())

    recipes = list(BUNDLED_SPACES)
    wanted = cfg.get("spaces") or getattr(args, "space", None)
    if wanted:
        names = [w.strip() for w in wanted.split(",") if w.strip()]
        by_name = {r.name: r for r in BUNDLED_SPACES}
        missing = [n for n in names if n not in by_name]
        if missing:
            raise InputError(f"unknown space(s): {', '.join(missing)}; "
                             f"bundled: {', '.join(sorted(by_name))}")
        recipes = [by_name[n] for n in names]
    custom = _custom_recipe(cfg)
    if custom is not None:
        recipes.append(custom)

    lines: List[str] = []
    rows: List[List[str]] = []
    failures = 0
    for recipe in recipes:
        try:
            space = build_tiny_space(recipe)
        except ValueError as exc:
            raise InputError(f"cannot enumerate {recipe.name!r}: {exc}")
        failures += run_space_checks(space, recipe, bucket_width,
                                     similarity_tolerance,
                                     args.halve_control, lines, rows)
        stats = layer_statistics(
            space, space.distance_map(space.find_optimal_programs()))
        stats.write_csv(str(out / f"layers_{recipe.name}.csv"), stamp)

    if with_sandwiches:
        for report in run_growth_sandwiches():
            ok = report.passed
            failures += not ok
            lines.append(
                f"[{report.name}] padding factors {report.size_from}->"
                f"{report.size_to}: introns {float(report.intron_exact):.4g} "
                f"in ({float(report.intron_bounds.lower):.4g}, "
                f"{float(report.intron_bounds.upper):.4g}); exons "
                f"{float(report.exon_exact):.4g} in "
                f"({float(report.exon_bounds.lower):.4g}, "
                f"{float(report.exon_bounds.upper):.4g}) "
                f"[{'pass' if ok else 'FAIL'}]")
            rows.append([report.name,
                         f"growth-sandwich-{report.size_from}-{report.size_to}",
                         "pass" if ok else "FAIL",
                         f"intron={float(report.intron_exact):.6g},"
                         f"exon={float(report.exon_exact):.6g}"])

    for line in lines:
        print(line)
    checks_path = out / "oracle_checks.csv"
    with open(checks_path, "w", newline="") as fh:
        fh.write(f"# {stamp}\n")
        writer = csv.writer(fh)
        writer.writerow(["space", "check", "status", "detail"])
        writer.writerows(rows)
    report_path = out / "oracle_report.txt"
    report_path.write_text("\n".join([f"# {stamp}"] + lines) + "\n")
    verdict = "all checks passed" if failures == 0 \
        else f"{failures} check(s) failed"
    print(f"oracle: {verdict} -> {report_path}, {checks_path}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


# -- bounds ------------------------------------------------------------------


def cmd_bounds(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    profile = _space_profile_from(cfg)
    size = _get_int(cfg, "size", 10)
    distance = _get_int(cfg, "distance", profile.optimal_size)
    u = _get_int(cfg, "u", 1)
    moves = _get_int(cfg, "moves", u)
    grow_to = _get_int(cfg, "grow_to", size + 1)
    epsilon = _get_float(cfg, "epsilon", 1e-4)
    truncated = cfg.get("form", "truncated") != "raw"
    if size < 0 or u < 1 or moves < 0:
        raise InputError("need size >= 0, u >= 1, moves >= 0")

    print(f"profile: registers={profile.num_registers} "
          f"outputs={profile.num_outputs} set_size={profile.set_size} "
          f"optimal_size={profile.optimal_size}")
    lo, hi = edit_distance_bounds(size, profile)
    print(f"distance window at size {size}: [{lo}, {hi}]")
    window = reachable_size_bounds(size, moves, profile)
    if window.feasible:
        print(f"sizes reachable in {moves} moves: "
              f"[{window.lower:g}, {window.upper:g}]")
    else:
        print(f"sizes reachable in {moves} moves: none (infeasible)")
    if grow_to >= size:
        intron = intron_growth_bounds(profile, size, grow_to, log_scale=True)
        exon = exon_growth_bounds(profile, size, grow_to, log_scale=True)
        print(f"log intron padding factor {size}->{grow_to}: "
              f"({intron.lower:.6g}, {intron.upper:.6g})")
        print(f"log exon padding factor {size}->{grow_to}: "
              f"({exon.lower:.6g}, {exon.upper:.6g})")
    if distance >= 0:
        rate = constructive_rate_bound(profile, distance, size, u,
                                       truncated=truncated)
        print(f"rate bound at (u={u}, d={distance}, m={size}): "
              f"{rate.value:.10g}"
              + (" (addition terms capped)" if rate.used_truncation else ""))
        hit = min_hitting_time(profile, distance, size, u, epsilon=epsilon,
                               truncated=truncated)
        print(f"hitting-time estimate to {epsilon:g}: "
              + ("unreached" if hit is None else str(hit)))
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgpspace",
        description="Linear genetic programming experiments and "
                    "search-space bound checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str,
            flags: Sequence[str]) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", metavar="FILE",
                         help="key=value configuration file")
        if "seed" in flags:
            cmd.add_argument("--seed", type=int,
                             help="run a single seed (overrides the list)")
        if "out" in flags:
            cmd.add_argument("--out", help="output directory (default: runs)")
        if "problem" in flags:
            cmd.add_argument("--problem",
                             help="benchmark name or dataset CSV path")
        if "u" in flags:
            cmd.add_argument("--u", type=int,
                             help="variation step size override")
        if "variant" in flags:
            cmd.add_argument("--variant",
                             help="instruction-set variant "
                                  f"({', '.join(VARIANT_NAMES)})")
        cmd.set_defaults(handler=handler)
        return cmd

    add("evolve", cmd_evolve,
        "run seeded evolutionary searches and write trace CSVs",
        ("seed", "out", "problem", "u", "variant"))
    add("sample", cmd_sample,
        "mean fitness of random programs per program size",
        ("seed", "out", "problem", "variant"))
    add("grid", cmd_grid,
        "rate-bound and hitting-time sweep over (u, d, m)",
        ("out", "u"))
    add("study", cmd_study,
        "compare instruction-set variants on test error",
        ("seed", "out", "problem", "u", "variant"))
    oracle = add("oracle", cmd_oracle,
                 "exhaustive tiny-space verification suite",
                 ("out",))
    oracle.add_argument("--space",
                        help="comma-separated bundled space names "
                             "(default: all)")
    oracle.add_argument("--halve-control", action="store_true",
                        help="halve the fitness-scale constant; the gap "
                             "check must then fail (negative control)")
    add("bounds", cmd_bounds,
        "one-shot bound calculator for a space profile",
        ("u",))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
