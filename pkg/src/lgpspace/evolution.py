"""Mutation-only evolutionary loop over linear programs.

Generational scheme: elitism plus tournament selection, with three variation
events — insert ``u`` random instructions, delete ``u`` random instructions,
or copy the parent unchanged.  There is no crossover and no operand-level
micro mutation; all structural change happens through whole-instruction
insertion and deletion drawn uniformly from the instruction set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import Program
from .instrset import InstructionSet
from .problems import FitnessEvaluator


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 256
    generations: int = 200
    tournament_size: int = 7
    elitism: int = 3
    p_add: float = 0.45
    p_remove: float = 0.45
    p_reproduce: float = 0.10
    mutation_strength: int = 1   # instructions touched per variation event
    init_min_len: int = 5
    init_max_len: int = 20
    max_len: int = 100

    def __post_init__(self):
        if self.population_size < 1 or self.generations < 0:
            raise ValueError("population_size >= 1 and generations >= 0 required")
        if not (0 < self.tournament_size <= self.population_size):
            raise ValueError("tournament_size must be in [1, population_size]")
        if not (0 <= self.elitism <= self.population_size):
            raise ValueError("elitism must be in [0, population_size]")
        total = self.p_add + self.p_remove + self.p_reproduce
        if abs(total - 1.0) > 1e-9:
            raise ValueError("event probabilities must sum to 1")
        if self.mutation_strength < 1:
            raise ValueError("mutation_strength must be >= 1")
        if not (1 <= self.init_min_len <= self.init_max_len <= self.max_len):
            raise ValueError("need 1 <= init_min_len <= init_max_len <= max_len")


@dataclass
class RunTrace:
    """Per-generation statistics plus the best individual seen in the run."""

    generations: List[int] = field(default_factory=list)
    best_fitness: List[float] = field(default_factory=list)
    mean_fitness: List[float] = field(default_factory=list)
    mean_size: List[float] = field(default_factory=list)
    mean_exons: List[float] = field(default_factory=list)
    best_program: Optional[Program] = None
    best_final_fitness: float = float("inf")

    def append(self, gen: int, best: float, mean_fit: float,
               mean_size: float, mean_exons: float) -> None:
        self.generations.append(gen)
        self.best_fitness.append(best)
        self.mean_fitness.append(mean_fit)
        self.mean_size.append(mean_size)
        self.mean_exons.append(mean_exons)

    def write_csv(self, path: str, header_comment: str = "") -> None:
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(
                ["generation", "best_fitness", "mean_fitness",
                 "mean_size", "mean_exons"])
            for row in zip(self.generations, self.best_fitness,
                           self.mean_fitness, self.mean_size, self.mean_exons):
                writer.writerow([row[0]] + [f"{v:.10g}" for v in row[1:]])


def random_program(iset: InstructionSet, length: int,
                   rng: np.random.Generator) -> Program:
    picks = rng.integers(0, len(iset), size=length)
    return tuple(iset[int(i)] for i in picks)


def mutate_add(program: Program, iset: InstructionSet, u: int,
               max_len: int, rng: np.random.Generator) -> Program:
    """Insert up to ``u`` random instructions, each at a uniform position."""
    prog = list(program)
    budget = min(u, max_len - len(prog))
    for _ in range(budget):
        pos = int(rng.integers(0, len(prog) + 1))
        prog.insert(pos, iset[int(rng.integers(0, len(iset)))])
    return tuple(prog)


def mutate_remove(program: Program, u: int, rng: np.random.Generator) -> Program:
    """Delete ``u`` distinct instructions at uniform positions.

    A removal that would empty the program keeps one uniformly chosen
    instruction instead, so variation never manufactures empty individuals.
    """
    if u >= len(program) > 0:
        keep = int(rng.integers(0, len(program)))
        return (program[keep],)
    if not program:
        return ()
    drop = rng.choice(len(program), size=u, replace=False)
    prog = list(program)
    for pos in sorted((int(p) for p in drop), reverse=True):
        del prog[pos]
    return tuple(prog)


def _tournament(fitness: np.ndarray, k: int, rng: np.random.Generator) -> int:
    entrants = rng.integers(0, len(fitness), size=k)
    return int(entrants[np.argmin(fitness[entrants])])


def evolve(evaluator: FitnessEvaluator, iset: InstructionSet,
           config: EvolutionConfig = EvolutionConfig(),
           seed: int = 0) -> RunTrace:
    """Run one evolutionary search and return its trace.

    Fitness is minimized.  The trace has ``generations + 1`` rows: the
    initial population and one row per completed generation.
    """
    rng = np.random.default_rng(seed)
    u = config.mutation_strength

    population: List[Program] = [
        random_program(
            iset,
            int(rng.integers(config.init_min_len, config.init_max_len + 1)),
            rng)
        for _ in range(config.population_size)
    ]

    trace = RunTrace()

    def score(pop: Sequence[Program]) -> Tuple[np.ndarray, np.ndarray]:
        fits = np.empty(len(pop))
        exons = np.empty(len(pop))
        for i, prog in enumerate(pop):
            fits[i], exons[i] = evaluator.evaluate_with_exons(prog)
        return fits, exons

    fitness, exon_counts = score(population)

    def record(gen: int) -> None:
        best_idx = int(np.argmin(fitness))
        trace.append(gen, float(fitness[best_idx]), float(fitness.mean()),
                     float(np.mean([len(p) for p in population])),
                     float(exon_counts.mean()))
        if fitness[best_idx] < trace.best_final_fitness:
            trace.best_final_fitness = float(fitness[best_idx])
            trace.best_program = population[best_idx]

    record(0)

    for gen in range(1, config.generations + 1):
        order = np.argsort(fitness, kind="stable")
        next_pop: List[Program] = [population[int(i)]
                                   for i in order[:config.elitism]]
        while len(next_pop) < config.population_size:
            parent = population[_tournament(fitness, config.tournament_size, rng)]
            roll = rng.random()
            if roll < config.p_add:
                child = mutate_add(parent, iset, u, config.max_len, rng)
            elif roll < config.p_add + config.p_remove:
                child = mutate_remove(parent, u, rng)
            else:
                child = parent
            next_pop.append(child)
        population = next_pop
        fitness, exon_counts = score(population)
        record(gen)

    return trace
