"""Benchmark problems and fitness evaluation.

Synthetic regression benchmarks are sampled fresh from their canonical domain
for a given seed; a test set is just the same benchmark regenerated with a
different seed.  Fitness is the relative squared error (RSE) of the output
register against the targets, so 1.0 is the level of the mean predictor and
0.0 is exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import (Program, RegisterConfig, Semantics, execute,
                   initial_semantics, intron_mask)

TEST_SEED_OFFSET = 104729  # arbitrary fixed prime; keeps test resamples disjoint


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray  # (cases, num_features)
    targets: np.ndarray   # (cases,)

    def __post_init__(self):
        if self.features.ndim != 2:
            raise ValueError("features must be 2-D (cases, features)")
        if self.targets.shape != (self.features.shape[0],):
            raise ValueError("targets must align with feature rows")
        if self.features.shape[0] < 2:
            raise ValueError("need at least two cases")
        if float(np.var(self.targets)) <= 0.0:
            raise ValueError("target variance must be positive")

    @property
    def num_cases(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]


def _nguyen4(x):
    return x**6 + x**5 + x**4 + x**3 + x**2 + x


def _nguyen5(x):
    return np.sin(x**2) * np.cos(x) - 1.0


def _nguyen7(x):
    return np.log(x + 1.0) + np.log(x**2 + 1.0)


def _keijzer11(x, y):
    return x * y + np.sin((x - 1.0) * (y - 1.0))


def _r1(x):
    return (x + 1.0) ** 3 / (x**2 - x + 1.0)


# name -> (callable, #features, default cases, (low, high) sample box)
BENCHMARKS = {
    "nguyen4": (_nguyen4, 1, 20, (-1.0, 1.0)),
    "nguyen5": (_nguyen5, 1, 20, (-1.0, 1.0)),
    "nguyen7": (_nguyen7, 1, 20, (0.0, 2.0)),
    "keijzer11": (_keijzer11, 2, 100, (-3.0, 3.0)),
    "r1": (_r1, 1, 20, (-1.0, 1.0)),
}


def generate_benchmark(name: str, seed: int, n_cases: int | None = None) -> Dataset:
    """Sample a benchmark uniformly from its canonical box."""
    try:
        fn, nfeat, default_cases, (lo, hi) = BENCHMARKS[name]
    except KeyError:
        raise ValueError(
            f"unknown benchmark {name!r}; known: {', '.join(sorted(BENCHMARKS))}")
    cases = default_cases if n_cases is None else int(n_cases)
    rng = np.random.default_rng(seed)
    feats = rng.uniform(lo, hi, size=(cases, nfeat))
    targets = fn(*(feats[:, j] for j in range(nfeat)))
    return Dataset(name, feats, np.asarray(targets, dtype=float))


def generate_test_split(name: str, seed: int, n_cases: int | None = None) -> Dataset:
    """Independent resample of the same benchmark (distinct derived seed)."""
    return generate_benchmark(name, seed + TEST_SEED_OFFSET, n_cases)


def load_dataset_csv(path: str, name: str | None = None) -> Dataset:
    """Read a headered CSV whose last column is the target."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file")
        if len(header) < 2:
            raise ValueError(f"{path}: need at least one feature and a target column")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.asarray(rows)
    return Dataset(name or path, data[:, :-1], data[:, -1])


def relative_squared_error(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Sum of squared residuals over the sum of squares around the target mean."""
    targets = np.asarray(targets, dtype=float)
    denom = float(np.sum((targets - targets.mean()) ** 2))
    if denom <= 0.0:
        raise ValueError("target variance must be positive")
    return float(np.sum((np.asarray(predictions) - targets) ** 2) / denom)


class FitnessEvaluator:
    """RSE fitness of programs on one dataset, minimization.

    Precomputes the initial semantics and the denominator; evaluation runs the
    structurally effective instructions only, which is output-identical and
    much cheaper on bloated programs.
    """

    def __init__(self, dataset: Dataset, config: RegisterConfig):
        if dataset.num_features != config.num_features:
            raise ValueError("dataset feature count does not match register config")
        self.dataset = dataset
        self.config = config
        self.start = initial_semantics(config, dataset.features)
        self._denom = float(np.sum(
            (dataset.targets - dataset.targets.mean()) ** 2))
        if self._denom <= 0.0:
            raise ValueError("target variance must be positive")

    def predictions(self, program: Program) -> np.ndarray:
        sem = execute(program, self.start, self.config, skip_introns=True)
        return sem.output(self.config)

    def evaluate(self, program: Program) -> float:
        pred = self.predictions(program)
        return float(np.sum((pred - self.dataset.targets) ** 2) / self._denom)

    def evaluate_with_exons(self, program: Program) -> Tuple[float, int]:
        """Fitness plus the effective instruction count, sharing one liveness pass."""
        mask = intron_mask(program, self.config)
        live = tuple(ins for ins, dead in zip(program, mask) if not dead)
        sem = execute(live, self.start, self.config)
        pred = sem.output(self.config)
        fit = float(np.sum((pred - self.dataset.targets) ** 2) / self._denom)
        return fit, len(live)

    def fitness_of_semantics(self, sem: Semantics) -> float:
        pred = sem.output(self.config)
        return float(np.sum((pred - self.dataset.targets) ** 2) / self._denom)
