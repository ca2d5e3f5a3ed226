"""Linear genetic programming with an exactly checkable search-space model.

The package has two halves.  The engine half (``core``, ``instrset``,
``problems``, ``evolution``) runs register-machine programs and evolves them
on regression benchmarks with add/remove mutation only.  The analysis half
(``bounds``, ``exhaustive``) derives closed-form bounds on how the space of
programs behaves — reachable distances and sizes, intron/exon padding
growth, per-move improvement rates, fitness gaps — and verifies them
against exhaustive enumeration of tiny instruction spaces.  ``cli`` ties
both together into reproducible, CSV-emitting experiments.
"""

from .bounds import (BoundInterval, GridPoint, RateBound, SizeWindow,
                     SpaceProfile, StretchConstants,
                     addition_duplication_bounds, compute_rate_grid,
                     constructive_rate_bound, edit_distance_bounds,
                     estimate_stretch_constants, exon_growth_bounds,
                     fitness_gap_bound, improving_addition_count,
                     improving_removal_count, intron_growth_bounds,
                     min_hitting_time, reachable_size_bounds,
                     removal_duplication_bounds, scan_stretch_constants,
                     write_grid_csv)
from .core import (DEFAULT_FUNCTIONS, Instruction, Program, RegisterConfig,
                   Semantics, apply_function, count_exons, execute,
                   execute_prefixes, effective_register_slots,
                   initial_semantics, intron_choice_count, intron_mask,
                   parse_instruction, program_from_text, program_to_text,
                   semantic_distance, transform_values)
from .evolution import (EvolutionConfig, RunTrace, evolve, mutate_add,
                        mutate_remove, random_program)
from .exhaustive import (BUNDLED_SPACES, GROWTH_CONFIGS, GapCertificate,
                         GrowthRecipe, LayerStats, SandwichReport,
                         SpaceRecipe, TinySpace, build_growth_space,
                         build_tiny_space, certify_fitness_gap,
                         exact_growth_factors, exact_stretch_constants,
                         layer_statistics, run_growth_sandwiches,
                         verify_bloat_expectation, verify_distance_window,
                         verify_expectation_growth, verify_fitness_buckets,
                         verify_growth_sandwich,
                         verify_probability_similarity)
from .instrset import (VARIANT_NAMES, InstructionSet, build_instruction_set,
                       build_variant)
from .problems import (BENCHMARKS, Dataset, FitnessEvaluator,
                       generate_benchmark, generate_test_split,
                       load_dataset_csv, relative_squared_error)

__version__ = "0.1.0"
