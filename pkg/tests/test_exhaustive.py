"""Exhaustive tiny-space oracle: enumeration, exact censuses, verifiers.

Frozen numbers (layer counts, expectations, growth factors) were worked out
by hand for the smallest spaces; larger spaces pin values produced by an
earlier standalone prototype so regressions cannot pass silently.
"""

from fractions import Fraction

import numpy as np
import pytest

from lgpspace.core import (Instruction, RegisterConfig, execute,
                           initial_semantics)
from lgpspace.exhaustive import (BUNDLED_SPACES, CHECK_BLOAT_CELLS,
                                 CHECK_CERTIFICATION, CHECK_DISTANCE,
                                 CHECK_EXPECTATION, GROWTH_CONFIGS,
                                 MAX_TINY_DEPTH, MAX_TINY_SET, LayerStats,
                                 SpaceRecipe, TinySpace, build_growth_space,
                                 build_tiny_space, certify_fitness_gap,
                                 exact_growth_factors,
                                 exact_stretch_constants, layer_statistics,
                                 run_growth_sandwiches,
                                 verify_bloat_expectation,
                                 verify_distance_window,
                                 verify_expectation_growth,
                                 verify_fitness_buckets, verify_growth_sandwich,
                                 verify_probability_similarity)
from lgpspace.instrset import DEFAULT_FUNCTIONS, InstructionSet, \
    build_instruction_set

RECIPES = {r.name: r for r in BUNDLED_SPACES}


@pytest.fixture(scope="module")
def pair_scale():
    space = build_tiny_space(RECIPES["pair-scale"])
    optimal = space.find_optimal_programs()
    distances = space.distance_map(optimal)
    return space, optimal, distances, layer_statistics(space, distances)


@pytest.fixture(scope="module")
def quad_mix():
    space = build_tiny_space(RECIPES["quad-mix"])
    optimal = space.find_optimal_programs()
    distances = space.distance_map(optimal)
    return space, optimal, distances, layer_statistics(space, distances)


# -- construction guards -----------------------------------------------------


def test_census_guard_fires_before_member_count():
    config = RegisterConfig(num_registers=3, num_features=1)
    iset = build_instruction_set(config, DEFAULT_FUNCTIONS)
    with pytest.raises(ValueError, match="enumeration would visit"):
        TinySpace(iset, 5)


def test_member_count_guard():
    config = RegisterConfig(num_registers=2, num_features=1)
    iset = build_instruction_set(config, ("add",))  # 18 members
    with pytest.raises(ValueError, match="<= 12 instructions"):
        TinySpace(iset, 1)


def test_depth_guards():
    space = build_tiny_space(RECIPES["pair-scale"])
    with pytest.raises(ValueError, match=r"\[1, 5\]"):
        TinySpace(space.iset, MAX_TINY_DEPTH + 1)
    with pytest.raises(ValueError, match=">= 1"):
        TinySpace(space.iset, 0)


def test_probe_data_is_required_for_behavior():
    space = build_growth_space(GROWTH_CONFIGS[0])  # built without probes
    with pytest.raises(ValueError, match="no probe data"):
        space.output_table()
    with pytest.raises(ValueError, match="no probe data"):
        space.find_optimal_programs()


# -- enumeration bookkeeping -------------------------------------------------


def test_layer_sizes_and_totals(pair_scale):
    space = pair_scale[0]
    assert space.set_size == 2
    assert space.total_programs == 63  # 1 + 2 + 4 + 8 + 16 + 32
    assert len(space.layer(3)) == 8
    assert len(space.all_programs()) == 63
    assert space.materialize((0, 1)) == (space.iset[0], space.iset[1])


def test_output_table_matches_direct_execution(pair_scale):
    space = pair_scale[0]
    table = space.output_table()
    start = initial_semantics(space.config, space.features)
    for m in range(3):
        for prog in space.layer(m):
            direct = execute(space.materialize(prog), start, space.config)
            np.testing.assert_array_equal(table[prog],
                                          direct.output(space.config))


def test_optimal_set_is_the_single_doubler(pair_scale):
    space, optimal = pair_scale[:2]
    assert optimal == [(0,)]
    assert space.iset[0].op == "add"


# -- exact distances ---------------------------------------------------------


def test_distance_census_frozen_layers(pair_scale):
    _, _, distances, stats = pair_scale
    assert stats.counts[1] == {0: 1, 2: 1}
    assert stats.counts[2] == {1: 3, 3: 1}
    assert distances[()] == 1  # one insertion reaches the optimum


def test_subsequence_recount_hand_case(pair_scale):
    space, optimal = pair_scale[:2]
    recount = space.distance_recount(optimal)
    assert recount[(1, 1)] == 3  # no common subsequence with (0,)
    assert recount[()] == 1


def test_window_verification_is_clean_everywhere():
    for recipe in BUNDLED_SPACES:
        space = build_tiny_space(recipe)
        report = verify_distance_window(space, space.find_optimal_programs())
        assert report.passed, recipe.name
        assert report.checked == space.total_programs


def test_window_rejects_trivially_optimal_spaces():
    """If the empty program already hits the target, sizes have no floor."""
    recipe = SpaceRecipe("identity", 1, 1, ((0, "add", 0, 0),), 2, "double")
    space = build_tiny_space(recipe)
    space.targets = space.features[:, 0].copy()  # output of ()
    with pytest.raises(ValueError, match="empty program"):
        verify_distance_window(space, space.find_optimal_programs())


def test_distance_map_requires_an_optimum(pair_scale):
    space = pair_scale[0]
    with pytest.raises(ValueError):
        space.distance_map([])
    with pytest.raises(ValueError):
        space.distance_recount([])


# -- layer statistics --------------------------------------------------------


def test_census_must_sum_to_layer_size():
    with pytest.raises(ValueError, match="does not sum"):
        LayerStats(2, {1: {0: 1}})


def test_expected_distances_frozen(pair_scale):
    stats = pair_scale[3]
    expected = {1: Fraction(1), 2: Fraction(3, 2), 3: Fraction(9, 4),
                4: Fraction(25, 8), 5: Fraction(65, 16)}
    assert {m: stats.expected_distance(m) for m in stats.layers} == expected
    assert stats.probability(1, 0) == Fraction(1, 2)
    assert stats.probability(4, 99) == 0


def test_square_chain_expectations_frozen():
    space = build_tiny_space(RECIPES["square-chain"])
    distances = space.distance_map(space.find_optimal_programs())
    stats = layer_statistics(space, distances)
    values = [float(stats.expected_distance(m)) for m in (1, 2, 3)]
    assert values == [1.625, 1.859375, 2.380859375]


def test_layer_csv_round_trip(pair_scale, tmp_path):
    stats = pair_scale[3]
    path = tmp_path / "layers.csv"
    stats.write_csv(str(path), "census")
    lines = path.read_text().splitlines()
    assert lines[0] == "# census"
    assert lines[1] == "m,d,count,probability"
    assert lines[2].split(",")[:3] == ["1", "0", "1"]
    body = sum(len(stats.counts[m]) for m in stats.layers)
    assert len(lines) == 2 + body


def test_probability_similarity_report(pair_scale):
    stats = pair_scale[3]
    tight = verify_probability_similarity(stats, 0, 1)
    assert (tight.probability_low, tight.probability_high) == \
        (Fraction(1, 2), Fraction(0))
    assert tight.difference == Fraction(1, 2)
    assert not tight.within  # 1/2 exceeds the default 1/10 tolerance
    loose = verify_probability_similarity(stats, 0, 1, Fraction(1, 1))
    assert loose.within


# -- expectation growth and bloat cells --------------------------------------


def test_expectation_growth_reports_margins(pair_scale):
    report = verify_expectation_growth(pair_scale[3])
    assert report.strictly_increasing
    assert report.margins[1] == Fraction(1, 2)
    assert set(report.margins) == {1, 2, 3, 4}


def test_expectation_growth_detects_a_dip():
    stats = LayerStats(2, {1: {0: 1, 2: 1}, 2: {0: 4}})
    report = verify_expectation_growth(stats)
    assert not report.strictly_increasing


def test_bloat_cell_pass_and_teeth(pair_scale):
    # pair-scale layer 2 has no slack left at target distance 1, so the
    # expectation drops: the checker must flag this rather than wave it by
    report = verify_bloat_expectation(pair_scale[3], 1, 1)
    assert report.expectation_here == Fraction(1, 2)
    assert report.expectation_higher == Fraction(0)
    assert not report.add_not_worse

    space = build_tiny_space(RECIPES["double-path4"])
    distances = space.distance_map(space.find_optimal_programs())
    stats = layer_statistics(space, distances)
    cell = verify_bloat_expectation(stats, 2, 1)
    assert cell.add_not_worse
    assert cell.add_beats_remove


def test_registered_bloat_spaces_are_clean():
    for recipe in BUNDLED_SPACES:
        if CHECK_BLOAT_CELLS not in recipe.checks:
            continue
        space = build_tiny_space(recipe)
        optimal = space.find_optimal_programs()
        m_star = min(len(p) for p in optimal)
        stats = layer_statistics(space, space.distance_map(optimal))
        for size in range(1, space.max_size):
            for target in range(1, m_star + 1):
                cell = verify_bloat_expectation(stats, size, target)
                assert cell.add_not_worse, (recipe.name, size, target)
                if cell.add_beats_remove is not None:
                    assert cell.add_beats_remove, (recipe.name, size, target)


# -- fitness buckets ---------------------------------------------------------


def test_fitness_buckets_implication_holds(quad_mix):
    space, _, distances, _ = quad_mix
    for d in range(4):
        report = verify_fitness_buckets(space, distances, d)
        assert report.implication_violations == 0
        assert any(not r.degenerate for r in report.rows)


def test_fitness_buckets_flag_empty_frontiers(pair_scale):
    space, _, distances, _ = pair_scale
    # beyond the largest occurring distance nothing new is admitted
    report = verify_fitness_buckets(space, distances, 50)
    assert all(r.degenerate for r in report.rows)


# -- gap certification -------------------------------------------------------


def test_gap_certificate_frozen(quad_mix):
    space, optimal = quad_mix[:2]
    cert = certify_fitness_gap(space, optimal)
    assert cert.pairs_checked == 60320
    assert cert.violations == 0
    assert cert.control_violations == 256
    assert 0.99 <= cert.worst_ratio <= 1.0 + 1e-9
    assert cert.passed


def test_halved_constants_break_the_bound(quad_mix):
    space, optimal = quad_mix[:2]
    exact = exact_stretch_constants(space, optimal)
    assert exact.exact
    assert exact.mixed_step >= exact.aligned_step >= 0.0
    import dataclasses
    weak = dataclasses.replace(exact, fitness_scale=exact.fitness_scale / 2,
                               exact=False)
    broken = certify_fitness_gap(space, optimal, constants=weak)
    assert broken.violations > 0


# -- exact growth factors ----------------------------------------------------


def test_growth_factors_hand_computed():
    space = build_growth_space(GROWTH_CONFIGS[0])  # reg-pair
    intron, exon = exact_growth_factors(space, 2, 3)
    assert (intron, exon) == (Fraction(11, 4), Fraction(29, 4))
    with pytest.raises(ValueError):
        exact_growth_factors(space, 3, 2)


def test_growth_sandwich_reg_pair():
    space = build_growth_space(GROWTH_CONFIGS[0])
    report = verify_growth_sandwich(space, 2, 3)
    assert report.passed
    assert (report.intron_bounds.lower, report.intron_bounds.upper) == (2, 6)
    assert (report.exon_bounds.lower, report.exon_bounds.upper) == (6, 18)
    assert report.intron_exact == Fraction(11, 4)
    assert report.exon_exact == Fraction(29, 4)


def test_sandwich_subset_runs():
    reports = run_growth_sandwiches(GROWTH_CONFIGS[:2])
    assert [r.passed for r in reports] == [True, True]
    assert reports[0].name == "reg-pair"


# -- registry integrity ------------------------------------------------------


def test_bundled_registry_shape():
    names = [r.name for r in BUNDLED_SPACES]
    assert len(names) == len(set(names)) == 6
    known = {CHECK_DISTANCE, CHECK_EXPECTATION, CHECK_BLOAT_CELLS,
             CHECK_CERTIFICATION}
    for recipe in BUNDLED_SPACES:
        assert CHECK_DISTANCE in recipe.checks
        assert set(recipe.checks) <= known
        space = build_tiny_space(recipe)
        assert space.set_size <= MAX_TINY_SET
        assert space.find_optimal_programs(), recipe.name
    tagged = [r for r in BUNDLED_SPACES if CHECK_EXPECTATION in r.checks]
    assert len(tagged) == 3
    assert sum(CHECK_BLOAT_CELLS in r.checks for r in BUNDLED_SPACES) == 3


def test_growth_configs_shape():
    assert len(GROWTH_CONFIGS) == 14
    for recipe in GROWTH_CONFIGS:
        assert 0 < recipe.size_from < recipe.size_to <= MAX_TINY_DEPTH
