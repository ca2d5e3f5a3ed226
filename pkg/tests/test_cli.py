"""Command-line harness: config parsing, file layout, exit codes.

Commands are exercised in-process through ``main`` with tiny budgets so the
whole file stays fast; the heavyweight sweeps live in the acceptance tests.
"""

from pathlib import Path

import numpy as np
import pytest

from lgpspace.bounds import (SpaceProfile, constructive_rate_bound,
                             min_hitting_time)
from lgpspace.cli import (InputError, config_digest, main, make_instruction_set,
                          parse_int_list, parse_seeds, rank_sum_pvalue,
                          read_config_file, resolve_dataset,
                          sample_size_fitness)
from lgpspace.problems import FitnessEvaluator


def write_cfg(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text)
    return str(path)


TINY_EVOLVE = """
population = 12
generations = 4
tournament = 3
elitism = 2
init_min = 2
init_max = 5
max_len = 30
cases = 12
seeds = 0,1
"""


# -- config plumbing ---------------------------------------------------------


def test_read_config_file(tmp_path):
    path = write_cfg(tmp_path, "a.cfg", """
# comment-only line
population = 10   # trailing comment
  seeds=3,4
""")
    assert read_config_file(path) == {"population": "10", "seeds": "3,4"}


def test_read_config_file_reports_the_bad_line(tmp_path):
    path = write_cfg(tmp_path, "bad.cfg", "# ok\n\njust words\n")
    with pytest.raises(InputError, match=r"bad\.cfg:3:"):
        read_config_file(path)


def test_read_config_file_missing(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        read_config_file(str(tmp_path / "nope.cfg"))


def test_parse_int_list_ranges():
    assert parse_int_list("3") == [3]
    assert parse_int_list("1..5") == [1, 2, 3, 4, 5]
    assert parse_int_list("2..10..2") == [2, 4, 6, 8, 10]
    assert parse_int_list("7, 1..3") == [7, 1, 2, 3]
    for bad in ("a", "1..2..3..4", "", "1..b"):
        with pytest.raises(InputError):
            parse_int_list(bad)


def test_parse_seeds_rejects_duplicates():
    assert parse_seeds("4,2") == (4, 2)
    with pytest.raises(InputError, match="distinct"):
        parse_seeds("1,1")


def test_config_digest_ignores_output_directory():
    base = {"seeds": "0,1", "population": "16"}
    with_out = dict(base, out="/somewhere/else")
    assert config_digest("evolve", base) == config_digest("evolve", with_out)
    assert config_digest("evolve", base) != \
        config_digest("evolve", dict(base, seeds="0,2"))
    assert len(config_digest("sample", base)) == 12
    int(config_digest("sample", base), 16)  # hex digest


def test_unknown_config_key_is_an_input_error(tmp_path, capsys):
    path = write_cfg(tmp_path, "bad.cfg", "bogus = 1\n")
    code = main(["evolve", "--config", path, "--out", str(tmp_path / "r")])
    assert code == 1
    assert "unknown config key" in capsys.readouterr().err


def test_rank_sum_exact_small_sample():
    p = rank_sum_pvalue([1.0, 2.0, 3.0], [10.0, 20.0, 30.0])
    assert p == pytest.approx(0.1)  # 2/C(6,3)
    assert p == rank_sum_pvalue([10.0, 20.0, 30.0], [1.0, 2.0, 3.0])


# -- evolve ------------------------------------------------------------------


def test_evolve_writes_traces_and_aggregate(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "run.cfg", TINY_EVOLVE)
    out = tmp_path / "runs"
    assert main(["evolve", "--config", cfg, "--out", str(out)]) == 0
    for seed in (0, 1):
        assert (out / f"evolve_nguyen4_u1_seed{seed}.csv").exists()
    agg = out / "evolve_nguyen4_u1_aggregate.csv"
    lines = agg.read_text().splitlines()
    assert lines[0].startswith("# config ") and lines[0].endswith(" seeds 0,1")
    assert lines[1] == ("generation,best_fitness_mean,best_fitness_std,"
                        "mean_fitness_mean,mean_fitness_std,"
                        "mean_size_mean,mean_size_std,"
                        "mean_exons_mean,mean_exons_std")
    assert len(lines) == 2 + 5  # generations 0..4
    assert lines[2].split(",")[0] == "0"


def test_evolve_reruns_are_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, "run.cfg", TINY_EVOLVE)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["evolve", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["evolve", "--config", cfg, "--out", str(out_b)]) == 0
    name = "evolve_nguyen4_u1_aggregate.csv"
    assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    name = "evolve_nguyen4_u1_seed1.csv"
    assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_evolve_u_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path, "run.cfg", TINY_EVOLVE + "u = 1,2\n")
    out = tmp_path / "runs"
    assert main(["evolve", "--config", cfg, "--out", str(out),
                 "--u", "3", "--seed", "5"]) == 0
    made = sorted(p.name for p in out.iterdir())
    assert made == ["evolve_nguyen4_u3_aggregate.csv",
                    "evolve_nguyen4_u3_seed5.csv"]


def test_evolve_rejects_nonpositive_u(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "run.cfg", TINY_EVOLVE)
    assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "r"),
                 "--u", "0"]) == 1


# -- sample ------------------------------------------------------------------


def test_sample_csv_matches_recomputation(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "s.cfg", """
sizes = 2,4
programs = 25
cases = 16
seeds = 0,1
""")
    out = tmp_path / "runs"
    assert main(["sample", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "sample_nguyen4.csv").read_text().splitlines()
    assert lines[1] == "m,mean_rse,std_rse"
    assert len(lines) == 2 + 2

    per_seed = []
    for seed in (0, 1):
        dataset = resolve_dataset("nguyen4", seed, 16)
        iset = make_instruction_set("default", 8, dataset.num_features)
        evaluator = FitnessEvaluator(dataset, iset.config)
        per_seed.append(sample_size_fitness(evaluator, iset, [2, 4], 25, seed))
    for line, m in zip(lines[2:], (2, 4)):
        cells = line.split(",")
        col = np.array([row[m] for row in per_seed])
        assert int(cells[0]) == m
        assert float(cells[1]) == pytest.approx(col.mean(), rel=1e-9)
        assert float(cells[2]) == pytest.approx(col.std(), rel=1e-9)


def test_sample_rejects_bad_sizes(tmp_path):
    cfg = write_cfg(tmp_path, "s.cfg", "sizes = 0,3\nseeds = 0\n")
    assert main(["sample", "--config", cfg, "--out", str(tmp_path / "r")]) == 1


# -- grid --------------------------------------------------------------------


def test_grid_cells_match_direct_bounds(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "g.cfg", """
registers = 4
outputs = 1
set_size = 8
optimal_size = 2
u = 1,2
d = 1..2
m = 3
""")
    out = tmp_path / "runs"
    assert main(["grid", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "grid_grid.csv").read_text().splitlines()
    assert lines[1] == "u,d,m,rate_ub,hitting_time,truncated"
    rows = [line.split(",") for line in lines[2:]]
    assert [(r[0], r[1], r[2]) for r in rows] == \
        [("1", "1", "3"), ("1", "2", "3"), ("2", "1", "3"), ("2", "2", "3")]
    profile = SpaceProfile(4, 1, 8, optimal_size=2)
    for r in rows:
        u, d, m = int(r[0]), int(r[1]), int(r[2])
        rate = constructive_rate_bound(profile, d, m, u)
        assert float(r[3]) == pytest.approx(rate.value, rel=1e-9)
        hit = min_hitting_time(profile, d, m, u)
        assert r[4] == ("unreached" if hit is None else str(hit))


def test_grid_reruns_are_byte_identical(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "g.cfg",
                    "set_size = 50\nu = 1..3\nd = 1..3\nm = 5,10\n")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["grid", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["grid", "--config", cfg, "--out", str(out_b)]) == 0
    assert (out_a / "grid_grid.csv").read_bytes() == \
        (out_b / "grid_grid.csv").read_bytes()


def test_grid_rejects_unknown_form(tmp_path):
    cfg = write_cfg(tmp_path, "g.cfg", "form = fancy\n")
    assert main(["grid", "--config", cfg, "--out", str(tmp_path / "r")]) == 1


# -- study -------------------------------------------------------------------

TINY_STUDY = """
population = 10
generations = 3
tournament = 2
elitism = 1
init_min = 2
init_max = 4
max_len = 20
cases = 12
seeds = 0,1,2
problems = nguyen4
variants = default,fx2
"""


def test_study_writes_scores_and_ranks(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "st.cfg", TINY_STUDY)
    out = tmp_path / "runs"
    assert main(["study", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "study_study.csv").read_text().splitlines()
    assert lines[1] == "problem,variant,mean_rse,std_rse,p_vs_default,significant"
    rows = [line.split(",") for line in lines[2:]]
    assert [(r[0], r[1]) for r in rows] == \
        [("nguyen4", "default"), ("nguyen4", "fx2")]
    assert rows[0][4] == "" and rows[0][5] == ""  # baseline row has no test
    p = float(rows[1][4])
    assert 0.0 < p <= 1.0
    assert rows[1][5] == str(int(p < 0.05))

    rank_lines = (out / "study_study_ranks.csv").read_text().splitlines()
    assert rank_lines[1] == "variant,mean_rank"
    ranks = {r.split(",")[0]: float(r.split(",")[1]) for r in rank_lines[2:]}
    assert set(ranks) == {"default", "fx2"}
    assert sorted(ranks.values()) == [1.0, 2.0]  # one problem, two variants


@pytest.mark.parametrize("override", [
    "variants = fx2,fx4\n",          # baseline missing
    "variants = default,bogus\n",    # unknown variant
    "problems = nguyen9\n",          # unknown benchmark
])
def test_study_input_validation(tmp_path, capsys, override):
    cfg = write_cfg(tmp_path, "st.cfg", TINY_STUDY + override)
    assert main(["study", "--config", cfg,
                 "--out", str(tmp_path / "r")]) == 1


def test_study_rejects_csv_datasets(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("x,y\n0,0\n1,2\n2,4\n")
    cfg = write_cfg(tmp_path, "st.cfg", TINY_STUDY)
    code = main(["study", "--config", cfg, "--out", str(tmp_path / "r"),
                 "--problem", str(data)])
    assert code == 1
    assert "named benchmarks" in capsys.readouterr().err


# -- oracle ------------------------------------------------------------------


def test_oracle_single_space_passes(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "o.cfg", "sandwiches = no\n")
    out = tmp_path / "runs"
    assert main(["oracle", "--config", cfg, "--out", str(out),
                 "--space", "pair-scale"]) == 0
    assert (out / "layers_pair-scale.csv").exists()
    checks = (out / "oracle_checks.csv").read_text().splitlines()
    assert checks[1] == "space,check,status,detail"
    body = [line.split(",") for line in checks[2:]]
    assert body and all(r[2] == "pass" for r in body)
    assert (out / "oracle_report.txt").read_text().count("pair-scale") >= 2


def test_oracle_unknown_space(tmp_path, capsys):
    assert main(["oracle", "--out", str(tmp_path / "r"),
                 "--space", "warp-core"]) == 1
    assert "unknown space" in capsys.readouterr().err


def test_oracle_halved_control_fails_verification(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "o.cfg", "sandwiches = no\n")
    out = tmp_path / "runs"
    code = main(["oracle", "--config", cfg, "--out", str(out),
                 "--space", "quad-mix", "--halve-control"])
    assert code == 2
    checks = (out / "oracle_checks.csv").read_text()
    assert "gap-certification-control,FAIL" in checks


def test_oracle_refuses_oversized_custom_space(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "o.cfg", """
sandwiches = no
spaces = pair-scale
space_registers = 3
space_functions = add,sub,mul,div,sin,cos,sqrt,log
space_max_size = 3
""")
    code = main(["oracle", "--config", cfg, "--out", str(tmp_path / "r")])
    assert code == 1
    err = capsys.readouterr().err
    assert "cannot enumerate 'custom'" in err
    assert "enumeration would visit" in err


def test_oracle_custom_space_reports_its_failures(tmp_path, capsys):
    """An ad-hoc space this small genuinely breaks one slack-cell property;
    the command must flag it, exit 2, and still write every artifact."""
    cfg = write_cfg(tmp_path, "o.cfg", """
sandwiches = no
spaces = pair-scale
space_registers = 1
space_outputs = 1
space_functions = add
space_max_size = 3
space_target = double
space_name = micro
""")
    out = tmp_path / "runs"
    assert main(["oracle", "--config", cfg, "--out", str(out)]) == 2
    assert (out / "layers_micro.csv").exists()
    checks = (out / "oracle_checks.csv").read_text()
    assert "micro,expectation-growth,pass" in checks
    assert "micro,bloat-cells,FAIL" in checks
    assert "pair-scale,distance-window,pass" in checks


# -- bounds ------------------------------------------------------------------


def test_bounds_prints_the_profile_report(capsys):
    cfg_free = main(["bounds"])
    assert cfg_free == 0
    text = capsys.readouterr().out
    # 8 registers x 8 functions x 81 operand pairs for the default set
    assert "set_size=5184" in text
    assert "distance window at size 10: [1, 21]" in text
    assert "rate bound at" in text
    assert "hitting-time estimate" in text


def test_bounds_with_explicit_profile(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "b.cfg", """
set_size = 8
registers = 4
optimal_size = 2
size = 3
distance = 2
u = 1
moves = 2
grow_to = 4
""")
    assert main(["bounds", "--config", cfg]) == 0
    text = capsys.readouterr().out
    assert "set_size=8" in text
    assert "distance window at size 3: [0, 5]" in text
    assert "log intron padding factor 3->4" in text


def test_bounds_rejects_bad_moves(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "b.cfg", "size = -2\n")
    assert main(["bounds", "--config", cfg]) == 1
