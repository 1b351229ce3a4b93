"""Tests for the command-line entry point and its CSV outputs."""

import csv
import os

import pytest

from fslp.cli import (EXIT_CONFIG, EXIT_INIT, EXIT_OK, fmt, main,
                      make_crane_config, make_solver_params, parse_overrides,
                      read_config_file)

CONFIG = os.path.join(os.path.dirname(__file__), "..", "configs",
                      "crane_default.ini")


def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


class TestOverrides:
    def test_unknown_key_rejected(self, tmp_path):
        code = main(["illustrative", "--eps", "0.06", "--out", str(tmp_path),
                     "--set", "bogus_key=1"])
        assert code == EXIT_CONFIG

    def test_malformed_pair_rejected(self, tmp_path):
        code = main(["illustrative", "--eps", "0.06", "--out", str(tmp_path),
                     "--set", "delta0"])
        assert code == EXIT_CONFIG

    def test_known_keys_parse(self):
        over = parse_overrides(["delta0=0.5", "n_watch=4", "r_load=0.1"])
        params = make_solver_params(over)
        assert params.delta0 == 0.5
        assert params.inner.n_watch == 4
        cfg = make_crane_config(over)
        assert cfg.r_load == 0.1

    def test_invalid_value_rejected(self, tmp_path):
        code = main(["crane", "--out", str(tmp_path), "--set", "sigma=0.9"])
        assert code == EXIT_CONFIG


class TestConfigFile:
    def test_default_file_reproduces_defaults(self):
        settings = read_config_file(CONFIG)
        cfg = make_crane_config(settings)
        assert cfg == make_crane_config({})
        params = make_solver_params(settings)
        assert params == make_solver_params({})

    def test_missing_file_is_config_error(self, tmp_path):
        code = main(["crane", "--config", str(tmp_path / "nope.ini"),
                     "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_unknown_section_rejected(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[rocket]\nthrust = 11\n")
        code = main(["crane", "--config", str(bad), "--out", str(tmp_path)])
        assert code == EXIT_CONFIG


class TestIllustrative:
    def test_runs_and_writes_csv(self, tmp_path):
        code = main(["illustrative", "--eps", "0.06", "--out", str(tmp_path)])
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "illustrative.csv")
        assert header == ["k", "w1", "w2", "error", "delta", "rho", "accepted"]
        assert len(rows) >= 2
        final = rows[-1]
        assert abs(float(final[1]) - (-0.2)) <= 1e-5
        assert abs(float(final[2]) - 0.04) <= 1e-5

    def test_start_at_optimum_immediate(self, tmp_path):
        code = main(["illustrative", "--eps", "0.06", "--out", str(tmp_path),
                     "--start=-0.2,0.04"])
        assert code == EXIT_OK
        _, rows = read_rows(tmp_path / "illustrative.csv")
        assert len(rows) == 1
        assert all(r[6] == "0" for r in rows)  # no accepted steps

    def test_error_column_blank_for_other_eps(self, tmp_path):
        code = main(["illustrative", "--eps", "0.02", "--out", str(tmp_path)])
        assert code == EXIT_OK
        _, rows = read_rows(tmp_path / "illustrative.csv")
        assert all(r[3] == "" for r in rows)

    def test_round_trip_17_digits(self, tmp_path):
        main(["illustrative", "--eps", "0.06", "--out", str(tmp_path)])
        _, rows = read_rows(tmp_path / "illustrative.csv")
        for row in rows:
            v = float(row[1])
            assert fmt(v) == row[1]


@pytest.mark.slow
class TestCraneCommand:
    def test_full_run_outputs(self, tmp_path):
        code = main(["crane", "--config", CONFIG, "--out", str(tmp_path)])
        assert code == EXIT_OK
        header, outer = read_rows(tmp_path / "crane_outer.csv")
        assert header == ["k", "objective", "infeasibility", "radius",
                          "model_decrease", "rho", "accepted",
                          "inner_iterations", "inner_status", "step_norm"]
        assert all(float(r[2]) <= 1e-7 for r in outer)
        iheader, inner = read_rows(tmp_path / "crane_inner.csv")
        assert iheader == ["outer_k", "inner_l", "h", "ratio", "kappa", "status"]
        # row counts agree with the recorded iteration counts
        solves = sum(int(r[7]) for r in outer)
        visits = len(inner)
        statuses = [r[8] for r in outer]
        assert visits >= solves  # every solve produces a visited iterate row
        theader, traj = read_rows(tmp_path / "crane_trajectories.csv")
        assert theader == ["k", "stage", "p_x", "p_y"]
        n_stage = 1 + int(max(int(r[1]) for r in traj))
        assert n_stage == 21
        assert len(traj) % n_stage == 0

    def test_infeasible_initialization_exit_code(self, tmp_path):
        code = main(["crane", "--out", str(tmp_path),
                     "--set", "obstacle_vertices=-0.05 -0.75 0.05 -0.75 0.05 -0.65 -0.05 -0.65"])
        assert code == EXIT_INIT


class TestInnerStudyCommand:
    def test_radii_must_descend(self, tmp_path):
        code = main(["inner-study", "--radii", "0.25,0.5", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_radii_must_be_positive(self, tmp_path):
        code = main(["inner-study", "--radii", "0.5,-0.25", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    @pytest.mark.slow
    def test_writes_study_csv(self, tmp_path):
        code = main(["inner-study", "--radii", "0.25,0.125", "--out", str(tmp_path)])
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "inner_study.csv")
        assert header == ["radius", "inner_l", "h", "ratio", "kappa", "status"]
        radii = sorted({float(r[0]) for r in rows})
        assert radii == [0.125, 0.25]


@pytest.mark.slow
class TestBenchCommand:
    def test_small_bench_deterministic(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        for out in (out1, out2):
            code = main(["bench", "--seed", "3", "--count", "4",
                         "--radius", "0.02", "--jobs", "1", "--out", str(out)])
            assert code == EXIT_OK
        assert (out1 / "bench_summary.csv").read_text() == \
               (out2 / "bench_summary.csv").read_text()

    def test_zero_radius_matches_default_run(self, tmp_path):
        code = main(["bench", "--seed", "1", "--count", "4", "--radius", "0",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        _, rows = read_rows(tmp_path / "bench_summary.csv")
        assert len(rows) == 4
        base = rows[0][1:]
        assert all(r[1:] == base for r in rows[1:])
