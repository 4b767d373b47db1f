import os
import subprocess
import sys

import numpy as np
import pytest


def run_cli(*args, env_extra=None, cwd=None):
    env = os.environ.copy()
    env.pop("LONGMEM_SEED", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "longmem.cli", *args],
        capture_output=True, text=True, env=env, cwd=cwd,
    )


@pytest.fixture()
def series_file(tmp_path):
    path = tmp_path / "series.csv"
    proc = run_cli(
        "simulate", "--d", "0.2", "--phi", "0.3", "--T", "300",
        "--seed", "5", "--out", str(path),
    )
    assert proc.returncode == 0
    return path


class TestSimulate:
    def test_writes_one_column(self, series_file):
        data = np.loadtxt(series_file)
        assert data.shape == (300,)

    def test_seed_reproducible(self, tmp_path, series_file):
        other = tmp_path / "again.csv"
        run_cli("simulate", "--d", "0.2", "--phi", "0.3", "--T", "300",
                "--seed", "5", "--out", str(other))
        assert open(series_file).read() == open(other).read()

    def test_env_seed_used_when_flag_absent(self, tmp_path, series_file):
        other = tmp_path / "env.csv"
        run_cli("simulate", "--d", "0.2", "--phi", "0.3", "--T", "300",
                "--out", str(other), env_extra={"LONGMEM_SEED": "5"})
        assert open(series_file).read() == open(other).read()

    def test_flag_beats_env(self, tmp_path, series_file):
        other = tmp_path / "flag.csv"
        run_cli("simulate", "--d", "0.2", "--phi", "0.3", "--T", "300",
                "--seed", "5", "--out", str(other),
                env_extra={"LONGMEM_SEED": "77"})
        assert open(series_file).read() == open(other).read()

    def test_multiple_series_columns(self, tmp_path):
        path = tmp_path / "multi.csv"
        run_cli("simulate", "--d", "0.0", "--phi", "0.3", "--T", "50",
                "--n", "3", "--seed", "1", "--out", str(path))
        data = np.loadtxt(path, delimiter=",")
        assert data.shape == (50, 3)

    def test_student_t_law(self, tmp_path):
        path = tmp_path / "t.csv"
        proc = run_cli("simulate", "--d", "0.1", "--phi", "0.0", "--T", "50",
                       "--law", "student-t:6", "--seed", "2", "--out", str(path))
        assert proc.returncode == 0

    def test_bad_law_exit_2(self, tmp_path):
        proc = run_cli("simulate", "--d", "0.1", "--phi", "0.0", "--T", "50",
                       "--law", "cauchy", "--out", str(tmp_path / "x.csv"))
        assert proc.returncode == 2


class TestEstimate:
    def test_prints_point_estimate(self, series_file):
        proc = run_cli("estimate", "--in", str(series_file),
                       "--family", "lpr", "--P", "0")
        assert proc.returncode == 0
        fields = dict(line.split() for line in proc.stdout.splitlines())
        assert set(fields) == {"d_hat", "asymptotic_sd", "N"}
        assert fields["N"] == "54"  # floor(300**0.7)
        assert abs(float(fields["d_hat"])) < 1.5

    def test_invalid_choice_exit_2(self, series_file):
        proc = run_cli("estimate", "--in", str(series_file), "--family", "ols")
        assert proc.returncode == 2

    def test_missing_file_exit_2(self):
        proc = run_cli("estimate", "--in", "no-such-file.csv", "--family", "lpr")
        assert proc.returncode == 2

    def test_degenerate_input_exit_3(self, tmp_path):
        path = tmp_path / "const.csv"
        path.write_text("\n".join(["1.0"] * 100) + "\n")
        proc = run_cli("estimate", "--in", str(path), "--family", "lpr")
        assert proc.returncode == 3


class TestBiasCorrect:
    def test_one_shot_output(self, series_file):
        proc = run_cli("bias-correct", "--in", str(series_file),
                       "--family", "lpr", "--P", "1", "--B", "40",
                       "--mode", "parametric", "--seed", "3")
        assert proc.returncode == 0
        out = proc.stdout
        for key in ("d_hat", "d_tilde", "bias_hat", "hpd95"):
            assert key in out

    def test_iterate_prints_trace(self, series_file):
        proc = run_cli("bias-correct", "--in", str(series_file),
                       "--family", "splw", "--P", "0", "--B", "40",
                       "--iterate", "--max-iter", "3", "--seed", "3")
        assert proc.returncode == 0
        assert "stop_reason" in proc.stdout
        assert "iter 0" in proc.stdout

    def test_deterministic_given_seed(self, series_file):
        args = ("bias-correct", "--in", str(series_file), "--family", "lpr",
                "--P", "0", "--B", "40", "--seed", "9")
        assert run_cli(*args).stdout == run_cli(*args).stdout


class TestMcRun:
    def test_writes_results_and_tables(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(
            "T = 64\nd = 0.0, 0.2\nphi = 0.3\nR = 2\nB = 16\n"
            "estimators = lpr0, lpr0-bba1\nseed = 4\n"
        )
        out = tmp_path / "out"
        proc = run_cli("mc-run", "--config", str(cfg), "--out-dir", str(out),
                       "--threads", "2")
        assert proc.returncode == 0
        assert (out / "results.csv").exists()
        assert (out / "tables.txt").exists()
        header = open(out / "results.csv").readline().strip()
        assert header == "T,d,phi,estimator,P,correction,K,statistic,value,R_effective,seed"

    def test_bad_config_exit_2(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("T = 64\nnope = 1\n")
        proc = run_cli("mc-run", "--config", str(cfg),
                       "--out-dir", str(tmp_path / "o"))
        assert proc.returncode == 2

    def test_missing_config_exit_2(self, tmp_path):
        proc = run_cli("mc-run", "--config", str(tmp_path / "none.txt"),
                       "--out-dir", str(tmp_path / "o"))
        assert proc.returncode == 2
