import json

import numpy as np
import pytest

from blurtv import __version__
from blurtv.cli import main


@pytest.fixture()
def files_1d(tmp_path):
    rng = np.random.default_rng(0)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("".join(f"{v}\n" for v in rng.normal(1.0, 1.0, 40)))
    b.write_text("".join(f"{v}\n" for v in rng.normal(-1.0, 1.0, 40)))
    return str(a), str(b)


@pytest.fixture()
def files_20d(tmp_path):
    rng = np.random.default_rng(1)
    paths = []
    for name in ("x20.csv", "y20.csv"):
        p = tmp_path / name
        rows = rng.normal(size=(10, 20))
        p.write_text("".join(",".join(map(str, row)) + "\n" for row in rows))
        paths.append(str(p))
    return paths


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEstimate:
    def test_identical_files_zero(self, capsys, files_1d):
        a, _ = files_1d
        code, out, _ = run_cli(
            capsys, "estimate", "--x", a, "--y", a, "--dim", "1", "--h", "0.5"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["estimate"] == 0.0
        assert payload["method"] == "quadrature"
        assert payload["n"] == payload["m"] == 40

    def test_monte_carlo_deterministic(self, capsys, files_20d):
        x, y = files_20d
        args = ("estimate", "--x", x, "--y", y, "--dim", "20", "--h", "1", "--mc", "2000", "--seed", "7")
        code1, out1, _ = run_cli(capsys, *args)
        code2, out2, _ = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2
        assert json.loads(out1)["method"] == "monte_carlo"

    def test_high_dim_without_mc_exits_2(self, capsys, files_20d):
        x, y = files_20d
        code, _, err = run_cli(capsys, "estimate", "--x", x, "--y", y, "--dim", "20", "--h", "1")
        assert code == 2
        assert "quadrature unavailable above dimension 1" in err

    def test_missing_file_exits_3(self, capsys):
        code, _, err = run_cli(
            capsys, "estimate", "--x", "/no/such.csv", "--y", "/no/such.csv", "--dim", "1", "--h", "1"
        )
        assert code == 3

    def test_bad_bandwidth_exits_2(self, capsys, files_1d):
        a, b = files_1d
        code, _, err = run_cli(capsys, "estimate", "--x", a, "--y", b, "--dim", "1", "--h", "-1")
        assert code == 2
        assert "bandwidth" in err

    def test_mixture_kernel_spec(self, capsys, files_1d):
        a, b = files_1d
        code, out, _ = run_cli(
            capsys,
            "estimate", "--x", a, "--y", b, "--dim", "1", "--h", "0.5",
            "--kernel", "mix:-4,0,4/0.334,0.333,0.333/1,1,1",
        )
        assert code == 0
        assert 0.0 < json.loads(out)["estimate"] <= 1.0


class TestBound:
    def test_naive_identical_files(self, capsys, files_1d):
        from blurtv.bounds import epsilon_nm

        a, _ = files_1d
        code, out, _ = run_cli(
            capsys,
            "bound", "--method", "naive", "--alpha", "0.1",
            "--x", a, "--y", a, "--dim", "1", "--h", "0.5",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["lcb"] == 0.0
        assert payload["ucb"] == pytest.approx(epsilon_nm(40, 40, 0.1))

    def test_combined_reports_union_level(self, capsys, files_1d):
        a, b = files_1d
        code, out, _ = run_cli(
            capsys,
            "bound", "--method", "combined", "--alpha", "0.1",
            "--x", a, "--y", b, "--dim", "1", "--h", "0.5", "--mc", "500",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["margins"]["level_alpha"] == pytest.approx(0.1 / (2 * 40))

    def test_uniform_without_hstar_notes_omission(self, capsys, files_1d):
        a, b = files_1d
        code, out, _ = run_cli(
            capsys,
            "bound", "--method", "uniform", "--alpha", "0.1",
            "--x", a, "--y", b, "--dim", "1", "--h", "0.5",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["lcb"] == 0.0
        assert "omitted" in payload["diagnostics"]["lcb"]

    def test_mc_without_B_exits_2(self, capsys, files_1d):
        a, b = files_1d
        code, _, err = run_cli(
            capsys,
            "bound", "--method", "monte_carlo", "--alpha", "0.1",
            "--x", a, "--y", b, "--dim", "1", "--h", "0.5",
        )
        assert code == 2
        assert "Monte Carlo size" in err

    def test_explicit_grid_spec(self, capsys, files_1d):
        a, b = files_1d
        code, out, _ = run_cli(
            capsys,
            "bound", "--method", "combined", "--alpha", "0.1",
            "--x", a, "--y", b, "--dim", "1", "--h", "0.5", "--mc", "400",
            "--grid", "0.5:4:1.6",
        )
        assert code == 0
        assert json.loads(out)["diagnostics"]["grid_points"] >= 4

    def test_bad_alpha_exits_2(self, capsys, files_1d):
        a, b = files_1d
        code, _, _ = run_cli(
            capsys,
            "bound", "--method", "naive", "--alpha", "1.5",
            "--x", a, "--y", b, "--dim", "1", "--h", "0.5",
        )
        assert code == 2


class TestExperiment:
    def test_fig1_writes_csv(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"experiment": "fig1", "h_values": [0.1, 1.0, 5.0]}')
        out_dir = tmp_path / "results"
        code, out, _ = run_cli(
            capsys, "experiment", "--name", "fig1", "--config", str(cfg), "--out", str(out_dir)
        )
        assert code == 0
        target = out_dir / "fig1.csv"
        assert target.exists()
        assert target.read_text().startswith("# metadata: {")
        assert "fig1: wrote" in out

    def test_rerun_identical_bytes_across_threads(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            '{"experiment": "coverage", "trials": 6, "n": 40, "m": 40, "B": 300,'
            ' "methods": ["naive", "monte_carlo"]}'
        )
        outs = []
        for threads, sub in (("1", "r1"), ("2", "r2")):
            out_dir = tmp_path / sub
            code, _, _ = run_cli(
                capsys,
                "experiment", "--name", "coverage", "--config", str(cfg),
                "--out", str(out_dir), "--threads", threads,
            )
            assert code == 0
            outs.append((out_dir / "coverage.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_unknown_name_exits_2_and_lists_names(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "experiment", "--name", "fig7", "--out", str(tmp_path)
        )
        assert code == 2
        assert "fig1" in err and "coverage" in err

    def test_config_experiment_mismatch(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"experiment": "fig2"}')
        code, _, err = run_cli(
            capsys, "experiment", "--name", "fig1", "--config", str(cfg), "--out", str(tmp_path)
        )
        assert code == 2


class TestVersion:
    def test_version_prints(self, capsys):
        code, out, _ = run_cli(capsys, "version")
        assert code == 0
        assert out.strip() == __version__
