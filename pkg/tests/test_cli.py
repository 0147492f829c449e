import json

import numpy as np
import pytest

from epdyn import cli


def run_cli(tmp_path, task, cfg, extra=()):
    path = tmp_path / f"{task}.json"
    path.write_text(json.dumps(cfg))
    return cli.main([task, str(path), *extra])


def base_cfg(task, out, **kw):
    cfg = {
        "schema_version": 1,
        "task": task,
        "model": "stub",
        "model_params": {"N": 4, "up_hoppings": [2, 2, 2, 2], "lam": 0.0},
        "out": str(out),
    }
    cfg.update(kw)
    return cfg


def read_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    rows = [[float(v) for v in l.split(",")] for l in lines[1:]]
    return header, rows


class TestEvolve:
    def test_populations_csv(self, tmp_path):
        out = tmp_path / "evolve.csv"
        cfg = base_cfg(
            "evolve",
            out,
            initial_state={"site": "B4"},
            times={"start": 0.0, "stop": 20.0, "step": 1.0},
        )
        assert run_cli(tmp_path, "evolve", cfg) == 0
        header, rows = read_rows(out)
        assert header[:2] == ["time", "norm"]
        assert "pop_A1" in header and "pop_B4" in header
        assert len(rows) == 21
        # populations sum to squared norm
        for row in rows:
            assert abs(sum(row[2:]) - row[1] ** 2) < 1e-9 * max(1.0, row[1] ** 2)

    def test_header_metadata(self, tmp_path):
        out = tmp_path / "evolve.csv"
        cfg = base_cfg(
            "evolve",
            out,
            initial_state={"site": "B4"},
            times={"values": [0.0, 1.0]},
        )
        run_cli(tmp_path, "evolve", cfg)
        head = out.read_text().splitlines()[:4]
        assert head[0].startswith("# epdyn ")
        assert head[1].startswith("# config_sha256: ")
        assert head[2].startswith("# seed: ")
        assert head[3].startswith("# rank_tol: ")

    def test_repeat_runs_byte_identical(self, tmp_path):
        cfg = base_cfg(
            "evolve",
            tmp_path / "a.csv",
            initial_state={"site": "B4"},
            times={"start": 0.0, "stop": 5.0, "step": 0.5},
        )
        run_cli(tmp_path, "evolve", cfg)
        cfg2 = dict(cfg, out=str(tmp_path / "b.csv"))
        run_cli(tmp_path, "evolve", cfg2)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_effective_config_round_trip(self, tmp_path):
        cfg = base_cfg(
            "evolve",
            tmp_path / "a.csv",
            initial_state={"site": "B4"},
            times={"values": [0.0, 2.0, 7.0]},
        )
        run_cli(tmp_path, "evolve", cfg)
        eff = tmp_path / "a.csv.effective.json"
        assert eff.exists()
        assert (
            cli.main(["evolve", str(eff), "--out", str(tmp_path / "b.csv")]) == 0
        )
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestSweeps:
    def test_spectrum_sweep_shape(self, tmp_path):
        out = tmp_path / "sweep.csv"
        cfg = base_cfg(
            "spectrum-sweep",
            out,
            sweep={"parameter": "lam", "start": -1.2, "stop": 1.0, "step": 0.1},
        )
        assert run_cli(tmp_path, "spectrum-sweep", cfg) == 0
        header, rows = read_rows(out)
        assert header[0] == "lam"
        assert header[1] == "E1_re" and header[2] == "E1_im"
        assert len(header) == 1 + 2 * 11
        assert len(rows) == 23

    def test_petermann_sweep(self, tmp_path):
        out = tmp_path / "pet.csv"
        cfg = base_cfg(
            "petermann-sweep",
            out,
            sweep={"parameter": "lam", "values": [0.5, 0.1, 0.05]},
        )
        assert run_cli(tmp_path, "petermann-sweep", cfg) == 0
        header, rows = read_rows(out)
        assert header == ["lam", "inverse_average", "average", "diverged"]
        inv = [r[1] for r in rows]
        assert inv[0] > inv[1] > inv[2]


class TestPcrCheck:
    def test_defective_report(self, tmp_path, capsys):
        out = tmp_path / "pcr.json"
        cfg = base_cfg("pcr-check", out)
        assert run_cli(tmp_path, "pcr-check", cfg) == 0
        assert "defective; pseudo-completeness" in capsys.readouterr().out
        doc = json.loads(out.read_text())
        assert doc["defective"] is True
        assert doc["closure_residual"] <= 1e-10
        orders = {c["ep_order"] for c in doc["clusters"]}
        assert 2 in orders

    def test_nondefective_matrix_file(self, tmp_path, capsys):
        mat = tmp_path / "m.csv"
        # Hermitian 2x2: rows of re,im pairs
        mat.write_text("1,0,0.5,0\n0.5,0,2,0\n")
        out = tmp_path / "pcr.json"
        cfg = {
            "schema_version": 1,
            "task": "pcr-check",
            "model": "matrix-file",
            "model_params": {"path": str(mat)},
            "out": str(out),
        }
        assert run_cli(tmp_path, "pcr-check", cfg) == 0
        assert "nondefective; standard completeness used" in capsys.readouterr().out
        assert json.loads(out.read_text())["defective"] is False


class TestOtherTasks:
    def test_density_evolve_weights(self, tmp_path):
        out = tmp_path / "rho.csv"
        cfg = {
            "schema_version": 1,
            "task": "density-evolve",
            "model": "diamond",
            "model_params": {"eps_value": 2.0, "kappa": 1.0},
            "initial_density": {"weights": [0.25, 0.25, 0.25, 0.25]},
            "times": {"values": [0.0, 50.0]},
            "out": str(out),
        }
        assert run_cli(tmp_path, "density-evolve", cfg) == 0
        header, rows = read_rows(out)
        assert header[:3] == ["time", "fidelity", "purity"]
        assert abs(rows[0][1] - 0.25) < 1e-12
        assert rows[-1][1] > 0.999

    def test_density_evolve_ensemble(self, tmp_path):
        out = tmp_path / "ens.csv"
        cfg = {
            "schema_version": 1,
            "task": "density-evolve",
            "model": "diamond",
            "model_params": {"eps_value": 2.0, "kappa": 1.0},
            "initial_density": {"ensemble_size": 10},
            "times": {"values": [0.0, 50.0]},
            "seed": 3,
            "out": str(out),
        }
        assert run_cli(tmp_path, "density-evolve", cfg) == 0
        header, rows = read_rows(out)
        assert header == ["time", "mean_fidelity", "mean_purity"]
        assert rows[-1][1] > 0.99 and rows[-1][2] > 0.99

    def test_transfer(self, tmp_path):
        out = tmp_path / "tr.csv"
        cfg = {
            "schema_version": 1,
            "task": "transfer",
            "model": "diamond",
            "model_params": {
                "eps_value": -1.0,
                "kappa": -1.0,
                "eps_is_imaginary": True,
            },
            "initial_state": {"sites": ["B", "D"]},
            "times": {"values": [0.0, 50.0]},
            "out": str(out),
        }
        assert run_cli(tmp_path, "transfer", cfg) == 0
        header, rows = read_rows(out)
        assert header == ["time", "fidelity_initial_form", "fidelity_target_form"]
        assert rows[-1][2] >= 0.999 and rows[-1][1] <= 0.01

    def test_eliminate_compare(self, tmp_path):
        out = tmp_path / "el.csv"
        cfg = {
            "schema_version": 1,
            "task": "eliminate-compare",
            "model": "adiabatic-stub",
            "model_params": {
                "N": 2,
                "j_ab": 0.5,
                "j_ad": 5.0,
                "j_bd": 5.0,
                "theta": 1.5707963267948966,
                "kappa_d": 100.0,
            },
            "initial_state": {"site": "B2"},
            "times": {"start": 0.5, "stop": 5.0, "step": 0.5},
            "out": str(out),
        }
        assert run_cli(tmp_path, "eliminate-compare", cfg) == 0
        header, rows = read_rows(out)
        assert header == ["time", "error"]
        assert max(r[1] for r in rows) < 0.5


class TestErrors:
    def test_missing_config_file(self, tmp_path, capsys):
        assert cli.main(["evolve", str(tmp_path / "nope.json")]) == 2
        doc = json.loads(capsys.readouterr().err)
        assert doc["error"]["exit_code"] == 2

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = base_cfg("evolve", tmp_path / "x.csv", bogus=1)
        assert run_cli(tmp_path, "evolve", cfg) == 2
        assert json.loads(capsys.readouterr().err)["error"]["type"] == "ConfigError"

    def test_task_mismatch(self, tmp_path, capsys):
        cfg = base_cfg("evolve", tmp_path / "x.csv")
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["pcr-check", str(path)]) == 2
        capsys.readouterr()

    def test_bad_site(self, tmp_path, capsys):
        cfg = base_cfg(
            "evolve",
            tmp_path / "x.csv",
            initial_state={"site": "Z9"},
            times={"values": [0.0]},
        )
        assert run_cli(tmp_path, "evolve", cfg) == 2
        capsys.readouterr()

    def test_nonmonotone_grid(self, tmp_path, capsys):
        cfg = base_cfg(
            "evolve",
            tmp_path / "x.csv",
            initial_state={"site": "B4"},
            times={"values": [0.0, 2.0, 1.0]},
        )
        assert run_cli(tmp_path, "evolve", cfg) == 2
        capsys.readouterr()

    def test_missing_out(self, tmp_path, capsys):
        cfg = base_cfg("evolve", "ignored", initial_state={"site": "B4"})
        cfg.pop("out")
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["evolve", str(path)]) == 2
        capsys.readouterr()

    def test_seventeen_digit_values(self, tmp_path):
        out = tmp_path / "e.csv"
        cfg = base_cfg(
            "evolve",
            out,
            initial_state={"site": "B4"},
            times={"values": [0.0, 0.1]},
        )
        run_cli(tmp_path, "evolve", cfg)
        line = out.read_text().splitlines()[-1]
        assert line.startswith("0.10000000000000001,")
