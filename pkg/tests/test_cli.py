"""Smoke tests for the command-line surface."""

import json

import pytest

from convexgeom.cli import main


class TestBodyVolume:
    def test_cube_exact(self, capsys):
        rc = main(["body", "volume", "--kind", "cube", "--half-side", "1", "--n", "3"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["volume"] == pytest.approx(8.0)

    def test_ellipsoid_diag(self, capsys):
        rc = main(["body", "volume", "--kind", "ellipsoid", "--n", "2",
                   "--diag", "2,0.5"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        import math

        assert out["volume"] == pytest.approx(math.pi)

    def test_diag_length_mismatch(self, capsys):
        rc = main(["body", "volume", "--kind", "ellipsoid", "--n", "3",
                   "--diag", "2,0.5"])
        assert rc == 2


class TestConstants:
    def test_table_is_json(self, capsys):
        rc = main(["constants", "--n", "2", "--p", "1"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert "b_np" in out and "a_np" in out


class TestVerify:
    def test_small_verify_exits_zero(self, capsys, tmp_path):
        csv_path = tmp_path / "r.csv"
        rc = main(["verify", "--n", "2", "--p", "2", "--lambda", "2",
                   "--samples", "2048", "--max-doublings", "0",
                   "--cases", "levelset,blaschke_santalo",
                   "--csv", str(csv_path)])
        assert rc == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0].startswith("id,n,p,lambda")

    def test_config_file_overrides_flags(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"cases": ["levelset"], "lam": "inf"}))
        out_path = tmp_path / "r.json"
        rc = main(["verify", "--n", "2", "--p", "1", "--lambda", "2",
                   "--samples", "2048", "--config", str(cfg),
                   "--out", str(out_path)])
        assert rc == 0
        rep = json.loads(out_path.read_text())
        assert rep["config"]["lam"] == "inf"
        assert {r["id"] for r in rep["results"]} == {"levelset"}


class TestProbe:
    def test_probe_unknown_case(self, capsys):
        assert main(["probe", "--ineq", "bogus"]) == 2

    def test_probe_runs_and_logs(self, capsys, tmp_path):
        log = tmp_path / "log.json"
        rc = main(["probe", "--ineq", "petty_probe", "--n", "2", "--p", "1",
                   "--iters", "2", "--samples", "2048", "--out", str(log)])
        assert rc == 0
        data = json.loads(log.read_text())
        assert data["min"]["ratio"] >= 0.9
        assert len(data["log"]) >= 2
