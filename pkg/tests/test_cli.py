import json

import pytest

from qlgs.cli import ConfigError, main, parse_config


class TestParseConfig:
    def test_verify_defaults(self):
        cfg = parse_config(["verify", "--dim", "2", "--p", "2", "--omega", "1"])
        assert cfg.mode == "verify"
        assert cfg.dim == 2
        assert cfg.p == 2.0
        assert cfg.omega == 1.0
        assert cfg.sectors == 3
        assert cfg.nodes is None  # solver default applies

    def test_supercritical_p_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(["verify", "--dim", "3", "--p", "11", "--omega", "1"])

    def test_range_syntax(self):
        cfg = parse_config(["sweep", "--dim", "2", "--p", "1.5:0.5:4.5",
                            "--omega", "1"])
        assert cfg.p_values == (1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5)

    def test_comma_list(self):
        cfg = parse_config(["sweep", "--dim", "2", "--p", "1.5,2,2.5,3.5"])
        assert cfg.p_values == (1.5, 2.0, 2.5, 3.5)

    def test_range_outside_sweep_conflicts(self):
        with pytest.raises(ConfigError):
            parse_config(["verify", "--dim", "2", "--p", "1.5:0.5:2.5"])

    def test_unknown_flag_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(["verify", "--frobnicate", "1"])

    def test_config_file_merges_and_flags_win(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# comment\ndim = 2\np = 2.5\nomega = 1.0\nnodes = 2001\n")
        cfg = parse_config(["verify", "--config", str(cfg_file), "--p", "2.0"])
        assert cfg.p == 2.0  # flag overrides file
        assert cfg.nodes == 2001

    def test_config_file_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("banana = 3\n")
        with pytest.raises(ConfigError):
            parse_config(["verify", "--config", str(cfg_file)])

    def test_even_cell_count_required_for_verify(self):
        with pytest.raises(ConfigError):
            parse_config(["verify", "--dim", "1", "--p", "2", "--nodes", "2000"])

    def test_sectors_floor(self):
        with pytest.raises(ConfigError):
            parse_config(["verify", "--dim", "2", "--p", "2", "--sectors", "1"])


class TestRun:
    def test_verify_writes_artifacts(self, tmp_path):
        out = tmp_path / "v"
        code = main(["verify", "--dim", "1", "--p", "2", "--omega", "1",
                     "--out", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["nd_verdict"] is True
        assert (out / "profile.csv").exists()
        assert (out / "eigen_k0.csv").exists()
        assert (out / "eigen_k1.csv").exists()

    def test_solve_mode(self, tmp_path):
        out = tmp_path / "s"
        code = main(["solve", "--dim", "1", "--p", "2", "--omega", "1",
                     "--nodes", "1501", "--out", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["nd_verdict"] is None
        assert report["residuals"]["virial"] < 1e-5
        assert report["extras"]["amplitude"] == pytest.approx(1.5, abs=1e-9)

    def test_baseline_mode(self, tmp_path):
        out = tmp_path / "b"
        code = main(["baseline", "--out", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["kind"] == "nls_baseline"
        assert report["mu1"] == pytest.approx(-3.0, abs=1e-3)
        assert report["mu2"] == pytest.approx(0.0, abs=1e-3)

    def test_sweep_mode(self, tmp_path):
        out = tmp_path / "sw"
        code = main(["sweep", "--dim", "1", "--p", "2,2.5", "--omega", "1",
                     "--nodes", "1501", "--out", str(out), "--jobs", "2"])
        assert code == 0
        lines = (out / "summary.csv").read_text().splitlines()
        assert len(lines) == 3  # header + one row per configuration
        assert lines[0] == "dim,p,omega,mu1,lplus_dims,lminus_dims,nd_verdict"
        assert lines[1].endswith("pass")
        assert lines[2].endswith("pass")
        assert (out / "p2.0" / "report.json").exists()
        assert (out / "p2.5" / "report.json").exists()

    def test_bad_flags_exit_one(self, capsys):
        assert main(["verify", "--dim", "3", "--p", "12"]) == 1
        assert "out of range" in capsys.readouterr().err

    def test_inconclusive_exit_code(self, tmp_path, monkeypatch):
        import qlgs.nondegeneracy as nd

        monkeypatch.setattr(nd, "baseline_gate", lambda: False)
        code = main(["verify", "--dim", "1", "--p", "2", "--nodes", "1501",
                     "--out", str(tmp_path / "i")])
        assert code == 2

    def test_planar_sweep_spans_both_regimes(self, tmp_path):
        # p below and above 3 in one sweep, all verdicts pass
        out = tmp_path / "regimes"
        code = main(["sweep", "--dim", "2", "--p", "1.5,2,2.5,3.5",
                     "--omega", "1", "--out", str(out), "--jobs", "4"])
        assert code == 0
        lines = (out / "summary.csv").read_text().splitlines()
        assert len(lines) == 5
        assert all(line.endswith("pass") for line in lines[1:])
