import json
import pathlib

import pytest

from specfib.cli import fmt, fmt_vec, main, parse_config
from specfib.errors import ConfigError

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"
OCTIC = str(CONFIGS / "octic.ini")
REFLEXIVE = str(CONFIGS / "reflexive.ini")


def run_json(capsys, command, config, *extra):
    code = main([command, "--config", config, "--json", *extra])
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestFormatting:
    def test_integers_have_no_denominator(self):
        from fractions import Fraction

        assert fmt(Fraction(8)) == "8"
        assert fmt(Fraction(-3, 1)) == "-3"

    def test_proper_fractions(self):
        from fractions import Fraction

        assert fmt(Fraction(9, 8)) == "9/8"
        assert fmt(Fraction(-1, 2)) == "-1/2"
        assert fmt_vec([Fraction(1), Fraction(1, 3)]) == ["1", "1/3"]


class TestRingCheck:
    def test_triple_table(self, capsys):
        code, report = run_json(capsys, "ring-check", OCTIC)
        assert code == 0
        assert report["schema_version"] == "1"
        triple = report["results"]["triple"]
        assert triple["H.H.H"] == "8"
        assert triple["H.H.l"] == "4"
        assert triple["H.l.l"] == "0"
        assert triple["l.l.l"] == "0"
        assert report["results"]["base_genus"] == 0

    def test_table_rendering(self, capsys):
        code = main(["ring-check", "--config", OCTIC])
        out = capsys.readouterr().out
        assert code == 0
        assert "command: ring-check" in out
        assert "[PASS] tensor_symmetric" in out


class TestSpectral:
    def test_rank_one_report(self, capsys):
        code, report = run_json(capsys, "spectral", OCTIC)
        assert code == 0
        results = report["results"]
        assert results["R"] == 8
        assert results["chi"] == 3
        ch = results["character"]
        assert ch["ch0"] == "3"
        assert ch["ch1"] == ["0", "0"]
        assert ch["ch2_pairings"] == ["-6", "-3"]
        assert ch["ch3"] == "3"
        tw = results["character_twisted_by_minus_f"]
        assert tw["ch1"] == ["0", "-3"]
        assert tw["ch3"] == "6"

    def test_general_mode_with_kernel_section(self, tmp_path, capsys):
        text = pathlib.Path(OCTIC).read_text()
        text = text.replace("base_genus = 0", "base_genus = 1")
        text = text.replace("n = 3\ng = 2\nd = 4\ncover = 6 3", "n = 3\ng = 1\nd = 2\ncover = 0 3")
        text += "\n[kernel]\nr = 2\nL = 1 0\ns = 1\nCQ = 1\nG2 = 0 0\nG3 = 0\n"
        cfg = tmp_path / "general.ini"
        cfg.write_text(text)
        code, report = run_json(capsys, "spectral", str(cfg))
        assert code == 0
        assert report["inputs"]["mode"] == "general"
        ch = report["results"]["character"]
        assert ch["ch0"] == "6"
        assert ch["ch1"] == ["3", "3"]


class TestStability:
    def test_octic_threshold(self, capsys):
        code, report = run_json(capsys, "stability", OCTIC)
        assert code == 0
        results = report["results"]
        assert results["B_pairings"] == ["36", "18"]
        assert results["B_H0"] == "36"
        assert results["H0sq_f"] == "4"
        assert results["M0"] == "162"
        assert results["M0_ceil"] == 162
        assert report["verdicts"][0]["name"] == "bogomolov_nonnegative"
        assert report["verdicts"][0]["passed"]


class TestScan:
    def test_rows_and_known_hit(self, capsys):
        code, report = run_json(capsys, "scan", OCTIC)
        assert code == 0
        rows = report["results"]["rows"]
        assert report["results"]["count"] == len(rows)
        assert {"r": 2, "L": [1, 0], "s": 1, "gcd_triple": [8, 0, 3], "square": "0"} in rows

    def test_max_results_flag(self, capsys):
        code, report = run_json(capsys, "scan", OCTIC, "--max-results", "1")
        assert code == 0
        assert report["results"]["truncated"] is True
        assert report["results"]["count"] == 1

    def test_replay_identical(self, capsys):
        _, first = run_json(capsys, "scan", OCTIC)
        _, second = run_json(capsys, "scan", OCTIC)
        assert first == second


class TestExtension:
    def test_passing_example(self, capsys):
        code, report = run_json(capsys, "extension", OCTIC)
        assert code == 0
        results = report["results"]
        assert results["mu_E"] == "0"
        assert results["mu_G"] == "1/4"
        assert results["bound_rhs"] == "5/16"
        assert all(v["passed"] for v in report["verdicts"])

    def test_failing_example_exit_code(self, tmp_path, capsys):
        text = pathlib.Path(OCTIC).read_text().replace("g_rank = 16", "g_rank = 2")
        cfg = tmp_path / "ext.ini"
        cfg.write_text(text)
        code, report = run_json(capsys, "extension", str(cfg))
        assert code == 1
        assert not report["verdicts"][0]["passed"]


class TestOracleVerify:
    def test_reflexive_example(self, capsys):
        code, report = run_json(capsys, "oracle-verify", REFLEXIVE)
        assert code == 0
        assert all(v["passed"] for v in report["verdicts"])
        closed = report["results"]["closed_form"]
        assert closed == report["results"]["oracle"]
        assert closed["ch0"] == "2"
        assert closed["ch1"] == ["0", "1", "6"]


class TestConfigErrors:
    def test_missing_file(self, capsys):
        code = main(["ring-check", "--config", "/nonexistent.ini", "--json"])
        assert code == 2
        assert json.loads(capsys.readouterr().out)["error"] == "ConfigError"

    def test_unknown_key_strict(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[fibration]\nfibre = 0 1\n")
        with pytest.raises(ConfigError):
            parse_config(str(cfg), strict=True)
        parse_config(str(cfg), strict=False)  # tolerated without --strict

    def test_no_strict_flag(self, tmp_path, capsys):
        text = pathlib.Path(OCTIC).read_text() + "\n[notes]\nauthor = x\n"
        cfg = tmp_path / "extra.ini"
        cfg.write_text(text)
        assert main(["ring-check", "--config", str(cfg), "--json"]) == 2
        capsys.readouterr()
        assert main(["ring-check", "--config", str(cfg), "--json", "--no-strict"]) == 0

    def test_asymmetric_triple_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "asym.ini"
        cfg.write_text(
            "[ring]\ndivisors = H l\nH.H.H = 8\nH.H.l = 4\nl.H.H = 3\n"
            "H.l.l = 0\nl.l.l = 0\n"
        )
        code = main(["ring-check", "--config", str(cfg), "--json"])
        assert code == 2
        assert json.loads(capsys.readouterr().out)["error"] == "AsymmetricTensor"

    def test_missing_section(self, capsys):
        code = main(["stability", "--config", REFLEXIVE, "--json"])
        assert code == 2
        assert json.loads(capsys.readouterr().out)["error"] == "MissingSection"
