"""Tests for the ``monopole`` command-line interface."""
import csv
import io
import json

import numpy as np
import pytest

from twoholonomy import cli


def run(argv):
    out = io.StringIO()
    code = cli.run_cli(argv, out=out)
    return code, out.getvalue()


class TestFlux:
    @pytest.mark.parametrize(
        "argv,kind,value",
        [
            (["--family", "u1", "--charge", "-2"], "integer", 2),
            (["--family", "un", "--n", "3", "--charge", "1"], "pair", -1),
        ],
    )
    def test_json_stdout(self, argv, kind, value):
        code, text = run(["flux", *argv, "--samples", "64", "--tol", "1e-5"])
        assert code == 0
        d = json.loads(text)
        assert d["flux"]["kind"] == kind
        got = d["flux"]["value"] if kind == "integer" else d["flux"]["value"]["real"]
        assert got == value
        assert d["agree"] is True and d["samples"] == 64

    def test_so3_matrix(self):
        code, text = run(["flux", "--family", "so3", "--method", "integral", "--samples", "64", "--tol", "1e-5"])
        assert code == 0
        d = json.loads(text)
        assert np.allclose(np.array(d["flux"]["value"])[..., 0], -np.eye(2))
        assert d["agree"] is None

    def test_json_file(self, tmp_path):
        path = tmp_path / "r.json"
        code, text = run(["flux", "--family", "sunzn", "--n", "4", "--charge", "3", "--json", str(path), "--samples", "64", "--tol", "1e-5"])
        assert code == 0
        assert "exp(2 pi i 3/4) I4" in text
        assert json.loads(path.read_text())["flux"]["label"] == "exp(2 pi i 3/4) I4"

    def test_charge_reduction_note(self):
        code, text = run(["flux", "--family", "sunzn", "--n", "2", "--charge", "3", "--samples", "64", "--tol", "1e-5"])
        d = json.loads(text)
        assert code == 0 and d["charge"] == 1 and d["notes"]

    @pytest.mark.parametrize(
        "argv",
        [
            ["flux", "--family", "sp2"],
            ["flux"],
            ["flux", "--family", "u1", "--samples", "4"],
            ["flux", "--family", "u1", "--tol", "0"],
            ["flux", "--family", "un", "--n", "5"],
            ["flux", "--family", "so3", "--charge", "2"],
            ["bogus"],
        ],
    )
    def test_argument_errors_exit_2(self, argv, capsys):
        code, _ = run(argv)
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_disagreement_exits_1(self, monkeypatch, capsys):
        def boom(*a, **k):
            raise cli.MethodDisagreement("forced")

        monkeypatch.setattr(cli, "magnetic_flux", boom)
        code, _ = run(["flux", "--family", "u1"])
        assert code == 1
        assert "disagree" in capsys.readouterr().err


class TestOtherCommands:
    def test_table(self):
        code, text = run(["table", "--samples", "64", "--tol", "1e-5"])
        lines = text.strip().splitlines()
        assert code == 0 and len(lines) == 32
        assert all(line.endswith("PASS") for line in lines)

    def test_table_fail_marks(self, monkeypatch):
        real = cli.magnetic_flux

        def wrong(config, *a, **k):
            r = real(config, *a, **k)
            return type(r)(**{**r.__dict__, "kernel_index": r.kernel_index + 1})

        monkeypatch.setattr(cli, "magnetic_flux", wrong)
        code, text = run(["table", "--samples", "64", "--tol", "1e-5"])
        assert code == 1 and "FAIL" in text

    def test_check(self):
        code, text = run(["check"])
        assert code == 0
        assert "FAIL" not in text and text.count("PASS") >= 10

    def test_convergence_csv(self, tmp_path):
        path = tmp_path / "c.csv"
        code, _ = run(["convergence", "--family", "so3", "--max-samples", "128", "--out", str(path)])
        assert code == 0
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["samples", "abs_error"]
        errs = np.array([float(r[1]) for r in rows[1:]])
        assert [int(r[0]) for r in rows[1:]] == [8, 16, 32, 64, 128]
        assert np.all(errs[:-1] / errs[1:] > 3.5)

    def test_help(self, capsys):
        assert cli.run_cli(["--help"]) == 0
        assert "flux" in capsys.readouterr().out


class TestColor:
    def test_no_color_env(self, monkeypatch):
        class Tty(io.StringIO):
            def isatty(self):
                return True

        monkeypatch.delenv("NO_COLOR", raising=False)
        assert "\033[" in cli._status(True, Tty())
        monkeypatch.setenv("NO_COLOR", "1")
        assert cli._status(True, Tty()) == "PASS"

    def test_plain_when_not_tty(self):
        assert cli._status(False, io.StringIO()) == "FAIL"
