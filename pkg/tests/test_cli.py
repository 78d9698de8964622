"""Command-line interface: parsing, exit codes, report serialization."""

import json

import pytest

from elliptic_rmatrix import ConfigError
from elliptic_rmatrix.cli import main, parse_complex_literal

REPORT_FIELDS = {
    "check",
    "params",
    "sample_points",
    "residual",
    "tolerance",
    "passed",
    "runtime_ms",
    "seed",
    "version",
    "detail",
}


class TestLiteralParsing:
    def test_cartesian_forms(self):
        assert parse_complex_literal("1.5+0.5i") == 1.5 + 0.5j
        assert parse_complex_literal("1.5-0.5j") == 1.5 - 0.5j
        assert parse_complex_literal("0.3") == 0.3 + 0j
        assert parse_complex_literal("-2i") == -2j

    def test_random_sentinel(self):
        assert parse_complex_literal("random") is None
        assert parse_complex_literal("RANDOM") is None

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError):
            parse_complex_literal("one plus two eye")


class TestExitCodes:
    def test_nome_outside_disc_is_config_error(self, capsys):
        assert main(["verify", "--n", "3", "--p", "1.2"]) == 2
        assert "must lie in (0, 1)" in capsys.readouterr().err

    def test_bad_tol_syntax(self, capsys):
        assert main(["verify", "--tol", "ybe"]) == 2

    def test_bad_grid(self, capsys):
        assert main(["scan", "--grid", "4by4"]) == 2

    def test_n_below_two(self, capsys):
        assert main(["verify", "--n", "1"]) == 2

    def test_forced_tolerance_failure(self, capsys, tmp_path):
        code = main(
            ["verify", "--n", "2", "--seed", "1", "--points", "1",
             "--tol", "ybe=1e-30", "--out", str(tmp_path / "r.txt")]
        )
        assert code == 1

    def test_successful_verify(self, capsys):
        assert main(["verify", "--n", "2", "--seed", "3", "--points", "1"]) == 0
        out = capsys.readouterr().out
        assert "checks passed" in out

    def test_write_once(self, tmp_path, capsys):
        target = tmp_path / "dump.txt"
        assert main(["matrix", "--n", "2", "--seed", "5", "--out", str(target)]) == 0
        assert main(["matrix", "--n", "2", "--seed", "5", "--out", str(target)]) == 2
        assert "refusing to overwrite" in capsys.readouterr().err


class TestMatrixDump:
    def test_eight_vertex_dump_shape(self, capsys):
        assert main(
            ["matrix", "--n", "2", "--kind", "eightvertex", "--seed", "7"]
        ) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        header = [ln for ln in lines if ln.startswith("#")]
        rows = [ln for ln in lines if not ln.startswith("#")]
        assert len(rows) == 16
        zero_rows = [r for r in rows if r.endswith(", 0, 0")]
        assert len(zero_rows) == 8
        assert any("kind: eightvertex" in h for h in header)
        assert any("columns: i, j, re, im" in h for h in header)

    def test_elliptic_n3_zero_pattern(self, capsys):
        assert main(["matrix", "--n", "3", "--kind", "elliptic", "--seed", "2"]) == 0
        rows = [
            ln
            for ln in capsys.readouterr().out.strip().splitlines()
            if not ln.startswith("#")
        ]
        assert len(rows) == 81
        for row in rows:
            i_str, j_str, re_str, im_str = (part.strip() for part in row.split(","))
            i, j = int(i_str) - 1, int(j_str) - 1
            a, c = divmod(i, 3)
            b, d = divmod(j, 3)
            if (a + c - b - d) % 3 != 0:
                assert (re_str, im_str) == ("0", "0"), row

    def test_same_seed_byte_identical(self, tmp_path):
        f1, f2 = tmp_path / "a.txt", tmp_path / "b.txt"
        main(["matrix", "--n", "3", "--seed", "9", "--out", str(f1)])
        main(["matrix", "--n", "3", "--seed", "9", "--out", str(f2)])
        assert f1.read_bytes() == f2.read_bytes()

    def test_pinned_arguments_echoed(self, capsys):
        main(["matrix", "--n", "2", "--q", "0.4+0.1i", "--p", "0.2", "--z", "1.1"])
        out = capsys.readouterr().out
        assert "# q: 0.4" in out
        assert "# p: 0.2" in out


class TestJsonReports:
    def test_verify_document_structure(self, tmp_path):
        target = tmp_path / "verify.json"
        code = main(
            ["verify", "--n", "2", "--seed", "21", "--points", "1",
             "--format", "json", "--out", str(target)]
        )
        assert code == 0
        document = json.loads(target.read_text())
        assert set(document) == {"config", "reports"}
        assert document["config"]["command"] == "verify"
        assert document["config"]["seed"] == 21
        for report in document["reports"]:
            assert set(report) == REPORT_FIELDS
            assert set(report["params"]) == {"N", "q", "p", "c"}
            assert report["runtime_ms"] == 0.0  # zeroed without --timings
        names = {r["check"] for r in document["reports"]}
        assert any(name.startswith("ybe") for name in names)
        assert any(name.startswith("qdet[") for name in names)
        assert "centrality-witness" in names

    def test_verify_byte_identical_across_runs(self, tmp_path):
        f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
        main(["verify", "--n", "2", "--seed", "33", "--points", "1",
              "--format", "json", "--out", str(f1)])
        main(["verify", "--n", "2", "--seed", "33", "--points", "1",
              "--format", "json", "--out", str(f2)])
        assert f1.read_bytes() == f2.read_bytes()

    def test_embedded_config_reproduces_residuals(self, tmp_path):
        # a report file names its own seed/params: re-running must agree
        f1 = tmp_path / "first.json"
        main(["qdet", "--n", "2", "--seed", "55", "--points", "2",
              "--format", "json", "--out", str(f1)])
        doc = json.loads(f1.read_text())
        seed = doc["config"]["seed"]
        f2 = tmp_path / "second.json"
        main(["qdet", "--n", "2", "--seed", str(seed), "--points", "2",
              "--format", "json", "--out", str(f2)])
        redone = json.loads(f2.read_text())
        first = [r["residual"] for r in doc["reports"]]
        second = [r["residual"] for r in redone["reports"]]
        assert all(abs(a - b) <= 1e-12 for a, b in zip(first, second))


class TestCsvReports:
    def test_header_and_rows(self, capsys):
        assert main(
            ["scan", "--n", "2", "--check", "unitarity", "--grid", "2x2",
             "--seed", "12", "--format", "csv"]
        ) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("check,N,q,p,c,sample_points,residual")
        assert len(lines) == 1 + 4


class TestScan:
    def test_grid_partitioning(self, tmp_path):
        target = tmp_path / "scan.json"
        code = main(
            ["scan", "--n", "2", "--check", "ybe", "--grid", "4x4",
             "--seed", "3", "--format", "json", "--out", str(target)]
        )
        assert code == 0
        document = json.loads(target.read_text())
        assert len(document["reports"]) == 16
        cells = {tuple(r["detail"]["cell"]) for r in document["reports"]}
        assert cells == {(i, j) for i in range(4) for j in range(4)}
        moduli = sorted(abs(complex(*r["params"]["q"])) for r in document["reports"])
        assert moduli[0] < 0.45 and moduli[-1] > 0.65  # spread across the range


class TestLimits:
    def test_monotone_table(self, capsys):
        assert main(["limits", "--n", "2", "--seed", "31"]) == 0
        out = capsys.readouterr().out
        lines = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
        table = [ln for ln in lines if ln[0].isdigit()]
        residuals = [float(ln.split(",")[1]) for ln in table]
        assert residuals == sorted(residuals, reverse=True)
        assert "PASS" in out

    def test_custom_p_sequence(self, capsys):
        # the support residual tracks the smallest p, so it must sit well
        # below the 1e-5 tolerance for the run to pass
        assert main(
            ["limits", "--n", "2", "--seed", "31", "--p-seq", "1e-4,1e-6,1e-8"]
        ) == 0
        out = capsys.readouterr().out
        assert "1.000e-04" in out and "1.000e-08" in out


class TestWarnings:
    def test_near_degenerate_q_warns_but_runs(self, capsys):
        assert main(["matrix", "--n", "3", "--q", "0.99", "--seed", "2"]) == 0
        captured = capsys.readouterr()
        assert "warning:" in captured.err
        assert "# kind:" in captured.out
