import json

import numpy as np
import pytest

from evoalg import cli, example_algebra, parse
from evoalg.fileformat import format_matrix, serialise


def run(capsys, *argv):
    code = cli.run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_evolution_exit_zero(self, capsys):
        code, out, _ = run(capsys, "check", "example://simple2d")
        assert code == 0
        assert "verdict: evolution" in out
        assert "natural basis" in out

    def test_refutation_exit_one(self, capsys):
        code, out, _ = run(capsys, "check", "example://mendel", "--epsilon", "0")
        assert code == 1
        assert "not diagonalisable" in out

    def test_complex_only_exit_two(self, tmp_path, capsys):
        f = tmp_path / "xz.alg"
        f.write_text("field: real\ndim: 2\nm 1 1 1 1\nm 2 2 1 -1\nm 1 2 2 1\n")
        code, out, _ = run(capsys, "check", str(f))
        assert code == 2
        assert "complex_only_undetermined" in out

    def test_json_report_schema(self, capsys):
        code, out, _ = run(capsys, "check", "example://mendel", "--epsilon", "0", "--json")
        assert code == 1
        report = json.loads(out)
        assert report["verdict"] == "not_evolution"
        assert report["branch"] == "a"
        assert report["certificate"] is None
        assert report["refutation"]["kind"] == "non_diagonalisable"
        assert report["refutation"]["matrix_index"] == 2
        assert report["refutation"]["eigenvalue"][0] == pytest.approx(-1.0, abs=1e-8)
        diag = report["diagnostics"]
        for key in ("r0", "lambda0", "ann_dim", "tolerances", "trials", "trials_used", "seed", "notes", "runtime_ms"):
            assert key in diag

    def test_json_certificate_payload(self, capsys):
        code, out, _ = run(capsys, "check", "example://simple2d", "--json")
        assert code == 0
        report = json.loads(out)
        p = np.array([[complex(re, im) for re, im in row] for row in report["certificate"]["p"]])
        assert p.shape == (2, 2)
        assert len(report["certificate"]["diagonals"]) == 2
        assert len(report["certificate"]["natural_basis"]) == 2

    def test_batch_exit_is_worst(self, tmp_path, capsys):
        f = tmp_path / "nota2.alg"
        f.write_text(serialise(example_algebra("nota2")))
        code, out, _ = run(capsys, "check", str(f), "example://simple2d", "--json")
        assert code == 1
        lines = [json.loads(line) for line in out.strip().splitlines()]
        assert [r["verdict"] for r in lines] == ["not_evolution", "evolution"]

    def test_tolerance_overrides(self, capsys):
        code, _, _ = run(capsys, "check", "example://simple2d", "--tol", "verify_rtol=1e-6", "--tol", "rank_rtol=1e-12")
        assert code == 0
        code, _, err = run(capsys, "check", "example://simple2d", "--tol", "bogus=1")
        assert code == 3 and "unknown tolerance" in err


class TestOtherCommands:
    def test_basis_prints_vectors(self, capsys):
        code, out, _ = run(capsys, "basis", "example://simple2d")
        assert code == 0
        assert len(out.strip().splitlines()) == 2

    def test_basis_refutation(self, capsys):
        code, out, _ = run(capsys, "basis", "example://nota2")
        assert code == 1
        assert "refutation" in out

    def test_ann(self, capsys):
        code, out, _ = run(capsys, "ann", "example://nota2")
        assert code == 0
        assert out.strip().splitlines() == ["0.0 0.0 1.0"]

    def test_ann_empty(self, capsys):
        code, out, _ = run(capsys, "ann", "example://simple2d")
        assert code == 0
        assert "zero" in out

    def test_example_emits_parseable_fixture(self, capsys):
        code, out, _ = run(capsys, "example", "tetraploid", "--epsilon", "0.1")
        assert code == 0
        assert parse(out) == example_algebra("tetraploid", 0.1)

    def test_random_planted_checks_out(self, tmp_path, capsys):
        code, out, _ = run(capsys, "random", "--dim", "4", "--seed", "11")
        assert code == 0
        f = tmp_path / "r.alg"
        f.write_text(out)
        code, _, _ = run(capsys, "check", str(f))
        assert code == 0

    def test_random_adversarial(self, tmp_path, capsys):
        code, out, _ = run(capsys, "random", "--dim", "4", "--seed", "3", "--adversarial", "defective")
        assert code == 0
        f = tmp_path / "a.alg"
        f.write_text(out)
        code, out, _ = run(capsys, "check", str(f), "--json")
        assert code == 1
        assert json.loads(out)["refutation"]["kind"] == "non_diagonalisable"

    def test_verify_accepts_and_rejects(self, tmp_path, capsys):
        good = tmp_path / "good.mat"
        good.write_text(format_matrix(np.array([[1.0, 1.0], [1.0, -1.0]])))
        code, out, _ = run(capsys, "verify", "example://simple2d", "--p", str(good))
        assert code == 0 and "accepted" in out

        bad = tmp_path / "bad.mat"
        bad.write_text(format_matrix(np.eye(2)))
        code, out, _ = run(capsys, "verify", "example://simple2d", "--p", str(bad), "--json")
        assert code == 1
        report = json.loads(out)
        assert report["ok"] is False and report["offending_pair"] == [1, 2]


class TestErrors:
    def test_unknown_subcommand(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 3 and err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check", "no-such-file.alg")
        assert code == 3 and "no-such-file" in err

    def test_parse_error_diagnostics(self, tmp_path, capsys):
        f = tmp_path / "bad.alg"
        f.write_text("field: real\ndim: 2\nm 2 1 1 0.5\n")
        code, _, err = run(capsys, "check", str(f))
        assert code == 3
        assert "line 3" in err and "store i <= j" in err

    def test_epsilon_out_of_range(self, capsys):
        code, _, err = run(capsys, "check", "example://tetraploid", "--epsilon", "0.9")
        assert code == 3 and "epsilon" in err


class TestDeterminism:
    def test_reports_identical_modulo_runtime(self, capsys):
        reports = []
        for _ in range(3):
            _, out, _ = run(capsys, "check", "example://mendel3d_ann", "--epsilon", "0.2", "--json", "--seed", "7")
            blob = json.loads(out)
            blob["diagnostics"].pop("runtime_ms")
            reports.append(json.dumps(blob, sort_keys=True))
        assert len(set(reports)) == 1
