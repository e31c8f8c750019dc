"""
Tests for the command-line interface.
"""

import json

import pytest

from adc import Adc, path_adc, tensor
from cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, RunConfig, build_parser, main
from errors import ConfigError


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _run_json(capsys, *argv):
    code, out, err = _run(capsys, "--format", "json", *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


class TestRunConfig:
    def test_defaults(self, monkeypatch):
        for name in ("BUDGET", "CAP", "FORMAT", "SEED"):
            monkeypatch.delenv(f"GRAYCAT_{name}", raising=False)
        run = RunConfig.from_sources(build_parser().parse_args(["spine", "point"]))
        assert run.format == "text"
        assert run.cap == 1

    def test_flags_override_environment(self, monkeypatch):
        monkeypatch.setenv("GRAYCAT_BUDGET", "10")
        run = RunConfig.from_sources(build_parser().parse_args(["--budget", "99", "spine", "point"]))
        assert run.budget == 99

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("GRAYCAT_FORMAT", "json")
        run = RunConfig.from_sources(build_parser().parse_args(["spine", "point"]))
        assert run.format == "json"

    @pytest.mark.parametrize("kwargs", [
        {"budget": 0, "cap": 1, "format": "json", "seed": 1},
        {"budget": 5, "cap": 0, "format": "json", "seed": 1},
        {"budget": 5, "cap": 1, "format": "yaml", "seed": 1},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(**kwargs)


class TestComplexCommands:
    def test_validate(self, capsys):
        code, out, _ = _run(capsys, "validate", "gridsquare")
        assert code == EXIT_OK
        assert "✅ OK" in out

    def test_nu_counts(self, capsys):
        data = _run_json(capsys, "nu", "gridsquare", "--dim", "2")
        assert data["counts"] == [4, 6, 1]
        assert len(data["cells"]) == 11

    def test_tensor(self, capsys):
        data = _run_json(capsys, "tensor", "interval", "interval")
        sizes = [sum(1 for b in data["basis"] if b["degree"] == k) for k in range(3)]
        assert sizes == [4, 4, 1]

    def test_json_reloads(self, capsys, tmp_path):
        data = _run_json(capsys, "tensor", "interval", "interval")
        assert Adc.from_dict(data) == tensor(path_adc(1), path_adc(1))
        path = tmp_path / "square.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        code, _, _ = _run(capsys, "validate", str(path))
        assert code == EXIT_OK

    def test_save_and_reuse(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("GRAYCAT_CORPUS_DIR", str(tmp_path))
        code, _, err = _run(capsys, "--save", "square", "tensor", "interval", "interval")
        assert code == EXIT_OK
        assert (tmp_path / "square.json").exists()
        assert "saved" in err
        data = _run_json(capsys, "tensor", "square", "interval")
        assert sum(1 for b in data["basis"] if b["degree"] == 3) == 1

    def test_basis_check(self, capsys):
        code, out, _ = _run(capsys, "basis-check", "simplex2")
        assert code == EXIT_OK
        assert "unital: ✅" in out

    def test_p_s_verify(self, capsys):
        code, out, _ = _run(capsys, "p-s-verify", "--A", "globe2", "--n", "3")
        assert code == EXIT_OK
        assert out.startswith("section: OK")

    def test_decompose(self, capsys):
        code, out, _ = _run(capsys, "decompose", "point", "point")
        assert code == EXIT_OK
        assert out.startswith("✅")

    def test_decompose_suspension(self, capsys):
        data = _run_json(capsys, "decompose", "globe1", "--kind", "suspension", "--n", "2")
        assert data["ok"]

    def test_decompose_over_bound(self, capsys):
        code, _, err = _run(capsys, "decompose", "globe2", "globe1")
        assert code == EXIT_USAGE
        assert err.startswith("❌")

    def test_dualize_round_trip(self, capsys):
        data = _run_json(capsys, "dualize", "globe2", "--kind", "full")
        assert len(data["basis"]) == 5

    def test_spine(self, capsys):
        code, out, _ = _run(capsys, "spine", "path3")
        assert code == EXIT_OK
        assert "D1 ∪_D0 D1 ∪_D0 D1" in out

    def test_dot(self, capsys):
        code, out, _ = _run(capsys, "--format", "dot", "tensor", "interval", "interval")
        assert code == EXIT_OK
        assert out.startswith("digraph")

    def test_dot_unsupported(self, capsys):
        code, _, err = _run(capsys, "--format", "dot", "spine", "point")
        assert code == EXIT_FAILED
        assert "DOT" in err


class TestCategoryCommands:
    def test_functors(self, capsys):
        data = _run_json(capsys, "functors", "interval", "interval")
        assert data["count"] == 3

    def test_ffsurj(self, capsys):
        rows = _run_json(capsys, "ffsurj", "interval", "terminal", "--n", "0")
        assert len(rows) == 1
        assert rows[0]["surjective"]

    def test_factorize(self, capsys):
        code, out, err = _run(capsys, "factorize", "poset2", "interval", "--n", "0")
        assert code == EXIT_OK, out + err

    def test_factorize_index_out_of_range(self, capsys):
        code, _, _ = _run(capsys, "factorize", "terminal", "terminal", "--index", "5")
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("k1,k2,expected", [(1, 1, "6"), (0, 0, "3")])
    def test_cube(self, capsys, k1, k2, expected):
        code, out, _ = _run(capsys, "cube", "poset2" if k1 == 0 else "interval",
                            "--k1", str(k1), "--k2", str(k2))
        assert code == EXIT_OK
        assert out.strip() == expected


class TestDoubleCommands:
    def test_sq2(self, capsys):
        code, out, _ = _run(capsys, "sq2", "interval")
        assert code == EXIT_OK
        assert "6 squares" in out

    def test_companions(self, capsys):
        code, out, _ = _run(capsys, "companions", "sq2:interval")
        assert code == EXIT_OK
        assert "❌" not in out

    def test_fibration(self, capsys):
        code, out, _ = _run(capsys, "fibration-check", "sq2:interval")
        assert code == EXIT_OK, out

    def test_trivial_marking_fails(self, capsys):
        code, out, _ = _run(capsys, "fibration-check", "sq2:interval", "--marking", "trivial")
        assert code == EXIT_FAILED
        assert "[1a]" in out

    def test_fibration_strict(self, capsys):
        code, _, _ = _run(capsys, "fibration-check", "sq2:isocell")
        assert code == EXIT_OK
        code, out, _ = _run(capsys, "fibration-check", "sq2:isocell", "--strict")
        assert code == EXIT_FAILED
        assert "[1a]" in out

    def test_bicartesian(self, capsys):
        code, out, _ = _run(capsys, "bicartesian", "sq2:interval")
        assert code == EXIT_OK
        assert "/6 bicartesian squares" in out

    def test_sqpair(self, capsys):
        code, out, _ = _run(capsys, "sqpair", "truncation:interval")
        assert code == EXIT_OK
        assert "6 squares" in out

    def test_cech_segal(self, capsys):
        code, _, _ = _run(capsys, "cech", "truncation:poset2", "--m", "2", "--segal")
        assert code == EXIT_OK

    def test_verify_image(self, capsys):
        code, _, _ = _run(capsys, "verify-image", "interval")
        assert code == EXIT_OK

    def test_verify_ff(self, capsys):
        data = _run_json(capsys, "verify-ff", "interval", "interval")
        assert data["ok"]
        assert data["facts"]["functors"] == data["facts"]["double_functors"] == 3


class TestErrors:
    def test_unknown_name(self, capsys):
        code, _, err = _run(capsys, "validate", "nosuchthing")
        assert code == EXIT_USAGE
        assert "unknown complex" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = _run(capsys, "validate", str(tmp_path / "absent.json"))
        assert code == EXIT_USAGE

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"basis": [\n  oops]}', encoding="utf-8")
        code, _, err = _run(capsys, "validate", str(path))
        assert code == EXIT_USAGE
        assert "line 2" in err

    def test_bad_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("GRAYCAT_BUDGET", "lots")
        code, _, err = _run(capsys, "spine", "point")
        assert code == EXIT_USAGE
        assert "GRAYCAT_BUDGET" in err

    def test_budget_exhausted(self, capsys):
        code, _, _ = _run(capsys, "--budget", "1", "functors", "poset2", "poset2")
        assert code == EXIT_FAILED

    def test_missing_command(self, capsys):
        code, _, _ = _run(capsys)
        assert code == EXIT_USAGE

    def test_acceptance_subset(self, capsys):
        code, out, _ = _run(capsys, "acceptance", "--only", "2")
        assert code == EXIT_OK
        assert "1/1 criteria passed" in out
