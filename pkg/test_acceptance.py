"""
Tests for the acceptance suite and its brute-force nu oracle.
"""

import pytest

from acceptance import CHECKS, GRID_NU_COUNTS, AcceptanceCheck, AcceptanceRunner, brute_force_nu_counts
from adc import globe_adc, nondegenerate_counts, nu_cells, path_adc, tensor
from errors import CompanionError


class _FlakyCheck(AcceptanceCheck):
    number = 99
    title = "flaky"

    def run(self):
        self.attempt("good", lambda: (True, ""))
        self.attempt("bad", lambda: (False, "wrong"))

        def broken():
            raise CompanionError("no companion")

        self.attempt("broken", broken)
        return self.results


class TestBruteForce:
    def test_grid(self):
        assert brute_force_nu_counts(tensor(path_adc(1), path_adc(1)), 2) == GRID_NU_COUNTS

    @pytest.mark.parametrize("make,max_dim", [
        (lambda: path_adc(1), 1),
        (lambda: path_adc(2), 1),
        (lambda: globe_adc(2), 2),
    ])
    def test_agrees_with_enumeration(self, make, max_dim):
        adc = make()
        expected = nondegenerate_counts(nu_cells(adc, max_dim, 1))
        counts = brute_force_nu_counts(adc, max_dim)
        assert counts[:len(expected)] == expected
        assert all(c == 0 for c in counts[len(expected):])


class TestChecks:
    def test_success_rate(self):
        check = _FlakyCheck()
        check.run()
        assert check.get_success_rate() == pytest.approx(100 / 3)
        assert not check.passed
        assert check.get_results()["broken"]["detail"].startswith("CompanionError")

    def test_empty(self):
        check = _FlakyCheck()
        assert check.get_success_rate() == 0.0
        assert not check.passed

    def test_numbers(self):
        assert [cls.number for cls in CHECKS] == list(range(1, 11))


class TestRunner:
    @pytest.mark.parametrize("number", range(1, 11))
    def test_criterion_passes(self, number):
        (check,) = AcceptanceRunner.run(only=[number])
        assert check.number == number
        failures = {k: r["detail"] for k, r in check.results.items() if not r["success"]}
        assert check.passed, failures

    def test_summary_is_reproducible(self):
        first = AcceptanceRunner.summary(AcceptanceRunner.run(only=[2, 3], seed=7))
        second = AcceptanceRunner.summary(AcceptanceRunner.run(only=[2, 3], seed=7))
        assert first == second
        assert first["passed"]
        assert [c["number"] for c in first["criteria"]] == [2, 3]

    def test_table(self, capsys):
        checks = AcceptanceRunner.run(only=[2])
        AcceptanceRunner.print_results(checks)
        out = capsys.readouterr().out
        assert "ν counts" in out
        assert "✅" in out
        assert "1/1 criteria passed" in out

    def test_failures_listed(self):
        check = _FlakyCheck()
        check.run()
        table = AcceptanceRunner.format_table([check])
        assert "❌ bad: wrong" in table
        assert AcceptanceRunner.summary([check])["criteria"][0]["failures"]["bad"] == "wrong"
