"""
Acceptance suite.

Each criterion is an AcceptanceCheck run over the built-in corpus. A check
fills `results` with one entry per instance; an instance that raises a
GraycatError is recorded as a failure rather than aborting the suite.
"""

import itertools
import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import config
from adc import (
    Adc, Chain, check_basis_conditions, dualize, duality_degrees, globe_adc, nondegenerate_counts, nu_cells, path_adc,
    point_adc, table_problems, tensor, validate,
)
from corpus import ADCS, CATEGORIES, STRICT_IMAGE_CATEGORIES, SUMS, TINY_CATEGORIES, random_functors
from doublecat import (
    bicartesian_squares, cartesian_lift, check_two_sided_fibration, cocartesian_lift, companion_marking,
    companion_of_composite, companion_uniqueness_check, extract_companions, find_companions,
)
from errors import GraycatError
from graymaps import (
    duality_tensor_check, p_s_nm, section_report, verify_cosuspension, verify_susp_colimit,
    verify_susp_tensor_decomposition,
)
from squarecech import cube_level, segal_check, sq2, sq_pair, truncation_pair, verify_sq_fully_faithful, verify_sq_image
from strictcat import factorize, is_n_fully_faithful, is_n_surjective, lifting_oracle, poset_category
from theta import dimension, to_adc

logger = logging.getLogger(__name__)

# Nondegenerate cells of nu([1]⊗[1]) with coefficients ≤ 1
GRID_NU_COUNTS = (4, 6, 1)

# Corpus complexes small enough for the suspension colimits at n = 1, 2
COLIMIT_ADCS = ("point", "interval", "globe1", "globe2", "simplex2")

# Categories without non-identity invertible cells, where lifting and surjectivity agree
ORACLE_CATEGORIES = ("terminal", "interval", "poset2", "walking2cell", "simplex2")

RANDOM_FUNCTOR_COUNT = 50


def brute_force_nu_counts(adc: Adc, max_dim: int, cap: int = 1) -> Tuple[int, ...]:
    """Nondegenerate nu-cells by dimension, testing every table of bounded chains.

    Shares nothing with nu_cells beyond Chain arithmetic and table_problems; used as its oracle.
    """
    chains = {}
    for k in range(max_dim + 1):
        basis = adc.basis(k)
        chains[k] = [Chain(k, dict(zip(basis, coeffs))) for coeffs in itertools.product(range(cap + 1), repeat=len(basis))]
    counts = []
    for d in range(max_dim + 1):
        count = 0
        slots = [chains[i] for i in range(d) for _ in (0, 1)] + [chains[d]]
        for flat in itertools.product(*slots):
            top = flat[-1]
            if d > 0 and top.is_zero:
                continue
            table = [(flat[2 * i], flat[2 * i + 1]) for i in range(d)] + [(top, top)]
            if not table_problems(adc, table):
                count += 1
        counts.append(count)
    return tuple(counts)


class AcceptanceCheck(ABC):
    """Base class for acceptance criteria."""

    number = 0
    title = ""

    def __init__(self, budget: Optional[int] = None, seed: Optional[int] = None, name: str = None):
        """Initialize a check.

        Args:
            budget: Node budget passed to bounded searches
            seed: Seed for randomized corpus sampling
            name: Optional name for this check
        """
        self.name = name or self.__class__.__name__
        self.budget = budget
        self.seed = config.get_seed() if seed is None else seed
        self.results: Dict[str, Dict[str, Any]] = {}
        self.elapsed = 0.0

    @abstractmethod
    def run(self) -> Dict[str, Dict[str, Any]]:
        """Run the criterion over its instances.

        Returns:
            Dictionary of results keyed by instance
        """

    def record(self, instance: str, success: bool, detail: str = "") -> None:
        self.results[instance] = {"success": bool(success), "detail": detail}
        if not success:
            logger.warning("criterion %d, %s: %s", self.number, instance, detail or "failed")

    def attempt(self, instance: str, action) -> None:
        """Record the (success, detail) returned by action, or the error it raises."""
        try:
            success, detail = action()
        except GraycatError as e:
            success, detail = False, f"{type(e).__name__}: {e}"
        self.record(instance, success, detail)

    def get_results(self) -> Dict[str, Dict[str, Any]]:
        return self.results

    def get_success_rate(self) -> float:
        """Percentage of passing instances (0-100)."""
        if not self.results:
            return 0.0
        success_count = sum(1 for result in self.results.values() if result.get("success", False))
        return (success_count / len(self.results)) * 100

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r["success"] for r in self.results.values())


def _report_outcome(report) -> Tuple[bool, str]:
    return report.ok, "; ".join(f"[{v.rule}] {v.subject}" for v in report.violations[:3])


def _sum_pairs(limit: int) -> List[Tuple[str, str]]:
    names = sorted(SUMS)
    return [(a, b) for a in names for b in names if dimension(SUMS[a]()) + dimension(SUMS[b]()) <= limit]


class TensorValidityCheck(AcceptanceCheck):
    """Tensors of corpus globular sums are valid complexes with Steiner bases."""

    number = 1
    title = "ADC validity and tensor"

    def run(self):
        for a, b in _sum_pairs(4):
            def action(a=a, b=b):
                product = tensor(to_adc(SUMS[a]()), to_adc(SUMS[b]()))
                report = validate(product)
                if not report.ok:
                    return _report_outcome(report)
                conditions = check_basis_conditions(product)
                return conditions.all() and conditions.steiner_loop_free, "; ".join(conditions.failures)
            self.attempt(f"{a}⊗{b}", action)
        return self.results


class NuCountCheck(AcceptanceCheck):
    """nu([1]⊗[1]) has (4, 6, 1) nondegenerate cells, confirmed by brute force."""

    number = 2
    title = "ν counts"

    def run(self):
        grid = tensor(path_adc(1), path_adc(1))

        def enumerated():
            counts = nondegenerate_counts(nu_cells(grid, 2, 1, self.budget))
            return counts == GRID_NU_COUNTS, f"counts {counts}"

        def brute():
            counts = brute_force_nu_counts(grid, 2, 1)
            return counts == GRID_NU_COUNTS, f"counts {counts}"

        self.attempt("nu_cells", enumerated)
        self.attempt("brute force", brute)
        return self.results


class SectionCheck(AcceptanceCheck):
    """p ∘ s is the identity for the one-block and multi-block maps."""

    number = 3
    title = "Section identities"

    def run(self):
        blocks = {"[0]": point_adc, "[1]": lambda: path_adc(1), "D2": lambda: globe_adc(2)}
        cases = [(name, n, 1) for name in blocks for n in (1, 2, 3)]
        cases += [(name, n, m) for name in ("[0]", "[1]") for n, m in ((1, 2), (2, 2))]
        for name, n, m in cases:
            self.attempt(f"{name} n={n} m={m}",
                         lambda name=name, n=n, m=m: _report_outcome(section_report(*p_s_nm(blocks[name](), n, m))))
        return self.results


class DecompositionCheck(AcceptanceCheck):
    """Suspensions of tensors and of complexes arise as the stated colimits."""

    number = 4
    title = "Decompositions"

    def run(self):
        bound = config.get_decomposition_bound()
        for a, b in _sum_pairs(bound - 2):
            def action(a=a, b=b):
                witness = verify_susp_tensor_decomposition(SUMS[a](), SUMS[b](), bound)
                return witness.ok, "" if witness.ok else _report_outcome(witness.report)[1]
            self.attempt(f"[{a},1]⊗[{b},1]", action)
        for name in COLIMIT_ADCS:
            for n in (1, 2):
                for kind, verify in (("suspension", verify_susp_colimit), ("cosuspension", verify_cosuspension)):
                    def action(name=name, n=n, verify=verify):
                        witness = verify(ADCS[name](), n)
                        return witness.ok, "" if witness.ok else _report_outcome(witness.report)[1]
                    self.attempt(f"{kind} {name} n={n}", action)
        return self.results


class DualityCheck(AcceptanceCheck):
    """Dualities of tensors and involutivity of dualize."""

    number = 5
    title = "Dualities"

    def run(self):
        for a, b in _sum_pairs(4):
            self.attempt(f"{a}⊗{b}", lambda a=a, b=b: _report_outcome(duality_tensor_check(SUMS[a](), SUMS[b]())))
        for name in sorted(ADCS):
            def action(name=name):
                adc = ADCS[name]()
                bad = [kind for kind in ("op", "co", "full")
                       if dualize(dualize(adc, duality_degrees(kind, adc.top_degree)),
                                  duality_degrees(kind, adc.top_degree)) != adc]
                return not bad, ", ".join(bad)
            self.attempt(f"involution {name}", action)
        return self.results


class CompanionCheck(AcceptanceCheck):
    """Every vertical cell of sq2(c) has companions that paste and are unique up to iso."""

    number = 6
    title = "Companion calculus"

    def run(self):
        for name in sorted(CATEGORIES):
            def action(name=name):
                d = sq2(CATEGORIES[name]())
                problems = [f"no companion for {f}" for f in d.vcells if not find_companions(d, f)]
                if problems:
                    return False, problems[0]
                for (f, g), fg in d.vertical_composition.items():
                    pasted = companion_of_composite(d, find_companions(d, f)[0], find_companions(d, g)[0])
                    if pasted not in find_companions(d, fg):
                        problems.append(f"pasted companion of {f};{g}")
                for f in d.vcells:
                    report = companion_uniqueness_check(d, f)
                    if not report.ok:
                        problems.append(_report_outcome(report)[1])
                return not problems, "; ".join(problems[:3])
            self.attempt(name, action)
        return self.results


class FibrationCheck(AcceptanceCheck):
    """Companion markings are two-sided fibrations, and companions come back out."""

    number = 7
    title = "Fibration lifting"

    def run(self):
        for name in STRICT_IMAGE_CATEGORIES:
            def action(name=name):
                d = companion_marking(sq2(CATEGORIES[name]()))
                report = check_two_sided_fibration(d)
                if not report.ok:
                    return _report_outcome(report)
                extracted = extract_companions(d)
                if any(t not in find_companions(d, f) for f, t in extracted.items()):
                    return False, "extracted data is not a companion"
                marked = set(bicartesian_squares(d))
                for u, (x, y) in d.hcells.items():
                    for t in d.vcells:
                        lifts = []
                        if y == d.vsrc(t):
                            lifts.append(cocartesian_lift(d, u, t))
                        if x == d.vtgt(t):
                            lifts.append(cartesian_lift(d, u, t))
                        for lift in lifts:
                            b = d.boundary(lift)
                            rivals = [a for a in d.squares_with(b.top, b.bottom, b.left, b.right) if a in marked]
                            if rivals != [lift]:
                                return False, f"{len(rivals)} bicartesian squares share the boundary of {lift}"
                return True, f"{len(extracted)} companions extracted"
            self.attempt(name, action)
        return self.results


class SquareImageCheck(AcceptanceCheck):
    """sq2 lands in accompanied complete double categories and is fully faithful."""

    number = 8
    title = "Square-functor image and fidelity"

    def run(self):
        for name in STRICT_IMAGE_CATEGORIES:
            self.attempt(f"image {name}", lambda name=name: _report_outcome(verify_sq_image(CATEGORIES[name]())))
        for a, b in itertools.product(TINY_CATEGORIES, repeat=2):
            def action(a=a, b=b):
                report = verify_sq_fully_faithful(CATEGORIES[a](), CATEGORIES[b](), self.budget)
                ok, detail = _report_outcome(report)
                return ok, detail or f"{report.facts['functors']} functors"
            self.attempt(f"fully faithful {a}→{b}", action)

        def cube():
            count = cube_level(poset_category(1), 1, 1, self.budget)
            return count == 6, f"{count} squares"
        self.attempt("cube [1]⊗[1]", cube)
        return self.results


class SurjectivityCheck(AcceptanceCheck):
    """n-surjectivity agrees with the lifting oracle; factorizations have the stated factors."""

    number = 9
    title = "Surjectivity calculus"

    def run(self):
        functors = random_functors(self.seed, RANDOM_FUNCTOR_COUNT, ORACLE_CATEGORIES, self.budget)
        for index, f in enumerate(functors):
            def action(f=f):
                mismatches = [n for n in (0, 1, 2) if is_n_surjective(f, n) != lifting_oracle(f, n)]
                if mismatches:
                    return False, f"disagree at n={mismatches}"
                for n in (0, 1):
                    e, g = factorize(f, n)
                    if not (is_n_surjective(e, n) and is_n_fully_faithful(g, n + 1)):
                        return False, f"factors at n={n} lack their properties"
                    composite = e.then(g)
                    if any(composite(x) != f(x) for x in f.source.all_cells()):
                        return False, f"factors at n={n} do not compose to f"
                return True, ""
            self.attempt(f"#{index} {f.name}", action)
        return self.results


class SegalCheck(AcceptanceCheck):
    """Čech levels satisfy the Segal condition, and sq_pair recovers sq2."""

    number = 10
    title = "Čech Segal levels"

    def run(self):
        for name in ("terminal", "interval", "poset2", "walking2cell"):
            c = CATEGORIES[name]()
            for m in (2, 3):
                self.attempt(f"{name} m={m}", lambda c=c, m=m: _report_outcome(segal_check(truncation_pair(c), m)))
            self.attempt(f"sq_pair {name}", lambda c=c: (sq_pair(truncation_pair(c)) == sq2(c), ""))
        return self.results


CHECKS = (TensorValidityCheck, NuCountCheck, SectionCheck, DecompositionCheck, DualityCheck,
          CompanionCheck, FibrationCheck, SquareImageCheck, SurjectivityCheck, SegalCheck)


class AcceptanceRunner:
    """Runner for the acceptance criteria."""

    @staticmethod
    def run(only: Optional[Sequence[int]] = None, budget: Optional[int] = None,
            seed: Optional[int] = None) -> List[AcceptanceCheck]:
        """Run the selected criteria (all by default) in order.

        Args:
            only: Criterion numbers to run
            budget: Node budget passed to every check
            seed: Seed for randomized corpus sampling
        """
        checks = []
        for cls in CHECKS:
            if only and cls.number not in only:
                continue
            check = cls(budget=budget, seed=seed)
            started = time.perf_counter()
            check.run()
            check.elapsed = time.perf_counter() - started
            logger.info("criterion %d (%s): %.0f%% in %.2fs", check.number, check.title,
                        check.get_success_rate(), check.elapsed)
            checks.append(check)
        return checks

    @staticmethod
    def summary(checks: Sequence[AcceptanceCheck]) -> Dict[str, Any]:
        """Outcome per criterion; timings are left out so that reruns compare equal."""
        return {
            "passed": all(check.passed for check in checks),
            "criteria": [
                {
                    "number": check.number,
                    "title": check.title,
                    "passed": check.passed,
                    "success_rate": round(check.get_success_rate(), 1),
                    "failures": {k: r["detail"] for k, r in check.results.items() if not r["success"]},
                }
                for check in checks
            ],
        }

    @staticmethod
    def format_table(checks: Sequence[AcceptanceCheck]) -> str:
        lines = [f"{'#':>3}  {'criterion':<36} {'instances':>9}  result"]
        for check in checks:
            mark = "✅" if check.passed else "❌"
            lines.append(f"{check.number:>3}  {check.title:<36} {len(check.results):>9}  {mark}")
            for instance, result in check.results.items():
                if not result["success"]:
                    lines.append(f"       ❌ {instance}: {result['detail'] or 'failed'}")
        passed = sum(1 for check in checks if check.passed)
        lines.append(f"\n{passed}/{len(checks)} criteria passed")
        return "\n".join(lines)

    @staticmethod
    def print_results(checks: Sequence[AcceptanceCheck]) -> None:
        print(AcceptanceRunner.format_table(checks))
