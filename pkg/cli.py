#!/usr/bin/env python
"""
Command-line interface for graycat.

Every command reads its inputs as corpus names or JSON files, writes one
structured result to standard output and diagnostics to standard error.
Exit status: 0 on success, 1 when a verification fails or a search runs out
of budget, 2 on usage, parse and configuration errors.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import config
import corpus
from acceptance import AcceptanceRunner
from adc import Adc, check_basis_conditions, dualize, duality_degrees, nondegenerate_counts, nu_cells, tensor, validate
from doublecat import (
    FiniteDoubleCat, READINGS, bicartesian_squares, check_two_sided_fibration, companion_marking,
    companion_table, companion_uniqueness_check, compare_bicartesian_readings, validate_double,
)
from dot_export import export_dot
from errors import (
    BudgetExceededError, ConfigError, CorpusError, DimensionBoundError, GraycatError, InvalidCategoryError,
    InvalidComplexError, PairConditionError,
)
from graymaps import (
    p_s_nm, section_report, verify_cosuspension, verify_susp_colimit, verify_susp_tensor_decomposition,
)
from reports import Report
from squarecech import (
    cech_level, cube_level, segal_check, sq2, sq_pair, verify_sq_fully_faithful, verify_sq_image,
)
from strictcat import (
    enumerate_functors, factorize, is_n_fully_faithful, is_n_surjective, lifting_oracle, validate_category,
)
from theta import spine

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# Input errors are reported as usage errors; other GraycatErrors count as failures
USAGE_ERRORS = (ConfigError, CorpusError, DimensionBoundError, InvalidCategoryError, InvalidComplexError,
                PairConditionError, ValueError)


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every command.

    Args:
        budget: Node budget for bounded searches
        cap: Coefficient cap for nu-cell chains
        format: Output format (json, text or dot)
        seed: Seed for randomized corpus sampling
    """
    budget: int
    cap: int
    format: str
    seed: int

    def __post_init__(self):
        if self.budget <= 0:
            raise ConfigError(f"budget must be positive, got {self.budget}")
        if self.cap < 1:
            raise ConfigError(f"coefficient cap must be at least 1, got {self.cap}")
        if self.format not in config.OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {', '.join(config.OUTPUT_FORMATS)}, got {self.format!r}")

    @classmethod
    def from_sources(cls, args: argparse.Namespace) -> "RunConfig":
        """Flags first, then GRAYCAT_* environment variables, then the defaults in config."""
        return cls(
            budget=args.budget if args.budget is not None else config.get_budget(),
            cap=args.cap if args.cap is not None else config.get_cap(),
            format=args.format if args.format is not None else config.get_format(),
            seed=args.seed if args.seed is not None else config.get_seed(),
        )


@dataclass
class Outcome:
    """What a command produced.

    Args:
        data: JSON-ready value (or anything corpus.to_json accepts)
        ok: Whether the command's verification passed
        text: Text rendering; defaults to the JSON document
        drawable: Value handed to export_dot for --format dot
    """
    data: Any
    ok: bool = True
    text: Optional[str] = None
    drawable: Any = None


def _report(report: Report, drawable: Any = None) -> Outcome:
    return Outcome(report, report.ok, str(report), drawable)


def _adc_text(adc: Adc) -> str:
    lines = [f"{adc.name or 'complex'}: basis sizes {tuple(adc.size_by_degree())}"]
    for element in adc.elements():
        if element.degree > 0:
            lines.append(f"  ∂{element.id} = {adc.boundary(element.id)}")
    return "\n".join(lines)


def _double_text(d: FiniteDoubleCat) -> str:
    return (f"{d.name}: {len(d.objects)} objects, {len(d.vcells)} vertical cells, "
            f"{len(d.hcells)} horizontal cells, {len(d.squares)} squares")


# -- commands ---------------------------------------------------------------

def cmd_validate(args, run: RunConfig) -> Outcome:
    if args.kind == "adc":
        adc = corpus.resolve_adc(args.input)
        return _report(validate(adc), adc)
    if args.kind == "category":
        return _report(validate_category(corpus.resolve_category(args.input)))
    d = corpus.resolve_double(args.input)
    return _report(validate_double(d), d)


def cmd_tensor(args, run: RunConfig) -> Outcome:
    product = tensor(corpus.resolve_adc(args.left), corpus.resolve_adc(args.right))
    return Outcome(product, True, _adc_text(product), product)


def cmd_nu(args, run: RunConfig) -> Outcome:
    adc = corpus.resolve_adc(args.input)
    cells = nu_cells(adc, args.dim, run.cap, run.budget)
    counts = nondegenerate_counts(cells)
    data = {"counts": list(counts), "cells": [str(c) for c in cells if not c.is_degenerate]}
    text = "\n".join([f"nondegenerate cells by dimension: {counts}"] + [f"  {c}" for c in data["cells"]])
    return Outcome(data, True, text, adc)


def cmd_basis_check(args, run: RunConfig) -> Outcome:
    adc = corpus.resolve_adc(args.input)
    conditions = check_basis_conditions(adc)
    ok = conditions.all()
    lines = [f"{name}: {'✅' if value else '❌'}" for name, value in conditions.to_dict().items() if name != "failures"]
    lines += [f"  - {failure}" for failure in conditions.failures]
    return Outcome(conditions, ok, "\n".join(lines), adc)


def cmd_p_s_verify(args, run: RunConfig) -> Outcome:
    p, s = p_s_nm(corpus.resolve_adc(args.A), args.n, args.m)
    report = section_report(p, s)
    text = f"section: {'OK' if report.ok else 'FAILED'}\n{report}"
    return Outcome(report, report.ok, text, p.source)


def cmd_decompose(args, run: RunConfig) -> Outcome:
    if args.kind == "tensor":
        if args.right is None:
            raise ValueError("tensor decomposition needs two globular sums")
        witness = verify_susp_tensor_decomposition(corpus.resolve_sum(args.left), corpus.resolve_sum(args.right),
                                                   args.bound)
    else:
        verify = verify_susp_colimit if args.kind == "suspension" else verify_cosuspension
        witness = verify(corpus.resolve_adc(args.left), args.n)
    status = "✅ isomorphism found" if witness.ok else "❌ no isomorphism"
    return Outcome(witness, witness.ok, f"{status}\n{witness.report}", witness)


def cmd_dualize(args, run: RunConfig) -> Outcome:
    adc = corpus.resolve_adc(args.input)
    dual = dualize(adc, duality_degrees(args.kind, adc.top_degree))
    return Outcome(dual, True, _adc_text(dual), dual)


def cmd_spine(args, run: RunConfig) -> Outcome:
    a = corpus.resolve_sum(args.input)
    presentation = spine(a)
    data = {"sum": str(a), "spine": str(presentation), "globes": list(presentation.globes),
            "gluings": list(presentation.gluings)}
    return Outcome(data, True, f"{a}: {presentation}")


def _functors(args, run: RunConfig):
    source, target = corpus.resolve_category(args.source), corpus.resolve_category(args.target)
    return enumerate_functors(source, target, run.budget)


def cmd_functors(args, run: RunConfig) -> Outcome:
    functors = _functors(args, run)
    data = {"count": len(functors), "functors": [corpus.to_json(f) for f in functors]}
    return Outcome(data, True, f"{len(functors)} functors {args.source} → {args.target}")


def cmd_ffsurj(args, run: RunConfig) -> Outcome:
    rows = []
    for index, f in enumerate(_functors(args, run)):
        rows.append({
            "index": index,
            "surjective": is_n_surjective(f, args.n),
            "fully_faithful": is_n_fully_faithful(f, args.n),
            "lifting": lifting_oracle(f, args.n),
        })
    lines = [f"#{r['index']}: {args.n}-surjective {r['surjective']}, {args.n}-fully faithful "
             f"{r['fully_faithful']}, lifting {r['lifting']}" for r in rows]
    return Outcome(rows, True, "\n".join(lines) or "no functors")


def cmd_factorize(args, run: RunConfig) -> Outcome:
    functors = _functors(args, run)
    if not 0 <= args.index < len(functors):
        raise ValueError(f"functor index {args.index} out of range; there are {len(functors)}")
    f = functors[args.index]
    e, g = factorize(f, args.n)
    report = Report(f"factorization at n={args.n}")
    if not is_n_surjective(e, args.n):
        report.add("e", "surjective", f"first factor is not {args.n}-surjective")
    if not is_n_fully_faithful(g, args.n + 1):
        report.add("g", "fully-faithful", f"second factor is not {args.n + 1}-fully faithful")
    composite = e.then(g)
    if any(composite(x) != f(x) for x in f.source.all_cells()):
        report.add("e;g", "composite", "factors do not compose to the input")
    report.facts["middle"] = list(e.target.nondegenerate_counts())
    return _report(report)


def cmd_companions(args, run: RunConfig) -> Outcome:
    d = corpus.resolve_double(args.input)
    if args.vcell is not None:
        return _report(companion_uniqueness_check(d, args.vcell), d)
    table = companion_table(d)
    data = {str(f): [t.to_dict() for t in triples] for f, triples in table.items()}
    lines = [f"{f}: {', '.join(str(t.companion) for t in triples) or '❌ none'}" for f, triples in table.items()]
    return Outcome(data, all(table.values()), "\n".join(lines), d)


def cmd_bicartesian(args, run: RunConfig) -> Outcome:
    d = corpus.resolve_double(args.input)
    if args.compare:
        return _report(compare_bicartesian_readings(d), d)
    squares = bicartesian_squares(d, args.reading)
    return Outcome([str(a) for a in squares], True,
                   "\n".join([f"{len(squares)}/{len(d.squares)} bicartesian squares"] + [f"  {a}" for a in squares]), d)


def cmd_fibration_check(args, run: RunConfig) -> Outcome:
    d = corpus.resolve_double(args.input)
    if args.marking == "companion":
        d = companion_marking(d)
    elif args.marking == "trivial":
        d = d.trivially_marked()
    return _report(check_two_sided_fibration(d, up_to_iso=not args.strict), d)


def cmd_sq2(args, run: RunConfig) -> Outcome:
    d = sq2(corpus.resolve_category(args.input))
    return Outcome(d, True, _double_text(d), d)


def cmd_sqpair(args, run: RunConfig) -> Outcome:
    d = sq_pair(corpus.resolve_filtration(args.input))
    return Outcome(d, True, _double_text(d), d)


def cmd_cech(args, run: RunConfig) -> Outcome:
    filt = corpus.resolve_filtration(args.input)
    if args.segal:
        return _report(segal_check(filt, args.m))
    level = cech_level(filt, args.m)
    return Outcome(level, True, f"level {args.m}: {len(level.objects)} objects, {len(level.cells(1))} morphisms")


def cmd_cube(args, run: RunConfig) -> Outcome:
    count = cube_level(corpus.resolve_category(args.input), args.k1, args.k2, run.budget)
    return Outcome({"k1": args.k1, "k2": args.k2, "count": count}, True, str(count))


def cmd_verify_image(args, run: RunConfig) -> Outcome:
    return _report(verify_sq_image(corpus.resolve_category(args.input)))


def cmd_verify_ff(args, run: RunConfig) -> Outcome:
    source, target = corpus.resolve_category(args.source), corpus.resolve_category(args.target)
    return _report(verify_sq_fully_faithful(source, target, run.budget))


def cmd_acceptance(args, run: RunConfig) -> Outcome:
    checks = AcceptanceRunner.run(args.only, run.budget, run.seed)
    summary = AcceptanceRunner.summary(checks)
    return Outcome(summary, summary["passed"], AcceptanceRunner.format_table(checks))


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], Outcome]] = {
    "validate": cmd_validate,
    "tensor": cmd_tensor,
    "nu": cmd_nu,
    "basis-check": cmd_basis_check,
    "p-s-verify": cmd_p_s_verify,
    "decompose": cmd_decompose,
    "dualize": cmd_dualize,
    "spine": cmd_spine,
    "functors": cmd_functors,
    "ffsurj": cmd_ffsurj,
    "factorize": cmd_factorize,
    "companions": cmd_companions,
    "bicartesian": cmd_bicartesian,
    "fibration-check": cmd_fibration_check,
    "sq2": cmd_sq2,
    "sqpair": cmd_sqpair,
    "cech": cmd_cech,
    "cube": cmd_cube,
    "verify-image": cmd_verify_image,
    "verify-ff": cmd_verify_ff,
    "acceptance": cmd_acceptance,
}


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graycat",
        description="Compute with augmented directed complexes, strict categories and double categories of squares",
    )

    run_group = parser.add_argument_group('Run Options')
    run_group.add_argument('--budget', type=int, help=f'Search node budget (env {config.ENV_PREFIX}BUDGET)')
    run_group.add_argument('--cap', type=int, help=f'Coefficient cap for nu cells (env {config.ENV_PREFIX}CAP)')
    run_group.add_argument('--seed', type=int, help=f'Seed for randomized sampling (env {config.ENV_PREFIX}SEED)')

    output_group = parser.add_argument_group('Output Options')
    output_group.add_argument('--format', choices=config.OUTPUT_FORMATS,
                              help=f'Output format (env {config.ENV_PREFIX}FORMAT)')
    output_group.add_argument('--log-level', help=f'Logging level (env {config.ENV_PREFIX}LOG_LEVEL)')
    output_group.add_argument('--verbose', '-v', action='store_true', help='Log progress at INFO level')
    output_group.add_argument('--save', metavar='NAME',
                              help=f'Also save the JSON result as NAME (a path, or a name under env {config.ENV_PREFIX}CORPUS_DIR)')

    commands = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    p = commands.add_parser('validate', help='Check a complex, category or double category')
    p.add_argument('input')
    p.add_argument('--kind', choices=('adc', 'category', 'double'), default='adc')

    p = commands.add_parser('tensor', help='Gray tensor product of two complexes')
    p.add_argument('left')
    p.add_argument('right')

    p = commands.add_parser('nu', help='Enumerate the cells of nu(K)')
    p.add_argument('input')
    p.add_argument('--dim', type=int, default=2, help='Largest cell dimension')

    p = commands.add_parser('basis-check', help='Unital, atomic and loop-free basis conditions')
    p.add_argument('input')

    p = commands.add_parser('p-s-verify', help='Check that s is a section of p')
    p.add_argument('--A', dest='A', required=True, metavar='COMPLEX')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--m', type=int, default=1)

    p = commands.add_parser('decompose', help='Exhibit a suspension as a colimit')
    p.add_argument('left', help='Globular sum (tensor) or complex (suspension, cosuspension)')
    p.add_argument('right', nargs='?', help='Second globular sum for the tensor decomposition')
    p.add_argument('--kind', choices=('tensor', 'suspension', 'cosuspension'), default='tensor')
    p.add_argument('--n', type=int, default=1, help='Number of suspended copies')
    p.add_argument('--bound', type=int, help=f'Dimension bound (env {config.ENV_PREFIX}BOUND)')

    p = commands.add_parser('dualize', help='Reverse the cells of some dimensions')
    p.add_argument('input')
    p.add_argument('--kind', choices=('op', 'co', 'full'), default='op')

    p = commands.add_parser('spine', help='Spine of a globular sum')
    p.add_argument('input')

    for name, help_text in (('functors', 'Enumerate strict functors'),
                            ('ffsurj', 'n-surjectivity and n-full-faithfulness of every functor'),
                            ('factorize', 'Factor a functor as n-surjective then (n+1)-fully faithful')):
        p = commands.add_parser(name, help=help_text)
        p.add_argument('source')
        p.add_argument('target')
        if name != 'functors':
            p.add_argument('--n', type=int, default=0)
        if name == 'factorize':
            p.add_argument('--index', type=int, default=0, help='Which enumerated functor to factor')

    p = commands.add_parser('companions', help='Companion table of a double category')
    p.add_argument('input', help='sq2:<category>, vertical:<category> or a JSON file')
    p.add_argument('--vcell', help='Check uniqueness of the companions of one vertical cell')

    p = commands.add_parser('bicartesian', help='Bicartesian squares of a double category')
    p.add_argument('input')
    p.add_argument('--reading', choices=READINGS, default='transpose')
    p.add_argument('--compare', action='store_true', help='Report squares where the readings differ')

    p = commands.add_parser('fibration-check', help='Two-sided fibration conditions')
    p.add_argument('input')
    p.add_argument('--marking', choices=('companion', 'trivial', 'given'), default='companion')
    p.add_argument('--strict', action='store_true',
                   help='Require lifts unique on the nose, not up to an invertible globular square')

    p = commands.add_parser('sq2', help='Double category of lax squares')
    p.add_argument('input')

    p = commands.add_parser('sqpair', help='Lax squares of a filtration')
    p.add_argument('input', help='truncation:<category> or a JSON file')

    p = commands.add_parser('cech', help='Čech levels of a filtration')
    p.add_argument('input', help='truncation:<category> or a JSON file')
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--segal', action='store_true', help='Check the Segal condition at level m')

    p = commands.add_parser('cube', help='Count functors out of nu([k1]⊗[k2])')
    p.add_argument('input')
    p.add_argument('--k1', type=int, default=1)
    p.add_argument('--k2', type=int, default=1)

    p = commands.add_parser('verify-image', help='sq2(c) is accompanied and complete')
    p.add_argument('input')

    p = commands.add_parser('verify-ff', help='sq2 is a bijection on functors')
    p.add_argument('source')
    p.add_argument('target')

    p = commands.add_parser('acceptance', help='Run the acceptance suite')
    p.add_argument('--only', type=int, nargs='+', metavar='N', help='Criterion numbers to run')

    return parser


def setup_logging(args: argparse.Namespace) -> None:
    level_name = args.log_level.upper() if args.log_level else ("INFO" if args.verbose else config.get_log_level())
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        raise ConfigError(f"unknown log level {level_name!r}")
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(level)


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "dot":
        if outcome.drawable is None:
            raise GraycatError("this command has no DOT rendering")
        return export_dot(outcome.drawable)
    if fmt == "text" and outcome.text is not None:
        return outcome.text
    return json.dumps(corpus.to_json(outcome.data), ensure_ascii=False, indent=2, sort_keys=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        setup_logging(args)
        run = RunConfig.from_sources(args)
        if getattr(args, 'bound', None) is None and args.command == 'decompose':
            args.bound = config.get_decomposition_bound()
        outcome = COMMANDS[args.command](args, run)
        output = render(outcome, run.format)
        if args.save:
            path = corpus.save_json(outcome.data, corpus.saved_path(args.save))
            print(f"✅ saved to {path}", file=sys.stderr)
    except json.JSONDecodeError as e:
        print(f"❌ malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAILED
    except USAGE_ERRORS as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except GraycatError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAILED
    except OSError as e:
        print(f"❌ could not save: {e}", file=sys.stderr)
        return EXIT_FAILED

    print(output)
    return EXIT_OK if outcome.ok else EXIT_FAILED


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nOperation cancelled.", file=sys.stderr)
        sys.exit(EXIT_FAILED)
