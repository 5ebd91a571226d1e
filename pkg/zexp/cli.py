"""Command-line surface: expand, xmp, verify, bch, eval and bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import yaml

from zexp.bch import ALPHABET as BCH_ALPHABET, Family, bch_symmetrized, bch_terms
from zexp.config import ZexpConfig, load_config
from zexp.freealg import NonNilpotentSeriesError, TruncationMismatchError
from zexp.metrics import write_metrics
from zexp.numeric import (
    DimensionMismatchError,
    MatrixFormatError,
    convergence_scan,
    expm,
    frobenius_error,
    random_assignment,
    triangular_assignment,
    zassenhaus_apply,
)
from zexp.render import (
    LATEX_SYMBOLS,
    checks_text,
    factorized_latex,
    graded_text,
    matrix_latex,
    matrix_text,
    symmetrized_latex,
    terms_latex,
    terms_text,
)
from zexp.schemas import (
    AssignmentPayload,
    BenchPayload,
    CheckPayload,
    CompositionTermPayload,
    EvalPayload,
    ExpansionPayload,
    MatrixPayload,
    PolynomialPayload,
    RationalPayload,
    ReportPayload,
    VerifyPayload,
    XmpPayload,
    dump_json,
)
from zexp.verify import SUITE_ORDER, first_failure, run_suite
from zexp.zassenhaus import (
    ExpansionConfig,
    IndexRangeError,
    Side,
    SideMismatchError,
    expansion_terms,
    xmp_factorized,
    xmp_recursive,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

XMP_MAX_M = 12

INPUT_ERRORS = (
    IndexRangeError,
    SideMismatchError,
    DimensionMismatchError,
    MatrixFormatError,
    TruncationMismatchError,
    NonNilpotentSeriesError,
    yaml.YAMLError,
    OSError,
    ValueError,
)


class UsageError(ValueError):
    """Raised when flags are well-formed for argparse but unusable together."""


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got '{text}'") from exc


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _emit(text: str) -> None:
    sys.stdout.write(text)


def cmd_expand(args: argparse.Namespace, config: ZexpConfig) -> int:
    cfg = ExpansionConfig(max_total_degree=args.degree, max_factors=args.factors, side=Side(args.side))
    terms = list(expansion_terms(cfg))
    if args.format == "json":
        _emit(dump_json(ExpansionPayload.from_terms(cfg.side.value, cfg.max_total_degree, cfg.max_factors, terms)))
    elif args.format == "latex":
        _emit(terms_latex(((term.factor_order(), term.coefficient) for term in terms), LATEX_SYMBOLS[cfg.side.value]))
    else:
        _emit(terms_text((term.composition.parts, term.coefficient) for term in terms))
    return EXIT_OK


def cmd_xmp(args: argparse.Namespace, config: ZexpConfig) -> int:
    if not 1 <= args.p <= args.m <= XMP_MAX_M:
        raise IndexRangeError(f"xmp needs 1 <= p <= m <= {XMP_MAX_M}, got m={args.m}, p={args.p}")
    poly = xmp_recursive(args.m, args.p)
    factorized = xmp_factorized(args.m, args.p)
    if args.format == "json":
        payload = XmpPayload(
            m=args.m,
            p=args.p,
            polynomial=PolynomialPayload.from_poly(poly),
            factorized=[
                CompositionTermPayload(composition=list(factors), coefficient=RationalPayload(num=str(coeff), den="1"))
                for coeff, factors in factorized
            ],
        )
        _emit(dump_json(payload))
    elif args.format == "latex":
        _emit(factorized_latex(args.m, args.p, factorized))
    else:
        _emit(graded_text(poly, args.m, "AB"))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: ZexpConfig) -> int:
    results = run_suite(args.suite, config.verify, fail_fast=args.fail_fast)
    failure = first_failure(results)
    if args.format == "json":
        payload = VerifyPayload(
            suite=args.suite,
            passed=failure is None,
            checks=[CheckPayload(suite=r.suite, name=r.name, passed=r.passed, detail=r.detail) for r in results],
        )
        _emit(dump_json(payload))
    else:
        _emit(checks_text(results))
    if args.metrics_file:
        write_metrics(args.metrics_file)
    if failure is not None:
        logger.error("First counterexample: %s: %s (%s)", failure.suite, failure.name, failure.detail)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_bch(args: argparse.Namespace, config: ZexpConfig) -> int:
    family = Family(args.family)
    if family == Family.SYMMETRIZED:
        poly = bch_symmetrized(args.degree)
        if args.format == "json":
            _emit(dump_json(PolynomialPayload.from_poly(poly, BCH_ALPHABET)))
        elif args.format == "latex":
            _emit(
                symmetrized_latex(
                    ((term.factor_order(), term.coefficient) for term in bch_terms(args.degree, Family.X)),
                    ((term.factor_order(), term.coefficient) for term in bch_terms(args.degree, Family.Y)),
                )
            )
        else:
            _emit(graded_text(poly, args.degree, BCH_ALPHABET))
        return EXIT_OK

    terms = list(bch_terms(args.degree, family))
    if args.format == "json":
        _emit(
            dump_json(
                ExpansionPayload(
                    side=family.value,
                    degree=args.degree,
                    terms=[
                        CompositionTermPayload(
                            composition=list(term.composition.parts),
                            coefficient=RationalPayload.from_fraction(term.coefficient),
                        )
                        for term in terms
                    ],
                )
            )
        )
    elif args.format == "latex":
        _emit(terms_latex(((term.factor_order(), term.coefficient) for term in terms), LATEX_SYMBOLS[family.value]))
    else:
        _emit(terms_text((term.composition.parts, term.coefficient) for term in terms))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: ZexpConfig) -> int:
    with open(args.matrices, "r", encoding="utf-8") as handle:
        payload = AssignmentPayload.model_validate(json.load(handle))
    assignment = payload.to_assignment()
    cfg = ExpansionConfig(max_total_degree=args.degree, max_factors=args.factors, side=Side(args.side))
    total = assignment.mat_a + assignment.mat_b
    if not np.all(np.isfinite(total)):
        raise MatrixFormatError("A + B overflows double precision")
    result = zassenhaus_apply(assignment, cfg)
    error = frobenius_error(result, expm(total))
    logger.info("dim=%d side=%s N=%d P=%s error=%.3e", assignment.dim, cfg.side.value, args.degree, args.factors, error)
    if args.format == "json":
        _emit(
            dump_json(
                EvalPayload(
                    side=cfg.side,
                    degree=args.degree,
                    factors=args.factors,
                    result=MatrixPayload.from_matrix(result),
                    frobenius_error=error,
                )
            )
        )
    elif args.format == "latex":
        _emit(matrix_latex(result))
    else:
        _emit(matrix_text(result) + f"frobenius_error: {error!r}\n")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: ZexpConfig) -> int:
    defaults = config.bench
    dims = args.dims if args.dims is not None else defaults.dims
    degrees = args.degrees if args.degrees is not None else defaults.degrees
    if not degrees:
        raise UsageError("bench needs at least one truncation degree")
    if not dims:
        raise UsageError("bench needs at least one matrix dimension")
    if min(dims) < 1:
        raise UsageError(f"bench dimensions must be >= 1, got {min(dims)}")
    side = Side(args.side) if args.side else defaults.side
    seed = args.seed if args.seed is not None else defaults.seed
    norm = args.norm if args.norm is not None else defaults.norm

    reports: List[ReportPayload] = []
    for dim in dims:
        if args.triangular:
            assignment = triangular_assignment(dim, seed)
            factors = args.factors if args.factors is not None else max(dim - 1, 1)
        else:
            assignment = random_assignment(dim, norm, seed)
            factors = args.factors
        report = convergence_scan(assignment, degrees, max_factors=factors, side=side)
        reports.append(ReportPayload.from_report(dim, side, report))

    payload = BenchPayload(seed=seed, norm=norm, triangular=args.triangular, reports=reports)
    if args.format == "json":
        _emit(dump_json(payload))
    else:
        lines = []
        for report in payload.reports:
            lines.append(f"dim={report.dim} side={report.side.value}")
            lines.append("N\tP\terror\tterms\tseconds")
            for row in report.rows:
                cap = "-" if row.factor_cap is None else str(row.factor_cap)
                lines.append(
                    f"{row.total_degree}\t{cap}\t{row.frobenius_error:.3e}\t{row.terms_evaluated}\t{row.seconds:.4f}"
                )
        _emit("\n".join(lines) + "\n")
    if args.metrics_file:
        write_metrics(args.metrics_file)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log", default="WARNING", help="Logging level (default: WARNING)")
    common.add_argument("--debug", action="store_true", help="Shortcut for --log DEBUG")
    common.add_argument("--config", help="Path to a zexp YAML config (default: $ZEXP_CONFIG or config/zexp.yaml)")

    parser = argparse.ArgumentParser(prog="zexp", description="Explicit Zassenhaus and BCH product expansions")
    sub = parser.add_subparsers(dest="command", required=True)

    expand = sub.add_parser("expand", parents=[common], help="List composition terms of the right or left form")
    expand.add_argument("--side", choices=[s.value for s in Side], default=Side.RIGHT.value)
    expand.add_argument("--degree", type=_non_negative, required=True, help="Total degree N")
    expand.add_argument("--factors", type=_positive, help="Cap P on the number of factors")
    expand.add_argument("--format", choices=["json", "text", "latex"], default="text")
    expand.set_defaults(handler=cmd_expand)

    xmp = sub.add_parser("xmp", parents=[common], help="Print X_(m,p)")
    xmp.add_argument("m", type=int)
    xmp.add_argument("p", type=int)
    xmp.add_argument("--format", choices=["json", "text", "latex"], default="text")
    xmp.set_defaults(handler=cmd_xmp)

    verify = sub.add_parser("verify", parents=[common], help="Run identity suites")
    verify.add_argument("suite", choices=[*SUITE_ORDER, "all"])
    verify.add_argument("--fail-fast", action="store_true", help="Stop at the first failed identity")
    verify.add_argument("--format", choices=["json", "text"], default="text")
    verify.add_argument("--metrics-file", type=Path, help="Write Prometheus metrics to this file")
    verify.set_defaults(handler=cmd_verify)

    bch = sub.add_parser("bch", parents=[common], help="Product expansion of e^X e^Y")
    bch.add_argument("--family", choices=[f.value for f in Family], default=Family.SYMMETRIZED.value)
    bch.add_argument("--degree", type=_non_negative, required=True, help="Total degree N")
    bch.add_argument("--format", choices=["json", "text", "latex"], default="text")
    bch.set_defaults(handler=cmd_bch)

    evaluate = sub.add_parser("eval", parents=[common], help="Evaluate the expansion on a matrix pair")
    evaluate.add_argument("matrices", help='JSON file {"A": {"dim", "rows"}, "B": {...}}')
    evaluate.add_argument("--side", choices=[s.value for s in Side], default=Side.RIGHT.value)
    evaluate.add_argument("--degree", type=_non_negative, required=True, help="Total degree N")
    evaluate.add_argument("--factors", type=_positive, help="Cap P on the number of factors")
    evaluate.add_argument("--format", choices=["json", "text", "latex"], default="text")
    evaluate.set_defaults(handler=cmd_eval)

    bench = sub.add_parser("bench", parents=[common], help="Error and timing table against expm(A+B)")
    bench.add_argument("--dims", type=_int_list, help="Comma separated matrix dimensions")
    bench.add_argument("--degrees", type=_int_list, help="Comma separated ascending truncation degrees")
    bench.add_argument("--factors", type=_positive, help="Cap P on the number of factors")
    bench.add_argument("--side", choices=[s.value for s in Side])
    bench.add_argument("--seed", type=int)
    bench.add_argument("--norm", type=float)
    bench.add_argument("--triangular", action="store_true", help="Use the triangular fixture instead of random")
    bench.add_argument("--format", choices=["json", "text"], default="text")
    bench.add_argument("--metrics-file", type=Path, help="Write Prometheus metrics to this file")
    bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.debug else getattr(logging, args.log.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="[%(levelname)s] %(message)s")

    try:
        config = load_config(args.config)
        return args.handler(args, config)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        logger.error("%s", exc)
        return EXIT_USAGE
    except INPUT_ERRORS as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
