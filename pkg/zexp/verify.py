"""Executable identity suites backing ``zexp verify``."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from zexp.bch import (
    ALPHABET as BCH_ALPHABET,
    bch_product_x,
    bch_product_y,
    bch_symmetrized,
    bch_taylor,
    script_x,
    script_y,
)
from zexp.config import VerifyBounds
from zexp.freealg import (
    Generator,
    NCPoly,
    TSeries,
    X,
    Y,
    format_poly,
    generator,
    nc_add,
    nc_commutator,
    nc_exp_truncated,
    nc_grade,
    nc_mul,
    nc_power,
    nc_reverse,
    nc_scale,
    nc_swap,
)
from zexp.metrics import record_identity
from zexp.zassenhaus import (
    ExpansionConfig,
    Side,
    classical_transposed_product,
    classical_zassenhaus_product,
    classical_zassenhaus_terms,
    classical_zassenhaus_transposed,
    composition_coefficient,
    compositions,
    exp_b_subseries,
    exp_sum_series,
    factorized_to_poly,
    left_expansion,
    reconstruct_power,
    right_expansion,
    xm,
    xm_master,
    xmp_closed,
    xmp_factorized,
    xmp_one_step,
    xmp_recursive,
)

logger = logging.getLogger(__name__)

# X_(m,p) for m <= 5 written as integer multiples of products of B'_k (B'_1 = B),
# nested groupings multiplied out.
APPENDIX_XMP: Dict[Tuple[int, int], Tuple[Tuple[int, Tuple[int, ...]], ...]] = {
    (1, 1): ((1, (1,)),),
    (2, 1): ((1, (2,)),),
    (2, 2): ((1, (1, 1)),),
    (3, 1): ((1, (3,)),),
    (3, 2): ((1, (2, 1)), (2, (1, 2))),
    (3, 3): ((1, (1, 1, 1)),),
    (4, 1): ((1, (4,)),),
    (4, 2): ((1, (3, 1)), (3, (2, 2)), (3, (1, 3))),
    (4, 3): ((1, (2, 1, 1)), (2, (1, 2, 1)), (3, (1, 1, 2))),
    (4, 4): ((1, (1, 1, 1, 1)),),
    (5, 1): ((1, (5,)),),
    (5, 2): ((1, (4, 1)), (4, (3, 2)), (6, (2, 3)), (4, (1, 4))),
    (5, 3): ((1, (3, 1, 1)), (3, (2, 2, 1)), (3, (1, 3, 1)), (4, (2, 1, 2)), (8, (1, 2, 2)), (6, (1, 1, 3))),
    (5, 4): ((1, (2, 1, 1, 1)), (2, (1, 2, 1, 1)), (3, (1, 1, 2, 1)), (4, (1, 1, 1, 2))),
    (5, 5): ((1, (1, 1, 1, 1, 1)),),
}

SUITE_ORDER = ("xmp", "appendix", "induction", "power", "resum", "duality", "bch", "classical")

_A = generator(Generator.A)
_B = generator(Generator.B)
_X = generator(X)
_Y = generator(Y)


class VerificationError(RuntimeError):
    """Raised when an identity fails; carries the failing check."""

    def __init__(self, check: "CheckResult") -> None:
        super().__init__(f"{check.suite}: {check.name} failed: {check.detail}")
        self.check = check


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _compare(suite: str, name: str, left: NCPoly, right: NCPoly, alphabet: str = "AB") -> CheckResult:
    if left == right:
        return CheckResult(suite, name, True)
    diff = nc_add(left, nc_scale(right, -1))
    return CheckResult(suite, name, False, f"difference = {format_poly(diff, alphabet)}")


def _check(suite: str, name: str, condition: bool, detail: str = "") -> CheckResult:
    return CheckResult(suite, name, condition, "" if condition else detail)


def suite_xmp(bounds: VerifyBounds) -> Iterator[CheckResult]:
    for m in range(1, bounds.xmp_max_m + 1):
        for p in range(1, m + 1):
            recursive = xmp_recursive(m, p)
            closed = xmp_closed(m, p)
            one_step = xmp_one_step(m, p)
            result = _compare("xmp", f"X({m},{p}) closed = recursive", closed, recursive)
            if result.passed and one_step != recursive:
                result = _compare("xmp", f"X({m},{p}) one-step = recursive", one_step, recursive)
            yield result


def suite_appendix(bounds: VerifyBounds) -> Iterator[CheckResult]:
    for (m, p), golden in sorted(APPENDIX_XMP.items()):
        if m > bounds.appendix_max_m:
            continue
        yield _compare("appendix", f"X({m},{p}) word form", xmp_recursive(m, p), factorized_to_poly(golden))
        yield _check(
            "appendix",
            f"X({m},{p}) B'-grouping",
            sorted(xmp_factorized(m, p)) == sorted(golden),
            f"got {sorted(xmp_factorized(m, p))}",
        )


def suite_induction(bounds: VerifyBounds) -> Iterator[CheckResult]:
    for m in range(2, bounds.induction_max_m + 1):
        for p in range(2, m + 1):
            lhs = nc_add(nc_commutator(_A, xmp_closed(m, p)), nc_mul(_B, xmp_closed(m, p - 1)))
            yield _compare("induction", f"[A, X({m},{p})] + B X({m},{p - 1}) = X({m + 1},{p})", lhs, xmp_closed(m + 1, p))


def suite_power(bounds: VerifyBounds) -> Iterator[CheckResult]:
    total = nc_add(_A, _B)
    for n in range(bounds.power_max_n + 1):
        yield _compare("power", f"sum_m C({n},m) X_m A^({n}-m) = (A+B)^{n}", reconstruct_power(n), nc_power(total, n))
        yield _compare("power", f"X_{n} master recursion = sum_p X({n},p)", xm_master(n), xm(n))


def _exp_a(n: int) -> NCPoly:
    return nc_exp_truncated(_A, n)


def _exp_sum(n: int) -> NCPoly:
    return nc_exp_truncated(nc_add(_A, _B), n)


def suite_resum(bounds: VerifyBounds) -> Iterator[CheckResult]:
    n = bounds.resum_degree
    product = nc_mul(right_expansion(ExpansionConfig(max_total_degree=n, side=Side.RIGHT)), _exp_a(n))
    target = _exp_sum(n)
    for d in range(n + 1):
        yield _compare("resum", f"grade {d}: right({n}) e^A = e^(A+B)", nc_grade(product, d), nc_grade(target, d))
    yield _compare("resum", f"B-only terms of right({n}) = e^B", exp_b_subseries(n), nc_exp_truncated(_B, n))
    bad = [c.parts for c in compositions(n) if not 0 < composition_coefficient(c, Side.RIGHT) <= 1]
    yield _check("resum", "right coefficients lie in (0, 1]", not bad, f"out of range: {bad}")
    for p in range(1, n + 1):
        ones = next(c for c in compositions(p) if c.parts == (1,) * p)
        value = composition_coefficient(ones, Side.RIGHT)
        yield _check("resum", f"coefficient of (1,)*{p} is 1/{p}!", value == Fraction(1, factorial(p)), f"got {value}")


def suite_duality(bounds: VerifyBounds) -> Iterator[CheckResult]:
    n = bounds.duality_degree
    right = right_expansion(ExpansionConfig(max_total_degree=n, side=Side.RIGHT))
    left = left_expansion(ExpansionConfig(max_total_degree=n, side=Side.LEFT))
    yield _compare("duality", f"left({n}) = reverse(right({n}))", left, nc_reverse(right))
    mismatched = [
        c.parts
        for c in compositions(n)
        if composition_coefficient(c, Side.LEFT)
        != (-1) ** (c.weight - c.p) * composition_coefficient(c, Side.RIGHT)
    ]
    yield _check("duality", "left coefficients carry (-1)^(weight-p)", not mismatched, f"mismatch at {mismatched}")
    product = nc_mul(_exp_a(n), left)
    target = _exp_sum(n)
    for d in range(n + 1):
        yield _compare("duality", f"grade {d}: e^A left({n}) = e^(A+B)", nc_grade(product, d), nc_grade(target, d))


def cubic_display() -> NCPoly:
    """Degree-3 part of the symmetrized BCH product written with commutators."""
    s = nc_add(_X, _Y)
    xy = nc_commutator(_X, _Y)
    nested = nc_add(nc_commutator(_Y, nc_commutator(_Y, _X)), nc_commutator(_X, nc_commutator(_X, _Y)))
    mixed = nc_add(nc_mul(xy, s), nc_mul(s, xy))
    return nc_add(
        nc_add(nc_scale(nested, Fraction(1, 12)), nc_scale(mixed, Fraction(1, 4))),
        nc_scale(nc_power(s, 3), Fraction(1, 6)),
    )


def quadratic_display() -> NCPoly:
    s = nc_add(_X, _Y)
    return nc_add(nc_scale(nc_commutator(_X, _Y), Fraction(1, 2)), nc_scale(nc_power(s, 2), Fraction(1, 2)))


def suite_bch(bounds: VerifyBounds) -> Iterator[CheckResult]:
    for n in range(bounds.bch_degree + 1):
        taylor = bch_taylor(n)
        yield _compare("bch", f"X-form({n}) = Taylor e^X e^Y", bch_product_x(n), taylor, BCH_ALPHABET)
        yield _compare("bch", f"Y-form({n}) = Taylor e^X e^Y", bch_product_y(n), taylor, BCH_ALPHABET)
        yield _compare("bch", f"symmetrized({n}) = Taylor e^X e^Y", bch_symmetrized(n), taylor, BCH_ALPHABET)
        yield _compare(
            "bch", f"swap + reverse maps X-form({n}) to Y-form({n})", nc_reverse(nc_swap(bch_product_x(n))), bch_product_y(n), BCH_ALPHABET
        )
    if bounds.bch_degree >= 3:
        sym = bch_symmetrized(3)
        yield _compare("bch", "quadratic display", nc_grade(sym, 2), quadratic_display(), BCH_ALPHABET)
        yield _compare("bch", "cubic display 1/12, 1/4, 1/6", nc_grade(sym, 3), cubic_display(), BCH_ALPHABET)
    for n in range(1, 9):
        for label, block in (("X", script_x(n)), ("Y", script_y(n))):
            yield _check("bch", f"{label}_{n} homogeneous of degree {n}", nc_grade(block, n) == block, "not homogeneous")


def _series_matches(series: TSeries, target: TSeries, upto: int) -> Optional[int]:
    for k in range(upto + 1):
        if series.coefficient(k) != target.coefficient(k):
            return k
    return None


def suite_classical(bounds: VerifyBounds) -> Iterator[CheckResult]:
    n_max, truncation = bounds.classical_n_max, bounds.classical_truncation
    terms = classical_zassenhaus_terms(n_max, truncation)
    transposed = classical_zassenhaus_transposed(n_max, truncation)
    ab = nc_commutator(_A, _B)
    z2 = nc_scale(ab, Fraction(-1, 2))
    yield _compare("classical", "Z_2 = -1/2 [A,B]", terms[0], z2)
    if n_max >= 3:
        z3 = nc_add(
            nc_scale(nc_commutator(_B, ab), Fraction(1, 3)),
            nc_scale(nc_commutator(_A, ab), Fraction(1, 6)),
        )
        yield _compare("classical", "Z_3 = 1/3 [B,[A,B]] + 1/6 [A,[A,B]]", terms[1], z3)
    target = exp_sum_series(truncation)
    bad = _series_matches(classical_zassenhaus_product(terms, truncation), target, n_max)
    yield _check("classical", f"e^tA e^tB prod e^(t^n Z_n) = e^t(A+B) through t^{n_max}", bad is None, f"first mismatch at t^{bad}")
    bad = _series_matches(classical_transposed_product(transposed, truncation), target, n_max)
    yield _check("classical", f"transposed product = e^t(A+B) through t^{n_max}", bad is None, f"first mismatch at t^{bad}")
    for n, (z_n, zt_n) in enumerate(zip(terms, transposed), start=2):
        yield _compare("classical", f"Z'_{n} = reverse(Z_{n})", zt_n, nc_reverse(z_n))
        yield _compare("classical", f"Z'_{n} = (-1)^({n}+1) Z_{n}", zt_n, nc_scale(z_n, (-1) ** (n + 1)))
        yield _check(
            "classical", f"Z_{n} homogeneous of degree {n}", nc_grade(z_n, n) == z_n, "mixed degrees"
        )


SUITES: Dict[str, Callable[[VerifyBounds], Iterator[CheckResult]]] = {
    "xmp": suite_xmp,
    "appendix": suite_appendix,
    "induction": suite_induction,
    "power": suite_power,
    "resum": suite_resum,
    "duality": suite_duality,
    "bch": suite_bch,
    "classical": suite_classical,
}


def run_suite(name: str, bounds: VerifyBounds, fail_fast: bool = False) -> List[CheckResult]:
    if name == "all":
        names: Sequence[str] = SUITE_ORDER
    elif name in SUITES:
        names = (name,)
    else:
        raise ValueError(f"Unknown suite '{name}'. Available: {sorted(SUITES) + ['all']}")

    results: List[CheckResult] = []
    for suite_name in names:
        logger.info("Running suite '%s'", suite_name)
        for result in SUITES[suite_name](bounds):
            record_identity(suite_name, result.passed)
            results.append(result)
            if not result.passed:
                logger.error("%s: %s failed: %s", result.suite, result.name, result.detail)
                if fail_fast:
                    return results
    logger.info("Checked %d identities", len(results))
    return results


def first_failure(results: Sequence[CheckResult]) -> Optional[CheckResult]:
    return next((result for result in results if not result.passed), None)


def require_all(results: Sequence[CheckResult]) -> None:
    failure = first_failure(results)
    if failure is not None:
        raise VerificationError(failure)
