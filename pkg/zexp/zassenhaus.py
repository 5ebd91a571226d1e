"""Explicit expansion of e^{A+B} as products of nested commutators times e^A.

The building blocks are ``B'_m = ad_A^{m-1} B`` and ``B_m = B'_m / m!``. The
polynomials ``X_{m,p}`` (degree m, p factors of B) are available through the
three-case recursion, the single-step solution and the iterated closed form;
the three routes must agree exactly.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from zexp.freealg import (
    Generator,
    NCPoly,
    TSeries,
    generator,
    nc_ad_power,
    nc_add,
    nc_commutator,
    nc_mul,
    nc_power,
    nc_product,
    nc_scale,
    nc_sum,
    one,
    ts_exp,
    ts_monomial,
    ts_mul,
    ts_one,
)

logger = logging.getLogger(__name__)


class IndexRangeError(ValueError):
    """Raised when an index such as m, p or n_max is outside its admissible range."""


class SideMismatchError(ValueError):
    """Raised when an expansion is requested with a config for the other side."""


class Side(str, Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class Composition:
    parts: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("A composition needs at least one part")
        if any(part < 1 for part in self.parts):
            raise ValueError(f"Composition parts must be positive: {self.parts}")

    @property
    def p(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)


@dataclass(frozen=True)
class ExpansionTerm:
    composition: Composition
    coefficient: Fraction
    side: Side

    def factor_order(self) -> Tuple[int, ...]:
        """Indices of the B_n factors as they appear left to right in the product."""
        if self.side == Side.RIGHT:
            return tuple(reversed(self.composition.parts))
        return self.composition.parts


class ExpansionConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_total_degree: int = Field(..., ge=0)
    max_factors: Optional[int] = Field(None, ge=1)
    side: Side = Side.RIGHT


_A = generator(Generator.A)
_B = generator(Generator.B)


def _require_positive(name: str, value: int) -> None:
    if value < 1:
        raise IndexRangeError(f"{name} must be >= 1, got {value}")


def _require_mp(m: int, p: int) -> None:
    if p < 1 or p > m:
        raise IndexRangeError(f"X_(m,p) needs 1 <= p <= m, got m={m}, p={p}")


@lru_cache(maxsize=None)
def script_b_prime(m: int) -> NCPoly:
    _require_positive("m", m)
    return nc_ad_power(_A, _B, m - 1)


def script_b(m: int) -> NCPoly:
    return nc_scale(script_b_prime(m), Fraction(1, factorial(m)))


class XmpTable:
    """Memo table of X_(m,p) filled row by row from the three-case recursion."""

    def __init__(self) -> None:
        self._values: Dict[Tuple[int, int], NCPoly] = {(1, 1): _B}
        self._rows = 1
        self._lock = threading.Lock()

    def _fill_next_row(self) -> None:
        m = self._rows
        values = self._values
        values[(m + 1, 1)] = nc_commutator(_A, values[(m, 1)])
        for p in range(2, m + 1):
            values[(m + 1, p)] = nc_add(nc_commutator(_A, values[(m, p)]), nc_mul(_B, values[(m, p - 1)]))
        values[(m + 1, m + 1)] = nc_mul(_B, values[(m, m)])
        self._rows = m + 1

    def get(self, m: int, p: int) -> NCPoly:
        _require_mp(m, p)
        with self._lock:
            if m > self._rows:
                logger.debug("Extending X_(m,p) table from row %d to row %d", self._rows, m)
            while self._rows < m:
                self._fill_next_row()
            return self._values[(m, p)]


_XMP_TABLE = XmpTable()


def xmp_recursive(m: int, p: int) -> NCPoly:
    return _XMP_TABLE.get(m, p)


@lru_cache(maxsize=None)
def xmp_one_step(m: int, p: int) -> NCPoly:
    """X_(m,p) = sum_k C(m-1, k-1) X_(m-k,p-1) B'_k, recursing on itself."""
    _require_mp(m, p)
    if p == 1:
        return script_b_prime(m)
    return nc_sum(
        nc_scale(nc_mul(xmp_one_step(m - k, p - 1), script_b_prime(k)), comb(m - 1, k - 1))
        for k in range(1, m - p + 2)
    )


def _bounded_tuples(length: int, budget: int) -> Iterator[Tuple[int, ...]]:
    # tuples of positive integers with sum <= budget, lexicographic
    if length == 0:
        yield ()
        return
    for first in range(1, budget - length + 2):
        for rest in _bounded_tuples(length - 1, budget - first):
            yield (first,) + rest


def _closed_form_terms(m: int, p: int) -> Iterator[Tuple[Fraction, Tuple[int, ...]]]:
    # (coefficient of B_{m-sum k} B_{k_{p-1}} ... B_{k_1}, factor indices left to right)
    for ks in _bounded_tuples(p - 1, m - 1):
        remaining = m
        denominator = 1
        for k in ks:
            denominator *= remaining
            remaining -= k
        coeff = Fraction(factorial(m) * prod(ks), denominator)
        yield coeff, (remaining,) + tuple(reversed(ks))


def xmp_closed(m: int, p: int) -> NCPoly:
    _require_mp(m, p)
    return nc_sum(
        nc_scale(nc_product(script_b(n) for n in factors), coeff)
        for coeff, factors in _closed_form_terms(m, p)
    )


def xmp_factorized(m: int, p: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """X_(m,p) as integer multiples of flat products of B'_k (B'_1 = B)."""
    _require_mp(m, p)
    grouped: List[Tuple[int, Tuple[int, ...]]] = []
    for coeff, factors in _closed_form_terms(m, p):
        weight = coeff / prod(factorial(n) for n in factors)
        if weight.denominator != 1:
            raise ArithmeticError(f"Non-integral B' coefficient {weight} in X_({m},{p})")
        grouped.append((int(weight), factors))
    return grouped


def factorized_to_poly(terms: Sequence[Tuple[int, Tuple[int, ...]]]) -> NCPoly:
    return nc_sum(nc_scale(nc_product(script_b_prime(n) for n in factors), coeff) for coeff, factors in terms)


def xm(m: int) -> NCPoly:
    if m < 0:
        raise IndexRangeError(f"m must be >= 0, got {m}")
    if m == 0:
        return one()
    return nc_sum(xmp_recursive(m, p) for p in range(1, m + 1))


def xm_master(m: int) -> NCPoly:
    """X_m from X_(k+1) = [A, X_k] + B X_k with X_0 = 1."""
    if m < 0:
        raise IndexRangeError(f"m must be >= 0, got {m}")
    current = one()
    for _ in range(m):
        current = nc_add(nc_commutator(_A, current), nc_mul(_B, current))
    return current


def reconstruct_power(n: int) -> NCPoly:
    if n < 0:
        raise IndexRangeError(f"n must be >= 0, got {n}")
    return nc_sum(nc_scale(nc_mul(xm(m), nc_power(_A, n - m)), comb(n, m)) for m in range(n + 1))


def compositions_of(weight: int, max_parts: Optional[int] = None) -> Iterator[Composition]:
    """Compositions of ``weight`` in lexicographic order of their parts."""

    def _walk(remaining: int, slots: Optional[int]) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        next_slots = None if slots is None else slots - 1
        for first in range(1, remaining + 1):
            for rest in _walk(remaining - first, next_slots):
                yield (first,) + rest

    for parts in _walk(weight, max_parts):
        if parts:
            yield Composition(parts)


def compositions(max_weight: int, max_parts: Optional[int] = None) -> Iterator[Composition]:
    """Weight-major, then lexicographic."""
    for weight in range(1, max_weight + 1):
        yield from compositions_of(weight, max_parts)


def count_compositions(max_weight: int, max_parts: Optional[int] = None) -> int:
    total = 0
    for weight in range(1, max_weight + 1):
        top = weight if max_parts is None else min(weight, max_parts)
        total += sum(comb(weight - 1, parts - 1) for parts in range(1, top + 1))
    return total


def composition_coefficient(c: Composition, side: Side) -> Fraction:
    numerator = prod(c.parts)
    denominator = 1
    running = 0
    for part in reversed(c.parts):
        running += part
        denominator *= running
    coeff = Fraction(numerator, denominator)
    if side == Side.LEFT and (c.weight - c.p) % 2:
        coeff = -coeff
    return coeff


def expansion_terms(cfg: ExpansionConfig) -> Iterator[ExpansionTerm]:
    for comp in compositions(cfg.max_total_degree, cfg.max_factors):
        yield ExpansionTerm(composition=comp, coefficient=composition_coefficient(comp, cfg.side), side=cfg.side)


def _expand(cfg: ExpansionConfig) -> NCPoly:
    cache: Dict[Tuple[int, ...], NCPoly] = {(): one()}

    def _product(factors: Tuple[int, ...]) -> NCPoly:
        if factors not in cache:
            cache[factors] = nc_mul(_product(factors[:-1]), script_b(factors[-1]))
        return cache[factors]

    terms = [nc_scale(_product(term.factor_order()), term.coefficient) for term in expansion_terms(cfg)]
    logger.debug("Expanded %d composition terms for side=%s N=%d", len(terms), cfg.side.value, cfg.max_total_degree)
    return nc_add(one(), nc_sum(terms))


def right_expansion(cfg: ExpansionConfig) -> NCPoly:
    if cfg.side != Side.RIGHT:
        raise SideMismatchError("right_expansion needs side=right")
    return _expand(cfg)


def left_expansion(cfg: ExpansionConfig) -> NCPoly:
    if cfg.side != Side.LEFT:
        raise SideMismatchError("left_expansion needs side=left")
    return _expand(cfg)


def expansion(cfg: ExpansionConfig) -> NCPoly:
    return _expand(cfg)


def exp_b_subseries(max_total_degree: int) -> NCPoly:
    """Terms of the right expansion built from B_1 = B factors only."""
    cfg = ExpansionConfig(max_total_degree=max_total_degree)
    return nc_add(
        one(),
        nc_sum(
            nc_scale(nc_power(_B, term.composition.p), term.coefficient)
            for term in expansion_terms(cfg)
            if all(part == 1 for part in term.composition.parts)
        ),
    )


def _require_classical(n_max: int, truncation: int) -> None:
    if n_max < 2:
        raise IndexRangeError(f"n_max must be >= 2, got {n_max}")
    if n_max > truncation:
        raise IndexRangeError(f"n_max={n_max} exceeds truncation degree {truncation}")


def _exp_t(poly: NCPoly, power: int, truncation: int) -> TSeries:
    return ts_exp(ts_monomial(poly, power, truncation))


def exp_sum_series(truncation: int) -> TSeries:
    """e^{t(A+B)} truncated at t^truncation."""
    return _exp_t(nc_add(_A, _B), 1, truncation)


def classical_zassenhaus_terms(n_max: int, truncation: int) -> List[NCPoly]:
    """Z_2..Z_{n_max} of e^{t(A+B)} = e^{tA} e^{tB} e^{t^2 Z_2} e^{t^3 Z_3} ..."""
    _require_classical(n_max, truncation)
    residual = ts_mul(
        ts_mul(_exp_t(-_B, 1, truncation), _exp_t(-_A, 1, truncation)),
        exp_sum_series(truncation),
    )
    terms: List[NCPoly] = []
    for n in range(2, n_max + 1):
        z_n = residual.coefficient(n)
        terms.append(z_n)
        residual = ts_mul(_exp_t(-z_n, n, truncation), residual)
    return terms


def classical_zassenhaus_transposed(n_max: int, truncation: int) -> List[NCPoly]:
    """Z'_2..Z'_{n_max} of e^{t(A+B)} = (... e^{t^3 Z'_3} e^{t^2 Z'_2}) e^{tB} e^{tA}."""
    _require_classical(n_max, truncation)
    residual = ts_mul(
        ts_mul(exp_sum_series(truncation), _exp_t(-_A, 1, truncation)),
        _exp_t(-_B, 1, truncation),
    )
    terms: List[NCPoly] = []
    for n in range(2, n_max + 1):
        z_n = residual.coefficient(n)
        terms.append(z_n)
        residual = ts_mul(residual, _exp_t(-z_n, n, truncation))
    return terms


def classical_zassenhaus_product(terms: Sequence[NCPoly], truncation: int) -> TSeries:
    series = ts_mul(_exp_t(_A, 1, truncation), _exp_t(_B, 1, truncation))
    for n, z_n in enumerate(terms, start=2):
        series = ts_mul(series, _exp_t(z_n, n, truncation))
    return series


def classical_transposed_product(terms: Sequence[NCPoly], truncation: int) -> TSeries:
    series = ts_one(truncation)
    for n, z_n in enumerate(terms, start=2):
        series = ts_mul(_exp_t(z_n, n, truncation), series)
    return ts_mul(ts_mul(series, _exp_t(_B, 1, truncation)), _exp_t(_A, 1, truncation))
