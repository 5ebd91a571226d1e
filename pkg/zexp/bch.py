"""Product expansions of e^X e^Y built from the explicit Zassenhaus forms.

``script_x(n) = ad_Y^{n-1}(X+Y) / n!`` and ``script_y(n) = ad_X^{n-1}(X+Y) / n!``
play the role of B_n in the right and left forms respectively. X and Y are the
two generators of the free algebra (X first, Y second).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Dict, Iterator, Tuple

from zexp.freealg import (
    NCPoly,
    X,
    Y,
    generator,
    nc_ad_power,
    nc_add,
    nc_exp_truncated,
    nc_mul,
    nc_scale,
    nc_sum,
    nc_truncate,
    one,
)
from zexp.zassenhaus import Composition, IndexRangeError, Side, composition_coefficient, compositions

logger = logging.getLogger(__name__)

ALPHABET = "XY"

_X = generator(X)
_Y = generator(Y)


class Family(str, Enum):
    X = "x"
    Y = "y"
    SYMMETRIZED = "symmetrized"


@dataclass(frozen=True)
class BCHTerm:
    composition: Composition
    coefficient: Fraction
    family: Family

    def factor_order(self) -> Tuple[int, ...]:
        if self.family == Family.X:
            return tuple(reversed(self.composition.parts))
        return self.composition.parts


def _require_order(n: int) -> None:
    if n < 1:
        raise IndexRangeError(f"n must be >= 1, got {n}")


def script_x(n: int) -> NCPoly:
    _require_order(n)
    return nc_scale(nc_ad_power(_Y, nc_add(_X, _Y), n - 1), Fraction(1, factorial(n)))


def script_y(n: int) -> NCPoly:
    _require_order(n)
    return nc_scale(nc_ad_power(_X, nc_add(_X, _Y), n - 1), Fraction(1, factorial(n)))


def bch_terms(max_total_degree: int, family: Family) -> Iterator[BCHTerm]:
    """Composition terms of the X-form (signed) or Y-form (positive)."""
    if family == Family.SYMMETRIZED:
        raise ValueError("The symmetrized form is a polynomial average, not a term list")
    # X-form signs match the left-form rule, Y-form coefficients the right-form rule.
    side = Side.LEFT if family == Family.X else Side.RIGHT
    for comp in compositions(max_total_degree):
        yield BCHTerm(composition=comp, coefficient=composition_coefficient(comp, side), family=family)


def _product_expansion(max_total_degree: int, family: Family) -> NCPoly:
    if max_total_degree < 0:
        raise IndexRangeError(f"N must be >= 0, got {max_total_degree}")
    block = script_x if family == Family.X else script_y
    cache: Dict[Tuple[int, ...], NCPoly] = {(): one()}

    def _product(factors: Tuple[int, ...]) -> NCPoly:
        if factors not in cache:
            cache[factors] = nc_mul(_product(factors[:-1]), block(factors[-1]))
        return cache[factors]

    terms = [nc_scale(_product(term.factor_order()), term.coefficient) for term in bch_terms(max_total_degree, family)]
    logger.debug("Expanded %d %s-form terms at N=%d", len(terms), family.value, max_total_degree)
    return nc_add(one(), nc_sum(terms))


def bch_product_x(max_total_degree: int) -> NCPoly:
    return _product_expansion(max_total_degree, Family.X)


def bch_product_y(max_total_degree: int) -> NCPoly:
    return _product_expansion(max_total_degree, Family.Y)


def bch_symmetrized(max_total_degree: int) -> NCPoly:
    return nc_scale(nc_add(bch_product_x(max_total_degree), bch_product_y(max_total_degree)), Fraction(1, 2))


def bch_product(max_total_degree: int, family: Family) -> NCPoly:
    if family == Family.SYMMETRIZED:
        return bch_symmetrized(max_total_degree)
    return _product_expansion(max_total_degree, family)


def bch_taylor(max_total_degree: int) -> NCPoly:
    """Taylor expansion of e^X e^Y through total degree N."""
    return nc_truncate(
        nc_mul(nc_exp_truncated(_X, max_total_degree), nc_exp_truncated(_Y, max_total_degree)),
        max_total_degree,
    )
