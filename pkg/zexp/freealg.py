"""Exact arithmetic in the free associative algebra on two generators.

Polynomials map words to ``fractions.Fraction`` coefficients. Terms are kept in
deglex order so iteration and serialisation are deterministic. ``TSeries`` adds
a formal parameter ``t`` truncated at a fixed degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class Generator(IntEnum):
    A = 0
    B = 1


# BCH role names share the two letters.
X = Generator.A
Y = Generator.B

LETTERS = "AB"


class TruncationMismatchError(ValueError):
    """Raised when two series with different truncation degrees are combined."""


class NonNilpotentSeriesError(ValueError):
    """Raised when exponentiating a series whose t^0 coefficient is nonzero."""


@dataclass(frozen=True)
class Word:
    letters: Tuple[int, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.letters)

    @property
    def bdeg(self) -> int:
        return sum(1 for letter in self.letters if letter == Generator.B)

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (len(self.letters), self.letters)

    def __lt__(self, other: "Word") -> bool:
        return self.sort_key() < other.sort_key()

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def reversed(self) -> "Word":
        return Word(self.letters[::-1])

    def swapped(self) -> "Word":
        return Word(tuple(1 - letter for letter in self.letters))

    def render(self, alphabet: str = LETTERS) -> str:
        return "".join(alphabet[letter] for letter in self.letters)

    @classmethod
    def parse(cls, text: str, alphabet: str = LETTERS) -> "Word":
        try:
            return cls(tuple(alphabet.index(ch) for ch in text))
        except ValueError as exc:
            raise ValueError(f"Word '{text}' uses letters outside alphabet '{alphabet}'") from exc


UNIT_WORD = Word()


class NCPoly:
    """Finitely supported map Word -> Fraction with no zero coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Word, Scalar]] = None) -> None:
        cleaned: Dict[Word, Fraction] = {}
        for word, coeff in (terms or {}).items():
            value = Fraction(coeff)
            if value:
                cleaned[word] = value
        self._terms = {word: cleaned[word] for word in sorted(cleaned)}

    @classmethod
    def _from_accumulator(cls, acc: Dict[Word, Fraction]) -> "NCPoly":
        poly = cls.__new__(cls)
        poly._terms = {word: acc[word] for word in sorted(acc) if acc[word]}
        return poly

    @property
    def terms(self) -> Mapping[Word, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Word, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, word: Word) -> Fraction:
        return self._terms.get(word, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> Optional[int]:
        """Highest word degree; ``None`` stands in for the zero polynomial."""
        if not self._terms:
            return None
        return max(word.degree for word in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NCPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        # Scalars compare equal to int/Fraction, so they must hash alike.
        if self.degree in (None, 0):
            return hash(self.coefficient(UNIT_WORD))
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"NCPoly({format_poly(self)})"

    def __add__(self, other: Union["NCPoly", Scalar]) -> "NCPoly":
        return nc_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return nc_scale(self, -1)

    def __sub__(self, other: Union["NCPoly", Scalar]) -> "NCPoly":
        return nc_add(self, nc_scale(_coerce(other), -1))

    def __rsub__(self, other: Scalar) -> "NCPoly":
        return nc_add(_coerce(other), nc_scale(self, -1))

    def __mul__(self, other: Union["NCPoly", Scalar]) -> "NCPoly":
        if isinstance(other, NCPoly):
            return nc_mul(self, other)
        return nc_scale(self, other)

    def __rmul__(self, other: Scalar) -> "NCPoly":
        return nc_scale(self, other)

    def __truediv__(self, other: Scalar) -> "NCPoly":
        return nc_scale(self, Fraction(1) / Fraction(other))


def _coerce(value: Union[NCPoly, Scalar]) -> NCPoly:
    if isinstance(value, NCPoly):
        return value
    return scalar(value)


def zero() -> NCPoly:
    return NCPoly()


def one() -> NCPoly:
    return NCPoly({UNIT_WORD: 1})


def scalar(value: Scalar) -> NCPoly:
    return NCPoly({UNIT_WORD: value})


def generator(gen: Generator) -> NCPoly:
    return NCPoly({Word((int(gen),)): 1})


def word(*letters: Generator) -> NCPoly:
    return NCPoly({Word(tuple(int(letter) for letter in letters)): 1})


def from_words(pairs: Iterable[Tuple[str, Scalar]], alphabet: str = LETTERS) -> NCPoly:
    acc: Dict[Word, Fraction] = {}
    for text, coeff in pairs:
        key = Word.parse(text, alphabet)
        acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
    return NCPoly._from_accumulator(acc)


def nc_add(p: NCPoly, q: NCPoly) -> NCPoly:
    acc: Dict[Word, Fraction] = dict(p._terms)
    for key, coeff in q._terms.items():
        acc[key] = acc.get(key, Fraction(0)) + coeff
    return NCPoly._from_accumulator(acc)


def nc_sum(polys: Iterable[NCPoly]) -> NCPoly:
    acc: Dict[Word, Fraction] = {}
    for poly in polys:
        for key, coeff in poly._terms.items():
            acc[key] = acc.get(key, Fraction(0)) + coeff
    return NCPoly._from_accumulator(acc)


def nc_scale(p: NCPoly, c: Scalar) -> NCPoly:
    factor = Fraction(c)
    if not factor:
        return zero()
    return NCPoly._from_accumulator({key: coeff * factor for key, coeff in p._terms.items()})


def nc_mul(p: NCPoly, q: NCPoly) -> NCPoly:
    acc: Dict[Word, Fraction] = {}
    for left, lc in p._terms.items():
        for right, rc in q._terms.items():
            key = Word(left.letters + right.letters)
            acc[key] = acc.get(key, Fraction(0)) + lc * rc
    return NCPoly._from_accumulator(acc)


def nc_product(factors: Iterable[NCPoly]) -> NCPoly:
    result = one()
    for factor in factors:
        result = nc_mul(result, factor)
    return result


def nc_commutator(p: NCPoly, q: NCPoly) -> NCPoly:
    return nc_add(nc_mul(p, q), nc_scale(nc_mul(q, p), -1))


def nc_ad_power(base: NCPoly, arg: NCPoly, k: int) -> NCPoly:
    if k < 0:
        raise ValueError(f"ad power must be non-negative, got {k}")
    result = arg
    for _ in range(k):
        result = nc_commutator(base, result)
    return result


def nc_power(p: NCPoly, k: int) -> NCPoly:
    if k < 0:
        raise ValueError(f"power must be non-negative, got {k}")
    result = one()
    for _ in range(k):
        result = nc_mul(result, p)
    return result


def nc_reverse(p: NCPoly) -> NCPoly:
    return NCPoly._from_accumulator({key.reversed(): coeff for key, coeff in p._terms.items()})


def nc_swap(p: NCPoly) -> NCPoly:
    return NCPoly._from_accumulator({key.swapped(): coeff for key, coeff in p._terms.items()})


def nc_grade(p: NCPoly, d: int) -> NCPoly:
    return NCPoly._from_accumulator({key: coeff for key, coeff in p._terms.items() if key.degree == d})


def nc_truncate(p: NCPoly, n: int) -> NCPoly:
    return NCPoly._from_accumulator({key: coeff for key, coeff in p._terms.items() if key.degree <= n})


def nc_exp_truncated(p: NCPoly, n: int) -> NCPoly:
    """Return sum_{j<=n} p^j / j! with every word of degree > n dropped."""
    if p.coefficient(UNIT_WORD):
        raise NonNilpotentSeriesError("Truncated exponential needs a polynomial without constant term")
    total = one()
    power = one()
    for j in range(1, n + 1):
        power = nc_truncate(nc_mul(power, p), n)
        if power.is_zero():
            break
        total = nc_add(total, nc_scale(power, Fraction(1, factorial(j))))
    return total


def format_poly(p: NCPoly, alphabet: str = LETTERS) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for index, (key, coeff) in enumerate(p.items()):
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        body = key.render(alphabet) or "1"
        if magnitude != 1:
            body = f"{magnitude} {body}" if key.letters else str(magnitude)
        if index == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


@dataclass(frozen=True)
class TSeries:
    """Polynomial in t with NCPoly coefficients, truncated above ``t^N``."""

    coeffs: Tuple[NCPoly, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("TSeries needs at least the t^0 slot")

    @property
    def truncation_degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, power: int) -> NCPoly:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return zero()

    def __mul__(self, other: "TSeries") -> "TSeries":
        return ts_mul(self, other)

    def __add__(self, other: "TSeries") -> "TSeries":
        return ts_add(self, other)

    def __neg__(self) -> "TSeries":
        return ts_scale(self, -1)


def ts_zero(n: int) -> TSeries:
    return TSeries(tuple(zero() for _ in range(n + 1)))


def ts_one(n: int) -> TSeries:
    return ts_monomial(one(), 0, n)


def ts_monomial(poly: NCPoly, power: int, n: int) -> TSeries:
    """``poly * t^power`` truncated at degree ``n``."""
    coeffs = [zero() for _ in range(n + 1)]
    if power <= n:
        coeffs[power] = poly
    return TSeries(tuple(coeffs))


def _check_truncation(s: TSeries, u: TSeries) -> None:
    if s.truncation_degree != u.truncation_degree:
        raise TruncationMismatchError(
            f"Truncation degrees differ: {s.truncation_degree} vs {u.truncation_degree}"
        )


def ts_add(s: TSeries, u: TSeries) -> TSeries:
    _check_truncation(s, u)
    return TSeries(tuple(nc_add(a, b) for a, b in zip(s.coeffs, u.coeffs)))


def ts_scale(s: TSeries, c: Scalar) -> TSeries:
    return TSeries(tuple(nc_scale(a, c) for a in s.coeffs))


def ts_mul(s: TSeries, u: TSeries) -> TSeries:
    _check_truncation(s, u)
    n = s.truncation_degree
    coeffs = []
    for k in range(n + 1):
        coeffs.append(nc_sum(nc_mul(s.coeffs[i], u.coeffs[k - i]) for i in range(k + 1)))
    return TSeries(tuple(coeffs))


def ts_exp(s: TSeries) -> TSeries:
    if not s.coeffs[0].is_zero():
        raise NonNilpotentSeriesError("Exponential requires a vanishing t^0 coefficient")
    n = s.truncation_degree
    total = ts_one(n)
    power = ts_one(n)
    # s^j only reaches t^j and higher, so j <= n terms suffice.
    for j in range(1, n + 1):
        power = ts_mul(power, s)
        total = ts_add(total, ts_scale(power, Fraction(1, factorial(j))))
    return total
