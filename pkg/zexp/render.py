"""Text and LaTeX renderers shared by the CLI subcommands."""

from __future__ import annotations

from fractions import Fraction
from itertools import groupby
from typing import Iterable, List, Sequence, Tuple

from zexp.freealg import NCPoly, format_poly, nc_grade
from zexp.numeric import DenseMatrix
from zexp.verify import CheckResult

LATEX_SYMBOLS = {
    "right": r"\mathcal{B}",
    "left": r"\mathcal{B}",
    "x": r"\mathcal{X}",
    "y": r"\mathcal{Y}",
}


def fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def fraction_latex(value: Fraction) -> str:
    magnitude = abs(value)
    if magnitude.denominator == 1:
        return str(magnitude.numerator)
    return rf"\frac{{{magnitude.numerator}}}{{{magnitude.denominator}}}"


def _collapse(symbols: Sequence[str]) -> str:
    pieces = []
    for symbol, run in groupby(symbols):
        count = len(list(run))
        pieces.append(symbol if count == 1 else f"{symbol}^{{{count}}}")
    return "".join(pieces)


def _join_signed(terms: Iterable[Tuple[Fraction, str]]) -> str:
    out = ""
    for coeff, body in terms:
        sign = "-" if coeff < 0 else "+"
        scalar = "" if abs(coeff) == 1 else fraction_latex(coeff)
        chunk = f"{scalar}{body}"
        if not out:
            out = f"-{chunk}" if sign == "-" else chunk
        else:
            out += f" {sign} {chunk}"
    return out or "0"


def terms_text(rows: Iterable[Tuple[Tuple[int, ...], Fraction]]) -> str:
    lines = [f"{tuple(parts)}\t{fraction_text(coeff)}" for parts, coeff in rows]
    return "\n".join(["unit\t1/1", *lines]) + "\n"


def terms_latex(rows: Iterable[Tuple[Tuple[int, ...], Fraction]], symbol: str) -> str:
    """Render (factor order, coefficient) pairs as a sum of block products."""
    body = _join_signed(
        (coeff, _collapse([f"{symbol}_{{{n}}}" for n in factors])) for factors, coeff in rows
    )
    return ("1" if body == "0" else f"1 + {body}".replace("+ -", "- ")) + "\n"


def symmetrized_latex(
    x_rows: Iterable[Tuple[Tuple[int, ...], Fraction]],
    y_rows: Iterable[Tuple[Tuple[int, ...], Fraction]],
) -> str:
    """Half the X-form plus half the Y-form, each in its own block symbols."""
    x_body = terms_latex(x_rows, LATEX_SYMBOLS["x"]).rstrip("\n")
    y_body = terms_latex(y_rows, LATEX_SYMBOLS["y"]).rstrip("\n")
    return rf"\frac{{1}}{{2}}\left({x_body}\right) + \frac{{1}}{{2}}\left({y_body}\right)" + "\n"


def factorized_latex(m: int, p: int, terms: Sequence[Tuple[int, Tuple[int, ...]]]) -> str:
    def _symbol(n: int) -> str:
        return "B" if n == 1 else rf"\mathcal{{B}}'_{{{n}}}"

    body = _join_signed((Fraction(coeff), _collapse([_symbol(n) for n in factors])) for coeff, factors in terms)
    return f"X_{{{m},{p}}} = {body}\n"


def graded_text(poly: NCPoly, max_degree: int, alphabet: str) -> str:
    lines: List[str] = []
    for d in range(max_degree + 1):
        part = nc_grade(poly, d)
        if not part.is_zero():
            lines.append(f"degree {d}: {format_poly(part, alphabet)}")
    return "\n".join(lines) + "\n"


def matrix_text(matrix: DenseMatrix) -> str:
    return "\n".join(" ".join(repr(float(x)) for x in row) for row in matrix) + "\n"


def matrix_latex(matrix: DenseMatrix) -> str:
    rows = [" & ".join(f"{float(x):.17g}" for x in row) for row in matrix]
    return "\\begin{bmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{bmatrix}\n"


def checks_text(results: Sequence[CheckResult]) -> str:
    lines = []
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        suffix = f": {result.detail}" if result.detail else ""
        lines.append(f"{status} {result.suite}: {result.name}{suffix}")
    failed = sum(1 for result in results if not result.passed)
    lines.append(f"{len(results)} identities checked, {failed} failed")
    return "\n".join(lines) + "\n"
