"""Pydantic payload models for the JSON output of the command-line surface."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationInfo, field_validator

from zexp.freealg import LETTERS, NCPoly, Word
from zexp.numeric import Assignment, DenseMatrix, ErrorReport, ErrorRow, as_dense_matrix
from zexp.zassenhaus import ExpansionTerm, Side


class RationalPayload(BaseModel):
    num: str
    den: str

    @field_validator("num", "den")
    @classmethod
    def validate_integer(cls, value: str) -> str:
        int(value)
        return value

    @field_validator("den")
    @classmethod
    def validate_denominator(cls, value: str) -> str:
        if int(value) <= 0:
            raise ValueError("denominator must be positive")
        return value

    @classmethod
    def from_fraction(cls, value: Fraction) -> "RationalPayload":
        return cls(num=str(value.numerator), den=str(value.denominator))

    def to_fraction(self) -> Fraction:
        return Fraction(int(self.num), int(self.den))


class WordTermPayload(BaseModel):
    word: str
    coefficient: RationalPayload


class PolynomialPayload(BaseModel):
    alphabet: str = LETTERS
    terms: List[WordTermPayload] = Field(default_factory=list)

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, value: str) -> str:
        if len(value) != 2 or value[0] == value[1]:
            raise ValueError("alphabet must name two distinct generators")
        return value

    @classmethod
    def from_poly(cls, poly: NCPoly, alphabet: str = LETTERS) -> "PolynomialPayload":
        return cls(
            alphabet=alphabet,
            terms=[
                WordTermPayload(word=key.render(alphabet), coefficient=RationalPayload.from_fraction(coeff))
                for key, coeff in poly.items()
            ],
        )

    def to_poly(self) -> NCPoly:
        acc = {}
        for term in self.terms:
            key = Word.parse(term.word, self.alphabet)
            acc[key] = acc.get(key, Fraction(0)) + term.coefficient.to_fraction()
        return NCPoly(acc)


class CompositionTermPayload(BaseModel):
    composition: List[int]
    coefficient: RationalPayload


class ExpansionPayload(BaseModel):
    side: str
    degree: int
    factors: Optional[int] = None
    unit: RationalPayload = Field(default_factory=lambda: RationalPayload(num="1", den="1"))
    terms: List[CompositionTermPayload] = Field(default_factory=list)

    @classmethod
    def from_terms(
        cls, side: str, degree: int, factors: Optional[int], terms: List[ExpansionTerm]
    ) -> "ExpansionPayload":
        return cls(
            side=side,
            degree=degree,
            factors=factors,
            terms=[
                CompositionTermPayload(
                    composition=list(term.composition.parts),
                    coefficient=RationalPayload.from_fraction(term.coefficient),
                )
                for term in terms
            ],
        )


class XmpPayload(BaseModel):
    m: int
    p: int
    polynomial: PolynomialPayload
    factorized: List[CompositionTermPayload]


class MatrixPayload(BaseModel):
    dim: int = Field(..., ge=1)
    rows: List[List[float]]

    @field_validator("rows")
    @classmethod
    def validate_rows(cls, value: List[List[float]], info: ValidationInfo) -> List[List[float]]:
        dim = info.data.get("dim")
        if dim is not None and (len(value) != dim or any(len(row) != dim for row in value)):
            raise ValueError(f"rows must form a {dim}x{dim} array")
        as_dense_matrix(value)
        return value

    @classmethod
    def from_matrix(cls, matrix: DenseMatrix) -> "MatrixPayload":
        return cls(dim=int(matrix.shape[0]), rows=[[float(x) for x in row] for row in matrix])

    def to_matrix(self) -> DenseMatrix:
        return as_dense_matrix(self.rows)


class AssignmentPayload(BaseModel):
    A: MatrixPayload
    B: MatrixPayload

    def to_assignment(self) -> Assignment:
        return Assignment(self.A.to_matrix(), self.B.to_matrix())

    @classmethod
    def from_assignment(cls, a: Assignment) -> "AssignmentPayload":
        return cls(A=MatrixPayload.from_matrix(a.mat_a), B=MatrixPayload.from_matrix(a.mat_b))


class EvalPayload(BaseModel):
    side: Side
    degree: int
    factors: Optional[int] = None
    result: MatrixPayload
    frobenius_error: float


class ReportRowPayload(BaseModel):
    total_degree: int
    factor_cap: Optional[int] = None
    frobenius_error: float
    terms_evaluated: int
    seconds: float = 0.0

    @classmethod
    def from_row(cls, row: ErrorRow) -> "ReportRowPayload":
        return cls(
            total_degree=row.total_degree,
            factor_cap=row.factor_cap,
            frobenius_error=row.frobenius_error,
            terms_evaluated=row.terms_evaluated,
            seconds=row.seconds,
        )


class ReportPayload(BaseModel):
    dim: int
    side: Side
    rows: List[ReportRowPayload]

    @classmethod
    def from_report(cls, dim: int, side: Side, report: ErrorReport) -> "ReportPayload":
        return cls(dim=dim, side=side, rows=[ReportRowPayload.from_row(row) for row in report.rows])


class BenchPayload(BaseModel):
    seed: int
    norm: float
    triangular: bool = False
    reports: List[ReportPayload]


class CheckPayload(BaseModel):
    suite: str
    name: str
    passed: bool
    detail: str = ""


class VerifyPayload(BaseModel):
    suite: str
    passed: bool
    checks: List[CheckPayload]


def dump_json(payload: BaseModel) -> str:
    """Stable JSON text: sorted keys, fixed indent, trailing newline."""
    return json.dumps(payload.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
