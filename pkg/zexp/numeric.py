"""Dense-matrix evaluation of the expansions and a matrix-exponential oracle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from zexp.bch import Family
from zexp.freealg import NCPoly
from zexp.metrics import observe_expansion
from zexp.zassenhaus import ExpansionConfig, Side, count_compositions

logger = logging.getLogger(__name__)

DenseMatrix = np.ndarray


class DimensionMismatchError(ValueError):
    """Raised when matrices of different sizes are combined."""


class MatrixFormatError(ValueError):
    """Raised when matrix input is not a finite square array."""


def as_dense_matrix(rows: object) -> DenseMatrix:
    try:
        matrix = np.array(rows, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"Matrix entries must be real numbers: {exc}") from exc
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise MatrixFormatError(f"Expected a non-empty square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise MatrixFormatError("Matrix contains NaN or infinite entries")
    return matrix


@dataclass(frozen=True, eq=False)
class Assignment:
    mat_a: DenseMatrix
    mat_b: DenseMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "mat_a", as_dense_matrix(self.mat_a))
        object.__setattr__(self, "mat_b", as_dense_matrix(self.mat_b))
        if self.mat_a.shape != self.mat_b.shape:
            raise DimensionMismatchError(
                f"A is {self.mat_a.shape[0]}x{self.mat_a.shape[0]} but B is {self.mat_b.shape[0]}x{self.mat_b.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return int(self.mat_a.shape[0])


@dataclass(frozen=True)
class ErrorRow:
    total_degree: int
    factor_cap: Optional[int]
    frobenius_error: float
    terms_evaluated: int
    seconds: float = 0.0


@dataclass
class ErrorReport:
    rows: List[ErrorRow] = field(default_factory=list)

    @property
    def errors(self) -> List[float]:
        return [row.frobenius_error for row in self.rows]


def _pairwise_sum(matrices: Sequence[DenseMatrix], dim: int) -> DenseMatrix:
    if not matrices:
        return np.zeros((dim, dim))
    level = list(matrices)
    while len(level) > 1:
        paired = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


def evaluate(p: NCPoly, a: Assignment) -> DenseMatrix:
    """Algebra homomorphism from the free algebra to d x d matrices."""
    gens = (a.mat_a, a.mat_b)
    prefix: Dict[Tuple[int, ...], DenseMatrix] = {(): np.eye(a.dim)}

    def _word_matrix(letters: Tuple[int, ...]) -> DenseMatrix:
        if letters not in prefix:
            prefix[letters] = _word_matrix(letters[:-1]) @ gens[letters[-1]]
        return prefix[letters]

    terms = [float(coeff) * _word_matrix(key.letters) for key, coeff in p.items()]
    return _pairwise_sum(terms, a.dim)


_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0, 10559470521600.0, 670442572800.0, 33522128640.0, 1323241920.0,
        40840800.0, 960960.0, 16380.0, 182.0, 1.0,
    ),
}

# 1-norm bounds below which each Pade degree meets double precision.
_PADE_THETA = (
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
)
_THETA_13 = 5.371920351148152


def _pade_low(matrix: DenseMatrix, degree: int) -> DenseMatrix:
    coeffs = _PADE_COEFFS[degree]
    ident = np.eye(matrix.shape[0])
    square = matrix @ matrix
    even = ident
    u_inner = coeffs[1] * ident
    v = coeffs[0] * ident
    for j in range(2, degree + 1, 2):
        even = even @ square
        u_inner = u_inner + coeffs[j + 1] * even
        v = v + coeffs[j] * even
    u = matrix @ u_inner
    return np.linalg.solve(v - u, v + u)


def _pade_13(matrix: DenseMatrix) -> DenseMatrix:
    b = _PADE_COEFFS[13]
    ident = np.eye(matrix.shape[0])
    a2 = matrix @ matrix
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = matrix @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    return np.linalg.solve(v - u, v + u)


def expm(m: DenseMatrix) -> DenseMatrix:
    """Matrix exponential by scaling and squaring around a Pade kernel."""
    matrix = as_dense_matrix(m)
    norm = float(np.linalg.norm(matrix, 1))
    if norm == 0.0:
        return np.eye(matrix.shape[0])
    for degree, theta in _PADE_THETA:
        if norm <= theta:
            return _pade_low(matrix, degree)
    squarings = max(0, int(math.ceil(math.log2(norm / _THETA_13))))
    logger.debug("expm: norm %.3g, %d squarings", norm, squarings)
    result = _pade_13(matrix / (2.0 ** squarings))
    for _ in range(squarings):
        result = result @ result
    return result


def frobenius_error(x: DenseMatrix, y: DenseMatrix) -> float:
    if x.shape != y.shape:
        raise DimensionMismatchError(f"Cannot compare shapes {x.shape} and {y.shape}")
    return float(np.linalg.norm(x - y, "fro"))


def _nested_blocks(base: DenseMatrix, start: DenseMatrix, n_max: int) -> List[DenseMatrix]:
    # blocks[n] = ad_base^{n-1}(start) / n!, blocks[0] unused
    blocks: List[DenseMatrix] = [np.zeros_like(start), start.copy()]
    for n in range(2, n_max + 1):
        prev = blocks[-1]
        blocks.append((base @ prev - prev @ base) / n)
    return blocks


def script_b_matrices(a: Assignment, n_max: int) -> List[DenseMatrix]:
    return _nested_blocks(a.mat_a, a.mat_b, n_max)


def _grouped_series(
    blocks: Sequence[DenseMatrix],
    max_total_degree: int,
    max_factors: Optional[int],
    block_on_right: bool,
    sign: Callable[[int], float],
) -> DenseMatrix:
    """Sum of composition products, grouped on the outermost factor.

    ``T[p, w] = sum_k (k / w) sign(k) T[p-1, w-k] B_k`` (or ``B_k T[...]``),
    which reproduces the product coefficients of every composition of weight w
    into p parts.
    """
    dim = blocks[1].shape[0]
    ident = np.eye(dim)
    cap = max_total_degree if max_factors is None else min(max_factors, max_total_degree)
    table: Dict[Tuple[int, int], DenseMatrix] = {(0, 0): ident}
    pieces: List[DenseMatrix] = [ident]
    for p in range(1, cap + 1):
        for w in range(p, max_total_degree + 1):
            acc: List[DenseMatrix] = []
            for k in range(1, w - p + 2):
                prev = table.get((p - 1, w - k))
                if prev is None:
                    continue
                scale = sign(k) * k / w
                product = prev @ blocks[k] if block_on_right else blocks[k] @ prev
                acc.append(scale * product)
            table[(p, w)] = _pairwise_sum(acc, dim)
            pieces.append(table[(p, w)])
    return _pairwise_sum(pieces, dim)


def _alternating(k: int) -> float:
    return 1.0 if k % 2 else -1.0


def _plain(k: int) -> float:
    return 1.0


def expansion_matrix(a: Assignment, cfg: ExpansionConfig) -> DenseMatrix:
    """The braced prefactor of the right or left form, evaluated on ``a``."""
    if cfg.max_total_degree == 0:
        return np.eye(a.dim)
    blocks = script_b_matrices(a, cfg.max_total_degree)
    if cfg.side == Side.RIGHT:
        return _grouped_series(blocks, cfg.max_total_degree, cfg.max_factors, True, _plain)
    return _grouped_series(blocks, cfg.max_total_degree, cfg.max_factors, False, _alternating)


def zassenhaus_apply(a: Assignment, cfg: ExpansionConfig) -> DenseMatrix:
    start = perf_counter()
    prefactor = expansion_matrix(a, cfg)
    exp_a = expm(a.mat_a)
    result = prefactor @ exp_a if cfg.side == Side.RIGHT else exp_a @ prefactor
    observe_expansion(cfg.side.value, perf_counter() - start)
    if not np.all(np.isfinite(result)):
        raise MatrixFormatError("Expansion overflows double precision; scale A and B down")
    return result


def convergence_scan(
    a: Assignment,
    degrees: Sequence[int],
    max_factors: Optional[int] = None,
    side: Side = Side.RIGHT,
) -> ErrorReport:
    if not degrees:
        raise ValueError("degrees must be non-empty")
    if any(later <= earlier for earlier, later in zip(degrees, degrees[1:])):
        raise ValueError(f"degrees must be strictly ascending: {list(degrees)}")
    oracle = expm(a.mat_a + a.mat_b)
    report = ErrorReport()
    for degree in degrees:
        cfg = ExpansionConfig(max_total_degree=degree, max_factors=max_factors, side=side)
        start = perf_counter()
        result = zassenhaus_apply(a, cfg)
        elapsed = perf_counter() - start
        error = frobenius_error(result, oracle)
        logger.debug("N=%d P=%s error=%.3e", degree, max_factors, error)
        report.rows.append(
            ErrorRow(
                total_degree=degree,
                factor_cap=max_factors,
                frobenius_error=error,
                terms_evaluated=count_compositions(degree, max_factors),
                seconds=elapsed,
            )
        )
    return report


def bch_apply(a: Assignment, max_total_degree: int, family: Family) -> DenseMatrix:
    """Product expansion of e^X e^Y with X = matA, Y = matB."""
    if family == Family.SYMMETRIZED:
        return 0.5 * (bch_apply(a, max_total_degree, Family.X) + bch_apply(a, max_total_degree, Family.Y))
    if max_total_degree == 0:
        return np.eye(a.dim)
    start = a.mat_a + a.mat_b
    if family == Family.X:
        blocks = _nested_blocks(a.mat_b, start, max_total_degree)
        return _grouped_series(blocks, max_total_degree, None, True, _alternating)
    blocks = _nested_blocks(a.mat_a, start, max_total_degree)
    return _grouped_series(blocks, max_total_degree, None, False, _plain)


def bch_oracle(a: Assignment) -> DenseMatrix:
    return expm(a.mat_a) @ expm(a.mat_b)


def random_assignment(dim: int, norm: float, seed: int) -> Assignment:
    """Gaussian pair rescaled to spectral norm ``norm`` each."""
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(2):
        raw = rng.standard_normal((dim, dim))
        mats.append(raw * (norm / np.linalg.norm(raw, 2)))
    return Assignment(mats[0], mats[1])


def triangular_assignment(dim: int, seed: int, scale: float = 0.5) -> Assignment:
    """Upper triangular A with strictly upper triangular B."""
    rng = np.random.default_rng(seed)
    mat_a = np.triu(rng.uniform(-scale, scale, (dim, dim)))
    mat_b = np.triu(rng.uniform(-scale, scale, (dim, dim)), k=1)
    return Assignment(mat_a, mat_b)
