from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from pydantic import ValidationError

from zexp.freealg import (
    Generator,
    from_words,
    generator,
    nc_add,
    nc_commutator,
    nc_exp_truncated,
    nc_grade,
    nc_mul,
    nc_power,
    nc_reverse,
    nc_scale,
    one,
)
from zexp.zassenhaus import (
    Composition,
    ExpansionConfig,
    IndexRangeError,
    Side,
    SideMismatchError,
    XmpTable,
    classical_transposed_product,
    classical_zassenhaus_product,
    classical_zassenhaus_terms,
    classical_zassenhaus_transposed,
    composition_coefficient,
    compositions,
    compositions_of,
    count_compositions,
    exp_b_subseries,
    exp_sum_series,
    expansion_terms,
    factorized_to_poly,
    left_expansion,
    reconstruct_power,
    right_expansion,
    script_b,
    script_b_prime,
    xm,
    xm_master,
    xmp_closed,
    xmp_factorized,
    xmp_one_step,
    xmp_recursive,
)

A = generator(Generator.A)
B = generator(Generator.B)


def _pairs(max_m: int):
    return [(m, p) for m in range(1, max_m + 1) for p in range(1, m + 1)]


def test_script_b_prime_is_nested_commutator() -> None:
    assert script_b_prime(1) == B
    assert script_b_prime(2) == nc_commutator(A, B)
    assert script_b_prime(3) == from_words([("AAB", 1), ("ABA", -2), ("BAA", 1)])
    assert script_b(3) == nc_scale(script_b_prime(3), Fraction(1, 6))


def test_script_b_prime_rejects_zero_index() -> None:
    with pytest.raises(IndexRangeError):
        script_b_prime(0)


def test_small_xmp_values() -> None:
    assert xmp_recursive(1, 1) == B
    assert xmp_recursive(2, 1) == from_words([("AB", 1), ("BA", -1)])
    assert xmp_recursive(2, 2) == from_words([("BB", 1)])
    assert xmp_recursive(3, 2) == from_words([("ABB", 1), ("BAB", 1), ("BBA", -2)])
    assert xmp_recursive(3, 3) == nc_power(B, 3)


@pytest.mark.parametrize("m,p", _pairs(8))
def test_closed_form_and_one_step_match_recursion(m: int, p: int) -> None:
    assert xmp_closed(m, p) == xmp_recursive(m, p)
    assert xmp_one_step(m, p) == xmp_recursive(m, p)


@pytest.mark.parametrize("m,p", _pairs(7))
def test_xmp_is_homogeneous_with_p_factors_of_b(m: int, p: int) -> None:
    poly = xmp_recursive(m, p)
    assert not poly.is_zero()
    assert all(key.degree == m and key.bdeg == p for key, _ in poly.items())


@pytest.mark.parametrize("m,p", [(0, 1), (2, 0), (2, 3)])
def test_xmp_index_range(m: int, p: int) -> None:
    with pytest.raises(IndexRangeError):
        xmp_recursive(m, p)
    with pytest.raises(IndexRangeError):
        xmp_closed(m, p)


def test_factorized_form_of_x52() -> None:
    assert xmp_factorized(5, 2) == [(1, (4, 1)), (4, (3, 2)), (6, (2, 3)), (4, (1, 4))]
    assert factorized_to_poly(xmp_factorized(5, 2)) == xmp_recursive(5, 2)


def test_factorized_form_of_x43() -> None:
    assert xmp_factorized(4, 3) == [(1, (2, 1, 1)), (2, (1, 2, 1)), (3, (1, 1, 2))]


def test_table_fills_consistently_from_threads() -> None:
    table = XmpTable()
    requests = [(m, p) for m in range(6, 0, -1) for p in range(1, m + 1)]
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda mp: table.get(*mp), requests))
    for (m, p), value in zip(requests, results):
        assert value == xmp_recursive(m, p)


def test_power_reconstruction_and_master_recursion() -> None:
    assert xm(0) == one()
    assert xm(2) == from_words([("AB", 1), ("BA", -1), ("BB", 1)])
    for n in range(7):
        assert reconstruct_power(n) == nc_power(nc_add(A, B), n)
        assert xm_master(n) == xm(n)


def test_compositions_are_weight_major_then_lexicographic() -> None:
    assert [c.parts for c in compositions(3)] == [(1,), (1, 1), (2,), (1, 1, 1), (1, 2), (2, 1), (3,)]
    assert [c.parts for c in compositions_of(4, 2)] == [(1, 3), (2, 2), (3, 1), (4,)]


@pytest.mark.parametrize("n,cap,expected", [(1, None, 1), (4, None, 15), (10, None, 1023), (6, 1, 6), (4, 2, 10)])
def test_count_compositions(n: int, cap, expected: int) -> None:
    assert count_compositions(n, cap) == expected
    assert count_compositions(n, cap) == sum(1 for _ in compositions(n, cap))


def test_composition_rejects_empty_and_non_positive_parts() -> None:
    with pytest.raises(ValueError):
        Composition(())
    with pytest.raises(ValueError):
        Composition((2, 0))


@pytest.mark.parametrize(
    "parts,right,left",
    [
        ((1,), Fraction(1), Fraction(1)),
        ((2,), Fraction(1), Fraction(-1)),
        ((3,), Fraction(1), Fraction(1)),
        ((1, 1), Fraction(1, 2), Fraction(1, 2)),
        ((2, 1), Fraction(2, 3), Fraction(-2, 3)),
        ((1, 2), Fraction(1, 3), Fraction(-1, 3)),
        ((1, 1, 1), Fraction(1, 6), Fraction(1, 6)),
    ],
)
def test_composition_coefficients(parts, right: Fraction, left: Fraction) -> None:
    comp = Composition(parts)
    assert composition_coefficient(comp, Side.RIGHT) == right
    assert composition_coefficient(comp, Side.LEFT) == left


def test_expansion_terms_at_degree_two() -> None:
    terms = list(expansion_terms(ExpansionConfig(max_total_degree=2)))
    assert [(t.composition.parts, t.coefficient) for t in terms] == [
        ((1,), Fraction(1)),
        ((1, 1), Fraction(1, 2)),
        ((2,), Fraction(1)),
    ]
    assert list(expansion_terms(ExpansionConfig(max_total_degree=0))) == []


def test_factor_order_depends_on_side() -> None:
    right = next(t for t in expansion_terms(ExpansionConfig(max_total_degree=3)) if t.composition.parts == (2, 1))
    left = next(
        t for t in expansion_terms(ExpansionConfig(max_total_degree=3, side=Side.LEFT)) if t.composition.parts == (2, 1)
    )
    assert right.factor_order() == (1, 2)
    assert left.factor_order() == (2, 1)


def test_right_expansion_through_degree_two() -> None:
    expected = from_words([("", 1), ("B", 1), ("AB", Fraction(1, 2)), ("BA", Fraction(-1, 2)), ("BB", Fraction(1, 2))])
    assert right_expansion(ExpansionConfig(max_total_degree=2)) == expected
    assert right_expansion(ExpansionConfig(max_total_degree=0)) == one()


@pytest.mark.parametrize("n", [1, 3, 5])
def test_right_and_left_forms_resum_to_the_exponential(n: int) -> None:
    target = nc_exp_truncated(nc_add(A, B), n)
    exp_a = nc_exp_truncated(A, n)
    right = nc_mul(right_expansion(ExpansionConfig(max_total_degree=n)), exp_a)
    left = nc_mul(exp_a, left_expansion(ExpansionConfig(max_total_degree=n, side=Side.LEFT)))
    for d in range(n + 1):
        assert nc_grade(right, d) == nc_grade(target, d)
        assert nc_grade(left, d) == nc_grade(target, d)


def test_left_form_is_the_reversal_of_the_right_form() -> None:
    right = right_expansion(ExpansionConfig(max_total_degree=5))
    left = left_expansion(ExpansionConfig(max_total_degree=5, side=Side.LEFT))
    assert left == nc_reverse(right)


def test_factor_cap_of_one_keeps_only_single_blocks() -> None:
    capped = right_expansion(ExpansionConfig(max_total_degree=3, max_factors=1))
    assert capped == nc_add(one(), nc_add(script_b(1), nc_add(script_b(2), script_b(3))))


def test_expansion_rejects_wrong_side() -> None:
    with pytest.raises(SideMismatchError):
        right_expansion(ExpansionConfig(max_total_degree=2, side=Side.LEFT))
    with pytest.raises(SideMismatchError):
        left_expansion(ExpansionConfig(max_total_degree=2))


def test_expansion_config_validation() -> None:
    with pytest.raises(ValidationError):
        ExpansionConfig(max_total_degree=-1)
    with pytest.raises(ValidationError):
        ExpansionConfig(max_total_degree=3, max_factors=0)


def test_b_only_terms_form_exp_b() -> None:
    assert exp_b_subseries(4) == nc_exp_truncated(B, 4)


def test_classical_terms_of_low_order() -> None:
    terms = classical_zassenhaus_terms(3, 3)
    ab = nc_commutator(A, B)
    assert terms[0] == nc_scale(ab, Fraction(-1, 2))
    assert terms[1] == nc_add(
        nc_scale(nc_commutator(B, ab), Fraction(1, 3)), nc_scale(nc_commutator(A, ab), Fraction(1, 6))
    )


def test_classical_products_reconstruct_the_exponential() -> None:
    target = exp_sum_series(4)
    terms = classical_zassenhaus_terms(4, 4)
    transposed = classical_zassenhaus_transposed(4, 4)
    assert classical_zassenhaus_product(terms, 4) == target
    assert classical_transposed_product(transposed, 4) == target


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_transposed_terms_are_reversed_and_signed(n: int) -> None:
    z_n = classical_zassenhaus_terms(5, 5)[n - 2]
    zt_n = classical_zassenhaus_transposed(5, 5)[n - 2]
    assert zt_n == nc_reverse(z_n)
    assert zt_n == nc_scale(z_n, (-1) ** (n + 1))


@pytest.mark.parametrize("n_max,truncation", [(1, 3), (4, 3)])
def test_classical_index_range(n_max: int, truncation: int) -> None:
    with pytest.raises(IndexRangeError):
        classical_zassenhaus_terms(n_max, truncation)
