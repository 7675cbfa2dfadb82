import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracgreen.asymexp import (
    AsymptoticError,
    as_add,
    as_binomial_power,
    as_equal,
    as_jump,
    as_make,
    as_mul,
    as_unit,
)
from fracgreen.ratfun import inv_minus, order_at_infinity, rf_arith, rf_const, rf_from_poles, rf_poly


def bracket_inv(br=1.0):
    return rf_from_poles([1.0], [(1j * br, 1), (-1j * br, 1)])


def xi_bracket(br=1.0):
    return rf_arith("mul", rf_poly([0, 1]), bracket_inv(br))


def test_unit_times_unit():
    s = as_mul(as_unit(2), as_unit(2))
    assert len(s.terms) == 1 and s.remainder_order == 2
    assert as_equal(s, as_unit(2))


def test_order_minus_one_product_dropped():
    r = xi_bracket()
    s = rf_arith("mul", rf_poly([0, 2j]), bracket_inv(2.0))
    prod = as_mul(as_make([rf_const(1.0), r]), as_make([rf_const(1.0), s]))
    assert prod.remainder_order == 2
    assert as_equal(prod, as_make([rf_const(1.0), r, s]))
    assert all(order_at_infinity(t) > -2 for t in prod.terms)


def test_binomial_power_exact_cases():
    r = xi_bracket()
    t = as_make([r], 3)
    assert as_equal(as_binomial_power(t, 1.0), as_make([rf_const(1.0), r], 3))
    sq = as_binomial_power(t, 2.0)
    expected = as_make([rf_const(1.0), rf_arith("mul", rf_const(2.0), r), rf_arith("mul", r, r)], 3)
    assert as_equal(sq, expected)


def test_binomial_half_second_coefficient():
    # t = c / <xi>^2 with c of degree one; the t^2 coefficient is C(1/2, 2) = -1/8
    t = as_make([rf_arith("mul", rf_poly([0.3, 1.0]), bracket_inv())], 3)
    s = as_binomial_power(t, 0.5)
    t2 = rf_arith("mul", t.terms[0], t.terms[0])
    expected = as_make([rf_const(1.0), rf_arith("mul", rf_const(0.5), t.terms[0]), rf_arith("mul", rf_const(-0.125), t2)], 3)
    assert as_equal(s, expected)


def test_binomial_rejects_order_zero_term():
    with pytest.raises(AsymptoticError):
        as_binomial_power(as_make([rf_const(0.5)]), 0.5)


def test_jump_examples():
    assert abs(as_jump(as_make([rf_const(1.0), xi_bracket()])) - 1j) < 1e-12
    assert as_jump(as_unit(2)) == 0
    assert abs(as_jump(as_make([inv_minus(1.0), bracket_inv()])) + 1) < 1e-12


def test_jump_needs_remainder_two():
    with pytest.raises(AsymptoticError):
        as_jump(as_make([xi_bracket()], 1))


def test_terms_below_remainder_are_dropped():
    s = as_make([rf_const(1.0), bracket_inv()], 2)
    assert len(s.terms) == 1


# ------------------------------------------------------------- properties

coef_st = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
term_st = st.tuples(
    coef_st,
    st.integers(0, 1),
    st.floats(0.5, 3.0),
    st.floats(0.5, 3.0),
)


def make_term(term):
    c, deg, s1, s2 = term
    num = [0.0] * deg + [c]
    # order -1 or -2: poles in both half-planes
    return rf_from_poles(num, [(1j * s1, 1), (-1j * s2 - 0.1, 1)])


def make_sum(specs, n=2, const=True):
    terms = [make_term(s) for s in specs]
    if const:
        terms = [rf_const(1.0)] + terms
    return as_make(terms, n)


sum_st = st.lists(term_st, min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(sum_st, sum_st)
def test_mul_commutes(a, b):
    s1, s2 = make_sum(a), make_sum(b)
    assert as_equal(as_mul(s1, s2), as_mul(s2, s1))


@settings(max_examples=30, deadline=None)
@given(sum_st, sum_st, sum_st)
def test_mul_associates(a, b, c):
    s1, s2, s3 = make_sum(a, 3), make_sum(b, 3), make_sum(c, 3)
    left = as_mul(as_mul(s1, s2), s3)
    right = as_mul(s1, as_mul(s2, s3))
    assert left.remainder_order == right.remainder_order
    assert as_equal(left, right)


@settings(max_examples=30, deadline=None)
@given(sum_st, st.sampled_from([2.0, 0.5]))
def test_binomial_power_inverts(a, power):
    t = make_sum(a, 3, const=False)
    s = as_binomial_power(t, power)
    head = [u for u in s.terms if order_at_infinity(u) == 0]
    assert len(head) == 1 and abs(head[0](7.0) - 1) < 1e-14
    back_t = as_make([u for u in s.terms if order_at_infinity(u) < 0], 3)
    back = as_binomial_power(back_t, 1.0 / power)
    assert as_equal(back, as_add(as_unit(3), t))


@settings(max_examples=40, deadline=None)
@given(sum_st)
def test_jump_invariant_under_unit(a):
    s = make_sum(a)
    assert abs(as_jump(as_mul(s, as_unit(2))) - as_jump(s)) <= 1e-12 * (1 + abs(as_jump(s)))


@settings(max_examples=40, deadline=None)
@given(sum_st, st.lists(st.floats(-50, 50), min_size=2, max_size=2))
def test_add_evaluates_pointwise(a, xs):
    s1, s2 = make_sum(a), make_sum(a[::-1])
    tot = as_add(s1, s2)
    for x in xs:
        assert np.isclose(tot(x), s1(x) + s2(x), rtol=1e-12, atol=1e-12)


def test_equal_detects_order_minus_one_difference():
    s = as_make([rf_const(1.0), xi_bracket()])
    assert not as_equal(s, as_unit(2))
    assert not as_equal(s, as_make([rf_const(1.0), rf_arith("mul", rf_const(2.0), xi_bracket(1.5))]))
    # same leading coefficient: the difference is O(xi^-3)
    assert as_equal(s, as_make([rf_const(1.0), xi_bracket(1.5)]))
    # an order -2 difference is inside the remainder
    other = as_make([rf_const(1.0), rf_arith("add", xi_bracket(), bracket_inv())], 2)
    assert as_equal(s, other)


def test_small_terms_survive_collapse():
    # numerator roots within 1e-9 of the poles are not common factors
    r = rf_from_poles([0.0, 1.0], [(1j, 1), (-1j - 0.1, 1)])
    small = rf_arith("mul", rf_const(7.8e-10), r)
    s1 = as_mul(as_make([rf_const(1.0), r]), as_make([rf_const(1.0), small]))
    s2 = as_mul(as_make([rf_const(1.0), small]), as_make([rf_const(1.0), r]))
    assert as_equal(s1, s2)
    assert not as_equal(as_make([rf_const(1.0), small]), as_unit(2))
