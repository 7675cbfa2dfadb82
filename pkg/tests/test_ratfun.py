import cmath

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from fracgreen.ratfun import (
    RationalFnError,
    inv_minus,
    inv_plus,
    jump,
    jump_paths,
    order_at_infinity,
    partial_fractions,
    rf_arith,
    rf_const,
    rf_from_poles,
    rf_make,
    rf_poly,
    rf_reflect_conj,
    rf_scale,
)


def bracket_inv(br):
    return rf_from_poles([1.0], [(1j * br, 1), (-1j * br, 1)])


def assert_same(r1, r2, pts=(-3.1, -0.4, 0.0, 0.7, 2.2, 9.0)):
    for x in pts:
        assert abs(r1(x) - r2(x)) <= 1e-12 * (1 + abs(r2(x)))


# ------------------------------------------------------------ construction


def test_make_cancels_common_root():
    r = rf_make([0, 1], [0, 1])
    assert r.poles == ()
    assert np.allclose(r.num.coef, [1.0])


def test_make_normalizes_monic():
    r = rf_make([1], [2, 0, 2])
    assert np.allclose(r.num.coef, [0.5])
    assert np.allclose(r.den.coef, [1, 0, 1])
    locs = sorted((p for p, k in r.poles), key=lambda z: z.imag)
    assert np.allclose(locs, [-1j, 1j])
    assert all(k == 1 for _, k in r.poles)


def test_make_finds_hand_factored_poles():
    den = np.polynomial.Polynomial([-1j, 1]) * np.polynomial.Polynomial([2j, 1])
    r = rf_make([1], den.coef)
    locs = sorted((p for p, _ in r.poles), key=lambda z: z.imag)
    assert np.allclose(locs, [-2j, 1j], atol=1e-12)


def test_make_rejects_zero_denominator():
    with pytest.raises(RationalFnError):
        rf_make([1], [0, 0])


def test_make_clusters_double_root():
    r = rf_make([1], [-1, -2j, 1])  # (x - i)^2
    assert len(r.poles) == 1 and r.poles[0][1] == 2
    assert abs(r.poles[0][0] - 1j) < 1e-7


# -------------------------------------------------------------- arithmetic


def test_add_chi_pair_gives_bracket_inverse():
    s = rf_arith("add", inv_plus(1.0), inv_minus(1.0))
    assert_same(s, rf_make([2], [1, 0, 1]))
    assert_same(rf_scale(s, 0.5), bracket_inv(1.0))


def test_mul_identity_and_factorization():
    r = rf_make([1, 2], [3, 1, 1])
    assert_same(rf_arith("mul", r, rf_const(1.0)), r)
    assert_same(rf_arith("mul", inv_plus(1.0), inv_minus(1.0)), rf_make([1], [1, 0, 1]))


def test_subtraction_to_zero():
    r = rf_make([1, 2], [3, 1, 1])
    assert (r - r).is_zero


def test_order_at_infinity_examples():
    assert order_at_infinity(rf_make([0, 1], [1, 0, 1])) == -1
    assert order_at_infinity(rf_make([1], [1, 0, 1])) == -2
    assert order_at_infinity(rf_make([1, 0, 0, 1], [4, 0, 1])) == 1
    assert order_at_infinity(rf_const(0.0)) == -np.inf


# --------------------------------------------------------- partial fractions


def test_partial_fractions_bracket_inverse():
    poly, terms = partial_fractions(bracket_inv(1.0))
    assert abs(poly(0.3)) < 1e-14
    coef = {round(p.imag): c for p, k, c in terms}
    assert abs(coef[1] - (-0.5j)) < 1e-14
    assert abs(coef[-1] - 0.5j) < 1e-14


def test_partial_fractions_odd_bracket_part():
    r = rf_arith("mul", rf_poly([0, -2j]), bracket_inv(1.0))
    assert_same(r, inv_plus(1.0) - inv_minus(1.0))


def test_partial_fractions_reconstruct_with_double_pole():
    r = rf_from_poles([1, 2, 0.5], [(1j, 2), (-2j + 0.3, 1), (0.5 + 3j, 1)])
    poly, terms = partial_fractions(r)
    for x in np.linspace(-5, 5, 11):
        val = poly(x) + sum(c / (x - p) ** k for p, k, c in terms)
        assert abs(val - r(x)) <= 1e-10 * (1 + abs(r(x)))


def test_partial_fractions_refuses_near_coincident_poles():
    r = rf_from_poles([1], [(1j, 1), (1j + 1e-8, 1)])
    with pytest.raises(RationalFnError):
        partial_fractions(r)


# -------------------------------------------------------------------- jump


@pytest.mark.parametrize("br", [1.0, np.sqrt(2), 5.0])
def test_jump_table_brackets(br):
    assert abs(jump(bracket_inv(br))) < 1e-12
    assert abs(jump(rf_arith("mul", rf_poly([0, 1]), bracket_inv(br))) - 1j) < 1e-12
    assert abs(jump(inv_minus(br)) + 1) < 1e-12


@pytest.mark.parametrize("ann", [1.0, 2.0, 4.0])
def test_jump_xi_over_l0(ann):
    r = rf_make([0, 1], [1, 0, ann])
    assert abs(jump(r) - 1j / ann) < 1e-12


def test_jump_rejects_real_axis_pole_and_growth():
    with pytest.raises(RationalFnError):
        jump(rf_make([1], [0, 1]))
    with pytest.raises(RationalFnError):
        jump(rf_poly([0, 1]))


def test_jump_ignores_constant_part():
    r = rf_arith("add", rf_const(3.0), rf_make([0, 1], [1, 0, 1]))
    assert abs(jump(r) - 1j) < 1e-12


# ------------------------------------------------------------- properties

pole_st = st.tuples(
    st.floats(0.2, 4.0),  # |Re sigma|
    st.floats(-2.0, 2.0),  # Im sigma
    st.sampled_from([1, -1]),  # side: +1 upper, -1 lower
    st.integers(1, 2),  # multiplicity
    st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
)


def pole_of(item):
    re, im, side, _, _ = item
    return 1j * complex(re, im) if side == 1 else -1j * complex(re, im)


def well_separated(items, gap=1.0):
    locs = [pole_of(it) for it in items]
    return all(abs(p - q) >= gap for i, p in enumerate(locs) for q in locs[i + 1:])


def build_exp_sum(items):
    """``sum c/(s +/- i x)^k`` and its known transform jump.

    ``1/(s + i x)`` transforms to ``H(z) exp(-s z)`` and ``1/(s - i x)`` to
    ``H(-z) exp(s z)``; powers above one vanish at ``z = 0``.
    """
    r = rf_const(0.0)
    expected = 0j
    for re, im, side, k, c in items:
        s = complex(re, im)
        base = inv_plus(s, k) if side == 1 else inv_minus(s, k)
        r = rf_arith("add", r, rf_scale(base, c))
        if k == 1:
            expected += c * side
    return r, expected


@settings(max_examples=100, deadline=None)
@given(st.lists(pole_st, min_size=1, max_size=3))
def test_jump_paths_agree_and_match_transform(items):
    # denominators up to degree 6 with unit pole separation; at degree 8 with
    # clustered double poles the residue path loses about one more digit
    assume(well_separated(items))
    r, expected = build_exp_sum(items)
    p1, p2 = jump_paths(r)
    assert abs(p1 - p2) <= 1e-12 * (1 + abs(p1))
    assert abs(p1 - expected) <= 1e-9 * (1 + sum(abs(it[4]) for it in items))


def mass(items):
    return 1 + sum(abs(it[4]) for it in items)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(pole_st, min_size=1, max_size=3),
    st.lists(pole_st, min_size=1, max_size=3),
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
)
def test_jump_is_linear(i1, i2, alpha, beta):
    assume(well_separated(i1 + i2))
    r1, _ = build_exp_sum(i1)
    r2, _ = build_exp_sum(i2)
    lhs = jump(rf_arith("add", rf_scale(r1, alpha), rf_scale(r2, beta)))
    rhs = alpha * jump(r1) + beta * jump(r2)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(alpha) + abs(beta)) * mass(i1 + i2)


@settings(max_examples=60, deadline=None)
@given(st.lists(pole_st, min_size=1, max_size=4))
def test_jump_conjugation(items):
    assume(well_separated(items))
    r, _ = build_exp_sum(items)
    rc = rf_reflect_conj(r)
    for x in (-1.3, 0.2, 2.5):
        assert cmath.isclose(rc(x), np.conj(r(-x)), rel_tol=1e-10, abs_tol=1e-12)
    assert abs(jump(rc) - np.conj(jump(r))) <= 1e-10 * mass(items)


@settings(max_examples=60, deadline=None)
@given(st.lists(pole_st, min_size=1, max_size=4))
def test_jump_vanishes_for_order_minus_two(items):
    assume(well_separated(items + [(1.7, 0.0, 1, 1, 0j), (1.7, 0.0, -1, 1, 0j)]))
    r, _ = build_exp_sum(items)
    r2 = rf_arith("mul", r, bracket_inv(1.7))
    assert order_at_infinity(r2) <= -2
    assert abs(jump(r2)) <= 1e-10 * mass(items)


@settings(max_examples=60, deadline=None)
@given(st.lists(pole_st, min_size=1, max_size=4), st.lists(st.floats(-20, 20), min_size=3, max_size=3))
def test_partial_fractions_reconstruction(items, xs):
    assume(well_separated(items))
    r, _ = build_exp_sum(items)
    poly, terms = partial_fractions(r)
    for x in xs:
        val = poly(x) + sum(c / (x - p) ** k for p, k, c in terms)
        assert abs(val - r(x)) <= 1e-10 * (1 + abs(r(x)))
