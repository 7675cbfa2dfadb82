import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracgreen.asymexp import as_equal
from fracgreen.bsym import (
    BoundaryJet,
    BSymbol,
    boundary_symbol_closed,
    boundary_symbol_numeric,
    boundary_symbol_pipeline,
    classify_locality,
    q_expansion,
    q_expansion_closed,
    s0,
    sigma_roots,
)
from fracgreen.powsym import JetError, OperatorJet
from fracgreen.scenarios import localized_jet, random_jet, random_tangent

A_VALUES = [0.3, 0.5, 0.75, 1.25]


def bj(jet, xi_t):
    return BoundaryJet(jet, np.atleast_1d(np.asarray(xi_t, dtype=float)))


# ------------------------------------------------------------------ roots


def test_sigma_roots_identity():
    sp_, sm = sigma_roots(bj(OperatorJet(np.eye(2)), [1.0]))
    assert abs(sp_ - 1) < 1e-14 and abs(sm - 1) < 1e-14


def test_sigma_roots_off_diagonal():
    A = np.eye(2)
    A[0, 1] = A[1, 0] = 0.5
    sp_, sm = sigma_roots(bj(OperatorJet(A), [1.0]))
    assert abs(sp_ - (np.sqrt(3) / 2 + 0.5j)) < 1e-14
    assert abs(sm - (np.sqrt(3) / 2 - 0.5j)) < 1e-14


def test_sigma_roots_scale_invariant():
    sp_, sm = sigma_roots(bj(OperatorJet(4 * np.eye(3)), [0.6, 0.8]))
    assert abs(sp_ - 1) < 1e-14 and abs(sm - 1) < 1e-14


def test_small_tangent_rejected():
    with pytest.raises(JetError):
        bj(OperatorJet(np.eye(2)), [0.5])


def test_s0_values():
    assert s0(bj(OperatorJet(np.eye(2)), [1.0]), 0.5) == 1
    assert abs(s0(OperatorJet(np.diag([1.0, 4.0])), 0.5) - 2) < 1e-15


# -------------------------------------------------------------- expansion


def test_laplacian_expansion_is_unit():
    q = q_expansion(bj(OperatorJet(np.eye(3)), [1.0, 2.0]), 0.75)
    assert len(q.terms) == 1
    assert abs(q(3.7) - 1) < 1e-15


def test_localized_laplacian_expansion():
    rng = np.random.default_rng(3)
    g, a = 0.8, 0.6
    jet = localized_jet(rng, 3, g)
    b = bj(jet, [1.2, -0.7])
    q = q_expansion(b, a)
    # 1 - i a g xi_n / l0, compared via the closed-form builder
    assert as_equal(q, q_expansion_closed(b, a))
    assert abs(boundary_symbol_pipeline(b, a) - a * g) < 1e-12


def test_expansion_matches_termwise_builder_on_variable_ann():
    tau = 0.9
    dA = np.zeros((2, 2, 2))
    dA[1, 1, 1] = tau
    b = bj(OperatorJet(np.eye(2), dA=dA), [1.0])
    assert as_equal(q_expansion(b, 0.5), q_expansion_closed(b, 0.5))
    for x in (50.0, -80.0, 200.0):
        d = q_expansion(b, 0.5)(x) - q_expansion_closed(b, 0.5)(x)
        assert abs(d) * x * x < 10.0  # O(xi_n^-2)


@pytest.mark.parametrize("seed", range(8))
def test_expansion_builders_agree_random(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(2, 4))
    b = bj(random_jet(rng, n), random_tangent(rng, n, 1.0, 10.0))
    a = float(rng.choice(A_VALUES))
    assert as_equal(q_expansion(b, a), q_expansion_closed(b, a))


# ------------------------------------------------------------ closed form


def test_laplacian_symbol_is_zero():
    s = boundary_symbol_closed(OperatorJet(np.eye(3)), 0.5)
    assert s.c0 == 0 and not np.any(s.c_tan) and not np.any(s.c_nonlocal)
    assert boundary_symbol_pipeline(bj(OperatorJet(np.eye(2)), [1.0]), 0.5) == 0


def test_localized_and_perturbed_closed_form():
    rng = np.random.default_rng(5)
    for c_nu in (0.0, 0.7):
        jet = localized_jet(rng, 3, 1.3, c_nu)
        s = boundary_symbol_closed(jet, 0.75)
        assert abs(s.c0 - 0.75 * (1.3 - c_nu)) < 1e-14
        assert not np.any(s.c_tan) and not np.any(s.c_nonlocal)
        assert classify_locality(s) == "local"


def test_nonlocal_coefficient_example():
    dA = np.zeros((2, 2, 2))
    dA[0, 1, 1] = 1.0
    jet = OperatorJet(np.eye(2), dA=dA)
    s = boundary_symbol_closed(jet, 0.5)
    assert abs(s.c_nonlocal[0] + 0.25) < 1e-15
    assert classify_locality(s) == "nonlocal"
    assert abs(boundary_symbol_pipeline(bj(jet, [2.0]), 0.5) - s([2.0])) < 1e-12


def test_normal_drift_example():
    beta = 1.7
    jet = OperatorJet(np.eye(2), b=[0.0, beta])
    for a in A_VALUES:
        assert abs(boundary_symbol_pipeline(bj(jet, [1.0]), a) + a * beta) < 1e-12


def test_zero_symbol_is_local():
    assert classify_locality(BSymbol(0j, np.zeros(2), np.zeros(2))) == "local"


def test_first_power_by_hand():
    """At ``a = 1`` with constant coefficients ``q = (l0 + i b.xi) / <xi>^2``.

    Its ``1/xi_n`` coefficient is ``beta + i b_n`` with ``beta`` the linear
    coefficient of ``l0`` in ``xi_n``, so the jump is ``i beta - b_n``.
    """
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(2, 4))
        jet = random_jet(rng, n, derivs=False)
        xi_t = random_tangent(rng, n, 1.0, 5.0)
        off = jet.A[:-1, -1] + jet.A[-1, :-1]
        expected = 1j * (off @ xi_t) - jet.b[-1]
        assert abs(boundary_symbol_pipeline(bj(jet, xi_t), 1.0) - expected) < 1e-12 * (1 + abs(expected))
        assert abs(boundary_symbol_closed(jet, 1.0)(xi_t) - expected) < 1e-12 * (1 + abs(expected))


def test_scaling_of_coefficients():
    rng = np.random.default_rng(12)
    t = 4.0
    for a in A_VALUES:
        jet = random_jet(rng, 3, derivs=False)
        xi_t = random_tangent(rng, 3, 1.0, 10.0)
        scaled = OperatorJet(t * jet.A, b=t * jet.b, b0=jet.b0)
        b1 = boundary_symbol_pipeline(bj(jet, xi_t), a)
        bt = boundary_symbol_pipeline(bj(scaled, xi_t), a)
        assert abs(bt - t**a * b1) < 1e-11 * (1 + abs(bt))


def test_published_form_disagrees():
    """The commonly quoted closed form has the opposite tangential sign."""
    A = np.eye(2)
    A[0, 1] = 0.3
    jet = OperatorJet(A)
    b = bj(jet, [2.0])
    pipe = boundary_symbol_pipeline(b, 0.5)
    assert abs(pipe - boundary_symbol_closed(jet, 0.5)([2.0])) < 1e-12
    assert abs(pipe - boundary_symbol_closed(jet, 0.5, literal=True)([2.0])) > 0.1


# ------------------------------------------------------------- properties

seed_st = st.integers(0, 2**31 - 1)


@settings(max_examples=50, deadline=None)
@given(seed_st)
def test_pipeline_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    jet = random_jet(rng, n, 0.3)
    a = float(rng.choice(A_VALUES))
    xi_t = random_tangent(rng, n, 1.0, 10.0)
    got = boundary_symbol_pipeline(bj(jet, xi_t), a)
    ref = boundary_symbol_closed(jet, a)(xi_t)
    assert abs(got - ref) <= 1e-9 * (1 + abs(ref))


@settings(max_examples=15, deadline=None)
@given(seed_st)
def test_pipeline_matches_numeric_jump(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    jet = random_jet(rng, n, 0.3)
    a = float(rng.choice(A_VALUES))
    b = bj(jet, random_tangent(rng, n, 1.0, 10.0))
    got = boundary_symbol_pipeline(b, a)
    num, err = boundary_symbol_numeric(b, a)
    assert abs(got - num) <= 1e-8 * (1 + abs(num))


@settings(max_examples=30, deadline=None)
@given(seed_st)
def test_real_coefficients_reflect_to_conjugate(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    jet = random_jet(rng, n, 0.3, complex_coeffs=False)
    a = float(rng.choice(A_VALUES))
    xi_t = random_tangent(rng, n, 1.0, 10.0)
    plus = boundary_symbol_pipeline(bj(jet, xi_t), a)
    minus = boundary_symbol_pipeline(bj(jet, -xi_t), a)
    assert abs(minus - np.conj(plus)) <= 1e-10 * (1 + abs(plus))


@settings(max_examples=40, deadline=None)
@given(seed_st)
def test_locality_follows_tangential_derivative(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    jet = random_jet(rng, n, 0.3)
    dA = jet.dA.copy()
    dA[:-1, -1, -1] = 0.0
    local = OperatorJet(jet.A, dA=dA, b=jet.b, ellipticity_margin=0.3)
    assert classify_locality(boundary_symbol_closed(local, 0.5)) == "local"
    dA[0, -1, -1] = 0.5
    nonlocal_ = OperatorJet(jet.A, dA=dA, b=jet.b, ellipticity_margin=0.3)
    assert classify_locality(boundary_symbol_closed(nonlocal_, 0.5)) == "nonlocal"
