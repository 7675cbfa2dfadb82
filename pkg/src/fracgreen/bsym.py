"""Boundary symbol of the Green's formula for ``P = L**a`` on a half-space.

The normal direction is the last coordinate.  At a boundary point and a
tangential frequency ``xi'`` the reduced symbol
``q = chi_-^{-a} # p # chi_+^{-a}`` with ``chi_pm = <xi'> pm i xi_n`` is a
function of ``xi_n`` equal to ``a_nn**a * (1 + order -1 terms) + O(xi_n^-2)``.
The boundary symbol ``b(xi')`` is the jump at ``z_n = 0`` of its inverse
Fourier transform.

Three routes to ``b`` are provided:

* :func:`boundary_symbol_pipeline` expands ``q`` generically with the
  rational algebra and takes the jump term by term;
* :func:`boundary_symbol_closed` evaluates the closed form;
* :func:`boundary_symbol_numeric` evaluates the two-term composition ``q``
  directly at large ``|xi_n|`` and extrapolates the ``1/xi_n`` coefficient
  of its odd part, without any rational algebra.

The closed form differs from the commonly quoted one in the sign of the
tangential term and in the factor of the ``d_n a_nn`` binomial term; the
quoted version is kept as ``boundary_symbol_closed(..., literal=True)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import asymexp as ax
from .powsym import JetError, OperatorJet, binom2, power_symbol
from .ratfun import (
    RationalFn,
    as_poly,
    inv_minus,
    leading_coefficient,
    order_at_infinity,
    rf_arith,
    rf_from_poles,
    rf_scale,
)

LOCALITY_TOL = 1e-12


class ReductionError(ArithmeticError):
    """A reduction step discarded something that is not O(xi_n^-2)."""


@dataclass(frozen=True)
class BoundaryJet:
    jet: OperatorJet
    xi_t: np.ndarray

    def __post_init__(self):
        xi_t = np.atleast_1d(np.asarray(self.xi_t, dtype=float))
        object.__setattr__(self, "xi_t", xi_t)
        if xi_t.shape != (self.jet.n - 1,):
            raise JetError(f"tangential frequency must have {self.jet.n - 1} entries")
        if np.linalg.norm(xi_t) < 1.0 - 1e-14:
            raise JetError("only |xi'| >= 1 is supported")

    @property
    def bracket(self) -> float:
        return float(np.sqrt(1.0 + self.xi_t @ self.xi_t))


@dataclass(frozen=True)
class BSymbol:
    """``b(xi') = c0 + sum c_tan_j i xi_j + sum c_nonlocal_j i xi_j / <xi'>``."""

    c0: complex
    c_tan: np.ndarray
    c_nonlocal: np.ndarray

    def __call__(self, xi_t) -> complex:
        xi_t = np.atleast_1d(np.asarray(xi_t, dtype=float))
        br = np.sqrt(1.0 + xi_t @ xi_t)
        return complex(self.c0 + 1j * (self.c_tan @ xi_t) + 1j * (self.c_nonlocal @ xi_t) / br)


def _quadratic_in_normal(jet: OperatorJet, xi_t: np.ndarray):
    """``l0(xi', xi_n) = ann xi_n^2 + beta xi_n + gamma``."""
    A = jet.A
    ann = A[-1, -1]
    beta = (A[:-1, -1] + A[-1, :-1]) @ xi_t
    gamma = xi_t @ A[:-1, :-1] @ xi_t
    return complex(ann), complex(beta), complex(gamma)


def sigma_roots(bj: BoundaryJet) -> tuple[complex, complex]:
    """``(sigma_+, sigma_-)``: ``i sigma_+`` and ``-i sigma_-`` are the roots of ``l0`` in ``xi_n``."""
    ann, beta, gamma = _quadratic_in_normal(bj.jet, bj.xi_t)
    disc = np.sqrt(beta * beta - 4.0 * ann * gamma + 0j)
    q = -0.5 * (beta + disc) if abs(beta + disc) >= abs(beta - disc) else -0.5 * (beta - disc)
    r1 = q / ann
    r2 = gamma / q if q != 0 else -beta / ann - r1
    up, lo = (r1, r2) if r1.imag > r2.imag else (r2, r1)
    sp, sm = complex(-1j * up), complex(1j * lo)
    scale = abs(ann) + abs(beta) + abs(gamma)
    tol = 1e-10 * max(1.0, abs(sp), abs(sm))
    if sp.real <= tol or sm.real <= tol:
        raise JetError(f"roots {up}, {lo} do not split the real axis: ellipticity violated")
    for r in (up, lo):
        res = abs(ann * r * r + beta * r + gamma)
        if res > 1e-10 * scale * max(1.0, abs(r)) ** 2:
            raise JetError(f"root residual {res:.3g} too large")
    return sp, sm


def s0(bj_or_jet, a: float) -> complex:
    """Principal symbol of ``P`` at the unit normal: ``a_nn ** a``."""
    jet = bj_or_jet.jet if isinstance(bj_or_jet, BoundaryJet) else bj_or_jet
    return complex(jet.A[-1, -1] ** a)


def _normal_polys(bj: BoundaryJet):
    """Polynomials in ``xi_n`` for ``d l0/d xi_j`` and ``d l0/d x_j``, all ``j``."""
    jet = bj.jet
    n = jet.n
    xi_t = bj.xi_t
    S = jet.A + jet.A.T
    dxi = []
    for j in range(n):
        dxi.append(as_poly([S[j, :-1] @ xi_t, S[j, -1]]))
    dx = []
    for m in range(n):
        D = jet.dA[m]
        dx.append(as_poly([xi_t @ D[:-1, :-1] @ xi_t, (D[:-1, -1] + D[-1, :-1]) @ xi_t, D[-1, -1]]))
    return dxi, dx


def _l0_inv(bj: BoundaryJet, power: int = 1) -> RationalFn:
    sp, sm = sigma_roots(bj)
    ann = bj.jet.A[-1, -1]
    return rf_from_poles([1.0], [(1j * sp, power), (-1j * sm, power)], lead=ann**power)


def _bracket_inv(bj: BoundaryJet) -> RationalFn:
    br = bj.bracket
    return rf_from_poles([1.0], [(1j * br, 1), (-1j * br, 1)])


def reduce_leading(r: RationalFn, kernel: RationalFn) -> RationalFn:
    """Replace an order -1 term by a multiple of ``kernel`` with the same leading part.

    The discarded difference is checked to be O(xi_n^-2).
    """
    o = order_at_infinity(r)
    if o <= -2:
        return rf_scale(kernel, 0.0)
    if o != -1 or order_at_infinity(kernel) != -1:
        raise ReductionError(f"reduction needs order -1 terms, got {o}")
    red = rf_scale(kernel, leading_coefficient(r) / leading_coefficient(kernel))
    dropped = rf_arith("add", r, rf_scale(red, -1.0))
    if order_at_infinity(dropped) > -2:
        raise ReductionError("reduction dropped a term of order > -2")
    return red


def q_expansion(bj: BoundaryJet, a: float, reduce: bool = True) -> ax.AsymptoticSum:
    """``a_nn**-a * q`` as ``1 + order -1 rational terms + O(xi_n^-2)``.

    Built as ``(1 + t)**a * (1 + drift + binomial + leibniz)``, with
    ``t = l0 / (a_nn <xi>^2) - 1``.  When ``reduce`` is set the last three
    terms are replaced by their leading parts against the kernels
    ``xi_n / l0`` and ``1/chi_-``.
    """
    jet = bj.jet
    n = jet.n
    ann = jet.A[-1, -1]
    xi_t = bj.xi_t
    br = bj.bracket
    _, beta, gamma = _quadratic_in_normal(jet, xi_t)

    zinv = _bracket_inv(bj)
    t = rf_arith("mul", RationalFn(as_poly([gamma / ann - br**2, beta / ann]), ()), zinv)
    factor1 = ax.as_binomial_power(ax.as_make([t], 2), a)

    l0inv = _l0_inv(bj)
    l0inv2 = _l0_inv(bj, 2)
    bxi = RationalFn(as_poly([jet.b[:-1] @ xi_t, jet.b[-1]]), ())
    drift = rf_scale(rf_arith("mul", bxi, l0inv), 1j * a)

    dxi, dx = _normal_polys(bj)
    cross = sum((dxi[j] * dx[j] for j in range(n)), as_poly([0.0]))
    binomial = rf_scale(rf_arith("mul", RationalFn(as_poly(cross), ()), l0inv2), -1j * binom2(a))

    inner = dx[-1]
    for j in range(n - 1):
        inner = inner + dx[j] * (1j * xi_t[j] / br)
    chim = inv_minus(br)
    leibniz = rf_scale(rf_arith("mul", rf_arith("mul", RationalFn(as_poly(inner), ()), l0inv), chim), a * a)

    if reduce:
        xn_l0 = rf_arith("mul", RationalFn(as_poly([0.0, 1.0]), ()), l0inv)
        drift = reduce_leading(drift, xn_l0)
        binomial = reduce_leading(binomial, xn_l0)
        leibniz = reduce_leading(leibniz, chim)
    factor2 = ax.as_make([RationalFn(as_poly([1.0]), ()), drift, binomial, leibniz], 2)
    return ax.as_mul(factor1, factor2)


def q_expansion_closed(bj: BoundaryJet, a: float) -> ax.AsymptoticSum:
    """Closed-form order -1 content of ``a_nn**-a * q``, term by term."""
    jet = bj.jet
    ann = jet.A[-1, -1]
    xi_t = bj.xi_t
    br = bj.bracket
    dA = jet.dA
    off = jet.A[:-1, -1] + jet.A[-1, :-1]
    d_ann = dA[:, -1, -1]
    l0inv = _l0_inv(bj)
    xn = RationalFn(as_poly([0.0, 1.0]), ())
    xn_l0 = rf_arith("mul", xn, l0inv)
    xn_z = rf_arith("mul", xn, _bracket_inv(bj))
    chim = inv_minus(br)
    terms = [
        RationalFn(as_poly([1.0]), ()),
        rf_scale(xn_z, a / ann * (off @ xi_t)),
        rf_scale(xn_l0, 1j * a * jet.b[-1]),
        rf_scale(xn_l0, -1j * binom2(a) * (2.0 * d_ann[-1] + (off @ d_ann[:-1]) / ann)),
        rf_scale(chim, a * a / ann * (1j * (xi_t @ d_ann[:-1]) / br + d_ann[-1])),
    ]
    return ax.as_make(terms, 2)


def boundary_symbol_pipeline(bj: BoundaryJet, a: float) -> complex:
    """``a_nn**a`` times the jump of the generic expansion of ``a_nn**-a q``."""
    return complex(bj.jet.A[-1, -1] ** a * ax.as_jump(q_expansion(bj, a)))


def boundary_symbol_closed(jet: OperatorJet, a: float, literal: bool = False) -> BSymbol:
    """Closed form of the boundary symbol.

    With ``literal=True`` the tangential coefficient carries the opposite
    sign and the ``d_n a_nn`` binomial term lacks the factor two and the
    contribution of the off-diagonal entries; this reproduces the commonly
    quoted formula, which disagrees with the expansion.
    """
    if isinstance(jet, BoundaryJet):
        jet = jet.jet
    A = jet.A
    ann = A[-1, -1]
    w = ann ** (a - 1.0)
    off = A[:-1, -1] + A[-1, :-1]
    d_ann = jet.dA[:, -1, -1]
    c_nonlocal = -a * a * w * d_ann[:-1]
    if literal:
        c_tan = -a * w * off
        c0 = -a * w * jet.b[-1] + binom2(a) * w * d_ann[-1] - a * a * w * d_ann[-1]
    else:
        c_tan = a * w * off
        c0 = (
            -a * w * jet.b[-1]
            + binom2(a) * w * (2.0 * d_ann[-1] + (off @ d_ann[:-1]) / ann)
            - a * a * w * d_ann[-1]
        )
    return BSymbol(complex(c0), np.asarray(c_tan, dtype=complex), np.asarray(c_nonlocal, dtype=complex))


def q_two_term(bj: BoundaryJet, a: float, xn) -> np.ndarray:
    """Direct evaluation of the two-term composition ``q`` at real ``xi_n``."""
    jet = bj.jet
    xi_t = bj.xi_t
    br = bj.bracket
    out = []
    for x in np.atleast_1d(xn):
        xi = np.append(xi_t, x)
        p0, p1 = power_symbol(jet, xi, a)
        l0 = complex(xi @ jet.A @ xi)
        dx = np.einsum("j,mjk,k->m", xi, jet.dA, xi)
        inner = dx[-1] + np.sum(1j * xi_t / br * dx[:-1])
        zpow = (br * br + x * x) ** (-a)
        leib = a * a / (br - 1j * x) * p0 / l0 * inner
        out.append(zpow * (p0 + p1 + leib))
    return np.asarray(out)


def boundary_symbol_numeric(bj: BoundaryJet, a: float, levels: int = 5) -> tuple[complex, float]:
    """Jump of ``q`` from its odd part at large ``|xi_n|`` with Richardson extrapolation.

    Returns ``(value, error_estimate)``.
    """
    sp, sm = sigma_roots(bj)
    scale = max(bj.bracket, abs(sp), abs(sm), 1.0)
    xs = 20.0 * scale * 2.0 ** np.arange(levels)
    odd = xs * (q_two_term(bj, a, xs) - q_two_term(bj, a, -xs)) / 2.0
    # odd(x) = c1 + c3 x^-2 + ...; eliminate successive powers of x^-2
    table = [np.asarray(odd, dtype=complex)]
    for k in range(1, levels):
        prev = table[-1]
        f = 4.0**k
        table.append((f * prev[1:] - prev[:-1]) / (f - 1.0))
    best = table[-1][0]
    err = abs(best - table[-2][-1])
    return complex(1j * best), float(err)


def classify_locality(b: BSymbol) -> str:
    scale = max(1.0, abs(b.c0), float(np.max(np.abs(b.c_tan), initial=0.0)))
    if float(np.max(np.abs(b.c_nonlocal), initial=0.0)) <= LOCALITY_TOL * scale:
        return "local"
    return "nonlocal"
