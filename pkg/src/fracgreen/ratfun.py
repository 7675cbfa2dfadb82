"""Rational functions of one complex-valued frequency variable.

A :class:`RationalFn` stores a numerator polynomial together with a monic
denominator given by its factorization into poles.  Keeping the poles
explicit avoids repeated root finding when terms built from the same
factors are multiplied and added, which is the common case when
assembling symbols.

The jump functional returns the jump at the origin of the inverse Fourier
transform of a proper rational function.  With the transform convention
``F^{-1}[1/(s + i x)](z) = H(z) exp(-s z)`` a simple pole in the upper
half-plane contributes its residue times ``i`` and poles of higher order
contribute nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

Poly = Polynomial

CANCEL_TOL = 1e-9
# poles carried through arithmetic are exact, so only rounding needs absorbing
ARITH_CANCEL_TOL = 1e-13
CLUSTER_TOL = 1e-6
MERGE_TOL = 1e-9
REAL_AXIS_TOL = 1e-7
NEG_INF = -math.inf


class RationalFnError(ValueError):
    """Raised when a rational function operation is refused."""


def as_poly(p) -> Polynomial:
    if isinstance(p, Polynomial):
        coef = np.asarray(p.coef, dtype=complex)
    else:
        coef = np.atleast_1d(np.asarray(p, dtype=complex))
    return Polynomial(_trim(coef))


def _trim(coef: np.ndarray, rel: float = 0.0) -> np.ndarray:
    coef = np.asarray(coef, dtype=complex)
    if coef.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(coef))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    k = coef.size
    while k > 1 and abs(coef[k - 1]) <= rel * scale:
        k -= 1
    return coef[:k].copy()


def degree(p: Polynomial) -> int | float:
    """Degree of ``p``; ``-inf`` for the zero polynomial."""
    coef = _trim(p.coef)
    if coef.size == 1 and coef[0] == 0:
        return NEG_INF
    return coef.size - 1


def _poly_scale_at(p: Polynomial, z: complex) -> float:
    return float(sum(abs(c) * abs(z) ** k for k, c in enumerate(p.coef)))


def _pole_poly(poles) -> Polynomial:
    out = Polynomial([1.0 + 0j])
    for loc, order in poles:
        out = out * Polynomial([-loc, 1.0]) ** order
    return out


@dataclass(frozen=True)
class RationalFn:
    """``num / prod (x - loc)**order`` with the product monic."""

    num: Polynomial
    poles: tuple

    @property
    def den(self) -> Polynomial:
        return _pole_poly(self.poles)

    @property
    def is_zero(self) -> bool:
        return degree(self.num) == NEG_INF

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        val = self.num(x)
        for loc, order in self.poles:
            val = val / (x - loc) ** order
        return val

    def __add__(self, other):
        return rf_arith("add", self, _coerce(other))

    __radd__ = __add__

    def __mul__(self, other):
        return rf_arith("mul", self, _coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return RationalFn(-self.num, self.poles)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __repr__(self) -> str:
        return f"RationalFn(num={list(self.num.coef)}, poles={list(self.poles)})"


def _coerce(x) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    return rf_const(complex(x))


def rf_const(c: complex) -> RationalFn:
    return RationalFn(as_poly([c]), ())


def rf_poly(coeffs) -> RationalFn:
    return RationalFn(as_poly(coeffs), ())


def _cluster_roots(roots: np.ndarray, scale: float) -> list:
    remaining = list(roots)
    poles = []
    while remaining:
        r0 = remaining.pop(0)
        group = [r0]
        keep = []
        for r in remaining:
            if abs(r - r0) <= CLUSTER_TOL * scale:
                group.append(r)
            else:
                keep.append(r)
        remaining = keep
        poles.append((complex(np.mean(group)), len(group)))
    return poles


def _merge_poles(*pole_lists) -> list:
    out: list = []
    for poles in pole_lists:
        for loc, order in poles:
            for i, (l2, o2) in enumerate(out):
                if abs(loc - l2) <= MERGE_TOL * max(1.0, abs(loc)):
                    out[i] = (l2, o2 + order)
                    break
            else:
                out.append((complex(loc), int(order)))
    return out


def _cancel(num: Polynomial, poles: list, tol: float = CANCEL_TOL) -> RationalFn:
    num = as_poly(num)
    if degree(num) == NEG_INF:
        return RationalFn(as_poly([0.0]), ())
    kept = []
    for loc, order in poles:
        while order > 0 and degree(num) != NEG_INF and degree(num) >= 1:
            scale = _poly_scale_at(num, loc)
            if abs(num(loc)) <= tol * scale:
                q, _ = divmod(num, Polynomial([-loc, 1.0]))
                num = as_poly(q)
                order -= 1
            else:
                break
        if order > 0:
            kept.append((loc, order))
    return RationalFn(num, tuple(kept))


def rf_from_poles(num, poles, lead: complex = 1.0) -> RationalFn:
    """Build ``num / (lead * prod (x - loc)**order)`` from a known factorization."""
    if lead == 0:
        raise RationalFnError("zero leading coefficient in denominator")
    merged = _merge_poles([(complex(loc), int(k)) for loc, k in poles if k > 0])
    return _cancel(as_poly(num) * (1.0 / lead), merged)


def rf_make(num, den) -> RationalFn:
    """Normalize ``num/den``: monic denominator, common roots cancelled, poles cached."""
    num = as_poly(num)
    den = as_poly(den)
    if degree(den) == NEG_INF:
        raise RationalFnError("denominator is the zero polynomial")
    lead = den.coef[-1]
    num = num * (1.0 / lead)
    den = den * (1.0 / lead)
    if degree(den) == 0:
        return _cancel(num, [])
    roots = den.roots()
    scale = max(1.0, float(np.max(np.abs(roots))))
    poles = _cluster_roots(roots, scale)
    return _cancel(num, poles)


def rf_arith(kind: str, r1: RationalFn, r2: RationalFn) -> RationalFn:
    if kind == "mul":
        if r1.is_zero or r2.is_zero:
            return rf_const(0.0)
        return _cancel(r1.num * r2.num, _merge_poles(r1.poles, r2.poles), ARITH_CANCEL_TOL)
    if kind == "add":
        if r1.is_zero:
            return r2
        if r2.is_zero:
            return r1
        common = _merge_poles(r1.poles)
        for loc, order in r2.poles:
            for i, (l2, o2) in enumerate(common):
                if abs(loc - l2) <= MERGE_TOL * max(1.0, abs(loc)):
                    common[i] = (l2, max(o2, order))
                    break
            else:
                common.append((loc, order))
        d1 = _pole_poly(_pole_quotient(common, r1.poles))
        d2 = _pole_poly(_pole_quotient(common, r2.poles))
        coef = _padd((r1.num * d1).coef, (r2.num * d2).coef)
        # magnitude bound of each coefficient, to recognise cancellation
        bound = _padd(
            np.convolve(np.abs(r1.num.coef), np.abs(d1.coef)),
            np.convolve(np.abs(r2.num.coef), np.abs(d2.coef)),
        ).real
        small = np.abs(coef) <= 1e-12 * bound
        k = coef.size
        while k > 1 and small[k - 1]:
            k -= 1
        coef = coef[:k]
        if np.all(small[:k]):
            return rf_const(0.0)
        return _cancel(Polynomial(coef), common, ARITH_CANCEL_TOL)
    raise RationalFnError(f"unknown arithmetic kind {kind!r}")


def _padd(c1, c2) -> np.ndarray:
    out = np.zeros(max(len(c1), len(c2)), dtype=complex)
    out[: len(c1)] += c1
    out[: len(c2)] += c2
    return out


def _pole_scale(poles) -> float:
    return max([abs(loc) for loc, _ in poles], default=1.0)


def _pole_quotient(common, sub) -> list:
    out = []
    for loc, order in common:
        k = order
        for l2, o2 in sub:
            if abs(loc - l2) <= MERGE_TOL * max(1.0, abs(loc)):
                k -= o2
        if k > 0:
            out.append((loc, k))
    return out


def rf_scale(r: RationalFn, c: complex) -> RationalFn:
    if c == 0:
        return rf_const(0.0)
    return RationalFn(r.num * c, r.poles)


def order_at_infinity(r: RationalFn) -> int | float:
    """``deg(num) - deg(den)``; ``-inf`` for the zero function."""
    dn = degree(r.num)
    if dn == NEG_INF:
        return NEG_INF
    return dn - sum(k for _, k in r.poles)


def leading_coefficient(r: RationalFn) -> complex:
    """Limit of ``r(x) * x**(-order)`` as ``x`` tends to infinity."""
    if r.is_zero:
        return 0j
    return complex(_trim(r.num.coef)[-1])


def rf_reflect_conj(r: RationalFn) -> RationalFn:
    """The function ``x -> conj(r(-x))`` for real ``x``."""
    coef = np.asarray(r.num.coef, dtype=complex)
    signs = (-1.0) ** np.arange(coef.size)
    total = sum(k for _, k in r.poles)
    num = Polynomial(np.conj(coef) * signs * (-1.0) ** total)
    poles = tuple((-np.conj(loc), k) for loc, k in r.poles)
    return RationalFn(num, poles)


def _taylor_shift(p: Polynomial, z: complex, m: int) -> np.ndarray:
    """First ``m`` Taylor coefficients of ``p`` at ``z``."""
    out = np.zeros(m, dtype=complex)
    q = p
    fact = 1.0
    for k in range(m):
        out[k] = q(z) / fact
        q = q.deriv()
        fact *= k + 1
    return out


def _series_mul(s1: np.ndarray, s2: np.ndarray, m: int) -> np.ndarray:
    return np.convolve(s1, s2)[:m]


def partial_fractions(r: RationalFn):
    """Return ``(poly_part, terms)`` with ``terms = [(pole, k, coefficient), ...]``.

    ``r(x) = poly_part(x) + sum coefficient / (x - pole)**k``.
    """
    poles = list(r.poles)
    scale = max(1.0, _pole_scale(poles))
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i][0] - poles[j][0]) <= CLUSTER_TOL * scale:
                raise RationalFnError(
                    f"poles {poles[i][0]} and {poles[j][0]} are too close to separate"
                )
    den = _pole_poly(poles)
    poly_part, rem = divmod(r.num, den)
    poly_part = as_poly(poly_part)
    rem = as_poly(rem)
    terms = []
    for i, (p, m) in enumerate(poles):
        series = _taylor_shift(rem, p, m)
        for j, (q, k) in enumerate(poles):
            if j == i:
                continue
            # (p + h - q)^(-k) = (p - q)^(-k) (1 + h/(p - q))^(-k)
            d = p - q
            fac = np.array(
                [math.comb(k + l - 1, l) * (-1.0) ** l / d**l for l in range(m)],
                dtype=complex,
            ) / d**k
            series = _series_mul(series, fac, m)
        for l in range(m):
            terms.append((p, m - l, complex(series[l])))
    return poly_part, terms


def pole_side(pole: complex) -> str:
    """``"H+"`` for poles in the upper half-plane, ``"H-"`` for the lower one."""
    return "H+" if pole.imag > 0 else "H-"


def jump_paths(r: RationalFn) -> tuple[complex, complex]:
    """Both evaluations of the jump: via the ``1/x`` coefficient and via residues."""
    for loc, _ in r.poles:
        if abs(loc.imag) < REAL_AXIS_TOL:
            raise RationalFnError(f"pole {loc} is on or too close to the real axis")
    order = order_at_infinity(r)
    if order > 0:
        raise RationalFnError(f"order at infinity {order} > 0; only proper parts have a jump")
    if r.is_zero:
        return 0j, 0j
    den = r.den
    dd = sum(k for _, k in r.poles)
    _, rem = divmod(r.num, den)
    rc = np.asarray(rem.coef, dtype=complex)
    c_inv = rc[dd - 1] if dd >= 1 and rc.size >= dd else 0j
    path_i = 1j * complex(c_inv)
    _, terms = partial_fractions(r)
    path_ii = 1j * sum((c for _, k, c in terms if k == 1), 0j)
    return path_i, complex(path_ii)


def jump(r: RationalFn) -> complex:
    """Jump at zero of the inverse Fourier transform of the proper part of ``r``."""
    path_i, path_ii = jump_paths(r)
    _, terms = partial_fractions(r) if r.poles else (None, [])
    mass = sum(abs(c) for _, _, c in terms)
    if abs(path_i - path_ii) > 1e-10 * (1.0 + abs(path_i) + mass):
        raise RationalFnError(
            f"jump paths disagree: {path_i} vs {path_ii} (internal consistency failure)"
        )
    return path_i


def inv_plus(sigma: complex, k: int = 1) -> RationalFn:
    """``1/(sigma + i x)**k``; pole ``i sigma`` in the upper half-plane when Re sigma > 0."""
    return rf_from_poles([1.0], [(1j * sigma, k)], lead=(1j) ** k)


def inv_minus(sigma: complex, k: int = 1) -> RationalFn:
    """``1/(sigma - i x)**k``; pole ``-i sigma`` in the lower half-plane."""
    return rf_from_poles([1.0], [(-1j * sigma, k)], lead=(-1j) ** k)
