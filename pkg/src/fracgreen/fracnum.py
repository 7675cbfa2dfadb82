"""Fractional operators and Green's identity on the interval (-1, 1).

Functions are edge profiles ``u(x) = (1 - x^2)_+^mu w(x)`` with polynomial
``w``.  The fractional Laplacian is evaluated from the symmetric
second-difference form of the principal value integral.  The drift
operator ``(-d^2 + c d + c0)^a`` is reduced by conjugation with
``exp(c x / 2)`` to ``(-d^2 + m^2)^a = (-d^2 + m^2) (-d^2 + m^2)^(a-1)``,
where the second factor is convolution with a Bessel potential kernel.

Weighted traces follow ``gamma_0 = Gamma(a) (u/d^(a-1))|``,
``gamma_1 = Gamma(a+1) d_nu (u/d^(a-1))|`` with ``d = 1 - |x|`` and the
interior normal derivative.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, special

DEFAULT_GUARD = 1e-3
PANEL_NODES = 20
TAYLOR_TERMS = 64


class FracNumError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeFunction1D:
    """``(1 - x^2)_+^mu * w(x)``; ``w`` given by ascending coefficients."""

    mu: float
    w: tuple
    label: str = ""

    def __post_init__(self):
        if not self.mu > -1.0:
            raise FracNumError(f"mu = {self.mu} must exceed -1 for integrability")
        object.__setattr__(self, "w", tuple(float(c) for c in np.atleast_1d(self.w)))
        if len(self.w) > 11:
            raise FracNumError("polynomial factor limited to degree 10")

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self.w)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 1.0
        base = np.where(inside, 1.0 - x * x, 1.0)
        return np.where(inside, base**self.mu * self.poly(x), 0.0)

    def scaled(self, alpha: float) -> "EdgeFunction1D":
        return EdgeFunction1D(self.mu, tuple(alpha * c for c in self.w), self.label)

    def describe(self) -> str:
        return self.label or f"(1-x^2)^{self.mu:g} * poly{list(self.w)}"

    def taylor(self, x: float, terms: int = TAYLOR_TERMS) -> np.ndarray:
        """Taylor coefficients of ``u`` at an interior point ``x``."""
        k = np.arange(terms)
        binom = special.binom(self.mu, k)
        left = binom * (-1.0 / (1.0 - x)) ** k * (1.0 - x) ** self.mu
        right = binom * (1.0 / (1.0 + x)) ** k * (1.0 + x) ** self.mu
        wt = np.zeros(terms)
        q = self.poly
        fact = 1.0
        for j in range(min(terms, len(self.w))):
            wt[j] = q(x) / fact
            q = q.deriv()
            fact *= j + 1
        return np.convolve(np.convolve(left, right)[:terms], wt)[:terms]


def edge_combine(coeffs, funcs) -> EdgeFunction1D:
    """Linear combination of edge functions whose exponents differ by integers."""
    mu0 = min(f.mu for f in funcs)
    total = Polynomial([0.0])
    for c, f in zip(coeffs, funcs):
        shift = f.mu - mu0
        k = int(round(shift))
        if abs(shift - k) > 1e-14:
            raise FracNumError("exponents must differ by integers")
        total = total + c * f.poly * Polynomial([1.0, 0.0, -1.0]) ** k
    return EdgeFunction1D(mu0, tuple(total.coef))


def frac_constant(a: float) -> float:
    """Normalizing constant of the principal value form in one dimension."""
    if not 0.0 < a < 1.0:
        raise FracNumError("the integral form needs 0 < a < 1")
    return 4.0**a * special.gamma(0.5 + a) / (math.sqrt(math.pi) * abs(special.gamma(-a)))


# ---------------------------------------------------------------- quadrature


@lru_cache(maxsize=256)
def _jacobi_rule(n: int, alpha: float, beta: float):
    """Nodes and weights for ``(1 - t)^alpha (1 + t)^beta`` on [-1, 1]."""
    if alpha == 0.0 and beta == 0.0:
        return np.polynomial.legendre.leggauss(n)
    x, w = special.roots_jacobi(n, alpha, beta)
    return x, w


def _breakpoints(lo: float, hi: float, lo_step: float | None, hi_step: float | None) -> list:
    mid = 0.5 * (lo + hi)
    left = [lo]
    if lo_step is not None and lo_step < mid - lo:
        s = lo_step
        while lo + s < mid:
            left.append(lo + s)
            s *= 2.0
    right = [hi]
    if hi_step is not None and hi_step < hi - mid:
        s = hi_step
        while hi - s > mid:
            right.append(hi - s)
            s *= 2.0
    if len(left) > 1 and len(right) > 1:
        # join the two geometric sequences without a sliver panel
        pts = left + [mid] + right[::-1]
    else:
        pts = left + right[::-1]
    out = [pts[0]]
    for p in pts[1:]:
        if p - out[-1] > 1e-15 * max(1.0, abs(p)):
            out.append(p)
    return out


def panel_integral(
    f,
    lo: float,
    hi: float,
    lo_exp: float = 0.0,
    hi_exp: float = 0.0,
    lo_step: float | None = None,
    hi_step: float | None = None,
    n: int = PANEL_NODES,
) -> float:
    """``int_lo^hi (y - lo)^lo_exp (hi - y)^hi_exp f(y) dy`` on geometrically graded panels.

    ``lo_step``/``hi_step`` set the first panel length at each end; panel
    lengths double away from that end.  End panels use Gauss-Jacobi rules
    for the endpoint factors, interior panels Gauss-Legendre.
    """
    if hi <= lo:
        return 0.0
    pts = _breakpoints(lo, hi, lo_step, hi_step)
    total = 0.0
    last = len(pts) - 2
    for i in range(len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        half = 0.5 * (q - p)
        ea = lo_exp if i == 0 else 0.0
        eb = hi_exp if i == last else 0.0
        t, w = _jacobi_rule(n, eb, ea)
        y = p + half * (1.0 + t)
        vals = f(y)
        if i != 0 and lo_exp != 0.0:
            vals = vals * (y - lo) ** lo_exp
        if i != last and hi_exp != 0.0:
            vals = vals * (hi - y) ** hi_exp
        total += half ** (1.0 + ea + eb) * math.fsum(w * vals)
    return total


# ----------------------------------------------------- fractional Laplacian


def _check_interior(x: float, guard: float) -> float:
    r = 1.0 - abs(x)
    if r < guard:
        raise FracNumError(f"x = {x} is within {guard} of the boundary")
    return r


def fraclap_pv(u: EdgeFunction1D, x: float, a: float, guard: float = DEFAULT_GUARD, n: int = PANEL_NODES) -> float:
    """``(-Delta)^a u (x)`` from ``c int_0^inf (2u(x) - u(x+h) - u(x-h)) h^(-1-2a) dh``.

    The range ``h < r/2`` (``r`` the distance to the boundary) uses the
    Taylor series of ``u`` at ``x`` term by term; the rest uses graded
    panels with Gauss-Jacobi end rules for the edge singularities.
    """
    r = _check_interior(x, guard)
    c = frac_constant(a)
    h0 = 0.5 * r
    coef = u.taylor(x)
    k = np.arange(2, coef.size, 2)
    near = -2.0 * math.fsum(coef[k] * h0 ** (k - 2.0 * a) / (k - 2.0 * a))
    far = 2.0 * float(u(x)) * h0 ** (-2.0 * a) / (2.0 * a)
    q = u.poly
    mu = u.mu

    def right(y):  # u(y) without the (1 - y)^mu factor, times the kernel
        return (1.0 + y) ** mu * q(y) * (y - x) ** (-1.0 - 2.0 * a)

    def left(y):  # u(y) without the (1 + y)^mu factor, times the kernel
        return (1.0 - y) ** mu * q(y) * (x - y) ** (-1.0 - 2.0 * a)

    far -= panel_integral(right, x + h0, 1.0, 0.0, mu, lo_step=h0, hi_step=None, n=n)
    far -= panel_integral(lambda y: left(-y), -(x - h0), 1.0, 0.0, mu, lo_step=h0, n=n)
    return c * (near + far)


def fraclap_pv_with_error(u: EdgeFunction1D, x: float, a: float, guard: float = DEFAULT_GUARD):
    v1 = fraclap_pv(u, x, a, guard, n=PANEL_NODES)
    v2 = fraclap_pv(u, x, a, guard, n=PANEL_NODES + PANEL_NODES // 2)
    return v2, abs(v2 - v1)


# ------------------------------------------------------------------ traces


@dataclass(frozen=True)
class EndpointTraces:
    gamma0: float
    gamma1: float


def weighted_traces(u: EdgeFunction1D, a: float) -> dict:
    """Weighted Dirichlet and Neumann traces at ``x = 1`` and ``x = -1``."""
    shift = u.mu - (a - 1.0)
    if abs(shift) < 1e-14:
        e = 0
    elif abs(shift - 1.0) < 1e-14:
        e = 1
    else:
        raise FracNumError("traces implemented for mu = a - 1 or mu = a only")
    q = u.poly
    dq = q.deriv()
    mu = u.mu
    p = 2.0**mu
    dp = mu * 2.0 ** (mu - 1.0)
    out = {}
    # near x = 1: u/d^(a-1) = (1 - x)^e (1 + x)^mu w(x); interior normal derivative -d/dx
    if e == 0:
        val, der = q(1.0) * p, dq(1.0) * p + q(1.0) * dp
    else:
        val, der = 0.0, -q(1.0) * p
    out[1] = EndpointTraces(special.gamma(a) * val, -special.gamma(a + 1.0) * der)
    # near x = -1: u/d^(a-1) = (1 + x)^e (1 - x)^mu w(x); normal derivative +d/dx
    if e == 0:
        val, der = q(-1.0) * p, dq(-1.0) * p - q(-1.0) * dp
    else:
        val, der = 0.0, q(-1.0) * p
    out[-1] = EndpointTraces(special.gamma(a) * val, special.gamma(a + 1.0) * der)
    return out


# ---------------------------------------------------------- Green identity


@dataclass
class GreensReport:
    lhs: float
    lhs_error: float
    rhs: float
    residual: float
    rhs_without_b: float | None = None
    b_term: float | None = None
    meta: dict = field(default_factory=dict)


def _jacobi_volume(apply, weight_fn: EdgeFunction1D, partner_poly: Polynomial, n: int) -> float:
    """``int (1 - x^2)^mu g(x) apply(x) dx`` with Gauss-Jacobi nodes."""
    mu = weight_fn.mu
    t, w = _jacobi_rule(n, mu, mu)
    vals = np.array([apply(float(x)) for x in t])
    return math.fsum(w * vals * partner_poly(t))


def _volume_pairing(apply_u, apply_v, u, v, tol, n0, nmax):
    """``int (Pu) v - u (P* v)`` with adaptive node count; returns value, error, nodes."""
    prev = None
    n = n0
    while True:
        val = _jacobi_volume(apply_u, v, v.poly, n) - _jacobi_volume(apply_v, u, u.poly, n)
        if prev is not None:
            err = abs(val - prev)
            if err < tol or n >= nmax:
                return val, err, n
        prev = val
        n += n0 // 2


def greens_residual_fraclap(
    u: EdgeFunction1D, v: EdgeFunction1D, a: float, tol: float = 1e-6, nodes: int = 16, max_nodes: int = 64
) -> GreensReport:
    if not 0.5 < a < 1.0:
        raise FracNumError(
            "the volume integrals converge absolutely only for 1/2 < a < 1; "
            "smaller a needs the duality pairing, which is not implemented"
        )
    start = time.perf_counter()
    lhs, err, n = _volume_pairing(
        lambda x: fraclap_pv(u, x, a, guard=1e-6),
        lambda x: fraclap_pv(v, x, a, guard=1e-6),
        u, v, tol, nodes, max_nodes,
    )
    tu, tv = weighted_traces(u, a), weighted_traces(v, a)
    rhs = sum(tu[e].gamma1 * tv[e].gamma0 - tu[e].gamma0 * tv[e].gamma1 for e in (1, -1))
    return GreensReport(
        lhs=lhs, lhs_error=err, rhs=rhs, residual=abs(lhs - rhs),
        meta={"a": a, "u": u.describe(), "v": v.describe(), "nodes": n,
              "runtime_s": time.perf_counter() - start},
    )


# ------------------------------------------------------------- drift case


def bessel_kernel(z, s: float, m: float) -> np.ndarray:
    """Inverse Fourier transform of ``(xi^2 + m^2)^(-s)`` via ``scipy.special.kv``."""
    z = np.abs(np.asarray(z, dtype=float))
    nu = s - 0.5
    return (z / (2.0 * m)) ** nu * special.kv(nu, m * z) / (math.sqrt(math.pi) * special.gamma(s))


def bessel_kernel_oscillatory(z: float, s: float, m: float) -> float:
    """Same kernel by Fourier-cosine quadrature of the symbol."""
    val, _ = integrate.quad(lambda xi: (xi * xi + m * m) ** (-s), 0.0, np.inf, weight="cos", wvar=abs(z), limlst=200)
    return val / math.pi


@lru_cache(maxsize=64)
def _kernel_series(s: float, m: float, terms: int = 40):
    """Coefficients of ``kernel(z) = |z|^(2s-1) A(z^2) + B(z^2)`` for ``0 < s < 1/2``."""
    nu = 0.5 - s
    pre = 1.0 / (math.sqrt(math.pi) * special.gamma(s)) * math.pi / (2.0 * math.sin(nu * math.pi))
    k = np.arange(terms)
    q = (m * m / 4.0) ** k / special.factorial(k)
    A = pre * 4.0**nu * q / special.gamma(k - nu + 1.0)
    B = -pre * m ** (2.0 * nu) * q / special.gamma(k + nu + 1.0)
    return A, B


def bessel_kernel_parts(z2, s: float, m: float):
    """``(A(z^2), B(z^2))`` with ``kernel = |z|^(2s-1) A + B``."""
    A, B = _kernel_series(s, m)
    return np.polynomial.polynomial.polyval(z2, A), np.polynomial.polynomial.polyval(z2, B)


def _bessel_convolution(u: EdgeFunction1D, x: float, s: float, m: float, theta: float, n: int) -> float:
    """``int kernel(x - y) exp(-theta y) u(y) dy`` over (-1, 1)."""
    q = u.poly
    mu = u.mu
    e = 2.0 * s - 1.0

    def right(y):
        A, B = bessel_kernel_parts((y - x) ** 2, s, m)
        return np.exp(-theta * y) * (1.0 + y) ** mu * q(y), A, B

    def left(y):
        A, B = bessel_kernel_parts((y - x) ** 2, s, m)
        return np.exp(-theta * y) * (1.0 - y) ** mu * q(y), A, B

    step_far = (1.0 + x) if x < 0 else None
    step_near = (1.0 - x) if x > 0 else None
    total = 0.0
    # [x, 1]: weight (y - x)^e at the left end for the A part, (1 - y)^mu at the right end
    total += panel_integral(lambda y: right(y)[0] * right(y)[1], x, 1.0, e, mu, lo_step=step_far, n=n)
    total += panel_integral(lambda y: right(y)[0] * right(y)[2], x, 1.0, 0.0, mu, lo_step=step_far, n=n)
    # [-1, x] mirrored to [-x, 1]
    total += panel_integral(lambda t: left(-t)[0] * left(-t)[1], -x, 1.0, e, mu, lo_step=step_near, n=n)
    total += panel_integral(lambda t: left(-t)[0] * left(-t)[2], -x, 1.0, 0.0, mu, lo_step=step_near, n=n)
    return total


def drift_power_apply(
    u: EdgeFunction1D, x: float, a: float, c: float, c0: float, guard: float = DEFAULT_GUARD, n: int = PANEL_NODES
) -> float:
    """``(-d^2 + c d + c0)^a u (x)`` for ``1/2 < a < 1`` and ``c0 + c^2/4 > 0``."""
    m2 = c0 + c * c / 4.0
    if m2 <= 0.0:
        raise FracNumError(f"c0 + c^2/4 = {m2} must be positive")
    if not 0.0 < a < 1.0:
        raise FracNumError("need 0 < a < 1")
    r = _check_interior(x, guard)
    m = math.sqrt(m2)
    s = 1.0 - a
    theta = c / 2.0
    if s >= 0.5:
        raise FracNumError("kernel splitting implemented for 1/2 < a < 1")
    F = lambda t: _bessel_convolution(u, t, s, m, theta, n)
    h = min(0.05, r / 2.5)
    steps = (h, h / 2.0, h / 4.0)
    f0 = F(x)
    vals = []
    for hk in steps:
        vals.append((F(x + hk) - 2.0 * f0 + F(x - hk)) / hk**2)
    d2 = _richardson2(vals)
    return math.exp(theta * x) * (-d2 + m2 * f0)


def _richardson2(vals) -> float:
    table = [np.asarray(vals, dtype=float)]
    for k in range(1, len(vals)):
        prev = table[-1]
        fac = 4.0**k
        table.append((fac * prev[1:] - prev[:-1]) / (fac - 1.0))
    return float(table[-1][-1])


def greens_residual_drift(
    u: EdgeFunction1D, v: EdgeFunction1D, a: float, c: float, c0: float,
    tol: float = 1e-6, nodes: int = 16, max_nodes: int = 48,
) -> GreensReport:
    if not 0.5 < a < 1.0:
        raise FracNumError(
            "the volume integrals converge absolutely only for 1/2 < a < 1; "
            "smaller a needs the duality pairing, which is not implemented"
        )
    start = time.perf_counter()
    lhs, err, n = _volume_pairing(
        lambda x: drift_power_apply(u, x, a, c, c0, guard=1e-6),
        lambda x: drift_power_apply(v, x, a, -c, c0, guard=1e-6),
        u, v, tol, nodes, max_nodes,
    )
    tu, tv = weighted_traces(u, a), weighted_traces(v, a)
    normal = {1: -1.0, -1: 1.0}
    flat = sum(tu[e].gamma1 * tv[e].gamma0 - tu[e].gamma0 * tv[e].gamma1 for e in (1, -1))
    b_term = sum(-a * c * normal[e] * tu[e].gamma0 * tv[e].gamma0 for e in (1, -1))
    rhs = flat + b_term
    return GreensReport(
        lhs=lhs, lhs_error=err, rhs=rhs, residual=abs(lhs - rhs), rhs_without_b=flat, b_term=b_term,
        meta={"a": a, "c": c, "c0": c0, "u": u.describe(), "v": v.describe(), "nodes": n,
              "runtime_s": time.perf_counter() - start},
    )
