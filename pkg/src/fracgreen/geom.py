"""Tubular coordinates near a parametrized hypersurface.

A patch is ``chi: V' -> R^n`` with the interior unit normal ``nu``.  The
tube map is ``x = chi(y') + t nu(y')`` with Jacobian matrix ``M + t N``,
``M = [d chi | nu]`` and ``N = [d nu | 0]``.  ``J0 = det M`` is the surface
area element and ``J1 = d/dt det(M + t N)`` at ``t = 0`` equals
``J0 * div nu``.  With the interior normal, ``div nu`` is minus the sum of
the principal curvatures (``-1/R`` on a circle of radius ``R``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

FD_STEPS = (1e-3, 5e-4, 2.5e-4)


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class HypersurfacePatch:
    """Parametrized patch; ``normal_raw`` is any interior normal field, not necessarily unit."""

    n: int
    chi: Callable
    dchi: Callable
    normal_raw: Callable
    dnormal_raw: Callable
    box: tuple
    name: str = "patch"

    def nu(self, y) -> np.ndarray:
        g = self.normal_raw(np.asarray(y, dtype=float))
        return g / np.linalg.norm(g)

    def dnu(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        g = self.normal_raw(y)
        ng = np.linalg.norm(g)
        nu = g / ng
        dg = self.dnormal_raw(y)
        return (np.eye(self.n) - np.outer(nu, nu)) @ dg / ng

    def frames(self, y) -> tuple[np.ndarray, np.ndarray]:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        M = np.column_stack([self.dchi(y), self.nu(y)])
        N = np.column_stack([self.dnu(y), np.zeros(self.n)])
        return M, N

    def sample(self, rng, count: int) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return lo + (hi - lo) * rng.random((count, len(self.box)))


def line_patch(length: float = 2.0) -> HypersurfacePatch:
    return HypersurfacePatch(
        n=2,
        chi=lambda y: np.array([y[0], 0.0]),
        dchi=lambda y: np.array([[1.0], [0.0]]),
        normal_raw=lambda y: np.array([0.0, 1.0]),
        dnormal_raw=lambda y: np.zeros((2, 1)),
        box=((-length / 2, length / 2),),
        name="line",
    )


def ellipse_patch(A: float, B: float, theta0: float = 0.0, theta1: float = 2 * np.pi) -> HypersurfacePatch:
    def chi(y):
        return np.array([A * np.cos(y[0]), B * np.sin(y[0])])

    def dchi(y):
        return np.array([[-A * np.sin(y[0])], [B * np.cos(y[0])]])

    def g(y):
        return -np.array([B * np.cos(y[0]), A * np.sin(y[0])])

    def dg(y):
        return np.array([[B * np.sin(y[0])], [-A * np.cos(y[0])]])

    return HypersurfacePatch(2, chi, dchi, g, dg, ((theta0, theta1),), name=f"ellipse({A},{B})")


def circle_patch(R: float = 1.0, theta0: float = 0.0, theta1: float = 2 * np.pi) -> HypersurfacePatch:
    p = ellipse_patch(R, R, theta0, theta1)
    return HypersurfacePatch(p.n, p.chi, p.dchi, p.normal_raw, p.dnormal_raw, p.box, name=f"circle({R})")


def ellipsoid_patch(
    A: float, B: float, C: float, theta_range=(0.3, np.pi - 0.3), phi_range=(0.0, 2 * np.pi)
) -> HypersurfacePatch:
    """Parameters ``(phi, theta)``; this order makes ``det M > 0`` for the interior normal."""
    scale = np.array([A, B, C])
    inv2 = 1.0 / scale**2

    def chi(y):
        phi, th = y
        return scale * np.array([np.sin(th) * np.cos(phi), np.sin(th) * np.sin(phi), np.cos(th)])

    def dchi(y):
        phi, th = y
        d_phi = scale * np.array([-np.sin(th) * np.sin(phi), np.sin(th) * np.cos(phi), 0.0])
        d_th = scale * np.array([np.cos(th) * np.cos(phi), np.cos(th) * np.sin(phi), -np.sin(th)])
        return np.column_stack([d_phi, d_th])

    def g(y):
        return -inv2 * chi(y)

    def dg(y):
        return -inv2[:, None] * dchi(y)

    return HypersurfacePatch(3, chi, dchi, g, dg, (tuple(phi_range), tuple(theta_range)), name=f"ellipsoid({A},{B},{C})")


def sphere_patch(R: float = 1.0, **kw) -> HypersurfacePatch:
    p = ellipsoid_patch(R, R, R, **kw)
    return HypersurfacePatch(p.n, p.chi, p.dchi, p.normal_raw, p.dnormal_raw, p.box, name=f"sphere({R})")


BUILTIN_PATCHES = {
    "line": line_patch,
    "circle": circle_patch,
    "ellipse": ellipse_patch,
    "sphere": sphere_patch,
    "ellipsoid": ellipsoid_patch,
}


def builtin_patch(name: str, **params) -> HypersurfacePatch:
    try:
        factory = BUILTIN_PATCHES[name]
    except KeyError:
        raise GeometryError(f"unknown patch {name!r}; known: {sorted(BUILTIN_PATCHES)}") from None
    return factory(**params)


def check_patch(patch: HypersurfacePatch, y) -> None:
    """Unit normal, orthogonality to the tangents and positive orientation at ``y``."""
    M, _ = patch.frames(y)
    nu = M[:, -1]
    if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
        raise GeometryError("normal is not a unit vector")
    if np.max(np.abs(M[:, :-1].T @ nu)) > 1e-10 * max(1.0, np.max(np.abs(M))):
        raise GeometryError("normal is not orthogonal to the tangent vectors")
    if np.linalg.det(M) <= 0:
        raise GeometryError("det M <= 0; reverse the parameter order")


def max_curvature(patch: HypersurfacePatch, samples: int = 5) -> float:
    grids = [np.linspace(lo, hi, samples) for lo, hi in patch.box]
    pts = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(patch.box))
    kmax = 0.0
    for y in pts:
        M, N = patch.frames(y)
        kmax = max(kmax, float(np.max(np.abs(np.linalg.eigvals(N @ np.linalg.inv(M))))))
    return kmax


def reach_guard(patch: HypersurfacePatch) -> float:
    """Default admissible ``|t|``: a tenth of the smallest curvature radius."""
    k = max_curvature(patch)
    return np.inf if k == 0.0 else 0.1 / k


def tubular_map(patch: HypersurfacePatch, y, t: float, guard: float | None = None):
    """``(x, M + t N)`` at parameter ``y`` and normal distance ``t``."""
    guard = reach_guard(patch) if guard is None else guard
    if abs(t) > guard:
        raise GeometryError(f"|t| = {abs(t)} exceeds the tube guard {guard}")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    M, N = patch.frames(y)
    return patch.chi(y) + t * patch.nu(y), M + t * N


def richardson_central(f: Callable, order: int = 1, steps=FD_STEPS) -> tuple[float, float]:
    """Central difference derivative (first or second) at 0, Richardson extrapolated.

    Steps must halve.  Returns ``(value, error_estimate)``.
    """
    vals = []
    for h in steps:
        if order == 1:
            vals.append((f(h) - f(-h)) / (2 * h))
        elif order == 2:
            vals.append((f(h) - 2 * f(0.0) + f(-h)) / h**2)
        else:
            raise ValueError("order must be 1 or 2")
    table = [np.asarray(vals)]
    for k in range(1, len(steps)):
        prev = table[-1]
        fac = 4.0**k
        table.append((fac * prev[1:] - prev[:-1]) / (fac - 1.0))
    best = table[-1][-1]
    err = abs(best - table[-2][-1]) if len(table) > 1 else np.nan
    return float(best), float(err)


def jacobians(patch: HypersurfacePatch, y) -> tuple[float, float, float, float]:
    """``(J0, J0_alt, J1, J1_fd)``.

    ``J0 = det M``; ``J0_alt`` is the Gram-determinant area element
    ``sqrt(det(dchi^T dchi))``; ``J1 = J0 trace(N M^-1)``; ``J1_fd`` is the
    extrapolated central difference of ``det(M + t N)`` at ``t = 0``.
    """
    M, N = patch.frames(y)
    J0 = float(np.linalg.det(M))
    if not np.isfinite(J0) or abs(J0) < 1e-14 * max(1.0, np.max(np.abs(M))) ** patch.n:
        raise GeometryError("singular tube Jacobian")
    if J0 < 0:
        raise GeometryError("det M < 0; reverse the parameter order")
    dchi = M[:, :-1]
    J0_alt = float(np.sqrt(np.linalg.det(dchi.T @ dchi)))
    J1 = J0 * float(np.trace(N @ np.linalg.inv(M)))
    J1_fd, _ = richardson_central(lambda t: float(np.linalg.det(M + t * N)))
    return J0, J0_alt, J1, J1_fd


def mean_curvature_g(patch: HypersurfacePatch, y, t: float = 0.0) -> float:
    """``div nu`` on the parallel surface at distance ``t``: ``trace(N (M + t N)^-1)``."""
    M, N = patch.frames(y)
    return float(np.trace(N @ np.linalg.inv(M + t * N)))


def surface_integral(patch: HypersurfacePatch, phi: Callable, nodes: int = 32) -> tuple[float, float]:
    """``int phi(chi(y)) J0(y) dy`` by tensor Gauss-Legendre; ``(value, |I_n - I_2n|)``."""

    def rule(m):
        x, w = np.polynomial.legendre.leggauss(m)
        axes = []
        for lo, hi in patch.box:
            axes.append((0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w))
        pts = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), -1).reshape(-1, len(axes))
        wts = np.ones(1)
        for a in axes:
            wts = np.outer(wts, a[1]).ravel()
        total = 0.0
        for y, wt in zip(pts, wts):
            M, _ = patch.frames(y)
            total += wt * phi(patch.chi(y)) * np.linalg.det(M)
        return float(total)

    coarse = rule(nodes)
    fine = rule(2 * nodes)
    return fine, abs(fine - coarse)


def localized_laplacian_residual(
    patch: HypersurfacePatch, u: Callable, lap_u: Callable, y, t: float
) -> float:
    """``lap u - g_t d_t u - d_t^2 u`` along the normal line through ``chi(y)``.

    ``g_t`` is ``div nu`` at the evaluation point.  For functions constant
    on the parallel surfaces the tangential part vanishes and so does the
    residual.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, _ = tubular_map(patch, y, t)
    base = patch.chi(y)
    nu = patch.nu(y)
    h_min = min(FD_STEPS)
    if h_min * max(1.0, np.linalg.norm(x)) < 1e-12:
        raise GeometryError("finite-difference step underflow")
    ubar = lambda s: float(u(base + (t + s) * nu))
    d1, _ = richardson_central(ubar, 1)
    d2, _ = richardson_central(ubar, 2)
    g = mean_curvature_g(patch, y, t)
    return float(lap_u(x) - g * d1 - d2)


def trace_transform(J0: float, J1: float, g0: complex, g1: complex, a: float) -> tuple[complex, complex]:
    """Weighted traces of ``J v`` from those of ``v``."""
    return J0 * g0, J0 * g1 + a * J1 * g0


def ag_cancellation_residual(J0, g, a, c_nu, U0, U1, V0, V1) -> complex:
    """Boundary terms with ``b = a(g - c_nu)`` against the flat form; should vanish.

    Left: ``U1 h0* - U0 h1* + a (g - c_nu) U0 h0*`` with ``(h0, h1)`` the
    transformed traces of ``v``.  Right: ``J0 (U1 V0* - U0 V1* - a c_nu U0 V0*)``.
    """
    h0, h1 = trace_transform(J0, J0 * g, V0, V1, a)
    left = U1 * np.conj(h0) - U0 * np.conj(h1) + a * (g - c_nu) * U0 * np.conj(h0)
    right = J0 * (U1 * np.conj(V0) - U0 * np.conj(V1) - a * c_nu * U0 * np.conj(V0))
    return complex(left - right)


def classical_green_residual(patch: HypersurfacePatch, u: Callable, grad_u: Callable, v: Callable, grad_v: Callable, y) -> float:
    """Pointwise consistency of the curved and flat classical Green boundary terms.

    The tube form carries ``g U0 V0`` and the Jacobian factor of ``v``; the
    flat form is ``J0 (U1 V0 - U0 V1)``.  ``g`` comes from the trace formula
    and ``J1`` from differencing the tube determinant, so the cancellation
    is a genuine check.  Returns the absolute difference.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    J0, _, _, J1_fd = jacobians(patch, y)
    x = patch.chi(y)
    nu = patch.nu(y)
    U0, U1 = u(x), grad_u(x) @ nu
    V0, V1 = v(x), grad_v(x) @ nu
    g = mean_curvature_g(patch, y)
    J1 = J1_fd
    h0, h1 = trace_transform(J0, J1, V0, V1, 1.0)
    left = U1 * h0 - U0 * h1 + g * U0 * h0
    right = J0 * (U1 * V0 - U0 * V1)
    return float(abs(left - right))
