"""Two-term symbol of a fractional power of a second-order elliptic operator.

The operator is ``L = -sum a_jk d_j d_k + b . grad + b0``.  Its symbol
parts at a point are ``l0 = xi^T A xi``, ``l1 = i b . xi`` and ``l2 = b0``;
``dA[m]`` holds the first derivatives ``d a_jk / d x_m`` at the point.

:func:`power_symbol` returns the closed form of the first two homogeneous
terms of the symbol of ``L**a``; :func:`power_symbol_contour` recomputes
their sum from the resolvent parametrix by a Cauchy integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class JetError(ValueError):
    pass


def binom2(a: float) -> float:
    return a * (a - 1.0) / 2.0


@dataclass(frozen=True)
class OperatorJet:
    """Coefficients of ``L`` and their first derivatives at one point."""

    A: np.ndarray
    dA: np.ndarray = None
    b: np.ndarray = None
    b0: complex = 0.0
    ellipticity_margin: float = 1e-8
    n: int = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        n = A.shape[0]
        if A.shape != (n, n):
            raise JetError(f"A must be square, got shape {A.shape}")
        dA = np.zeros((n, n, n), dtype=complex) if self.dA is None else np.asarray(self.dA, dtype=complex)
        if dA.shape != (n, n, n):
            raise JetError(f"dA must have shape {(n, n, n)}, got {dA.shape}")
        b = np.zeros(n, dtype=complex) if self.b is None else np.asarray(self.b, dtype=complex)
        if b.shape != (n,):
            raise JetError(f"b must have shape {(n,)}, got {b.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "dA", dA)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "b0", complex(self.b0))
        object.__setattr__(self, "n", n)
        margin = ellipticity_margin(A)
        if margin < self.ellipticity_margin:
            raise JetError(
                f"not strongly elliptic: min Re xi^T A xi / |xi|^2 = {margin:.3g} "
                f"< required {self.ellipticity_margin:.3g}"
            )


def ellipticity_margin(A: np.ndarray, samples: int = 64) -> float:
    """Lower bound estimate of ``Re xi^T A xi / |xi|^2`` over the sphere.

    The exact minimum is the smallest eigenvalue of the symmetric real part;
    64 fixed sampled directions are also checked.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    S = (A.real + A.real.T) / 2.0
    exact = float(np.linalg.eigvalsh(S)[0])
    rng = np.random.default_rng(12345)
    dirs = rng.standard_normal((samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    sampled = float(np.min(np.einsum("si,ij,sj->s", dirs, A.real, dirs)))
    return min(exact, sampled)


def _xi(jet: OperatorJet, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (jet.n,):
        raise JetError(f"xi must have shape {(jet.n,)}, got {xi.shape}")
    return xi


def symbol_parts(jet: OperatorJet, xi) -> tuple[complex, complex, complex]:
    xi = _xi(jet, xi)
    l0 = complex(xi @ jet.A @ xi)
    l1 = complex(1j * (jet.b @ xi))
    return l0, l1, jet.b0


def principal_derivatives(jet: OperatorJet, xi) -> tuple[np.ndarray, np.ndarray]:
    """``(d l0 / d xi_j, d l0 / d x_j)`` for all ``j``."""
    xi = _xi(jet, xi)
    dxi = (jet.A + jet.A.T) @ xi
    dx = np.einsum("j,mjk,k->m", xi, jet.dA, xi)
    return dxi, dx


def parametrix_terms(jet: OperatorJet, xi, lam: complex) -> tuple[complex, complex]:
    """``((l0 - lam)^-1, correction)`` of the first-order resolvent parametrix."""
    xi = _xi(jet, xi)
    l0, _, _ = symbol_parts(jet, xi)
    if abs(lam - l0) < 1e-8 * (1.0 + abs(lam) + xi @ xi):
        raise JetError(f"lambda = {lam} is too close to l0 = {l0}")
    dxi, dx = principal_derivatives(jet, xi)
    r = 1.0 / (l0 - lam)
    corr = -1j * (jet.b @ xi) * r**2 - 1j * np.sum(dxi * dx) * r**3
    return r, complex(corr)


def power_symbol(jet: OperatorJet, xi, a: float) -> tuple[complex, complex]:
    """Principal and subprincipal symbol ``(p0, p1)`` of ``L**a`` at ``xi``."""
    xi = _xi(jet, xi)
    if not np.any(xi):
        raise JetError("xi = 0 is excluded")
    l0, _, _ = symbol_parts(jet, xi)
    dxi, dx = principal_derivatives(jet, xi)
    p0 = l0**a
    p1 = p0 * (1j * a * (jet.b @ xi) / l0 - binom2(a) * 1j * np.sum(dxi * dx) / l0**2)
    return complex(p0), complex(p1)


def contour_radius(l0: complex) -> float:
    """Half the distance from ``l0`` to the cut ``(-inf, 0]`` of ``lam**a``."""
    dist = abs(l0) if l0.real >= 0 else abs(l0.imag)
    return dist / 2.0


def power_symbol_contour(jet: OperatorJet, xi, a: float, nodes: int = 64) -> complex:
    """``p0 + p1`` from the Cauchy integral of ``lam**a`` times the parametrix.

    The trapezoid rule on a circle around ``l0`` converges geometrically,
    with ratio one half for the default radius.
    """
    xi = _xi(jet, xi)
    if not np.any(xi):
        raise JetError("xi = 0 is excluded")
    l0, _, _ = symbol_parts(jet, xi)
    rho = contour_radius(l0)
    if rho <= 1e-12 * (1.0 + abs(l0)):
        raise JetError(f"l0 = {l0} lies on the branch cut of lam**a")
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    lam = l0 + rho * np.exp(1j * theta)
    dlam = 1j * rho * np.exp(1j * theta) * (2.0 * np.pi / nodes)
    dxi, dx = principal_derivatives(jet, xi)
    r = 1.0 / (l0 - lam)
    integrand = r - 1j * (jet.b @ xi) * r**2 - 1j * np.sum(dxi * dx) * r**3
    return complex(1j / (2.0 * np.pi) * np.sum(lam**a * integrand * dlam))
