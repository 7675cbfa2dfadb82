"""Boundary symbols and Green identities for fractional elliptic powers.

Modules:

- ``ratfun``: rational functions of one variable, partial fractions and
  the inverse-Fourier jump at the origin.
- ``asymexp``: finite asymptotic sums with a tracked remainder order.
- ``powsym``: two-term symbols of ``L**a`` and a contour-integral check.
- ``bsym``: the boundary symbol ``b(xi')`` from the reduced symbol, its
  closed form and a numeric oracle.
- ``geom``: hypersurface patches, tubular coordinates and Jacobian
  identities.
- ``fracnum``: one-dimensional quadrature for the fractional Laplacian,
  constant-coefficient drift operators and Green residuals.
- ``cli``: batch verification runner (``fracgreen run``).
"""

from .asymexp import AsymptoticSum, as_jump
from .bsym import BoundaryJet, BSymbol, boundary_symbol_closed, boundary_symbol_numeric, boundary_symbol_pipeline, classify_locality
from .fracnum import EdgeFunction1D, fraclap_pv, frac_constant, greens_residual_drift, greens_residual_fraclap
from .powsym import OperatorJet, power_symbol, power_symbol_contour
from .ratfun import RationalFn, jump, rf_make

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSum",
    "BSymbol",
    "BoundaryJet",
    "EdgeFunction1D",
    "OperatorJet",
    "RationalFn",
    "as_jump",
    "boundary_symbol_closed",
    "boundary_symbol_numeric",
    "boundary_symbol_pipeline",
    "classify_locality",
    "frac_constant",
    "fraclap_pv",
    "greens_residual_drift",
    "greens_residual_fraclap",
    "jump",
    "power_symbol",
    "power_symbol_contour",
    "rf_make",
]
