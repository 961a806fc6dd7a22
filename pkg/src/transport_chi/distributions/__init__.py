"""One-dimensional laws: analytic families, mixtures, piecewise densities and
the two constructed laws used as counterexamples and approximations."""

from __future__ import annotations

from .base import AffineTransformed, Distribution1D, log_abs_diff, scaled, shifted
from .families import Exponential, Gaussian, Laplace, Mixture, Piece, Piecewise, Uniform
from .special import (GN_C, TruncatedCDF, gn_chi_square_series, gn_knot, make_gn,
                      truncate_cdf)
from .spec import FAMILIES, DistributionSpec, make_family, parse_shorthand, parse_spec


def quantile(d: Distribution1D, u):
    """``inf{x : F(x) >= u}`` for ``u`` in (0, 1)."""
    return d.quantile(u)


def median(d: Distribution1D) -> float:
    return d.quantile(0.5)


__all__ = [
    "AffineTransformed", "Distribution1D", "DistributionSpec", "Exponential", "FAMILIES",
    "GN_C", "Gaussian", "Laplace", "Mixture", "Piece", "Piecewise", "TruncatedCDF", "Uniform",
    "gn_chi_square_series", "gn_knot", "log_abs_diff", "make_family", "make_gn", "median",
    "parse_shorthand", "parse_spec", "quantile", "scaled", "shifted", "truncate_cdf",
]
