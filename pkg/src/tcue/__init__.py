"""Spectral radius of truncated Haar unitaries: exact law, limit laws, simulation."""

from .limit_laws import NormalizedLaw, Regime, RegimeTag, classify_regime, law_for_theorem
from .order_stats import ExactRadiusLaw, TruncationSpec, exact_radius_cdf, exact_radius_quantile

__all__ = [
    "TruncationSpec",
    "ExactRadiusLaw",
    "exact_radius_cdf",
    "exact_radius_quantile",
    "NormalizedLaw",
    "Regime",
    "RegimeTag",
    "classify_regime",
    "law_for_theorem",
]
