"""Asymptotic normalizations of the spectral radius and their limit laws.

Four growth regimes for the truncation depth ``k = n - p`` lead to three
normalizations:

* moderate or heavy truncation (small p/n, bulk p/n, or k >> (log n)^3):
  Gumbel centering/scaling built from ``c = sqrt((p-1)/(n-1))``;
* very light truncation (k -> inf, k/log n -> 0): Gumbel with constants
  from the root of ``P(k, a) = k/n``;
* fixed k: reversed Weibull W_k after scaling by ``2 n^(1+1/k) / ((k+1)!)^(1/k)``.

Between log n and (log n)^3 nothing is proven; the classifier says so.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .order_stats import TruncationSpec, exact_radius_cdf
from .special import ConvergenceError, log_gamma, reg_inc_gamma_lower

__all__ = [
    "RegimeTag",
    "Regime",
    "RegimeThresholds",
    "Gumbel",
    "ReversedWeibull",
    "NormalizedLaw",
    "classify_regime",
    "a_of",
    "b_of",
    "theorem1_constants",
    "solve_an",
    "theorem3_constants",
    "theorem4_constants",
    "law_for_theorem",
    "gumbel_cdf",
    "reversed_weibull_cdf",
    "reversed_weibull_quantile",
    "normalized_exact_cdf",
    "sup_distance_to_limit",
]


class RegimeTag(str, enum.Enum):
    BULK = "Bulk"
    HEAVY = "HeavyTruncation"
    LIGHT = "LightTruncation"
    VERY_LIGHT = "VeryLightTruncation"
    FIXED_K = "FixedK"
    GAP = "Gap"


@dataclass(frozen=True)
class RegimeThresholds:
    """Finite-n cut-offs standing in for the asymptotic regime conditions."""

    fixed_k_max: int = 10
    very_light_max: float = 0.5  # k / log n
    heavy_cube_min: float = 2.0  # k / (log n)^3
    light_k_over_n_max: float = 0.2
    bulk_low: float = 0.2  # p / n
    bulk_high: float = 0.8


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    p_over_n: float
    k_over_log_n: float
    k_over_log_n_cubed: float
    theorem: int
    warning: str | None = None


@dataclass(frozen=True)
class Gumbel:
    def cdf(self, x):
        return gumbel_cdf(x)

    def __str__(self):
        return "gumbel"


@dataclass(frozen=True)
class ReversedWeibull:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("reversed Weibull index must be >= 1")

    def cdf(self, x):
        return reversed_weibull_cdf(self.k, x)

    def __str__(self):
        return "reversed_weibull"


@dataclass(frozen=True)
class NormalizedLaw:
    """``(radius - A) / B`` converges to ``limit``."""

    A: float
    B: float
    limit: Gumbel | ReversedWeibull
    source_theorem: int
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.B > 0:
            raise ValueError("scaling B must be positive")
        if isinstance(self.limit, ReversedWeibull) != (self.source_theorem == 4):
            raise ValueError("reversed Weibull limit goes with the fixed-k normalization only")


def classify_regime(
    spec: TruncationSpec,
    fixed_k_declared: bool | None = None,
    thresholds: RegimeThresholds = RegimeThresholds(),
) -> Regime:
    """Map a finite (n, p) to the regime whose normalization should be used.

    Rules are checked in order: fixed k, very light truncation (Theorem 3
    constants), the unresolved gap, light truncation (k/n small), bulk, and
    finally heavy truncation.
    """
    n, p, k = spec.n, spec.p, spec.k
    log_n = math.log(n)
    p_over_n = p / n
    k_log = k / log_n
    k_cube = k / log_n**3

    def make(tag, theorem, warning=None):
        return Regime(tag, p_over_n, k_log, k_cube, theorem, warning)

    if fixed_k_declared or k <= thresholds.fixed_k_max:
        return make(RegimeTag.FIXED_K, 4)
    if k_log <= thresholds.very_light_max:
        return make(RegimeTag.VERY_LIGHT, 3)
    if k_cube < thresholds.heavy_cube_min:
        return make(
            RegimeTag.GAP,
            1,
            "log n << k << (log n)^3 is not covered by any limit theorem; "
            "Gumbel constants of the moderate-truncation regime are reported",
        )
    if k / n <= thresholds.light_k_over_n_max:
        return make(RegimeTag.LIGHT, 1)
    if thresholds.bulk_low < p_over_n < thresholds.bulk_high:
        return make(RegimeTag.BULK, 1)
    d_heavy = max(0.0, p_over_n - thresholds.bulk_low)
    d_bulk = max(0.0, thresholds.bulk_low - p_over_n, p_over_n - thresholds.bulk_high)
    return make(RegimeTag.HEAVY if d_heavy <= d_bulk else RegimeTag.BULK, 1)


def _check_y(y):
    if not y > 3:
        raise ValueError(f"normalizing functions need y > 3, got {y}")


def a_of(y: float) -> float:
    _check_y(y)
    ly = math.log(y)
    return math.sqrt(ly) - math.log(math.sqrt(2 * math.pi) * ly) / math.sqrt(ly)


def b_of(y: float) -> float:
    _check_y(y)
    return 1.0 / math.sqrt(math.log(y))


def theorem1_constants(spec: TruncationSpec) -> NormalizedLaw:
    n, p = spec.n, spec.p
    if p < 2:
        raise ValueError("moderate-truncation constants need p >= 2")
    c2 = (p - 1) / (n - 1)
    c = math.sqrt(c2)
    x_n = n * c2 / (1 - c2)
    if not x_n > 3:
        raise ValueError(f"moderate-truncation constants undefined: n c^2/(1-c^2) = {x_n:.6g} <= 3")
    half_width = 0.5 * math.sqrt(1 - c2) / math.sqrt(n - 1)
    return NormalizedLaw(
        A=c + half_width * a_of(x_n),
        B=half_width * b_of(x_n),
        limit=Gumbel(),
        source_theorem=1,
        details={"c_n": c, "x_n": x_n},
    )


def solve_an(spec: TruncationSpec, max_expansions: int = 200) -> float:
    """Root a of ``P(k, a) = k / n``, by bracketing and bisection."""
    k, n = spec.k, spec.n
    target = k / n

    def resid(a):
        return reg_inc_gamma_lower(k, a) - target

    hi = k * max(1.0, -math.log(target))
    for _ in range(max_expansions):
        if resid(hi) > 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"could not bracket a_n for k={k}, n={n}")
    lo = 0.0
    # P(k, .) is strictly increasing; 200 halvings exhaust double precision
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        r = resid(mid)
        if r == 0.0:
            return mid
        if r < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(resid(lo)) <= abs(resid(hi)) else hi


def theorem3_constants(spec: TruncationSpec) -> NormalizedLaw:
    n, k = spec.n, spec.k
    a_n = solve_an(spec)
    if not a_n < n:
        raise ValueError(f"a_n = {a_n} must be below n = {n}")
    return NormalizedLaw(
        A=math.sqrt(1 - a_n / n),
        B=a_n / (2 * n * k),
        limit=Gumbel(),
        source_theorem=3,
        details={"a_n": a_n},
    )


def theorem4_constants(spec: TruncationSpec) -> NormalizedLaw:
    n, k = spec.n, spec.k
    # ((k+1)!)^(1/k) / (2 n^(1+1/k)) in log space
    log_b = (log_gamma(k + 2.0) - math.log(n)) / k - math.log(2 * n)
    return NormalizedLaw(A=1.0, B=math.exp(log_b), limit=ReversedWeibull(k), source_theorem=4)


def law_for_theorem(spec: TruncationSpec, theorem: int) -> NormalizedLaw:
    """Normalization by theorem number; 2 is an alias of 1."""
    if theorem in (1, 2):
        return theorem1_constants(spec)
    if theorem == 3:
        return theorem3_constants(spec)
    if theorem == 4:
        return theorem4_constants(spec)
    raise ValueError(f"unknown theorem {theorem}")


def gumbel_cdf(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-np.exp(-x))
    return float(out) if out.ndim == 0 else out


def reversed_weibull_cdf(k: int, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(x > 0, 1.0, np.exp(-np.power(np.maximum(-x, 0.0), k)))
    return float(out) if out.ndim == 0 else out


def reversed_weibull_quantile(k: int, q: float) -> float:
    if not 0 < q < 1:
        raise ValueError("quantile level must lie in (0, 1)")
    return -((-math.log(q)) ** (1.0 / k))


def normalized_exact_cdf(spec: TruncationSpec, law: NormalizedLaw, x):
    """Exact ``P((radius - A) / B <= x)``."""
    r = np.clip(law.A + law.B * np.asarray(x, dtype=float), 0.0, 1.0)
    return exact_radius_cdf(spec, r)


def sup_distance_to_limit(spec: TruncationSpec, law: NormalizedLaw, grid) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    diff = np.abs(normalized_exact_cdf(spec, law, grid) - law.limit.cdf(grid))
    return float(np.max(diff))
