import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcue.limit_laws import (
    Gumbel,
    NormalizedLaw,
    RegimeTag,
    RegimeThresholds,
    ReversedWeibull,
    a_of,
    b_of,
    classify_regime,
    gumbel_cdf,
    law_for_theorem,
    normalized_exact_cdf,
    reversed_weibull_cdf,
    reversed_weibull_quantile,
    solve_an,
    sup_distance_to_limit,
    theorem1_constants,
    theorem3_constants,
    theorem4_constants,
)
from tcue.order_stats import TruncationSpec
from tcue.special import reg_inc_gamma_lower

# 50-digit evaluations of the closed-form expressions (mpmath), frozen
A_E4 = 0.84738355283771831969
A_E9 = 1.96127896315303595848
T1_100_50 = (0.73927216114973792850, 0.016678296187015228939)
AN_K1_N100 = 0.010050335853501441184
AN_K2_N10 = 0.82438830903298460938


# --- classifier --------------------------------------------------------------

def tag(n, p, **kw):
    return classify_regime(TruncationSpec(n, p), **kw).tag


def test_fixed_k_declared():
    assert tag(10**4, 9996, fixed_k_declared=True) is RegimeTag.FIXED_K
    # declaring fixed k wins even for large k
    assert tag(10**4, 5000, fixed_k_declared=True) is RegimeTag.FIXED_K


def test_fixed_k_small_k():
    assert tag(10**4, 10**4 - 4) is RegimeTag.FIXED_K
    r = classify_regime(TruncationSpec(10**4, 9990))
    assert r.tag is RegimeTag.FIXED_K and r.theorem == 4


def test_small_p_over_n_is_heavy():
    r = classify_regime(TruncationSpec(10**4, 300))
    assert r.tag is RegimeTag.HEAVY and r.theorem == 1
    assert r.k_over_log_n_cubed == pytest.approx(12.41, abs=0.01)


def test_very_light():
    n = 10**10
    r = classify_regime(TruncationSpec(n, n - 11))
    assert r.tag is RegimeTag.VERY_LIGHT and r.theorem == 3


def test_gap_is_reported_with_warning():
    r = classify_regime(TruncationSpec(1000, 900))
    assert r.tag is RegimeTag.GAP and r.warning
    assert r.theorem == 1


def test_light_truncation():
    r = classify_regime(TruncationSpec(10**6, 9 * 10**5))
    assert r.tag is RegimeTag.LIGHT and r.theorem == 1


def test_bulk():
    assert tag(10**4, 5000) is RegimeTag.BULK


def test_thresholds_overridable():
    th = RegimeThresholds(fixed_k_max=2)
    assert tag(10**4, 9996, thresholds=th) is not RegimeTag.FIXED_K


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 10**7), frac=st.floats(0.0, 1.0))
def test_classifier_total_and_deterministic(n, frac):
    p = min(n - 1, max(1, int(frac * n)))
    spec = TruncationSpec(n, p)
    r1, r2 = classify_regime(spec), classify_regime(spec)
    assert r1 == r2
    assert r1.theorem in (1, 3, 4)
    assert (r1.warning is not None) == (r1.tag is RegimeTag.GAP)


# --- normalizing functions ---------------------------------------------------

def test_b_of():
    assert b_of(math.exp(4)) == pytest.approx(0.5, abs=1e-15)


def test_a_of():
    assert a_of(math.exp(4)) == pytest.approx(A_E4, abs=1e-14)
    assert a_of(math.exp(9)) == pytest.approx(A_E9, abs=1e-14)
    assert A_E4 == pytest.approx(0.8473832, abs=1e-6)


@pytest.mark.parametrize("y", [3.0, 1.0, 0.0, -5.0])
def test_normalizing_domain(y):
    with pytest.raises(ValueError):
        a_of(y)
    with pytest.raises(ValueError):
        b_of(y)


def test_theorem1_undefined_when_xn_small():
    with pytest.raises(ValueError):
        theorem1_constants(TruncationSpec(101, 2))


def test_theorem1_needs_p_ge_2():
    with pytest.raises(ValueError):
        theorem1_constants(TruncationSpec(50, 1))


def test_theorem1_high_precision():
    law = theorem1_constants(TruncationSpec(100, 50))
    assert law.A == pytest.approx(T1_100_50[0], rel=1e-14)
    assert law.B == pytest.approx(T1_100_50[1], rel=1e-14)
    assert law.details["c_n"] == pytest.approx(math.sqrt(49 / 99), rel=1e-15)
    assert isinstance(law.limit, Gumbel) and law.source_theorem == 1


@pytest.mark.parametrize("n", [10, 100, 10**4, 10**6])
def test_theorem1_scaling_positive_near_full(n):
    if n * (n - 2) / (n - 1) / (1 - (n - 2) / (n - 1)) <= 3:
        pytest.skip("x_n <= 3")
    assert theorem1_constants(TruncationSpec(n, n - 1)).B > 0


# --- a_n and Theorem 3 -------------------------------------------------------

def test_solve_an_k1():
    assert solve_an(TruncationSpec(100, 99)) == pytest.approx(AN_K1_N100, abs=1e-15)
    assert solve_an(TruncationSpec(2, 1)) == pytest.approx(math.log(2), abs=1e-15)


def test_solve_an_k2():
    assert solve_an(TruncationSpec(10, 8)) == pytest.approx(AN_K2_N10, abs=1e-14)


@settings(max_examples=150, deadline=None)
@given(n=st.integers(2, 10**8), frac=st.floats(0.0, 1.0))
def test_solve_an_residual(n, frac):
    k = min(n - 1, max(1, int(frac * min(n, 5000))))
    spec = TruncationSpec(n, n - k)
    a = solve_an(spec)
    assert abs(reg_inc_gamma_lower(k, a) - k / n) <= 1e-12


@pytest.mark.parametrize("n", [100, 10**3, 10**6])
def test_an_k1_analytic(n):
    assert solve_an(TruncationSpec(n, n - 1)) == pytest.approx(-math.log1p(-1.0 / n), abs=1e-12)


@pytest.mark.parametrize("k, n", [(3, 10**6), (2, 100), (5, 1000), (20, 10**5)])
def test_an_below_k(k, n):
    assert solve_an(TruncationSpec(n, n - k)) / k < 1


def test_theorem3_k1():
    law = theorem3_constants(TruncationSpec(100, 99))
    assert law.A == pytest.approx(0.99994974705805340565, abs=1e-15)
    assert law.B == pytest.approx(5.0251679267507206e-05, rel=1e-13)
    assert law.details["a_n"] == pytest.approx(AN_K1_N100, abs=1e-15)


def test_theorem3_n2():
    law = theorem3_constants(TruncationSpec(2, 1))
    assert law.A == pytest.approx(math.sqrt(1 - math.log(2) / 2), abs=1e-15)
    assert law.B == pytest.approx(math.log(2) / 4, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 10**6), frac=st.floats(0.0, 1.0))
def test_theorem3_ranges(n, frac):
    # k <= n/2 keeps a_n < n; closer to n the centering is undefined
    k = max(1, int(frac * min(n // 2, 2000)))
    law = theorem3_constants(TruncationSpec(n, n - k))
    assert law.B > 0 and 0 < law.A < 1


def test_theorem3_undefined_when_an_exceeds_n():
    with pytest.raises(ValueError):
        theorem3_constants(TruncationSpec(6, 1))


# --- Theorem 4 ---------------------------------------------------------------

def test_theorem4_constants():
    law = theorem4_constants(TruncationSpec(10, 9))
    assert law.A == 1.0 and law.B == pytest.approx(0.01, rel=1e-14)
    assert theorem4_constants(TruncationSpec(10, 8)).B == pytest.approx(0.038729833462074169779, rel=1e-14)
    assert theorem4_constants(TruncationSpec(100, 99)).B == pytest.approx(1e-4, rel=1e-14)
    assert isinstance(law.limit, ReversedWeibull) and law.limit.k == 1


def test_theorem4_large_k_no_overflow():
    law = theorem4_constants(TruncationSpec(10**6, 10**6 - 300))
    assert math.isfinite(law.B) and law.B > 0


def test_weibull_quantile():
    assert reversed_weibull_quantile(1, 0.5) == pytest.approx(-0.693147180559945, abs=1e-14)
    for k in (1, 2, 5):
        for q in (0.1, 0.5, 0.9):
            assert reversed_weibull_cdf(k, reversed_weibull_quantile(k, q)) == pytest.approx(q, abs=1e-14)


def test_law_for_theorem_alias():
    spec = TruncationSpec(100, 50)
    assert law_for_theorem(spec, 2) == law_for_theorem(spec, 1)
    with pytest.raises(ValueError):
        law_for_theorem(spec, 5)


def test_normalized_law_invariants():
    with pytest.raises(ValueError):
        NormalizedLaw(1.0, 0.0, Gumbel(), 1)
    with pytest.raises(ValueError):
        NormalizedLaw(1.0, 0.1, ReversedWeibull(2), 1)
    with pytest.raises(ValueError):
        NormalizedLaw(1.0, 0.1, Gumbel(), 4)


# --- limit CDFs --------------------------------------------------------------

def test_limit_cdf_values():
    assert gumbel_cdf(0.0) == pytest.approx(math.exp(-1), abs=1e-16)
    assert reversed_weibull_cdf(1, -1.0) == pytest.approx(math.exp(-1), abs=1e-16)
    assert reversed_weibull_cdf(3, 0.5) == 1.0
    assert reversed_weibull_cdf(2, 0.0) == 1.0


@pytest.mark.parametrize("cdf", [gumbel_cdf, lambda x: reversed_weibull_cdf(1, x), lambda x: reversed_weibull_cdf(4, x)])
def test_limit_cdfs_valid(cdf):
    x = np.linspace(-50, 50, 2001)
    v = cdf(x)
    assert np.all(np.diff(v) >= 0)
    assert v[0] < 1e-12 and v[-1] == 1.0


# --- normalized exact law ----------------------------------------------------

def test_normalized_cdf_clamps():
    spec = TruncationSpec(50, 20)
    law = theorem1_constants(spec)
    lo = -law.A / law.B - 1.0
    hi = (1.0 - law.A) / law.B + 1.0
    assert normalized_exact_cdf(spec, law, lo) == 0.0
    assert normalized_exact_cdf(spec, law, hi) == 1.0


def test_normalized_cdf_k1_closed_form_n4():
    spec = TruncationSpec(4, 3)
    law = theorem4_constants(spec)
    assert law.B == pytest.approx(1 / 16)
    x = np.linspace(-16, 0, 65)
    assert np.max(np.abs(normalized_exact_cdf(spec, law, x) - (1 + x / 16) ** 12)) <= 1e-12


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_normalized_cdf_k1_closed_form(n):
    spec = TruncationSpec(n, n - 1)
    law = theorem4_constants(spec)
    x = np.linspace(-1 / (2 * law.B), 0, 101)
    ref = (1 + x * law.B) ** (n * (n - 1))
    assert np.max(np.abs(normalized_exact_cdf(spec, law, x) - ref)) <= 1e-10


def test_sup_distance_above_support_is_zero():
    spec = TruncationSpec(100, 99)
    law = theorem4_constants(spec)
    assert sup_distance_to_limit(spec, law, np.linspace(0.1, 5.0, 20)) == 0.0


def test_sup_distance_k1_n1e4():
    spec = TruncationSpec(10**4, 10**4 - 1)
    d = sup_distance_to_limit(spec, theorem4_constants(spec), np.linspace(-10, 0, 200))
    assert d < 0.01


def test_sup_distance_rejects_empty_grid():
    spec = TruncationSpec(10, 9)
    with pytest.raises(ValueError):
        sup_distance_to_limit(spec, theorem4_constants(spec), [])
