"""Special functions behind the exact spectral-radius law.

Everything here accepts scalars or numpy arrays and broadcasts. Scalar
inputs come back as Python floats.

The regularized incomplete beta and gamma functions share one trick: the
power-law prefactor ``x**a (1-x)**b / B(a, b)`` (resp. ``x**s e**-x / Gamma(s)``)
is assembled from Stirling remainders and ``log1p(u) - u`` terms rather than
from differences of log-gamma values. With shape parameters near 1e5 the
naive difference loses ~1e-10 absolute accuracy; the remainder form keeps
full double precision.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ConvergenceError",
    "log_gamma",
    "stirling_remainder",
    "log1pmx",
    "reg_inc_beta",
    "reg_inc_beta_upper",
    "beta_log_tails",
    "reg_inc_gamma_lower",
    "log_reg_inc_gamma_lower",
    "log_stirling_bounds",
    "stirling_bounds",
]

CF_MAX_ITER = 300
CF_RTOL = 1e-15
_TINY = 1e-300
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EULER_GAMMA = 0.5772156649015328606065


class ConvergenceError(RuntimeError):
    """An iterative evaluation exhausted its iteration budget."""


def _scalar_or_array(value, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(value)
    return value


# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficient set):
#   Gamma(x) = sqrt(2 pi) (x + g + 1/2)**(x + 1/2) e**-(x + g + 1/2) * S(x) / x,
#   S(x) = c0 + sum_{j>=1} c_j / (x + j).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

# zeta(k) - 1 for k = 2..30; Taylor coefficients of log Gamma about 2:
#   log Gamma(2 + z) = (1 - euler_gamma) z + sum_{k>=2} (-1)**k (zeta(k) - 1) z**k / k.
_ZETA_MINUS_ONE = (
    0.64493406684822643647,
    0.2020569031595942854,
    0.082323233711138191516,
    0.036927755143369926331,
    0.017343061984449139715,
    0.0083492773819228268398,
    0.0040773561979443393787,
    0.0020083928260822144179,
    0.00099457512781808533715,
    0.0004941886041194645587,
    0.00024608655330804829864,
    0.00012271334757848914675,
    0.000061248135058704829259,
    0.000030588236307020493552,
    0.000015282259408651871733,
    7.6371976378997622736e-6,
    3.8172932649998398565e-6,
    1.9082127165539389257e-6,
    9.5396203387279611315e-7,
    4.7693298678780646312e-7,
    2.3845050272773299e-7,
    1.1921992596531107307e-7,
    5.9608189051259479612e-8,
    2.9803503514652280186e-8,
    1.4901554828365041235e-8,
    7.450711789835429492e-9,
    3.7253340247884570548e-9,
    1.8626597235130490064e-9,
    9.3132743241966818287e-10,
)


def _lanczos_log_gamma(x):
    s = np.full_like(x, _LANCZOS_COEF[0])
    for j in range(1, len(_LANCZOS_COEF)):
        s = s + _LANCZOS_COEF[j] / (x + j)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * np.log(t) - t + np.log(s / x)


def _log_gamma_near_two(z):
    # |z| <= 0.5; Horner over the alternating zeta series
    acc = np.zeros_like(z)
    for k in range(len(_ZETA_MINUS_ONE) + 1, 1, -1):
        acc = acc * z + ((-1) ** k) * _ZETA_MINUS_ONE[k - 2] / k
    return z * ((1.0 - _EULER_GAMMA) + z * acc)


def log_gamma(x):
    """Natural log of the gamma function for positive real ``x``.

    Uses a Taylor series about 2 on (0, 2.5] (with one or two recursion
    steps below 1.5, so the zeros at 1 and 2 keep full relative precision)
    and the Lanczos sum above 2.5.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa <= 0):
        raise ValueError("log_gamma requires x > 0")
    out = np.empty_like(xa)
    # the series variable is formed directly from x so no bits are lost to x + 1
    tiny = xa < 0.5
    xt = xa[tiny]
    out[tiny] = _log_gamma_near_two(xt) - np.log(xt) - np.log1p(xt)
    low = (xa >= 0.5) & (xa < 1.5)
    zl = xa[low] - 1.0
    out[low] = _log_gamma_near_two(zl) - np.log1p(zl)
    mid = (xa >= 1.5) & (xa <= 2.5)
    out[mid] = _log_gamma_near_two(xa[mid] - 2.0)
    big = xa > 2.5
    out[big] = _lanczos_log_gamma(xa[big])
    return _scalar_or_array(out, x)


# Stirling series coefficients B_{2m} / (2m (2m-1))
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def stirling_remainder(x):
    """``log_gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2]`` for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa <= 0):
        raise ValueError("stirling_remainder requires x > 0")
    out = np.empty_like(xa)
    big = xa >= 10.0
    xb = xa[big]
    inv2 = 1.0 / (xb * xb)
    acc = np.zeros_like(xb)
    for c in reversed(_STIRLING_COEF):
        acc = acc * inv2 + c
    out[big] = acc / xb
    xs = xa[~big]
    if xs.size:
        out[~big] = log_gamma(xs) - ((xs - 0.5) * np.log(xs) - xs + _HALF_LOG_2PI)
    return _scalar_or_array(out, x)


def log1pmx(u):
    """``log(1 + u) - u`` without cancellation for small ``|u|``."""
    ua = np.asarray(u, dtype=float)
    out = np.empty_like(ua)
    small = np.abs(ua) < 0.25
    us = ua[small]
    # -u^2/2 + u^3/3 - ...; 30 terms reach 0.25**32 / 32 < 1e-20
    acc = np.zeros_like(us)
    for m in range(32, 1, -1):
        acc = acc * us + ((-1) ** (m + 1)) / m
    out[small] = acc * us * us
    ub = ua[~small]
    with np.errstate(divide="ignore"):
        out[~small] = np.log1p(ub) - ub
    return _scalar_or_array(out, u)


def _log1pmx_ratio(u, ratio):
    # log(ratio) - u where ratio == 1 + u mathematically; ratio is the better-conditioned input
    out = np.empty_like(u)
    small = np.abs(u) < 0.25
    out[small] = log1pmx(u[small])
    with np.errstate(divide="ignore"):
        out[~small] = np.log(ratio[~small]) - u[~small]
    return out


def _log_beta_prefactor(a, b, x, y):
    """log of ``x**a y**b / B(a, b)`` with ``y = 1 - x`` supplied by the caller.

    Written as a*log1pmx(d/a) + b*log1pmx(-d/b) + log(ab/(2 pi (a+b)))/2
    + Stirling remainders, with d = x b - y a. The linear parts of the two
    log1p terms cancel exactly, which is what keeps large shapes accurate.
    """
    apb = a + b
    d = x * b - y * a
    main = a * _log1pmx_ratio(d / a, x * apb / a) + b * _log1pmx_ratio(-d / b, y * apb / b)
    corr = stirling_remainder(apb) - stirling_remainder(a) - stirling_remainder(b)
    return main + 0.5 * np.log(a * b / (2.0 * math.pi * apb)) + corr


def _beta_fraction(a, b, x, y, lam):
    """Continued fraction for ``I_x(a,b) * B(a,b) / (x**a y**b)``.

    Didonato-Morris form: evaluated as a rescaled three-term recurrence and
    parameterized by ``lam = a - (a+b) x`` (requires lam >= 0). Supplying lam
    directly avoids the cancellation the classical form suffers when a >> b
    and x sits just below the mean.
    """
    out = np.empty(x.shape)
    idx = np.arange(x.size)
    a, b, x, y, lam = (v.ravel() for v in (a, b, x, y, lam))
    c = 1.0 + lam
    c0 = b / a
    c1 = 1.0 + 1.0 / a
    yp1 = y + 1.0
    p = np.ones_like(x)
    s = a + 1.0
    an = np.zeros_like(x)
    bn = np.ones_like(x)
    anp1 = np.ones_like(x)
    bnp1 = c / c1
    r = c1 / c
    flat = out.reshape(-1)
    settled = np.zeros(idx.size, dtype=bool)
    for n in range(1, CF_MAX_ITER + 1):
        t = n / a
        w = n * (b - n) * x
        e = a / s
        alpha = p * (p + c0) * e * e * (w * x)
        e = (1.0 + t) / (c1 + t + t)
        beta = n + w / s + e * (c + n * yp1)
        p = 1.0 + t
        s = s + 2.0
        an, anp1 = anp1, alpha * an + beta * anp1
        bn, bnp1 = bnp1, alpha * bn + beta * bnp1
        r_new = anp1 / bnp1
        done = np.abs(r_new - r) <= CF_RTOL * r_new
        r = r_new
        an = an / bnp1
        bn = bn / bnp1
        anp1 = r_new
        bnp1 = np.ones_like(r_new)
        fresh = done & ~settled
        if fresh.any():
            flat[idx[fresh]] = r[fresh]
            settled |= fresh
            n_settled = np.count_nonzero(settled)
            if n_settled == settled.size:
                return out
            # drop converged entries once they are the majority
            if 2 * n_settled >= settled.size:
                keep = ~settled
                idx, a, b, x, c, c0, c1, yp1, p, s, an, bn, anp1, bnp1, r = (
                    v[keep] for v in (idx, a, b, x, c, c0, c1, yp1, p, s, an, bn, anp1, bnp1, r)
                )
                settled = np.zeros(idx.size, dtype=bool)
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge in {CF_MAX_ITER} iterations"
    )


def _check_beta_args(a, b, x):
    a, b, x = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(x, dtype=float)
    )
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise ValueError("incomplete beta requires a > 0 and b > 0")
    if np.any(~((x >= 0) & (x <= 1))):
        raise ValueError("incomplete beta requires 0 <= x <= 1")
    return a, b, x


def beta_log_tails(a, b, x):
    """Return ``(log I_x(a,b), log(1 - I_x(a,b)))``.

    Whichever tail lies on the convergent side of the continued fraction is
    computed directly; the other is ``log1p(-exp(direct))``. So the smaller
    tail always carries full relative precision, however deep it is.
    """
    a, b, x = _check_beta_args(a, b, x)
    log_lo = np.empty(a.shape)
    log_hi = np.empty(a.shape)
    at0 = x == 0.0
    at1 = x == 1.0
    log_lo[at0], log_hi[at0] = -np.inf, 0.0
    log_lo[at1], log_hi[at1] = 0.0, -np.inf
    inner = ~(at0 | at1)
    y = 1.0 - x
    # lam = a - (a+b) x, formed from whichever of x, 1-x avoids cancellation
    lam = np.where(a > b, (a + b) * y - b, a - (a + b) * x)
    direct = inner & (lam >= 0)
    swapped = inner & ~direct
    if direct.any():
        aa, bb, xx, yy = a[direct], b[direct], x[direct], y[direct]
        lv = _log_beta_prefactor(aa, bb, xx, yy) + np.log(_beta_fraction(aa, bb, xx, yy, lam[direct]))
        log_lo[direct] = lv
        log_hi[direct] = np.log1p(-np.exp(lv))
    if swapped.any():
        # I_x(a,b) = 1 - I_{1-x}(b,a)
        aa, bb, xx, yy = b[swapped], a[swapped], y[swapped], x[swapped]
        lv = _log_beta_prefactor(aa, bb, xx, yy) + np.log(_beta_fraction(aa, bb, xx, yy, -lam[swapped]))
        log_hi[swapped] = lv
        log_lo[swapped] = np.log1p(-np.exp(lv))
    return _scalar_or_array(log_lo, a, b, x), _scalar_or_array(log_hi, a, b, x)


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta I_x(a, b), the Beta(a, b) CDF at x."""
    log_lo, _ = beta_log_tails(a, b, x)
    return _scalar_or_array(np.exp(log_lo), a, b, x)


def reg_inc_beta_upper(a, b, x):
    """``1 - I_x(a, b)`` computed without cancellation."""
    _, log_hi = beta_log_tails(a, b, x)
    return _scalar_or_array(np.exp(log_hi), a, b, x)


def _log_gamma_prefactor(s, x):
    # log(x**s e**-x / Gamma(s)) via the Stirling remainder
    u = (x - s) / s
    near = np.abs(u) < 0.25
    with np.errstate(divide="ignore"):
        # away from x ~ s, 1 + u loses digits; log(x/s) does not
        main = np.where(near, s * log1pmx(np.where(near, u, 0.0)), s * np.log(x / s) - (x - s))
    return main + 0.5 * np.log(s / (2.0 * math.pi)) - stirling_remainder(s)


def _gamma_series(s, x):
    # sum_{n>=0} x^n / (s (s+1) ... (s+n)); terms decay once n > x - s
    term = 1.0 / s
    total = term.copy()
    ap = s.copy()
    limit = int(CF_MAX_ITER + 20.0 * math.sqrt(float(np.max(s, initial=1.0))))
    for _ in range(limit):
        ap = ap + 1.0
        term = term * x / ap
        total = total + term
        if np.all(np.abs(term) <= np.abs(total) * CF_RTOL):
            return total
    raise ConvergenceError("incomplete gamma series did not converge")


def _gamma_cf(s, x):
    # Q(s,x) = prefactor * cf; modified Lentz
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, CF_MAX_ITER + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) <= CF_RTOL
        if done.all():
            return h
    raise ConvergenceError(
        f"incomplete gamma continued fraction did not converge in {CF_MAX_ITER} iterations"
    )


def _gamma_log_tails(s, x):
    s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(s > 0)):
        raise ValueError("incomplete gamma requires s > 0")
    if np.any(~(x >= 0)):
        raise ValueError("incomplete gamma requires x >= 0")
    log_p = np.empty(s.shape)
    log_q = np.empty(s.shape)
    zero = x == 0.0
    log_p[zero], log_q[zero] = -np.inf, 0.0
    ser = ~zero & (x < s + 1.0)
    cf = ~zero & ~ser
    if ser.any():
        ss, xx = s[ser], x[ser]
        lv = _log_gamma_prefactor(ss, xx) + np.log(_gamma_series(ss, xx))
        log_p[ser] = lv
        log_q[ser] = np.log1p(-np.exp(lv))
    if cf.any():
        ss, xx = s[cf], x[cf]
        lv = _log_gamma_prefactor(ss, xx) + np.log(_gamma_cf(ss, xx))
        log_q[cf] = lv
        log_p[cf] = np.log1p(-np.exp(lv))
    return log_p, log_q


def log_reg_inc_gamma_lower(s, x):
    """``log P(s, x)``; accurate deep into the left tail."""
    log_p, _ = _gamma_log_tails(s, x)
    return _scalar_or_array(log_p, s, x)


def reg_inc_gamma_lower(s, x):
    """Regularized lower incomplete gamma P(s, x).

    Series for x < s + 1, Lentz continued fraction for the upper tail
    otherwise.
    """
    log_p, _ = _gamma_log_tails(s, x)
    return _scalar_or_array(np.exp(log_p), s, x)


def log_stirling_bounds(j: int) -> tuple[float, float]:
    """Logs of the two-sided Stirling envelope around ``j!``.

    ``j! = j**(j+1/2) e**(-j + eps) sqrt(2 pi)`` with ``1/(12j+1) < eps < 1/(12j)``.
    """
    if isinstance(j, bool) or int(j) != j or j < 1:
        raise ValueError("stirling_bounds requires an integer j >= 1")
    j = int(j)
    base = (j + 0.5) * math.log(j) - j + _HALF_LOG_2PI
    return base + 1.0 / (12 * j + 1), base + 1.0 / (12 * j)


def stirling_bounds(j: int) -> tuple[float, float]:
    lower, upper = log_stirling_bounds(j)
    try:
        return math.exp(lower), math.exp(upper)
    except OverflowError:
        raise OverflowError(f"Stirling bounds for {j}! exceed the floating range") from None
