"""Haar unitaries, truncation, and a complex non-Hermitian eigensolver.

The eigensolver is the textbook two-phase scheme: Householder reduction to
upper Hessenberg form, then single-shift complex QR sweeps (Givens
rotations) with a Wilkinson shift and deflation on negligible subdiagonals.
Both phases are compiled with numba; only eigenvalues are produced.
"""

from __future__ import annotations

import numba as nb
import numpy as np

__all__ = [
    "EigenConvergenceError",
    "sample_complex_ginibre",
    "haar_unitary",
    "truncate",
    "hessenberg",
    "eigenvalues",
    "spectral_radius",
]

DEFLATION_EPS = 1e-14
MAX_SWEEPS_PER_DIM = 100


class EigenConvergenceError(RuntimeError):
    """Shifted QR iteration hit its sweep cap before all eigenvalues deflated."""


def sample_complex_ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n matrix with i.i.d. entries whose real and imaginary parts are N(0, 1)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def haar_unitary(n: int, rng: np.random.Generator, max_retries: int = 3) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a Ginibre matrix.

    The columns of Q are rotated by the phases of R's diagonal so the
    factorization is unique; without that step Q is not Haar.
    """
    for _ in range(max_retries + 1):
        q, r = np.linalg.qr(sample_complex_ginibre(n, rng))
        diag = np.diagonal(r)
        mod = np.abs(diag)
        if np.min(mod) > 1e-12 * max(1.0, np.max(mod)):
            return q * (diag / mod)[None, :]
    raise RuntimeError(f"degenerate QR in Haar sampling after {max_retries} retries")


def truncate(u: np.ndarray, p: int) -> np.ndarray:
    """Leading p x p block (drop the last dim - p rows and columns)."""
    dim = u.shape[0]
    if not 1 <= p < dim:
        raise ValueError(f"truncation size must satisfy 1 <= p < {dim}, got {p}")
    return np.ascontiguousarray(u[:p, :p])


@nb.njit(cache=True, nogil=True)
def _hessenberg_inplace(h):
    n = h.shape[0]
    for k in range(n - 2):
        norm2 = 0.0
        for i in range(k + 1, n):
            norm2 += h[i, k].real ** 2 + h[i, k].imag ** 2
        if norm2 == 0.0:
            continue
        norm = np.sqrt(norm2)
        x0 = h[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * norm
        v = np.empty(n - k - 1, dtype=np.complex128)
        for i in range(k + 1, n):
            v[i - k - 1] = h[i, k]
        v[0] -= alpha
        vnorm2 = 0.0
        for i in range(v.shape[0]):
            vnorm2 += v[i].real ** 2 + v[i].imag ** 2
        if vnorm2 == 0.0:
            continue
        # H <- (I - 2 v v* / v*v) H (I - 2 v v* / v*v)
        for j in range(n):
            s = 0.0j
            for i in range(v.shape[0]):
                s += np.conj(v[i]) * h[k + 1 + i, j]
            s *= 2.0 / vnorm2
            for i in range(v.shape[0]):
                h[k + 1 + i, j] -= v[i] * s
        for i in range(n):
            s = 0.0j
            for jj in range(v.shape[0]):
                s += h[i, k + 1 + jj] * v[jj]
            s *= 2.0 / vnorm2
            for jj in range(v.shape[0]):
                h[i, k + 1 + jj] -= s * np.conj(v[jj])
        h[k + 1, k] = alpha
        for i in range(k + 2, n):
            h[i, k] = 0.0j


@nb.njit(cache=True, nogil=True)
def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mu1 = d + half + disc
    mu2 = d + half - disc
    # choose the root nearer to d without forming the far root twice
    if abs(mu1 - d) <= abs(mu2 - d):
        return mu1
    return mu2


@nb.njit(cache=True, nogil=True)
def _hessenberg_qr_eigs(h, eps, max_sweeps):
    """Eigenvalues of upper Hessenberg h (overwritten). Returns (eigs, ok)."""
    n = h.shape[0]
    eigs = np.empty(n, dtype=np.complex128)
    hi = n - 1
    total = 0
    since_deflation = 0
    cs = np.empty(n, dtype=np.float64)
    sn = np.empty(n, dtype=np.complex128)
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        # locate the active window [lo, hi]
        lo = hi
        while lo > 0:
            scale = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if scale == 0.0:
                scale = 1.0
            if abs(h[lo, lo - 1]) <= eps * scale:
                h[lo, lo - 1] = 0.0j
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if total >= max_sweeps:
            return eigs, False
        total += 1
        since_deflation += 1
        if since_deflation % 10 == 0:
            # exceptional shift to break cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1.0 + 1.0j)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        for i in range(lo, hi + 1):
            h[i, i] -= mu
        # QR: rotations zero the subdiagonal of the window
        for kk in range(lo, hi):
            x = h[kk, kk]
            y = h[kk + 1, kk]
            ax = abs(x)
            r = np.sqrt(ax * ax + abs(y) ** 2)
            if r == 0.0:
                c = 1.0
                s = 0.0j
            elif ax == 0.0:
                c = 0.0
                s = np.conj(y) / abs(y)
            else:
                alpha = x / ax
                c = ax / r
                s = alpha * np.conj(y) / r
            cs[kk] = c
            sn[kk] = s
            for j in range(kk, hi + 1):
                t1 = h[kk, j]
                t2 = h[kk + 1, j]
                h[kk, j] = c * t1 + s * t2
                h[kk + 1, j] = -np.conj(s) * t1 + c * t2
        # RQ: apply the adjoint rotations from the right
        for kk in range(lo, hi):
            c = cs[kk]
            s = sn[kk]
            top = min(kk + 2, hi)
            for i in range(lo, top + 1):
                t1 = h[i, kk]
                t2 = h[i, kk + 1]
                h[i, kk] = c * t1 + np.conj(s) * t2
                h[i, kk + 1] = -s * t1 + c * t2
        for i in range(lo, hi + 1):
            h[i, i] += mu
    return eigs, True


def hessenberg(m: np.ndarray) -> np.ndarray:
    """Unitarily similar upper Hessenberg form of a square complex matrix."""
    h = np.array(m, dtype=np.complex128, order="C", copy=True)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    _hessenberg_inplace(h)
    return h


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square complex matrix (no particular order)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError("matrix must be square with dimension >= 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    h = hessenberg(m)
    eigs, ok = _hessenberg_qr_eigs(h, DEFLATION_EPS, MAX_SWEEPS_PER_DIM * m.shape[0])
    if not ok:
        raise EigenConvergenceError(
            f"shifted QR did not converge within {MAX_SWEEPS_PER_DIM * m.shape[0]} sweeps"
        )
    return eigs


def spectral_radius(m: np.ndarray) -> float:
    return float(np.max(np.abs(eigenvalues(m))))
