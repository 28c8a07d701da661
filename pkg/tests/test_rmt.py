import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcue.montecarlo import KS_CRITICAL, ks_statistic
from tcue.rmt import (
    EigenConvergenceError,
    eigenvalues,
    haar_unitary,
    hessenberg,
    sample_complex_ginibre,
    spectral_radius,
    truncate,
)
from tcue import rmt


def match_sets(got, want, tol):
    # greedy nearest matching; fine for well-separated oracle roots
    got = list(got)
    for w in want:
        i = int(np.argmin([abs(g - w) for g in got]))
        assert abs(got[i] - w) <= tol, (w, got)
        got.pop(i)


def companion(coeffs):
    """Companion matrix of the monic polynomial z^m + c_{m-1} z^{m-1} + ... + c_0."""
    m = len(coeffs)
    c = np.zeros((m, m), dtype=complex)
    c[1:, :-1] = np.eye(m - 1)
    c[:, -1] = -np.asarray(coeffs)
    return c


# --- Ginibre / Haar ----------------------------------------------------------

def test_ginibre_reproducible():
    a = sample_complex_ginibre(1, np.random.default_rng(9))
    b = sample_complex_ginibre(1, np.random.default_rng(9))
    assert a.shape == (1, 1) and a[0, 0] == b[0, 0]


def test_ginibre_moments():
    g = sample_complex_ginibre(316, np.random.default_rng(1)).ravel()[:100_000]
    assert abs(g.real.mean()) < 0.02 and abs(g.imag.mean()) < 0.02
    assert np.mean(np.abs(g) ** 2) == pytest.approx(2.0, abs=0.03)


def test_ginibre_rejects_zero_dim():
    with pytest.raises(ValueError):
        sample_complex_ginibre(0, np.random.default_rng(0))


def test_haar_n1_is_phase():
    rng = np.random.default_rng(2)
    for _ in range(20):
        assert abs(abs(haar_unitary(1, rng)[0, 0]) - 1.0) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 5, 16, 64, 256])
def test_haar_unitarity(n):
    rng = np.random.default_rng(n)
    for _ in range(3 if n < 256 else 1):
        u = haar_unitary(n, rng)
        assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-10


def test_haar_n2_corner_uniform():
    rng = np.random.default_rng(77)
    m = 10_000
    vals = np.array([abs(haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(m)])
    assert ks_statistic(vals, lambda x: np.clip(x, 0, 1)) < KS_CRITICAL / math.sqrt(m)


def test_haar_eigen_angles_uniform():
    rng = np.random.default_rng(78)
    angles = np.concatenate([np.angle(np.linalg.eigvals(haar_unitary(8, rng))) for _ in range(1500)])
    # eigenvalues of one matrix repel, so use one angle per matrix for an i.i.d. sample
    first = angles[::8]
    cdf = lambda x: (np.asarray(x) + np.pi) / (2 * np.pi)
    assert ks_statistic(first, cdf) < KS_CRITICAL / math.sqrt(first.size)


def test_haar_degenerate_draw_errors(monkeypatch):
    monkeypatch.setattr(rmt, "sample_complex_ginibre", lambda n, rng: np.zeros((n, n), dtype=complex))
    with pytest.raises(RuntimeError):
        rmt.haar_unitary(3, np.random.default_rng(0))


# --- truncation --------------------------------------------------------------

def test_truncate_identity():
    assert np.array_equal(truncate(np.eye(3, dtype=complex), 2), np.eye(2))


@pytest.mark.parametrize("p", [3, 0, 4])
def test_truncate_domain(p):
    with pytest.raises(ValueError):
        truncate(np.eye(3, dtype=complex), p)


def test_truncation_is_contraction():
    rng = np.random.default_rng(3)
    for n, p in [(8, 4), (32, 24), (64, 60)]:
        a = truncate(haar_unitary(n, rng), p)
        assert np.linalg.svd(a, compute_uv=False).max() <= 1 + 1e-10


# --- eigensolver -------------------------------------------------------------

def test_eig_diagonal():
    match_sets(eigenvalues(np.diag([2, 3j, -1])), [2, 3j, -1], 1e-12)


def test_eig_rotation():
    match_sets(eigenvalues(np.array([[0, 1], [-1, 0]], dtype=complex)), [1j, -1j], 1e-12)


@pytest.mark.parametrize("m", range(1, 9))
def test_eig_roots_of_unity(m):
    c = companion([-1] + [0] * (m - 1))
    roots = [cmath.exp(2j * math.pi * r / m) for r in range(m)]
    match_sets(eigenvalues(c), roots, 1e-8)


def test_eig_1x1_and_zero():
    assert eigenvalues(np.array([[0.5 - 2j]]))[0] == 0.5 - 2j
    assert np.all(eigenvalues(np.zeros((4, 4))) == 0)


def test_eig_jordan_block():
    # defective matrix: eigenvalues are only determined to ~eps^(1/m)
    j = np.diag(np.full(4, 0.3 + 0.1j)) + np.diag(np.ones(3), 1)
    assert np.max(np.abs(eigenvalues(j) - (0.3 + 0.1j))) <= 1e-3


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_trace_and_determinant(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(100):
        m = sample_complex_ginibre(n, rng)
        ev = eigenvalues(m)
        assert ev.size == n
        tr = np.trace(m)
        assert abs(ev.sum() - tr) <= 1e-8 * (1 + abs(tr))
        sign, logdet = np.linalg.slogdet(m)
        prod_log = np.sum(np.log(np.abs(ev)))
        # compare modulus in log space and phase separately
        assert abs(prod_log - logdet) <= 1e-6
        phase = np.prod(ev / np.abs(ev))
        assert abs(phase - sign) <= 1e-6


def test_hermitian_input_gives_real_spectrum():
    rng = np.random.default_rng(8)
    for n in (3, 10, 40):
        g = sample_complex_ginibre(n, rng)
        h = (g + g.conj().T) / 2
        ev = eigenvalues(h)
        assert np.max(np.abs(ev.imag)) <= 1e-8
        assert np.sort(ev.real) == pytest.approx(np.linalg.eigvalsh(h), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 24), seed=st.integers(0, 2**32 - 1))
def test_eig_matches_reference(n, seed):
    m = sample_complex_ginibre(n, np.random.default_rng(seed))
    ref = np.linalg.eigvals(m)
    match_sets(eigenvalues(m), ref, 1e-8 * max(1.0, np.abs(ref).max()))


def test_hessenberg_form_and_similarity():
    rng = np.random.default_rng(4)
    m = sample_complex_ginibre(12, rng)
    h = hessenberg(m)
    assert np.all(np.abs(np.tril(h, -2)) == 0)
    assert np.trace(h) == pytest.approx(np.trace(m), abs=1e-10)
    assert np.linalg.norm(h) == pytest.approx(np.linalg.norm(m), rel=1e-12)


@pytest.mark.parametrize(
    "bad", [np.zeros((2, 3)), np.zeros((0, 0)), np.array([[np.nan, 0], [0, 1]]), np.array([[np.inf]])]
)
def test_eig_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        eigenvalues(bad)


def test_eig_nonconvergence_is_reported(monkeypatch):
    monkeypatch.setattr(rmt, "MAX_SWEEPS_PER_DIM", 0)
    m = sample_complex_ginibre(6, np.random.default_rng(0))
    with pytest.raises(EigenConvergenceError):
        rmt.eigenvalues(m)


# --- spectral radius ---------------------------------------------------------

def test_spectral_radius_examples():
    assert spectral_radius(np.eye(5, dtype=complex)) == pytest.approx(1.0, abs=1e-14)
    assert spectral_radius(np.diag([0.2, 0.9j])) == pytest.approx(0.9, abs=1e-15)


def test_truncated_radius_below_one():
    rng = np.random.default_rng(6)
    for n, p in [(4, 3), (16, 8), (64, 63), (100, 50)]:
        for _ in range(20):
            assert spectral_radius(truncate(haar_unitary(n, rng), p)) <= 1 + 1e-8
