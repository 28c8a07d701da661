"""Monte Carlo samplers for the spectral radius and goodness-of-fit harness.

Two independent routes to the same law:

* ``beta``: max over j of sqrt(Beta(p-j+1, k)) draws, the order-statistic
  representation;
* ``matrix``: largest eigenvalue modulus of a truncated Haar unitary.

Reproducibility. Work is cut into fixed chunks of ``CHUNK_SIZE`` draws and
chunk ``c`` of spec ``s`` owns the generator ``PCG64(hash64(hash64(seed, s), c))``.
Because the chunking does not depend on the worker count, results are
bit-identical for any number of workers; workers only change wall time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .limit_laws import NormalizedLaw, law_for_theorem
from .order_stats import TruncationSpec, exact_radius_cdf
from .rmt import EigenConvergenceError, haar_unitary, spectral_radius, truncate

__all__ = [
    "CHUNK_SIZE",
    "KS_CRITICAL",
    "FailureBudgetExceeded",
    "EmpiricalSample",
    "GofReport",
    "ExperimentConfig",
    "hash64",
    "chunk_rng",
    "sample_gamma",
    "sample_beta",
    "sample_radius_order_stat",
    "sample_radius_matrix",
    "draw_radii",
    "ks_statistic",
    "gof_report",
    "run_experiment",
]

CHUNK_SIZE = 1000
KS_CRITICAL = 1.95  # Kolmogorov distribution, alpha = 0.001
MATRIX_DIM_CAP = 256
FAILURE_BUDGET = 1e-3
_BLOCK_ELEMS = 1 << 20
_MASK64 = (1 << 64) - 1


class FailureBudgetExceeded(RuntimeError):
    """More than the allowed fraction of matrix draws failed to converge."""


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash64(master: int, index: int) -> int:
    """SplitMix64-based mix of a master seed and a stream index."""
    return _splitmix64((master & _MASK64) ^ _splitmix64(index & _MASK64))


def chunk_rng(seed: int, spec_index: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(hash64(hash64(seed, spec_index), chunk)))


@dataclass(frozen=True)
class EmpiricalSample:
    values: np.ndarray
    path: str
    seed: int

    def __post_init__(self):
        vals = np.sort(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)

    @property
    def count(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class GofReport:
    ks_statistic: float
    sample_count: int
    reference: str
    pass_threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "reference": self.reference,
            "ks_statistic": self.ks_statistic,
            "sample_count": self.sample_count,
            "pass_threshold": self.pass_threshold,
            "passed": self.passed,
        }


@dataclass
class ExperimentConfig:
    specs: Sequence[TruncationSpec]
    path: str = "beta"
    M: int = 1000
    seed: int = 0
    workers: int = 1
    # "exact" or a theorem number (1-4) for the normalized limit law
    target: str | int = "exact"
    grid: tuple[float, float, int] | None = field(default=None)

    def __post_init__(self):
        if self.path not in ("beta", "matrix"):
            raise ValueError(f"unknown sampler path {self.path!r}")
        if self.M < 0:
            raise ValueError("sample count must be >= 0")
        if self.workers < 1:
            raise ValueError("need at least one worker")
        if self.target != "exact" and self.target not in (1, 2, 3, 4):
            raise ValueError(f"unknown comparison target {self.target!r}")


def sample_gamma(shape, rng: np.random.Generator, size=None) -> np.ndarray:
    """Gamma(shape, 1) draws by Marsaglia-Tsang squeeze/rejection.

    Shapes below 1 are boosted: ``G(a) = G(a + 1) * U**(1/a)``.
    """
    shape = np.asarray(shape, dtype=float)
    if np.any(~(shape > 0)):
        raise ValueError("gamma shape must be positive")
    size = shape.shape if size is None else size
    alpha = np.broadcast_to(shape, size).ravel()
    boost = alpha < 1.0
    work = np.where(boost, alpha + 1.0, alpha)
    d = work - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(work.size)
    pending = np.arange(work.size)
    while pending.size:
        dd, cc = d[pending], c[pending]
        x = rng.standard_normal(pending.size)
        v = 1.0 + cc * x
        u = rng.random(pending.size)
        ok = v > 0
        v = np.where(ok, v * v * v, 1.0)
        x2 = x * x
        with np.errstate(divide="ignore"):
            accept = ok & (
                (u < 1.0 - 0.0331 * x2 * x2)
                | (np.log(u) < 0.5 * x2 + dd * (1.0 - v + np.log(v)))
            )
        out[pending[accept]] = dd[accept] * v[accept]
        pending = pending[~accept]
    if boost.any():
        u = rng.random(int(boost.sum()))
        out[boost] *= np.exp(np.log(u) / alpha[boost])
    return out.reshape(size)


def sample_beta(a, b, rng: np.random.Generator, size=None) -> np.ndarray:
    """Beta(a, b) draws as G_a / (G_a + G_b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    size = np.broadcast_shapes(a.shape, b.shape) if size is None else size
    ga = sample_gamma(a, rng, size)
    gb = sample_gamma(b, rng, size)
    return ga / (ga + gb)


def sample_radius_order_stat(spec: TruncationSpec, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Spectral-radius draws from the product-of-Betas representation."""
    best = np.zeros(size)
    # draw factors in blocks of j so memory stays near _BLOCK_ELEMS doubles
    step = max(1, _BLOCK_ELEMS // max(size, 1))
    for j_lo in range(1, spec.p + 1, step):
        j = np.arange(j_lo, min(spec.p, j_lo + step - 1) + 1)
        shapes = (spec.p - j + 1.0)[:, None]
        draws = sample_beta(shapes, float(spec.k), rng, (j.size, size))
        np.maximum(best, draws.max(axis=0), out=best)
    return np.sqrt(best)


def _matrix_draws(spec: TruncationSpec, rng: np.random.Generator, count: int):
    out = np.empty(count)
    failures = 0
    filled = 0
    budget = max(1, math.floor(FAILURE_BUDGET * count))
    while filled < count:
        try:
            out[filled] = spectral_radius(truncate(haar_unitary(spec.n, rng), spec.p))
            filled += 1
        except EigenConvergenceError:
            failures += 1
            if failures > budget:
                raise FailureBudgetExceeded(
                    f"{failures} eigensolver failures in {filled + failures} draws for n={spec.n}, p={spec.p}"
                ) from None
    return out, failures


def sample_radius_matrix(
    spec: TruncationSpec,
    rng: np.random.Generator,
    size: int = 1,
    max_dim: int = MATRIX_DIM_CAP,
) -> np.ndarray:
    """Spectral radius of truncated Haar unitaries; failed draws are redrawn within budget."""
    if spec.n > max_dim:
        raise ValueError(f"matrix path limited to n <= {max_dim} (got n={spec.n})")
    values, _ = _matrix_draws(spec, rng, size)
    return values


def _draw_chunk(spec, path, seed, spec_index, chunk, count, max_dim):
    rng = chunk_rng(seed, spec_index, chunk)
    if path == "beta":
        return sample_radius_order_stat(spec, rng, count)
    return sample_radius_matrix(spec, rng, count, max_dim=max_dim)


def draw_radii(
    spec: TruncationSpec,
    path: str,
    M: int,
    seed: int,
    workers: int = 1,
    spec_index: int = 0,
    max_dim: int = MATRIX_DIM_CAP,
) -> np.ndarray:
    """M draws in generation order; identical for every worker count."""
    if path not in ("beta", "matrix"):
        raise ValueError(f"unknown sampler path {path!r}")
    if path == "matrix" and spec.n > max_dim:
        raise ValueError(f"matrix path limited to n <= {max_dim} (got n={spec.n})")
    if M == 0:
        return np.empty(0)
    jobs = [
        (c, min(CHUNK_SIZE, M - c * CHUNK_SIZE)) for c in range(math.ceil(M / CHUNK_SIZE))
    ]

    def run(job):
        c, count = job
        return _draw_chunk(spec, path, seed, spec_index, c, count, max_dim)

    if workers == 1:
        parts = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    return np.concatenate(parts)


def ks_statistic(sample, reference_cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov distance ``sup |F_M - F|``.

    ``reference_cdf`` may be vectorized; scalar-only callables are mapped.
    """
    values = sample.values if isinstance(sample, EmpiricalSample) else np.sort(np.asarray(sample, dtype=float))
    m = values.size
    if m == 0:
        raise ValueError("KS statistic needs a nonempty sample")
    try:
        f = np.asarray(reference_cdf(values), dtype=float)
        if f.shape != values.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([reference_cdf(float(v)) for v in values])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def reference_for(spec: TruncationSpec, target) -> tuple[Callable, str]:
    """CDF of the radius under the comparison target, plus a description."""
    if target == "exact":
        return (lambda r: exact_radius_cdf(spec, np.clip(r, 0.0, 1.0))), f"exact(n={spec.n},p={spec.p})"
    law: NormalizedLaw = law_for_theorem(spec, int(target))
    desc = f"theorem{law.source_theorem}:{law.limit}(n={spec.n},p={spec.p})"
    return (lambda r: law.limit.cdf((np.asarray(r) - law.A) / law.B)), desc


def gof_report(sample: EmpiricalSample, reference_cdf: Callable, reference: str) -> GofReport:
    d = ks_statistic(sample, reference_cdf)
    threshold = KS_CRITICAL / math.sqrt(sample.count)
    return GofReport(d, sample.count, reference, threshold, d <= threshold)


def run_experiment(config: ExperimentConfig, max_dim: int = MATRIX_DIM_CAP) -> list[GofReport]:
    """One KS report per spec in the config, in spec order."""
    if config.M == 0:
        return []
    reports = []
    for s_idx, spec in enumerate(config.specs):
        # a failing chunk propagates out of the pool and aborts the whole run
        radii = draw_radii(
            spec, config.path, config.M, config.seed, config.workers, spec_index=s_idx, max_dim=max_dim
        )
        sample = EmpiricalSample(radii, config.path, config.seed)
        cdf, desc = reference_for(spec, config.target)
        reports.append(gof_report(sample, cdf, desc))
    return reports
