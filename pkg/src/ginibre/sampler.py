"""Monte Carlo for the product ensemble: Gamma-product radii and explicit matrix products.

Random streams are ``numpy`` generators on the counter-based Philox bit
generator keyed by ``(seed, stream)``, so substream ``s`` of a master seed is
reproducible regardless of how work is scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import DomainError, EigenSolverError, EnsembleParams

MAX_EIGEN_SIZE = 64
_SEED_MASK = (1 << 64) - 1


def make_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for substream ``stream`` of master ``seed``."""
    seq = np.random.SeedSequence([int(seed) & _SEED_MASK, int(stream)])
    return np.random.Generator(np.random.Philox(seq))


def sample_gamma_array(k: float, size, rng: np.random.Generator) -> np.ndarray:
    """``Gamma(k, 1)`` variates by Marsaglia-Tsang squeeze/rejection (``k >= 1``).

    Vectorised: proposals are drawn in blocks and rejected slots are refilled
    until every entry is accepted.
    """
    if not k >= 1:
        raise DomainError(f"shape must be >= 1, got {k!r}")
    out = np.empty(size, dtype=float)
    flat = out.reshape(-1)
    d = k - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    todo = np.arange(flat.size)
    while todo.size:
        m = todo.size
        x = rng.standard_normal(m)
        u = rng.random(m)
        v = 1.0 + c * x
        ok = v > 0
        v = np.where(ok, v * v * v, 1.0)
        x2 = x * x
        accept = ok & (
            (u < 1.0 - 0.0331 * x2 * x2)
            | (np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(v)))
        )
        flat[todo[accept]] = d * v[accept]
        todo = todo[~accept]
    return out


def sample_gamma(k: int, rng: np.random.Generator) -> float:
    """One ``Gamma(k, 1)`` draw."""
    return float(sample_gamma_array(k, 1, rng)[0])


def sample_gamma_exponential_sum(k: int, size, rng: np.random.Generator) -> np.ndarray:
    """Reference path: ``Gamma(k, 1)`` as a sum of ``k`` unit exponentials (``k <= 16``)."""
    if not 1 <= k <= 16:
        raise DomainError("the exponential-sum path is limited to 1 <= k <= 16")
    shape = (size,) if np.isscalar(size) else tuple(size)
    return -np.log(rng.random(shape + (k,))).sum(axis=-1)


@dataclass
class RadiiSample:
    """``count`` independent draws of the squared radii ``(R_1^2, ..., R_N^2)``.

    ``batch[i, k-1]`` is the rank-``k`` squared radius of draw ``i``.
    """

    params: EnsembleParams
    seed: int
    batch: np.ndarray
    stream: int = 0

    @property
    def count(self) -> int:
        return self.batch.shape[0]


def sample_log_radii(n: int, N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``ln (R_k)^2`` for ``k = 1..N``, each a sum of ``n`` log-Gamma(k) draws."""
    out = np.empty((count, N))
    for k in range(1, N + 1):
        out[:, k - 1] = np.log(sample_gamma_array(k, (count, n), rng)).sum(axis=1)
    return out


def sample_radii(params: EnsembleParams, count: int, seed: int, stream: int = 0) -> RadiiSample:
    """Draw squared radii: ``(R_k)^2`` is a product of ``n`` independent ``Gamma(k, 1)``."""
    N = params.require_finite()
    if count < 1:
        raise DomainError("count must be >= 1")
    rng = make_stream(seed, stream)
    batch = np.exp(sample_log_radii(params.n, N, count, rng))
    return RadiiSample(params, int(seed), batch, stream)


@dataclass
class ScaledMatrix:
    """Matrix ``entries * exp(log_scale)`` with ``max |entry|`` kept in ``[1/2, 2]``."""

    entries: np.ndarray
    log_scale: float = 0.0
    seed: Optional[int] = field(default=None, compare=False)

    def dense(self) -> np.ndarray:
        return self.entries * math.exp(self.log_scale)


def complex_ginibre(N: int, rng: np.random.Generator) -> np.ndarray:
    """``N x N`` standard complex Gaussian matrix (``E|x|^2 = 1``)."""
    return (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) * math.sqrt(0.5)


def _rescale(a: np.ndarray):
    peak = float(np.max(np.abs(a)))
    if peak == 0.0:
        return a, 0.0
    e = round(math.log2(peak))  # power-of-two scaling is exact
    return np.ldexp(a.real, -e) + 1j * np.ldexp(a.imag, -e), e * math.log(2.0)


def sample_product_matrix(params: EnsembleParams, rng: np.random.Generator, seed=None) -> ScaledMatrix:
    """Product ``X_1 ... X_n`` of independent Ginibre matrices, rescaled after each factor."""
    N = params.require_finite()
    prod, log_scale = _rescale(complex_ginibre(N, rng))
    for _ in range(params.n - 1):
        prod, shift = _rescale(prod @ complex_ginibre(N, rng))
        log_scale += shift
    return ScaledMatrix(prod, log_scale, seed)


def eigen_moduli(mat: ScaledMatrix) -> np.ndarray:
    """Sorted moduli of the eigenvalues of the represented matrix.

    LAPACK's ``zgeev`` (balancing, Hessenberg reduction, shifted QR) does the work.
    """
    a = np.asarray(mat.entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("eigen_moduli needs a square matrix")
    if a.shape[0] > MAX_EIGEN_SIZE:
        raise DomainError(f"eigen_moduli limited to N <= {MAX_EIGEN_SIZE}")
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration failed: {exc}", seed=mat.seed) from exc
    return np.sort(np.abs(vals)) * math.exp(mat.log_scale)


def sample_eigen_moduli(params: EnsembleParams, draws: int, seed: int, stream: int = 0) -> np.ndarray:
    """``draws x N`` array of sorted eigenvalue moduli of independent products."""
    N = params.require_finite()
    rng = make_stream(seed, stream)
    out = np.empty((draws, N))
    for i in range(draws):
        out[i] = eigen_moduli(sample_product_matrix(params, rng, seed=(seed, stream, i)))
    return out


MC_CHUNK = 1 << 16
Z99 = 2.5758293035489004


def count_events(event_count, samples: int, seed: int, threads: int = 1) -> int:
    """Total of ``event_count(rng, size)`` over ``samples`` draws.

    Work is cut into fixed chunks of ``MC_CHUNK`` draws, chunk ``i`` using
    substream ``i``; the total therefore does not depend on ``threads``.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)

    def run(i):
        return int(event_count(make_stream(seed, i), sizes[i]))

    if threads <= 1 or len(sizes) == 1:
        return sum(run(i) for i in range(len(sizes)))
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(run, range(len(sizes))))


def binomial_estimate(hits: int, samples: int):
    """Point estimate and 99% normal-approximation half-width."""
    p = hits / samples
    return p, Z99 * math.sqrt(p * (1.0 - p) / samples)
