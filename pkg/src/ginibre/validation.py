"""Statistical cross-checks between the analytic results and simulation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DomainError, EnsembleParams
from .hole import hole_asympt_log, hole_exact_log, hole_mc
from .sampler import sample_eigen_moduli, sample_radii

MAX_THEOREM1_N = 16
MIN_THEOREM1_DRAWS = 500
PASS_LEVEL = 1e-3


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    sizes: tuple

    def passed(self, level: float = PASS_LEVEL) -> bool:
        return self.p_value > level


def kolmogorov_sf(x: float) -> float:
    """Survival function of the Kolmogorov distribution, ``P{K > x}``."""
    if x <= 0.05:
        return 1.0  # 1 - sf < 1e-200 here
    if x < 1.0:
        # theta-function form converges fast for small x
        s = sum(math.exp(-((2 * j - 1) ** 2) * math.pi**2 / (8.0 * x * x)) for j in range(1, 8))
        return max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / x * s)
    s = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * j * j * x * x)
        s += term if j % 2 else -term
        if term < 1e-300:
            break
    return min(1.0, max(0.0, 2.0 * s))


def gof_ks(sample_a: Sequence[float], sample_b: Sequence[float]) -> KSResult:
    """Two-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    b = np.sort(np.asarray(sample_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise DomainError("gof_ks needs two nonempty samples")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = a.size * b.size / (a.size + b.size)
    return KSResult(d, kolmogorov_sf(math.sqrt(en) * d), (int(a.size), int(b.size)))


def validate_theorem1(n: int, N: int, draws: int, seed: int, radii_n: Optional[int] = None) -> KSResult:
    """Compare pooled squared eigenvalue moduli of ``X_1 ... X_n`` with pooled Gamma-product radii.

    ``radii_n`` overrides the number of Gamma factors on the radii side
    (a deliberate mismatch serves as a negative control).
    """
    if not 1 <= N <= MAX_THEOREM1_N:
        raise DomainError(f"validate_theorem1 needs 1 <= N <= {MAX_THEOREM1_N}")
    if draws < MIN_THEOREM1_DRAWS:
        raise DomainError(f"validate_theorem1 needs at least {MIN_THEOREM1_DRAWS} draws")
    moduli = sample_eigen_moduli(EnsembleParams(n, N), draws, seed, stream=0)
    radii = sample_radii(EnsembleParams(radii_n or n, N), draws, seed, stream=1)
    return gof_ks((moduli**2).ravel(), radii.batch.ravel())


@dataclass(frozen=True)
class HoleMCCheck:
    exact: float
    estimate: float
    sigma: float

    @property
    def z(self) -> float:
        return abs(self.estimate - self.exact) / self.sigma if self.sigma > 0 else 0.0

    def passed(self, nsigma: float = 3.0) -> bool:
        return self.z <= nsigma


def validate_hole_mc(params: EnsembleParams, r: float, samples: int, seed: int, threads: int = 1) -> HoleMCCheck:
    """Exact hole probability against its Monte Carlo estimate (binomial sigma of the exact value)."""
    p = hole_exact_log(params, r).value
    est, _ = hole_mc(params, r, samples, seed, threads)
    return HoleMCCheck(p, est, math.sqrt(p * (1.0 - p) / samples))


def validate_hole_asympt(params: EnsembleParams, radii: Sequence[float]):
    """Gaps ``|exact - asymptotic|`` in log and their ratios across successive radii."""
    gaps = [abs(hole_exact_log(params, r).log_value - hole_asympt_log(params, r)) for r in radii]
    ratios = [g1 / g0 for g0, g1 in zip(gaps, gaps[1:])]
    return gaps, ratios
