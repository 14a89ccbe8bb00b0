"""Overcrowding: at least ``m`` points of the infinite ensemble in the disk of radius ``r``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DomainError
from .hole import DEFAULT_TOL, hole_infinite_log, log_inside_bound, log_tail_sum, truncation_rank
from .sampler import binomial_estimate, count_events, sample_log_radii

MAX_MC_M = 6


def _check(n: int, r: float, m: int) -> float:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    r = float(r)
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r!r}")
    return r


def overcrowd_lower_log(n: int, r: float, m: int) -> float:
    """Lower bound ``sum_{k<=m} n k ln(min(r^(2/n)/k, 1) / 2)``.

    The first ``m`` radii all inside the disk is one way to get ``m`` points;
    each ``(R_k)^2`` is a product of ``n`` sums of ``k`` unit exponentials and
    ``P{xi < x} >= min(x, 1)/2`` for a unit exponential.
    """
    rho = _check(n, r, m) ** (2.0 / n)
    return sum(n * k * math.log(min(rho / k, 1.0) / 2.0) for k in range(1, m + 1))


def overcrowd_upper_log(n: int, r: float, m: int, tol: float = DEFAULT_TOL) -> float:
    """Upper bound on ``ln P{#points in disk >= m}``.

    For ``m' >= 2`` the bound is ``ln[m'^(2m') prod_{k<=m'} b_k + sum_{k>m'^2} b_k]``
    with ``b_k`` the Markov bound from :func:`ginibre.hole.log_inside_bound`;
    for ``m' = 1`` the complement of the hole probability is exact.  Since
    the event shrinks as ``m`` grows, the minimum over ``m' <= m`` is
    returned; it is nonincreasing in ``m`` and never above 0.
    """
    r = _check(n, r, m)
    hole, _ = hole_infinite_log(n, r, tol)
    best = math.log(-math.expm1(hole.log_value))
    inside = log_inside_bound(1, n, r)
    for j in range(2, m + 1):
        inside += log_inside_bound(j, n, r)
        head = 2 * j * math.log(j) + inside
        best = min(best, float(np.logaddexp(head, log_tail_sum(j * j + 1, n, r))))
    return best + 0.0  # no negative zero


def overcrowd_mc(n: int, r: float, m: int, samples: int, seed: int, threads: int = 1,
                 tol: float = DEFAULT_TOL):
    """Monte Carlo ``P{#points >= m}`` with a 99% half-width.

    Radii beyond the hole-module truncation rank ``K(r)`` are not sampled;
    together they fall inside the disk with probability below ``tol``.
    """
    r = _check(n, r, m)
    if m > MAX_MC_M:
        raise DomainError(f"overcrowd_mc is limited to m <= {MAX_MC_M}")
    K, _ = truncation_rank(n, r, tol)
    log_r2 = 2.0 * math.log(r)

    def hits(rng, size):
        inside = np.count_nonzero(sample_log_radii(n, K, size, rng) < log_r2, axis=1)
        return np.count_nonzero(inside >= m)

    return binomial_estimate(count_events(hits, samples, seed, threads), samples)


def sum_k_log_k(m: int):
    """``(sum_{k<=m} k ln k, (m(m+1)/2) ln m - m^2/4)``."""
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    k = np.arange(1, m + 1, dtype=float)
    exact = math.fsum(k * np.log(k))
    return exact, 0.5 * m * (m + 1) * math.log(m) - 0.25 * m * m


@dataclass
class OvercrowdReport:
    n: int
    r: float
    m: int
    lower_log: float
    upper_log: float
    mc_estimate: Optional[float] = None
    mc_halfwidth: Optional[float] = None

    @property
    def normalized(self):
        """``(-upper_log, -lower_log)`` over ``(1/2) n m^2 ln m``; undefined at ``m = 1``."""
        if self.m < 2:
            return (math.nan, math.nan)
        scale = 0.5 * self.n * self.m**2 * math.log(self.m)
        return (-self.upper_log / scale, -self.lower_log / scale)


def overcrowd_report(n: int, r: float, m: int, mc_samples: Optional[int] = None, seed: int = 0,
                     threads: int = 1, tol: float = DEFAULT_TOL) -> OvercrowdReport:
    report = OvercrowdReport(n, r, m, overcrowd_lower_log(n, r, m), overcrowd_upper_log(n, r, m, tol))
    if mc_samples:
        report.mc_estimate, report.mc_halfwidth = overcrowd_mc(n, r, m, mc_samples, seed, threads, tol)
    return report
