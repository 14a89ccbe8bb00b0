"""Hole probabilities: no eigenvalue in the centred disk of radius ``r``.

By the radial decomposition the hole probability is the product over ranks
``k`` of ``P{(R_k)^2 > r^2}``, which is what every routine here evaluates or
bounds.  All values are natural logs.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import AccuracyError, DomainError, EnsembleParams, LogProb, clamp_log
from .sampler import binomial_estimate, count_events, sample_log_radii
from .special_fn import DEFAULT_CONFIG, MeijerGConfig, log_gamma, survival_asympt_log, survival_log

MAX_RANK = 10**6
DEFAULT_TOL = 1e-12


def _check_r(r: float) -> float:
    r = float(r)
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r!r}")
    return r


def hole_exact_log(params: EnsembleParams, r: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> LogProb:
    """Exact log hole probability for finite ``N``: ``sum_k ln P{(R_k)^2 > r^2}``."""
    N = params.require_finite()
    r = _check_r(r)
    total = 0.0
    err = 0.0
    for k in range(1, N + 1):
        s = survival_log(k, params.n, r * r, cfg)
        total += s.log_value
        err += s.est_error
    return LogProb(clamp_log(total), err)


def hole_asympt_log(params: EnsembleParams, r: float) -> float:
    """Leading large-``r`` log hole probability for finite ``N``.

    ``ln[(2 pi)^((n-1)N/2) n^(-N/2) / prod Gamma(k)^n] - n N r^(2/n) + N (N - 1/n) ln r``.
    """
    N = params.require_finite()
    n = params.n
    r = _check_r(r)
    if r ** (2.0 / n) <= N:
        warnings.warn(f"r^(2/n) <= N = {N}: outside the asymptotic regime", stacklevel=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return sum(survival_asympt_log(k, n, r) for k in range(1, N + 1))


def log_inside_bound(k: int, n: int, r: float) -> float:
    """Log of the Markov bound ``P{(R_k)^2 < r^2} <= exp{(k-1/2)(n + ln r^2 - n ln k) + n/6}``."""
    return (k - 0.5) * (n + 2.0 * math.log(r) - n * math.log(k)) + n / 6.0


def log_tail_sum(first: int, n: int, r: float, rel: float = 1e-30) -> float:
    """``ln sum_{k >= first} exp(log_inside_bound(k))``, summed until terms are negligible.

    Only meaningful past the maximum of the bound, ``k > e r^(2/n)``.
    """
    rho = r ** (2.0 / n)
    k = first
    acc = -math.inf
    stop = math.log(rel)
    while True:
        term = log_inside_bound(k, n, r)
        acc = np.logaddexp(acc, term)
        if k > math.e * rho and term - acc < stop:
            return float(acc)
        k += 1
        if k > MAX_RANK + 10**5:
            return float(acc)


def truncation_rank(n: int, r: float, tol: float = DEFAULT_TOL):
    """Rank ``K`` past which the remaining factors move the log product by less than ``tol``.

    Returns ``(K, tail)`` where ``tail = 2 sum_{k>K} bound_k`` bounds
    ``-sum_{k>K} ln P{(R_k)^2 > r^2}`` (``ln(1-x) >= -2x`` for ``x <= 1/2``).
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    rho = r ** (2.0 / n)
    K = max(1, math.ceil(math.e * rho))
    log_tol = math.log(tol)
    while True:
        if K > MAX_RANK:
            raise AccuracyError(f"truncation rank exceeds {MAX_RANK}", est_error=math.inf)
        if log_inside_bound(K + 1, n, r) <= math.log(0.5):
            log_tail = math.log(2.0) + log_tail_sum(K + 1, n, r)
            if log_tail < log_tol:
                return K, math.exp(log_tail)
        K += max(1, K // 20)


def hole_infinite_log(n: int, r: float, tol: float = DEFAULT_TOL, cfg: MeijerGConfig = DEFAULT_CONFIG):
    """Log hole probability of the infinite ensemble.

    Returns ``(LogProb, K)``.  The value is the truncated sum over ``k <= K``
    minus the tail bound, so the true log lies in ``[value, value + tail]``.
    """
    r = _check_r(r)
    K, tail = truncation_rank(n, r, tol)
    total = 0.0
    err = 0.0
    for k in range(1, K + 1):
        s = survival_log(k, n, r * r, cfg)
        total += s.log_value
        err += s.est_error
    return LogProb(clamp_log(total - tail), err + tail), K


def hole_upper_log(n: int, r: float) -> float:
    """Markov/Stirling upper bound on the infinite-ensemble log hole probability.

    Sums ``-n(rho-k) + (n/2) ln(k/rho) - n k ln(k/rho) + n/(12 rho)`` over
    ``k <= floor(rho)``, ``rho = r^(2/n)``; every omitted factor is at most 1.
    """
    rho = _check_r(r) ** (2.0 / n)
    total = 0.0
    for k in range(1, math.floor(rho) + 1):
        q = math.log(k / rho)
        total += -n * (rho - k) + 0.5 * n * q - n * k * q + n / (12.0 * rho)
    return total


def hole_bounds_infinite(n: int, r: float, tol: float = DEFAULT_TOL, cfg: MeijerGConfig = DEFAULT_CONFIG):
    """``(lower_log, upper_log)`` bracketing the infinite-ensemble log hole probability.

    The lower bound raises the classical (``n = 1``) hole probability at
    radius ``r^(1/n)`` to the power ``n``: ``(R_k^(n))^2`` is distributed as
    a product of ``n`` copies of ``(R_k^(1))^2`` and each exceeding
    ``r^(2/n)`` suffices.
    """
    r = _check_r(r)
    if r ** (2.0 / n) < 2.0:
        warnings.warn("r^(2/n) < 2: bounds hold but are far from tight", stacklevel=2)
    classical, _ = hole_infinite_log(1, r ** (1.0 / n), tol, cfg)
    return n * classical.log_value, hole_upper_log(n, r)


def hole_mc(params: EnsembleParams, r: float, samples: int, seed: int, threads: int = 1):
    """Monte Carlo hole probability from sampled radii: ``(estimate, 99% half-width)``."""
    N = params.require_finite()
    r = _check_r(r)
    if samples < 100:
        raise DomainError("hole_mc needs at least 100 samples")
    log_r2 = 2.0 * math.log(r)

    def hits(rng, size):
        logs = sample_log_radii(params.n, N, size, rng)
        return np.count_nonzero(logs.min(axis=1) > log_r2)

    return binomial_estimate(count_events(hits, samples, seed, threads), samples)


@dataclass
class HoleReport:
    params: EnsembleParams
    r: float
    exact_log: LogProb
    asympt_log: Optional[float] = None
    lower_log: Optional[float] = None
    upper_log: Optional[float] = None
    mc_estimate: Optional[float] = None
    mc_halfwidth: Optional[float] = None
    truncation_rank: Optional[int] = None


def hole_report(params: EnsembleParams, r: float, mc_samples: Optional[int] = None,
                seed: int = 0, tol: float = DEFAULT_TOL, threads: int = 1,
                cfg: MeijerGConfig = DEFAULT_CONFIG) -> HoleReport:
    if params.finite:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            asympt = hole_asympt_log(params, r)
        report = HoleReport(params, r, hole_exact_log(params, r, cfg), asympt_log=asympt)
        if mc_samples:
            report.mc_estimate, report.mc_halfwidth = hole_mc(params, r, mc_samples, seed, threads)
        return report
    exact, K = hole_infinite_log(params.n, r, tol, cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lower, upper = hole_bounds_infinite(params.n, r, tol, cfg)
    return HoleReport(params, r, exact, lower_log=lower, upper_log=upper, truncation_rank=K)
