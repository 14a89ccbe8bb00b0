r"""Meijer G-function families used by the product-Ginibre ensemble.

Two families are evaluated:

* the core function :math:`G^{n,0}_{0,n}(t\,|\,0,\dots,0)`, i.e. the density of a
  product of ``n`` independent unit exponentials, and
* the survival function of a product of ``n`` independent ``Gamma(k, 1)``
  variables, :math:`G^{n+1,0}_{1,n+1}(r^2\,|\,1;\,0,k,\dots,k)/\Gamma(k)^n`.

Each is available through two independent routes:

``*_series``
    the residue series at the order-``n`` poles ``s = -j`` of the Mellin-Barnes
    integrand.  The local Laurent data of :math:`(s+j)\Gamma(s)` are built from
    harmonic sums and zeta values, and the sum is carried out in extended
    working precision sized to the cancellation the alternating terms produce.
``*_mb``
    trapezoid quadrature of the Mellin-Barnes integral along a vertical line.
    The line is moved to the real saddle point of the integrand whenever that
    lies right of ``contour_offset``; the integrand is then Gaussian-like
    across the line and the oscillatory cancellation of a fixed contour is
    avoided.  Everything is handled in log space so results far below the
    double range keep a meaningful ``log_value``.
"""
from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sc
from scipy.optimize import brentq

from .core import AccuracyError, DomainError, LogProb, NonConvergenceError, clamp_log

EULER_GAMMA = 0.57721566490153286061

# Taylor data for log Gamma about 1 and 2:
#   lnG(1+e) = -gamma e + sum_{m>=2} (-1)^m zeta(m) e^m / m
#   lnG(2+e) = (1-gamma) e + sum_{m>=2} (-1)^m (zeta(m)-1) e^m / m
_ZETA_M = np.arange(2, 60, dtype=float)
_ZETA_VALS = sc.zeta(_ZETA_M, 1.0)
_ZETA_MINUS_ONE = sc.zetac(_ZETA_M)
_SIGNS = (-1.0) ** _ZETA_M
_NEAR_INTEGER = 0.25


def _taylor_lgamma(eps: float, coeffs: np.ndarray, linear: float) -> float:
    terms = _SIGNS * coeffs / _ZETA_M * eps ** _ZETA_M
    return linear * eps + math.fsum(terms[::-1])


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``.

    Away from the zeros of :math:`\\ln\\Gamma` at 1 and 2 this defers to
    ``scipy.special.gammaln``; within 0.25 of them a zeta-value Taylor series is
    used so that the relative error stays small as the value goes to zero.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    if abs(x - 1.0) < _NEAR_INTEGER:
        return _taylor_lgamma(x - 1.0, _ZETA_VALS, -EULER_GAMMA)
    if abs(x - 2.0) < _NEAR_INTEGER:
        return _taylor_lgamma(x - 2.0, _ZETA_MINUS_ONE, 1.0 - EULER_GAMMA)
    return float(sc.gammaln(x))


def digamma(x: float) -> float:
    """Digamma function :math:`\\psi(x)` for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"digamma needs x > 0, got {x!r}")
    return float(sc.digamma(x))


def polygamma(m: int, x: float) -> float:
    """Polygamma function of order ``m`` for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"polygamma needs x > 0, got {x!r}")
    return float(sc.polygamma(m, x))


@dataclass(frozen=True)
class MeijerGConfig:
    """Numerical controls for G-function evaluation.

    Attributes
    ----------
    contour_offset : float
        Smallest abscissa ``c`` of the vertical integration line.
    quad_step : float
        Initial trapezoid step, in units of the local width of the integrand
        across the line (``min(sigma, c)``).
    quad_halfwidth : float
        Initial truncation height, in the same units; extended automatically
        until the neglected tail is below tolerance.
    series_tol : float
        Relative tolerance.  Used by the residue-series stopping rule and as
        the target for the quadrature step-halving estimate.
    max_terms : int
        Hard cap on residue-series terms.
    """

    contour_offset: float = 0.5
    quad_step: float = 0.5
    quad_halfwidth: float = 8.0
    series_tol: float = 1e-14
    max_terms: int = 20000

    def __post_init__(self):
        if not self.contour_offset > 0:
            raise DomainError("contour_offset must be positive")
        if not self.quad_step > 0:
            raise DomainError("quad_step must be positive")
        if not self.quad_halfwidth > self.quad_step:
            raise DomainError("quad_halfwidth must exceed quad_step")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")
        if not 0.0 < self.series_tol < 1.0:
            raise DomainError("series_tol must lie in (0, 1)")


DEFAULT_CONFIG = MeijerGConfig()


@dataclass(frozen=True)
class GEvalResult:
    """Value of a G-function evaluation.

    ``est_error`` is relative to ``value``.  ``value`` may underflow to zero
    for very large arguments; ``log_value`` stays accurate.
    """

    value: float
    log_value: float
    est_error: float
    terms_used: int


# ---------------------------------------------------------------------------
# residue series
# ---------------------------------------------------------------------------

_local = threading.local()


def _context(dps: int) -> mpmath.ctx_mp.MPContext:
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


def _laurent_coefficients(ctx, n: int):
    """Yield ``(j, a_j, b_j)`` for the poles ``s = -j`` of ``Gamma(s)**n``.

    Near ``s = -j + e`` one has ``(s+j) Gamma(s) = (-1)^j / j! * exp(sum_m c_m e^m)``
    with ``c_1 = H_j - gamma`` and ``c_m = ((-1)^m zeta(m) + H_j^(m)) / m``.
    ``a_j = (-1)^(n j) / (j!)^n`` and ``b_j`` holds the coefficients of
    ``exp(n sum_m c_m e^m)`` up to order ``n - 1``.
    """
    zetas = [None, None] + [ctx.zeta(m) for m in range(2, n)]
    harmonic = [ctx.zero] * n  # harmonic[m] = H_j^(m)
    a = ctx.one
    j = 0
    while True:
        logc = [ctx.zero] * n
        if n > 1:
            logc[1] = n * (harmonic[1] - ctx.euler)
        for m in range(2, n):
            logc[m] = n * ((zetas[m] if m % 2 == 0 else -zetas[m]) + harmonic[m]) / m
        b = [ctx.one] + [ctx.zero] * (n - 1)
        for q in range(1, n):
            acc = ctx.zero
            for i in range(1, q + 1):
                acc += i * logc[i] * b[q - i]
            b[q] = acc / q
        yield j, a, b
        j += 1
        inv = ctx.one / j
        pw = inv
        for m in range(1, n):
            harmonic[m] += pw
            pw *= inv
        a = a / ctx.mpf(j) ** n
        if n % 2:
            a = -a


def _initial_dps(x: float, n: int) -> int:
    # alternating terms peak near j ~ x**(1/n) at size ~ exp(n x**(1/n)); the
    # sum is ~ exp(-n x**(1/n)), hence ~ 2 n x**(1/n) nats of cancellation
    lost = 2.0 * n * x ** (1.0 / n) / math.log(10.0) if x > 1 else 0.0
    return int(22 + lost)


def _run_series(x: float, n: int, cfg: MeijerGConfig, term_fn, dps: int):
    """Sum ``term_fn(ctx, j, a_j, b_j)`` with the three-small-terms stopping rule.

    Returns ``(sum, log10 cancellation, tail_rel, terms)``.
    """
    ctx = _context(dps)
    peak = x ** (1.0 / n)
    total = ctx.zero
    biggest = ctx.zero
    small_run = 0
    last = ctx.zero
    for j, a, b in _laurent_coefficients(ctx, n):
        if j >= cfg.max_terms:
            raise NonConvergenceError(
                f"residue series did not converge in {cfg.max_terms} terms (x={x}, n={n})",
                terms_used=j,
            )
        term = term_fn(ctx, j, a, b)
        total += term
        mag = abs(term)
        if mag > biggest:
            biggest = mag
        last = mag
        if j > peak and total != 0 and mag < cfg.series_tol * abs(total):
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
    if total == 0:
        lost = math.inf
        tail = math.inf
    else:
        lost = float(ctx.log10(biggest / abs(total))) if biggest > 0 else 0.0
        # terms decay at least geometrically with ratio x / (j+1)^n
        ratio = min(x / float(j + 1) ** n, 0.5)
        tail = float(last / abs(total)) * ratio / (1.0 - ratio)
    return total, lost, tail, j + 1


def _series(x: float, n: int, cfg: MeijerGConfig, term_fn, scale_fn=None):
    """Drive ``_run_series`` with working precision raised until it covers the cancellation."""
    dps = _initial_dps(x, n)
    for _ in range(6):
        total, lost, tail, terms = _run_series(x, n, cfg, term_fn, dps)
        if lost + 18 <= dps:
            break
        dps = int(lost + 26)
    else:  # pragma: no cover - precision ladder exhausted
        raise NonConvergenceError(f"cancellation too severe at x={x}, n={n}", terms_used=terms)
    ctx = _context(dps)
    if total <= 0:
        raise NonConvergenceError(
            f"residue series produced a non-positive value at x={x}, n={n}", terms_used=terms
        )
    log_total = ctx.log(total)
    if scale_fn is not None:
        log_total += scale_fn(ctx)
    rounding = 10.0 ** (lost - dps + 2)
    return float(log_total), tail + rounding, terms


def g_core_series(t: float, n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> GEvalResult:
    """Residue-series value of :math:`G^{n,0}_{0,n}(t\\,|\\,0,\\dots,0)`.

    Examples
    --------
    >>> round(g_core_series(1.0, 1).value, 12)
    0.367879441171
    """
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")

    state = {}

    def term(ctx, j, a, b):
        if j == 0:
            state["tj"] = ctx.one
            neg_log = -ctx.log(ctx.mpf(t))
            state["powers"] = powers = [ctx.one]
            for p in range(1, n):
                powers.append(powers[-1] * neg_log / p)
        else:
            state["tj"] *= t
        powers = state["powers"]
        poly = ctx.zero
        for p in range(n):
            poly += b[n - 1 - p] * powers[p]
        return a * state["tj"] * poly

    log_value, err, terms = _series(t, n, cfg, term)
    return GEvalResult(math.exp(log_value), log_value, err, terms)


# ---------------------------------------------------------------------------
# Mellin-Barnes quadrature
# ---------------------------------------------------------------------------

_MAX_HALVINGS = 12
_MAX_HEIGHT = 1e5


def _mb_integrate(logf, c: float, sigma: float, dist: float, decay: float, cfg: MeijerGConfig):
    """``(1/2 pi i) * integral of exp(logf(s)) ds`` over ``Re s = c``.

    ``logf`` is vectorised over complex arrays and conjugate-symmetric, so the
    integral equals ``(1/pi) * integral_0^inf Re f(c + i y) dy``.  ``sigma`` is
    the width of the integrand across the line, ``dist`` the distance from the
    line to the nearest pole and ``decay`` the asymptotic exponential decay
    rate of ``|f|`` in ``y``.

    Returns ``(log of the integral, relative error estimate, points used)``.
    """
    tol = cfg.series_tol
    base = float(np.real(logf(np.array([complex(c, 0.0)]))[0]))
    unit = min(sigma, dist)

    def g(y):
        return np.exp(logf(c + 1j * y) - base)

    # height: extend until the integrand is negligible
    height = cfg.quad_halfwidth * max(sigma, unit)
    cutoff = math.log(tol) - 12.0
    while True:
        edge = float(np.real(logf(np.array([complex(c, height)]))[0])) - base
        if edge < cutoff or height >= _MAX_HEIGHT:
            break
        height *= 1.5
    tail = math.exp(edge) / decay

    h = cfg.quad_step * unit
    ys = np.arange(1, int(height / h) + 1) * h
    total = 0.5 + float(np.sum(np.real(g(ys))))
    approx = h * total
    err = math.inf
    points = ys.size + 1
    for _ in range(_MAX_HALVINGS):
        mids = (np.arange(int(height / h) + 1) + 0.5) * h
        mids = mids[mids <= height]
        refined = 0.5 * approx + 0.5 * h * float(np.sum(np.real(g(mids))))
        points += mids.size
        h *= 0.5
        err = abs(refined - approx)
        approx = refined
        if approx > 0 and err + tail <= tol * approx:
            break
    if not approx > 0:
        raise AccuracyError("Mellin-Barnes quadrature gave a non-positive value", math.inf)
    # phases and log-magnitudes of size |base| carry absolute rounding ~ eps |base|
    rounding = 8.0 * np.finfo(float).eps * (abs(base) + 1.0)
    rel = (err + tail) / approx + rounding
    if rel > max(tol, 1e-10) + rounding:
        raise AccuracyError(f"quadrature error estimate {rel:.3g} exceeds tolerance", rel)
    return base + math.log(approx / math.pi), rel, points


def _core_saddle(t: float, n: int) -> float:
    """Root of ``n * psi(c) = ln t`` (stationary point of ``t^-c Gamma(c)^n``)."""
    target = math.log(t) / n
    lo, hi = 1e-12, 1.0
    while sc.digamma(hi) < target:
        hi *= 2.0
    return brentq(lambda c: sc.digamma(c) - target, lo, hi, xtol=1e-12)


def g_core_mb(t: float, n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> GEvalResult:
    """Mellin-Barnes quadrature of :math:`G^{n,0}_{0,n}(t\\,|\\,0,\\dots,0)`."""
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    c = max(cfg.contour_offset, _core_saddle(t, n))
    log_t = math.log(t)

    def logf(s):
        return -s * log_t + n * sc.loggamma(s)

    sigma = 1.0 / math.sqrt(n * sc.polygamma(1, c))
    log_value, err, points = _mb_integrate(logf, c, sigma, c, n * math.pi / 2, cfg)
    return GEvalResult(math.exp(log_value), log_value, err, points)


_SERIES_MAX_T = 1.0
# the residue cdf series loses about 2 n r2^(1/n) nats to cancellation
_SERIES_MAX_CANCEL = 35.0


def g_core(t: float, n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> GEvalResult:
    """:math:`G^{n,0}_{0,n}(t\\,|\\,0,\\dots,0)` by the cheaper route for ``t``.

    The residue series is used for ``t <= 1`` and the saddle-point quadrature
    above.  For ``n == 1`` the closed form ``exp(-t)`` is returned.
    """
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if n == 1:
        return GEvalResult(math.exp(-t), -t, 0.0, 0)
    if t <= _SERIES_MAX_T:
        return g_core_series(t, n, cfg)
    return g_core_mb(t, n, cfg)


# ---------------------------------------------------------------------------
# survival function of a product of Gamma(k, 1) variables
# ---------------------------------------------------------------------------


def _check_kn(k: int, n: int) -> None:
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")


def cdf_lower_log(k: int, n: int, r2: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> LogProb:
    """``ln P{X < r2}`` for ``X`` a product of ``n`` independent ``Gamma(k, 1)``.

    The residue series of the density ``x^(k-1) G(x) / Gamma(k)^n`` is
    integrated term by term; each term is ``x^(j+k-1)`` times a polynomial in
    ``ln x`` and integrates in closed form.
    """
    _check_kn(k, n)
    r2 = float(r2)
    if not r2 > 0.0:
        raise DomainError(f"r2 must be positive, got {r2!r}")

    state = {}

    def term(ctx, j, a, b):
        if j == 0:
            y = ctx.mpf(r2)
            neg_log = -ctx.log(y)
            state["yj"] = ctx.one
            state["powers"] = powers = [ctx.one]
            for q in range(1, n):
                powers.append(powers[-1] * neg_log / q)
        else:
            state["yj"] *= r2
        powers = state["powers"]
        inv_a = ctx.one / (j + k)
        inv_pows = [inv_a]
        for _ in range(n - 1):
            inv_pows.append(inv_pows[-1] * inv_a)
        acc = ctx.zero
        for p in range(n):
            inner = ctx.zero
            for q in range(p + 1):
                inner += powers[q] * inv_pows[p - q]
            acc += b[n - 1 - p] * inner
        return a * state["yj"] * acc

    def scale(ctx):
        return k * ctx.log(ctx.mpf(r2)) - n * ctx.loggamma(k)

    log_value, err, _ = _series(r2, n, cfg, term, scale)
    return LogProb(clamp_log(log_value), err)


def _survival_saddle(k: int, n: int, log_r2: float) -> float:
    def slope(c):
        return -log_r2 + n * sc.digamma(k + c) - 1.0 / c

    lo, hi = 1e-12, 1.0
    while slope(hi) < 0:
        hi *= 2.0
    return brentq(slope, lo, hi, xtol=1e-12)


def survival_mb_log(k: int, n: int, r2: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> LogProb:
    """``ln P{X > r2}`` by quadrature of the contour integral with the ``1/s`` kernel."""
    _check_kn(k, n)
    r2 = float(r2)
    if not r2 > 0.0:
        raise DomainError(f"r2 must be positive, got {r2!r}")
    log_r2 = math.log(r2)
    c = max(cfg.contour_offset, _survival_saddle(k, n, log_r2))
    norm = n * log_gamma(k)

    def logf(s):
        return -s * log_r2 + n * sc.loggamma(k + s) - np.log(s) - norm

    sigma = 1.0 / math.sqrt(n * sc.polygamma(1, k + c) + 1.0 / c**2)
    log_value, rel, _ = _mb_integrate(logf, c, sigma, c, n * math.pi / 2, cfg)
    return LogProb(clamp_log(log_value), rel)


def cdf_mb_log(k: int, n: int, r2: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> LogProb:
    """``ln P{X < r2}`` from the same contour integral taken left of the pole at ``s = 0``.

    Moving the line across ``s = 0`` picks up the residue 1, so on
    ``-k < Re s < 0`` the integral of ``-r2^(-s) Gamma(k+s)^n / (Gamma(k)^n s)``
    is the lower tail.  The line sits at the real saddle point; no
    cancellation occurs however small the result.
    """
    _check_kn(k, n)
    r2 = float(r2)
    if not r2 > 0.0:
        raise DomainError(f"r2 must be positive, got {r2!r}")
    log_r2 = math.log(r2)
    norm = n * log_gamma(k)

    def slope(c):
        return -log_r2 + n * sc.digamma(k + c) - 1.0 / c

    c = brentq(slope, -k * (1.0 - 1e-12), -1e-12 * k, xtol=1e-13)

    def logf(s):
        return -s * log_r2 + n * sc.loggamma(k + s) - np.log(-s) - norm

    sigma = 1.0 / math.sqrt(n * sc.polygamma(1, k + c) + 1.0 / c**2)
    log_value, rel, _ = _mb_integrate(logf, c, sigma, min(-c, k + c), n * math.pi / 2, cfg)
    return LogProb(clamp_log(log_value), rel)


def survival_log(k: int, n: int, r2: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> LogProb:
    """``ln P{(R_k)^2 > r2}`` for the rank-``k`` squared radius of the ``n``-product ensemble.

    Below ``r2**(1/n) < k/2`` the lower tail is computed and complemented:
    by the residue series (:func:`cdf_lower_log`) while its cancellation is
    modest, otherwise by :func:`cdf_mb_log`.  Above the crossover the contour
    integral :func:`survival_mb_log` is used.

    >>> survival_log(1, 1, 1.0).log_value  # doctest: +ELLIPSIS
    -1.0000000000...
    """
    _check_kn(k, n)
    r2 = float(r2)
    if r2 < 0.0 or math.isnan(r2):
        raise DomainError(f"r2 must be nonnegative, got {r2!r}")
    if r2 == 0.0:
        return LogProb(0.0, 0.0)
    rho = r2 ** (1.0 / n)
    if rho < 0.5 * k:
        if n * rho <= _SERIES_MAX_CANCEL:
            lower = cdf_lower_log(k, n, r2, cfg)
        else:
            lower = cdf_mb_log(k, n, r2, cfg)
        p = math.exp(lower.log_value)
        return LogProb(clamp_log(math.log1p(-p)), p * lower.est_error / max(1.0 - p, 1e-300))
    res = survival_mb_log(k, n, r2, cfg)
    return LogProb(res.log_value, res.est_error)


def survival_asympt_log(k: int, n: int, r: float) -> float:
    """Leading large-``r`` term of ``ln P{(R_k)^2 > r^2}``.

    ``ln[(2 pi)^((n-1)/2) n^(-1/2)] - n r^(2/n) + (2k - 1 - 1/n) ln r - n ln Gamma(k)``,
    with relative error ``O(r^(-2/n))`` in the probability.
    """
    _check_kn(k, n)
    r = float(r)
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r!r}")
    rho = r ** (2.0 / n)
    if rho <= k:
        warnings.warn(
            f"r^(2/n) = {rho:.3g} <= k = {k}: outside the asymptotic regime", stacklevel=2
        )
    return (
        0.5 * (n - 1) * math.log(2 * math.pi)
        - 0.5 * math.log(n)
        - n * rho
        + (2 * k - 1 - 1.0 / n) * math.log(r)
        - n * log_gamma(k)
    )
