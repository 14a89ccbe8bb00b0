"""Reference implementations used only by the tests.

Each one is written independently of the library code paths it checks.
"""
import itertools
import math

import mpmath
import numpy as np


def log_gamma_q(a: float, x: float) -> float:
    """``ln Q(a, x)``, the regularized upper incomplete gamma, for integer or real ``a > 0``.

    Series for ``P`` when ``x < a + 1`` (then ``ln(1 - P)``), modified Lentz
    continued fraction for ``Q`` otherwise.
    """
    if x <= 0.0:
        return 0.0
    log_pref = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        term = total = 1.0 / a
        ap = a
        for _ in range(100000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return math.log1p(-math.exp(log_pref + math.log(total)))
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return log_pref + math.log(h)


def bessel_k0(z: float) -> float:
    """``K_0(z)`` from its power series summed at 60 digits (no cancellation issue)."""
    with mpmath.workdps(60):
        z = mpmath.mpf(z)
        q = z * z / 4
        term = mpmath.mpf(1)
        harmonic = mpmath.mpf(0)
        lead = -(mpmath.log(z / 2) + mpmath.euler)
        total = lead
        for k in range(1, 400):
            term *= q / (k * k)
            harmonic += mpmath.mpf(1) / k
            piece = term * (lead + harmonic)
            total += piece
            if abs(piece) < mpmath.mpf(10) ** -55 * abs(total) and k > q:
                break
        return float(total)


def meijer_g_core(t: float, n: int) -> float:
    """``G^{n,0}_{0,n}(t | 0, ..., 0)`` by mpmath."""
    with mpmath.workdps(30):
        return float(mpmath.meijerg([[], []], [[0] * n, []], t))


def log_survival_mp(k: int, n: int, r2: float) -> float:
    """``ln P{prod of n Gamma(k) > r2}`` from ``G^{n+1,0}_{1,n+1}(r2 | 1; 0, k, ..., k) / Gamma(k)^n``."""
    with mpmath.workdps(40):
        g = mpmath.meijerg([[], [1]], [[0] + [k] * n, []], r2)
        return float(mpmath.log(g) - n * mpmath.loggamma(k))


def permanent_bruteforce(a) -> float:
    a = np.asarray(a, dtype=float)
    N = a.shape[0]
    return float(sum(math.prod(a[i, p[i]] for i in range(N)) for p in itertools.permutations(range(N))))
