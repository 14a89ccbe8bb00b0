"""Weight, kernel and densities of the n-product Ginibre ensemble."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DomainError, EnsembleParams
from .special_fn import DEFAULT_CONFIG, MeijerGConfig, g_core, log_gamma

LOG_PI = math.log(math.pi)
MAX_PERMANENT_SIZE = 12


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError("complex point must have finite components")

    @classmethod
    def of(cls, z) -> "ComplexPoint":
        if isinstance(z, ComplexPoint):
            return z
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def abs2(self) -> float:
        return self.re * self.re + self.im * self.im


def log_weight(z, n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> float:
    """``ln w_n(z)``; ``+inf`` at the origin for ``n >= 2`` (logarithmic singularity)."""
    t = ComplexPoint.of(z).abs2
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if t == 0.0:
        return 0.0 if n == 1 else math.inf
    return (n - 1) * LOG_PI + g_core(t, n, cfg).log_value


def weight_w_n(z, n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> float:
    """Weight ``w_n(z) = pi^(n-1) G^{n,0}_{0,n}(|z|^2 | 0,...,0)``.

    ``pi^-n w_n(z) dm(z)`` is a probability measure on the plane.
    """
    return math.exp(log_weight(z, n, cfg))


def kernel(z, xi, params: EnsembleParams) -> complex:
    """Correlation kernel ``sum_{k<N} (z conj(xi))^k / (k!)^n``.

    For infinite ``N`` the sum runs until a term drops below ``1e-16`` of the
    accumulated magnitude, once past the largest term.
    """
    w = complex(ComplexPoint.of(z)) * complex(ComplexPoint.of(xi)).conjugate()
    n = params.n
    if w == 0:
        return complex(1.0)
    log_w = cmath.log(w)
    peak = abs(w) ** (1.0 / n)
    total = 0j
    scale = 0.0
    k = 0
    limit = int(params.N) if params.finite else None
    while limit is None or k < limit:
        term = cmath.exp(k * log_w - n * math.lgamma(k + 1))
        total += term
        scale += abs(term)
        k += 1
        if limit is None and k > peak and abs(term) < 1e-16 * scale:
            break
    return total


def log_joint_density(points: Sequence, n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> float:
    """Log of the eigenvalue density of the ``n``-fold product of ``N x N`` Ginibre matrices.

    The density is symmetric in its arguments and is the ``N``-point
    correlation function of the process, so it integrates to ``N!`` over
    ``C^N`` and to one over the chamber ``|z_1| <= ... <= |z_N|``.
    """
    zs = [complex(ComplexPoint.of(p)) for p in points]
    N = len(zs)
    if N < 1:
        raise DomainError("need at least one point")
    norm = n * (N * LOG_PI + sum(log_gamma(k) for k in range(1, N + 1)))
    total = -norm
    for z in zs:
        total += log_weight(z, n, cfg)
    for i in range(N):
        for j in range(i + 1, N):
            d = abs(zs[i] - zs[j])
            if d == 0.0:
                return -math.inf
            total += 2.0 * math.log(d)
    return total


def permanent(a: np.ndarray) -> float:
    """Permanent by Ryser's formula, visiting subsets in Gray-code order.

    Each step toggles one column, so the row sums are updated in ``O(N)``.
    """
    a = np.asarray(a, dtype=float)
    N = a.shape[0]
    if a.shape != (N, N):
        raise DomainError("permanent needs a square matrix")
    if N == 0:
        return 1.0
    row_sums = np.zeros(N)
    total = 0.0
    gray = 0
    for i in range(1, 1 << N):
        col = (i & -i).bit_length() - 1  # bit flipped between gray(i-1) and gray(i)
        gray ^= 1 << col
        if gray >> col & 1:
            row_sums += a[:, col]
        else:
            row_sums -= a[:, col]
        sign = -1.0 if bin(gray).count("1") % 2 else 1.0
        total += sign * float(np.prod(row_sums))
    return (-1.0) ** N * total


def moduli_joint_density(radii: Sequence[float], n: int, cfg: MeijerGConfig = DEFAULT_CONFIG) -> float:
    """Joint density of the eigenvalue moduli.

    ``(2 pi)^N / (pi^N prod Gamma(k))^n * per[r_i^(2j-1)] * prod w_n(r_j)``.
    The expression is symmetric; it is the density of the sorted moduli on
    the chamber ``r_1 <= ... <= r_N`` (so it integrates to ``N!`` over the
    whole orthant).
    """
    r = np.asarray(radii, dtype=float)
    N = r.size
    if N < 1:
        raise DomainError("need at least one radius")
    if N > MAX_PERMANENT_SIZE:
        raise DomainError(f"moduli density limited to N <= {MAX_PERMANENT_SIZE}, got {N}")
    if np.any(r <= 0):
        raise DomainError("radii must be positive")
    powers = r[:, None] ** (2 * np.arange(1, N + 1)[None, :] - 1)
    log_norm = N * math.log(2 * math.pi) - n * (N * LOG_PI + sum(log_gamma(k) for k in range(1, N + 1)))
    log_w = sum(log_weight(x, n, cfg) for x in r)
    return permanent(powers) * math.exp(log_norm + log_w)


def log_radial_density(k: int, n: int, x: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> float:
    if int(k) != k or k < 1 or n < 1:
        raise DomainError(f"need integers k >= 1 and n >= 1, got k={k!r}, n={n!r}")
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    return (k - 1) * math.log(x) + g_core(x, n, cfg).log_value - n * log_gamma(k)


def radial_density(k: int, n: int, x: float, cfg: MeijerGConfig = DEFAULT_CONFIG) -> float:
    """Density of ``(R_k)^2``, the product of ``n`` independent ``Gamma(k, 1)`` variables.

    Uses the shift ``G(x | k-1, ..., k-1) = x^(k-1) G(x | 0, ..., 0)``.
    """
    return math.exp(log_radial_density(k, n, x, cfg))
