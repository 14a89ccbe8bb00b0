"""Shared value types and exceptions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

INF = math.inf


class GinibreError(Exception):
    """Base class for library errors."""


class DomainError(GinibreError, ValueError):
    """Argument outside the domain of the function."""


class NonConvergenceError(GinibreError):
    """A series hit its term cap before the stopping rule fired."""

    def __init__(self, message: str, terms_used: int = 0, est_error: float = math.inf):
        super().__init__(message)
        self.terms_used = terms_used
        self.est_error = est_error


class AccuracyError(GinibreError):
    """A quadrature could not reach the requested tolerance."""

    def __init__(self, message: str, est_error: float):
        super().__init__(message)
        self.est_error = est_error


class EigenSolverError(GinibreError):
    """The eigensolver failed; carries the seed of the offending draw."""

    def __init__(self, message: str, seed=None):
        super().__init__(message)
        self.seed = seed


@dataclass(frozen=True)
class EnsembleParams:
    """Ensemble identified by the number of factors ``n`` and matrix size ``N``.

    ``N`` may be ``math.inf`` for the infinite ensemble.
    """

    n: int
    N: Union[int, float]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if self.N != INF and (int(self.N) != self.N or self.N < 1):
            raise DomainError(f"N must be a positive integer or inf, got {self.N!r}")

    @property
    def finite(self) -> bool:
        return self.N != INF

    def require_finite(self) -> int:
        if not self.finite:
            raise DomainError("this operation needs a finite matrix size N")
        return int(self.N)

    def to_dict(self) -> dict:
        return {"n": int(self.n), "N": "inf" if not self.finite else int(self.N)}


@dataclass(frozen=True)
class LogProb:
    """A probability carried as its natural logarithm.

    ``est_error`` is an absolute error estimate on ``log_value``.
    """

    log_value: float
    est_error: float = 0.0

    def __post_init__(self):
        if math.isnan(self.log_value) or self.log_value > 0.0:
            raise DomainError(f"log probability must lie in [-inf, 0], got {self.log_value!r}")

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def __float__(self) -> float:
        return self.log_value


def clamp_log(x: float) -> float:
    """Clip round-off excursions above zero."""
    return 0.0 if x > 0.0 else x
