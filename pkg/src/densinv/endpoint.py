"""Endpoint classes of ``-d_x [n d_x]`` when the density vanishes like ``a_p d^p``.

The class of the endpoint depends only on ``p``; the onset of the continuous
spectrum ``sigma0`` depends on ``p`` and, on the ``p = 2`` slice, linearly on
``a_p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractViolation, DomainError

__all__ = ["EndpointKind", "EndpointClass", "DecayFit", "classify", "fit_decay", "snap_exponent"]


class EndpointKind(str, Enum):
    REGULAR = "regular"
    LIMIT_CIRCLE = "limit_circle"
    LIMIT_POINT = "limit_point"


@dataclass(frozen=True)
class EndpointClass:
    kind: EndpointKind
    sigma0: float
    p: float
    a_p: float

    def line(self) -> str:
        """``kind=... p=... a_p=... sigma0=...`` with the shortest round-trip floats."""
        return f"kind={self.kind.value} p={_fmt(self.p)} a_p={_fmt(self.a_p)} sigma0={_fmt(self.sigma0)}"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def classify(p: float, a_p: float) -> EndpointClass:
    """Table lookup.

    ``p < 1`` regular, ``1 <= p < 3/2`` limit circle, ``p >= 3/2`` limit
    point.  ``sigma0`` is ``inf`` for ``p < 2``, ``a_p / 4`` at ``p = 2`` and
    ``0`` for ``p > 2``.  Breakpoints are compared exactly; use
    :func:`snap_exponent` first when ``p`` comes from a fit.
    """
    p = float(p)
    a_p = float(a_p)
    if not math.isfinite(p):
        raise DomainError(f"decay exponent must be finite, got {p}")
    if not a_p > 0 or not math.isfinite(a_p):
        raise DomainError(f"decay coefficient must be positive and finite, got {a_p}")
    if p < 1.0:
        kind = EndpointKind.REGULAR
    elif p < 1.5:
        kind = EndpointKind.LIMIT_CIRCLE
    else:
        kind = EndpointKind.LIMIT_POINT
    if p < 2.0:
        sigma0 = math.inf
    elif p == 2.0:
        sigma0 = a_p / 4.0
    else:
        sigma0 = 0.0
    return EndpointClass(kind, sigma0, p, a_p)


@dataclass(frozen=True)
class DecayFit:
    p: float
    a_p: float
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.abs(self.residuals).max())


def _log_window(n_slice, distances, window):
    n = np.asarray(n_slice, dtype=float)
    d = np.asarray(distances, dtype=float)
    if n.shape != d.shape or n.ndim != 1:
        raise ContractViolation("density samples and distances must be 1-D arrays of equal length")
    if window is None:
        window = n.size
    if window < 4 or window > n.size:
        raise ContractViolation(f"window must hold at least 4 samples (got {window} of {n.size})")
    order = np.argsort(d)[:window]
    n, d = n[order], d[order]
    if np.any(n <= 0):
        raise DomainError("decay fit needs strictly positive density samples")
    if np.any(d <= 0):
        raise DomainError("distances from the boundary must be positive")
    if np.ptp(np.log(d)) == 0:
        raise ContractViolation("window is degenerate: all samples sit at one distance")
    return np.log(d), np.log(n)


def fit_decay(n_slice, distances, window: int | None = None) -> DecayFit:
    """Least-squares fit of ``log n = log a_p + p log d``.

    Uses the ``window`` samples closest to the boundary.  Residuals are in
    ``log n`` and show whether the window sits in the power-law regime.
    """
    ld, ln = _log_window(n_slice, distances, window)
    A = np.column_stack([np.ones_like(ld), ld])
    (log_a, p), *_ = np.linalg.lstsq(A, ln, rcond=None)
    return DecayFit(float(p), float(np.exp(log_a)), ln - A @ np.array([log_a, p]))


def snap_exponent(fit: DecayFit, n_slice, distances, window: int | None = None,
                  tol: float = 0.05) -> DecayFit:
    """Snap a fitted exponent onto a nearby breakpoint and refit ``a_p``.

    A fitted ``p`` always carries truncation error, so it never lands exactly
    on 1, 3/2 or 2.  When it is within ``tol`` of one of them, ``p`` is fixed
    there and ``a_p`` is refit as the geometric mean of ``n / d^p``.
    """
    for bp in (1.0, 1.5, 2.0):
        if abs(fit.p - bp) <= tol:
            ld, ln = _log_window(n_slice, distances, window)
            log_a = float(np.mean(ln - bp * ld))
            return DecayFit(bp, float(np.exp(log_a)), ln - log_a - bp * ld)
    return fit
