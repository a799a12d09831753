"""Spatial p-norms and the exponentially weighted supremum norm over time."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DimensionError, InvariantViolation
from .grid import Grid1D, SpaceTimeField

__all__ = ["NormConfig", "EquivalenceBounds", "space_norm", "alpha_norm", "alpha_norm_values", "check_equivalence"]


@dataclass(frozen=True)
class NormConfig:
    p: int = 1
    alpha: float = 0.0
    t0: float | None = None
    t_final: float | None = None

    def __post_init__(self):
        if self.p not in (1, 2):
            raise ContractViolation(f"only p = 1 or 2 are supported, got {self.p}")
        if not self.alpha >= 0:
            raise ContractViolation(f"alpha must be >= 0, got {self.alpha}")


def space_norm(f, grid: Grid1D, p: int = 1):
    """``(int |f|^p dx)^(1/p)`` by the periodic rule; broadcasts over leading axes."""
    if p not in (1, 2):
        raise ContractViolation(f"only p = 1 or 2 are supported, got {p}")
    f = grid.check(f)
    return (grid.dx * np.sum(np.abs(f) ** p, axis=-1)) ** (1.0 / p)


def _weighted_slices(values, t, grid, alpha, p, t0):
    """Time weights ``e^{-alpha (t - t0)}`` and slice norms ``||F(t)||_p^p``."""
    values = np.asarray(values)
    t = np.asarray(t, dtype=float)
    if values.ndim != 2 or values.shape[0] == 0 or values.shape[0] != t.shape[0]:
        raise DimensionError("alpha norm needs a non-empty (time, space) array matching the time samples")
    t0 = t[0] if t0 is None else t0
    if p not in (1, 2):
        raise ContractViolation(f"only p = 1 or 2 are supported, got {p}")
    return np.exp(-alpha * (t - t0)), grid.dx * np.sum(np.abs(values) ** p, axis=-1)


def _alpha_norm_pow(values, t, grid, alpha, p, t0):
    w, s = _weighted_slices(values, t, grid, alpha, p, t0)
    return float((w * s).max())


def alpha_norm_values(values, t, grid: Grid1D, alpha: float, p: int = 1, t0: float | None = None):
    return _alpha_norm_pow(values, t, grid, alpha, p, t0) ** (1.0 / p)


def alpha_norm(F: SpaceTimeField, cfg: NormConfig) -> float:
    """``(max_t e^{-alpha (t - t0)} ||F(t)||_p^p)^(1/p)`` over the stored time samples."""
    t0 = F.times.t0 if cfg.t0 is None else cfg.t0
    return alpha_norm_values(F.values, F.t, F.grid, cfg.alpha, cfg.p, t0)


@dataclass(frozen=True)
class EquivalenceBounds:
    lower: float   # e^{-alpha (T - t0)} ||F||_0^p
    middle: float  # ||F||_alpha^p
    upper: float   # ||F||_0^p


def check_equivalence(F: SpaceTimeField, cfg: NormConfig, rtol: float = 0.0) -> EquivalenceBounds:
    """Check ``e^{-alpha(T-t0)} ||F||_0^p <= ||F||_alpha^p <= ||F||_0^p``.

    ``rtol`` optionally widens both comparisons; the default compares exactly.
    """
    p = cfg.p
    T = F.times.t_final if cfg.t_final is None else cfg.t_final
    t0 = F.times.t0 if cfg.t0 is None else cfg.t0
    w, s = _weighted_slices(F.values, F.t, F.grid, cfg.alpha, p, t0)
    upper = float(s.max())
    middle = float((w * s).max())
    # reuse the weight computed at the last sample so both sides see the same rounding
    factor = w[-1] if T == F.t[-1] else np.exp(-cfg.alpha * (T - t0))
    lower = float(factor * upper)
    slack = rtol * upper
    if not (lower <= middle + slack and middle <= upper + slack):
        raise InvariantViolation(
            f"norm sandwich violated: lower={lower!r}, alpha-norm^p={middle!r}, upper={upper!r}"
        )
    return EquivalenceBounds(float(lower), float(middle), float(upper))
