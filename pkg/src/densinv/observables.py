"""Density, current, stress diagnostics and the inhomogeneity fed to the inversion."""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .grid import (
    SpaceTimeField,
    WaveTrajectory,
    d2dt2,
    first_time_derivative,
    quadrature,
    second_spatial_derivative,
    spatial_derivative,
)
from .sturm import apply_sturm

__all__ = [
    "density",
    "current",
    "continuity_residual",
    "zeta",
    "zeta_values",
    "momentum_stress",
    "momentum_stress_q",
    "force_balance_residual",
    "check_density",
]


def density(psi: WaveTrajectory) -> SpaceTimeField:
    return SpaceTimeField(psi.grid, psi.times, np.abs(psi.values) ** 2)


def current(psi: WaveTrajectory) -> SpaceTimeField:
    """``j = Im(conj(psi) d_x psi)`` with the central stencil."""
    dpsi = spatial_derivative(psi.values, psi.grid)
    return SpaceTimeField(psi.grid, psi.times, np.imag(np.conj(psi.values) * dpsi))


def check_density(n: SpaceTimeField, name="density", norm_tol=1e-10, strict=True):
    """Validate a density trajectory: positivity and unit norm at each step."""
    vals = n.values
    lo = vals.min()
    if strict and lo <= 0:
        t_idx, x_idx = np.unravel_index(np.argmin(vals), vals.shape)
        raise DomainError(f"{name} is not strictly positive (min {lo:.3g} at step {t_idx}, index {x_idx})")
    if lo < -1e-12:
        raise DomainError(f"{name} is negative ({lo:.3g})")
    dev = np.abs(quadrature(vals, n.grid) - 1.0).max()
    if dev > norm_tol:
        raise DomainError(f"{name} is not normalized (max deviation {dev:.3g})")
    return n


def continuity_residual(n: SpaceTimeField, j: SpaceTimeField) -> float:
    """``max |d_t n + d_x j|`` over interior time steps, central stencils."""
    n.require_same_mesh(j)
    dndt = first_time_derivative(n.values, n.times.dt)
    res = dndt + spatial_derivative(j.values, j.grid)
    return float(np.abs(res[1:-1]).max())


def zeta_values(n_target, n_current, v_current, grid, dt):
    """Array form of :func:`zeta`; time along axis 0."""
    z = apply_sturm(n_current, v_current, grid) + d2dt2(n_current - n_target, dt)
    return z - z.mean(axis=-1, keepdims=True)


def zeta(n_target: SpaceTimeField, n_current: SpaceTimeField, v_current: SpaceTimeField) -> SpaceTimeField:
    """Effective inhomogeneity ``-d_x(n_cur d_x v_cur) + d_t^2 (n_cur - n_target)``.

    The spatial operator is the same staggered discretization used for the
    Sturm-Liouville operator.  The spatial mean is removed from every slice
    so each slice is orthogonal to the constant function.
    """
    n_target.require_same_mesh(n_current, v_current)
    if n_target.values.min() <= 0:
        raise DomainError("target density must be strictly positive")
    return n_target.with_values(
        zeta_values(n_target.values, n_current.values, v_current.values, n_target.grid, n_target.times.dt)
    )


def momentum_stress(psi: WaveTrajectory) -> SpaceTimeField:
    """``T_xx = |d_x psi|^2 - 1/4 d_x^2 |psi|^2``."""
    dpsi = spatial_derivative(psi.values, psi.grid)
    n = np.abs(psi.values) ** 2
    return SpaceTimeField(psi.grid, psi.times, np.abs(dpsi) ** 2 - 0.25 * second_spatial_derivative(n, psi.grid))


def momentum_stress_q(psi: WaveTrajectory) -> SpaceTimeField:
    """``q = d_x^2 T_xx`` for a noninteracting particle.  Diagnostic only."""
    T = momentum_stress(psi)
    return T.with_values(second_spatial_derivative(T.values, psi.grid))


def force_balance_residual(psi: WaveTrajectory, v: SpaceTimeField) -> float:
    """``max |-d_x(n d_x v) - q + d_t^2 n|`` over interior time steps.

    ``v`` may live on a finer time mesh than ``psi`` as long as the steps line up.
    """
    if v.grid != psi.grid:
        raise DomainError("potential and trajectory must share a spatial grid")
    stride = v.times.n_steps // psi.times.n_steps
    vv = v.values[::stride]
    n = np.abs(psi.values) ** 2
    lhs = -spatial_derivative(n * spatial_derivative(vv, psi.grid), psi.grid)
    res = lhs - momentum_stress_q(psi).values + d2dt2(n, psi.times.dt)
    return float(np.abs(res[1:-1]).max())
