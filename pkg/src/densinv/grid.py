"""Periodic spatial grid, time grid, field containers and the basic stencils.

Everything downstream works on arrays whose *last* axis is the spatial index
and whose first axis (when present) is the time index.  The ring is sampled
at ``x_j = a + j*dx`` for ``j = 0..n_points-1``; the point ``x = b`` is the
same physical point as ``x = a`` and is never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

__all__ = [
    "Grid1D",
    "TimeGrid",
    "SpaceTimeField",
    "WaveTrajectory",
    "quadrature",
    "cumulative_integral",
    "spatial_derivative",
    "second_spatial_derivative",
    "first_time_derivative",
    "second_time_derivative",
    "d2dt2",
    "midpoint_average",
    "forward_difference",
]


def _frozen(arr, dtype=None):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on the ring ``[a, b)`` with ``n_points`` samples."""

    a: float
    b: float
    n_points: int

    def __post_init__(self):
        if not self.b > self.a:
            raise DimensionError(f"grid needs b > a, got a={self.a}, b={self.b}")
        if int(self.n_points) != self.n_points or self.n_points < 8:
            raise DimensionError(f"grid needs n_points >= 8, got {self.n_points}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.a + self.dx * np.arange(self.n_points)

    def check(self, f, name="samples"):
        """Return ``f`` as an array after checking its spatial length."""
        f = np.asarray(f)
        if f.ndim == 0 or f.shape[-1] != self.n_points:
            raise DimensionError(
                f"{name}: expected last axis of length {self.n_points}, got shape {f.shape}"
            )
        return f

    def refined(self, factor: int) -> "Grid1D":
        return Grid1D(self.a, self.b, self.n_points * factor)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time mesh ``t_k = t0 + k*dt``, ``k = 0..n_steps``."""

    t0: float
    t_final: float
    n_steps: int

    def __post_init__(self):
        if not self.t_final > self.t0:
            raise DimensionError(f"time grid needs t_final > t0, got {self.t0}, {self.t_final}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise DimensionError(f"time grid needs n_steps >= 2, got {self.n_steps}")
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "t_final", float(self.t_final))
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self) -> float:
        return (self.t_final - self.t0) / self.n_steps

    @property
    def t(self) -> np.ndarray:
        t = self.t0 + self.dt * np.arange(self.n_steps + 1)
        t[-1] = self.t_final
        return t

    def refined(self, factor: int) -> "TimeGrid":
        return TimeGrid(self.t0, self.t_final, self.n_steps * factor)

    def coarsened(self, every: int) -> "TimeGrid":
        if self.n_steps % every:
            raise DimensionError(f"{every} does not divide n_steps={self.n_steps}")
        return TimeGrid(self.t0, self.t_final, self.n_steps // every)


@dataclass(frozen=True)
class SpaceTimeField:
    """Real field sampled on every (time step, grid point) pair."""

    grid: Grid1D
    times: TimeGrid
    values: np.ndarray = field(repr=False)

    _dtype = float

    def __post_init__(self):
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals) and self._dtype is float:
            raise DimensionError("SpaceTimeField holds real values; got complex data")
        expected = (self.times.n_steps + 1, self.grid.n_points)
        if vals.shape != expected:
            raise DimensionError(f"field shape {vals.shape} does not match mesh {expected}")
        object.__setattr__(self, "values", _frozen(vals, self._dtype))

    @property
    def x(self):
        return self.grid.x

    @property
    def t(self):
        return self.times.t

    def same_mesh(self, other) -> bool:
        return self.grid == other.grid and self.times == other.times

    def require_same_mesh(self, *others):
        for o in others:
            if not self.same_mesh(o):
                raise DimensionError("fields live on different meshes")

    def with_values(self, values):
        return type(self)(self.grid, self.times, values)

    def __sub__(self, other):
        self.require_same_mesh(other)
        return self.with_values(self.values - other.values)

    def __add__(self, other):
        self.require_same_mesh(other)
        return self.with_values(self.values + other.values)


@dataclass(frozen=True)
class WaveTrajectory(SpaceTimeField):
    """Complex wavefunction samples at the retained time steps."""

    _dtype = complex


def quadrature(f, grid: Grid1D):
    """Integral over the ring, ``dx * sum_j f_j`` (periodic trapezoid rule)."""
    f = grid.check(f)
    return grid.dx * np.sum(f, axis=-1)


def cumulative_integral(f, grid: Grid1D):
    """Discrete ``g(x_j) = int_a^{x_j} f``.

    Trapezoid partial sums, so ``g_0 = 0`` and the sum continued to the wrap
    point equals :func:`quadrature`.
    """
    f = grid.check(f)
    g = np.zeros(f.shape, dtype=np.result_type(f, float))
    g[..., 1:] = grid.dx * np.cumsum(0.5 * (f[..., 1:] + f[..., :-1]), axis=-1)
    return g


def spatial_derivative(f, grid: Grid1D):
    """Central difference with periodic wraparound."""
    f = grid.check(f)
    return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * grid.dx)


def second_spatial_derivative(f, grid: Grid1D):
    f = grid.check(f)
    return (np.roll(f, -1, axis=-1) - 2.0 * f + np.roll(f, 1, axis=-1)) / grid.dx**2


def midpoint_average(f):
    """Values at the half points ``x_{j+1/2}``: ``(f_j + f_{j+1}) / 2``."""
    return 0.5 * (f + np.roll(f, -1, axis=-1))


def forward_difference(f, grid: Grid1D):
    """``(f_{j+1} - f_j) / dx``, located at ``x_{j+1/2}``."""
    return (np.roll(f, -1, axis=-1) - f) / grid.dx


def d2dt2(values, dt: float):
    """Second time derivative along axis 0.

    Central three-point stencil inside; second-order one-sided four-point
    stencils at both ends.
    """
    values = np.asarray(values)
    if values.shape[0] < 5:
        raise DimensionError(f"need at least 5 time samples (n_steps >= 4), got {values.shape[0]}")
    out = np.empty(values.shape, dtype=np.result_type(values, float))
    out[1:-1] = values[2:] - 2.0 * values[1:-1] + values[:-2]
    out[0] = 2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]
    out[-1] = 2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]
    return out / dt**2


def first_time_derivative(values, dt: float):
    """Central difference in time, second-order one-sided at the ends."""
    values = np.asarray(values)
    if values.shape[0] < 3:
        raise DimensionError("need at least 3 time samples")
    out = np.empty(values.shape, dtype=np.result_type(values, float))
    out[1:-1] = values[2:] - values[:-2]
    out[0] = -3.0 * values[0] + 4.0 * values[1] - values[2]
    out[-1] = 3.0 * values[-1] - 4.0 * values[-2] + values[-3]
    return out / (2.0 * dt)


def second_time_derivative(F: SpaceTimeField) -> SpaceTimeField:
    return F.with_values(d2dt2(F.values, F.times.dt))
