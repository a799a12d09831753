"""One particle on the ring: Crank-Nicolson propagation and the preset states/potentials."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, NumericError
from .grid import Grid1D, SpaceTimeField, TimeGrid, WaveTrajectory, quadrature
from .linalg import solve_cyclic_tridiagonal

__all__ = [
    "InitialState",
    "propagate",
    "make_initial_bump",
    "make_plane_wave",
    "make_driving_potential",
    "bump_profile",
    "hamiltonian_apply",
]


@dataclass(frozen=True)
class InitialState:
    """Normalized wavefunction at ``t0``.  Normalization happens on construction."""

    grid: Grid1D
    psi0: np.ndarray = field(repr=False)

    def __post_init__(self):
        psi = np.asarray(self.grid.check(self.psi0, "psi0"), dtype=complex)
        if not np.all(np.isfinite(psi)):
            raise DomainError("initial state contains non-finite values")
        norm2 = quadrature(np.abs(psi) ** 2, self.grid)
        if norm2 <= 0:
            raise DomainError("initial state has zero norm")
        psi = psi / np.sqrt(norm2)
        psi.setflags(write=False)
        object.__setattr__(self, "psi0", psi)

    @property
    def density(self):
        return np.abs(self.psi0) ** 2


def _require_unit_interval(grid: Grid1D, what: str):
    if not (np.isclose(grid.a, -1.0) and np.isclose(grid.b, 1.0)):
        raise DomainError(f"{what} is defined on the ring [-1, 1]; grid is [{grid.a}, {grid.b}]")


def bump_profile(x):
    """``exp(-1/(1-x^2)) + 1``, with the bump term set to 0 for ``|x| >= 1``."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    out = np.ones_like(x)
    xi = x[inside]
    out[inside] += np.exp(-1.0 / (1.0 - xi * xi))
    return out


def make_initial_bump(grid: Grid1D) -> InitialState:
    """Real, even initial state on ``[-1, 1]`` built from a smooth bump on a constant."""
    _require_unit_interval(grid, "the bump initial state")
    return InitialState(grid, bump_profile(grid.x))


def make_plane_wave(grid: Grid1D, k: float) -> InitialState:
    """``exp(i k x)``; ``k`` must be a multiple of ``2*pi/L`` to be periodic."""
    m = k * grid.length / (2 * np.pi)
    if not np.isclose(m, np.round(m), atol=1e-9):
        raise DomainError(f"plane wave k={k} is not periodic on a ring of length {grid.length}")
    return InitialState(grid, np.exp(1j * k * grid.x))


def make_driving_potential(grid: Grid1D, times: TimeGrid) -> SpaceTimeField:
    """``sin^2(pi x) * sin(10 t)`` on ``[-1, 1]``."""
    _require_unit_interval(grid, "the driving potential")
    spatial = np.sin(np.pi * grid.x) ** 2
    return SpaceTimeField(grid, times, np.outer(np.sin(10.0 * times.t), spatial))


def hamiltonian_apply(psi, v, grid: Grid1D):
    """``H psi`` with ``H = -1/2 Laplacian + v`` and the periodic three-point Laplacian."""
    lap = (np.roll(psi, -1, axis=-1) - 2.0 * psi + np.roll(psi, 1, axis=-1)) / grid.dx**2
    return -0.5 * lap + v * psi


def propagate(state: InitialState, v: SpaceTimeField, times: TimeGrid | None = None,
              keep_every: int = 1) -> WaveTrajectory:
    """Crank-Nicolson propagation of ``state`` under the potential ``v``.

    Each step uses the potential averaged over the step's two endpoints,
    ``psi_{k+1} = (1 + i dt/2 H)^{-1} (1 - i dt/2 H) psi_k``.  The spatial
    mean of that potential is split off and applied as an exact global phase,
    so adding any ``c(t)`` to ``v`` leaves the density unchanged to rounding.
    Only every ``keep_every``-th step is stored; the returned trajectory lives
    on the correspondingly coarsened time grid.
    """
    times = v.times if times is None else times
    if v.times != times or v.grid != state.grid:
        raise DimensionError("potential, initial state and time grid must share one mesh")
    if keep_every < 1 or times.n_steps % keep_every:
        raise DimensionError(f"keep_every={keep_every} must divide n_steps={times.n_steps}")
    vals = v.values
    if not np.all(np.isfinite(vals)):
        raise DomainError("potential contains non-finite values")

    grid = state.grid
    n = grid.n_points
    dt = times.dt
    half = 0.5j * dt
    off = -0.5 / grid.dx**2
    kin_diag = 1.0 / grid.dx**2
    band = np.full(n, half * off, dtype=complex)

    kept = np.empty((times.n_steps // keep_every + 1, n), dtype=complex)
    psi = np.array(state.psi0, dtype=complex)
    kept[0] = psi
    phase = 0.0
    for k in range(times.n_steps):
        vmid = 0.5 * (vals[k] + vals[k + 1])
        shift = vmid.mean()
        vmid = vmid - shift
        phase -= shift * dt
        rhs = psi - half * hamiltonian_apply(psi, vmid, grid)
        psi = solve_cyclic_tridiagonal(band, 1.0 + half * (kin_diag + vmid), band, rhs)
        if (k + 1) % keep_every == 0:
            kept[(k + 1) // keep_every] = psi * np.exp(1j * phase)
    if not np.all(np.isfinite(kept)):
        raise NumericError("propagation produced non-finite values")
    return WaveTrajectory(grid, times.coarsened(keep_every), kept)
