"""The operator ``S_t = -d_x [n(x,t) d_x]`` on the ring: assembly, spectra, inversion.

Discretization: ``S = D^T diag(n_half) D`` with ``D`` the periodic forward
difference and ``n_half`` the density averaged onto the half points.  This
keeps ``S`` exactly symmetric, positive semidefinite and with the constant
vector as an exact null vector.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ContractViolation, DimensionError, DomainError, NumericError
from .grid import Grid1D, SpaceTimeField, forward_difference, midpoint_average, quadrature

__all__ = [
    "SturmOperator",
    "SpectralSnapshot",
    "SpectralTrack",
    "Crossing",
    "assemble",
    "apply_sturm",
    "diagonalize",
    "track_spectrum",
    "invert_direct",
    "invert_eigenbasis",
    "solve_sturm",
]


def _require_positive(n, what="density"):
    n = np.asarray(n, dtype=float)
    if not np.all(n > 0):
        idx = np.unravel_index(np.argmin(n), n.shape)
        raise DomainError(f"{what} must be strictly positive; min {n[idx]:.3g} at index {idx}")
    return n


def apply_sturm(n, v, grid: Grid1D):
    """Matrix-free ``S[n] v``; broadcasts over leading (time) axes."""
    flux = midpoint_average(n) * forward_difference(v, grid)
    return -(flux - np.roll(flux, 1, axis=-1)) / grid.dx


@dataclass(frozen=True)
class SturmOperator:
    grid: Grid1D
    density_slice: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def apply(self, v):
        return apply_sturm(self.density_slice, v, self.grid)


def assemble(n_slice, grid: Grid1D) -> SturmOperator:
    n = _require_positive(grid.check(n_slice, "density slice"))
    if n.ndim != 1:
        raise DimensionError("assemble takes a single density slice")
    N = grid.n_points
    w = midpoint_average(n) / grid.dx**2
    i = np.arange(N)
    S = np.zeros((N, N))
    S[i, i] = w + np.roll(w, 1)
    S[i, (i + 1) % N] -= w
    S[(i + 1) % N, i] -= w
    n = n.copy()
    n.setflags(write=False)
    S.setflags(write=False)
    return SturmOperator(grid, n, S)


@dataclass(frozen=True)
class SpectralSnapshot:
    """Ascending eigenpairs of one operator.

    ``eigenvectors[:, i]`` is normalized in the quadrature inner product
    ``<f, g> = dx * sum f g``; eigenvector 0 is the positive constant.
    """

    t: float
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)


def diagonalize(S: SturmOperator, n_eigs: int | None = None, t: float = float("nan")) -> SpectralSnapshot:
    N = S.grid.n_points
    n_eigs = N if n_eigs is None else int(n_eigs)
    if not 1 <= n_eigs <= N:
        raise DimensionError(f"n_eigs must lie in [1, {N}], got {n_eigs}")
    try:
        lam, vec = scipy.linalg.eigh(S.matrix, subset_by_index=[0, n_eigs - 1], driver="evr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"symmetric eigensolve failed for N={N}: {exc}") from exc
    vec = vec / np.sqrt(S.grid.dx)
    if vec[:, 0].sum() < 0:
        vec[:, 0] = -vec[:, 0]
    # deterministic signs for the rest: largest-magnitude entry positive
    for i in range(1, vec.shape[1]):
        j = np.argmax(np.abs(vec[:, i]))
        if vec[j, i] < 0:
            vec[:, i] = -vec[:, i]
    lam.setflags(write=False)
    vec.setflags(write=False)
    return SpectralSnapshot(float(t), lam, vec)


@dataclass(frozen=True)
class Crossing:
    """A time where the two lowest nonzero eigenvalues (nearly) meet."""

    t: float
    lambda1: float
    lambda2: float

    @property
    def gap(self):
        return self.lambda2 - self.lambda1


@dataclass(frozen=True)
class SpectralTrack:
    snapshots: tuple
    D: float
    t_min: float
    crossings: tuple

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    @property
    def eigenvalues(self):
        return np.array([s.eigenvalues for s in self.snapshots])

    @property
    def lambda1_min(self):
        return 1.0 / self.D


def _thread_count():
    try:
        return max(1, int(os.environ.get("DENSINV_THREADS", "1")))
    except ValueError:
        return 1


def find_crossings(times, lam1, lam2, rel_tol=1e-3):
    """Near-degeneracy events of ``lambda1`` and ``lambda2``.

    A sample is flagged when ``lambda2 - lambda1 < rel_tol * lambda1``.
    Sorted eigenvalues touch in a V shape, which a finite time stride can
    straddle, so a local minimum of the gap also counts when the V through
    its neighbours reaches zero between samples.  Consecutive flagged samples
    are merged into one event at the smallest gap.  A degeneracy that lasts
    over the whole track (e.g. a uniform density) never opens and is not an
    event.
    """
    times = np.asarray(times)
    gap = np.asarray(lam2) - np.asarray(lam1)
    flagged = gap < rel_tol * np.asarray(lam1)
    for i in range(1, len(gap) - 1):
        if gap[i] <= gap[i - 1] and gap[i] <= gap[i + 1]:
            steep = max(gap[i - 1] - gap[i], gap[i + 1] - gap[i])
            if gap[i] <= steep:
                flagged[i] = True
    events = []
    i = 0
    while i < len(gap):
        if flagged[i]:
            j = i
            while j + 1 < len(gap) and flagged[j + 1]:
                j += 1
            if i == 0 and j == len(gap) - 1:
                break
            k = i + int(np.argmin(gap[i:j + 1]))
            events.append(Crossing(float(times[k]), float(lam1[k]), float(lam2[k])))
            i = j + 1
        else:
            i += 1
    return tuple(events)


def track_spectrum(n: SpaceTimeField, n_eigs: int = 5, stride: int = 1, rel_tol: float = 1e-3) -> SpectralTrack:
    """Diagonalize ``S_t`` at every ``stride``-th step of a density trajectory.

    ``D = max_t 1/lambda1(t)`` is taken over the sampled steps.
    """
    if n_eigs < 3:
        raise DimensionError("track_spectrum needs n_eigs >= 3 to see lambda1 and lambda2")
    _require_positive(n.values, "density trajectory")
    idx = list(range(0, n.times.n_steps + 1, stride))
    if idx[-1] != n.times.n_steps:
        idx.append(n.times.n_steps)
    t = n.t

    def one(k):
        return diagonalize(assemble(n.values[k], n.grid), n_eigs, t[k])

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            snaps = tuple(pool.map(one, idx))
    else:
        snaps = tuple(one(k) for k in idx)
    lam1 = np.array([s.eigenvalues[1] for s in snaps])
    lam2 = np.array([s.eigenvalues[2] for s in snaps])
    if np.any(lam1 <= 0):
        raise NumericError("lambda1 is not positive; the operator kernel is not one-dimensional")
    k = int(np.argmin(lam1))
    crossings = find_crossings([s.t for s in snaps], lam1, lam2, rel_tol)
    return SpectralTrack(snaps, float(1.0 / lam1[k]), float(snaps[k].t), crossings)


def invert_direct(n_target, n_current, v_current, d2_diff, grid: Grid1D):
    """Potential update by nested cumulative integrals, gauge ``v(a) = 0``.

    Solves ``S[n_target] v1 = S[n_current] v_current + d2_diff`` where
    ``d2_diff`` is the second time derivative of ``n_current - n_target``.
    The inner integral of ``d2_diff`` and the outer integral over
    ``1/n_target`` are taken on the half points, which makes this the exact
    inverse of the discrete operator of :func:`assemble`.  The constant
    multiplying ``int 1/n_target`` closes the potential periodically.
    Broadcasts over leading axes.
    """
    n_target = _require_positive(grid.check(n_target, "n_target"), "target density")
    n_current = grid.check(n_current, "n_current")
    v_current = grid.check(v_current, "v_current")
    d2_diff = grid.check(d2_diff, "d2_diff")
    d2_diff = d2_diff - d2_diff.mean(axis=-1, keepdims=True)

    dx = grid.dx
    inv_nh = 1.0 / midpoint_average(n_target)
    flux_current = midpoint_average(n_current) * forward_difference(v_current, grid)
    inner = dx * np.cumsum(d2_diff, axis=-1)
    integrand = (flux_current - inner) * inv_nh
    c_tilde = integrand.sum(axis=-1, keepdims=True) / inv_nh.sum(axis=-1, keepdims=True)
    increments = dx * (integrand - c_tilde * inv_nh)
    v1 = np.zeros(increments.shape)
    v1[..., 1:] = np.cumsum(increments[..., :-1], axis=-1)
    return v1


def solve_sturm(n, zeta, grid: Grid1D):
    """``S[n] v = zeta`` with ``v(a) = 0``; ``zeta`` is projected off the constants."""
    z = grid.check(zeta)
    return invert_direct(n, n, np.zeros_like(z, dtype=float), z, grid)


def invert_eigenbasis(S: SturmOperator, zeta_slice, gap_floor: float | None = None,
                      snapshot: SpectralSnapshot | None = None):
    """``sum_i <phi_i, zeta> / lambda_i * phi_i`` over eigenpairs above ``gap_floor``.

    ``gap_floor`` defaults to ``1e-8 * lambda_max``.  The result is
    orthogonal to the constants.
    """
    z = np.asarray(S.grid.check(zeta_slice, "zeta"), dtype=float)
    scale = max(1.0, float(quadrature(np.abs(z), S.grid)))
    mean_part = float(quadrature(z, S.grid))
    if abs(mean_part) > 1e-10 * scale:
        raise ContractViolation(f"zeta is not orthogonal to constants (integral {mean_part:.3g})")
    snap = snapshot if snapshot is not None else diagonalize(S)
    lam, vec = snap.eigenvalues, snap.eigenvectors
    floor = 1e-8 * lam.max() if gap_floor is None else gap_floor
    keep = lam > floor
    coeff = S.grid.dx * (vec[:, keep].T @ z)
    return vec[:, keep] @ (coeff / lam[keep])
