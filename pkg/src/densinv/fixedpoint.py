"""The potential-to-potential map ``F = V o P`` and its fixed-point iteration.

``P`` propagates the fixed initial state under a trial potential and returns
the density it produces.  ``V`` feeds that density, the trial potential and
the target density into the Sturm-Liouville inversion, which returns the next
potential in the gauge ``v(a, t) = 0``.  A potential reproducing the target
density is a fixed point of ``F``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation, DimensionError, DivergenceError, DomainError, NumericError
from .grid import (
    Grid1D,
    SpaceTimeField,
    TimeGrid,
    d2dt2,
    first_time_derivative,
    quadrature,
    spatial_derivative,
)
from .norms import NormConfig, alpha_norm
from .observables import current, density
from .propagator import InitialState, propagate
from .sturm import invert_direct

__all__ = [
    "InversionProblem",
    "IterationRecord",
    "IterationReport",
    "apply_F",
    "iterate",
    "estimate_contraction",
    "generate_target",
    "seen_potential",
    "DIVERGENCE_FACTOR",
]

DIVERGENCE_FACTOR = 1e3


@dataclass(frozen=True)
class InversionProblem:
    """Target density, initial state and iteration settings.

    Parameters
    ----------
    n_target : SpaceTimeField
        Strictly positive density on ``grid`` x ``times``.
    psi0 : InitialState
        Must reproduce ``n_target`` at ``t0`` (within ``1e-8``) together with
        its initial rate of change ``-d_x j[psi0]``.
    v_initial_guess : SpaceTimeField
        Starting potential ``v0``.
    alpha, p_norm_order :
        Weight and spatial order of the norm used for the step size.
    init_rate_tol : float, optional
        Tolerance on the initial rate check.  Default: the truncation error of
        the one-sided time stencil, estimated from the first four samples.
    """

    n_target: SpaceTimeField
    psi0: InitialState
    v_initial_guess: SpaceTimeField
    alpha: float = 100.0
    p_norm_order: int = 1
    max_iterations: int = 1000
    tolerance: float = 1e-10
    init_rate_tol: float | None = None

    def __post_init__(self):
        n = self.n_target
        n.require_same_mesh(self.v_initial_guess)
        if self.psi0.grid != n.grid:
            raise DimensionError("initial state and target density live on different grids")
        if not self.alpha > 0:
            raise ContractViolation(f"alpha must be positive, got {self.alpha}")
        if self.max_iterations < 1 or not self.tolerance > 0:
            raise ContractViolation("max_iterations must be >= 1 and tolerance > 0")
        NormConfig(self.p_norm_order, self.alpha)  # validates p
        if n.values.min() <= 0:
            k, j = np.unravel_index(np.argmin(n.values), n.values.shape)
            raise DomainError(f"target density is not strictly positive (step {k}, index {j})")
        if not np.all(np.isfinite(self.v_initial_guess.values)):
            raise DomainError("initial guess contains non-finite values")

        mismatch = np.abs(n.values[0] - self.psi0.density).max()
        if mismatch > 1e-8:
            raise ContractViolation(f"target density at t0 differs from |psi0|^2 by {mismatch:.3g}")
        rate, tol = self.initial_rate_mismatch()
        if rate > tol:
            raise ContractViolation(
                f"initial rate of the target differs from -d_x j[psi0] by {rate:.3g} (tolerance {tol:.3g})"
            )

    @property
    def grid(self) -> Grid1D:
        return self.n_target.grid

    @property
    def times(self) -> TimeGrid:
        return self.n_target.times

    @property
    def norm(self) -> NormConfig:
        return NormConfig(self.p_norm_order, self.alpha, self.times.t0, self.times.t_final)

    def initial_rate_mismatch(self):
        """``max |d_t n(t0) + d_x j[psi0]|`` and the tolerance it is held to."""
        vals = self.n_target.values
        dt = self.times.dt
        dndt0 = first_time_derivative(vals[:3], dt)[0]
        psi = self.psi0.psi0
        j0 = np.imag(np.conj(psi) * spatial_derivative(psi, self.grid))
        rate = float(np.abs(dndt0 + spatial_derivative(j0, self.grid)).max())
        if self.init_rate_tol is not None:
            return rate, float(self.init_rate_tol)
        # one-sided 3-point stencil error is dt^2/3 * n''' ; allow 4x the estimate
        third = np.abs(vals[3] - 3 * vals[2] + 3 * vals[1] - vals[0]).max() / dt**3 if len(vals) > 3 else 0.0
        tol = 4.0 * dt**2 / 3.0 * third + 1e-8 * max(1.0, float(np.abs(dndt0).max()))
        return rate, float(tol)


@dataclass(frozen=True)
class IterationRecord:
    """One application of ``F``: ``v_k = F[v_{k-1}]``, ``k`` counted from 1.

    ``contraction_ratio`` is ``alpha_step_k / alpha_step_{k-1}`` and NaN for
    the first iteration.  The reference errors are NaN when no reference
    potential was supplied.
    """

    k: int
    alpha_step: float
    sup_step: float
    err_ref_firsthalf: float = float("nan")
    err_ref_full: float = float("nan")
    contraction_ratio: float = float("nan")


@dataclass
class IterationReport:
    records: list = field(default_factory=list)
    converged: bool = False
    snapshots: dict = field(default_factory=dict)

    @property
    def iterations_run(self) -> int:
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    CSV_COLUMNS = ("k", "alpha_step", "sup_step", "err_ref_firsthalf", "err_ref_full", "contraction_ratio")

    def rows(self):
        return [tuple(getattr(r, c) for c in self.CSV_COLUMNS) for r in self.records]


def seen_potential(values):
    """Nodal potential rebuilt from the step midpoints ``(v_k + v_{k+1}) / 2``.

    Crank-Nicolson with the midpoint potential only ever sees those averages,
    so a time sawtooth ``(-1)^k g(x)`` added to ``v`` leaves the density
    untouched.  Rebuilding the nodes from the midpoints (average of the two
    neighbouring midpoints inside, linear extrapolation at the ends) removes
    that invisible component and is second-order consistent for smooth ``v``.
    """
    v = np.asarray(values, dtype=float)
    if v.shape[0] < 3:
        raise DimensionError("need at least 3 time samples")
    out = np.empty_like(v)
    out[1:-1] = 0.25 * (v[:-2] + 2.0 * v[1:-1] + v[2:])
    out[0] = 0.25 * (3.0 * v[0] + 2.0 * v[1] - v[2])
    out[-1] = 0.25 * (3.0 * v[-1] + 2.0 * v[-2] - v[-3])
    return out


def apply_F(problem: InversionProblem, v_in: SpaceTimeField) -> SpaceTimeField:
    """``v1 = V[P[v_in]]`` at every time step, gauge ``v1(a, t) = 0``.

    The V step uses the potential as the propagation saw it
    (:func:`seen_potential`), so ``F`` has no neutral direction along the
    time sawtooth that the midpoint rule cannot detect.
    """
    problem.n_target.require_same_mesh(v_in)
    if not np.all(np.isfinite(v_in.values)):
        raise DomainError("trial potential contains non-finite values")
    n_cur = density(propagate(problem.psi0, v_in)).values
    n_tar = problem.n_target.values
    d2 = d2dt2(n_cur - n_tar, problem.times.dt)
    v1 = invert_direct(n_tar, n_cur, seen_potential(v_in.values), d2, problem.grid)
    if not np.all(np.isfinite(v1)):
        raise NumericError("inversion step produced non-finite values")
    return v_in.with_values(v1)


def _window_sup(diff, t, t_hi):
    return float(np.abs(diff[t <= t_hi + 1e-12]).max())


def iterate(problem: InversionProblem, reference: SpaceTimeField | None = None,
            snapshot_at=(1, 200, 1000), callback: Callable | None = None):
    """Run ``v_k = F^k[v0]`` until the alpha-norm step drops to the tolerance.

    Parameters
    ----------
    reference : SpaceTimeField, optional
        Known true potential; enables the error columns of the report and
        makes ``report.snapshots[k]`` hold ``|v_k - reference|`` instead of ``v_k``.
    snapshot_at : iterable of int
        Iterations whose field is kept in ``report.snapshots``.
    callback : callable, optional
        Called as ``callback(k, v_k)`` after every iteration.

    Returns
    -------
    (SpaceTimeField, IterationReport)

    Raises
    ------
    DivergenceError
        If a step exceeds ``DIVERGENCE_FACTOR`` times the first step or turns
        non-finite.  The exception carries the report and the last iterate.
    """
    cfg = problem.norm
    t = problem.times.t
    t_half = 0.5 * (problem.times.t0 + problem.times.t_final)
    if reference is not None:
        problem.n_target.require_same_mesh(reference)
    wanted = set(snapshot_at)
    report = IterationReport()
    v = problem.v_initial_guess
    first = prev = None
    for k in range(1, problem.max_iterations + 1):
        try:
            v_new = apply_F(problem, v)
        except NumericError as exc:
            raise DivergenceError(f"iteration {k} failed: {exc}", report, v) from exc
        diff = v_new - v
        step = alpha_norm(diff, cfg)
        rec = dict(k=k, alpha_step=step, sup_step=float(np.abs(diff.values).max()))
        if reference is not None:
            err = v_new.values - reference.values
            rec["err_ref_firsthalf"] = _window_sup(err, t, t_half)
            rec["err_ref_full"] = float(np.abs(err).max())
        if prev is not None:
            rec["contraction_ratio"] = step / prev if prev > 0 else float("inf")
        report.records.append(IterationRecord(**rec))
        if k in wanted:
            report.snapshots[k] = np.abs(v_new.values - reference.values) if reference is not None else v_new.values
        if callback is not None:
            callback(k, v_new)
        v = v_new
        if first is None:
            first = step
        if not np.isfinite(step) or step > DIVERGENCE_FACTOR * first:
            raise DivergenceError(
                f"iteration diverged at k={k}: step {step:.3g} vs first step {first:.3g}", report, v
            )
        prev = step
        if step <= problem.tolerance:
            report.converged = True
            break
    return v, report


def estimate_contraction(problem: InversionProblem, v_a: SpaceTimeField, v_b: SpaceTimeField) -> float:
    """``||F[v_a] - F[v_b]||_alpha / ||v_a - v_b||_alpha`` with the problem's alpha and p."""
    cfg = problem.norm
    den = alpha_norm(v_a - v_b, cfg)
    if den == 0:
        raise ContractViolation("v_a and v_b coincide on the mesh; the ratio is undefined")
    return alpha_norm(apply_F(problem, v_a) - apply_F(problem, v_b), cfg) / den


def generate_target(state_factory: Callable[[Grid1D], InitialState],
                    potential_factory: Callable[[Grid1D, TimeGrid], SpaceTimeField],
                    grid: Grid1D, times: TimeGrid, refine: int = 1):
    """Density produced by a known potential, for self-consistency runs.

    With ``refine > 1`` the density is computed on a mesh ``refine`` times
    finer in both space and time, sampled back onto ``grid`` x ``times`` and
    renormalized slice by slice, so the target does not come from the very
    discretization that inverts it.

    Returns
    -------
    (n_target, v_true, psi0) on the requested mesh.
    """
    if refine < 1 or int(refine) != refine:
        raise ContractViolation(f"refine must be a positive integer, got {refine}")
    fine_grid, fine_times = grid.refined(refine), times.refined(refine)
    n_fine = density(propagate(state_factory(fine_grid), potential_factory(fine_grid, fine_times)))
    n = n_fine.values[::refine, ::refine]
    if refine > 1:
        n = n / quadrature(n, grid)[:, None]
    psi0 = state_factory(grid)
    return SpaceTimeField(grid, times, n), potential_factory(grid, times), psi0
