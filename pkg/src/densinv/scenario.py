"""Scenario files: a sectioned ``key = value`` text format read with configparser.

Atomic units throughout.  Example::

    [grid]
    a = -1
    b = 1
    n_points = 256

    [time]
    t0 = 0
    t_final = 0.5
    n_steps = 1000
    keep_every = 1

    [initial_state]
    preset = bump_ring        ; bump_ring | plane_wave | custom_table
    # k = 3.141592653589793   (plane_wave)
    # path = density.csv      (custom_table: psi0 = sqrt of the first row)

    [potential]
    preset = sin2_sin         ; zero | sin2_sin | custom_table
    # path = v.csv

    [inversion]
    alpha = 100
    p = 1
    max_iterations = 1000
    tolerance = 1e-10
    v0 = zero                 ; zero | true
    target = generate         ; generate | custom_table
    # target_path = density.csv
    target_refine = 1

    [spectrum]
    n_eigs = 5
    stride = 1
    crossing_tol = 1e-3

    [output]
    directory = out

Relative paths are resolved against the directory holding the scenario file.
"""
from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DensinvError
from .grid import Grid1D, SpaceTimeField, TimeGrid
from .propagator import InitialState, make_driving_potential, make_initial_bump, make_plane_wave

__all__ = ["ConfigError", "Scenario", "load_scenario", "read_table"]


class ConfigError(DensinvError, ValueError):
    """The scenario file is missing, malformed or inconsistent."""


_SECTIONS = {
    "grid": {"a", "b", "n_points"},
    "time": {"t0", "t_final", "n_steps", "keep_every"},
    "initial_state": {"preset", "k", "path"},
    "potential": {"preset", "path"},
    "inversion": {"alpha", "p", "max_iterations", "tolerance", "v0", "target", "target_path", "target_refine"},
    "spectrum": {"n_eigs", "stride", "crossing_tol"},
    "output": {"directory"},
}


def read_table(path):
    """Read a CSV in the output layout: ``#`` comments, a header row ``t, x_0, ...``, then rows.

    Returns ``(x, t, values)``.
    """
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read table {path}: {exc}") from exc
    if len(lines) < 2:
        raise ConfigError(f"table {path} has no data rows")
    try:
        header = lines[0].split(",")
        x = np.array([float(h) for h in header[1:]])
        rows = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise ConfigError(f"table {path} is not numeric: {exc}") from exc
    if rows.ndim != 2 or rows.shape[1] != x.size + 1:
        raise ConfigError(f"table {path} has ragged rows")
    return x, rows[:, 0], rows[:, 1:]


@dataclass(frozen=True)
class Scenario:
    grid: Grid1D
    times: TimeGrid
    keep_every: int
    initial_state: str
    plane_wave_k: float
    initial_path: Path | None
    potential: str
    potential_path: Path | None
    alpha: float
    p: int
    max_iterations: int
    tolerance: float
    v0: str
    target: str
    target_path: Path | None
    target_refine: int
    n_eigs: int
    stride: int
    crossing_tol: float
    output_dir: Path
    digest: str

    # presets ---------------------------------------------------------
    def make_state(self, grid: Grid1D | None = None) -> InitialState:
        grid = self.grid if grid is None else grid
        if self.initial_state == "bump_ring":
            return make_initial_bump(grid)
        if self.initial_state == "plane_wave":
            return make_plane_wave(grid, self.plane_wave_k)
        n0 = self._table_on_mesh(self.initial_path, grid, None)[0]
        if np.any(n0 < 0):
            raise ConfigError("custom initial density has negative entries")
        return InitialState(grid, np.sqrt(n0))

    def make_potential(self, grid: Grid1D | None = None, times: TimeGrid | None = None) -> SpaceTimeField:
        grid = self.grid if grid is None else grid
        times = self.times if times is None else times
        if self.potential == "zero":
            return SpaceTimeField(grid, times, np.zeros((times.n_steps + 1, grid.n_points)))
        if self.potential == "sin2_sin":
            return make_driving_potential(grid, times)
        return SpaceTimeField(grid, times, self._table_on_mesh(self.potential_path, grid, times))

    def read_target(self) -> SpaceTimeField:
        return SpaceTimeField(self.grid, self.times, self._table_on_mesh(self.target_path, self.grid, self.times))

    def _table_on_mesh(self, path, grid, times):
        x, t, vals = read_table(path)
        if x.size != grid.n_points or not np.allclose(x, grid.x, rtol=0, atol=1e-12):
            raise ConfigError(f"table {path} does not sit on the scenario grid")
        if times is not None and (t.size != times.n_steps + 1 or not np.allclose(t, times.t, rtol=0, atol=1e-12)):
            raise ConfigError(f"table {path} does not sit on the scenario time mesh")
        return vals


def _get(cp, section, key, conv, default):
    if not cp.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"missing [{section}] {key}")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc


_REQUIRED = object()


def _int(s):
    f = float(s)
    if not f.is_integer():
        raise ValueError("expected an integer")
    return int(f)


def _path(base):
    def conv(s):
        p = Path(s)
        return p if p.is_absolute() else base / p
    return conv


def load_scenario(path, out_dir=None) -> Scenario:
    """Parse and validate a scenario file.  Every failure is a :class:`ConfigError`."""
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";",))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse scenario {path}: {exc}") from exc
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(cp.options(section)) - _SECTIONS[section]
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")

    canonical = "\n".join(
        f"{s}.{k}={cp.get(s, k)}" for s in sorted(cp.sections()) for k in sorted(cp.options(s))
    )
    digest = hashlib.sha256(canonical.encode()).hexdigest()[:16]
    base = path.resolve().parent
    P = _path(base)
    try:
        grid = Grid1D(_get(cp, "grid", "a", float, _REQUIRED), _get(cp, "grid", "b", float, _REQUIRED),
                      _get(cp, "grid", "n_points", _int, _REQUIRED))
        times = TimeGrid(_get(cp, "time", "t0", float, 0.0), _get(cp, "time", "t_final", float, _REQUIRED),
                         _get(cp, "time", "n_steps", _int, _REQUIRED))
    except DensinvError as exc:
        raise ConfigError(str(exc)) from exc
    keep_every = _get(cp, "time", "keep_every", _int, 1)
    if keep_every < 1 or times.n_steps % keep_every:
        raise ConfigError(f"keep_every={keep_every} must divide n_steps={times.n_steps}")

    sc = Scenario(
        grid=grid,
        times=times,
        keep_every=keep_every,
        initial_state=_get(cp, "initial_state", "preset", str, "bump_ring"),
        plane_wave_k=_get(cp, "initial_state", "k", float, np.pi),
        initial_path=_get(cp, "initial_state", "path", P, None),
        potential=_get(cp, "potential", "preset", str, "sin2_sin"),
        potential_path=_get(cp, "potential", "path", P, None),
        alpha=_get(cp, "inversion", "alpha", float, 100.0),
        p=_get(cp, "inversion", "p", _int, 1),
        max_iterations=_get(cp, "inversion", "max_iterations", _int, 1000),
        tolerance=_get(cp, "inversion", "tolerance", float, 1e-10),
        v0=_get(cp, "inversion", "v0", str, "zero"),
        target=_get(cp, "inversion", "target", str, "generate"),
        target_path=_get(cp, "inversion", "target_path", P, None),
        target_refine=_get(cp, "inversion", "target_refine", _int, 1),
        n_eigs=_get(cp, "spectrum", "n_eigs", _int, 5),
        stride=_get(cp, "spectrum", "stride", _int, 1),
        crossing_tol=_get(cp, "spectrum", "crossing_tol", float, 1e-3),
        output_dir=Path(out_dir) if out_dir is not None else _get(cp, "output", "directory", P, base / "out"),
        digest=digest,
    )
    _validate(sc)
    return sc


def _validate(sc: Scenario):
    choices = {
        "initial_state": (sc.initial_state, {"bump_ring", "plane_wave", "custom_table"}),
        "potential": (sc.potential, {"zero", "sin2_sin", "custom_table"}),
        "v0": (sc.v0, {"zero", "true"}),
        "target": (sc.target, {"generate", "custom_table"}),
    }
    for key, (val, allowed) in choices.items():
        if val not in allowed:
            raise ConfigError(f"{key} = {val!r}; expected one of {sorted(allowed)}")
    for key, p in (("initial_state.path", sc.initial_path if sc.initial_state == "custom_table" else ""),
                   ("potential.path", sc.potential_path if sc.potential == "custom_table" else ""),
                   ("inversion.target_path", sc.target_path if sc.target == "custom_table" else "")):
        if p is None:
            raise ConfigError(f"{key} is required for custom_table")
        if p and not Path(p).is_file():
            raise ConfigError(f"{key}: file {p} does not exist")
    if sc.p not in (1, 2):
        raise ConfigError(f"inversion.p must be 1 or 2, got {sc.p}")
    if not sc.alpha > 0 or not sc.tolerance > 0 or sc.max_iterations < 1 or sc.target_refine < 1:
        raise ConfigError("inversion block needs alpha > 0, tolerance > 0, max_iterations >= 1, target_refine >= 1")
    if not 3 <= sc.n_eigs <= sc.grid.n_points or sc.stride < 1:
        raise ConfigError("spectrum block needs 3 <= n_eigs <= n_points and stride >= 1")
    if sc.v0 == "true" and sc.target == "custom_table":
        raise ConfigError("v0 = true needs a generated target with a known potential")
    # presets check their own interval requirements
    try:
        sc.make_state()
        sc.make_potential()
    except ConfigError:
        raise
    except DensinvError as exc:
        raise ConfigError(str(exc)) from exc
