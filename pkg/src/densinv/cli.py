"""Command line front end.

::

    densinv propagate --config scenario.ini [--out DIR]
    densinv spectrum  --config scenario.ini [--out DIR]
    densinv invert    --config scenario.ini [--out DIR]
    densinv classify  --p 2 --ap 1
    densinv classify  --density-file n.csv --boundary 1.5707963 --window 8

Exit codes: 0 success, 2 configuration or argument error, 3 numerical
error, 4 divergence of the fixed-point iteration.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .endpoint import classify, fit_decay, snap_exponent
from .errors import DensinvError, DivergenceError
from .fixedpoint import InversionProblem, IterationReport, generate_target, iterate
from .grid import SpaceTimeField, quadrature
from .observables import current, density
from .propagator import propagate
from .scenario import ConfigError, Scenario, load_scenario, read_table
from .sturm import track_spectrum

__all__ = ["main", "run_propagate", "run_spectrum", "run_invert", "run_classify", "write_csv"]

log = logging.getLogger("densinv")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_DIVERGENCE = 0, 2, 3, 4
ERROR_SNAPSHOTS = (1, 200, 1000)


def _f(v) -> str:
    return f"{float(v):.17g}"


def write_csv(path, comments, header, rows):
    """Write ``#`` comment lines, a header row and numeric rows; atomic via rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(c if isinstance(c, str) else _f(c) for c in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _comments(sc: Scenario, dt=None):
    g = sc.grid
    dt = sc.times.dt if dt is None else dt
    return [
        f"densinv {__version__} numpy {np.__version__} scipy {scipy.__version__} scenario {sc.digest}",
        f"grid a={_f(g.a)} b={_f(g.b)} n_points={g.n_points} dt={_f(dt)}",
    ]


def _write_field(path, sc: Scenario, F: SpaceTimeField):
    header = ["t"] + [_f(x) for x in F.x]
    rows = [[t, *vals] for t, vals in zip(F.t, F.values)]
    write_csv(path, _comments(sc, F.times.dt), header, rows)


# runners ------------------------------------------------------------------

def run_propagate(sc: Scenario):
    psi = propagate(sc.make_state(), sc.make_potential(), keep_every=sc.keep_every)
    n, j = density(psi), current(psi)
    out = sc.output_dir
    _write_field(out / "density.csv", sc, n)
    _write_field(out / "current.csv", sc, j)
    norm = quadrature(n.values, sc.grid)
    write_csv(out / "norm_trace.csv", _comments(sc, n.times.dt), ["t", "norm", "deviation"],
              [[t, v, v - 1.0] for t, v in zip(n.t, norm)])
    log.info("max norm deviation %.3g", np.abs(norm - 1).max())
    return n, j


def run_spectrum(sc: Scenario):
    psi = propagate(sc.make_state(), sc.make_potential(), keep_every=sc.keep_every)
    n = density(psi)
    track = track_spectrum(n, sc.n_eigs, sc.stride, sc.crossing_tol)
    out = sc.output_dir
    com = _comments(sc, n.times.dt)
    write_csv(out / "eigenvalues.csv", com, ["t"] + [f"lambda{i}" for i in range(sc.n_eigs)],
              [[s.t, *s.eigenvalues] for s in track.snapshots])
    x = sc.grid.x
    for snap in (track.snapshots[0], track.snapshots[-1]):
        write_csv(out / f"eigenvectors_t{snap.t:.6g}.csv", com, ["x"] + [f"phi{i}" for i in range(sc.n_eigs)],
                  [[xi, *row] for xi, row in zip(x, snap.eigenvectors)])
    write_csv(out / "crossings.csv", com, ["t", "lambda1", "lambda2", "gap"],
              [[c.t, c.lambda1, c.lambda2, c.gap] for c in track.crossings])
    _atomic_write(out / "d_constant.txt", f"D = {_f(track.D)}\nt_min = {_f(track.t_min)}\n")
    log.info("D = %.6g at t = %.6g; %d crossings", track.D, track.t_min, len(track.crossings))
    return track


def _write_report(out, sc, report: IterationReport):
    write_csv(out / "iteration_report.csv", _comments(sc), list(IterationReport.CSV_COLUMNS), report.rows())


def run_invert(sc: Scenario):
    out = sc.output_dir
    if sc.target == "generate":
        n_target, v_true, psi0 = generate_target(sc.make_state, sc.make_potential, sc.grid, sc.times,
                                                 sc.target_refine)
    else:
        n_target, v_true, psi0 = sc.read_target(), None, sc.make_state()
    zero = SpaceTimeField(sc.grid, sc.times, np.zeros((sc.times.n_steps + 1, sc.grid.n_points)))
    v0 = v_true if sc.v0 == "true" else zero
    problem = InversionProblem(n_target, psi0, v0, alpha=sc.alpha, p_norm_order=sc.p,
                               max_iterations=sc.max_iterations, tolerance=sc.tolerance)
    try:
        v, report = iterate(problem, reference=v_true, snapshot_at=ERROR_SNAPSHOTS)
    except DivergenceError as exc:
        if exc.report is not None:
            _write_report(out, sc, exc.report)
        raise
    _write_field(out / "v_recovered.csv", sc, v)
    _write_report(out, sc, report)
    if v_true is not None:
        header = ["k", "t"] + [_f(x) for x in sc.grid.x]
        rows = [[k, t, *vals] for k in sorted(report.snapshots) for t, vals in zip(sc.times.t, report.snapshots[k])]
        write_csv(out / "v_error.csv", _comments(sc), header, rows)
    log.info("%d iterations, converged=%s", report.iterations_run, report.converged)
    return v, report


def run_classify(p=None, a_p=None, density_file=None, boundary=None, window=None, row=0):
    """Classification record from ``(p, a_p)`` or from a fitted density slice."""
    if density_file is not None:
        x, _, vals = read_table(density_file)
        n = vals[row]
        d = np.abs(x - boundary)
        keep = d > 0
        fit = fit_decay(n[keep], d[keep], window)
        fit = snap_exponent(fit, n[keep], d[keep], window)
        p, a_p = fit.p, fit.a_p
    return classify(p, a_p)


# entry point --------------------------------------------------------------

def _parser():
    ap = argparse.ArgumentParser(prog="densinv", description="Density-to-potential inversion on a 1-D ring.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("propagate", "spectrum", "invert"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out")
    cl = sub.add_parser("classify")
    cl.add_argument("--p", type=float)
    cl.add_argument("--ap", type=float)
    cl.add_argument("--density-file")
    cl.add_argument("--boundary", type=float)
    cl.add_argument("--window", type=int)
    cl.add_argument("--row", type=int, default=0)
    return ap


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.command == "classify":
            if args.density_file is not None:
                if args.boundary is None:
                    ap.error("--density-file needs --boundary")
                result = run_classify(density_file=args.density_file, boundary=args.boundary,
                                      window=args.window, row=args.row)
            else:
                if args.p is None or args.ap is None:
                    ap.error("classify needs --p and --ap, or --density-file and --boundary")
                result = run_classify(args.p, args.ap)
            print(result.line())
            return EXIT_OK
        sc = load_scenario(args.config, args.out)
        {"propagate": run_propagate, "spectrum": run_spectrum, "invert": run_invert}[args.command](sc)
        return EXIT_OK
    except ConfigError as exc:
        print(f"densinv: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"densinv: diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except DensinvError as exc:
        code = EXIT_CONFIG if args.command == "classify" else EXIT_NUMERIC
        print(f"densinv: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
