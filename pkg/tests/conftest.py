import numpy as np
import pytest

from densinv import Grid1D, TimeGrid, density, make_driving_potential, make_initial_bump, propagate
from densinv.fixedpoint import InversionProblem, generate_target, iterate
from densinv.sturm import track_spectrum

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    """Record one ``criterion N: PASS|FAIL ...`` line for the terminal summary."""
    store = request.config.stash[ACCEPTANCE_KEY]

    def log(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        store.append(line)
        print(line)

    return log


@pytest.fixture(scope="session")
def ring_run():
    """Bump state under sin^2(pi x) sin(10 t) on [-1, 1), t in [0, 0.5], N = 256, dt = 5e-4."""
    grid = Grid1D(-1.0, 1.0, 256)
    times = TimeGrid(0.0, 0.5, 1000)
    v = make_driving_potential(grid, times)
    psi = propagate(make_initial_bump(grid), v)
    n = density(psi)
    return {"grid": grid, "times": times, "v": v, "psi": psi, "n": n, "track": track_spectrum(n, 5, 1)}


RECOVERY_MESH = dict(n_points=24, n_steps=400, t_final=0.1)


def recovery_problem(n_points=24, n_steps=400, t_final=0.1, **kw):
    grid = Grid1D(-1.0, 1.0, n_points)
    times = TimeGrid(0.0, t_final, n_steps)
    n_t, v_true, psi0 = generate_target(make_initial_bump, make_driving_potential, grid, times)
    zero = v_true.with_values(np.zeros_like(v_true.values))
    return InversionProblem(n_t, psi0, zero, **kw), v_true


@pytest.fixture(scope="session")
def recovery_run():
    """v0 = 0 iteration toward the driving potential on [0, 0.1] with default settings."""
    problem, v_true = recovery_problem(**RECOVERY_MESH)
    v, report = iterate(problem, reference=v_true)
    return {"problem": problem, "v_true": v_true, "v": v, "report": report}
