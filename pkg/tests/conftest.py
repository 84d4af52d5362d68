import numpy as np
import pytest

from dosepenalty import DoseProblem, HeatModel, PenaltyConfig, build_grid, make_region

# lines printed after the run by the acceptance suite
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def tiny_problem(nx=9, nt=4, y0=0.0, alpha=0.0, pairing="nodal", seed=None):
    g = build_grid(-1, 1, nx, 1.0, nt)
    T = make_region(g, [(-0.8, -0.3)])
    R = make_region(g, [(0.0, 0.6)])
    C = make_region(g, [(-1, 1)])
    z = None
    if alpha:
        z = np.random.default_rng(seed).uniform(0, 0.3, g.shape)
    return DoseProblem(HeatModel(g, 0.5, y0, C, pairing), T, R, z)


def dense_S0(model):
    """Block lower-triangular matrix of the zero-initial-state map, built from scratch."""
    g = model.grid
    n = g.nx - 2
    K = (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / g.dx**2
    Minv = np.linalg.inv(np.eye(n) + g.dt * model.c * K)
    N = g.nt * g.nx
    S = np.zeros((N, N))
    E = np.zeros((g.nx, n))
    E[1:-1] = np.eye(n)
    P = np.zeros((n, g.nx))
    P[:, 1:-1] = np.eye(n)
    cm = np.diag(model.control_region.mask.astype(float))
    for k in range(g.nt):
        for j in range(k + 1):
            blk = E @ np.linalg.matrix_power(Minv, k - j + 1) @ P @ cm * g.dt
            S[k * g.nx:(k + 1) * g.nx, j * g.nx:(j + 1) * g.nx] = blk
    return S


def dense_C(region):
    g = region.grid
    C = np.zeros((region.size, g.nt * g.nx))
    for k in range(g.nt):
        C[:, k * g.nx + region.indices] = g.dt * np.eye(region.size)
    return C


def state_weights(grid):
    return np.tile(grid.weights * grid.dt, grid.nt)


def control_weights(model):
    return np.tile(model.control_weights, model.grid.nt)


@pytest.fixture
def tiny():
    return tiny_problem()


@pytest.fixture
def tiny_cfg():
    return PenaltyConfig(beta1=3.0, beta2=2.0, U=0.5, L=0.2, u_min=0.0, u_max=2.0, gamma=0.05)
