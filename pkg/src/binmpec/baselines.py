"""Reference methods: relax-and-round, iterative hard thresholding, and
an ADMM splitting over the l2 box-sphere intersection."""

import enum
import time
from dataclasses import dataclass

import numpy as np

from .problems import SolverView, round_feasible, check_binary_feasible
from .projections import project_feasible
from .report import SolveReport
from .subsolver import minimize_fista, solve_qp

MU_CAP = 1e10


class BaselineMethod(enum.Enum):
    LP_ROUND = "lp"
    IHT = "iht"
    L2BOX_ADMM = "l2box"


@dataclass
class BaselineConfig:
    tol: float = 1e-6
    max_iter: int = 500
    penalty0: float = 0.1
    sigma: float = float(np.sqrt(10.0))
    inner_T: int = 10

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter at least 1")
        if self.penalty0 <= 0 or self.sigma <= 1 or self.inner_T < 1:
            raise ValueError("invalid penalty schedule")


def _finish(problem, method, x_binary, feasible, gap, outer, start, trace,
            converged, f_rel=None, x_rel=None):
    meta = dict(problem.meta)
    meta["domain"] = problem.domain
    return SolveReport(
        method=method,
        problem=meta,
        x_binary=tuple(x_binary),
        objective_binary=problem.objective.value(np.asarray(x_binary)),
        complementarity_gap_final=gap,
        outer_iterations=outer,
        wall_time_ms=(time.perf_counter() - start) * 1e3,
        trace=tuple(trace),
        feasible=feasible,
        converged=converged,
        objective_relaxed=f_rel,
        x_relaxed=None if x_rel is None else tuple(x_rel),
    )


def solve_lp_round(problem, tol=1e-7):
    """Solve the box relaxation to high accuracy, then round feasibly."""
    start = time.perf_counter()
    fs = problem.feasible_set
    center = 0.5 * (fs.lower + fs.upper)
    x0 = project_feasible(center, fs)
    res = solve_qp(problem.objective, None, fs, x0, tol=tol, max_iter=20000)
    x_binary, ok = round_feasible(res.x, fs, problem.domain)
    feasible = ok and check_binary_feasible(x_binary, fs, problem.domain)
    f_bin = problem.objective.value(x_binary)
    trace = [(1, res.objective, 0.0, 0.0), (2, f_bin, 0.0, 0.0)]
    return _finish(problem, "lp", x_binary, feasible, 0.0, 1, start, trace,
                   res.converged, f_rel=res.objective, x_rel=res.x)


def solve_iht(problem, config=None, x0=None):
    """Projected gradient with a hard binary projection each step.

    Keeps the best feasible binary iterate seen; stops when the binary
    point repeats or after max_iter steps.
    """
    config = config or BaselineConfig()
    start = time.perf_counter()
    fs = problem.feasible_set
    if fs.simplex_blocks is not None:
        raise ValueError("hard thresholding does not support assignment blocks")
    obj = problem.objective
    if x0 is None:
        center = 0.5 * (fs.lower + fs.upper)
        x, ok = round_feasible(center, fs, problem.domain)
    else:
        x, ok = round_feasible(np.asarray(x0, dtype=np.float64), fs,
                               problem.domain)
    if not ok:
        raise ValueError("could not form a feasible binary starting point")
    step = 1.0 / obj.lipschitz
    best_x = x
    best_f = obj.value(x)
    trace = [(0, best_f, 0.0, 0.0)]
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        xn, ok = round_feasible(x - step * obj.grad(x), fs, problem.domain)
        if not ok:
            break
        fn = obj.value(xn)
        trace.append((it, fn, 0.0, 0.0))
        if fn < best_f:
            best_f = fn
            best_x = xn
        if np.array_equal(xn, x):
            converged = True
            break
        x = xn
    feasible = check_binary_feasible(best_x, fs, problem.domain)
    return _finish(problem, "iht", best_x, feasible, 0.0, it, start, trace,
                   converged)


def _sphere_step(p):
    """Nearest point on the radius-sqrt(n) sphere, n = len(p).

    Every point of the sphere is nearest to the center; the first axis
    direction is picked there so the step stays deterministic.
    """
    n = p.shape[0]
    sqrt_n = float(np.sqrt(n))
    nrm = float(np.linalg.norm(p))
    if nrm <= 1e-12:
        z = np.zeros(n)
        z[0] = sqrt_n
        return z
    return (sqrt_n / nrm) * p


def solve_l2box_admm(problem, config=None):
    """Splitting x (box) against z (radius-sqrt(n) sphere) with scaled duals.

    The sphere is the l2 surrogate for the binary vertex set; the gap
    column records n - <x, z>.
    """
    config = config or BaselineConfig()
    start = time.perf_counter()
    view = SolverView(problem)
    obj = view.objective
    n = view.n

    mu = config.penalty0
    x = view.project(np.zeros(n))
    z = _sphere_step(np.zeros(n))
    u = np.zeros(n)
    trace = []
    converged = False
    it = 0
    gap = float(n)
    for it in range(1, config.max_iter + 1):
        w = z - u

        def value(p, _mu=mu, _w=w):
            d = p - _w
            return obj.value(p) + 0.5 * _mu * float(np.dot(d, d))

        def grad(p, _mu=mu, _w=w):
            return obj.grad(p) + _mu * (p - _w)

        x, _, _, _ = minimize_fista(value, grad, obj.lipschitz + mu,
                                    view.project, x, tol=1e-7, max_iter=2000)
        z = _sphere_step(x + u)
        u = u + x - z
        gap = float(n) - float(np.dot(x, z))
        trace.append((it, obj.value(x), gap, mu))
        if float(np.linalg.norm(x - z)) <= config.tol:
            converged = True
            break
        if it % config.inner_T == 0:
            mu = min(mu * config.sigma, MU_CAP)

    y = view.to_original(x)
    x_binary, ok = round_feasible(y, problem.feasible_set, problem.domain)
    feasible = ok and check_binary_feasible(x_binary, problem.feasible_set,
                                            problem.domain)
    rep = _finish(problem, "l2box", x_binary, feasible, gap, it, start, trace,
                  converged, x_rel=x)
    return rep
