"""Cooling optimization, first-minimum timing, bath-size scaling and extrapolation.

The coupling search is a seeded quasi-random multistart with Nelder-Mead
simplex refinement; time is not a search dimension.  For each coupling set
the cold-qubit temperature is scanned on a dense cached time grid (the
sector spectra are reused across the whole grid, making the scan nearly
free) and polished by golden-section search, which removes the most
oscillatory direction from the simplex.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product as iter_product

import numpy as np
from scipy.optimize import curve_fit, minimize
from scipy.stats import qmc

from .engine import RefrigeratorEngine, RefrigeratorParams
from .spinstar import temperature_array

DEFAULT_TIME_GRID = (0.0, 10.0, 0.005)
DEFAULT_RANGES = ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 0.1))
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

WORKERS_ENV = "SPINFRIDGE_WORKERS"


def worker_count() -> int:
    """Worker processes for parallel sweeps, from SPINFRIDGE_WORKERS or cores."""
    raw = os.environ.get(WORKERS_ENV, "")
    if raw.strip():
        count = int(raw)
        if count < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
        return count
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Scalar minimization helpers
# ---------------------------------------------------------------------------

def golden_section_min(f, a: float, b: float, tol: float = 1e-6,
                       max_iter: int = 200) -> tuple[float, float]:
    """Golden-section minimum of a unimodal function on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


@dataclass(frozen=True)
class LocalMinimum:
    time: float
    value: float
    grid_index: int


def first_local_min(times, values, objective=None, tol: float = 1e-6):
    """First local minimum of a sampled series, or None if the series is monotone.

    Finds the first k with values[k] < values[k-1] and values[k] <= values[k+1],
    then refines by golden-section search on the continuous ``objective``
    inside (times[k-1], times[k+1]) when one is supplied.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) < 3:
        raise ValueError("need at least three samples to locate a local minimum")
    for k in range(1, len(values) - 1):
        if values[k] < values[k - 1] and values[k] <= values[k + 1]:
            if objective is None:
                return LocalMinimum(float(times[k]), float(values[k]), k)
            t_best, v_best = golden_section_min(
                objective, float(times[k - 1]), float(times[k + 1]), tol=tol
            )
            if v_best > values[k]:  # refinement must never lose to the grid
                t_best, v_best = float(times[k]), float(values[k])
            return LocalMinimum(t_best, v_best, k)
    return None


# ---------------------------------------------------------------------------
# Bound-constrained derivative-free minimization
# ---------------------------------------------------------------------------

@dataclass
class _Budget:
    limit: int
    used: int = 0
    best_value: float = math.inf
    best_x: np.ndarray | None = None
    history: list[float] = field(default_factory=list)

    def spent(self) -> bool:
        return self.used >= self.limit


class _BudgetExhausted(Exception):
    pass


def minimize_box(func, bounds, budget: int, seed: int,
                 n_starts: int | None = None):
    """Seeded multistart minimization over a box.

    Sobol points probe the box, the best probes seed Nelder-Mead
    refinements, and every function evaluation counts against ``budget``.
    Returns (x_best, f_best, evaluations, restarts, incumbent_history).
    """
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    for lo, hi in bounds:
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValueError(f"invalid range ({lo}, {hi})")
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    ndim = len(bounds)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    span = hi - lo

    tracker = _Budget(limit=budget)

    def wrapped(x):
        if tracker.spent():
            raise _BudgetExhausted
        x = np.clip(x, lo, hi)
        value = float(func(x))
        tracker.used += 1
        if value < tracker.best_value:
            tracker.best_value = value
            tracker.best_x = x.copy()
        tracker.history.append(tracker.best_value)
        return value

    if np.all(span == 0.0):  # fully degenerate box: a single point
        wrapped(lo)
        return lo, tracker.best_value, tracker.used, 0, np.array(tracker.history)

    if n_starts is None:
        n_starts = max(2, min(10, budget // 150))
    n_probe = min(max(2 * n_starts, budget // 8), max(budget - 1, 1))
    sampler = qmc.Sobol(d=ndim, scramble=True, seed=seed)
    with warnings.catch_warnings():
        # probe counts are budget-driven, not powers of two
        warnings.simplefilter("ignore", UserWarning)
        probes = lo + sampler.random(n_probe) * span
    # deterministic structural probes: box corners and center guard against
    # optima pinned to the bounds, which simplex refinement reaches slowly
    if n_probe >= 2 ** ndim + 1:
        corners = lo + span * np.array(
            list(iter_product((0.0, 1.0), repeat=ndim))
        )
        probes[: len(corners)] = corners
        probes[len(corners)] = lo + 0.5 * span
    probe_values = []
    try:
        for x in probes:
            probe_values.append(wrapped(x))
    except _BudgetExhausted:
        pass
    ranked = list(np.argsort(probe_values, kind="stable"))

    restarts = 0
    per_start = max((budget - tracker.used) // max(n_starts, 1), 20)
    while not tracker.spent() and ranked:
        x0 = probes[ranked.pop(0)]
        budget_left = budget - tracker.used
        maxfev = min(per_start, budget_left)
        if budget_left < per_start and restarts >= n_starts:
            # not enough left for a fresh start: polish the incumbent instead
            break
        try:
            minimize(
                wrapped,
                x0,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "maxfev": maxfev,
                    "xatol": 1e-7,
                    "fatol": 1e-12,
                    "initial_simplex": _initial_simplex(x0, lo, hi),
                },
            )
        except _BudgetExhausted:
            pass
        restarts += 1
    if not tracker.spent() and tracker.best_x is not None:
        # spend whatever remains tightening the incumbent
        try:
            minimize(
                wrapped,
                tracker.best_x,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "maxfev": budget - tracker.used,
                    "xatol": 1e-9,
                    "fatol": 1e-13,
                    "initial_simplex": _initial_simplex(
                        tracker.best_x, lo, hi, scale=0.01
                    ),
                },
            )
        except _BudgetExhausted:
            pass
    return (
        tracker.best_x,
        tracker.best_value,
        tracker.used,
        restarts,
        np.array(tracker.history),
    )


def _initial_simplex(x0: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                     scale: float = 0.08) -> np.ndarray:
    """Simplex spanning ``scale`` of each range, reflected away from the walls."""
    ndim = len(x0)
    simplex = np.tile(x0, (ndim + 1, 1))
    for k in range(ndim):
        step = scale * (hi[k] - lo[k])
        if step == 0.0:
            continue
        if x0[k] + step > hi[k]:
            step = -step
        simplex[k + 1, k] = np.clip(x0[k] + step, lo[k], hi[k])
    return simplex


# ---------------------------------------------------------------------------
# Cold-qubit temperature optimization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizationResult:
    """Best couplings (A1, A2, A3, g), the best time, and search diagnostics."""

    best_params: np.ndarray
    best_time: float
    best_t1: float
    best_ground_population: float
    evaluations: int
    restarts: int
    incumbent_history: np.ndarray


def _best_time_on_grid(engine: RefrigeratorEngine, qubit: int, grid: np.ndarray,
                       refine_tol: float = 1e-5) -> tuple[float, float]:
    """Time of maximal ground population: dense scan plus golden polish."""
    r = engine.ground_population_series(qubit, grid)
    k = int(np.argmax(r))
    if 0 < k < len(grid) - 1:
        t_best, neg_r = golden_section_min(
            lambda t: -engine.ground_population(qubit, t),
            float(grid[k - 1]), float(grid[k + 1]), tol=refine_tol,
        )
        r_best = -neg_r
        if r_best < r[k]:
            t_best, r_best = float(grid[k]), float(r[k])
    else:
        t_best, r_best = float(grid[k]), float(r[k])
    return t_best, r_best


def optimize_t1(engine_factory, ranges=DEFAULT_RANGES, budget: int = 2000,
                seed: int = 0, time_grid=DEFAULT_TIME_GRID) -> OptimizationResult:
    """Minimize the cold-qubit temperature over couplings and time.

    ``engine_factory`` maps a coupling vector (A1, A2, A3, g) to a
    RefrigeratorEngine.  For each candidate the temperature is minimized
    over the dense time grid (equivalently the ground population is
    maximized; the map r -> T is strictly decreasing), then the couplings
    are searched by seeded multistart Nelder-Mead.  Deterministic for a
    fixed seed.
    """
    t0, t1, dt = time_grid
    grid = np.arange(t0, t1 + 0.5 * dt, dt)
    cache: dict[tuple, tuple] = {}

    def evaluate(x) -> tuple:
        key = tuple(np.round(np.asarray(x, dtype=float), 14))
        if key not in cache:
            engine = engine_factory(np.asarray(x, dtype=float))
            t_best, r_best = _best_time_on_grid(engine, 1, grid)
            t1_value = float(
                temperature_array(np.array([r_best]), engine.params.epsilon[0])[0]
            )
            cache[key] = (t1_value, t_best, r_best)
        return cache[key]

    x_best, f_best, evals, restarts, history = minimize_box(
        lambda x: evaluate(x)[0], ranges, budget, seed
    )
    t1_value, t_best, r_best = evaluate(x_best)
    return OptimizationResult(
        best_params=np.asarray(x_best, dtype=float),
        best_time=t_best,
        best_t1=t1_value,
        best_ground_population=r_best,
        evaluations=evals,
        restarts=restarts,
        incumbent_history=history,
    )


def coupling_engine_factory(base: RefrigeratorParams, prune_tol: float,
                            series_amp_tol: float = 0.0):
    """Factory mapping (A1, A2, A3, g) onto engines that share ``base``."""

    def make(x) -> RefrigeratorEngine:
        params = replace(
            base,
            coupling=(float(x[0]), float(x[1]), float(x[2])),
            g=float(x[3]),
        )
        return RefrigeratorEngine(
            params, prune_tol=prune_tol, series_amp_tol=series_amp_tol
        )

    return make


# ---------------------------------------------------------------------------
# Bath-size scaling sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingRow:
    """Optimization outcome for one bath size."""

    n: int
    best_params: np.ndarray
    best_time: float
    best_t1: float
    local_min_time: float
    local_min_t1: float
    evaluations: int


@dataclass(frozen=True)
class ScalingReport:
    rows: list[ScalingRow]

    def table(self) -> tuple[np.ndarray, np.ndarray]:
        ns = np.array([row.n for row in self.rows], dtype=float)
        t1 = np.array([row.best_t1 for row in self.rows])
        return ns, t1

    def local_min_table(self) -> tuple[np.ndarray, np.ndarray]:
        ns = np.array([row.n for row in self.rows], dtype=float)
        tl = np.array([row.local_min_time for row in self.rows])
        return ns, tl


def _sweep_point(args) -> ScalingRow:
    (base, n, budget, seed, prune_tol, series_amp_tol, time_grid) = args
    params = replace(base, n_bath=(n, n, n))
    factory = coupling_engine_factory(params, prune_tol, series_amp_tol)
    result = optimize_t1(
        factory, budget=budget, seed=seed, time_grid=time_grid
    )
    engine = factory(result.best_params)
    t0, t1, dt = time_grid
    grid = np.arange(t0, t1 + 0.5 * dt, dt)
    series = engine.temperature_series(1, grid)
    local = first_local_min(
        grid, series.temperature, objective=lambda t: engine.temperature(1, t)
    )
    if local is None:  # no interior dip: fall back to the global best
        local = LocalMinimum(result.best_time, result.best_t1, -1)
    return ScalingRow(
        n=n,
        best_params=result.best_params,
        best_time=result.best_time,
        best_t1=result.best_t1,
        local_min_time=local.time,
        local_min_t1=local.value,
        evaluations=result.evaluations,
    )


def scaling_sweep(base: RefrigeratorParams, n_list, per_n_budget: int = 2000,
                  seed: int = 0, prune_tol: float = 1e-9,
                  series_amp_tol: float = 1e-9,
                  time_grid=DEFAULT_TIME_GRID,
                  workers: int | None = None) -> ScalingReport:
    """Optimize the cold-qubit temperature for each bath size N1=N2=N3=N.

    Per-N optimizations run in separate processes (``workers`` defaults to
    SPINFRIDGE_WORKERS or the core count) and are merged in n_list order, so
    the report does not depend on scheduling.  Each N gets the deterministic
    seed ``seed + 7919 * index``.
    """
    n_list = [int(n) for n in n_list]
    jobs = [
        (base, n, per_n_budget, seed + 7919 * k, prune_tol, series_amp_tol, time_grid)
        for k, n in enumerate(n_list)
    ]
    workers = workers if workers is not None else worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]
    return ScalingReport(rows)


# ---------------------------------------------------------------------------
# Power-law fit
# ---------------------------------------------------------------------------

PLATEAU_MIN_N = 35


@dataclass(frozen=True)
class FitResult:
    """Power-law fit value = t_inf + a * N**(-b) with t_inf held fixed."""

    t_inf: float
    a: float
    b: float
    sigma: float
    n_points: int
    n_params: int = 2


def fit_power_law(ns, values, t_inf="plateau") -> FitResult:
    """Fit value(N) = t_inf + a*N^-b.

    ``t_inf`` is either an explicit float or "plateau", which averages all
    points with N >= 35 (the asymptotically flat region).  With t_inf
    fixed, (a, b) start from linear least squares on ln(value - t_inf)
    versus ln N and are polished by nonlinear least squares on the original
    model; sigma**2 = sum of squared residuals / (d - p) with p = 2.

    An explicit t_inf at or above any data value is an error (the log-space
    seed has no non-positive residuals to take).  Under the plateau policy
    the averaged points straddle their own mean by construction, so the
    seed fit uses only the strictly positive residuals (at least two are
    required); the nonlinear polish always uses every point.
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ns) != len(values) or len(ns) < 4:
        raise ValueError("need at least four (N, value) points")
    if isinstance(t_inf, str):
        if t_inf != "plateau":
            raise ValueError(f"unknown t_inf policy {t_inf!r}")
        plateau = values[ns >= PLATEAU_MIN_N]
        if plateau.size == 0:
            raise ValueError(
                f"no points with N >= {PLATEAU_MIN_N}; pass an explicit t_inf"
            )
        t_inf_value = float(plateau.mean())
        positive = values - t_inf_value > 0.0
        if np.count_nonzero(positive) < 2:
            raise ValueError("fewer than two points above the plateau average")
    else:
        t_inf_value = float(t_inf)
        if np.any(values <= t_inf_value):
            raise ValueError(
                "every value must exceed the explicit t_inf "
                "(log of non-positive residual)"
            )
        positive = np.ones(len(ns), dtype=bool)
    residual = values - t_inf_value
    slope, intercept = np.polyfit(
        np.log(ns[positive]), np.log(residual[positive]), 1
    )
    a0, b0 = math.exp(intercept), -slope

    def model(n, a, b):
        return t_inf_value + a * np.power(n, -b)

    (a, b), _ = curve_fit(model, ns, values, p0=(a0, b0), maxfev=20000)
    dof = len(ns) - 2
    sigma = math.sqrt(float(np.sum((model(ns, a, b) - values) ** 2)) / dof)
    return FitResult(t_inf_value, float(a), float(b), sigma, len(ns))


# ---------------------------------------------------------------------------
# Neville extrapolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NevilleTableau:
    """Full recursive interpolation tableau and its parent-difference chain.

    ``tableau[m][i]`` is the degree-m polynomial through points i..i+m
    evaluated at the target; ``d_diffs[m][i]`` is tableau[m][i] -
    tableau[m-1][i+1], the difference from the lower parent.  The apex
    tableau[n-1][0] is the extrapolated value.
    """

    xs: np.ndarray
    ys: np.ndarray
    target: float
    tableau: list[np.ndarray]
    d_diffs: list[np.ndarray]
    extrapolated: float
    stability_warning: str | None


def neville_extrapolate(xs, ys, target: float = 0.0) -> NevilleTableau:
    """Neville's recursive polynomial extrapolation to ``target``.

    Points are used in the order given (the difference chain along the
    lower diagonal then tracks the points closest to the target when they
    are ordered with the closest last).  Duplicate x values are an error;
    a violated stability margin (extrapolation distance not smaller than
    half the minimum gap between points) attaches a warning to the result
    instead of failing.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
        raise ValueError("need matching 1-d arrays with at least two points")
    n = len(xs)
    if len(np.unique(xs)) != n:
        raise ValueError("duplicate x values")
    tableau = [ys.astype(float).copy()]
    d_diffs: list[np.ndarray] = []
    for m in range(1, n):
        prev = tableau[m - 1]
        level = np.empty(n - m)
        for i in range(n - m):
            level[i] = (
                (target - xs[i + m]) * prev[i] + (xs[i] - target) * prev[i + 1]
            ) / (xs[i] - xs[i + m])
        tableau.append(level)
        d_diffs.append(level - prev[1:])
    distance = float(np.min(np.abs(xs - target)))
    gaps = np.abs(np.subtract.outer(xs, xs))[np.triu_indices(n, k=1)]
    warning = None
    if distance >= 0.5 * float(np.min(gaps)):
        warning = (
            f"extrapolation distance {distance:.4g} is not smaller than half "
            f"the minimum point gap {float(np.min(gaps)):.4g}; the result may "
            "be unstable"
        )
    return NevilleTableau(
        xs=xs, ys=ys, target=target, tableau=tableau, d_diffs=d_diffs,
        extrapolated=float(tableau[-1][0]), stability_warning=warning,
    )


def neville_lower_diagonal_diffs(tab: NevilleTableau) -> np.ndarray:
    """The parent-difference chain ending at the apex: D[m][last] for each level."""
    return np.array([level[-1] for level in tab.d_diffs])
