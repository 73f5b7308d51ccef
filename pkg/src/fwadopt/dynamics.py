"""Mean-field adoption ODE, finite-population agent simulation, phase portraits.

Each ISP revises its firewall state at the epochs of its own Poisson clock
(rate ``gamma``), best-responding to the current fraction of enabled
firewalls.  For a large population the fractions ``(y, x)`` follow a
piecewise-linear ODE whose pieces are the best-response regimes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels, model
from .equilibrium import DEFAULT_TOL, Decisions, EquilibriumReport, RegimeMap, UNSEEDED, analyze
from .errors import DomainError, InvalidParameterError
from .model import AdoptionState, ModelParams

EVENT_TOL = 1e-10
CLAMP_EPS = 1e-12
STATE_LABELS = ("n", "e", "d")


@dataclass
class Trajectory:
    """Sampled path of ``(y, x)``; ``region`` is "1", "2", "3" or "boundary"."""

    t: np.ndarray
    y: np.ndarray
    x: np.ndarray
    region: list
    events: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def terminal(self) -> AdoptionState:
        return AdoptionState(float(self.y[-1]), float(self.x[-1]))

    def rows(self):
        for t, y, x, reg in zip(self.t.tolist(), self.y.tolist(), self.x.tolist(), self.region):
            yield t, y, x, reg


def vector_field(state: AdoptionState, params: ModelParams, report: EquilibriumReport) -> tuple[float, float, str]:
    """``(dy/dt, dx/dt, region)`` of the mean-field flow at ``state``."""
    if not isinstance(state, AdoptionState):
        raise DomainError(f"state must be an AdoptionState, got {state!r}")
    regimes = RegimeMap(params, report)
    dy, dx = regimes.at(state.x).field(state.y, state.x, params.gamma)
    return dy, dx, regimes.region(state.x)


def _rk4(v: Decisions, y: float, x: float, h: float, gamma: float) -> tuple[float, float]:
    k1y, k1x = v.field(y, x, gamma)
    k2y, k2x = v.field(y + 0.5 * h * k1y, x + 0.5 * h * k1x, gamma)
    k3y, k3x = v.field(y + 0.5 * h * k2y, x + 0.5 * h * k2x, gamma)
    k4y, k4x = v.field(y + h * k3y, x + h * k3x, gamma)
    return (
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
    )


def _contain(y: float, x: float) -> tuple[float, float]:
    if x < -CLAMP_EPS or y < -CLAMP_EPS or x + y > 1.0 + CLAMP_EPS:
        raise RuntimeError(f"integrator left the state space: (y={y!r}, x={x!r})")
    y, x = max(y, 0.0), max(x, 0.0)
    excess = x + y - 1.0
    if excess > 0:
        x -= excess
    return y, x


def _enter(regimes: RegimeMap, y: float, x: float) -> Optional[int]:
    """Interval the flow moves into from ``(y, x)``; ``None`` when stuck at a breakpoint."""
    if not regimes.is_break(x):
        return regimes.index(x)
    direction = regimes.side_motion(y, x)
    if direction is None:
        return None
    return regimes.index(x) if direction > 0 else regimes.index(x) - 1


def integrate(
    params: ModelParams,
    start: AdoptionState,
    horizon: float,
    step: Optional[float] = None,
    report: Optional[EquilibriumReport] = None,
    tol: float = DEFAULT_TOL,
) -> Trajectory:
    """Integrate the mean-field flow with RK4 on a fixed grid.

    Crossings of a threshold are located by bisection on the crossing time
    (to ``1e-10``) and recorded as extra ``boundary`` samples.  A state that
    reaches a threshold the flow cannot cross stays on it.
    """
    if not horizon > 0:
        raise InvalidParameterError(f"horizon must be positive, got {horizon!r}")
    gamma = params.gamma
    if step is None:
        step = 1e-3 / gamma
    if not step > 0:
        raise InvalidParameterError(f"step must be positive, got {step!r}")
    if not isinstance(start, AdoptionState):
        raise DomainError(f"start must be an AdoptionState, got {start!r}")
    if report is None:
        report = analyze(params, tol)
    regimes = RegimeMap(params, report)

    y, x = float(start.y), float(start.x)
    samples = ([0.0], [y], [x], [regimes.region(x)])
    events = []
    current = _enter(regimes, y, x)
    n_steps = max(1, math.ceil(horizon / step - 1e-9))
    t = 0.0
    for k in range(1, n_steps + 1):
        t_next = horizon if k == n_steps else k * step
        while t < t_next and current is not None:
            h = t_next - t
            v = regimes.decisions[current]
            lo, hi = regimes.intervals[current]
            y1, x1 = _rk4(v, y, x, h, gamma)
            if hi < 1.0 and x1 >= hi:
                bound = hi
            elif lo > 0.0 and x1 <= lo:
                bound = lo
            else:
                y, x = _contain(y1, x1)
                t = t_next
                break
            # crossing inside this step: bisect on the elapsed time
            sign = 1.0 if bound == hi else -1.0
            a, b = 0.0, h
            while b - a > EVENT_TOL:
                mid = 0.5 * (a + b)
                if sign * (_rk4(v, y, x, mid, gamma)[1] - bound) >= 0:
                    b = mid
                else:
                    a = mid
            y = _contain(_rk4(v, y, x, b, gamma)[0], bound)[0]
            x = bound
            t = t + b if b < h else t_next
            events.append((t, bound))
            if t < t_next:
                _push(samples, t, y, x, "boundary")
            current = _enter(regimes, y, x)
        t = t_next
        _push(samples, t, y, x, "boundary" if current is None or regimes.is_break(x) else regimes.region(x))
    ts, ys, xs, regs = samples
    return Trajectory(np.array(ts), np.array(ys), np.array(xs), regs, events)


def _push(samples, t, y, x, region) -> None:
    for column, value in zip(samples, (t, y, x, region)):
        column.append(value)


@dataclass
class AgentPopulation:
    """Per-agent firewall states (0 = not purchased, 1 = enabled, 2 = disabled)."""

    n: int
    states: np.ndarray
    clock: float
    rng_seed: int

    def __post_init__(self) -> None:
        if self.n < 1 or len(self.states) != self.n:
            raise ValueError("population size must be positive and match the state vector")

    @property
    def counts(self) -> tuple[int, int, int]:
        c = np.bincount(self.states, minlength=3)
        return int(c[0]), int(c[1]), int(c[2])

    @property
    def labels(self) -> list:
        return [STATE_LABELS[s] for s in self.states.tolist()]

    @property
    def state(self) -> AdoptionState:
        cn, ce, _ = self.counts
        return AdoptionState(cn / self.n, ce / self.n)


def initial_counts(n: int, start: AdoptionState) -> tuple[int, int, int]:
    """Round the enabled and disabled shares to counts; the rest have not purchased."""
    ce = int(round(start.x * n))
    cd = int(round(start.disabled * n))
    cd -= max(0, ce + cd - n)
    return n - ce - cd, ce, cd


def decision_tables(params: ModelParams, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Best responses at every empirical level ``k / n``.

    ``buy[k]`` is 1 when purchasing beats abstaining; ``pref[k]`` is +1/-1
    when an owner strictly prefers enabled/disabled and 0 on a tie.
    """
    levels = np.arange(n + 1) / n
    buy = (model.adoption_gap(levels, params) > 0).astype(np.int8)
    pref = np.sign(model.enable_gap(levels, params)).astype(np.int8)
    return buy, pref


def simulate_agents(
    params: ModelParams,
    n: int,
    start: AdoptionState,
    horizon: float,
    seed: int,
    report: Optional[EquilibriumReport] = None,
    backend: Optional[str] = None,
    chunk: int = 1 << 16,
) -> tuple[Trajectory, AgentPopulation]:
    """Event-driven simulation of ``n`` ISPs with independent Poisson revision clocks.

    The superposed clock ticks at rate ``n * gamma``; at each tick a
    uniformly chosen ISP best-responds to the current enabled fraction
    (its own state included).  Ties keep the current state.  The result is
    a deterministic function of ``seed`` and identical across backends.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not isinstance(start, AdoptionState):
        raise DomainError(f"start must be an AdoptionState, got {start!r}")
    if not horizon > 0:
        raise InvalidParameterError(f"horizon must be positive, got {horizon!r}")
    n = int(n)
    kern = kernels.get(backend)
    if report is None:
        report = analyze(params)
    regimes = RegimeMap(params, report)

    cn, ce, cd = initial_counts(n, start)
    states = np.concatenate(
        [np.zeros(cn, np.int8), np.ones(ce, np.int8), np.full(cd, 2, np.int8)]
    )
    counts = np.array([cn, ce, cd], dtype=np.int64)
    buy, pref = decision_tables(params, n)
    rng = np.random.default_rng(seed)
    scale = 1.0 / (n * params.gamma)

    rec_t, rec_cn, rec_ce = [np.zeros(1)], [np.array([cn])], [np.array([ce])]
    out_t = np.empty(chunk)
    out_cn = np.empty(chunk, dtype=np.int64)
    out_ce = np.empty(chunk, dtype=np.int64)
    t, done = 0.0, False
    while not done:
        dt = rng.exponential(scale, chunk)
        idx = rng.integers(0, n, chunk, dtype=np.int64)
        t, m, done = kern.agent_events(states, counts, t, float(horizon), dt, idx, buy, pref, out_t, out_cn, out_ce)
        if m:
            rec_t.append(out_t[:m].copy())
            rec_cn.append(out_cn[:m].copy())
            rec_ce.append(out_ce[:m].copy())

    t_all = np.concatenate(rec_t)
    y_all = np.concatenate(rec_cn) / n
    x_all = np.concatenate(rec_ce) / n
    traj = Trajectory(t_all, y_all, x_all, [regimes.region(v) for v in x_all.tolist()])
    return traj, AgentPopulation(n=n, states=states, clock=float(horizon), rng_seed=seed)


@dataclass(frozen=True)
class DeviationStats:
    n: int
    seeds: tuple
    deviations: tuple
    mean: float
    std: float


def sup_deviation(agent: Trajectory, ode: Trajectory, horizon: float) -> float:
    """``sup_t |x_n(t) - x(t)|`` for a piecewise-constant agent path.

    The ODE is interpolated at every jump; both the pre- and post-jump
    empirical values are compared there.
    """
    times = np.append(agent.t, horizon)
    x_ode = np.interp(times, ode.t, ode.x)
    after = np.abs(agent.x - x_ode[:-1])
    before = np.abs(agent.x - x_ode[1:])
    return float(max(after.max(), before.max()))


def _deviation_one(args) -> float:
    params, n, start, horizon, seed, report, backend, ode = args
    traj, _ = simulate_agents(params, n, start, horizon, seed, report=report, backend=backend)
    return sup_deviation(traj, ode, horizon)


def meanfield_deviation(
    params: ModelParams,
    n: int,
    horizon: float,
    seeds: Sequence[int],
    start: AdoptionState = UNSEEDED,
    backend: Optional[str] = None,
    jobs: int = 1,
) -> DeviationStats:
    """Sup-norm gap between agent runs and the mean-field path, per seed."""
    if n < 10:
        raise DomainError(f"n must be at least 10, got {n!r}")
    seeds = tuple(seeds)
    if not seeds:
        raise InvalidParameterError("seed list is empty")
    report = analyze(params)
    ode = integrate(params, start, horizon, report=report)
    tasks = [(params, n, start, horizon, s, report, backend, ode) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            devs = list(pool.map(_deviation_one, tasks))
    else:
        devs = [_deviation_one(task) for task in tasks]
    arr = np.array(devs)
    return DeviationStats(n, seeds, tuple(devs), float(arr.mean()), float(arr.std(ddof=1)) if len(arr) > 1 else 0.0)


def phase_portrait(params: ModelParams, grid: int, report: Optional[EquilibriumReport] = None) -> list:
    """Rows ``(x, y, dx, dy, region)`` on the lattice ``i/(grid-1)`` inside the simplex."""
    if grid < 2:
        raise InvalidParameterError(f"grid must be at least 2, got {grid!r}")
    if report is None:
        report = analyze(params)
    regimes = RegimeMap(params, report)
    rows = []
    m = grid - 1
    for i in range(grid):
        x = i / m
        for j in range(grid - i):
            y = j / m
            dy, dx = regimes.at(x).field(y, x, params.gamma)
            rows.append((x, y, dx, dy, regimes.region(x)))
    return rows


def is_rest_point(regimes: RegimeMap, y: float, x: float, eps: float = 1e-12) -> bool:
    """True when the flow does not leave ``(y, x)``."""
    if regimes.is_break(x):
        return regimes.side_motion(y, x) is None
    dy, dx = regimes.at(x).field(y, x, regimes.params.gamma)
    return abs(dy) <= eps and abs(dx) <= eps


def equilibrium_set(params: ModelParams, report: EquilibriumReport, samples: int = 50) -> list:
    """Sampled rest points ``(x, y)``.

    Covers the diagonal ``x + y = 1`` where nobody buys and owners keep
    firewalls on, and the vertical segments above every threshold the flow
    sticks to (the enable threshold when adoption is interior).
    """
    regimes = RegimeMap(params, report)
    xs = sorted(set(np.linspace(0.0, 1.0, samples).tolist()) | set(regimes.breaks))
    points = []
    for x in xs:
        if is_rest_point(regimes, 1.0 - x, x):
            points.append((x, 1.0 - x))
    for b in regimes.breaks:
        for y in np.linspace(0.0, 1.0 - b, samples).tolist():
            if is_rest_point(regimes, y, b) and (b, y) not in points:
                points.append((b, y))
    for y in np.linspace(0.0, 1.0, samples).tolist():
        if is_rest_point(regimes, y, 0.0) and (0.0, y) not in points:
            points.append((0.0, y))
    return points
