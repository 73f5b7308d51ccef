"""Adoption thresholds, equilibrium reached from a start state, and sensitivities.

The adoption gap ``f = G_E - G_N`` and the enable gap ``f' = f + c0`` split
``[0, 1]`` into intervals on which every ISP's best response is constant.
Roots are found by a uniform scan plus bisection; monotonicity of ``f`` is
never assumed, only checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import model
from ._numerics import scan_roots
from .errors import DomainError, InvalidParameterError, NotApplicableError
from .model import AdoptionState, ModelParams

DEFAULT_TOL = 1e-9
DEFAULT_CELLS = 1024

FULL = "full-adoption"
ZERO = "zero-adoption"
INTERIOR = "interior"
MULTI = "multi-root"

# |dx| below this (times gamma) counts as no motion when deciding whether a
# threshold is crossed.
_MOTION_EPS = 1e-9


class ThresholdResult(NamedTuple):
    value: Optional[float]
    roots: list
    classification: str


def _classify(roots: list, values: np.ndarray) -> str:
    if len(roots) > 1:
        return MULTI
    if roots:
        return INTERIOR
    return FULL if np.any(values > 0) else ZERO


def _threshold(func, params: ModelParams, tol: float, cells: int) -> ThresholdResult:
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    roots, _, values = scan_roots(lambda x: func(x, params), tol, cells)
    return ThresholdResult(roots[0] if roots else None, roots, _classify(roots, values))


def threshold_zeta(params: ModelParams, tol: float = DEFAULT_TOL, cells: int = DEFAULT_CELLS) -> ThresholdResult:
    """Smallest adoption level at which purchasing stops paying off."""
    return _threshold(model.adoption_gap, params, tol, cells)


def threshold_zeta_prime(params: ModelParams, tol: float = DEFAULT_TOL, cells: int = DEFAULT_CELLS) -> ThresholdResult:
    """Smallest adoption level at which owners prefer to disable."""
    return _threshold(model.enable_gap, params, tol, cells)


@dataclass(frozen=True)
class EquilibriumReport:
    zeta: Optional[float]
    zeta_prime: Optional[float]
    classification: str
    gap_monotone: bool
    roots: list
    roots_prime: list = field(default_factory=list)
    classification_prime: str = ZERO

    def __post_init__(self) -> None:
        if self.classification == INTERIOR and self.zeta is None:
            raise ValueError("interior classification needs zeta")
        if self.classification == MULTI and self.gap_monotone:
            raise ValueError("a monotone gap cannot have several roots")
        if self.classification in (FULL, ZERO) and self.roots:
            raise ValueError(f"{self.classification} excludes roots")


def analyze(params: ModelParams, tol: float = DEFAULT_TOL, cells: int = DEFAULT_CELLS) -> EquilibriumReport:
    """Thresholds, classification and numerically checked gap monotonicity."""
    z = threshold_zeta(params, tol, cells)
    zp = threshold_zeta_prime(params, tol, cells)
    slopes = model.gap_slope(np.linspace(0.0, 1.0, cells + 1), params)
    return EquilibriumReport(
        zeta=z.value,
        zeta_prime=zp.value,
        classification=z.classification,
        gap_monotone=bool(np.all(slopes < 0)),
        roots=z.roots,
        roots_prime=zp.roots,
        classification_prime=zp.classification,
    )


class Decisions(NamedTuple):
    """Switching probabilities of a deciding ISP: buy (n->e), enable (d->e), disable (e->d)."""

    buy: int
    enable: int
    disable: int

    def field(self, y: float, x: float, gamma: float) -> tuple[float, float]:
        dy = -gamma * y * self.buy
        dx = gamma * y * self.buy + gamma * (1.0 - x - y) * self.enable - gamma * x * self.disable
        return dy, dx

    @property
    def region(self) -> str:
        if self.buy:
            return "1"
        if self.disable:
            return "3"
        return "2"


def decisions_from_gaps(f: float, f_prime: float) -> Decisions:
    """Best responses given the two gaps; exact ties keep the current state."""
    return Decisions(int(f > 0), int(f_prime > 0), int(f_prime < 0))


class RegimeMap:
    """Piecewise-constant best responses over ``[0, 1]``.

    Breakpoints are the roots of both gaps.  At a breakpoint the decision
    tied there is "keep current state"; the other decision is taken from
    the adjacent intervals, where it does not change.
    """

    def __init__(self, params: ModelParams, report: EquilibriumReport):
        self.params = params
        self.report = report
        self.zeta_roots = set(report.roots)
        self.prime_roots = set(report.roots_prime)
        self.breaks = sorted(self.zeta_roots | self.prime_roots)
        edges = [0.0] + self.breaks + [1.0]
        self.intervals = list(zip(edges[:-1], edges[1:]))
        mids = np.array([0.5 * (lo + hi) for lo, hi in self.intervals])
        f = model.adoption_gap(mids, params)
        fp = model.enable_gap(mids, params)
        self.decisions = [decisions_from_gaps(a, b) for a, b in zip(f, fp)]

    def index(self, x: float) -> int:
        """Interval containing ``x`` (left-closed except at 0)."""
        return int(np.searchsorted(self.breaks, x, side="right"))

    def is_break(self, x: float) -> bool:
        return x in self.zeta_roots or x in self.prime_roots

    def tie_decisions(self, x: float) -> Decisions:
        above = self.decisions[self.index(x)]
        buy = 0 if x in self.zeta_roots else above.buy
        if x in self.prime_roots:
            return Decisions(buy, 0, 0)
        return Decisions(buy, above.enable, above.disable)

    def at(self, x: float) -> Decisions:
        if self.is_break(x):
            return self.tie_decisions(x)
        return self.decisions[self.index(x)]

    def region(self, x: float) -> str:
        return "boundary" if self.is_break(x) else self.decisions[self.index(x)].region

    def side_motion(self, y: float, x: float) -> Optional[int]:
        """At a breakpoint: +1/-1 if the flow leaves upward/downward, None if it sticks."""
        gamma = self.params.gamma
        i = self.index(x)
        _, dx_up = self.decisions[i].field(y, x, gamma)
        if dx_up > _MOTION_EPS * gamma:
            return 1
        _, dx_down = self.decisions[i - 1].field(y, x, gamma)
        if dx_down < -_MOTION_EPS * gamma:
            return -1
        return None


@dataclass(frozen=True)
class EquilibriumPoint:
    y_star: float
    x_star: float

    def __post_init__(self) -> None:
        model.check_state(self.y_star, self.x_star)


def equilibrium_from_initial(
    params: ModelParams,
    start: AdoptionState,
    tol: float = DEFAULT_TOL,
    report: Optional[EquilibriumReport] = None,
) -> EquilibriumPoint:
    """Rest point of the best-response flow started at ``start``.

    The flow is piecewise linear, so it is followed analytically from
    breakpoint to breakpoint.  From the unseeded start ``(1, 0)`` with an
    interior threshold this gives exactly ``(1 - zeta, zeta)``.
    """
    if not isinstance(start, AdoptionState):
        raise DomainError(f"start must be an AdoptionState, got {start!r}")
    if report is None:
        report = analyze(params, tol)
    regimes = RegimeMap(params, report)
    y, x = float(start.y), float(start.x)

    for _ in range(4 * len(regimes.breaks) + 8):
        if regimes.is_break(x):
            direction = regimes.side_motion(y, x)
            if direction is None:
                return EquilibriumPoint(y, x)
            i = regimes.index(x) if direction > 0 else regimes.index(x) - 1
        else:
            i = regimes.index(x)
        lo, hi = regimes.intervals[i]
        v = regimes.decisions[i]
        if v.buy:
            # y = y0 e^{-gt}, x + y -> 1; x reaches level h when e^{-gt} = (1-h)/(1-x0)
            if hi < 1.0:
                y, x = y * (1.0 - hi) / (1.0 - x), hi
                continue
            return EquilibriumPoint(0.0, 1.0)
        if v.enable:
            target = 1.0 - y
            if target <= x or abs(target - x) <= _MOTION_EPS:
                return EquilibriumPoint(y, x)
            if target > hi:
                x = hi
                continue
            return EquilibriumPoint(y, target)
        if v.disable:
            if lo > 0.0:
                x = lo
                continue
            return EquilibriumPoint(y, 0.0)
        return EquilibriumPoint(y, x)
    raise RuntimeError("best-response flow did not settle; regime map is inconsistent")


UNSEEDED = AdoptionState(y=1.0, x=0.0)


def unseeded_equilibrium(params: ModelParams, tol: float = DEFAULT_TOL) -> tuple[float, EquilibriumReport]:
    report = analyze(params, tol)
    point = equilibrium_from_initial(params, UNSEEDED, tol, report)
    return point.x_star, report


def _interior_x_star(params: ModelParams) -> float:
    # full floating-point precision so finite differences are not swamped by root error
    report = analyze(params, tol=np.finfo(float).tiny)
    x = equilibrium_from_initial(params, UNSEEDED, report=report).x_star
    if not 0.0 < x < 1.0 or x not in report.roots:
        raise NotApplicableError(
            f"no interior equilibrium from the unseeded start (classification {report.classification}, x*={x!r})"
        )
    return x


def _difference(func, value: float, delta: float, lo: float, hi: float, strict_lo: bool = False) -> float:
    """Centred difference of ``func`` at ``value``; one-sided if a side leaves ``[lo, hi]``."""
    step = abs(delta)
    if step == 0:
        raise InvalidParameterError("delta must be non-zero")
    below_ok = value - step > lo if strict_lo else value - step >= lo
    above_ok = value + step <= hi
    if below_ok and above_ok:
        return (func(value + step) - func(value - step)) / (2.0 * step)
    if above_ok:
        return (func(value + step) - func(value)) / step
    if below_ok:
        return (func(value) - func(value - step)) / step
    raise NotApplicableError(f"step {step!r} leaves the admissible range [{lo!r}, {hi!r}] on both sides")


def _x_star_at(params: ModelParams, **changes: float) -> float:
    try:
        shifted = params.replace(**changes)
    except InvalidParameterError as exc:
        raise NotApplicableError(f"shifted parameters are invalid: {exc}") from exc
    return _interior_x_star(shifted)


def sensitivity_pi1(params: ModelParams, delta: float = 1e-4, tol: float = DEFAULT_TOL) -> float:
    """Finite-difference ``dx*/dPi1`` at the unseeded equilibrium.

    ``pi1`` is re-derived from ``alpha`` at each shifted ``Pi1`` when the
    coupling is known.  Roots are solved to machine precision; ``tol`` only
    validates the call.
    """
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    p = params.profile
    _interior_x_star(params)
    return _difference(lambda v: _x_star_at(params, Pi1=v), p.Pi1, delta, p.pi0, p.Pi0)


def predicted_r_sign(params: ModelParams) -> int:
    """Sign of ``c*C1I - c0*(C1I*mu + C2I)``, which fixes the direction of ``dx*/dr``."""
    k, mu = params.costs, params.threat.mu
    value = k.c * k.c1i - k.c0 * (k.c1i * mu + k.c2i)
    return (value > 0) - (value < 0)


class RSensitivity(NamedTuple):
    estimate: float
    predicted_sign: int
    observed_sign: int


def sensitivity_r(params: ModelParams, delta: Optional[float] = None, tol: float = DEFAULT_TOL) -> RSensitivity:
    """Finite-difference ``dx*/dr`` with the sign predicted by the cost structure.

    ``observed_sign`` is 0 when ``|estimate| < tol``.
    """
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    r = params.costs.r
    if delta is None:
        delta = 1e-4 * r
    _interior_x_star(params)
    est = _difference(lambda v: _x_star_at(params, r=v), r, delta, 0.0, math.inf, strict_lo=True)
    observed = 0 if abs(est) < tol else (1 if est > 0 else -1)
    return RSensitivity(est, predicted_r_sign(params), observed)


def limit_gap(x, params: ModelParams):
    g_n, g_e = model.limit_scaled_utilities(x, params)
    return g_e - g_n


def limit_equilibrium(params: ModelParams, tol: float = DEFAULT_TOL, cells: int = DEFAULT_CELLS) -> ThresholdResult:
    """Equilibrium level of farsighted ISPs (``r -> 0``) from the unseeded start.

    Without a purchase fee the buy and enable thresholds coincide, so the
    level is the first root of the long-run gap when buying pays at ``x = 0``,
    1.0 when the gap is positive everywhere and 0.0 when nobody starts buying.
    """
    res = _threshold(limit_gap, params, tol, cells)
    if res.value is None:
        return ThresholdResult(1.0 if res.classification == FULL else 0.0, [], res.classification)
    if not limit_gap(0.0, params) > 0:
        return ThresholdResult(0.0, res.roots, res.classification)
    return res
