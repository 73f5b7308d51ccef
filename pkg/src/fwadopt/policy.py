"""Welfare, security and regulation metrics built on the equilibrium layer.

Utilities are negative (they are expected costs), so ratios such as the
price of anarchy ``U(x_hat) / U(x*)`` come out below one when the optimum
is better; ``inefficiency = |1 - poa|`` is reported alongside.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import model
from ._numerics import golden_max
from .equilibrium import DEFAULT_TOL, INTERIOR, limit_equilibrium, unseeded_equilibrium
from .errors import DegenerateInstanceError, DomainError, InvalidParameterError
from .model import ModelParams, coupled_pi1

VIEWS = ("dec-social", "dec-individual", "dec-security", "centralized")
GRID = 1024


def social_utility(x, params: ModelParams):
    """Population-average utility when a fraction ``x`` adopts."""
    return x * model.utility_adopter(x, params) + (1.0 - x) * model.utility_nonadopter(x, params)


def security_utility(x, params: ModelParams):
    """Average utility with adoption costs added back: expected intrusion damage only."""
    k = params.costs
    return social_utility(x, params) + x * (k.c / k.r + k.c0)


def social_utility_slope(x, params: ModelParams):
    d_n, d_e = model.utility_slopes(x, params)
    return model.adoption_gap(x, params) + x * d_e + (1.0 - x) * d_n


def social_optimum(params: ModelParams, tol: float = DEFAULT_TOL, grid: int = GRID) -> float:
    """Adoption level maximising ``U`` on ``[0, 1]``.

    The global grid maximum is refined by golden-section search inside its
    neighbouring cells; ties go to the larger level.
    """
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    xs = np.linspace(0.0, 1.0, grid + 1)
    us = social_utility(xs, params)
    i = int(len(us) - 1 - np.argmax(us[::-1]))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid)]
    u = lambda z: float(social_utility(z, params))  # noqa: E731
    refined = golden_max(u, float(lo), float(hi), tol)
    best_x, best_u = float(xs[i]), float(us[i])
    if u(refined) > best_u:
        best_x, best_u = refined, u(refined)
    return best_x


class AnarchyPrice(NamedTuple):
    poa: float
    pos: float
    inefficiency: float
    x_star: float
    x_hat: float


def price_of_anarchy(params: ModelParams, tol: float = DEFAULT_TOL) -> AnarchyPrice:
    """``U(x_hat) / U(x*)`` with ``x*`` the unseeded equilibrium.

    Price of stability equals it because the equilibrium is unique given the
    start state.
    """
    x_star, _ = unseeded_equilibrium(params, tol)
    x_hat = social_optimum(params, tol)
    u_star = float(social_utility(x_star, params))
    if u_star == 0.0:
        raise DegenerateInstanceError("social utility at equilibrium is zero; price of anarchy undefined")
    poa = float(social_utility(x_hat, params)) / u_star
    return AnarchyPrice(poa, poa, abs(1.0 - poa), x_star, x_hat)


class CurvePoint(NamedTuple):
    Pi1: float
    pi1: float
    x_star: float
    objective: float
    interior: bool


def _view_point(params: ModelParams, Pi1: float, view: str, tol: float) -> CurvePoint:
    shifted = params.replace(Pi1=Pi1)
    x_star, report = unseeded_equilibrium(shifted, tol)
    interior = report.classification == INTERIOR and 0.0 < x_star < 1.0
    if view == "dec-social":
        obj = social_utility(x_star, shifted)
    elif view == "dec-individual":
        obj = model.utility_adopter(x_star, shifted)
    elif view == "dec-security":
        obj = security_utility(x_star, shifted)
    else:
        # a central planner chooses x freely for each Pi1
        obj = social_utility(social_optimum(shifted, tol), shifted)
    return CurvePoint(Pi1, shifted.profile.pi1, x_star, float(obj), interior)


def optimum_pi1(
    params: ModelParams, view: str, grid: int = 64, tol: float = DEFAULT_TOL, jobs: int = 1
) -> tuple[float, list]:
    """Regulator's best outgoing success probability ``Pi1`` under ``view``.

    Sweeps ``Pi1`` over ``[pi0, Pi0]`` on ``grid + 1`` points, recomputing
    ``pi1`` from the coupling and the unseeded equilibrium at each point.
    The decentralised views return the curve's argmax (ties to larger
    ``Pi1``); the centralised view returns ``pi0``, maximum outgoing
    protection, since every utility decreases in ``Pi1`` at fixed ``x``.
    """
    if view not in VIEWS:
        raise InvalidParameterError(f"unknown view {view!r}; expected one of {VIEWS}")
    if params.profile.alpha is None:
        raise InvalidParameterError("optimum_pi1 needs the coupling alpha to re-derive pi1")
    if grid < 16:
        raise InvalidParameterError(f"grid must be at least 16, got {grid!r}")
    p = params.profile
    values = np.linspace(p.pi0, p.Pi0, grid + 1).tolist()
    values[-1] = p.Pi0
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            curve = list(pool.map(lambda v: _view_point(params, v, view, tol), values))
    else:
        curve = [_view_point(params, v, view, tol) for v in values]
    if view == "centralized":
        return p.pi0, curve
    objectives = np.array([c.objective for c in curve])
    best = int(len(objectives) - 1 - np.argmax(objectives[::-1]))
    return curve[best].Pi1, curve


def limit_social_utility(x, params: ModelParams):
    g_n, g_e = model.limit_scaled_utilities(x, params)
    return x * g_e + (1.0 - x) * g_n


def limit_security_utility(x, params: ModelParams):
    g_n, g_e = model.limit_scaled_utilities(x, params)
    return x * (g_e + params.costs.c) + (1.0 - x) * g_n


def _shortsightedness(params: ModelParams, tol: float, welfare) -> float:
    x_r, _ = unseeded_equilibrium(params, tol)
    x_far = limit_equilibrium(params, tol).value
    denom = float(welfare(x_r, params))
    if denom == 0.0:
        raise DegenerateInstanceError("long-run welfare at the discounted equilibrium is zero")
    return float(welfare(x_far, params)) / denom


def soposh(params: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Social price of shortsightedness: long-run ``U`` at the farsighted vs the actual equilibrium."""
    return _shortsightedness(params, tol, limit_social_utility)


def seposh(params: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Security price of shortsightedness, with adoption costs excluded."""
    return _shortsightedness(params, tol, limit_security_utility)


@dataclass
class PolicyReport:
    x_star: float
    x_hat: float
    u_star: float
    u_hat: float
    v_star: float
    v_hat: float
    poa: float
    pos: float
    inefficiency: float
    soposh: Optional[float]
    seposh: Optional[float]
    pi1_views: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.u_hat < self.u_star - 1e-12:
            raise ValueError("social optimum below equilibrium welfare")


def policy_report(params: ModelParams, tol: float = DEFAULT_TOL, grid: int = 64, jobs: int = 1) -> PolicyReport:
    anarchy = price_of_anarchy(params, tol)
    x_star, x_hat = anarchy.x_star, anarchy.x_hat
    try:
        so, se = soposh(params, tol), seposh(params, tol)
    except DegenerateInstanceError:
        so = se = None
    views, curves = {}, {}
    if params.profile.alpha is not None:
        for view in VIEWS:
            views[view], curves[view] = optimum_pi1(params, view, grid, tol, jobs)
    return PolicyReport(
        x_star=x_star,
        x_hat=x_hat,
        u_star=float(social_utility(x_star, params)),
        u_hat=float(social_utility(x_hat, params)),
        v_star=float(security_utility(x_star, params)),
        v_hat=float(security_utility(x_hat, params)),
        poa=anarchy.poa,
        pos=anarchy.pos,
        inefficiency=anarchy.inefficiency,
        soposh=so,
        seposh=se,
        pi1_views=views,
        curves=curves,
    )


__all__ = [
    "VIEWS", "social_utility", "security_utility", "social_utility_slope", "social_optimum",
    "price_of_anarchy", "coupled_pi1", "optimum_pi1", "soposh", "seposh", "PolicyReport",
    "policy_report", "limit_social_utility", "limit_security_utility", "DomainError",
]
