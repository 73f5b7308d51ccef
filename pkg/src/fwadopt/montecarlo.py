"""Monte-Carlo estimate of a non-adopter's discounted intrusion cost.

Simulates the alternating intruded/clean process directly: successful
intrusions arrive at rate ``eta`` while clean, each costs ``C1I`` on arrival
and ``C2I`` per unit time until detection at rate ``mu``.  Costs are
discounted at rate ``r``.  The initial state is drawn from the stationary
law of the process.  Used as an independent check of the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import InvalidParameterError
from .model import ModelParams

# paths stop once the discount factor drops below this
CUTOFF = 1e-13


@dataclass(frozen=True)
class CostEstimate:
    mean: float
    stderr: float
    paths: int


def discounted_intrusion_cost(
    eta: float, mu: float, r: float, c1i: float, c2i: float, paths: int, seed: int, block: int = 250_000
) -> CostEstimate:
    """Mean discounted cost over ``paths`` independent sample paths."""
    if paths < 2:
        raise InvalidParameterError(f"need at least 2 paths, got {paths!r}")
    if not r > 0 or not mu > 0 or eta < 0:
        raise InvalidParameterError("need r > 0, mu > 0 and eta >= 0")
    rng = np.random.default_rng(seed)
    total = np.empty(paths)
    p_intruded = eta / (eta + mu)
    for start in range(0, paths, block):
        m = min(block, paths - start)
        intruded = rng.random(m) < p_intruded
        cost = np.zeros(m)
        t = np.zeros(m)
        if eta > 0:
            # clean paths wait for their first intrusion
            t[~intruded] = rng.exponential(1.0 / eta, int((~intruded).sum()))
        else:
            t[:] = np.inf
        alive = np.flatnonzero(np.exp(-r * t) > CUTOFF)
        while alive.size:
            ta = t[alive]
            repair = rng.exponential(1.0 / mu, alive.size)
            gap = rng.exponential(1.0 / eta, alive.size)
            episode = c1i + c2i * (-np.expm1(-r * repair)) / r
            cost[alive] += np.exp(-r * ta) * episode
            ta = ta + repair + gap
            t[alive] = ta
            alive = alive[np.exp(-r * ta) > CUTOFF]
        total[start:start + m] = cost
    return CostEstimate(float(total.mean()), float(total.std(ddof=1) / np.sqrt(paths)), paths)


def simulate_nonadopter_utility(x: float, params: ModelParams, paths: int = 1_000_000, seed: int = 0) -> CostEstimate:
    """Monte-Carlo ``G_N(x)``: the negated discounted intrusion cost."""
    p, k = params.profile, params.costs
    eta = float(model.mix_rate(x, p.Pi1, p.Pi0, params.threat))
    est = discounted_intrusion_cost(eta, params.threat.mu, k.r, k.c1i, k.c2i, paths, seed)
    return CostEstimate(-est.mean, est.stderr, est.paths)
