"""Reference parameter sets shared by the test modules."""

import numpy as np

from fwadopt.equilibrium import INTERIOR, analyze
from fwadopt.model import ModelParams

R1_FLAT = dict(mu=1.0, lam=0.5, gamma=1.0, r=0.5, c0=0.1, c=0.4, c1i=1.0, c2i=1.0, pi0=0.3, Pi0=1.0, Pi1=0.4)


def r1(**changes) -> ModelParams:
    flat = dict(R1_FLAT, alpha=0.0)
    flat.update(changes)
    if "pi1" in changes:
        flat.pop("alpha")
    return ModelParams.from_flat(**flat)


def random_interior(count: int, seed: int = 7, alpha: bool = True) -> list:
    """Instances with a decreasing gap and an interior buy threshold."""
    rng = np.random.default_rng(seed)
    found = []
    while len(found) < count:
        mu = rng.uniform(0.5, 2.0)
        pi0 = rng.uniform(0.1, 0.9)
        flat = dict(
            mu=mu,
            lam=rng.uniform(0.05, 1.0) * mu,
            gamma=1.0,
            r=rng.uniform(0.1, 2.0),
            c0=rng.uniform(0.0, 0.3),
            c=rng.uniform(0.0, 0.8),
            c1i=rng.uniform(0.2, 2.0),
            c2i=rng.uniform(0.2, 2.0),
            pi0=pi0,
            Pi0=1.0,
            Pi1=rng.uniform(pi0, 0.95),
        )
        if alpha:
            flat["alpha"] = rng.uniform(0.0, 0.9)
        else:
            flat["pi1"] = pi0 * flat["Pi1"]
        p = ModelParams.from_flat(**flat)
        rep = analyze(p)
        if rep.classification == INTERIOR and rep.gap_monotone and 0.02 < rep.zeta < 0.98:
            found.append(p)
    return found
