"""Domain types and closed-form ISP utilities.

Utilities are expected discounted payoffs (negative costs) of a risk-neutral
ISP that best-responds to the current fraction ``x`` of ISPs running an
enabled firewall.  Every function taking ``x`` accepts a float or a numpy
array and returns the same shape.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError, InvalidParameterError

ArrayLike = Union[float, np.ndarray]

_ORDER_EPS = 1e-12


def coupled_pi1(pi0: float, Pi1: float, alpha: float) -> float:
    """Both-protected success probability under the alpha coupling.

    ``alpha = 0`` treats the two firewalls as independent filters
    (``pi0 * Pi1``); ``alpha = 1`` makes them mutually inclusive (``pi0``).
    """
    for name, value in (("pi0", pi0), ("Pi1", Pi1), ("alpha", alpha)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return pi0 * Pi1 + alpha * (pi0 - pi0 * Pi1)


@dataclass(frozen=True)
class FirewallProfile:
    """Intrusion success probabilities by (attacker ISP, target ISP) protection.

    ``pi1``: both protected, ``pi0``: only the target, ``Pi1``: only the
    attacker, ``Pi0``: neither.  ``Pi0`` is conventionally 1 but is kept
    symbolic.  ``alpha`` is recorded when ``pi1`` was derived from the
    coupling rule and is ``None`` otherwise.
    """

    pi0: float
    pi1: float
    Pi0: float
    Pi1: float
    alpha: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("pi0", "pi1", "Pi0", "Pi1"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or math.isnan(value):
                raise InvalidParameterError(f"{name} must be a number, got {value!r}")
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
        chain = [("pi1", self.pi1), ("pi0", self.pi0), ("Pi1", self.Pi1), ("Pi0", self.Pi0)]
        for (lo_name, lo), (hi_name, hi) in zip(chain, chain[1:]):
            if lo > hi + _ORDER_EPS:
                raise InvalidParameterError(
                    f"{lo_name}={lo!r} exceeds {hi_name}={hi!r}; success probabilities "
                    "must be ordered 0 <= pi1 <= pi0 <= Pi1 <= Pi0 <= 1"
                )
        if self.pi0 * self.Pi1 > self.pi1 + _ORDER_EPS:
            raise InvalidParameterError(
                f"pi1={self.pi1!r} is below pi0*Pi1={self.pi0 * self.Pi1!r}; "
                "cooperating firewalls (pi1 < pi0*Pi1) are not modelled"
            )
        if self.alpha is not None:
            if not 0.0 <= self.alpha <= 1.0:
                raise InvalidParameterError(f"alpha must lie in [0, 1], got {self.alpha!r}")
            expected = coupled_pi1(self.pi0, self.Pi1, self.alpha)
            if abs(expected - self.pi1) > 1e-12:
                raise InvalidParameterError(
                    f"pi1={self.pi1!r} disagrees with the alpha coupling ({expected!r})"
                )

    @classmethod
    def coupled(cls, pi0: float, Pi1: float, alpha: float, Pi0: float = 1.0) -> "FirewallProfile":
        return cls(pi0=pi0, pi1=coupled_pi1(pi0, Pi1, alpha), Pi0=Pi0, Pi1=Pi1, alpha=alpha)

    def with_Pi1(self, Pi1: float) -> "FirewallProfile":
        """Same firewall with a different outgoing success probability.

        ``pi1`` is re-derived when the coupling is known, otherwise kept.
        """
        if self.alpha is not None:
            return FirewallProfile.coupled(self.pi0, Pi1, self.alpha, self.Pi0)
        return dataclasses.replace(self, Pi1=Pi1)


@dataclass(frozen=True)
class CostModel:
    """Firewall and intrusion costs plus the ISPs' discount factor ``r``.

    ``r = 0`` is admitted so that long-run (undiscounted) quantities can be
    evaluated; discounted utilities reject it.
    """

    c0: float
    c: float
    c1i: float
    c2i: float
    r: float

    def __post_init__(self) -> None:
        for name in ("c0", "c", "c1i", "c2i", "r"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be a finite number, got {value!r}")
            if value < 0:
                raise InvalidParameterError(f"{name} must be non-negative, got {value!r}")


@dataclass(frozen=True)
class ThreatEnvironment:
    """Per-ISP intrusion intensity ``lam`` and detection/blocking rate ``mu``."""

    lam: float
    mu: float

    def __post_init__(self) -> None:
        for name in ("lam", "mu"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise InvalidParameterError(f"{name} must be a positive number, got {value!r}")


# Flat parameter names, as used by config files and sweeps.
FLAT_KEYS = ("mu", "lambda", "gamma", "r", "c0", "c", "c1i", "c2i", "pi0", "pi1", "Pi0", "Pi1", "alpha")


@dataclass(frozen=True)
class ModelParams:
    profile: FirewallProfile
    costs: CostModel
    threat: ThreatEnvironment
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.gamma, (int, float)) or not math.isfinite(self.gamma) or self.gamma <= 0:
            raise InvalidParameterError(f"gamma must be a positive number, got {self.gamma!r}")

    @classmethod
    def from_flat(
        cls,
        *,
        mu: float,
        lam: float,
        r: float,
        c0: float,
        c: float,
        c1i: float,
        c2i: float,
        pi0: float,
        Pi1: float,
        Pi0: float = 1.0,
        pi1: Optional[float] = None,
        alpha: Optional[float] = None,
        gamma: float = 1.0,
    ) -> "ModelParams":
        if (pi1 is None) == (alpha is None):
            raise InvalidParameterError("exactly one of pi1 and alpha must be given")
        if alpha is not None:
            profile = FirewallProfile.coupled(pi0, Pi1, alpha, Pi0)
        else:
            profile = FirewallProfile(pi0=pi0, pi1=pi1, Pi0=Pi0, Pi1=Pi1)
        return cls(
            profile=profile,
            costs=CostModel(c0=c0, c=c, c1i=c1i, c2i=c2i, r=r),
            threat=ThreatEnvironment(lam=lam, mu=mu),
            gamma=gamma,
        )

    def as_flat(self) -> dict:
        p, k, t = self.profile, self.costs, self.threat
        flat = {
            "mu": t.mu, "lambda": t.lam, "gamma": self.gamma, "r": k.r,
            "c0": k.c0, "c": k.c, "c1i": k.c1i, "c2i": k.c2i,
            "pi0": p.pi0, "Pi0": p.Pi0, "Pi1": p.Pi1,
        }
        if p.alpha is None:
            flat["pi1"] = p.pi1
        else:
            flat["alpha"] = p.alpha
        return flat

    def replace(self, **changes: float) -> "ModelParams":
        """Copy with some flat parameters changed.

        When the coupling ``alpha`` is known, ``pi1`` follows any change of
        ``pi0``/``Pi1``/``alpha``; setting ``pi1`` explicitly drops the coupling.
        """
        unknown = set(changes) - set(FLAT_KEYS)
        if unknown:
            raise InvalidParameterError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        flat = self.as_flat()
        if "pi1" in changes:
            flat.pop("alpha", None)
        if "alpha" in changes:
            flat.pop("pi1", None)
        flat.update(changes)
        flat["lam"] = flat.pop("lambda")
        return ModelParams.from_flat(**flat)


@dataclass(frozen=True)
class AdoptionState:
    """Fractions ``y`` yet to purchase and ``x`` purchased-and-enabled."""

    y: float
    x: float

    def __post_init__(self) -> None:
        check_state(self.y, self.x)

    @property
    def disabled(self) -> float:
        return max(0.0, 1.0 - self.x - self.y)


def check_state(y: float, x: float, eps: float = 1e-12) -> None:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"state must be finite, got (y={y!r}, x={x!r})")
    if x < -eps or y < -eps or x + y > 1.0 + eps:
        raise DomainError(f"invalid adoption state (y={y!r}, x={x!r}); need x, y >= 0 and x + y <= 1")


def _check_fraction(x: ArrayLike, name: str = "x") -> None:
    arr = np.asarray(x, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")


def _require_discounting(costs: CostModel) -> None:
    if not costs.r > 0:
        raise InvalidParameterError(f"discounted utilities need r > 0, got r={costs.r!r}")


def coefficient_a(costs: CostModel, threat: ThreatEnvironment) -> float:
    """Discounted cost scale of one intrusion episode, ``(C1I (r + mu) + C2I) / r``."""
    _require_discounting(costs)
    return (costs.c1i * (costs.r + threat.mu) + costs.c2i) / costs.r


def mix_rate(x: ArrayLike, p_protected: float, p_unprotected: float, threat: ThreatEnvironment) -> ArrayLike:
    """Successful-intrusion rate when a fraction ``x`` of attackers sit behind a firewall."""
    _check_fraction(x)
    for name, p in (("p_protected", p_protected), ("p_unprotected", p_unprotected)):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    return threat.lam * (p_protected * x + p_unprotected * (1.0 - x))


def _eta_unprotected(x: ArrayLike, params: ModelParams) -> ArrayLike:
    p = params.profile
    return mix_rate(x, p.Pi1, p.Pi0, params.threat)


def _eta_protected(x: ArrayLike, params: ModelParams) -> ArrayLike:
    p = params.profile
    return mix_rate(x, p.pi1, p.pi0, params.threat)


def conditional_costs(x: float, params: ModelParams) -> tuple[float, float]:
    """Expected discounted intrusion cost of a non-adopter given it is (A) or is not (B) intruded."""
    a = coefficient_a(params.costs, params.threat)
    r, mu = params.costs.r, params.threat.mu
    eta = _eta_unprotected(x, params)
    return a * (r + eta) / (r + mu + eta), a * eta / (r + mu + eta)


def stationary_intrusion_probability(x: ArrayLike, params: ModelParams) -> ArrayLike:
    eta = _eta_unprotected(x, params)
    return eta / (eta + params.threat.mu)


def _exposure(eta: ArrayLike, mu: float) -> ArrayLike:
    return eta / (mu + eta)


def utility_nonadopter(x: ArrayLike, params: ModelParams) -> ArrayLike:
    """``G_N(x)``: utility of staying unprotected (not purchased, or disabled)."""
    a = coefficient_a(params.costs, params.threat)
    return -a * _exposure(_eta_unprotected(x, params), params.threat.mu)


def utility_adopter(x: ArrayLike, params: ModelParams) -> ArrayLike:
    """``G_E(x)``: utility of purchasing and enabling, purchase fee included."""
    k = params.costs
    a = coefficient_a(k, params.threat)
    return -k.c0 - k.c / k.r - a * _exposure(_eta_protected(x, params), params.threat.mu)


def utility_owner_enabled(x: ArrayLike, params: ModelParams) -> ArrayLike:
    """``G_E'(x)``: utility of enabling a firewall that is already owned."""
    return utility_adopter(x, params) + params.costs.c0


def adoption_gap(x: ArrayLike, params: ModelParams) -> ArrayLike:
    """Purchase incentive ``G_E(x) - G_N(x)``."""
    return utility_adopter(x, params) - utility_nonadopter(x, params)


def enable_gap(x: ArrayLike, params: ModelParams) -> ArrayLike:
    """Incentive of an owner to keep the firewall on, ``G_E'(x) - G_N(x)``."""
    return utility_owner_enabled(x, params) - utility_nonadopter(x, params)


def utility_slopes(x: ArrayLike, params: ModelParams) -> tuple[ArrayLike, ArrayLike]:
    """Closed-form ``(dG_N/dx, dG_E/dx)``."""
    p, mu, lam = params.profile, params.threat.mu, params.threat.lam
    a = coefficient_a(params.costs, params.threat)
    d_n = mu * a * lam * (p.Pi0 - p.Pi1) / (mu + _eta_unprotected(x, params)) ** 2
    d_e = mu * a * lam * (p.pi0 - p.pi1) / (mu + _eta_protected(x, params)) ** 2
    return d_n, d_e


def gap_slope(x: ArrayLike, params: ModelParams) -> ArrayLike:
    """``D(x)``, the derivative of the adoption gap."""
    d_n, d_e = utility_slopes(x, params)
    return d_e - d_n


def limit_scaled_utilities(x: ArrayLike, params: ModelParams) -> tuple[ArrayLike, ArrayLike]:
    """Limits of ``r * G_N`` and ``r * G_E`` as ``r -> 0`` (long-run cost rates)."""
    k, mu = params.costs, params.threat.mu
    scale = k.c1i * mu + k.c2i
    g_n = -scale * _exposure(_eta_unprotected(x, params), mu)
    g_e = -k.c - scale * _exposure(_eta_protected(x, params), mu)
    return g_n, g_e
