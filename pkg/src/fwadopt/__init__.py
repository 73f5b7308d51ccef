"""Firewall adoption among ISPs: utilities, equilibria, dynamics and policy metrics."""

from .dynamics import Trajectory, integrate, meanfield_deviation, phase_portrait, simulate_agents
from .equilibrium import (
    UNSEEDED,
    EquilibriumReport,
    analyze,
    equilibrium_from_initial,
    limit_equilibrium,
    sensitivity_pi1,
    sensitivity_r,
    threshold_zeta,
    threshold_zeta_prime,
    unseeded_equilibrium,
)
from .errors import (
    ConfigError,
    DegenerateInstanceError,
    DomainError,
    FirewallModelError,
    InvalidParameterError,
    NotApplicableError,
)
from .model import (
    AdoptionState,
    CostModel,
    FirewallProfile,
    ModelParams,
    ThreatEnvironment,
    coupled_pi1,
    utility_adopter,
    utility_nonadopter,
    utility_owner_enabled,
)
from .policy import (
    PolicyReport,
    optimum_pi1,
    policy_report,
    price_of_anarchy,
    security_utility,
    seposh,
    social_optimum,
    social_utility,
    soposh,
)

__version__ = "0.1.0"
