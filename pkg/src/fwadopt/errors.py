"""Exception types raised by the library."""


class FirewallModelError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(FirewallModelError, ValueError):
    """A model parameter or solver knob is out of its admissible range."""


class DomainError(FirewallModelError, ValueError):
    """An evaluation point (adoption level, state) lies outside its domain."""


class NotApplicableError(FirewallModelError):
    """The requested quantity is undefined for this instance (e.g. no interior equilibrium)."""


class DegenerateInstanceError(FirewallModelError, ArithmeticError):
    """A ratio or normalisation has a zero denominator."""


class ConfigError(FirewallModelError, ValueError):
    """A configuration file could not be loaded."""
