"""Exception types raised by layerscope."""


class LayerscopeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LayerscopeError, ValueError):
    """An argument lies outside the domain of a formula."""


class SingularityError(LayerscopeError, ZeroDivisionError):
    """A closed-form expression hit a vanishing denominator."""


class SolverError(LayerscopeError, RuntimeError):
    """The forward solver could not produce a field."""


class QuadratureError(LayerscopeError, RuntimeError):
    """An oscillatory quadrature exceeded its panel budget."""


class ConfigError(LayerscopeError, ValueError):
    """Invalid experiment configuration.

    ``key`` holds the dotted path of the offending entry, e.g. ``"media.k_plus"``.
    """

    def __init__(self, key, message):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}")
