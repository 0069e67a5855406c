"""Exception types shared across the package."""


class EdgemendError(Exception):
    """Base class for domain errors raised by this package."""


class GraphFormatError(EdgemendError):
    """Raised when an edge-list or vector file cannot be parsed or violates
    the row-stochastic contract. Carries the offending line number when
    available."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(EdgemendError):
    """Raised on malformed configuration files or unknown keys."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotConvergedError(EdgemendError):
    """Power iteration failed to reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class MissingMfptError(EdgemendError):
    """A passage-time entry required by a downstream formula is not covered
    by the supplied table."""


class StallError(EdgemendError):
    """The iterative repair loop observed a non-decreasing objective across
    three consecutive batches. Carries the partial trajectory and the graph
    state at abort time."""

    def __init__(self, message, trajectory=None, graph=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.graph = graph
