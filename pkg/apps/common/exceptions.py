"""
Error hierarchy shared by the outage toolkit
"""


class OutageToolkitError(Exception):
    """Base class for every toolkit error"""

    message = "Outage toolkit error."

    def __init__(self, message=None):
        super().__init__(message or self.message)


class NumericFailure(OutageToolkitError):
    """A numerical routine could not reach the requested accuracy"""

    message = "Numerical evaluation failed."


class TruncationNotConverged(NumericFailure):
    """A truncated series still exceeded its tolerance at the last term"""

    message = "Series truncation did not converge."

    def __init__(self, message=None, k_max=None, last_term=None):
        super().__init__(message)
        self.k_max = k_max
        self.last_term = last_term


class ScenarioError(OutageToolkitError, ValueError):
    """Invalid system parameters"""

    message = "Invalid scenario parameters."


class InvalidThreshold(ScenarioError):
    message = "The SINR threshold must be strictly positive."


class InvalidChannelCount(ScenarioError):
    message = "N1 must be divisible by the number of channels K."


class EmptyChannel(OutageToolkitError):
    """No target candidate shares the investigated channel"""

    message = "No co-channel node is available as target."


class ConfigParseError(OutageToolkitError):
    """Malformed configuration text"""

    message = "Could not parse configuration."

    def __init__(self, message=None, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.key:
            where.append(f"key '{self.key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        return f"{prefix}{self.args[0]}"
