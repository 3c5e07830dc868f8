"""Exception hierarchy shared by all graphsim modules."""


class GraphsimError(Exception):
    """Base class for every error raised by graphsim."""


class InvalidArgument(GraphsimError, ValueError):
    """An input violates an operation's precondition."""


class InvalidPlan(InvalidArgument):
    """A heterodyne detection plan is inconsistent with itself or its grid."""


class ConfigError(GraphsimError):
    """A scenario or plan config cannot be resolved.

    Attributes:
        key_path: dotted path of the offending key, if known.
    """

    def __init__(self, message: str, key_path: str = ""):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class ComputationError(GraphsimError):
    """A numerical evaluation produced a non-finite or non-physical value."""
