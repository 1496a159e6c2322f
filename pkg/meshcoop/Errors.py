"""
    Errors.py

    Contains the exception family raised by meshcoop.

    Every exception derives from ``MeshcoopError`` so callers (and the command-line interface) can catch
    the whole family at once, while still inheriting from the closest built-in exception type.
"""


class MeshcoopError(Exception):
    """Base class for every error raised by meshcoop."""


class ValidationError(MeshcoopError, ValueError):
    """Raised when an invariant of a network, parameter set or allocation is violated."""

    def __init__(self, message: str, offenders: list | None = None):
        """Creates a new validation error.

        Args:
            message (``str``): Human readable description of the problem.
            offenders (``list | None``, optional): The offending items (node ids, session ids, ...). Defaults to None.
        """
        self.offenders = list(offenders) if offenders else []

        if self.offenders:
            message = f"{message} Offenders: {', '.join(str(item) for item in self.offenders)}."

        super().__init__(message)


class DomainError(MeshcoopError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class SizeError(MeshcoopError, ValueError):
    """Raised when an enumeration would exceed its size guard."""


class NumericFailureError(MeshcoopError, RuntimeError):
    """Raised when a solver cannot certify its own solution within tolerance."""


class InfeasibleDemandError(MeshcoopError, RuntimeError):
    """Raised when strict-mode rate requirements cannot be served jointly."""

    def __init__(self, message: str, sessions: list | None = None):
        self.sessions = list(sessions) if sessions else []

        if self.sessions:
            message = f"{message} Blocking sessions: {', '.join(str(item) for item in self.sessions)}."

        super().__init__(message)


class IncompleteGameError(MeshcoopError, KeyError):
    """Raised when a characteristic function lacks values for some coalitions."""

    def __init__(self, missing: list):
        self.missing = list(missing)
        super().__init__(f"Characteristic function is missing coalitions: {', '.join(str(item) for item in self.missing)}")

    def __str__(self):
        return self.args[0]


class UnsupportedDimensionError(MeshcoopError, ValueError):
    """Raised when a plot is requested for a game it cannot represent."""


class NetworkFormatError(MeshcoopError, ValueError):
    """Raised when a network file is malformed."""

    def __init__(self, path: str, message: str):
        """Creates a new format error.

        Args:
            path (``str``): The path of the offending field, e.g. ``sessions[2].rate_req``.
            message (``str``): What is wrong with it.
        """
        self.path = path
        super().__init__(f"{path}: {message}")
