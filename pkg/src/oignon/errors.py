"""Exception hierarchy shared across the package."""


class OignonError(Exception):
    """Base class for all errors raised by this package."""


class NotFoundError(OignonError):
    """The requested work or author does not exist upstream."""


class TransportError(OignonError):
    """Network or IO failure that persisted through retries."""


class RateLimitedError(TransportError):
    """Upstream kept answering 429 after exponential backoff was exhausted."""


class EmptySnapshotError(OignonError):
    """A snapshot file contained zero valid records."""


class InconsistentInputsError(OignonError):
    """Export inputs disagree on which nodes the graph contains."""


class UnknownSelectionError(OignonError):
    """A style selection referenced a work that is not a graph node."""
