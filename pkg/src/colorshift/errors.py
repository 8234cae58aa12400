"""Exception types shared across the toolkit."""


class DataFormatError(ValueError):
    """An input file or byte stream violates its declared format."""


class TransportError(RuntimeError):
    """The connection to a remote classifier failed mid-query.

    Raised instead of counting the query as an attack trial, so trial
    budgets stay exact.
    """


class RemoteProtocolError(RuntimeError):
    """A remote classifier answered with a malformed or error response."""


class LabelRangeError(RemoteProtocolError):
    """A remote classifier returned a label outside [0, num_classes)."""
