"""Exception hierarchy.

Two families matter to callers: :class:`DataError` for bad inputs
(tables, graphs, specs) and :class:`ResourceLimitError` for enumeration
guards. The CLI maps them to exit codes 2 and 3.
"""


class BdmGraphError(Exception):
    """Base class for all package errors."""


class DataError(BdmGraphError, ValueError):
    """Input data is malformed or violates a contract."""


class ResourceLimitError(BdmGraphError):
    """A request would exceed an enumeration guard."""
