"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: DataFormatError -> 2,
ContractError -> 3, InvariantError -> 4.
"""


class LvqError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(LvqError):
    """A file could not be parsed or has the wrong shape/contents."""


class ContractError(LvqError):
    """An operation was called with arguments violating its preconditions."""


class InvariantError(LvqError):
    """An internal invariant was broken; indicates a bug, not user error."""
