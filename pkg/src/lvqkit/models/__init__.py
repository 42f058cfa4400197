"""Model variants grouped by learning principle."""

from . import heuristic, likelihood, margin  # noqa: F401
