"""
Exception hierarchy for graycat.

Verification routines report failed properties through ``reports.Report``;
the exceptions below are reserved for inputs an operation cannot work with.
"""


class GraycatError(Exception):
    """Base class for all graycat errors."""


class ConfigError(GraycatError):
    """A configuration value is malformed."""


class CorpusError(GraycatError):
    """A named object or input file could not be resolved."""


class InvalidComplexError(GraycatError):
    """An augmented directed complex is structurally malformed or invalid."""


class BudgetExceededError(GraycatError):
    """A bounded search visited more nodes than its budget allows."""

    def __init__(self, what: str, budget: int):
        super().__init__(f"{what}: search budget of {budget} nodes exceeded")
        self.what = what
        self.budget = budget


class NotComposableError(GraycatError):
    """Two cells or squares do not meet along the requested boundary."""


class PushoutError(GraycatError):
    """A span lies outside the fragment pushouts are computed for."""


class ClauseError(GraycatError):
    """An explicit chain-map formula was applied outside its clauses."""


class DimensionBoundError(GraycatError):
    """An input exceeds the configured dimension bound."""


class InvalidCategoryError(GraycatError):
    """A finite strict category or functor is malformed."""


class CompanionError(GraycatError):
    """Companion data is missing or fails the triangle equations."""


class MarkingError(GraycatError):
    """A marking is not closed under units and compositions."""


class PairConditionError(GraycatError):
    """A filtration fails the injectivity required of pairs."""
