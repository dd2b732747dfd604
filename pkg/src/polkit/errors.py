"""Exception taxonomy shared across the toolkit.

Every error the library raises deliberately derives from PolError, so
callers (and the CLI) can tell malformed input and exhausted budgets
apart from genuine bugs.
"""


class PolError(Exception):
    """Base class for all toolkit errors."""


class ParseError(PolError):
    """Malformed concrete syntax. Carries 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownSymbol(PolError):
    """An observation symbol that is not part of the ambient alphabet."""


class UnknownAgent(PolError):
    """An agent name that is not part of the declared agent set."""


class UnknownState(PolError):
    """A state id that does not occur in the model."""


class StateBudgetExceeded(PolError):
    """An automaton or residuation-graph construction outgrew its cap."""


class ResourceBudgetExceeded(PolError):
    """The satisfiability backend hit its resource cap; verdict UNKNOWN."""


class ClosureTooLarge(PolError):
    """A closure too large to enumerate Hintikka sets over."""


class BudgetInvalid(PolError):
    """A label budget outside the allowed range."""


class NotABts(PolError):
    """A structure that fails bubble transition structure validation."""


class InconsistentTriple(PolError):
    """A tape window containing more than one head marker."""


class SpaceBoundTooLarge(PolError):
    """A space bound whose position encoding exceeds the supported width."""
