"""Exceptions raised by hashnet.

Every exception here must survive pickling since errors raised inside a budgeted
area run are sent back through a pipe, see `hashnet.budget`. Subclasses taking
extra constructor arguments therefore pass them all on to `Exception.__init__`
so that `args` can rebuild them.
"""
from __future__ import annotations

from typing import Any, Hashable, Sequence


class HashnetException(Exception):
    """Base class for any hashnet related exceptions"""

    exit_code: int = 1


class InputError(HashnetException, ValueError):
    """Base class for errors in user supplied inputs, configs and rule files"""

    exit_code = 1


class MalformedRecordError(InputError):
    """A line of a post export could not be decoded"""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(line, reason)
        self.line = line
        self.reason = reason

    def __str__(self) -> str:
        return f"Malformed record on line {self.line}: {self.reason}"


class MissingFieldError(InputError):
    """A record lacks a required field"""

    def __init__(self, field: str, line: int) -> None:
        super().__init__(field, line)
        self.field = field
        self.line = line

    def __str__(self) -> str:
        return f"Missing required field `{self.field}` on line {self.line}"


class AliasCycleError(InputError):
    """Synonym and translation mappings resolve in a loop"""

    def __init__(self, cycle: Sequence[str]) -> None:
        super().__init__(tuple(cycle))
        self.cycle = tuple(cycle)

    def __str__(self) -> str:
        return "Alias chain is cyclic: " + " -> ".join(self.cycle)


class ConfigError(InputError):
    """A run configuration or plan is invalid"""


class DegenerateCorpusError(InputError):
    """A corpus has too few distinct hashtags to build a network from"""


class EmptyUnionError(InputError):
    """Merging corpora produced no hashtag pairs at all"""


class LexiconError(InputError):
    """A CES lexicon is empty or malformed"""


class DegeneratePlanError(InputError):
    """A synthetic plan can not generate any posts"""


class GraphError(HashnetException, ValueError):
    """Base class for violations of the graph invariants"""

    exit_code = 1


class DuplicateLabelError(GraphError):
    def __init__(self, label: str) -> None:
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"Vertex label `{self.label}` is already present"


class SelfLoopError(GraphError):
    def __init__(self, vertex: int) -> None:
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self) -> str:
        return f"Self loops are not allowed, got edge ({self.vertex}, {self.vertex})"


class MissingVertexError(GraphError, KeyError):
    def __init__(self, vertex: Hashable) -> None:
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self) -> str:
        return f"No vertex {self.vertex!r} in graph"


class NonPositiveWeightError(GraphError):
    def __init__(self, u: str, v: str, weight: Any) -> None:
        super().__init__(u, v, weight)
        self.edge = (u, v)
        self.weight = weight

    def __str__(self) -> str:
        u, v = self.edge
        return f"Edge ({u}, {v}) has non-positive weight {self.weight}"


class UnassignedVertexError(GraphError):
    def __init__(self, vertex: str) -> None:
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self) -> str:
        return f"Vertex `{self.vertex}` is not assigned to any community"


class DendrogramMismatchError(GraphError):
    """A dendrogram was cut against a graph it was not built from"""


class AnalysisError(HashnetException):
    """Base class for failures of an analysis on valid inputs"""

    exit_code = 2


class ConvergenceError(AnalysisError):
    """Power iteration did not converge"""

    def __init__(self, iterations: int, residual: float) -> None:
        super().__init__(iterations, residual)
        self.iterations = iterations
        self.residual = residual

    def __str__(self) -> str:
        return (
            f"Power iteration did not converge in {self.iterations} iterations,"
            f" last residual {self.residual:.3e}"
        )


class BudgetException(AnalysisError):
    """Base class for exhausted resource budgets"""


class TimeoutException(BudgetException):
    """Base class for Timeout based errors"""


class CpuTimeoutException(TimeoutException):
    """Exception when hitting CPU time limit."""


class WallTimeoutException(TimeoutException):
    """Exception when hitting the wall time limit."""


class MemoryLimitException(BudgetException, MemoryError):
    """Exception when hitting the Memory Limit."""


class StageError(HashnetException):
    """An error raised inside a pipeline stage, naming the stage and area"""

    def __init__(self, stage: str, area: str, cause: BaseException) -> None:
        super().__init__(stage, area, cause)
        self.stage = stage
        self.area = area
        self.cause = cause

    @property
    def exit_code(self) -> int:  # type: ignore[override]
        if isinstance(self.cause, OSError):
            return InputError.exit_code

        return getattr(self.cause, "exit_code", AnalysisError.exit_code)

    def __str__(self) -> str:
        return f"[{self.area}] stage `{self.stage}` failed: {self.cause}"
