"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`TvdiamError`,
so callers (and the CLI) can separate analysis diagnostics from bugs.
"""
from __future__ import annotations


class TvdiamError(Exception):
    """Base class for all library errors."""


class ValidationError(TvdiamError, ValueError):
    """An input violates a structural or numerical invariant."""


# -- core model -------------------------------------------------------------

class DuplicateName(ValidationError):
    def __init__(self, name: str, where: str = "network"):
        self.name = name
        super().__init__(f"duplicate name {name!r} in {where}")


class UnknownVariable(ValidationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown variable {name!r}")


class CycleDetected(ValidationError):
    def __init__(self, path):
        self.path = tuple(path)
        super().__init__("cycle detected: " + " -> ".join(self.path))


class RowSumViolation(ValidationError):
    def __init__(self, node: str, row: int, total: float):
        self.node, self.row, self.total = node, row, total
        super().__init__(f"row {row} of CPT {node!r} sums to {total!r}")


class ParentMismatch(ValidationError):
    def __init__(self, node: str, detail: str = ""):
        self.node = node
        msg = f"CPT parents of {node!r} do not match the DAG"
        super().__init__(msg + (f": {detail}" if detail else ""))


class IncompleteAssignment(ValidationError):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__("assignment is missing parents: " + ", ".join(self.missing))


class LevelOutOfRange(ValidationError):
    def __init__(self, variable: str, level):
        self.variable, self.level = variable, level
        super().__init__(f"level {level!r} out of range for {variable!r}")


class UnknownLevel(LevelOutOfRange):
    pass


class NotAParent(ValidationError):
    def __init__(self, variable: str, node: str):
        self.variable, self.node = variable, node
        super().__init__(f"{variable!r} is not a parent of {node!r}")


# -- variation --------------------------------------------------------------

class LengthMismatch(ValidationError):
    pass


class NotAPmf(ValidationError):
    pass


class EmptyMatrix(ValidationError):
    pass


class SingleRow(ValidationError):
    pass


class IdenticalInputs(ValidationError):
    """The two pmfs coincide, so the residual parts are undefined."""


class DisjointSupports(ValidationError):
    """The two pmfs share no mass, so the common part is undefined."""


class OutOfRange(ValidationError):
    pass


# -- inference --------------------------------------------------------------

class FactorTooLarge(TvdiamError):
    def __init__(self, states: int, limit: int):
        self.states, self.limit = states, limit
        super().__init__(
            f"elimination would create a factor with {states} states (limit {limit}); "
            "use --force to run anyway"
        )


# -- sensitivity ------------------------------------------------------------

class NotAnEdge(ValidationError):
    def __init__(self, edge):
        self.edge = tuple(edge)
        super().__init__(f"({edge[0]}, {edge[1]}) is not an edge of the DAG")


class TrailCapExceeded(TvdiamError):
    """Trail enumeration hit its length or count cap; ``partial`` holds what was found."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class WOutOfRange(OutOfRange):
    pass


class MissingStrength(ValidationError):
    def __init__(self, edge):
        self.edge = tuple(edge)
        super().__init__(f"no strength supplied for edge ({edge[0]}, {edge[1]})")


# -- refinement -------------------------------------------------------------

class TooFewLevels(ValidationError):
    pass


class NonConsecutiveOrdinal(ValidationError):
    pass


class BadContext(ValidationError):
    pass


# -- propagation ------------------------------------------------------------

class TargetHasChildren(ValidationError):
    def __init__(self, target: str, children):
        self.target, self.children = target, tuple(children)
        super().__init__(
            f"target {target!r} has children ({', '.join(self.children)}); "
            "pass allow_children=True to compute anyway"
        )


class CliqueNotFound(ValidationError):
    pass


# -- io ---------------------------------------------------------------------

class BifSyntaxError(ValidationError):
    def __init__(self, message: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"line {line}, col {col}: {message}")


class MissingRow(ValidationError):
    def __init__(self, node: str, assignment):
        self.node, self.assignment = node, tuple(assignment)
        super().__init__(
            f"probability block for {node!r} has no row for ({', '.join(self.assignment)})"
        )


class UnknownAnnotationTarget(ValidationError):
    pass
