"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class LoopEnergyError(Exception):
    """Base class for every error raised by loopenergy."""


class GraphError(LoopEnergyError, ValueError):
    pass


class IndexOutOfRange(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class DuplicateLoop(GraphError):
    pass


class SelfPairInEdgeList(GraphError):
    pass


class IncompatibleOrder(GraphError):
    pass


class OrderTooLarge(GraphError):
    pass


class OrderTooSmall(GraphError):
    pass


class NotConnected(GraphError):
    pass


class DegenerateSpread(LoopEnergyError, ValueError):
    """All eigenvalues coincide, so max - min is zero."""


class UnknownBoundId(LoopEnergyError, KeyError):
    pass


class NoConvergence(LoopEnergyError, ArithmeticError):
    """The Jacobi sweep budget ran out.

    ``positions`` lists the offending batch positions when the failure
    came from a batched solve.
    """

    def __init__(self, message: str, positions=()):
        super().__init__(message)
        self.positions = tuple(int(p) for p in positions)


class ParseError(LoopEnergyError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
