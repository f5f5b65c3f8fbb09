"""Exception hierarchy shared by the parsers, tree builder and simulator."""

from __future__ import annotations


class SpreadTreeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SpreadTreeError, ValueError):
    """Input text could not be turned into a graph.

    ``lineno`` is 1-based; ``None`` when the error concerns the whole stream.
    """

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        self.message = message
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


class MalformedLine(ParseError):
    pass


class NonPositiveCost(ParseError):
    pass


class SelfLoop(ParseError):
    pass


class DuplicateEdge(ParseError):
    pass


class MalformedTriple(ParseError):
    pass


class NegativeLatency(ParseError):
    pass


class MissingRoot(ParseError):
    pass


class DuplicateRoot(ParseError):
    pass


class UnknownNode(SpreadTreeError, KeyError):
    """A node id was requested that the graph or tree does not contain."""

    def __init__(self, node: str, what: str = "node"):
        self.node = node
        super().__init__(f"unknown {what}: {node!r}")

    def __str__(self) -> str:
        return self.args[0]


class UnknownRoot(UnknownNode):
    def __init__(self, node: str):
        super().__init__(node, "root")


class UnknownSource(UnknownNode):
    def __init__(self, node: str):
        super().__init__(node, "source")


class SourceBlocked(SpreadTreeError, ValueError):
    pass


class InvalidTree(SpreadTreeError, ValueError):
    pass
