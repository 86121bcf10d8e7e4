# app/domain/errors.py
"""
Domain exceptions. Services raise these; only the CLI layer maps them to
exit codes (see `code`).
"""
from typing import Any, Optional


class WorkbenchError(Exception):
    code: int = 1


class ProtocolParseError(WorkbenchError):
    code = 2

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        self.detail = message
        text = f"line {line}: {message}" if line is not None else message
        super().__init__(f"{path}: {text}" if path is not None else text)


class MalformedSource(WorkbenchError):
    pass


class InvalidParameter(WorkbenchError):
    pass


class UnknownInputSymbol(WorkbenchError):
    def __init__(self, symbol: Any):
        self.symbol = symbol
        super().__init__(f"input symbol {symbol!r} is not in the alphabet")


class StateNotInSource(WorkbenchError):
    pass


class StepNotEnabled(WorkbenchError):
    pass


class UnknownTransition(WorkbenchError):
    pass


class NotCleanable(WorkbenchError):
    """A scheduled cleanup step is not enabled: the configuration lies outside the reachable set."""

    def __init__(self, message: str, configuration: Any = None, label: Any = None, steps: tuple = ()):
        self.configuration = configuration
        self.label = label
        self.steps = steps
        super().__init__(message)


class PartialGraph(WorkbenchError):
    code = 4


class StateSpaceExceeded(WorkbenchError):
    code = 4

    def __init__(self, node_limit: int, graph: Any = None):
        self.node_limit = node_limit
        self.graph = graph
        super().__init__(f"state space exceeded node_limit={node_limit}")
