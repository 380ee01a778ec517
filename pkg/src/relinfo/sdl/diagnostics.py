from __future__ import annotations

from dataclasses import dataclass

from ..errors import RelinfoError


@dataclass(frozen=True)
class SourceSpan:
    """Location of a node: 1-based line and column of its first character,
    and half-open byte offsets into the UTF-8 encoded source."""

    line: int
    col: int
    start: int
    end: int

    def contains(self, other: SourceSpan) -> bool:
        return self.start <= other.start and other.end <= self.end

    def cover(self, other: SourceSpan) -> SourceSpan:
        first = self if self.start <= other.start else other
        return SourceSpan(first.line, first.col, min(self.start, other.start), max(self.end, other.end))


NOWHERE = SourceSpan(1, 1, 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    span: SourceSpan
    message: str
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.span.line}:{self.span.col}: {self.severity}: {self.message}"


class SdlError(RelinfoError):
    """Any problem with a scenario file; carries a positioned diagnostic."""

    kind = "error"

    def __init__(self, span: SourceSpan, message: str):
        self.diagnostic = Diagnostic(span, message)
        super().__init__(message)

    @property
    def span(self) -> SourceSpan:
        return self.diagnostic.span

    def format(self, filename: str = "<input>") -> str:
        return self.diagnostic.format(filename)


class SdlSyntaxError(SdlError):
    pass


class SdlSemanticError(SdlError):
    pass


class SdlRuntimeError(SdlError):
    pass
