"""Scenario description language: a small line-oriented text format for
systems, states, observables, classical subsystems, steps and assertions.

    doc = parse(text)             # syntax + semantic checks
    text2 = print_document(doc)   # canonical form; parse(text2) == doc
    result = evaluate(doc)        # ScenarioResult
"""

from __future__ import annotations

from . import ast
from .diagnostics import Diagnostic, SdlError, SdlRuntimeError, SdlSemanticError, SdlSyntaxError, SourceSpan
from .evaluator import Model, RunConfig, build_model, evaluate
from .parser import parse_syntax, tokenize
from .printer import print_document


def parse(text: str, check: bool = True) -> ast.Document:
    """Parse scenario text; with ``check`` also run semantic validation."""
    doc = parse_syntax(text)
    if check:
        build_model(doc)
    return doc


def load(path) -> ast.Document:
    with open(path, "rb") as fh:
        raw = fh.read()
    return parse(decode(raw))


def decode(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        head = raw[: exc.start]
        line = head.count(b"\n") + 1
        col = exc.start - (head.rfind(b"\n") + 1) + 1
        raise SdlSyntaxError(SourceSpan(line, col, exc.start, exc.start + 1), "input is not valid UTF-8") from None


__all__ = [
    "Diagnostic",
    "Model",
    "RunConfig",
    "SdlError",
    "SdlRuntimeError",
    "SdlSemanticError",
    "SdlSyntaxError",
    "SourceSpan",
    "ast",
    "build_model",
    "decode",
    "evaluate",
    "load",
    "parse",
    "parse_syntax",
    "print_document",
    "tokenize",
]
