"""Syntax tree for scenario files.

Every node carries a :class:`SourceSpan`; spans are excluded from equality,
so two trees compare equal when they have the same structure and content.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Union

from .diagnostics import NOWHERE, SourceSpan


def _span() -> SourceSpan:
    return field(default=NOWHERE, compare=False, repr=False)


# coefficients ------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """One factor of a coefficient: ``num`` (literal text), ``i``, ``pi``, ``sqrt(num)`` or ``log2(num)``."""

    kind: str
    text: str = ""
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Coef:
    """``[-] atom (('*' | '/') atom)*``; ``ops[k]`` joins ``atoms[k]`` to what precedes it."""

    atoms: tuple[Atom, ...]
    ops: tuple[str, ...]
    negative: bool = False
    span: SourceSpan = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: SourceSpan = _span()


Value = Union[Coef, BoolLit]

# state expressions -----------------------------------------------------------------


@dataclass(frozen=True)
class KetLit:
    entries: tuple[str, ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class StateRef:
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Group:
    body: "Sum"
    span: SourceSpan = _span()


Factor = Union[KetLit, StateRef, Group]


@dataclass(frozen=True)
class Term:
    sign: str
    coef: Coef | None
    factors: tuple[Factor, ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Sum:
    terms: tuple[Term, ...]
    span: SourceSpan = _span()


# declarations ------------------------------------------------------------------------


@dataclass(frozen=True)
class SystemDecl:
    name: str
    dim: int
    labels: tuple[str, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class StateDecl:
    name: str
    systems: tuple[str, ...]
    expr: Sum
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PauliKind:
    which: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SpinKind:
    angle: Coef
    span: SourceSpan = _span()


@dataclass(frozen=True)
class PointerKind:
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SectorsKind:
    groups: tuple[tuple[str, ...], ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ProjectorKind:
    state: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class MeasurementKind:
    observable: str
    ready: str
    targets: tuple[str, ...]
    omega: Coef
    span: SourceSpan = _span()


ObsKind = Union[PauliKind, SpinKind, PointerKind, SectorsKind, ProjectorKind, MeasurementKind]


@dataclass(frozen=True)
class ObsDecl:
    name: str
    systems: tuple[str, ...]
    kind: ObsKind
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ClassicalDecl:
    name: str
    members: tuple[str, ...]
    span: SourceSpan = _span()


# steps -------------------------------------------------------------------------------


@dataclass(frozen=True)
class StateStep:
    state: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class MixStep:
    epsilon: Coef
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ReportStep:
    subsystem: str
    targets: tuple[str, ...]
    tol: str | None = None
    span: SourceSpan = _span()


@dataclass(frozen=True)
class EvolveStep:
    hamiltonian: str
    start: Coef
    stop: Coef
    samples: int
    track: tuple[str, str] | None = None
    span: SourceSpan = _span()


Step = Union[StateStep, MixStep, ReportStep, EvolveStep]


@dataclass(frozen=True)
class InfoQuery:
    """``func(target [op given [= value]])`` with ``func`` in I, H, Imax, fact, relfact and ``op`` in ``|``, ``:``."""

    func: str
    target: tuple[str, ...]
    op: str | None = None
    given: tuple[str, ...] = ()
    value: tuple[int, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class AgreeQuery:
    first: str
    second: str
    target: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ProbQuery:
    observable: str
    outcome: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class CommutesQuery:
    first: str
    second: str
    span: SourceSpan = _span()


Query = Union[InfoQuery, AgreeQuery, ProbQuery, CommutesQuery]


@dataclass(frozen=True)
class AssertStmt:
    query: Query
    expected: Value
    tol: str | None = None
    note: str | None = None
    span: SourceSpan = _span()


Statement = Union[SystemDecl, StateDecl, ObsDecl, ClassicalDecl, StateStep, MixStep, ReportStep, EvolveStep, AssertStmt]


@dataclass(frozen=True)
class Document:
    statements: tuple[Statement, ...] = ()
    span: SourceSpan = _span()

    def of_type(self, cls) -> list:
        return [s for s in self.statements if isinstance(s, cls)]

    @property
    def systems(self) -> list[SystemDecl]:
        return self.of_type(SystemDecl)

    @property
    def states(self) -> list[StateDecl]:
        return self.of_type(StateDecl)

    @property
    def observables(self) -> list[ObsDecl]:
        return self.of_type(ObsDecl)

    @property
    def subsystems(self) -> list[ClassicalDecl]:
        return self.of_type(ClassicalDecl)

    @property
    def steps(self) -> list:
        return [s for s in self.statements if isinstance(s, (StateStep, MixStep, ReportStep, EvolveStep, AssertStmt))]


def walk(node) -> Iterator[tuple[object, object]]:
    """Yield ``(parent, child)`` pairs for every AST node below ``node``."""
    for f in fields(node):
        if f.name == "span":
            continue
        for child in _children(getattr(node, f.name)):
            yield node, child
            yield from walk(child)


def _children(value):
    if hasattr(value, "__dataclass_fields__"):
        yield value
    elif isinstance(value, tuple):
        for v in value:
            yield from _children(v)
