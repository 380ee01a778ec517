"""Facts, relative facts and perspectives.

A variable is a fact when its information is within ``tol`` bits of maximal,
and a fact relative to ``B`` when its relative information with respect to
``B`` is.  Tolerance is always explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .distributions import JointDistribution, VarSpec, born_joint, marginal
from .errors import NonCommutingError
from .infomeasures import (
    conditional_information,
    i_max,
    information,
    per_outcome_information,
    relative_information,
    supported_outcomes,
)
from .linops import Operator
from .observables import ClassicalSubsystem, Observable, check_commuting, commutator_norm, COMMUTATOR_TOL

DEFAULT_TOL = 1e-6

Status = Literal["fact", "relative_fact", "not_fact"]


@dataclass(frozen=True)
class FactVerdict:
    target: str
    status: Status
    slack: float
    tolerance: float
    relative_to: tuple[str, tuple[int, ...] | None] | None = None

    @property
    def holds(self) -> bool:
        return self.status != "not_fact"

    def to_dict(self) -> dict:
        rel = None
        if self.relative_to is not None:
            name, value = self.relative_to
            rel = {"subsystem": name, "value": list(value) if value is not None else None}
        return {
            "target": self.target,
            "status": self.status,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "relative_to": rel,
        }


def _name(jd: JointDistribution, spec: VarSpec) -> str:
    return ",".join(jd.names[k] for k in jd.axes(spec))


def is_fact(jd: JointDistribution, target: VarSpec, tol: float = DEFAULT_TOL) -> FactVerdict:
    slack = max(i_max(jd, target) - information(jd, target), 0.0)
    status = "fact" if slack <= tol else "not_fact"
    return FactVerdict(_name(jd, target), status, slack, tol)


def is_relative_fact(
    jd: JointDistribution,
    target: VarSpec,
    given: VarSpec,
    tol: float = DEFAULT_TOL,
    value=None,
) -> FactVerdict:
    """Verdict from ``I_{A|b}`` when ``value`` is given, else from ``I_{A|B}``."""
    top = i_max(jd, target)
    if value is None:
        achieved = relative_information(jd, target, given)
        rel_value = None
    else:
        achieved = conditional_information(jd, target, given, value)
        rel_value = (int(value),) if isinstance(value, (int, np.integer)) else tuple(int(v) for v in value)
    slack = max(top - achieved, 0.0)
    status = "relative_fact" if slack <= tol else "not_fact"
    return FactVerdict(_name(jd, target), status, slack, tol, (_name(jd, given), rel_value))


@dataclass(frozen=True)
class Perspective:
    """Fact verdicts for a list of targets, relative to one classical subsystem."""

    subsystem: str
    facts: tuple[FactVerdict, ...]
    state_label: str = ""
    skipped: tuple[tuple[str, str], ...] = field(default=())

    def verdict(self, target: str) -> FactVerdict:
        for f in self.facts:
            if f.target == target:
                return f
        raise KeyError(target)

    def to_dict(self) -> dict:
        return {
            "subsystem": self.subsystem,
            "state": self.state_label,
            "facts": [f.to_dict() for f in self.facts],
            "skipped": [{"target": t, "reason": r} for t, r in self.skipped],
        }

    def table(self) -> str:
        rows = [("target", "status", "slack(bits)", "relative_to")]
        for f in self.facts:
            rows.append((f.target, f.status, f"{f.slack:.3g}", self.subsystem))
        for t, reason in self.skipped:
            rows.append((t, "skipped", "-", reason))
        widths = [max(len(r[k]) for r in rows) for k in range(4)]
        return "\n".join(" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def perspective_of(
    rho: Operator,
    cs: ClassicalSubsystem,
    targets: Sequence[Observable],
    tol: float = DEFAULT_TOL,
    state_label: str = "",
) -> Perspective:
    """Relative-fact verdict for each target with respect to the whole of ``cs``.

    Targets that fail to commute with some member of ``cs`` cannot be facts
    relative to it; they are skipped and the offending member is recorded.
    """
    facts = []
    skipped = []
    given = tuple(range(len(cs.members)))
    for target in targets:
        bad = [m.name for m in cs.members if commutator_norm(m, target) > COMMUTATOR_TOL]
        if bad:
            skipped.append((target.name, f"does not commute with {', '.join(bad)}"))
            continue
        jd = born_joint(rho, list(cs.members) + [target])
        v = is_relative_fact(jd, len(cs.members), given, tol)
        facts.append(FactVerdict(target.name, v.status, v.slack, tol, (cs.name, None)))
    return Perspective(cs.name, tuple(facts), state_label, tuple(skipped))


@dataclass(frozen=True)
class AgreementReport:
    agree: bool
    target: str
    first: FactVerdict | None
    second: FactVerdict | None
    mismatches: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "agree": self.agree,
            "target": self.target,
            "first": self.first.to_dict() if self.first else None,
            "second": self.second.to_dict() if self.second else None,
            "mismatches": [[list(a), list(b)] for a, b in self.mismatches],
            "reason": self.reason,
        }


def _point_mass(jd: JointDistribution, target_axis: int, given: tuple[int, ...], value) -> int:
    sub = marginal(jd, given + (target_axis,)).table
    row = sub[tuple(value)]
    return int(np.argmax(row))


def perspectives_agree(
    rho: Operator,
    cs1: ClassicalSubsystem,
    cs2: ClassicalSubsystem,
    target: Observable,
    tol: float = DEFAULT_TOL,
) -> tuple[bool, AgreementReport]:
    """Whether two classical subsystems hold the same value of ``target``.

    Both must have ``target`` as a relative fact, and on every jointly
    supported pair of their outcomes the target value implied by the first
    must equal the one implied by the second.
    """
    members = list(cs1.members) + list(cs2.members) + [target]
    try:
        check_commuting(members)
    except NonCommutingError as exc:
        report = AgreementReport(False, target.name, None, None, reason=str(exc))
        return False, report
    jd = born_joint(rho, members)
    n1, n2 = len(cs1.members), len(cs2.members)
    g1 = tuple(range(n1))
    g2 = tuple(range(n1, n1 + n2))
    t = n1 + n2
    v1 = is_relative_fact(jd, t, g1, tol)
    v2 = is_relative_fact(jd, t, g2, tol)
    v1 = FactVerdict(target.name, v1.status, v1.slack, tol, (cs1.name, None))
    v2 = FactVerdict(target.name, v2.status, v2.slack, tol, (cs2.name, None))
    if not (v1.holds and v2.holds):
        return False, AgreementReport(False, target.name, v1, v2, reason="target is not a relative fact for both")
    mismatches = []
    for pair in supported_outcomes(jd, g1 + g2):
        c1, c2 = pair[:n1], pair[n1:]
        if _point_mass(jd, t, g1, c1) != _point_mass(jd, t, g2, c2):
            mismatches.append((c1, c2))
    ok = not mismatches
    reason = "" if ok else "conditional values differ on jointly supported outcomes"
    return ok, AgreementReport(ok, target.name, v1, v2, tuple(mismatches), reason)


def aggregate_matches_outcomes(jd: JointDistribution, target: VarSpec, given: VarSpec, tol: float = DEFAULT_TOL) -> bool:
    """True when the aggregate relative-fact verdict equals the AND of the per-outcome verdicts."""
    top = i_max(jd, target)
    per = per_outcome_information(jd, target, given)
    every = all(top - v <= tol for v in per.values())
    return is_relative_fact(jd, target, given, tol).holds == every
