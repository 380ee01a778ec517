"""Information functionals over joint distributions, in bits.

For a variable ``A`` with ``N_A`` outcomes:

* ``information(A) = log2 N_A - H_A``
* ``conditional_information(A | B=b) = log2 N_A + sum_a p(a|b) log2 p(a|b)``
* ``relative_information(A | B) = sum_b p(b) I_{A|b}``
* ``mutual_information(A : B) = H_A + H_B - H_AB``

``A`` and ``B`` may each be a single variable of the table or a tuple of
variables, which are then treated as one composite variable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distributions import JointDistribution, VarSpec, conditional, marginal
from .errors import DistributionError
from .linops import Operator, partial_trace


def shannon_entropy(p) -> float:
    """``-sum p log2 p`` with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise DistributionError(f"not a probability vector: {p}")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def i_max(jd: JointDistribution, target: VarSpec) -> float:
    return float(np.log2(jd.n_outcomes(target)))


def entropy(jd: JointDistribution, target: VarSpec) -> float:
    return shannon_entropy(jd.probabilities(target))


def information(jd: JointDistribution, target: VarSpec) -> float:
    return i_max(jd, target) - entropy(jd, target)


def _pair(jd: JointDistribution, target: VarSpec, given: VarSpec) -> tuple[tuple[int, ...], tuple[int, ...]]:
    ta, ga = jd.axes(target), jd.axes(given)
    if set(ta) & set(ga):
        raise DistributionError(f"target {target!r} and conditioning variable {given!r} overlap")
    return ta, ga


def conditional_information(jd: JointDistribution, target: VarSpec, given: VarSpec, value) -> float:
    """Information about ``target`` once ``given`` is known to take outcome ``value``.

    Raises :class:`~relinfo.errors.NullSupportError` if that outcome has
    probability at or below the table's support floor.
    """
    ta, ga = _pair(jd, target, given)
    sub = marginal(jd, ta + ga)
    cond = conditional(sub, tuple(range(len(ta), len(ta) + len(ga))), value)
    p = cond.table.reshape(-1)
    nz = p[p > 0]
    return i_max(jd, ta) + float(np.sum(nz * np.log2(nz)))


def supported_outcomes(jd: JointDistribution, given: VarSpec) -> list[tuple[int, ...]]:
    axes = jd.axes(given)
    pb = marginal(jd, axes).table
    return [idx for idx in itertools.product(*(range(n) for n in pb.shape)) if pb[idx] > jd.support_floor]


def per_outcome_information(jd: JointDistribution, target: VarSpec, given: VarSpec) -> dict[tuple[int, ...], float]:
    """``I_{A|b}`` for every outcome ``b`` of ``given`` above the support floor."""
    _pair(jd, target, given)
    return {b: conditional_information(jd, target, given, b) for b in supported_outcomes(jd, given)}


def relative_information(jd: JointDistribution, target: VarSpec, given: VarSpec) -> float:
    """Expected conditional information of ``target`` after learning ``given``."""
    ta, ga = _pair(jd, target, given)
    pb = marginal(jd, ga).table
    total = 0.0
    for b, ib in per_outcome_information(jd, ta, ga).items():
        total += float(pb[b]) * ib
    return total


def relative_information_closed_form(jd: JointDistribution, target: VarSpec, given: VarSpec) -> float:
    """``I_max + sum_{a,b} p(a,b) log2 p(a|b)``, summed over the full table."""
    ta, ga = _pair(jd, target, given)
    pab = marginal(jd, ta + ga).table
    na = int(np.prod(pab.shape[: len(ta)]))
    pab = pab.reshape(na, -1)
    pb = pab.sum(axis=0)
    mask = pab > 0
    cond = np.divide(pab, pb, out=np.zeros_like(pab), where=mask)
    return i_max(jd, ta) + float(np.sum(pab[mask] * np.log2(cond[mask])))


def mutual_information(jd: JointDistribution, a: VarSpec, b: VarSpec) -> float:
    ta, tb = _pair(jd, a, b)
    return entropy(jd, ta) + entropy(jd, tb) - entropy(jd, ta + tb)


def von_neumann_entropy(rho: Operator) -> float:
    w = np.linalg.eigvalsh(rho.entries)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def quantum_mutual_information(rho: Operator, dims: Sequence[int], cut: Sequence[int]) -> float:
    """``S(rho_A) + S(rho_B) - S(rho_AB)`` where ``A`` is the set of factors in ``cut``."""
    cut = sorted({int(c) for c in cut})
    rest = [k for k in range(len(dims)) if k not in cut]
    if not rest:
        raise DistributionError("bipartition needs factors on both sides of the cut")
    sa = von_neumann_entropy(partial_trace(rho, dims, cut))
    sb = von_neumann_entropy(partial_trace(rho, dims, rest))
    return sa + sb - von_neumann_entropy(rho)


@dataclass(frozen=True)
class InfoReport:
    """All information quantities for one target relative to one conditioning variable."""

    target: str
    given: str
    i_max: float
    entropy: float
    information: float
    conditional: dict[tuple[int, ...], float] = field(default_factory=dict)
    relative: float = 0.0
    mutual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "given": self.given,
            "i_max": self.i_max,
            "entropy": self.entropy,
            "information": self.information,
            "conditional": {",".join(map(str, k)): v for k, v in self.conditional.items()},
            "relative": self.relative,
            "mutual": self.mutual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _label(jd: JointDistribution, spec: VarSpec) -> str:
    return ",".join(jd.names[k] for k in jd.axes(spec))


def info_report(jd: JointDistribution, target: VarSpec, given: VarSpec) -> InfoReport:
    ta, ga = _pair(jd, target, given)
    return InfoReport(
        target=_label(jd, ta),
        given=_label(jd, ga),
        i_max=i_max(jd, ta),
        entropy=entropy(jd, ta),
        information=information(jd, ta),
        conditional=per_outcome_information(jd, ta, ga),
        relative=relative_information(jd, ta, ga),
        mutual=mutual_information(jd, ta, ga),
    )
