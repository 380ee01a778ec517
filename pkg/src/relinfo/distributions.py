"""Born-rule probability tables for commuting measurements."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimensionError, DistributionError, NullSupportError, OperatorKindError
from .linops import Operator
from .observables import ClassicalSubsystem, Observable, check_commuting

SUPPORT_FLOOR = 1e-12
CLAMP_TOL = 1e-12
TOTAL_TOL = 1e-9

VarRef = Union[int, str]
VarSpec = Union[VarRef, Sequence[VarRef]]


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense probability table over outcome-index tuples.

    ``table`` has one axis per variable; ``table[i, j, ...]`` is the
    probability that the first variable takes outcome ``i``, the second ``j``,
    and so on.
    """

    variables: tuple[tuple[str, int], ...]
    table: np.ndarray
    support_floor: float = SUPPORT_FLOOR
    labels: tuple[tuple[str, ...], ...] = field(default=())

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        shape = tuple(n for _, n in self.variables)
        if t.shape != shape:
            raise DimensionError(f"table of shape {t.shape} does not match variables {self.variables}")
        if not self.variables:
            raise DistributionError("a distribution needs at least one variable")
        if np.any(t < 0):
            raise DistributionError(f"negative probability {t.min():.3g}")
        total = t.sum()
        if abs(total - 1.0) > TOTAL_TOL:
            raise DistributionError(f"probabilities sum to {total!r}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(tuple(str(k) for k in range(n)) for _, n in self.variables))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    @property
    def ndim(self) -> int:
        return len(self.variables)

    def index(self, ref: VarRef) -> int:
        if isinstance(ref, (int, np.integer)):
            if not 0 <= ref < self.ndim:
                raise DistributionError(f"variable index {ref} out of range for {self.ndim} variables")
            return int(ref)
        try:
            return self.names.index(ref)
        except ValueError:
            raise DistributionError(f"no variable named {ref!r} in {self.names}") from None

    def axes(self, spec: VarSpec) -> tuple[int, ...]:
        """Resolve a variable reference, or a sequence of them, to axis indices."""
        if isinstance(spec, (int, np.integer, str)):
            return (self.index(spec),)
        out = tuple(self.index(r) for r in spec)
        if not out:
            raise DistributionError("empty variable selection")
        if len(set(out)) != len(out):
            raise DistributionError(f"repeated variable in selection {spec!r}")
        return out

    def n_outcomes(self, spec: VarSpec) -> int:
        return int(np.prod([self.variables[k][1] for k in self.axes(spec)]))

    def probabilities(self, spec: VarSpec) -> np.ndarray:
        """Marginal over ``spec`` as a flat vector (row-major over the selected axes)."""
        return marginal(self, self.axes(spec)).table.reshape(-1)

    def items(self) -> Iterable[tuple[tuple[int, ...], float]]:
        for idx in itertools.product(*(range(n) for _, n in self.variables)):
            yield idx, float(self.table[idx])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.names) + ["probability"])
        for idx, p in self.items():
            w.writerow([self.labels[k][i] for k, i in enumerate(idx)] + [f"{p:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "variables": [{"name": n, "outcomes": list(self.labels[k])} for k, (n, _) in enumerate(self.variables)],
            "support_floor": self.support_floor,
            "table": [{"outcome": list(idx), "probability": p} for idx, p in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def from_table(names: Sequence[str], table, support_floor: float = SUPPORT_FLOOR) -> JointDistribution:
    t = np.asarray(table, dtype=float)
    if len(names) != t.ndim:
        raise DimensionError(f"{len(names)} names for a {t.ndim}-d table")
    return JointDistribution(tuple(zip(names, t.shape)), t, support_floor)


def _clamp(raw: np.ndarray) -> np.ndarray:
    low = raw.min()
    if low < -CLAMP_TOL:
        raise DistributionError(f"Born probability {low:.3g} is negative beyond the clamp tolerance")
    p = np.where(raw < 0, 0.0, raw)
    return p / p.sum()


def _check_state(rho: Operator, dim: int) -> None:
    if rho.kind != "density":
        raise OperatorKindError(f"expected a density operator, got kind {rho.kind!r}")
    if rho.dim != dim:
        raise DimensionError(f"state has dim {rho.dim}, observable acts on dim {dim}")


def born_single(rho: Operator, a: Observable, support_floor: float = SUPPORT_FLOOR) -> JointDistribution:
    _check_state(rho, a.dim)
    r = rho.entries
    raw = np.array([np.real(np.sum(p.entries * r.T)) for p in a.projectors])
    return JointDistribution(((a.name, a.n_outcomes),), _clamp(raw), support_floor, (a.labels,))


def born_joint(
    rho: Operator,
    cs: ClassicalSubsystem | Sequence[Observable],
    support_floor: float = SUPPORT_FLOOR,
) -> JointDistribution:
    """Joint outcome distribution ``p(a, b, ...) = tr(P_a P_b ... rho)``.

    Accepts a :class:`ClassicalSubsystem` or any list of observables, which is
    then checked for pairwise commutation.  The same observable may appear
    more than once.
    """
    if isinstance(cs, ClassicalSubsystem):
        members = cs.members
    else:
        members = tuple(cs)
        if not members:
            raise DistributionError("born_joint needs at least one observable")
        check_commuting(members)
    _check_state(rho, members[0].dim)
    for m in members:
        if m.dim != rho.dim:
            raise DimensionError(f"observable {m.name!r} has dim {m.dim}, state has dim {rho.dim}")
    shape = tuple(m.n_outcomes for m in members)
    raw = np.empty(shape)
    rt = rho.entries.T
    # Fold the projectors left to right, reusing partial products.
    partial = {(): np.eye(rho.dim, dtype=complex)}
    for m in members:
        nxt = {}
        for idx, acc in partial.items():
            for k, p in enumerate(m.projectors):
                nxt[idx + (k,)] = acc @ p.entries
        partial = nxt
    for idx, prod in partial.items():
        raw[idx] = np.real(np.sum(prod * rt))
    variables = tuple((m.name, m.n_outcomes) for m in members)
    return JointDistribution(variables, _clamp(raw), support_floor, tuple(m.labels for m in members))


def marginal(jd: JointDistribution, keep: VarSpec) -> JointDistribution:
    """Sum out every variable not in ``keep``; kept variables appear in the order given."""
    axes = jd.axes(keep)
    drop = tuple(k for k in range(jd.ndim) if k not in axes)
    t = jd.table.sum(axis=drop) if drop else jd.table
    # after summing, remaining axes are in ascending original order
    remaining = sorted(axes)
    t = np.transpose(t, [remaining.index(a) for a in axes])
    return JointDistribution(
        tuple(jd.variables[a] for a in axes),
        t,
        jd.support_floor,
        tuple(jd.labels[a] for a in axes),
    )


def _value_tuple(value, n_axes: int) -> tuple[int, ...]:
    if isinstance(value, (int, np.integer)):
        value = (int(value),)
    value = tuple(int(v) for v in value)
    if len(value) != n_axes:
        raise DistributionError(f"outcome {value} does not match {n_axes} conditioning variables")
    return value


def conditional(jd: JointDistribution, given: VarSpec, value) -> JointDistribution:
    """Distribution of the remaining variables given ``given == value``."""
    axes = jd.axes(given)
    rest = tuple(k for k in range(jd.ndim) if k not in axes)
    if not rest:
        raise DistributionError("conditioning on every variable leaves nothing")
    value = _value_tuple(value, len(axes))
    for a, v in zip(axes, value):
        if not 0 <= v < jd.variables[a][1]:
            raise DistributionError(f"outcome {v} out of range for variable {jd.variables[a][0]!r}")
    idx = [slice(None)] * jd.ndim
    for a, v in zip(axes, value):
        idx[a] = v
    joint = jd.table[tuple(idx)]
    mass = float(joint.sum())
    if mass <= jd.support_floor:
        names = ", ".join(jd.variables[a][0] for a in axes)
        raise NullSupportError(f"p({names} = {value}) = {mass:.3g} is at or below the support floor {jd.support_floor:g}")
    return JointDistribution(
        tuple(jd.variables[k] for k in rest),
        joint / mass,
        jd.support_floor,
        tuple(jd.labels[k] for k in rest),
    )
