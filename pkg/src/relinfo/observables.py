"""Observables (variables) with spectral resolutions, and classical subsystems.

A classical subsystem is a list of mutually commuting observables on the same
ambient space.  Only such lists admit a joint probability distribution, so
every perspective in this package is attached to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionError, NonCommutingError, OperatorKindError
from .linops import Operator, eig_hermitian, embed

COMMUTATOR_TOL = 1e-9
COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian operator together with its resolution into eigenprojectors.

    Outcomes are identified by their index in ``spectrum`` (ascending
    eigenvalue unless the projectors were declared explicitly).  ``labels``
    gives a printable name for each outcome.
    """

    name: str
    op: Operator
    spectrum: tuple[tuple[float, Operator], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.spectrum:
            raise OperatorKindError(f"observable {self.name!r} has an empty spectrum")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(_format_eigenvalue(v) for v, _ in self.spectrum))
        elif len(self.labels) != len(self.spectrum):
            raise ValueError(f"observable {self.name!r}: {len(self.labels)} labels for {len(self.spectrum)} outcomes")

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def n_outcomes(self) -> int:
        return len(self.spectrum)

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.spectrum)

    @property
    def projectors(self) -> tuple[Operator, ...]:
        return tuple(p for _, p in self.spectrum)

    def renamed(self, name: str) -> Observable:
        return Observable(name, self.op, self.spectrum, self.labels)


def _format_eigenvalue(v: float) -> str:
    r = round(v)
    if abs(v - r) < 1e-9:
        return str(int(r))
    return f"{v:.6g}"


def make_observable(name: str, op, labels: Sequence[str] = ()) -> Observable:
    """Observable from a Hermitian operator; outcomes ordered by ascending eigenvalue."""
    if not isinstance(op, Operator):
        op = Operator(op, "hermitian")
    if not op.is_hermitian:
        raise OperatorKindError(f"observable {name!r} needs a hermitian operator, got kind {op.kind!r}")
    spectrum = tuple(eig_hermitian(op))
    return Observable(name, Operator(op.entries, "hermitian"), spectrum, tuple(labels))


def observable_from_projectors(
    name: str,
    projectors: Sequence,
    eigenvalues: Sequence[float] | None = None,
    labels: Sequence[str] = (),
) -> Observable:
    """Observable declared by an explicit list of orthogonal projectors.

    Used for coarse variables whose outcomes are semantic sectors of a larger
    space.  Eigenvalues default to ``0, 1, ..., k-1``.  The projectors must be
    pairwise orthogonal and sum to the identity.
    """
    projs = [p if isinstance(p, Operator) else Operator(p, "projector") for p in projectors]
    if not projs:
        raise OperatorKindError(f"observable {name!r} needs at least one projector")
    dim = projs[0].dim
    if any(p.dim != dim for p in projs):
        raise DimensionError(f"observable {name!r}: projectors of differing dimension")
    projs = [p if p.kind == "projector" else Operator(p.entries, "projector") for p in projs]
    total = sum(p.entries for p in projs)
    dev = np.max(np.abs(total - np.eye(dim)))
    if dev > COMPLETENESS_TOL:
        raise OperatorKindError(f"observable {name!r}: projectors do not sum to the identity (dev {dev:.3g})")
    for (j, p), (k, q) in combinations(enumerate(projs), 2):
        if np.max(np.abs(p.entries @ q.entries)) > COMPLETENESS_TOL:
            raise OperatorKindError(f"observable {name!r}: projectors {j} and {k} are not orthogonal")
    if eigenvalues is None:
        eigenvalues = range(len(projs))
    eigenvalues = [float(v) for v in eigenvalues]
    if len(eigenvalues) != len(projs):
        raise ValueError(f"observable {name!r}: {len(eigenvalues)} eigenvalues for {len(projs)} projectors")
    if len(set(eigenvalues)) != len(eigenvalues):
        raise ValueError(f"observable {name!r}: eigenvalues must be distinct")
    op = sum(v * p.entries for v, p in zip(eigenvalues, projs))
    return Observable(name, Operator(op, "hermitian"), tuple(zip(eigenvalues, projs)), tuple(labels))


def lift(obs: Observable, dims: Sequence[int], sites: Sequence[int], name: str | None = None) -> Observable:
    """Extend an observable on some tensor factors to the full space (identity elsewhere).

    The outcome structure is unchanged: each projector is lifted individually.
    """
    spectrum = tuple((v, Operator(embed(p.entries, dims, sites), "projector")) for v, p in obs.spectrum)
    op = Operator(embed(obs.op.entries, dims, sites), "hermitian")
    return Observable(name or obs.name, op, spectrum, obs.labels)


def commutator_norm(a: Observable, b: Observable) -> float:
    if a.dim != b.dim:
        raise DimensionError(f"observables {a.name!r} (dim {a.dim}) and {b.name!r} (dim {b.dim}) live on different spaces")
    x, y = a.op.entries, b.op.entries
    return float(np.max(np.abs(x @ y - y @ x)))


def commutes(a: Observable, b: Observable) -> bool:
    return commutator_norm(a, b) <= COMMUTATOR_TOL


@dataclass(frozen=True, eq=False)
class ClassicalSubsystem:
    name: str
    members: tuple[Observable, ...]
    ambient_dim: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.members)


def check_commuting(members: Sequence[Observable]) -> None:
    """Raise :class:`NonCommutingError` naming the first non-commuting pair."""
    for a, b in combinations(members, 2):
        norm = commutator_norm(a, b)
        if norm > COMMUTATOR_TOL:
            raise NonCommutingError(a.name, b.name, norm)


def make_classical_subsystem(name: str, members: Sequence[Observable]) -> ClassicalSubsystem:
    members = tuple(members)
    if not members:
        raise ValueError(f"classical subsystem {name!r} needs at least one member")
    dim = members[0].dim
    for m in members:
        if m.dim != dim:
            raise DimensionError(f"classical subsystem {name!r}: member {m.name!r} has dim {m.dim}, expected {dim}")
    check_commuting(members)
    return ClassicalSubsystem(name, members, dim)


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str, which: str = "Z", dims: Sequence[int] = (2,), site: int = 0) -> Observable:
    """Pauli observable on qubit ``site`` of a tensor space."""
    if dims[site] != 2:
        raise DimensionError(f"Pauli operator needs a qubit factor, site {site} has dim {dims[site]}")
    return make_observable(name, Operator(embed(PAULI[which], dims, [site]), "hermitian"))


def spin(name: str, theta: float, dims: Sequence[int] = (2,), site: int = 0) -> Observable:
    """``cos(theta) Z + sin(theta) X`` on qubit ``site``."""
    if dims[site] != 2:
        raise DimensionError(f"spin observable needs a qubit factor, site {site} has dim {dims[site]}")
    m = np.cos(theta) * PAULI["Z"] + np.sin(theta) * PAULI["X"]
    return make_observable(name, Operator(embed(m, dims, [site]), "hermitian"))


def pointer(name: str, dims: Sequence[int], site: int, labels: Sequence[str] = ()) -> Observable:
    """Observable diagonal in the computational basis of one factor, eigenvalues ``0..d-1``."""
    d = dims[site]
    projs = []
    for k in range(d):
        p = np.zeros((d, d), dtype=complex)
        p[k, k] = 1.0
        projs.append(embed(p, dims, [site]))
    return observable_from_projectors(name, projs, labels=labels)
