"""Dense complex operator algebra.

Everything here works on small dense matrices (desk scale, a few hundred
dimensions at most).  Operators are immutable: the wrapped array is marked
read-only on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Literal, Sequence

import numpy as np

from .errors import DimensionError, OperatorKindError

Kind = Literal["general", "hermitian", "unitary", "density", "projector"]

KIND_TOL = 1e-10
DEGENERACY_RTOL = 1e-9

_HERMITIAN_KINDS = {"hermitian", "density", "projector"}


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def _check_kind(m: np.ndarray, kind: str) -> None:
    if kind == "general":
        return
    if kind == "unitary":
        dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])), initial=0.0)
        if dev > KIND_TOL:
            raise OperatorKindError(f"operator is not unitary (max |M'M - 1| = {dev:.3g})")
        return
    if kind not in _HERMITIAN_KINDS:
        raise OperatorKindError(f"unknown operator kind {kind!r}")
    dev = np.max(np.abs(m - m.conj().T), initial=0.0)
    if dev > KIND_TOL:
        raise OperatorKindError(f"operator is not hermitian (max |M - M'| = {dev:.3g})")
    if kind == "density":
        tr = np.trace(m).real
        if abs(tr - 1.0) > KIND_TOL:
            raise OperatorKindError(f"density operator has trace {tr!r}")
        low = np.linalg.eigvalsh(m)[0] if m.size else 0.0
        if low < -KIND_TOL:
            raise OperatorKindError(f"density operator has negative eigenvalue {low:.3g}")
    elif kind == "projector":
        dev = np.max(np.abs(m @ m - m), initial=0.0)
        if dev > KIND_TOL:
            raise OperatorKindError(f"operator is not idempotent (max |M^2 - M| = {dev:.3g})")


@dataclass(frozen=True, eq=False)
class Operator:
    """A square complex matrix tagged with the structure it is known to have."""

    entries: np.ndarray
    kind: Kind = "general"

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"operator must be a non-empty square matrix, got shape {m.shape}")
        _check_kind(m, self.kind)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_hermitian(self) -> bool:
        return self.kind in _HERMITIAN_KINDS

    def dag(self) -> Operator:
        return Operator(self.entries.conj().T, self.kind)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def __matmul__(self, other: Operator) -> Operator:
        return Operator(self.entries @ _matrix(other))

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim}, kind={self.kind!r})"


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = _frozen(self.amplitudes)
        if v.ndim != 1 or v.size == 0:
            raise DimensionError(f"state vector must be a non-empty 1-d array, got shape {v.shape}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > KIND_TOL:
            raise OperatorKindError(f"state vector has norm {norm!r}")
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> Operator:
        v = self.amplitudes
        return Operator(np.outer(v, v.conj()), "density")

    def projector(self) -> Operator:
        v = self.amplitudes
        return Operator(np.outer(v, v.conj()), "projector")


def _matrix(x) -> np.ndarray:
    if isinstance(x, Operator):
        return x.entries
    return np.asarray(x, dtype=complex)


def as_operator(x, kind: Kind = "general") -> Operator:
    if isinstance(x, Operator):
        return x
    return Operator(x, kind)


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim), "projector")


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def _is_unitary(m: np.ndarray) -> bool:
    return np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= KIND_TOL


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product ``a (x) b``; the kind tag survives when both factors share it."""
    m = np.kron(a.entries, b.entries)
    if a.kind == b.kind:
        kind = a.kind
    elif "unitary" in (a.kind, b.kind) and _is_unitary(m):
        kind = "unitary"
    elif a.is_hermitian and b.is_hermitian:
        kind = "hermitian"
    else:
        kind = "general"
    return Operator(m, kind)


def tensor_all(ops: Sequence[Operator]) -> Operator:
    return reduce(tensor, ops)


def embed(m, dims: Sequence[int], sites: Sequence[int]) -> np.ndarray:
    """Act with ``m`` on the factors ``sites`` of a tensor space, identity elsewhere.

    ``m`` is expressed on the factors in the order given by ``sites``, which
    need not be contiguous or sorted.
    """
    m = _matrix(m)
    dims = [int(d) for d in dims]
    sites = [int(s) for s in sites]
    if len(set(sites)) != len(sites) or any(not 0 <= s < len(dims) for s in sites):
        raise DimensionError(f"invalid sites {sites} for {len(dims)} factors")
    local = int(np.prod([dims[s] for s in sites]))
    if m.shape != (local, local):
        raise DimensionError(f"operator of shape {m.shape} does not act on sites {sites} (dim {local})")
    rest = [k for k in range(len(dims)) if k not in sites]
    rest_dim = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(m, np.eye(rest_dim))
    order = sites + rest
    n = len(dims)
    shape = [dims[k] for k in order]
    full = full.reshape(shape + shape)
    # axis j of `full` currently holds factor order[j]; move it back to its place
    inverse = np.argsort(order)
    full = full.transpose(list(inverse) + [n + i for i in inverse])
    total = int(np.prod(dims))
    return full.reshape(total, total)


def partial_trace(m: Operator, dims: Sequence[int], keep: Sequence[int]) -> Operator:
    """Trace out every factor not listed in ``keep``; kept factors stay in ascending order."""
    dims = [int(d) for d in dims]
    keep = sorted({int(k) for k in keep})
    if int(np.prod(dims)) != m.dim:
        raise DimensionError(f"dims {dims} do not multiply to operator dimension {m.dim}")
    if not keep or any(not 0 <= k < len(dims) for k in keep):
        raise DimensionError(f"keep must be a non-empty subset of range({len(dims)}), got {keep}")
    n = len(dims)
    traced = [k for k in range(n) if k not in keep]
    t = m.entries.reshape(dims + dims)
    perm = keep + traced
    t = t.transpose(perm + [n + p for p in perm])
    dk = int(np.prod([dims[k] for k in keep]))
    dt = int(np.prod([dims[k] for k in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    reduced = np.einsum("ajbj->ab", t)
    kind = "density" if m.kind == "density" else ("hermitian" if m.is_hermitian else "general")
    return Operator(reduced, kind)


def eig_hermitian(m: Operator) -> list[tuple[float, Operator]]:
    """Spectral resolution of a Hermitian operator.

    Eigenvalues closer than ``1e-9`` times the spectral radius are merged into
    a single eigenspace.  Returns ``(eigenvalue, projector)`` pairs in
    ascending order of eigenvalue.
    """
    if not m.is_hermitian:
        raise OperatorKindError(f"eig_hermitian needs a hermitian operator, got kind {m.kind!r}")
    h = m.entries
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    radius = float(np.max(np.abs(w)))
    gap = DEGENERACY_RTOL * max(radius, 1e-12)
    groups: list[list[int]] = [[0]]
    for k in range(1, w.size):
        if w[k] - w[k - 1] <= gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    out = []
    for g in groups:
        vecs = v[:, g]
        proj = vecs @ vecs.conj().T
        out.append((float(np.mean(w[g])), Operator(proj, "projector")))
    return out


def expm_unitary(h: Operator, t: float, sign: int = 1) -> Operator:
    """``exp(-i sign h t)`` by spectral decomposition of ``h``."""
    if not h.is_hermitian:
        raise OperatorKindError(f"expm_unitary needs a hermitian operator, got kind {h.kind!r}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m = h.entries
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    phases = np.exp(-1j * sign * w * t)
    return Operator((v * phases) @ v.conj().T, "unitary")


def evolve(rho: Operator, u: Operator) -> Operator:
    """Conjugate a density operator by a unitary."""
    out = u.entries @ rho.entries @ u.entries.conj().T
    return Operator(0.5 * (out + out.conj().T), "density")
