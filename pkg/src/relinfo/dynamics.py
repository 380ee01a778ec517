"""Unitary time evolution of information quantities.

The central model is a von Neumann measurement: a system observable ``A``
with outcomes ``a_n`` coupled to a pointer with basis ``|b_k>`` through

    H = i omega sum_n P_n (x) (|b_n><b_r| - |b_r><b_n|)

which rotates ``|a_n>|b_r>`` into ``|a_n>|b_n>`` over ``T = pi / (2 omega)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import born_joint
from .errors import DimensionError
from .infomeasures import InfoReport, info_report
from .linops import Operator, StateVector, evolve, expm_unitary
from .observables import ClassicalSubsystem, Observable, lift, make_classical_subsystem, pointer


def measurement_hamiltonian(
    a: Observable,
    n_pointer: int,
    ready: int,
    targets: Sequence[int],
    omega: float = 1.0,
) -> Operator:
    """Coupling that writes the outcome of ``a`` into a pointer of dimension ``n_pointer``.

    ``targets[n]`` is the pointer basis index recording outcome ``n``; ``ready``
    is the pointer's initial basis index.  The result acts on
    ``system (x) pointer``.
    """
    targets = [int(k) for k in targets]
    if n_pointer <= a.n_outcomes:
        raise DimensionError(f"pointer needs more than {a.n_outcomes} levels, got {n_pointer}")
    if len(targets) != a.n_outcomes:
        raise ValueError(f"need one pointer target per outcome ({a.n_outcomes}), got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise ValueError(f"pointer targets must be distinct, got {targets}")
    if not 0 <= ready < n_pointer or any(not 0 <= k < n_pointer for k in targets):
        raise ValueError(f"pointer indices out of range for {n_pointer} levels")
    if ready in targets:
        raise ValueError(f"ready index {ready} is also a pointer target")
    d = a.dim
    h = np.zeros((d * n_pointer, d * n_pointer), dtype=complex)
    for proj, k in zip(a.projectors, targets):
        swap = np.zeros((n_pointer, n_pointer), dtype=complex)
        swap[k, ready] = 1.0
        swap[ready, k] = -1.0
        h += 1j * omega * np.kron(proj.entries, swap)
    return Operator(h, "hermitian")


@dataclass(frozen=True)
class MeasurementModel:
    """Everything needed to run the von Neumann measurement sweep."""

    psi0: StateVector
    hamiltonian: Operator
    system_obs: Observable
    pointer_obs: Observable
    pointer_cs: ClassicalSubsystem
    omega: float
    alphas: tuple[complex, ...]

    @property
    def rho0(self) -> Operator:
        return self.psi0.density()

    @property
    def duration(self) -> float:
        return np.pi / (2 * self.omega)

    @property
    def h_target(self) -> float:
        p = np.abs(np.asarray(self.alphas)) ** 2
        p = p[p > 0]
        return float(-np.sum(p * np.log2(p)))


def measurement_model(alphas: Sequence[complex], n_pointer: int | None = None, omega: float = 1.0, ready: int = 0) -> MeasurementModel:
    """System of ``len(alphas)`` levels prepared in ``sum_n alpha_n |n>``, pointer ready at ``ready``.

    Outcome ``n`` of the system is recorded at the ``n``-th pointer level
    other than ``ready``.
    """
    alphas = tuple(complex(a) for a in alphas)
    n_a = len(alphas)
    n_b = n_a + 1 if n_pointer is None else n_pointer
    dims = [n_a, n_b]
    sys_local = pointer("A", [n_a], 0)
    targets = [k for k in range(n_b) if k != ready][:n_a]
    h = measurement_hamiltonian(sys_local, n_b, ready, targets, omega)
    psi = np.kron(np.asarray(alphas), np.eye(n_b)[ready])
    a = lift(sys_local, dims, [0])
    b = pointer("B", dims, 1)
    return MeasurementModel(
        psi0=StateVector(psi),
        hamiltonian=h,
        system_obs=a,
        pointer_obs=b,
        pointer_cs=make_classical_subsystem("B", [b]),
        omega=omega,
        alphas=alphas,
    )


@dataclass(frozen=True)
class SweepSample:
    t: float
    state: Operator
    reports: tuple[InfoReport, ...]


@dataclass(frozen=True)
class Sweep:
    times: tuple[float, ...]
    samples: tuple[SweepSample, ...]
    omega: float
    duration: float
    tracked: tuple[tuple[str, str], ...]
    t_offset: float = 0.0

    def series(self, field_name: str, index: int = 0) -> np.ndarray:
        return np.array([getattr(s.reports[index], field_name) for s in self.samples])

    def conditional_series(self, outcome: tuple[int, ...], index: int = 0) -> list[float | None]:
        """``I_{A|b}`` per sample for one outcome ``b``; ``None`` where ``b`` has no support."""
        return [s.reports[index].conditional.get(outcome) for s in self.samples]

    def to_csv(self, index: int = 0) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "omega_t", "I_mutual_bits", "I_relative_bits", "I_target_bits"])
        for s in self.samples:
            r = s.reports[index]
            t = s.t + self.t_offset
            w.writerow([f"{v:.12g}" for v in (t, self.omega * t, r.mutual, r.relative, r.information)])
        return buf.getvalue()


def uniform_times(duration: float, samples: int) -> np.ndarray:
    if samples < 2:
        raise ValueError("a sweep needs at least 2 samples")
    return np.linspace(0.0, duration, samples)


def run_sweep(
    rho0: Operator,
    h: Operator,
    tracked: Sequence[tuple[ClassicalSubsystem, Observable]],
    times: Sequence[float],
    omega: float = 1.0,
) -> Sweep:
    """Evolve ``rho0`` under ``h`` and report each tracked (subsystem, target) pair at every time.

    Each sample is evolved directly from ``t = 0``, so errors do not accumulate.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two sample times")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("sample times must start at 0 and increase strictly")
    if h.dim != rho0.dim:
        raise DimensionError(f"hamiltonian has dim {h.dim}, state has dim {rho0.dim}")
    samples = []
    for t in times:
        rho_t = evolve(rho0, expm_unitary(h, float(t)))
        reports = []
        for cs, target in tracked:
            jd = born_joint(rho_t, [target] + list(cs.members))
            reports.append(info_report(jd, 0, tuple(range(1, len(cs.members) + 1))))
        samples.append(SweepSample(float(t), rho_t, tuple(reports)))
    return Sweep(
        times=tuple(float(t) for t in times),
        samples=tuple(samples),
        omega=omega,
        duration=float(times[-1]),
        tracked=tuple((cs.name, target.name) for cs, target in tracked),
    )


def full_rank_variant(rho0: Operator, epsilon: float) -> Operator:
    """``(1 - epsilon) rho0 + epsilon 1/d``: a slightly mixed, full-rank version of ``rho0``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie strictly between 0 and 1, got {epsilon}")
    d = rho0.dim
    return Operator((1.0 - epsilon) * rho0.entries + epsilon * np.eye(d) / d, "density")


def appb_sweep(
    alphas: Sequence[complex] = (np.sqrt(0.25), np.sqrt(0.75)),
    n_pointer: int = 3,
    omega: float = 1.0,
    samples: int = 1000,
    epsilon: float | None = None,
) -> tuple[MeasurementModel, Sweep]:
    """Run the measurement model over ``[0, pi/(2 omega)]``, optionally with a full-rank initial state."""
    model = measurement_model(alphas, n_pointer, omega)
    rho0 = model.rho0 if epsilon is None else full_rank_variant(model.rho0, epsilon)
    times = uniform_times(model.duration, samples)
    sweep = run_sweep(rho0, model.hamiltonian, [(model.pointer_cs, model.system_obs)], times, omega)
    return model, sweep

