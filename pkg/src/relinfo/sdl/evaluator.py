"""Semantic checking and evaluation of scenario documents.

:func:`build_model` resolves every name, builds states and observables and
rejects anything that cannot run (unknown names, wrong dimensions,
non-normalised states, non-commuting classical subsystems, ...).
:func:`evaluate` then executes the steps and assertions in order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ..distributions import born_joint, born_single
from ..dynamics import full_rank_variant, measurement_hamiltonian, run_sweep
from ..errors import NonCommutingError, RelinfoError
from ..facts import DEFAULT_TOL, is_fact, is_relative_fact, perspective_of, perspectives_agree
from ..infomeasures import (
    conditional_information,
    entropy,
    i_max,
    information,
    mutual_information,
    relative_information,
)
from ..linops import Operator, StateVector, embed, evolve, expm_unitary
from ..observables import (
    PAULI,
    ClassicalSubsystem,
    Observable,
    check_commuting,
    commutes,
    make_classical_subsystem,
    make_observable,
    observable_from_projectors,
)
from ..scenarios import EXACT_TOL, ScenarioResult
from . import ast
from .diagnostics import SdlRuntimeError, SdlSemanticError, SourceSpan
from .parser import MAX_DIM
from .printer import print_query, print_value

NORM_TOL = 1e-9
# upper bound on (number of outcomes) * dim**2 for one observable
MAX_OBSERVABLE_ENTRIES = 1 << 22


def coef_value(c: ast.Coef) -> complex:
    """Numeric value of a coefficient; raises ``SdlSemanticError`` on domain errors."""
    acc = 1.0 + 0j
    for op, atom in zip(c.ops, c.atoms):
        v = _atom_value(atom)
        if op == "/":
            if v == 0:
                raise SdlSemanticError(atom.span, "division by zero")
            acc /= v
        else:
            acc *= v
    if c.negative:
        acc = -acc
    if not (math.isfinite(acc.real) and math.isfinite(acc.imag)):
        raise SdlSemanticError(c.span, "coefficient is not finite")
    return acc


def _atom_value(a: ast.Atom) -> complex:
    if a.kind == "i":
        return 1j
    if a.kind == "pi":
        return complex(math.pi)
    x = float(a.text)
    if a.kind == "num":
        return complex(x)
    if a.kind == "sqrt":
        if x < 0:
            raise SdlSemanticError(a.span, "sqrt of a negative number")
        return complex(math.sqrt(x))
    if x <= 0:
        raise SdlSemanticError(a.span, "log2 of a non-positive number")
    return complex(math.log2(x))


def real_value(c: ast.Coef, what: str) -> float:
    v = coef_value(c)
    if v.imag != 0:
        raise SdlSemanticError(c.span, f"{what} must be real")
    return v.real


@dataclass(frozen=True)
class SystemInfo:
    name: str
    dim: int
    labels: tuple[str, ...]
    site: int

    def basis_index(self, entry: str, span: SourceSpan) -> int:
        if entry.isdigit():
            k = int(entry)
            if k >= self.dim:
                raise SdlSemanticError(span, f"index {k} out of range for system {self.name} (dim {self.dim})")
            return k
        if entry in self.labels:
            return self.labels.index(entry)
        raise SdlSemanticError(span, f"system {self.name} has no basis label {entry!r}")

    def basis_vector(self, entry: str, span: SourceSpan) -> np.ndarray:
        if entry in ("+", "-"):
            if self.dim != 2:
                raise SdlSemanticError(span, f"'{entry}' needs a qubit, system {self.name} has dim {self.dim}")
            s = 1.0 if entry == "+" else -1.0
            return np.array([1.0, s], dtype=complex) / math.sqrt(2)
        v = np.zeros(self.dim, dtype=complex)
        v[self.basis_index(entry, span)] = 1.0
        return v


@dataclass(frozen=True)
class StateInfo:
    name: str
    systems: tuple[str, ...]
    vector: np.ndarray


@dataclass(eq=False)
class ObservableInfo:
    """A declared observable: its local operator and how it sits in the full space."""

    name: str
    systems: tuple[str, ...]
    sites: tuple[int, ...]
    dims: tuple[int, ...]
    local_projectors: tuple[np.ndarray, ...] | None
    local_eigenvalues: tuple[float, ...] | None
    local_op: np.ndarray
    labels: tuple[str, ...] = ()
    omega: float = 1.0

    @cached_property
    def local(self) -> Observable:
        if self.local_projectors is None:
            return make_observable(self.name, self.local_op, self.labels)
        return observable_from_projectors(self.name, self.local_projectors, self.local_eigenvalues, self.labels)

    @cached_property
    def full(self) -> Observable:
        if self.local_projectors is None:
            return make_observable(self.name, Operator(embed(self.local_op, self.dims, self.sites), "hermitian"), self.labels)
        projs = [embed(p, self.dims, self.sites) for p in self.local_projectors]
        return observable_from_projectors(self.name, projs, self.local_eigenvalues, self.labels)

    @cached_property
    def operator(self) -> Operator:
        return Operator(embed(self.local_op, self.dims, self.sites), "hermitian")


@dataclass
class Model:
    systems: dict[str, SystemInfo] = field(default_factory=dict)
    states: dict[str, StateInfo] = field(default_factory=dict)
    observables: dict[str, ObservableInfo] = field(default_factory=dict)
    subsystems: dict[str, ClassicalSubsystem] = field(default_factory=dict)
    defined_at: dict[str, SourceSpan] = field(default_factory=dict)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.systems.values())

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims)) if self.systems else 1


class _Builder:
    def __init__(self):
        self.m = Model()
        self.seen_other = False
        self.has_state = False

    # names --------------------------------------------------------------------------

    def define(self, name: str, span: SourceSpan) -> None:
        if name in self.m.defined_at:
            prev = self.m.defined_at[name]
            raise SdlSemanticError(span, f"'{name}' is already defined at line {prev.line}")
        self.m.defined_at[name] = span

    def system(self, name: str, span: SourceSpan) -> SystemInfo:
        if name not in self.m.systems:
            raise SdlSemanticError(span, f"unknown system '{name}'")
        return self.m.systems[name]

    def obs(self, name: str, span: SourceSpan) -> ObservableInfo:
        if name not in self.m.observables:
            raise SdlSemanticError(span, f"unknown observable '{name}'")
        return self.m.observables[name]

    def subsystem(self, name: str, span: SourceSpan) -> ClassicalSubsystem:
        if name not in self.m.subsystems:
            raise SdlSemanticError(span, f"unknown classical subsystem '{name}'")
        return self.m.subsystems[name]

    def variables(self, names: Sequence[str], span: SourceSpan) -> list[Observable]:
        """Expand observable and classical-subsystem names into observables."""
        out = []
        for n in names:
            if n in self.m.observables:
                out.append(self.full(n, span))
            elif n in self.m.subsystems:
                out.extend(self.m.subsystems[n].members)
            else:
                raise SdlSemanticError(span, f"unknown observable or classical subsystem '{n}'")
        return out

    def full(self, name: str, span: SourceSpan) -> Observable:
        info = self.obs(name, span)
        try:
            return info.full
        except RelinfoError as exc:
            raise SdlSemanticError(span, f"observable {name}: {exc}") from None

    # statements -----------------------------------------------------------------------

    def statement(self, s) -> None:
        if isinstance(s, ast.SystemDecl):
            return self.system_decl(s)
        self.seen_other = True
        if isinstance(s, ast.StateDecl):
            return self.state_decl(s)
        if isinstance(s, ast.ObsDecl):
            return self.obs_decl(s)
        if isinstance(s, ast.ClassicalDecl):
            return self.classical_decl(s)
        return self.step(s)

    def system_decl(self, s: ast.SystemDecl) -> None:
        if self.seen_other:
            raise SdlSemanticError(s.span, "systems must be declared before any other statement")
        if s.name in self.m.systems:
            raise SdlSemanticError(s.span, f"system '{s.name}' is already defined at line {self.m.defined_at['system:' + s.name].line}")
        if s.labels:
            if len(s.labels) != s.dim:
                raise SdlSemanticError(s.span, f"system {s.name} has dim {s.dim} but {len(s.labels)} labels")
            if len(set(s.labels)) != len(s.labels):
                raise SdlSemanticError(s.span, f"system {s.name} has duplicate labels")
        if self.m.total_dim * s.dim > MAX_DIM:
            raise SdlSemanticError(s.span, f"total dimension would exceed {MAX_DIM}")
        self.m.systems[s.name] = SystemInfo(s.name, s.dim, s.labels, len(self.m.systems))
        self.m.defined_at["system:" + s.name] = s.span

    def state_decl(self, s: ast.StateDecl) -> None:
        self.define(s.name, s.span)
        names = s.systems or tuple(self.m.systems)
        if not names:
            raise SdlSemanticError(s.span, "no systems declared")
        infos = [self.system(n, s.span) for n in names]
        if len(set(names)) != len(names):
            raise SdlSemanticError(s.span, f"state {s.name} lists a system twice")
        if any(a.site >= b.site for a, b in zip(infos, infos[1:])):
            raise SdlSemanticError(s.span, f"systems of state {s.name} must follow declaration order")
        vec, used = self.eval_sum(s.expr, infos, 0)
        if used != len(infos):
            raise SdlSemanticError(s.expr.span, f"state {s.name} covers {used} of its {len(infos)} systems")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > NORM_TOL:
            raise SdlSemanticError(s.expr.span, f"state {s.name} has norm {norm:.12g}, expected 1")
        self.m.states[s.name] = StateInfo(s.name, tuple(names), vec)

    def eval_sum(self, s: ast.Sum, infos: list[SystemInfo], offset: int) -> tuple[np.ndarray, int]:
        total = None
        used = None
        for term in s.terms:
            vec, n = self.eval_term(term, infos, offset)
            if used is not None and n != used:
                raise SdlSemanticError(term.span, f"term covers {n} systems, earlier terms cover {used}")
            used = n
            total = vec if total is None else total + vec
        return total, used

    def eval_term(self, t: ast.Term, infos: list[SystemInfo], offset: int) -> tuple[np.ndarray, int]:
        c = coef_value(t.coef) if t.coef is not None else 1.0 + 0j
        if t.sign == "-":
            c = -c
        vec = np.array([c], dtype=complex)
        pos = offset
        for f in t.factors:
            v, n = self.eval_factor(f, infos, pos)
            vec = np.kron(vec, v)
            pos += n
        return vec, pos - offset

    def eval_factor(self, f, infos: list[SystemInfo], pos: int) -> tuple[np.ndarray, int]:
        remaining = infos[pos:]
        if isinstance(f, ast.KetLit):
            if len(f.entries) > len(remaining):
                raise SdlSemanticError(f.span, f"ket has {len(f.entries)} entries but only {len(remaining)} systems remain")
            vec = np.array([1.0 + 0j])
            for entry, info in zip(f.entries, remaining):
                vec = np.kron(vec, info.basis_vector(entry, f.span))
            return vec, len(f.entries)
        if isinstance(f, ast.Group):
            return self.eval_sum(f.body, infos, pos)
        if f.name not in self.m.states:
            raise SdlSemanticError(f.span, f"unknown state '{f.name}'")
        st = self.m.states[f.name]
        here = tuple(i.name for i in remaining[: len(st.systems)])
        if here != st.systems:
            raise SdlSemanticError(
                f.span, f"state {f.name} lives on {' '.join(st.systems)} but is used on {' '.join(here) or 'nothing'}"
            )
        return st.vector, len(st.systems)

    def obs_decl(self, s: ast.ObsDecl) -> None:
        self.define(s.name, s.span)
        infos = [self.system(n, s.span) for n in s.systems]
        if len(set(s.systems)) != len(s.systems):
            raise SdlSemanticError(s.span, f"observable {s.name} lists a system twice")
        dims = self.m.dims
        sites = tuple(i.site for i in infos)
        k = s.kind
        common = dict(name=s.name, systems=s.systems, sites=sites, dims=dims)
        single = isinstance(k, (ast.PauliKind, ast.SpinKind, ast.PointerKind, ast.SectorsKind))
        if single and len(infos) != 1:
            raise SdlSemanticError(s.span, f"this observable kind acts on exactly one system, got {len(infos)}")
        if isinstance(k, (ast.PauliKind, ast.SpinKind)) and infos[0].dim != 2:
            raise SdlSemanticError(s.span, f"system {infos[0].name} is not a qubit (dim {infos[0].dim})")
        if isinstance(k, ast.PauliKind):
            info = ObservableInfo(local_projectors=None, local_eigenvalues=None, local_op=PAULI[k.which], **common)
        elif isinstance(k, ast.SpinKind):
            theta = real_value(k.angle, "spin angle")
            op = math.cos(theta) * PAULI["Z"] + math.sin(theta) * PAULI["X"]
            info = ObservableInfo(local_projectors=None, local_eigenvalues=None, local_op=op, **common)
        elif isinstance(k, ast.PointerKind):
            d = infos[0].dim
            projs = tuple(np.diag(np.eye(d, dtype=complex)[j]) for j in range(d))
            evs = tuple(float(j) for j in range(d))
            info = ObservableInfo(local_projectors=projs, local_eigenvalues=evs, local_op=np.diag(np.arange(d, dtype=complex)),
                                  labels=infos[0].labels, **common)
        elif isinstance(k, ast.SectorsKind):
            sysinfo = infos[0]
            seen: dict[int, int] = {}
            projs = []
            for g, group in enumerate(k.groups):
                p = np.zeros((sysinfo.dim, sysinfo.dim), dtype=complex)
                for entry in group:
                    j = sysinfo.basis_index(entry, k.span)
                    if j in seen:
                        raise SdlSemanticError(k.span, f"basis state {entry} appears in more than one sector")
                    seen[j] = g
                    p[j, j] = 1.0
                projs.append(p)
            if len(seen) != sysinfo.dim:
                missing = [j for j in range(sysinfo.dim) if j not in seen]
                raise SdlSemanticError(k.span, f"sectors do not cover basis states {missing}")
            evs = tuple(float(g) for g in range(len(projs)))
            op = sum(v * p for v, p in zip(evs, projs))
            info = ObservableInfo(local_projectors=tuple(projs), local_eigenvalues=evs, local_op=op, **common)
        elif isinstance(k, ast.ProjectorKind):
            if k.state not in self.m.states:
                raise SdlSemanticError(k.span, f"unknown state '{k.state}'")
            st = self.m.states[k.state]
            if st.systems != s.systems:
                raise SdlSemanticError(
                    k.span, f"state {k.state} lives on {' '.join(st.systems)}, observable {s.name} on {' '.join(s.systems)}"
                )
            p = np.outer(st.vector, st.vector.conj())
            projs = (np.eye(p.shape[0], dtype=complex) - p, p)
            info = ObservableInfo(local_projectors=projs, local_eigenvalues=(0.0, 1.0), local_op=p, labels=("0", "1"), **common)
        else:
            info = self.measurement(s, k, infos, common)
        n_out = len(info.local_projectors) if info.local_projectors is not None else info.local_op.shape[0]
        if n_out * self.m.total_dim ** 2 > MAX_OBSERVABLE_ENTRIES:
            raise SdlSemanticError(s.span, f"observable {s.name} is too large to represent")
        self.m.observables[s.name] = info

    def measurement(self, s: ast.ObsDecl, k: ast.MeasurementKind, infos, common) -> ObservableInfo:
        target = self.obs(k.observable, k.span)
        if tuple(s.systems[:-1]) != target.systems:
            raise SdlSemanticError(
                k.span,
                f"measurement of {k.observable} must act on {' '.join(target.systems)} followed by a pointer system",
            )
        ptr = infos[-1]
        omega = real_value(k.omega, "omega")
        if omega == 0:
            raise SdlSemanticError(k.omega.span, "omega must be nonzero")
        ready = ptr.basis_index(k.ready, k.span)
        targets = [ptr.basis_index(t, k.span) for t in k.targets]
        try:
            h = measurement_hamiltonian(target.local, ptr.dim, ready, targets, omega)
        except (RelinfoError, ValueError) as exc:
            raise SdlSemanticError(k.span, str(exc)) from None
        return ObservableInfo(local_projectors=None, local_eigenvalues=None, local_op=h.entries, omega=omega, **common)

    def classical_decl(self, s: ast.ClassicalDecl) -> None:
        self.define(s.name, s.span)
        if len(set(s.members)) != len(s.members):
            raise SdlSemanticError(s.span, f"classical subsystem {s.name} lists a member twice")
        members = [self.full(n, s.span) for n in s.members]
        try:
            self.m.subsystems[s.name] = make_classical_subsystem(s.name, members)
        except NonCommutingError as exc:
            a, b = exc.pair
            raise SdlSemanticError(s.span, f"classical subsystem {s.name}: {a} and {b} do not commute") from None

    # steps ------------------------------------------------------------------------------

    def step(self, s) -> None:
        if isinstance(s, ast.StateStep):
            if s.state not in self.m.states:
                raise SdlSemanticError(s.span, f"unknown state '{s.state}'")
            if self.m.states[s.state].systems != tuple(self.m.systems):
                raise SdlSemanticError(s.span, f"state {s.state} does not span every system")
            self.has_state = True
            return
        if not self.has_state:
            raise SdlSemanticError(s.span, "no state selected yet; add 'step state NAME' first")
        if isinstance(s, ast.MixStep):
            eps = real_value(s.epsilon, "mixing weight")
            if not 0.0 < eps < 1.0:
                raise SdlSemanticError(s.epsilon.span, "mixing weight must lie strictly between 0 and 1")
        elif isinstance(s, ast.ReportStep):
            self.subsystem(s.subsystem, s.span)
            for t in s.targets:
                self.full(t, s.span)
        elif isinstance(s, ast.EvolveStep):
            self.obs(s.hamiltonian, s.span)
            t0 = real_value(s.start, "start time")
            t1 = real_value(s.stop, "stop time")
            if t1 <= t0:
                raise SdlSemanticError(s.span, "stop time must be later than start time")
            if s.track is not None:
                cs = self.subsystem(s.track[0], s.span)
                target = self.full(s.track[1], s.span)
                self.require_commuting(list(cs.members) + [target], s.span)
        elif isinstance(s, ast.AssertStmt):
            self.assertion(s)

    def require_commuting(self, members: list[Observable], span: SourceSpan) -> None:
        try:
            check_commuting(members)
        except NonCommutingError as exc:
            a, b = exc.pair
            raise SdlSemanticError(span, f"{a} and {b} do not commute, so they have no joint distribution") from None

    def assertion(self, s: ast.AssertStmt) -> None:
        q = s.query
        numeric = isinstance(q, (ast.ProbQuery,)) or (isinstance(q, ast.InfoQuery) and q.func in ("I", "H", "Imax"))
        if numeric and not isinstance(s.expected, ast.Coef):
            raise SdlSemanticError(s.expected.span, f"{print_query(q)} is a number; expected a numeric value")
        if not numeric and not isinstance(s.expected, ast.BoolLit):
            raise SdlSemanticError(s.expected.span, f"{print_query(q)} is true or false; expected a boolean value")
        if isinstance(s.expected, ast.Coef):
            real_value(s.expected, "expected value")
        if isinstance(q, ast.InfoQuery):
            target = self.variables(q.target, q.span)
            given = self.variables(q.given, q.span)
            self.require_commuting(target + given, q.span)
            if q.value:
                if len(q.value) != len(given):
                    raise SdlSemanticError(q.span, f"{len(q.value)} outcome indices for {len(given)} conditioning variables")
                for v, g in zip(q.value, given):
                    if v >= g.n_outcomes:
                        raise SdlSemanticError(q.span, f"outcome {v} out of range for {g.name} ({g.n_outcomes} outcomes)")
        elif isinstance(q, ast.AgreeQuery):
            self.subsystem(q.first, q.span)
            self.subsystem(q.second, q.span)
            self.full(q.target, q.span)
        elif isinstance(q, ast.ProbQuery):
            o = self.full(q.observable, q.span)
            if q.outcome >= o.n_outcomes:
                raise SdlSemanticError(q.span, f"outcome {q.outcome} out of range for {o.name} ({o.n_outcomes} outcomes)")
        else:
            self.full(q.first, q.span)
            self.full(q.second, q.span)


def build_model(doc: ast.Document) -> Model:
    """Resolve and check a parsed document; raises :class:`SdlSemanticError`."""
    b = _Builder()
    for s in doc.statements:
        b.statement(s)
    return b.m


@dataclass(frozen=True)
class RunConfig:
    """Command-line overrides: fact tolerance and sweep sample count."""

    tol: float | None = None
    samples: int | None = None


def evaluate(doc: ast.Document, name: str = "scenario", config: RunConfig | None = None) -> ScenarioResult:
    """Run a checked document and collect stages, reports, sweeps and assertion outcomes."""
    config = config or RunConfig()
    model = build_model(doc)
    b = _Builder()
    b.m = model
    res = ScenarioResult(name)
    fact_tol = config.tol if config.tol is not None else DEFAULT_TOL
    rho: Operator | None = None
    stage = None
    n_sweeps = 0
    for s in doc.statements:
        try:
            if isinstance(s, ast.StateStep):
                rho = StateVector(model.states[s.state].vector).density()
                stage = res.add_stage(s.state, rho)
            elif isinstance(s, ast.MixStep):
                rho = full_rank_variant(rho, real_value(s.epsilon, "mixing weight"))
                stage = res.add_stage(f"{stage.label}+mix", rho)
            elif isinstance(s, ast.ReportStep):
                cs = model.subsystems[s.subsystem]
                targets = [model.observables[t].full for t in s.targets]
                tol = float(s.tol) if s.tol is not None else fact_tol
                stage.reports.append(perspective_of(rho, cs, targets, tol, stage.label))
            elif isinstance(s, ast.EvolveStep):
                n_sweeps += 1
                rho = _evolve(s, model, rho, config, res, n_sweeps)
                stage = res.add_stage(f"{stage.label}>{s.hamiltonian}", rho)
            elif isinstance(s, ast.AssertStmt):
                _check(s, b, rho, stage.label, fact_tol, res)
        except SdlSemanticError:
            raise
        except RelinfoError as exc:
            raise SdlRuntimeError(s.span, str(exc)) from None
    return res


def _evolve(s: ast.EvolveStep, model: Model, rho: Operator, config: RunConfig, res: ScenarioResult, k: int) -> Operator:
    info = model.observables[s.hamiltonian]
    h = info.operator
    t0 = real_value(s.start, "start time")
    t1 = real_value(s.stop, "stop time")
    n = config.samples if config.samples is not None else s.samples
    start = rho if t0 == 0 else evolve(rho, expm_unitary(h, t0))
    times = np.linspace(0.0, t1 - t0, n)
    tracked = []
    if s.track is not None:
        cs = model.subsystems[s.track[0]]
        tracked.append((cs, model.observables[s.track[1]].full))
    sweep = run_sweep(start, h, tracked, times, info.omega)
    if tracked:
        sweep = type(sweep)(sweep.times, sweep.samples, sweep.omega, sweep.duration, sweep.tracked, t0)
        res.tables[f"sweep{k}_{s.track[0]}_{s.track[1]}.csv"] = sweep.to_csv()
        res.extras.setdefault("sweeps", []).append(
            {"hamiltonian": s.hamiltonian, "from": t0, "to": t1, "samples": n, "track": list(s.track)}
        )
    return sweep.samples[-1].state


def _check(s: ast.AssertStmt, b: _Builder, rho: Operator, label: str, fact_tol: float, res: ScenarioResult) -> None:
    q = s.query
    desc = f"[{label}] {print_query(q)} = {print_value(s.expected)}"
    source = s.note or ""
    if isinstance(s.expected, ast.Coef):
        expected = real_value(s.expected, "expected value")
        tol = float(s.tol) if s.tol is not None else EXACT_TOL
        res.check_value(desc, _numeric(q, b, rho), expected, tol, source)
        return
    tol = float(s.tol) if s.tol is not None else fact_tol
    if isinstance(q, ast.CommutesQuery):
        measured = commutes(b.full(q.first, q.span), b.full(q.second, q.span))
        res.check_bool(desc, measured, s.expected.value, float(s.tol) if s.tol is not None else None, source)
        return
    if isinstance(q, ast.AgreeQuery):
        ok, _ = perspectives_agree(rho, b.m.subsystems[q.first], b.m.subsystems[q.second], b.full(q.target, q.span), tol)
        res.check_bool(desc, ok, s.expected.value, tol, source)
        return
    jd, t_axes, g_axes = _joint(q, b, rho)
    if q.func == "fact":
        measured = is_fact(jd, t_axes, tol).holds
    else:
        value = q.value if q.value else None
        measured = is_relative_fact(jd, t_axes, g_axes, tol, value).holds
    res.check_bool(desc, measured, s.expected.value, tol, source)


def _joint(q: ast.InfoQuery, b: _Builder, rho: Operator):
    target = b.variables(q.target, q.span)
    given = b.variables(q.given, q.span)
    jd = born_joint(rho, target + given)
    t_axes = tuple(range(len(target)))
    g_axes = tuple(range(len(target), len(target) + len(given)))
    return jd, t_axes, g_axes


def _numeric(q, b: _Builder, rho: Operator) -> float:
    if isinstance(q, ast.ProbQuery):
        return float(born_single(rho, b.full(q.observable, q.span)).table[q.outcome])
    jd, t_axes, g_axes = _joint(q, b, rho)
    if q.func == "H":
        return entropy(jd, t_axes)
    if q.func == "Imax":
        return i_max(jd, t_axes)
    if q.op is None:
        return information(jd, t_axes)
    if q.op == ":":
        return mutual_information(jd, t_axes, g_axes)
    if q.value:
        return conditional_information(jd, t_axes, g_axes, q.value)
    return relative_information(jd, t_axes, g_axes)

