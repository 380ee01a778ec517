"""Seeded randomized checks of the general properties of the information measures.

Each property draws its own stream of fixtures from ``(seed, property, trial)``,
so any single trial can be regenerated.  A fixture is also fully serializable:
``fixture_to_json`` stores the numbers themselves, and :func:`replay` re-checks
a stored fixture without touching the generator.

Fixtures come in two flavours:

* ``table``: a joint distribution ``p(a, b)`` with 2 to 4 outcomes per
  variable, drawn from a mixture of generic (Dirichlet), sparse, functional,
  copy, product and point-mass shapes so that every property's boundary cases
  are exercised;
* ``quantum``: a state on ``C^dA (x) C^dB`` (pure: normalised complex
  Gaussian; mixed: trace-normalised Wishart ``G G^dagger``), a random local
  observable ``A`` on the first factor, ``B`` on the second, and a third
  observable ``C = C0 (x) C1`` with ``C0`` diagonal in ``A``'s eigenbasis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .distributions import JointDistribution, born_joint, born_single, from_table, marginal
from .facts import aggregate_matches_outcomes
from .infomeasures import (
    i_max,
    information,
    mutual_information,
    per_outcome_information,
    quantum_mutual_information,
    relative_information,
)
from .linops import Operator
from .observables import Observable, lift, make_observable

TOL = 1e-9
SATURATION_TOL = 1e-6
ASYMMETRY_GAP = 0.1
DEFAULT_TRIALS = 1000
DEFAULT_SEED = 20240601

TABLE_MODES = ("dirichlet", "sparse", "functional", "copy", "product", "fact")


# fixture generation -------------------------------------------------------------


def _rng(seed: int, prop_index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & (2**64 - 1), prop_index, trial])


def random_table(rng: np.random.Generator, mode: str | None = None) -> tuple[str, np.ndarray]:
    mode = mode or TABLE_MODES[rng.integers(len(TABLE_MODES))]
    na, nb = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    if mode == "dirichlet":
        t = rng.dirichlet(np.ones(na * nb)).reshape(na, nb)
    elif mode == "sparse":
        t = rng.dirichlet(np.ones(na * nb)).reshape(na, nb)
        mask = rng.random((na, nb)) < 0.5
        mask.flat[rng.integers(na * nb)] = False
        t[mask] = 0.0
    elif mode == "functional":
        # one variable is a function of the other
        if rng.random() < 0.5:
            pb = rng.dirichlet(np.ones(nb))
            f = rng.integers(na, size=nb)
            t = np.zeros((na, nb))
            t[f, np.arange(nb)] = pb
        else:
            pa = rng.dirichlet(np.ones(na))
            g = rng.integers(nb, size=na)
            t = np.zeros((na, nb))
            t[np.arange(na), g] = pa
    elif mode == "copy":
        nb = na
        p = rng.dirichlet(np.ones(na)) if rng.random() < 0.5 else np.full(na, 1.0 / na)
        perm = rng.permutation(na)
        t = np.zeros((na, nb))
        t[np.arange(na), perm] = p
    elif mode == "product":
        t = np.outer(rng.dirichlet(np.ones(na)), rng.dirichlet(np.ones(nb)))
    elif mode == "fact":
        t = np.zeros((na, nb))
        t[rng.integers(na)] = rng.dirichlet(np.ones(nb))
    else:
        raise ValueError(f"unknown table mode {mode!r}")
    return mode, t / t.sum()


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_mixed_state(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    k = rank or int(rng.integers(1, d + 1))
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_local_observable(rng: np.random.Generator, d: int, u: np.ndarray | None = None) -> np.ndarray:
    """Hermitian matrix with a random eigenbasis (or ``u``) and small integer eigenvalues, degeneracies allowed."""
    u = random_unitary(rng, d) if u is None else u
    evs = rng.integers(0, d, size=d).astype(float)
    if len(set(evs)) == 1:
        evs[0] += 1.0
    m = (u * evs) @ u.conj().T
    return (m + m.conj().T) / 2


def random_quantum(rng: np.random.Generator, pure: bool | None = None) -> dict:
    da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    d = da * db
    pure = bool(rng.random() < 0.5) if pure is None else pure
    if pure:
        psi = random_pure_state(rng, d)
        rho = np.outer(psi, psi.conj())
    else:
        rho = random_mixed_state(rng, d)
    ua = random_unitary(rng, da)
    return {
        "kind": "quantum",
        "dims": [da, db],
        "pure": pure,
        "rho": rho,
        "A": random_local_observable(rng, da, ua),
        "B": random_local_observable(rng, db),
        "C0": random_local_observable(rng, da, ua),
        "C1": random_local_observable(rng, db),
    }


# fixture (de)serialization -----------------------------------------------------------


def _encode(v):
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            return {"re": v.real.tolist(), "im": v.imag.tolist()}
        return v.tolist()
    return v


def _decode(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return np.asarray(v["re"], dtype=float) + 1j * np.asarray(v["im"], dtype=float)
    return v


def fixture_to_json(fixture: dict) -> dict:
    return {k: _encode(v) for k, v in fixture.items()}


def fixture_from_json(data: dict) -> dict:
    out = {k: _decode(v) for k, v in data.items()}
    if out.get("kind") == "table":
        out["table"] = np.asarray(out["table"], dtype=float)
    return out


# quantum fixture helpers ------------------------------------------------------------------


@dataclass(frozen=True)
class QuantumSetup:
    rho: Operator
    dims: list[int]
    a: Observable
    b: Observable
    c: Observable


def quantum_setup(fx: dict) -> QuantumSetup:
    dims = list(fx["dims"])
    rho = Operator(np.asarray(fx["rho"]), "density")
    a = lift(make_observable("A", Operator(np.asarray(fx["A"]), "hermitian")), dims, [0])
    b = lift(make_observable("B", Operator(np.asarray(fx["B"]), "hermitian")), dims, [1])
    c_local = np.kron(np.asarray(fx["C0"]), np.asarray(fx["C1"]))
    c = make_observable("C", Operator((c_local + c_local.conj().T) / 2, "hermitian"))
    return QuantumSetup(rho, dims, a, b, c)


def _table_jd(fx: dict) -> JointDistribution:
    return from_table(("A", "B"), np.asarray(fx["table"], dtype=float))


# properties -----------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialOutcome:
    passed: bool
    values: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Property:
    """A per-trial check plus, optionally, flags that must each occur in at least one trial."""

    name: str
    description: str
    kind: str
    check: Callable[[dict], TrialOutcome]
    required_flags: tuple[str, ...] = ()
    table_modes: tuple[str, ...] | None = None
    pure: bool | None = None

    def generate(self, rng: np.random.Generator) -> dict:
        if self.kind == "table":
            modes = self.table_modes or TABLE_MODES
            mode, t = random_table(rng, modes[rng.integers(len(modes))])
            return {"kind": "table", "mode": mode, "table": t}
        return random_quantum(rng, self.pure)


def _key_classical(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    err = abs(relative_information(jd, 0, 1) - information(jd, 0) - mutual_information(jd, 0, 1))
    return TrialOutcome(err <= TOL, {"error": err})


def _key_quantum(fx: dict) -> TrialOutcome:
    q = quantum_setup(fx)
    jd = born_joint(q.rho, [q.a, q.b])
    err = abs(relative_information(jd, 0, 1) - information(jd, 0) - mutual_information(jd, 0, 1))
    return TrialOutcome(err <= TOL, {"error": err})


def _symmetry(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    err = abs(mutual_information(jd, 0, 1) - mutual_information(jd, 1, 0))
    return TrialOutcome(err <= TOL, {"error": err})


def _asymmetry(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    gap = relative_information(jd, 0, 1) - relative_information(jd, 1, 0)
    # the gap is fixed by the marginals: I_{A|B} - I_{B|A} = I_A - I_B
    err = abs(gap - (information(jd, 0) - information(jd, 1)))
    flags = ("witness",) if abs(gap) > ASYMMETRY_GAP else ()
    return TrialOutcome(err <= TOL, {"gap": gap, "error": err}, flags)


def _relative_ge(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    rel, inf, top = relative_information(jd, 0, 1), information(jd, 0), i_max(jd, 0)
    flags = ("saturated",) if rel >= top - TOL else ()
    return TrialOutcome(rel >= inf - TOL, {"relative": rel, "information": inf}, flags)


def _mutual_bound(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    mi = mutual_information(jd, 0, 1)
    bound = min(i_max(jd, 0), i_max(jd, 1))
    ok = mi <= bound + TOL
    flags: tuple[str, ...] = ()
    if abs(mi - bound) <= SATURATION_TOL:
        flags = ("saturated",)
        near_a = i_max(jd, 0) - relative_information(jd, 0, 1) <= SATURATION_TOL
        near_b = i_max(jd, 1) - relative_information(jd, 1, 0) <= SATURATION_TOL
        ok = ok and (near_a or near_b)
    return TrialOutcome(ok, {"mutual": mi, "bound": bound}, flags)


def _facts_kill_mutual(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    mi = mutual_information(jd, 0, 1)
    fact_a = i_max(jd, 0) - information(jd, 0) <= TOL
    fact_b = i_max(jd, 1) - information(jd, 1) <= TOL
    if not (fact_a or fact_b):
        return TrialOutcome(True, {"mutual": mi})
    return TrialOutcome(mi <= TOL, {"mutual": mi}, ("fact",))


def _per_outcome(fx: dict) -> TrialOutcome:
    jd = _table_jd(fx)
    top = i_max(jd, 0)
    aggregate = top - relative_information(jd, 0, 1) <= TOL
    every = all(top - v <= TOL for v in per_outcome_information(jd, 0, 1).values())
    consistent = aggregate_matches_outcomes(jd, 0, 1, TOL)
    flag = "relative_fact" if aggregate else "not_relative_fact"
    return TrialOutcome(aggregate == every and consistent, {"aggregate": float(aggregate), "every": float(every)}, (flag,))


def _self_relative(fx: dict) -> TrialOutcome:
    q = quantum_setup(fx)
    jd = born_joint(q.rho, [q.a, q.a])
    slack = i_max(jd, 0) - relative_information(jd, 0, 1)
    return TrialOutcome(abs(slack) <= TOL, {"slack": slack})


def _co_measurement(fx: dict) -> TrialOutcome:
    q = quantum_setup(fx)
    alone = information(born_single(q.rho, q.a), 0)
    with_b = information(marginal(born_joint(q.rho, [q.a, q.b]), 0), 0)
    with_c = information(marginal(born_joint(q.rho, [q.c, q.a]), 1), 0)
    t_ab = born_joint(q.rho, [q.a, q.b]).table
    t_ba = born_joint(q.rho, [q.b, q.a]).table
    order = float(np.max(np.abs(t_ab - t_ba.T)))
    err = max(abs(with_b - alone), abs(with_c - alone))
    return TrialOutcome(err <= TOL and order <= TOL, {"error": err, "order_error": order})


def _classical_le_quantum(fx: dict) -> TrialOutcome:
    q = quantum_setup(fx)
    mi = mutual_information(born_joint(q.rho, [q.a, q.b]), 0, 1)
    qmi = quantum_mutual_information(q.rho, q.dims, [0])
    return TrialOutcome(mi <= qmi + TOL, {"mutual": mi, "quantum": qmi})


def _pure_half(fx: dict) -> TrialOutcome:
    q = quantum_setup(fx)
    mi = mutual_information(born_joint(q.rho, [q.a, q.b]), 0, 1)
    qmi = quantum_mutual_information(q.rho, q.dims, [0])
    return TrialOutcome(mi <= qmi / 2 + TOL, {"mutual": mi, "quantum": qmi})


PROPERTIES: tuple[Property, ...] = (
    Property("key_relation_classical", "I_{A|B} = I_A + I_{A:B} on random tables", "table", _key_classical),
    Property("key_relation_quantum", "I_{A|B} = I_A + I_{A:B} on Born tables of random states", "quantum", _key_quantum),
    Property("symmetry", "I_{A:B} = I_{B:A}", "table", _symmetry),
    Property("asymmetry_witness", "I_{A|B} != I_{B|A} for some fixture", "table", _asymmetry, ("witness",)),
    Property("relative_ge_information", "I_{A|B} >= I_A, with equality to I_A^max reachable", "table", _relative_ge, ("saturated",)),
    Property("mutual_bound", "I_{A:B} <= min(log N_A, log N_B); saturation forces a relative fact", "table",
             _mutual_bound, ("saturated",)),
    Property("facts_kill_mutual", "a fact has zero mutual information with anything", "table", _facts_kill_mutual, ("fact",)),
    Property("per_outcome_aggregate", "I_{A|B} maximal iff every supported I_{A|b} is maximal", "table", _per_outcome,
             ("relative_fact", "not_relative_fact")),
    Property("self_relative", "I_{A|A} = I_A^max", "quantum", _self_relative),
    Property("co_measurement", "I_A does not depend on what it is measured with", "quantum", _co_measurement),
    Property("classical_le_quantum", "I_{A:B} <= quantum mutual information", "quantum", _classical_le_quantum),
    Property("pure_half_bound", "I_{A:B} <= half the quantum mutual information on pure states", "quantum", _pure_half,
             pure=True),
)

PROPERTY_INDEX = {p.name: k for k, p in enumerate(PROPERTIES)}


def asymmetry_fixture() -> dict:
    """A two-outcome ``A`` uniformly distributed and a four-outcome ``B`` that copies it."""
    t = np.zeros((2, 4))
    t[0, 0] = t[1, 1] = 0.5
    return {"kind": "table", "mode": "copy", "table": t}


# running -----------------------------------------------------------------------------------


@dataclass
class PropertyResult:
    name: str
    description: str
    trials: int
    passed_trials: int
    flag_counts: dict[str, int]
    required_flags: tuple[str, ...]
    failures: list[dict] = field(default_factory=list)
    max_abs: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.passed_trials == self.trials and all(self.flag_counts.get(f, 0) > 0 for f in self.required_flags)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "trials": self.trials,
            "passed_trials": self.passed_trials,
            "flag_counts": dict(sorted(self.flag_counts.items())),
            "required_flags": list(self.required_flags),
            "max_abs": {k: float(v) for k, v in sorted(self.max_abs.items())},
            "failures": self.failures,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        flags = ", ".join(f"{k}={self.flag_counts.get(k, 0)}" for k in self.required_flags)
        extra = f" ({flags})" if flags else ""
        return f"{status} {self.name}: {self.passed_trials}/{self.trials}{extra}"


@dataclass
class PropertyReport:
    seed: int
    trials: int
    results: list[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "trials": self.trials, "passed": self.passed,
                "properties": [r.to_dict() for r in self.results]}

    def text(self) -> str:
        return "\n".join(r.line() for r in self.results) + "\n"


def trial_fixture(prop: Property, seed: int, trial: int) -> dict:
    fx = prop.generate(_rng(seed, PROPERTY_INDEX[prop.name], trial))
    fx.update({"property": prop.name, "seed": int(seed), "trial": int(trial)})
    return fx


def run_property(prop: Property, seed: int, trials: int = DEFAULT_TRIALS, keep_failures: int = 3) -> PropertyResult:
    res = PropertyResult(prop.name, prop.description, 0, 0, {}, prop.required_flags)
    fixtures = (trial_fixture(prop, seed, t) for t in range(trials))
    if prop.name == "asymmetry_witness":
        extra = asymmetry_fixture()
        extra.update({"property": prop.name, "seed": int(seed), "trial": -1})
        fixtures = _chain([extra], fixtures)
    for fx in fixtures:
        out = prop.check(fx)
        res.trials += 1
        res.passed_trials += int(out.passed)
        for f in out.flags:
            res.flag_counts[f] = res.flag_counts.get(f, 0) + 1
        for k, v in out.values.items():
            res.max_abs[k] = max(res.max_abs.get(k, 0.0), abs(float(v)))
        if not out.passed and len(res.failures) < keep_failures:
            res.failures.append(fixture_to_json(fx))
    return res


def _chain(first, rest):
    yield from first
    yield from rest


def run_properties(seed: int = DEFAULT_SEED, trials: int = DEFAULT_TRIALS, names: list[str] | None = None) -> PropertyReport:
    chosen = [p for p in PROPERTIES if names is None or p.name in names]
    return PropertyReport(int(seed), trials, [run_property(p, seed, trials) for p in chosen])


def replay(data: dict) -> TrialOutcome:
    """Re-check a serialized fixture (as produced in ``PropertyResult.failures``)."""
    name = data["property"]
    if name not in PROPERTY_INDEX:
        raise KeyError(f"unknown property {name!r}")
    return PROPERTIES[PROPERTY_INDEX[name]].check(fixture_from_json(data))


def dumps_fixture(fx: dict) -> str:
    return json.dumps(fixture_to_json(fx), sort_keys=True)


def outcome_to_dict(out: TrialOutcome) -> dict[str, Any]:
    return {"passed": out.passed, "values": {k: float(v) for k, v in sorted(out.values.items())}, "flags": list(out.flags)}
