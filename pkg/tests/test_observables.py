from __future__ import annotations

import itertools

import numpy as np
import pytest

from relinfo.errors import DimensionError, NonCommutingError, OperatorKindError
from relinfo.linops import embed
from relinfo.observables import (
    PAULI,
    commutes,
    lift,
    make_classical_subsystem,
    make_observable,
    observable_from_projectors,
    pauli,
    pointer,
    spin,
)
from relinfo.scenarios import wigner_setup


def test_z_has_two_outcomes():
    z = pauli("Z")
    assert z.n_outcomes == 2
    assert z.eigenvalues == (-1.0, 1.0)
    assert z.labels == ("-1", "1")


def test_lift_keeps_outcome_count():
    a0 = pointer("A", [3], 0)
    a = lift(a0, [3, 2], [0])
    assert a.n_outcomes == 3
    assert a.dim == 6
    assert np.allclose(a.op.entries, np.kron(a0.op.entries, np.eye(2)))


def test_wigner_m_outcomes():
    obs, _ = wigner_setup()
    m = obs["M"]
    assert m.n_outcomes == 2
    ranks = [round(np.trace(p.entries).real) for p in m.projectors]
    assert ranks == [30, 6]  # |psi1><psi1| on S,F tensored with the 6-level W identity


def test_commutation_basics():
    dims = [2, 2]
    assert commutes(pauli("Z1", "Z", dims, 0), pauli("Z2", "Z", dims, 1))
    assert not commutes(pauli("X", "X"), pauli("Z", "Z"))


def test_wigner_m_does_not_commute_with_friend_pointer():
    obs, _ = wigner_setup()
    assert not commutes(obs["M"], obs["F"])
    assert commutes(obs["M"], obs["W"])


def test_classical_subsystem_examples():
    dims = [2, 2, 2]
    cs = make_classical_subsystem("Zs", [pauli(f"Z{k}", "Z", dims, k) for k in range(3)])
    assert cs.names == ("Z0", "Z1", "Z2")
    with pytest.raises(NonCommutingError) as info:
        make_classical_subsystem("bad", [pauli("X", "X"), pauli("Z", "Z")])
    assert "X" in str(info.value) and "Z" in str(info.value)
    assert make_classical_subsystem("one", [pauli("A")]).names == ("A",)


def test_exhaustive_pauli_pairs_on_two_qubits():
    dims = [2, 2]
    names = ("X", "Y", "Z")
    for (w1, s1), (w2, s2) in itertools.combinations(itertools.product(names, (0, 1)), 2):
        a = pauli(f"{w1}{s1}", w1, dims, s1)
        b = pauli(f"{w2}{s2}", w2, dims, s2)
        if s1 == s2:
            with pytest.raises(NonCommutingError):
                make_classical_subsystem("cs", [a, b])
        else:
            make_classical_subsystem("cs", [a, b])


def test_member_projector_products_are_order_independent():
    dims = [2, 3, 2]
    members = [pauli("Z", "Z", dims, 0), pointer("P", dims, 1), pauli("X", "X", dims, 2)]
    cs = make_classical_subsystem("cs", members)
    for choice in itertools.product(*(m.projectors for m in cs.members)):
        mats = [p.entries for p in choice]
        products = [np.linalg.multi_dot(list(perm)) for perm in itertools.permutations(mats)]
        for p in products[1:]:
            assert np.max(np.abs(p - products[0])) <= 1e-9


def test_spin_reduces_to_paulis():
    assert np.allclose(spin("s", 0.0).op.entries, PAULI["Z"])
    assert np.allclose(spin("s", np.pi / 2).op.entries, PAULI["X"])


def test_pauli_needs_qubit():
    with pytest.raises(DimensionError):
        pauli("Z", "Z", [3], 0)


def test_make_observable_merges_degenerate_eigenvalues():
    obs = make_observable("D", np.diag([1.0, 1.0, 2.0]))
    assert obs.n_outcomes == 2
    assert obs.eigenvalues == (1.0, 2.0)


def test_projector_declaration_checks():
    with pytest.raises(OperatorKindError):
        observable_from_projectors("bad", [np.diag([1, 0, 0]), np.diag([0, 1, 0])])
    p = np.full((2, 2), 0.5)
    with pytest.raises(OperatorKindError):
        observable_from_projectors("bad", [np.diag([1, 0]), p])
    with pytest.raises(ValueError):
        observable_from_projectors("bad", [np.diag([1, 0]), np.diag([0, 1])], eigenvalues=[1, 1])


def test_projector_declaration_keeps_order_and_labels():
    obs = observable_from_projectors("C", [np.diag([0, 1]), np.diag([1, 0])], labels=("up", "down"))
    assert obs.eigenvalues == (0.0, 1.0)
    assert obs.labels == ("up", "down")
    assert np.allclose(obs.op.entries, np.diag([1, 0]))


def test_sector_projectors_are_complete():
    dims = [2, 3]
    sectors = [embed(np.diag(v), dims, [1]) for v in ([1, 0, 0], [0, 1, 1])]
    obs = observable_from_projectors("F", sectors)
    assert obs.n_outcomes == 2
    total = sum(p.entries for p in obs.projectors)
    assert np.max(np.abs(total - np.eye(6))) <= 1e-9
