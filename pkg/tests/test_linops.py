from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from relinfo.dynamics import measurement_hamiltonian
from relinfo.errors import DimensionError, OperatorKindError
from relinfo.linops import (
    Operator,
    StateVector,
    eig_hermitian,
    embed,
    evolve,
    expm_unitary,
    identity,
    ket,
    partial_trace,
    tensor,
    tensor_all,
)
from relinfo.observables import PAULI, pointer

from conftest import random_density, random_hermitian, random_ket

Z = Operator(PAULI["Z"], "hermitian")
X = Operator(PAULI["X"], "hermitian")


def test_operator_is_read_only():
    op = Operator(np.eye(2), "hermitian")
    with pytest.raises(ValueError):
        op.entries[0, 0] = 5


@pytest.mark.parametrize(
    "matrix, kind",
    [
        ([[0, 1], [0, 0]], "hermitian"),
        ([[1, 1], [0, 1]], "unitary"),
        ([[0.5, 0], [0, 0.4]], "density"),
        ([[2, 0], [0, -1]], "density"),
        ([[1, 0], [0, 0.5]], "projector"),
    ],
)
def test_kind_violations_are_rejected(matrix, kind):
    with pytest.raises(OperatorKindError):
        Operator(matrix, kind)


def test_non_square_rejected():
    with pytest.raises(DimensionError):
        Operator(np.zeros((2, 3)))


def test_state_vector_needs_unit_norm():
    with pytest.raises(OperatorKindError):
        StateVector(np.array([1.0, 1.0]))
    assert StateVector(np.array([0.6, 0.8])).density().kind == "density"


def test_tensor_identities():
    out = tensor(identity(2), identity(2))
    assert np.allclose(out.entries, np.eye(4))
    v = np.kron(ket(0, 2), ket(1, 2))
    zi = tensor(Z, identity(2))
    assert np.allclose(zi.entries @ v, v)


def test_tensor_reproduces_product_projector():
    plus = (ket(0, 2) + ket(1, 2)) / np.sqrt(2)
    p_plus = StateVector(plus).projector()
    p_ready = StateVector(ket(0, 2)).projector()
    psi0 = np.kron(np.kron(plus, ket(0, 2)), ket(0, 2))
    out = tensor_all([p_plus, p_ready, p_ready])
    assert out.kind == "projector"
    assert np.allclose(out.entries, np.outer(psi0, psi0.conj()), atol=1e-12)


def test_tensor_associative(rng):
    a, b, c = (Operator(random_hermitian(rng, d), "hermitian") for d in (2, 3, 2))
    left = tensor(tensor(a, b), c).entries
    right = tensor(a, tensor(b, c)).entries
    assert np.max(np.abs(left - right)) <= 1e-12


def test_embed_matches_kron_for_contiguous_sites(rng):
    m = random_hermitian(rng, 3)
    assert np.allclose(embed(m, [2, 3, 2], [1]), np.kron(np.kron(np.eye(2), m), np.eye(2)))


def test_embed_out_of_order_sites(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
    # operator given on (site 2, site 0) must equal b on site 2 and a on site 0
    got = embed(np.kron(b, a), [2, 2, 3], [2, 0])
    want = np.kron(np.kron(a, np.eye(2)), b)
    assert np.allclose(got, want)


def test_embed_rejects_bad_sites():
    with pytest.raises(DimensionError):
        embed(np.eye(2), [2, 2], [0, 0])
    with pytest.raises(DimensionError):
        embed(np.eye(3), [2, 2], [0])


def test_partial_trace_product_state(rng):
    ra, rb = random_density(rng, 2), random_density(rng, 3)
    rho = Operator(np.kron(ra, rb), "density")
    assert np.allclose(partial_trace(rho, [2, 3], [0]).entries, ra)
    assert np.allclose(partial_trace(rho, [2, 3], [1]).entries, rb)


def test_partial_trace_bell_is_maximally_mixed():
    phi = (np.kron(ket(0, 2), ket(0, 2)) + np.kron(ket(1, 2), ket(1, 2))) / np.sqrt(2)
    rho = StateVector(phi).density()
    # oracle: reduced matrix by explicit index sums
    full = np.outer(phi, phi.conj()).reshape(2, 2, 2, 2)
    oracle = np.array([[sum(full[i, k, j, k] for k in range(2)) for j in range(2)] for i in range(2)])
    got = partial_trace(rho, [2, 2], [0]).entries
    assert np.allclose(got, oracle)
    assert np.allclose(got, np.eye(2) / 2)


def test_partial_trace_preserves_trace(rng):
    for _ in range(20):
        rho = Operator(random_density(rng, 12), "density")
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            red = partial_trace(rho, [2, 3, 2], keep)
            assert abs(np.trace(red.entries) - 1) <= 1e-12
            assert red.kind == "density"


def test_eig_of_z_and_x():
    spec = eig_hermitian(Z)
    assert [v for v, _ in spec] == [-1.0, 1.0]
    assert np.allclose(spec[0][1].entries, np.diag([0, 1]))
    assert np.allclose(spec[1][1].entries, np.diag([1, 0]))
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    spec = eig_hermitian(X)
    assert np.allclose(spec[0][1].entries, np.outer(minus, minus))
    assert np.allclose(spec[1][1].entries, np.outer(plus, plus))


def test_eig_merges_degeneracies():
    h = measurement_hamiltonian(pointer("A", [2], 0), 3, 0, [1, 2])
    spec = eig_hermitian(h)
    ranks = [int(round(np.trace(p.entries).real)) for _, p in spec]
    assert sum(ranks) == 6
    assert len(spec) == 3
    assert ranks == [2, 2, 2]


def test_eig_completeness_orthogonality_reconstruction(rng):
    for d in (1, 2, 3, 5, 8):
        for _ in range(10):
            h = random_hermitian(rng, d)
            spec = eig_hermitian(Operator(h, "hermitian"))
            projs = [p.entries for _, p in spec]
            assert np.max(np.abs(sum(projs) - np.eye(d))) <= 1e-9
            for j in range(len(projs)):
                for k in range(j + 1, len(projs)):
                    assert np.max(np.abs(projs[j] @ projs[k])) <= 1e-9
            rebuilt = sum(v * p for v, p in zip((v for v, _ in spec), projs))
            assert np.max(np.abs(rebuilt - h)) <= 1e-8


def test_eig_rejects_general_operator():
    with pytest.raises(OperatorKindError):
        eig_hermitian(Operator([[0, 1], [0, 0]]))


def test_expm_zero_time_is_identity(rng):
    h = Operator(random_hermitian(rng, 4), "hermitian")
    assert np.allclose(expm_unitary(h, 0.0).entries, np.eye(4))


def test_expm_matches_scipy(rng):
    for _ in range(25):
        d = int(rng.integers(1, 7))
        h = random_hermitian(rng, d)
        t = float(rng.normal())
        got = expm_unitary(Operator(h, "hermitian"), t).entries
        assert np.max(np.abs(got - expm(-1j * h * t))) <= 1e-9


def test_expm_group_property(rng):
    for _ in range(50):
        h = Operator(random_hermitian(rng, 4), "hermitian")
        t = float(rng.uniform(-3, 3))
        prod = expm_unitary(h, t).entries @ expm_unitary(h, -t).entries
        assert np.max(np.abs(prod - np.eye(4))) <= 1e-9


def test_expm_preserves_norm(rng):
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 6))
        h = Operator(random_hermitian(rng, d), "hermitian")
        psi = random_ket(rng, d)
        t = float(rng.uniform(-10, 10))
        worst = max(worst, abs(np.linalg.norm(expm_unitary(h, t).entries @ psi) - 1))
    assert worst <= 1e-9


def test_measurement_coupling_rotation_entrywise():
    omega = 0.7
    a = pointer("A", [2], 0)
    h = measurement_hamiltonian(a, 3, 0, [1, 2], omega)
    for t in np.linspace(0, np.pi / (2 * omega), 13):
        u = expm_unitary(h, float(t)).entries
        for n in range(2):
            start = np.kron(ket(n, 2), ket(0, 3))
            want = np.cos(omega * t) * start + np.sin(omega * t) * np.kron(ket(n, 2), ket(n + 1, 3))
            assert np.max(np.abs(u @ start - want)) <= 1e-9


def test_evolve_keeps_density(rng):
    rho = Operator(random_density(rng, 3), "density")
    u = expm_unitary(Operator(random_hermitian(rng, 3), "hermitian"), 1.3)
    out = evolve(rho, u)
    assert out.kind == "density"
    assert np.allclose(out.entries, u.entries @ rho.entries @ u.entries.conj().T)
