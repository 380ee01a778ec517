from __future__ import annotations

import csv
import io

import numpy as np
import pytest

from relinfo.dynamics import (
    appb_sweep,
    full_rank_variant,
    measurement_hamiltonian,
    measurement_model,
    run_sweep,
    uniform_times,
)
from relinfo.errors import DimensionError
from relinfo.linops import Operator, expm_unitary, ket
from relinfo.observables import pointer

ALPHAS = (np.sqrt(0.25), np.sqrt(0.75))
H_A = 0.8112781244591328


@pytest.fixture(scope="module")
def ideal():
    return appb_sweep(samples=1000)


@pytest.fixture(scope="module")
def full_rank():
    return appb_sweep(samples=200, epsilon=1e-6)


def test_hamiltonian_is_hermitian():
    h = measurement_hamiltonian(pointer("A", [2], 0), 3, 0, [1, 2], 1.3).entries
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12


def test_single_branch_rotation():
    h = measurement_hamiltonian(pointer("A", [1], 0), 2, 0, [1])
    for t in (0.1, 0.7, np.pi / 2):
        out = expm_unitary(h, t).entries @ ket(0, 2)
        assert np.allclose(out, [np.cos(t), np.sin(t)], atol=1e-12)


def test_two_branch_state_interpolates():
    omega = 2.0
    model = measurement_model(ALPHAS, 3, omega)
    psi_i = model.psi0.amplitudes
    psi_f = sum(a * np.kron(ket(n, 2), ket(n + 1, 3)) for n, a in enumerate(ALPHAS))
    for t in np.linspace(0, model.duration, 9):
        got = expm_unitary(model.hamiltonian, float(t)).entries @ psi_i
        want = np.cos(omega * t) * psi_i + np.sin(omega * t) * psi_f
        assert np.max(np.abs(got - want)) <= 1e-9


def test_hamiltonian_argument_checks():
    a = pointer("A", [2], 0)
    with pytest.raises(DimensionError):
        measurement_hamiltonian(a, 2, 0, [0, 1])
    with pytest.raises(ValueError):
        measurement_hamiltonian(a, 3, 0, [1, 1])
    with pytest.raises(ValueError):
        measurement_hamiltonian(a, 3, 1, [1, 2])
    with pytest.raises(ValueError):
        measurement_hamiltonian(a, 3, 0, [1])


def test_target_entropy():
    assert measurement_model(ALPHAS).h_target == pytest.approx(H_A, abs=1e-15)


def test_mutual_curve(ideal):
    model, sweep = ideal
    t = np.asarray(sweep.times)
    assert len(t) == 1000
    assert np.max(np.abs(sweep.series("mutual") - np.sin(t) ** 2 * H_A)) <= 1e-9


def test_relative_is_information_plus_mutual(ideal):
    _, sweep = ideal
    rel = sweep.series("relative")
    assert np.max(np.abs(rel - sweep.series("information") - sweep.series("mutual"))) <= 1e-9
    assert rel[-1] == pytest.approx(1.0, abs=1e-9)


def test_system_probabilities_constant(ideal):
    from relinfo.distributions import born_single

    model, sweep = ideal
    for s in sweep.samples[::50]:
        assert np.allclose(born_single(s.state, model.system_obs).table, [0.25, 0.75], atol=1e-9)


def test_endpoints(ideal):
    _, sweep = ideal
    mutual = sweep.series("mutual")
    assert mutual[0] <= 1e-9
    assert abs(mutual[-1] - H_A) <= 1e-9


def test_lipschitz_bound(ideal):
    model, sweep = ideal
    dt = sweep.times[1] - sweep.times[0]
    jumps = np.abs(np.diff(sweep.series("mutual")))
    assert np.max(jumps) <= 2 * H_A * model.omega * dt


def test_null_support_at_start_then_maximal(ideal):
    _, sweep = ideal
    series = sweep.conditional_series((1,))
    assert series[0] is None
    assert all(v == pytest.approx(1.0, abs=1e-9) for v in series[1:])


def test_full_rank_defined_and_monotone(full_rank):
    _, sweep = full_rank
    for outcome in ((1,), (2,)):
        series = sweep.conditional_series(outcome)
        assert all(v is not None and np.isfinite(v) for v in series)
        assert series[0] < 1.0
        assert np.min(np.diff(series)) >= -1e-12
        assert series[-1] > 0.99


def test_zero_hamiltonian_keeps_reports_constant():
    model = measurement_model(ALPHAS)
    h = Operator(np.zeros((6, 6)), "hermitian")
    sweep = run_sweep(model.rho0, h, [(model.pointer_cs, model.system_obs)], uniform_times(1.0, 20))
    for name in ("mutual", "relative", "information", "entropy"):
        series = sweep.series(name)
        assert np.max(np.abs(series - series[0])) <= 1e-12


def test_full_rank_variant_bounds():
    rho = measurement_model(ALPHAS).rho0
    for eps in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            full_rank_variant(rho, eps)
    mixed = full_rank_variant(rho, 1e-6)
    assert np.min(np.linalg.eigvalsh(mixed.entries)) > 0


def test_sweep_time_checks():
    model = measurement_model(ALPHAS)
    tracked = [(model.pointer_cs, model.system_obs)]
    with pytest.raises(ValueError):
        uniform_times(1.0, 1)
    with pytest.raises(ValueError):
        run_sweep(model.rho0, model.hamiltonian, tracked, [0.1, 0.2])
    with pytest.raises(ValueError):
        run_sweep(model.rho0, model.hamiltonian, tracked, [0.0, 0.2, 0.1])


def test_csv_layout(ideal):
    _, sweep = ideal
    rows = list(csv.reader(io.StringIO(sweep.to_csv())))
    assert rows[0] == ["t", "omega_t", "I_mutual_bits", "I_relative_bits", "I_target_bits"]
    assert len(rows) == 1001
    last = [float(v) for v in rows[-1]]
    assert last[0] == pytest.approx(np.pi / 2, abs=1e-11)
    assert last[2] == pytest.approx(H_A, abs=1e-11)
