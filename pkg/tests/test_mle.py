import numpy as np
import pytest

from smolin import io
from smolin.analysis import fidelity, min_pt_eigenvalue, tangle
from smolin.errors import NotInformationallyCompleteError, NumericalError, ValidationError
from smolin.linalg import hermitian_eigenvalues, ket_to_dm
from smolin.mle import (
    ReconstructionConfig,
    check_informationally_complete,
    independent_mle_oracle,
    log_likelihood,
    mle_reconstruct,
)
from smolin.states import noisy_smolin, werner_state
from smolin.tomography import (
    CountTable,
    basis_settings,
    expected_counts,
    outcome_strings,
    overcomplete_settings,
    simulate_counts,
)

from conftest import random_density_matrix


def _random_tables(rng, n=2):
    settings = basis_settings(n) if rng.random() < 0.5 else overcomplete_settings(n)
    rho = random_density_matrix(2**n, rng, rank=int(rng.integers(1, 2**n + 1)))
    mean = float(rng.choice([20.0, 300.0, 5000.0]))
    tables = simulate_counts(rho, settings, mean, rng)
    if rng.random() < 0.3:
        # adversarial: wipe a few outcomes
        t = tables[int(rng.integers(len(tables)))]
        o = outcome_strings(t.setting)[0]
        t.counts[o] = 0
    return tables


def test_log_likelihood_never_decreases():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        tables = _random_tables(rng)
        res = mle_reconstruct(tables, full_output=True)
        ll = np.array(res.log_likelihood)
        assert np.all(np.diff(ll) >= -1e-13)
        assert ll[-1] == pytest.approx(log_likelihood(tables, res.rho), abs=1e-9)
        ev = hermitian_eigenvalues(res.rho)
        assert ev[0] >= -1e-10
        assert abs(np.trace(res.rho) - 1) < 1e-10


def test_reconstruction_contracts_four_qubits():
    rng = np.random.default_rng(3)
    for _ in range(3):
        tables = _random_tables(rng, n=4)
        res = mle_reconstruct(tables, full_output=True)
        assert np.all(np.diff(res.log_likelihood) >= -1e-13)
        assert hermitian_eigenvalues(res.rho)[0] >= -1e-10
        assert abs(np.trace(res.rho) - 1) < 1e-10


def test_maximally_mixed_round_trip():
    tables = simulate_counts(np.eye(16) / 16, overcomplete_settings(4), 1e4, np.random.default_rng(1))
    assert len(tables) == 1296
    assert fidelity(mle_reconstruct(tables), np.eye(16) / 16) >= 0.999


def test_expected_counts_fixed_point():
    target = noisy_smolin(0.49)
    tables = expected_counts(target, basis_settings(4), 38_000.0)
    res = mle_reconstruct(tables, full_output=True)
    assert fidelity(res.rho, target) >= 0.9999
    assert res.iterations <= 500


def test_overcomplete_and_minimal_sets_agree():
    rng = np.random.default_rng(9)
    for truth in (werner_state(0.8, 3), random_density_matrix(4, rng), random_density_matrix(4, rng, 2)):
        a = mle_reconstruct(simulate_counts(truth, overcomplete_settings(2), 1e4, rng))
        b = mle_reconstruct(simulate_counts(truth, basis_settings(2), 1e4, rng))
        assert fidelity(a, b) >= 0.999


def test_overcomplete_and_minimal_sets_agree_four_qubits():
    # 81 settings at 1e4 leave ~0.5% infidelity from shot noise alone
    rng = np.random.default_rng(10)
    truth = noisy_smolin(0.49)
    a = mle_reconstruct(simulate_counts(truth, overcomplete_settings(4), 1e4, rng))
    b = mle_reconstruct(simulate_counts(truth, basis_settings(4), 1e4, rng))
    assert fidelity(a, b) >= 0.99
    assert fidelity(a, truth) >= 0.999


def test_non_informationally_complete_rejected():
    tables = expected_counts(noisy_smolin(0.49), ["HHHH", "PPPP", "RRRR"], 1000.0)
    with pytest.raises(NotInformationallyCompleteError):
        mle_reconstruct(tables)
    with pytest.raises(NotInformationallyCompleteError):
        check_informationally_complete(expected_counts(werner_state(0.5), ["HH"], 100.0))
    assert isinstance(NotInformationallyCompleteError("x"), NumericalError)


def test_zero_counts_and_bad_input_rejected():
    tables = [CountTable(s, {o: 0 for o in outcome_strings(s)}) for s in basis_settings(2)]
    with pytest.raises(NumericalError):
        mle_reconstruct(tables)
    with pytest.raises(ValidationError):
        mle_reconstruct([])
    incomplete = expected_counts(werner_state(0.5), basis_settings(2), 100.0)
    del incomplete[0].counts["HH"]
    with pytest.raises(ValidationError):
        mle_reconstruct(incomplete)
    with pytest.raises(ValidationError):
        ReconstructionConfig(max_iterations=0)


def test_iteration_cap_respected():
    tables = simulate_counts(werner_state(0.9), basis_settings(2), 1e4, np.random.default_rng(0))
    res = mle_reconstruct(tables, ReconstructionConfig(max_iterations=3, stop_delta=1e-30), full_output=True)
    assert res.iterations == 3 and not res.converged


def test_pure_state_round_trip_with_oracle():
    rng = np.random.default_rng(12)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    truth = ket_to_dm(psi / np.linalg.norm(psi))
    tables = simulate_counts(truth, overcomplete_settings(2), 1e6, rng)
    assert fidelity(independent_mle_oracle(tables), truth) >= 0.999
    assert fidelity(mle_reconstruct(tables), truth) >= 0.999


def test_oracle_rejects_large_and_degenerate_input():
    with pytest.raises(ValidationError):
        independent_mle_oracle(expected_counts(np.eye(16) / 16, basis_settings(4), 100.0))
    with pytest.raises(NotInformationallyCompleteError):
        independent_mle_oracle(expected_counts(werner_state(0.5), ["HH"], 100.0))


def test_table3_reconstruction_and_oracle():
    tables = io.bundled_counts("table3")
    rho = mle_reconstruct(tables)
    assert abs(tangle(rho) - 0.00105) <= 0.00046
    assert abs(min_pt_eigenvalue(rho)[0] - (-0.0160)) <= 0.0035
    oracle = independent_mle_oracle(tables)
    assert fidelity(rho, oracle) >= 0.9999
    assert log_likelihood(tables, rho) >= log_likelihood(tables, oracle) - 1e-8
