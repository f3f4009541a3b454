"""Smoke tests for the python bindings."""

import math

import cowu


def test_birth_death_rows():
    z = cowu.TransitionMatrix.birth_death(3, 0.1)
    expected = [[0.9, 0.1, 0.0], [0.1, 0.8, 0.1], [0.0, 0.1, 0.9]]
    assert z.size == 3
    for i in range(3):
        for j in range(3):
            assert z.entry(i, j) == expected[i][j]


def test_stationary_hand_solved():
    z = cowu.TransitionMatrix.from_rows([[0.9, 0.1], [0.3, 0.7]])
    pi = cowu.stationary(z)
    assert math.isclose(pi.probs[0], 0.75, abs_tol=1e-12)
    assert math.isclose(pi.probs[1], 0.25, abs_tol=1e-12)


def test_wake_probability_default_scenario():
    z = cowu.TransitionMatrix.birth_death(100, 2e-4)
    pi = cowu.stationary(z)
    assert math.isclose(cowu.wake_probability(pi, cowu.RangeQuery(94, 98)), 0.05,
                        abs_tol=1e-12)


def test_success_distribution_chain_values():
    dist = cowu.success_distribution(1, cowu.CsmaParams(0.4, 2), 4)
    assert math.isclose(dist.probs[1], 0.784, abs_tol=1e-12)
    assert math.isclose(dist.probs[0], 0.216, abs_tol=1e-12)


def test_matrix_power_zero_is_identity():
    z = cowu.TransitionMatrix.birth_death(4, 0.2)
    z0 = cowu.matrix_power(z, 0)
    for i in range(4):
        for j in range(4):
            assert z0.entry(i, j) == (1.0 if i == j else 0.0)


def test_gamma_round_robin_frozen_process():
    cfg = cowu.ScenarioConfig(num_nodes=4, num_states=5, q=0.0,
                              range=cowu.RangeQuery(4, 5), p=0.5, tx_slots=2,
                              zeta_max=50)
    assert cowu.gamma_round_robin(cfg).gamma == 1.0


def test_optimizer_runs_on_small_scenario():
    cfg = cowu.ScenarioConfig(num_nodes=2, num_states=3, q=0.1,
                              range=cowu.RangeQuery(3, 3), p=0.5, tx_slots=1,
                              zeta_max=20)
    opt = cowu.optimize_zeta(cfg)
    assert 1 <= opt.zeta <= 20
    assert 0.0 <= opt.gamma <= 1.0


def test_campaign_determinism_and_energy():
    cfg = cowu.ScenarioConfig(num_nodes=4, num_states=5, q=0.05,
                              range=cowu.RangeQuery(4, 5), p=0.5, tx_slots=2,
                              zeta_max=50)
    energy = cowu.EnergyModel()
    a = cowu.run_campaign(cfg, energy, cowu.Scheme.cowu, 20, 300, 12345)
    b = cowu.run_campaign(cfg, energy, cowu.Scheme.cowu, 20, 300, 12345)
    assert a.gamma_hat == b.gamma_hat
    assert a.mean_energy_j == b.mean_energy_j

    rr = cowu.run_campaign(cfg, energy, cowu.Scheme.round_robin, 0, 50, 1)
    expected = 4 * 2 * 320e-6 * 55e-3
    assert math.isclose(rr.mean_energy_j, expected, rel_tol=1e-12)
    assert rr.energy_ci_halfwidth == 0.0


def test_round_result_fields():
    cfg = cowu.ScenarioConfig(num_nodes=1, num_states=2, q=0.1,
                              range=cowu.RangeQuery(1, 2), p=1.0, tx_slots=10,
                              zeta_max=50)
    r = cowu.simulate_cowu_round(cfg, cowu.EnergyModel(), 10, 42)
    assert r.wake_count == 1
    assert r.received_set == [0]
    assert r.completion_slot == 10
    assert math.isclose(r.total_energy_j, 176e-6, rel_tol=1e-9)


def test_validation_errors_surface_as_python_exceptions():
    try:
        cowu.ScenarioConfig(num_nodes=0)
    except ValueError as e:
        assert "N" in str(e)
    else:
        raise AssertionError("expected ValueError")
