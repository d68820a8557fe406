"""Smoke tests for the python bindings; the heavy verification lives in the
C++ suites."""

import math
import os

import numpy as np
import pytest

import quadtherm as qt


def test_version_string():
    assert qt.__version__.count(".") == 2


def test_single_node_analytic_value():
    # C=0.5, R=2, Q=1 W, t=1 s from a cold start: 2 (1 - e^{-1}).
    value = qt.single_node_analytic(0.5, 2.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    assert value == pytest.approx(2.0 * (1.0 - math.exp(-1.0)), abs=1e-12)


def test_placeholder_network_shape():
    net = qt.placeholder_network()
    assert net.node_count == 14
    assert net.motor_count == 12
    assert net.environment_index == 13
    assert "ThermalNetwork" in repr(net)


def test_discretize_rows_sum_to_one():
    net = qt.placeholder_network()
    A, B = qt.discretize(net, 0.02)
    assert A.shape == (14, 14)
    assert np.allclose(A.sum(axis=1), 1.0, atol=1e-10)
    assert np.all(A >= -1e-12)
    assert np.allclose(B[13], 0.0)


def test_simulate_fixed_point_and_steady_state():
    net = qt.placeholder_network()
    zero = np.zeros(14)
    init = np.full(14, net.ambient)
    trace = qt.simulate(net, zero, init, horizon=1.0, h=0.02)
    assert np.allclose(trace["temperatures"], net.ambient, atol=1e-10)

    watts = np.zeros(14)
    watts[:12] = 5.0
    ss = qt.steady_state(net, watts)
    assert ss.min() >= net.ambient - 1e-12
    assert ss[13] == pytest.approx(net.ambient)


def test_torque_rms_and_joule_heat():
    samples = np.array([[3.0], [4.0], [0.0], [0.0]])
    assert qt.torque_rms(samples)[0] == pytest.approx(2.5)
    heat = qt.joule_heat(np.array([10.0]), np.array([0.12]))
    assert heat[0] == pytest.approx(12.0)


def test_cbf_margin_and_reward():
    cfg = qt.RewardConfig()
    margin = qt.cbf_margin(np.array([1.0]), np.array([65.0]), cfg)
    assert margin[0] == pytest.approx(-2.75)

    snap = qt.RobotSnapshot()
    snap.cmd_lin_vel = np.array([0.5, 0.0, 0.0])
    snap.lin_vel = np.array([0.5, 0.0, 0.0])
    snap.base_height = cfg.h_target
    snap.temperatures = np.full(12, 30.0)
    total, terms = qt.total_reward(snap, cfg)
    assert total == pytest.approx(1.8, abs=1e-12)
    assert terms["motor_temperature"] == 0.0


def test_max_feasible_gamma_single_motor():
    net = qt.network_from_json(
        """{
            "schema_version": 1, "ambient": 35.0,
            "nodes": [
                {"id": 0, "kind": "motor", "capacitance": 0.5,
                 "winding_resistance": 0.0, "aux_heat": 0.0},
                {"id": 1, "kind": "environment", "capacitance": 0.0,
                 "winding_resistance": 0.0, "aux_heat": 0.0}
            ],
            "edges": [{"i": 0, "j": 1, "resistance": 2.0}]
        }"""
    )
    assert qt.max_feasible_gamma(net) == pytest.approx(6.0, abs=1e-9)


def test_sample_episode_deterministic():
    a = qt.sample_episode(7)
    b = qt.sample_episode(7)
    assert a.keys() == b.keys()
    for key in a:
        assert np.array_equal(a[key], b[key]), key
    assert 0.0 <= a["payload_mass"] <= 4.0
    assert len(a["init_motor_temp"]) == 12


def test_endurance_demo_scenario():
    data_dir = os.environ.get("QUADTHERM_DATA_DIR")
    if data_dir is None:
        pytest.skip("QUADTHERM_DATA_DIR not set")
    scenario = qt.load_scenario(os.path.join(data_dir, "demo_scenario.json"))
    result = qt.run_endurance(scenario, controller="throttled", seed=0)
    assert result["completed_horizon"]
    assert result["max_motor_temp"] <= 60.5

    crossing = qt.time_to_threshold(
        result["times"], np.asarray(result["temperatures"])[:, :12], 60.0
    )
    assert crossing is None


def test_config_error_maps_to_python():
    with pytest.raises(qt.ConfigError):
        qt.load_network("/nonexistent/net.json")
