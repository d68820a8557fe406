"""Quadruped motor thermal network simulation and thermal-constraint analysis.

Thin package wrapper around the compiled `_quadtherm` extension module.
"""

from quadtherm._quadtherm import (  # noqa: F401
    ConfigError,
    RewardConfig,
    RobotSnapshot,
    Scenario,
    ThermalNetwork,
    __version__,
    cbf_margin,
    clip_temperatures,
    discretize,
    joule_heat,
    load_network,
    load_scenario,
    max_feasible_gamma,
    network_from_json,
    pd_torque,
    placeholder_network,
    run_endurance,
    sample_episode,
    simulate,
    single_node_analytic,
    steady_state,
    thermal_reward_term,
    time_to_threshold,
    torque_rms,
    total_reward,
)

__all__ = [
    "ConfigError",
    "RewardConfig",
    "RobotSnapshot",
    "Scenario",
    "ThermalNetwork",
    "__version__",
    "cbf_margin",
    "clip_temperatures",
    "discretize",
    "joule_heat",
    "load_network",
    "load_scenario",
    "max_feasible_gamma",
    "network_from_json",
    "pd_torque",
    "placeholder_network",
    "run_endurance",
    "sample_episode",
    "simulate",
    "single_node_analytic",
    "steady_state",
    "thermal_reward_term",
    "time_to_threshold",
    "torque_rms",
    "total_reward",
]
