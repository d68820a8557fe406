#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadtherm/actuation.hpp"
#include "quadtherm/randomizer.hpp"
#include "quadtherm/reward.hpp"
#include "quadtherm/thermal_network.hpp"

namespace quadtherm {

/// Synthetic trot profile: per-role half-sine stance torque plus a small
/// (10% amplitude) swing torque, diagonal leg pairs in phase.
struct GaitParams {
    double step_frequency = 2.0;  ///< Hz
    double duty_factor = 0.5;     ///< stance fraction of the cycle
    Eigen::Vector3d base_torque_amplitude = Eigen::Vector3d(8.0, 14.0, 20.0);  ///< N*m hip/thigh/knee
    double payload_mass = 0.0;                                                 ///< kg
    Eigen::Vector3d payload_torque_gain = Eigen::Vector3d(0.5, 1.0, 1.5);      ///< N*m per kg
    double command_speed = 1.0;  ///< m/s, reporting only

    void validate() const;
    /// base + gain * payload per joint role.
    [[nodiscard]] Eigen::Vector3d effective_amplitude() const;
};

enum class ControllerKind { Baseline, Throttled };

[[nodiscard]] std::string to_string(ControllerKind kind);
[[nodiscard]] ControllerKind controller_from_string(const std::string& s);

/// Outcome of one endurance run.
struct EnduranceResult {
    SimulationTrace trace;
    std::optional<double> overheat_time;  ///< s, present iff a motor crossed t_max
    std::optional<int> hottest_motor;     ///< node id with the peak temperature
    bool completed_horizon = false;
    Eigen::MatrixXd applied_rms;        ///< per tick x motor, after throttling
    Eigen::VectorXd throttle_history;   ///< per tick scale in [0, 1]
    double max_motor_temp = 0.0;        ///< degC over the whole trace
    double mean_thermal_penalty = 0.0;  ///< weighted thermal term, mean over ticks
};

/// A full experiment description; mirrors the scenario file schema.
struct Scenario {
    explicit Scenario(ThermalNetwork net) : network(std::move(net)) {}

    ThermalNetwork network;
    GaitParams gait;
    ActuationParams actuation = placeholder_actuation();
    ControllerKind controller = ControllerKind::Baseline;
    double horizon = 1800.0;  ///< s
    double h = 0.02;          ///< s, thermal update period
    int window_samples = 4;   ///< inner-loop samples per thermal update
    RewardConfig reward;
    std::optional<RandomizationRanges> randomization;
};

/// One gait window of torque magnitudes starting at time t.
[[nodiscard]] TorqueWindow synth_gait_torques(const GaitParams& gait, double t, int window_samples,
                                              double inner_dt);

/// Uniform torque scale in [0, 1] such that the one-step predicted rate of
/// every motor satisfies the barrier condition at the current temperatures.
///
/// Heat scales with the square of torque, so the returned scale is the
/// square root of the binding per-motor heat allowance ratio. Aux heat is
/// not controllable and is part of the baseline rate. Returns 1 when every
/// motor has slack for the full demand.
[[nodiscard]] double throttle_scale(const Eigen::VectorXd& temps, const ThermalNetwork& network,
                                    const SystemMatrices& mat,
                                    const Eigen::VectorXd& demanded_joule, const RewardConfig& cfg);

/// Runs one endurance experiment. The baseline controller applies the gait
/// unmodified and stops at the first t_max crossing (overheat protection);
/// the throttled controller scales torque through throttle_scale and always
/// runs the full horizon.
[[nodiscard]] EnduranceResult run_endurance(const ThermalNetwork& network, const GaitParams& gait,
                                            const ActuationParams& actuation,
                                            ControllerKind controller, double horizon, double h,
                                            const RewardConfig& cfg, int window_samples = 4,
                                            const std::optional<Eigen::VectorXd>& init_motor_temps =
                                                std::nullopt);

/// Scenario-level wrapper: applies the sampled episode (payload, motor
/// strength, initial temperatures, ambient) when the scenario carries a
/// randomization block, then runs the endurance loop.
[[nodiscard]] EnduranceResult run_endurance(const Scenario& scenario, std::uint64_t seed);

/// First time any monitored column reaches the threshold, linearly
/// interpolated between the bracketing samples.
[[nodiscard]] std::optional<double> time_to_threshold(const SimulationTrace& trace,
                                                      double threshold,
                                                      std::span<const int> columns);

/// All temperature columns.
[[nodiscard]] std::optional<double> time_to_threshold(const SimulationTrace& trace,
                                                      double threshold);

/// One sweep variation: a label plus the fully materialized scenario.
struct SweepVariation {
    std::string label;
    Scenario scenario;
};

/// One summary row per (variation, seed) run.
struct SweepRow {
    int index = 0;
    std::string label;
    std::uint64_t seed = 0;
    std::string controller;
    std::string status;  ///< "ok" or "error"
    bool completed_horizon = false;
    std::optional<double> overheat_time;
    std::optional<int> hottest_motor;
    double max_motor_temp = 0.0;
    double mean_thermal_penalty = 0.0;
    Eigen::VectorXd final_temps;
    std::string error;
};

/// Runs every (variation, seed) pair, fanning out across `jobs` threads
/// (0 = hardware concurrency). Rows come back in input order regardless of
/// execution order; per-run failures are recorded in the row.
[[nodiscard]] std::vector<SweepRow> run_sweep(const std::vector<SweepVariation>& variations,
                                              const std::vector<std::uint64_t>& seeds,
                                              int jobs = 0);

/// Sweep CSV, one row per run; column order documented in the README.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace quadtherm
