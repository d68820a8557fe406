#pragma once

#include <Eigen/Dense>

#include "quadtherm/thermal_network.hpp"

namespace quadtherm {

/// Inner-loop torque samples feeding one thermal update.
/// One row per sample, one column per motor.
struct TorqueWindow {
    Eigen::MatrixXd samples;  ///< N*m
    double inner_dt = 0.005;  ///< s between rows
};

/// Joint PD gains and the torque-to-heat coefficient.
///
/// Currents are never simulated: heat_coeff folds the winding resistance and
/// torque constant into a single W/(N*m)^2 factor per motor, so per-motor
/// heat is heat_coeff * rms(torque)^2.
struct ActuationParams {
    Eigen::VectorXd kp;              ///< N*m/rad
    Eigen::VectorXd kd;              ///< N*m*s/rad
    Eigen::VectorXd torque_limit;    ///< N*m
    Eigen::VectorXd nominal_angles;  ///< rad
    Eigen::VectorXd heat_coeff;      ///< W/(N*m)^2

    void validate() const;
    [[nodiscard]] int joint_count() const { return static_cast<int>(kp.size()); }
};

/// Synthetic 12-joint defaults for the shipped demo configs.
[[nodiscard]] ActuationParams placeholder_actuation();

/// Per-motor root-mean-square over the window's rows.
[[nodiscard]] Eigen::VectorXd torque_rms(const TorqueWindow& window);

/// Per-motor Joule heat: heat_coeff * rms^2. Throws on negative rms entries.
[[nodiscard]] Eigen::VectorXd joule_heat(const Eigen::VectorXd& rms, const ActuationParams& params);

/// Per-node heat vector: motor Joule heat plus every non-environment node's
/// constant aux heat; environment entry zero.
[[nodiscard]] HeatInput assemble_heat_input(const Eigen::VectorXd& joule,
                                            const ThermalNetwork& network);

/// Inner-loop PD law: clamp(kp (target - pos) - kd vel, +-torque_limit).
[[nodiscard]] Eigen::VectorXd pd_torque(const Eigen::VectorXd& target, const Eigen::VectorXd& pos,
                                        const Eigen::VectorXd& vel, const ActuationParams& params);

}  // namespace quadtherm
