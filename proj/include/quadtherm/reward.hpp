#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>

#include "quadtherm/thermal_network.hpp"

namespace quadtherm {

/// One policy-tick state: commands, kinematics, temperatures, action history.
struct RobotSnapshot {
    Eigen::Vector3d cmd_lin_vel = Eigen::Vector3d::Zero();  ///< m/s, z unused
    double cmd_yaw_rate = 0.0;                              ///< rad/s
    Eigen::Vector3d lin_vel = Eigen::Vector3d::Zero();      ///< m/s
    Eigen::Vector3d ang_vel = Eigen::Vector3d::Zero();      ///< rad/s
    Eigen::Vector3d gravity = Eigen::Vector3d(0, 0, -1);    ///< unit, base frame
    Eigen::VectorXd joint_pos = Eigen::VectorXd::Zero(12);  ///< rad
    Eigen::VectorXd joint_vel = Eigen::VectorXd::Zero(12);  ///< rad/s
    Eigen::VectorXd joint_acc = Eigen::VectorXd::Zero(12);  ///< rad/s^2
    Eigen::VectorXd temperatures = Eigen::VectorXd::Zero(12);  ///< degC, motors
    Eigen::VectorXd temp_rate = Eigen::VectorXd::Zero(12);     ///< degC/s
    Eigen::VectorXd action = Eigen::VectorXd::Zero(12);
    Eigen::VectorXd prev_action = Eigen::VectorXd::Zero(12);
    Eigen::VectorXd prev_prev_action = Eigen::VectorXd::Zero(12);
    double base_height = 0.3;                                   ///< m
    Eigen::Vector4d foot_heights = Eigen::Vector4d::Zero();     ///< m
    Eigen::Vector4d foot_xy_speed = Eigen::Vector4d::Zero();    ///< m/s
    Eigen::Vector3d external_force = Eigen::Vector3d::Zero();   ///< N
    bool terminated = false;

    void validate() const;
};

/// Reward weights and thermal-constraint parameters.
struct RewardConfig {
    double w_lin_vel_tracking = 1.0;
    double w_ang_vel_tracking = 0.8;
    double w_lin_vel_z = -2.0;
    double w_ang_vel_xy = -0.05;
    double w_orientation = -0.2;
    double w_joint_acc = -2.5e-7;
    double w_termination = -200.0;
    double w_body_height = -1.0;
    double w_foot_clearance = -0.01;
    double w_action_rate = -0.01;
    double w_smoothness = -0.01;
    double w_motor_temperature = 2.0;

    double sigma = 0.25;        ///< tracking bandwidth
    double h_target = 0.3;      ///< m
    double pz_target = -0.2;    ///< m
    double t_max = 60.0;        ///< degC
    double clip_min = 55.0;     ///< degC
    double clip_max = 65.0;     ///< degC
    double gamma_t = 0.35;      ///< 1/s
    /// Environment entry of the worst-case vector in the gamma bound;
    /// defaults to the top of the ambient randomization range.
    double worst_case_ambient = 35.0;

    void validate() const;
};

/// Weighted contribution of each reward row, in fixed column order.
struct RewardBreakdown {
    static constexpr int kTermCount = 12;

    std::array<double, kTermCount> terms{};
    double total = 0.0;

    /// Stable names, also used as CSV column headers.
    [[nodiscard]] static const std::array<std::string, kTermCount>& term_names();
    [[nodiscard]] double term(const std::string& name) const;
};

/// Element-wise clamp to [clip_min, clip_max].
[[nodiscard]] Eigen::VectorXd clip_temperatures(const Eigen::VectorXd& temps,
                                                const RewardConfig& cfg);

/// Per-motor barrier margin: -Tdot + gamma_t (t_max - T_clip).
/// Nonnegative means the thermal constraint is satisfied.
[[nodiscard]] Eigen::VectorXd cbf_margin(const Eigen::VectorXd& temp_rate,
                                         const Eigen::VectorXd& clipped_temps,
                                         const RewardConfig& cfg);

/// Weighted penalty -w * || min(margin, 0) ||_1; zero iff all margins >= 0.
[[nodiscard]] double thermal_reward_term(const Eigen::VectorXd& margins, const RewardConfig& cfg);

/// Evaluates every reward row on a snapshot.
[[nodiscard]] RewardBreakdown total_reward(const RobotSnapshot& snap, const RewardConfig& cfg);

/// Largest gamma_t for which the barrier condition still holds at the worst
/// hot state (every non-environment node at clip_max) under zero input.
///
/// Uses the discrete free rate ((A - I) T / h) per motor; returns 0 if some
/// motor's free rate is nonnegative. Requires exact-discretized matrices and
/// clip_max > t_max.
[[nodiscard]] double max_feasible_gamma(const SystemMatrices& mat, const ThermalNetwork& network,
                                        const RewardConfig& cfg);

/// Step size for the canonical gamma solve; small enough that the discrete
/// free rate agrees with the continuous one to ~1e-10 relative.
inline constexpr double kGammaSolveStep = 1e-10;

/// Convenience wrapper: builds the generator, discretizes exactly at h and
/// evaluates max_feasible_gamma.
[[nodiscard]] double solve_gamma_bound(const ThermalNetwork& network, const RewardConfig& cfg,
                                       double h = kGammaSolveStep);

}  // namespace quadtherm
