#include "quadtherm/reward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace quadtherm {

void RobotSnapshot::validate() const {
    const Eigen::Index n = temperatures.size();
    if (n == 0) throw std::invalid_argument("snapshot: needs at least one motor");
    for (const auto* v : {&joint_pos, &joint_vel, &joint_acc, &temp_rate, &action, &prev_action,
                          &prev_prev_action}) {
        if (v->size() != n) {
            throw std::invalid_argument("snapshot: joint/action vectors must all have " +
                                        std::to_string(n) + " entries");
        }
    }
    if (std::abs(gravity.norm() - 1.0) > 1e-6) {
        throw std::invalid_argument("snapshot: gravity vector must have unit norm");
    }
}

void RewardConfig::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("reward config: sigma must be > 0");
    if (!(clip_min <= t_max && t_max <= clip_max)) {
        throw std::invalid_argument("reward config: requires clip_min <= t_max <= clip_max");
    }
    if (!(gamma_t > 0.0)) throw std::invalid_argument("reward config: gamma_t must be > 0");
}

const std::array<std::string, RewardBreakdown::kTermCount>& RewardBreakdown::term_names() {
    static const std::array<std::string, kTermCount> names = {
        "lin_vel_tracking", "ang_vel_tracking", "lin_vel_z",      "ang_vel_xy",
        "orientation",      "joint_acc",        "termination",    "body_height",
        "foot_clearance",   "action_rate",      "smoothness",     "motor_temperature"};
    return names;
}

double RewardBreakdown::term(const std::string& name) const {
    const auto& names = term_names();
    for (int k = 0; k < kTermCount; ++k) {
        if (names[static_cast<size_t>(k)] == name) return terms[static_cast<size_t>(k)];
    }
    throw std::invalid_argument("unknown reward term '" + name + "'");
}

Eigen::VectorXd clip_temperatures(const Eigen::VectorXd& temps, const RewardConfig& cfg) {
    return temps.array().max(cfg.clip_min).min(cfg.clip_max);
}

Eigen::VectorXd cbf_margin(const Eigen::VectorXd& temp_rate, const Eigen::VectorXd& clipped_temps,
                           const RewardConfig& cfg) {
    if (temp_rate.size() != clipped_temps.size()) {
        throw std::invalid_argument("cbf_margin: vector lengths differ");
    }
    return -temp_rate.array() + cfg.gamma_t * (cfg.t_max - clipped_temps.array());
}

double thermal_reward_term(const Eigen::VectorXd& margins, const RewardConfig& cfg) {
    const double violation_l1 = (-margins.array()).max(0.0).sum();
    return cfg.w_motor_temperature * (-violation_l1);
}

RewardBreakdown total_reward(const RobotSnapshot& snap, const RewardConfig& cfg) {
    snap.validate();
    cfg.validate();

    RewardBreakdown out;
    auto& t = out.terms;

    const double lin_err2 = (snap.cmd_lin_vel.head<2>() - snap.lin_vel.head<2>()).squaredNorm();
    t[0] = cfg.w_lin_vel_tracking * std::exp(-lin_err2 / cfg.sigma);

    const double yaw_err = snap.cmd_yaw_rate - snap.ang_vel.z();
    t[1] = cfg.w_ang_vel_tracking * std::exp(-(yaw_err * yaw_err) / cfg.sigma);

    t[2] = cfg.w_lin_vel_z * (snap.lin_vel.z() * snap.lin_vel.z());

    t[3] = cfg.w_ang_vel_xy * snap.ang_vel.head<2>().squaredNorm();

    // Tilt penalty: xy projection of the base-frame gravity vector.
    t[4] = cfg.w_orientation * snap.gravity.head<2>().squaredNorm();

    t[5] = cfg.w_joint_acc * snap.joint_acc.squaredNorm();

    t[6] = snap.terminated ? cfg.w_termination : 0.0;

    const double height_err = cfg.h_target - snap.base_height;
    t[7] = cfg.w_body_height * (height_err * height_err);

    double clearance = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double dz = cfg.pz_target - snap.foot_heights[i];
        clearance += dz * dz * snap.foot_xy_speed[i];
    }
    t[8] = cfg.w_foot_clearance * clearance;

    t[9] = cfg.w_action_rate * (snap.action - snap.prev_action).squaredNorm();

    t[10] = cfg.w_smoothness *
            (snap.action - 2.0 * snap.prev_action + snap.prev_prev_action).squaredNorm();

    const Eigen::VectorXd margins =
        cbf_margin(snap.temp_rate, clip_temperatures(snap.temperatures, cfg), cfg);
    t[11] = thermal_reward_term(margins, cfg);

    out.total = 0.0;
    for (double v : t) out.total += v;
    return out;
}

double max_feasible_gamma(const SystemMatrices& mat, const ThermalNetwork& network,
                          const RewardConfig& cfg) {
    if (mat.method != DiscretizeMethod::Exact) {
        throw std::invalid_argument("max_feasible_gamma: requires exact-discretized matrices");
    }
    if (!(cfg.clip_max > cfg.t_max)) {
        throw std::invalid_argument("max_feasible_gamma: requires clip_max > t_max");
    }
    const int n = network.node_count();
    if (mat.A.rows() != n) {
        throw std::invalid_argument("max_feasible_gamma: matrix size does not match network");
    }

    // Worst hot state: every node at clip_max, environment at the larger of
    // the configured worst-case ambient and the network's own ambient.
    Eigen::VectorXd worst = Eigen::VectorXd::Constant(n, cfg.clip_max);
    worst[network.environment_index()] = std::max(cfg.worst_case_ambient, network.ambient());

    const Eigen::VectorXd free_rate = (mat.A_minus_identity * worst) / mat.h;

    double bound = std::numeric_limits<double>::infinity();
    for (int m : network.motor_indices()) {
        if (free_rate[m] >= 0.0) return 0.0;
        bound = std::min(bound, -free_rate[m] / (cfg.clip_max - cfg.t_max));
    }
    return std::isfinite(bound) ? bound : 0.0;
}

double solve_gamma_bound(const ThermalNetwork& network, const RewardConfig& cfg, double h) {
    const SystemMatrices mat = discretize(build_generator(network), h, DiscretizeMethod::Exact);
    return max_feasible_gamma(mat, network, cfg);
}

}  // namespace quadtherm
