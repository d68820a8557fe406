#include "quadtherm/actuation.hpp"

#include <stdexcept>

namespace quadtherm {

void ActuationParams::validate() const {
    const auto n = kp.size();
    if (kd.size() != n || torque_limit.size() != n || nominal_angles.size() != n ||
        heat_coeff.size() != n) {
        throw std::invalid_argument("actuation parameters: inconsistent joint counts");
    }
    if ((kp.array() < 0.0).any() || (kd.array() < 0.0).any()) {
        throw std::invalid_argument("actuation parameters: kp and kd must be >= 0");
    }
    if ((torque_limit.array() <= 0.0).any()) {
        throw std::invalid_argument("actuation parameters: torque limits must be > 0");
    }
    if ((heat_coeff.array() < 0.0).any()) {
        throw std::invalid_argument("actuation parameters: heat coefficients must be >= 0");
    }
}

ActuationParams placeholder_actuation() {
    ActuationParams params;
    params.kp = Eigen::VectorXd::Constant(12, 28.0);
    params.kd = Eigen::VectorXd::Constant(12, 0.7);
    params.torque_limit = Eigen::VectorXd::Constant(12, 33.5);
    params.nominal_angles = Eigen::VectorXd::Zero(12);
    for (int leg = 0; leg < 4; ++leg) {
        params.nominal_angles[3 * leg + 0] = 0.0;   // hip
        params.nominal_angles[3 * leg + 1] = 0.9;   // thigh
        params.nominal_angles[3 * leg + 2] = -1.8;  // knee
    }
    params.heat_coeff = Eigen::VectorXd::Constant(12, 0.12);
    return params;
}

Eigen::VectorXd torque_rms(const TorqueWindow& window) {
    if (window.samples.rows() < 1) {
        throw std::invalid_argument("torque_rms: window must contain at least one sample row");
    }
    // Mean over the actual sample count.
    return (window.samples.array().square().colwise().mean()).sqrt().matrix();
}

Eigen::VectorXd joule_heat(const Eigen::VectorXd& rms, const ActuationParams& params) {
    if (rms.size() != params.heat_coeff.size()) {
        throw std::invalid_argument("joule_heat: rms vector length does not match motor count");
    }
    if ((rms.array() < 0.0).any()) {
        throw std::invalid_argument("joule_heat: rms entries must be >= 0");
    }
    return params.heat_coeff.array() * rms.array().square();
}

HeatInput assemble_heat_input(const Eigen::VectorXd& joule, const ThermalNetwork& network) {
    if (joule.size() != network.motor_count()) {
        throw std::invalid_argument("assemble_heat_input: joule vector has " +
                                    std::to_string(joule.size()) + " entries, network has " +
                                    std::to_string(network.motor_count()) + " motors");
    }
    HeatInput input;
    input.watts = network.aux_heat_vector();
    const auto& motors = network.motor_indices();
    for (size_t m = 0; m < motors.size(); ++m) {
        input.watts[motors[m]] += joule[static_cast<Eigen::Index>(m)];
    }
    return input;
}

Eigen::VectorXd pd_torque(const Eigen::VectorXd& target, const Eigen::VectorXd& pos,
                          const Eigen::VectorXd& vel, const ActuationParams& params) {
    const auto n = params.kp.size();
    if (target.size() != n || pos.size() != n || vel.size() != n) {
        throw std::invalid_argument("pd_torque: vector lengths must match the joint count");
    }
    const Eigen::ArrayXd raw =
        params.kp.array() * (target - pos).array() - params.kd.array() * vel.array();
    return raw.min(params.torque_limit.array()).max(-params.torque_limit.array());
}

}  // namespace quadtherm
