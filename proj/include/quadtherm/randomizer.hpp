#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace quadtherm {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class InitTempMode { Uniform, TriangularPeak };

[[nodiscard]] std::string to_string(InitTempMode mode);
[[nodiscard]] InitTempMode init_temp_mode_from_string(const std::string& s);

/// Episode-initialization ranges. Defaults follow the training setup:
/// payload [0,4] kg, CoM +-0.1 m per axis, force +-30 N per axis, friction
/// [0.2,1.25], joint scale [0.5,1.5], delay [0,3] control periods, strength
/// [0.8,1.2], initial motor temperature [t_max-25, t_max+10] = [35,70] degC,
/// ambient [0,35] degC.
struct RandomizationRanges {
    Interval payload_mass{0.0, 4.0};              ///< kg
    Interval com_displacement{-0.1, 0.1};          ///< m, per axis
    Interval external_force{-30.0, 30.0};          ///< N, per axis
    Interval ground_friction{0.2, 1.25};
    Interval init_joint_scale{0.5, 1.5};           ///< x nominal
    Interval system_delay_steps{0.0, 3.0};         ///< x policy_dt
    Interval motor_strength_scale{0.8, 1.2};
    Interval init_motor_temp{35.0, 70.0};          ///< degC, drawn per motor
    Interval ambient_temp{0.0, 35.0};              ///< degC

    double policy_dt = 0.02;  ///< s, the delay unit
    int motor_count = 12;

    /// Uniform by default; the triangular mode concentrates initial motor
    /// temperatures around init_temp_peak.
    InitTempMode init_temp_mode = InitTempMode::Uniform;
    double init_temp_peak = 60.0;  ///< degC

    void validate() const;
};

/// One sampled episode plus the seed that produced it.
struct SampledEpisodeConfig {
    double payload_mass = 0.0;
    Eigen::Vector3d com_displacement = Eigen::Vector3d::Zero();
    Eigen::Vector3d external_force = Eigen::Vector3d::Zero();
    double ground_friction = 0.0;
    double init_joint_scale = 1.0;
    double system_delay_s = 0.0;
    double motor_strength_scale = 1.0;
    Eigen::VectorXd init_motor_temp;
    double ambient_temp = 0.0;
    std::uint64_t seed = 0;
};

/// Seeded, portable draw of one episode configuration.
///
/// Identical (ranges, seed) pairs reproduce the output bit-for-bit on any
/// platform: the generator is std::mt19937_64 seeded through one SplitMix64
/// premix step, and uniforms are mapped as (x >> 11) * 2^-53 rather than
/// through std::uniform_real_distribution. Fields are drawn in declaration
/// order; vector fields draw component by component.
[[nodiscard]] SampledEpisodeConfig sample_episode(const RandomizationRanges& ranges,
                                                  std::uint64_t seed);

}  // namespace quadtherm
