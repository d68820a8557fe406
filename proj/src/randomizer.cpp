#include "quadtherm/randomizer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace quadtherm {

std::string to_string(InitTempMode mode) {
    return mode == InitTempMode::Uniform ? "uniform" : "triangular_peak";
}

InitTempMode init_temp_mode_from_string(const std::string& s) {
    if (s == "uniform") return InitTempMode::Uniform;
    if (s == "triangular_peak") return InitTempMode::TriangularPeak;
    throw std::invalid_argument("unknown init temp mode '" + s + "'");
}

namespace {

void check_interval(const Interval& iv, const char* name) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw std::invalid_argument(std::string("randomization range '") + name +
                                    "': requires finite min <= max");
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class UniformDraw {
public:
    explicit UniformDraw(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // [0, 1) with 53 uniform bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double in(const Interval& iv) { return iv.lo + unit() * (iv.hi - iv.lo); }

    // Triangular distribution on [iv.lo, iv.hi] with mode at peak.
    double triangular(const Interval& iv, double peak) {
        const double width = iv.hi - iv.lo;
        if (width == 0.0) return iv.lo;
        const double c = (peak - iv.lo) / width;
        const double u = unit();
        if (u < c) return iv.lo + std::sqrt(u * width * (peak - iv.lo));
        return iv.hi - std::sqrt((1.0 - u) * width * (iv.hi - peak));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace

void RandomizationRanges::validate() const {
    check_interval(payload_mass, "payload_mass");
    check_interval(com_displacement, "com_displacement");
    check_interval(external_force, "external_force");
    check_interval(ground_friction, "ground_friction");
    check_interval(init_joint_scale, "init_joint_scale");
    check_interval(system_delay_steps, "system_delay_steps");
    check_interval(motor_strength_scale, "motor_strength_scale");
    check_interval(init_motor_temp, "init_motor_temp");
    check_interval(ambient_temp, "ambient_temp");
    if (!(policy_dt > 0.0)) throw std::invalid_argument("randomization: policy_dt must be > 0");
    if (motor_count < 1) throw std::invalid_argument("randomization: motor_count must be >= 1");
    if (init_temp_mode == InitTempMode::TriangularPeak &&
        (init_temp_peak < init_motor_temp.lo || init_temp_peak > init_motor_temp.hi)) {
        throw std::invalid_argument(
            "randomization: init_temp_peak must lie inside the init_motor_temp range");
    }
}

SampledEpisodeConfig sample_episode(const RandomizationRanges& ranges, std::uint64_t seed) {
    ranges.validate();
    UniformDraw draw(seed);

    SampledEpisodeConfig out;
    out.seed = seed;
    out.payload_mass = draw.in(ranges.payload_mass);
    for (int axis = 0; axis < 3; ++axis) out.com_displacement[axis] = draw.in(ranges.com_displacement);
    for (int axis = 0; axis < 3; ++axis) out.external_force[axis] = draw.in(ranges.external_force);
    out.ground_friction = draw.in(ranges.ground_friction);
    out.init_joint_scale = draw.in(ranges.init_joint_scale);
    out.system_delay_s = draw.in(ranges.system_delay_steps) * ranges.policy_dt;
    out.motor_strength_scale = draw.in(ranges.motor_strength_scale);
    out.init_motor_temp.resize(ranges.motor_count);
    for (int m = 0; m < ranges.motor_count; ++m) {
        out.init_motor_temp[m] = ranges.init_temp_mode == InitTempMode::Uniform
                                     ? draw.in(ranges.init_motor_temp)
                                     : draw.triangular(ranges.init_motor_temp, ranges.init_temp_peak);
    }
    out.ambient_temp = draw.in(ranges.ambient_temp);
    return out;
}

}  // namespace quadtherm
