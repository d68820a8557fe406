#include "quadtherm/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "quadtherm/detail/format.hpp"

namespace quadtherm {

void GaitParams::validate() const {
    if (!(step_frequency > 0.0)) throw std::invalid_argument("gait: step_frequency must be > 0");
    if (!(duty_factor > 0.0 && duty_factor < 1.0)) {
        throw std::invalid_argument("gait: duty_factor must lie in (0, 1)");
    }
    if ((base_torque_amplitude.array() < 0.0).any() || (payload_torque_gain.array() < 0.0).any()) {
        throw std::invalid_argument("gait: torque amplitudes and payload gains must be >= 0");
    }
    if (payload_mass < 0.0) throw std::invalid_argument("gait: payload_mass must be >= 0");
}

Eigen::Vector3d GaitParams::effective_amplitude() const {
    return base_torque_amplitude + payload_torque_gain * payload_mass;
}

std::string to_string(ControllerKind kind) {
    return kind == ControllerKind::Baseline ? "baseline" : "throttled";
}

ControllerKind controller_from_string(const std::string& s) {
    if (s == "baseline") return ControllerKind::Baseline;
    if (s == "throttled") return ControllerKind::Throttled;
    throw std::invalid_argument("unknown controller '" + s + "' (expected baseline or throttled)");
}

TorqueWindow synth_gait_torques(const GaitParams& gait, double t, int window_samples,
                                double inner_dt) {
    gait.validate();
    if (window_samples < 1) throw std::invalid_argument("gait window needs at least one sample");
    if (!(inner_dt > 0.0)) throw std::invalid_argument("gait window: inner_dt must be > 0");

    constexpr double kSwingFraction = 0.1;
    // Diagonal pairs in phase: FL and RR lead, FR and RL run half a cycle later.
    constexpr double kLegOffset[4] = {0.0, 0.5, 0.5, 0.0};

    const Eigen::Vector3d amplitude = gait.effective_amplitude();

    TorqueWindow window;
    window.inner_dt = inner_dt;
    window.samples.resize(window_samples, 12);
    for (int s = 0; s < window_samples; ++s) {
        const double ts = t + s * inner_dt;
        const double cycle_phase = ts * gait.step_frequency;
        for (int leg = 0; leg < 4; ++leg) {
            double phase = std::fmod(cycle_phase + kLegOffset[leg], 1.0);
            if (phase < 0.0) phase += 1.0;
            const bool stance = phase < gait.duty_factor;
            const double shape =
                stance ? std::sin(std::numbers::pi * phase / gait.duty_factor) : kSwingFraction;
            for (int role = 0; role < 3; ++role) {
                window.samples(s, 3 * leg + role) = amplitude[role] * shape;
            }
        }
    }
    return window;
}

double throttle_scale(const Eigen::VectorXd& temps, const ThermalNetwork& network,
                      const SystemMatrices& mat, const Eigen::VectorXd& demanded_joule,
                      const RewardConfig& cfg) {
    const int n = network.node_count();
    if (temps.size() != n || mat.A.rows() != n) {
        throw std::invalid_argument("throttle_scale: dimensions do not match the network");
    }
    if (demanded_joule.size() != network.motor_count()) {
        throw std::invalid_argument("throttle_scale: demand vector must have one entry per motor");
    }

    // Rate the motors would see with zero controllable heat (free evolution
    // plus the constant aux heat), and the extra rate at full demand.
    const Eigen::VectorXd aux = network.aux_heat_vector();
    Eigen::VectorXd joule_watts = Eigen::VectorXd::Zero(n);
    const auto& motors = network.motor_indices();
    for (size_t k = 0; k < motors.size(); ++k) {
        joule_watts[motors[k]] = demanded_joule[static_cast<Eigen::Index>(k)];
    }
    const Eigen::VectorXd base_rate = (mat.A_minus_identity * temps + mat.B * aux) / mat.h;
    const Eigen::VectorXd demand_rate = (mat.B * joule_watts) / mat.h;

    double scale_sq = 1.0;
    for (int m : motors) {
        if (demand_rate[m] <= 0.0) continue;
        const double clipped = std::clamp(temps[m], cfg.clip_min, cfg.clip_max);
        const double allowed_rate = cfg.gamma_t * (cfg.t_max - clipped);
        const double slack = allowed_rate - base_rate[m];
        scale_sq = std::min(scale_sq, std::clamp(slack / demand_rate[m], 0.0, 1.0));
    }
    return std::sqrt(scale_sq);
}

namespace {

struct TickOutcome {
    Eigen::VectorXd applied_rms;
    HeatInput input;
    double scale = 1.0;
};

TickOutcome controller_tick(const GaitParams& gait, const ActuationParams& actuation,
                            ControllerKind controller, const ThermalNetwork& network,
                            const SystemMatrices& mat, const RewardConfig& cfg,
                            const Eigen::VectorXd& temps, double t, int window_samples) {
    const TorqueWindow window =
        synth_gait_torques(gait, t, window_samples, mat.h / window_samples);
    const Eigen::VectorXd demand_rms = torque_rms(window);
    const Eigen::VectorXd demand_joule = joule_heat(demand_rms, actuation);

    TickOutcome out;
    out.scale = controller == ControllerKind::Throttled
                    ? throttle_scale(temps, network, mat, demand_joule, cfg)
                    : 1.0;
    out.applied_rms = out.scale * demand_rms;
    out.input = assemble_heat_input(joule_heat(out.applied_rms, actuation), network);
    return out;
}

}  // namespace

EnduranceResult run_endurance(const ThermalNetwork& network, const GaitParams& gait,
                              const ActuationParams& actuation, ControllerKind controller,
                              double horizon, double h, const RewardConfig& cfg,
                              int window_samples, const std::optional<Eigen::VectorXd>& init_motor_temps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("run_endurance: horizon must be > 0");
    if (!(h > 0.0)) throw std::invalid_argument("run_endurance: h must be > 0");
    if (window_samples < 1) throw std::invalid_argument("run_endurance: window_samples must be >= 1");
    if (actuation.joint_count() != network.motor_count()) {
        throw std::invalid_argument("run_endurance: actuation joint count (" +
                                    std::to_string(actuation.joint_count()) +
                                    ") does not match motor count (" +
                                    std::to_string(network.motor_count()) + ")");
    }
    cfg.validate();

    const int n = network.node_count();
    const int motor_count = network.motor_count();
    const auto& motors = network.motor_indices();

    Eigen::VectorXd temps = network.uniform_ambient();
    if (init_motor_temps) {
        if (init_motor_temps->size() != motor_count) {
            throw std::invalid_argument("run_endurance: initial motor temperatures must have one "
                                        "entry per motor");
        }
        for (size_t k = 0; k < motors.size(); ++k) {
            temps[motors[k]] = (*init_motor_temps)[static_cast<Eigen::Index>(k)];
        }
    }

    const SystemMatrices mat = discretize(build_generator(network), h, DiscretizeMethod::Exact);
    const auto ticks = static_cast<long>(std::floor(horizon / h + 1e-9));

    EnduranceResult result;
    result.trace.times.resize(static_cast<size_t>(ticks) + 1);
    result.trace.temperatures.resize(ticks + 1, n);
    result.trace.inputs.resize(ticks + 1, n);
    result.applied_rms.resize(ticks, motor_count);
    result.throttle_history.resize(ticks);

    auto motor_max = [&](const Eigen::VectorXd& state) {
        double peak = -std::numeric_limits<double>::infinity();
        for (int m : motors) peak = std::max(peak, state[m]);
        return peak;
    };

    ThermalState state{temps, 0.0};
    result.max_motor_temp = motor_max(temps);
    double penalty_sum = 0.0;
    long executed = 0;
    bool tripped = motor_max(temps) >= cfg.t_max && controller == ControllerKind::Baseline;

    for (long k = 0; k < ticks && !tripped; ++k) {
        const TickOutcome tick = controller_tick(gait, actuation, controller, network, mat, cfg,
                                                 state.temperatures, state.time, window_samples);
        result.trace.times[static_cast<size_t>(k)] = state.time;
        result.trace.temperatures.row(k) = state.temperatures.transpose();
        result.trace.inputs.row(k) = tick.input.watts.transpose();
        result.applied_rms.row(k) = tick.applied_rms.transpose();
        result.throttle_history[k] = tick.scale;

        const ThermalState next = step(mat, state, tick.input);

        Eigen::VectorXd motor_rate(motor_count), motor_temp(motor_count);
        for (size_t m = 0; m < motors.size(); ++m) {
            const auto idx = static_cast<Eigen::Index>(m);
            motor_rate[idx] = (next.temperatures[motors[m]] - state.temperatures[motors[m]]) / h;
            motor_temp[idx] = next.temperatures[motors[m]];
        }
        penalty_sum += thermal_reward_term(
            cbf_margin(motor_rate, clip_temperatures(motor_temp, cfg), cfg), cfg);

        state = next;
        ++executed;
        result.max_motor_temp = std::max(result.max_motor_temp, motor_max(state.temperatures));
        if (controller == ControllerKind::Baseline && motor_max(state.temperatures) >= cfg.t_max) {
            tripped = true;  // overheat protection: hard stop at the first crossing
        }
    }

    // Final recorded row: state plus the input the controller would apply next.
    const TickOutcome last = controller_tick(gait, actuation, controller, network, mat, cfg,
                                             state.temperatures, state.time, window_samples);
    result.trace.times[static_cast<size_t>(executed)] = state.time;
    result.trace.temperatures.row(executed) = state.temperatures.transpose();
    result.trace.inputs.row(executed) = last.input.watts.transpose();

    if (executed < ticks) {
        result.trace.times.resize(static_cast<size_t>(executed) + 1);
        result.trace.temperatures.conservativeResize(executed + 1, n);
        result.trace.inputs.conservativeResize(executed + 1, n);
        result.applied_rms.conservativeResize(executed, motor_count);
        result.throttle_history.conservativeResize(executed);
    }

    result.completed_horizon = executed == ticks;
    result.mean_thermal_penalty = executed > 0 ? penalty_sum / static_cast<double>(executed) : 0.0;

    std::vector<int> motor_cols(motors.begin(), motors.end());
    result.overheat_time = time_to_threshold(result.trace, cfg.t_max, motor_cols);

    if (motor_count > 0) {
        int hottest = motors.front();
        double peak = -std::numeric_limits<double>::infinity();
        for (int m : motors) {
            const double column_peak = result.trace.temperatures.col(m).maxCoeff();
            if (column_peak > peak) {
                peak = column_peak;
                hottest = m;
            }
        }
        result.hottest_motor = hottest;
    }
    return result;
}

EnduranceResult run_endurance(const Scenario& scenario, std::uint64_t seed) {
    if (!scenario.randomization) {
        return run_endurance(scenario.network, scenario.gait, scenario.actuation,
                             scenario.controller, scenario.horizon, scenario.h, scenario.reward,
                             scenario.window_samples);
    }
    const SampledEpisodeConfig sampled = sample_episode(*scenario.randomization, seed);

    GaitParams gait = scenario.gait;
    gait.payload_mass = sampled.payload_mass;
    gait.base_torque_amplitude *= sampled.motor_strength_scale;
    gait.payload_torque_gain *= sampled.motor_strength_scale;

    ThermalNetwork network(scenario.network.nodes(), scenario.network.edges(),
                           sampled.ambient_temp);

    Eigen::VectorXd init = sampled.init_motor_temp;
    if (init.size() != network.motor_count()) {
        throw std::invalid_argument("run_endurance: randomization motor_count (" +
                                    std::to_string(init.size()) + ") does not match the network (" +
                                    std::to_string(network.motor_count()) + " motors)");
    }
    return run_endurance(network, gait, scenario.actuation, scenario.controller, scenario.horizon,
                         scenario.h, scenario.reward, scenario.window_samples, init);
}

std::optional<double> time_to_threshold(const SimulationTrace& trace, double threshold,
                                        std::span<const int> columns) {
    if (trace.sample_count() == 0) throw std::invalid_argument("time_to_threshold: empty trace");
    for (int col : columns) {
        if (col < 0 || col >= trace.node_count()) {
            throw std::invalid_argument("time_to_threshold: column " + std::to_string(col) +
                                        " out of range");
        }
    }

    for (int k = 0; k < trace.sample_count(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        bool found = false;
        for (int col : columns) {
            const double value = trace.temperatures(k, col);
            if (value >= threshold) {
                if (k == 0) return trace.times.front();
                const double prev = trace.temperatures(k - 1, col);
                double t_cross = trace.times[static_cast<size_t>(k)];
                if (value > prev) {
                    const double frac = (threshold - prev) / (value - prev);
                    t_cross = trace.times[static_cast<size_t>(k - 1)] +
                              frac * (trace.times[static_cast<size_t>(k)] -
                                      trace.times[static_cast<size_t>(k - 1)]);
                }
                best = std::min(best, t_cross);
                found = true;
            }
        }
        if (found) return best;
    }
    return std::nullopt;
}

std::optional<double> time_to_threshold(const SimulationTrace& trace, double threshold) {
    std::vector<int> all(static_cast<size_t>(trace.node_count()));
    for (int c = 0; c < trace.node_count(); ++c) all[static_cast<size_t>(c)] = c;
    return time_to_threshold(trace, threshold, all);
}

std::vector<SweepRow> run_sweep(const std::vector<SweepVariation>& variations,
                                const std::vector<std::uint64_t>& seeds, int jobs) {
    if (variations.empty()) throw std::invalid_argument("run_sweep: variations must be nonempty");
    if (seeds.empty()) throw std::invalid_argument("run_sweep: seeds must be nonempty");

    const size_t total = variations.size() * seeds.size();
    std::vector<SweepRow> rows(total);

    unsigned worker_count = jobs > 0 ? static_cast<unsigned>(jobs)
                                     : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min<unsigned>(worker_count, static_cast<unsigned>(total));

    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (size_t i = cursor.fetch_add(1); i < total; i = cursor.fetch_add(1)) {
            const size_t vi = i / seeds.size();
            const size_t si = i % seeds.size();
            const SweepVariation& variation = variations[vi];
            SweepRow& row = rows[i];
            row.index = static_cast<int>(i);
            row.label = variation.label;
            row.seed = seeds[si];
            row.controller = to_string(variation.scenario.controller);
            try {
                const EnduranceResult r = run_endurance(variation.scenario, seeds[si]);
                row.status = "ok";
                row.completed_horizon = r.completed_horizon;
                row.overheat_time = r.overheat_time;
                row.hottest_motor = r.hottest_motor;
                row.max_motor_temp = r.max_motor_temp;
                row.mean_thermal_penalty = r.mean_thermal_penalty;
                row.final_temps =
                    r.trace.temperatures.row(r.trace.sample_count() - 1).transpose();
            } catch (const std::exception& e) {
                row.status = "error";
                row.error = e.what();
            }
        }
    };

    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    Eigen::Index temp_cols = 0;
    for (const SweepRow& row : rows) temp_cols = std::max(temp_cols, row.final_temps.size());

    out << "run,label,seed,controller,status,completed_horizon,overheat_time,hottest_motor,"
           "max_motor_temp,mean_thermal_penalty";
    for (Eigen::Index c = 0; c < temp_cols; ++c) out << ",final_T_" << c;
    out << ",error\n";

    auto csv_escape = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char ch : s) {
            if (ch == '"') quoted += "\"\"";
            else quoted += ch;
        }
        quoted += '"';
        return quoted;
    };

    for (const SweepRow& row : rows) {
        out << row.index << ',' << csv_escape(row.label) << ',' << row.seed << ','
            << row.controller << ',' << row.status << ',' << (row.completed_horizon ? 1 : 0) << ',';
        if (row.overheat_time) out << detail::format_double(*row.overheat_time);
        out << ',';
        if (row.hottest_motor) out << *row.hottest_motor;
        out << ',' << detail::format_double(row.max_motor_temp) << ','
            << detail::format_double(row.mean_thermal_penalty);
        for (Eigen::Index c = 0; c < temp_cols; ++c) {
            out << ',';
            if (c < row.final_temps.size()) out << detail::format_double(row.final_temps[c]);
        }
        out << ',' << csv_escape(row.error) << '\n';
    }
}

}  // namespace quadtherm
