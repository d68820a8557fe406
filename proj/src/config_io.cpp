#include "quadtherm/config_io.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "quadtherm/detail/format.hpp"
#include "quadtherm/version.hpp"

namespace quadtherm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
    throw ConfigError(where + ": " + message);
}

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a JSON object");
}

/// Rejects keys outside the allowed set so misspelled fields surface.
void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    expect_object(j, where);
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            fail(where, "unknown field '" + item.key() + "'");
        }
    }
}

void check_schema_version(const json& j, const std::string& where) {
    if (!j.contains("schema_version")) fail(where, "missing required field 'schema_version'");
    const json& v = j.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
        fail(where, "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
}

double get_double(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) fail(where, "missing required field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

double get_double_or(const json& j, const std::string& where, const std::string& key,
                     double fallback) {
    return j.contains(key) ? get_double(j, where, key) : fallback;
}

int get_int(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) fail(where, "missing required field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) fail(where, "missing required field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

bool get_bool_or(const json& j, const std::string& where, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(where + "." + key, "expected a boolean");
    return v.get<bool>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& where, const std::string& key,
                           Eigen::Index expected) {
    if (!j.contains(key)) fail(where, "missing required field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_array()) fail(where + "." + key, "expected an array");
    if (expected >= 0 && static_cast<Eigen::Index>(v.size()) != expected) {
        fail(where + "." + key, "expected " + std::to_string(expected) + " entries, got " +
                                    std::to_string(v.size()));
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number()) fail(where + "." + key + "[" + std::to_string(k) + "]",
                                    "expected a number");
        out[static_cast<Eigen::Index>(k)] = v[k].get<double>();
    }
    return out;
}

/// Scalar broadcast or full per-joint array.
Eigen::VectorXd get_scalar_or_vector(const json& j, const std::string& where,
                                     const std::string& key, Eigen::Index count,
                                     double fallback) {
    if (!j.contains(key)) return Eigen::VectorXd::Constant(count, fallback);
    const json& v = j.at(key);
    if (v.is_number()) return Eigen::VectorXd::Constant(count, v.get<double>());
    return get_vector(j, where, key, count);
}

Interval get_interval(const json& j, const std::string& where, const std::string& key,
                      Interval fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(where + "." + key, "expected [min, max]");
    }
    return Interval{v[0].get<double>(), v[1].get<double>()};
}

Eigen::Vector3d get_role_triple(const json& j, const std::string& where, const std::string& key,
                                const Eigen::Vector3d& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    const std::string ctx = where + "." + key;
    if (v.is_object()) {
        check_keys(v, ctx, {"hip", "thigh", "knee"});
        return Eigen::Vector3d(get_double(v, ctx, "hip"), get_double(v, ctx, "thigh"),
                               get_double(v, ctx, "knee"));
    }
    if (v.is_array() && v.size() == 3) {
        Eigen::VectorXd vec = get_vector(j, where, key, 3);
        return Eigen::Vector3d(vec[0], vec[1], vec[2]);
    }
    fail(ctx, "expected {hip, thigh, knee} or a 3-element array");
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v[k]);
    return arr;
}

}  // namespace

ThermalNetwork network_from_json(const json& j, const std::string& where) {
    check_keys(j, where, {"schema_version", "nodes", "edges", "ambient"});
    if (!j.contains("nodes") || !j.at("nodes").is_array()) {
        fail(where, "missing or non-array field 'nodes'");
    }
    if (!j.contains("edges") || !j.at("edges").is_array()) {
        fail(where, "missing or non-array field 'edges'");
    }

    std::vector<ThermalNode> nodes;
    for (size_t k = 0; k < j.at("nodes").size(); ++k) {
        const json& nj = j.at("nodes")[k];
        const std::string ctx = where + ".nodes[" + std::to_string(k) + "]";
        check_keys(nj, ctx, {"id", "kind", "capacitance", "winding_resistance", "aux_heat"});
        ThermalNode node;
        node.id = get_int(nj, ctx, "id");
        try {
            node.kind = node_kind_from_string(get_string(nj, ctx, "kind"));
        } catch (const std::invalid_argument& e) {
            fail(ctx + ".kind", e.what());
        }
        node.capacitance = get_double_or(nj, ctx, "capacitance", 0.0);
        node.winding_resistance = get_double_or(nj, ctx, "winding_resistance", 0.0);
        node.aux_heat = get_double_or(nj, ctx, "aux_heat", 0.0);
        nodes.push_back(node);
    }

    std::vector<ThermalEdge> edges;
    for (size_t k = 0; k < j.at("edges").size(); ++k) {
        const json& ej = j.at("edges")[k];
        const std::string ctx = where + ".edges[" + std::to_string(k) + "]";
        check_keys(ej, ctx, {"i", "j", "resistance"});
        edges.push_back({get_int(ej, ctx, "i"), get_int(ej, ctx, "j"),
                         get_double(ej, ctx, "resistance")});
    }

    const double ambient = get_double(j, where, "ambient");
    try {
        return ThermalNetwork(std::move(nodes), std::move(edges), ambient);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

json network_to_json(const ThermalNetwork& network) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["ambient"] = network.ambient();
    j["nodes"] = json::array();
    for (const ThermalNode& node : network.nodes()) {
        j["nodes"].push_back({{"id", node.id},
                              {"kind", to_string(node.kind)},
                              {"capacitance", node.capacitance},
                              {"winding_resistance", node.winding_resistance},
                              {"aux_heat", node.aux_heat}});
    }
    j["edges"] = json::array();
    for (const ThermalEdge& edge : network.edges()) {
        j["edges"].push_back({{"i", edge.i}, {"j", edge.j}, {"resistance", edge.resistance}});
    }
    return j;
}

RewardConfig reward_from_json(const json& j, const std::string& where) {
    check_keys(j, where,
               {"schema_version", "weights", "sigma", "h_target", "pz_target", "t_max", "clip_min",
                "clip_max", "gamma_t", "worst_case_ambient"});
    RewardConfig cfg;
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        const std::string ctx = where + ".weights";
        check_keys(w, ctx,
                   {"lin_vel_tracking", "ang_vel_tracking", "lin_vel_z", "ang_vel_xy",
                    "orientation", "joint_acc", "termination", "body_height", "foot_clearance",
                    "action_rate", "smoothness", "motor_temperature"});
        cfg.w_lin_vel_tracking = get_double_or(w, ctx, "lin_vel_tracking", cfg.w_lin_vel_tracking);
        cfg.w_ang_vel_tracking = get_double_or(w, ctx, "ang_vel_tracking", cfg.w_ang_vel_tracking);
        cfg.w_lin_vel_z = get_double_or(w, ctx, "lin_vel_z", cfg.w_lin_vel_z);
        cfg.w_ang_vel_xy = get_double_or(w, ctx, "ang_vel_xy", cfg.w_ang_vel_xy);
        cfg.w_orientation = get_double_or(w, ctx, "orientation", cfg.w_orientation);
        cfg.w_joint_acc = get_double_or(w, ctx, "joint_acc", cfg.w_joint_acc);
        cfg.w_termination = get_double_or(w, ctx, "termination", cfg.w_termination);
        cfg.w_body_height = get_double_or(w, ctx, "body_height", cfg.w_body_height);
        cfg.w_foot_clearance = get_double_or(w, ctx, "foot_clearance", cfg.w_foot_clearance);
        cfg.w_action_rate = get_double_or(w, ctx, "action_rate", cfg.w_action_rate);
        cfg.w_smoothness = get_double_or(w, ctx, "smoothness", cfg.w_smoothness);
        cfg.w_motor_temperature = get_double_or(w, ctx, "motor_temperature",
                                                cfg.w_motor_temperature);
    }
    cfg.sigma = get_double_or(j, where, "sigma", cfg.sigma);
    cfg.h_target = get_double_or(j, where, "h_target", cfg.h_target);
    cfg.pz_target = get_double_or(j, where, "pz_target", cfg.pz_target);
    cfg.t_max = get_double_or(j, where, "t_max", cfg.t_max);
    cfg.clip_min = get_double_or(j, where, "clip_min", cfg.clip_min);
    cfg.clip_max = get_double_or(j, where, "clip_max", cfg.clip_max);
    cfg.gamma_t = get_double_or(j, where, "gamma_t", cfg.gamma_t);
    cfg.worst_case_ambient = get_double_or(j, where, "worst_case_ambient", cfg.worst_case_ambient);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return cfg;
}

json reward_to_json(const RewardConfig& cfg) {
    return json{{"weights",
                 {{"lin_vel_tracking", cfg.w_lin_vel_tracking},
                  {"ang_vel_tracking", cfg.w_ang_vel_tracking},
                  {"lin_vel_z", cfg.w_lin_vel_z},
                  {"ang_vel_xy", cfg.w_ang_vel_xy},
                  {"orientation", cfg.w_orientation},
                  {"joint_acc", cfg.w_joint_acc},
                  {"termination", cfg.w_termination},
                  {"body_height", cfg.w_body_height},
                  {"foot_clearance", cfg.w_foot_clearance},
                  {"action_rate", cfg.w_action_rate},
                  {"smoothness", cfg.w_smoothness},
                  {"motor_temperature", cfg.w_motor_temperature}}},
                {"sigma", cfg.sigma},
                {"h_target", cfg.h_target},
                {"pz_target", cfg.pz_target},
                {"t_max", cfg.t_max},
                {"clip_min", cfg.clip_min},
                {"clip_max", cfg.clip_max},
                {"gamma_t", cfg.gamma_t},
                {"worst_case_ambient", cfg.worst_case_ambient}};
}

ActuationParams actuation_from_json(const json& j, const std::string& where, int joint_count) {
    check_keys(j, where, {"kp", "kd", "torque_limit", "nominal_angles", "heat_coeff"});
    const ActuationParams defaults = placeholder_actuation();
    ActuationParams params;
    params.kp = get_scalar_or_vector(j, where, "kp", joint_count, defaults.kp[0]);
    params.kd = get_scalar_or_vector(j, where, "kd", joint_count, defaults.kd[0]);
    params.torque_limit =
        get_scalar_or_vector(j, where, "torque_limit", joint_count, defaults.torque_limit[0]);
    if (j.contains("nominal_angles")) {
        params.nominal_angles = get_vector(j, where, "nominal_angles", joint_count);
    } else {
        params.nominal_angles = joint_count == defaults.nominal_angles.size()
                                    ? defaults.nominal_angles
                                    : Eigen::VectorXd::Zero(joint_count);
    }
    params.heat_coeff =
        get_scalar_or_vector(j, where, "heat_coeff", joint_count, defaults.heat_coeff[0]);
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return params;
}

GaitParams gait_from_json(const json& j, const std::string& where) {
    check_keys(j, where,
               {"step_frequency", "duty_factor", "base_torque_amplitude", "payload_mass",
                "payload_torque_gain", "command_speed"});
    GaitParams gait;
    gait.step_frequency = get_double_or(j, where, "step_frequency", gait.step_frequency);
    gait.duty_factor = get_double_or(j, where, "duty_factor", gait.duty_factor);
    gait.base_torque_amplitude =
        get_role_triple(j, where, "base_torque_amplitude", gait.base_torque_amplitude);
    gait.payload_mass = get_double_or(j, where, "payload_mass", gait.payload_mass);
    gait.payload_torque_gain =
        get_role_triple(j, where, "payload_torque_gain", gait.payload_torque_gain);
    gait.command_speed = get_double_or(j, where, "command_speed", gait.command_speed);
    try {
        gait.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return gait;
}

RandomizationRanges ranges_from_json(const json& j, const std::string& where) {
    check_keys(j, where,
               {"schema_version", "payload_mass", "com_displacement", "external_force",
                "ground_friction", "init_joint_scale", "system_delay_steps",
                "motor_strength_scale", "init_motor_temp", "ambient_temp", "policy_dt",
                "motor_count", "init_temp_mode", "init_temp_peak"});
    RandomizationRanges ranges;
    ranges.payload_mass = get_interval(j, where, "payload_mass", ranges.payload_mass);
    ranges.com_displacement = get_interval(j, where, "com_displacement", ranges.com_displacement);
    ranges.external_force = get_interval(j, where, "external_force", ranges.external_force);
    ranges.ground_friction = get_interval(j, where, "ground_friction", ranges.ground_friction);
    ranges.init_joint_scale = get_interval(j, where, "init_joint_scale", ranges.init_joint_scale);
    ranges.system_delay_steps =
        get_interval(j, where, "system_delay_steps", ranges.system_delay_steps);
    ranges.motor_strength_scale =
        get_interval(j, where, "motor_strength_scale", ranges.motor_strength_scale);
    ranges.init_motor_temp = get_interval(j, where, "init_motor_temp", ranges.init_motor_temp);
    ranges.ambient_temp = get_interval(j, where, "ambient_temp", ranges.ambient_temp);
    ranges.policy_dt = get_double_or(j, where, "policy_dt", ranges.policy_dt);
    if (j.contains("motor_count")) ranges.motor_count = get_int(j, where, "motor_count");
    if (j.contains("init_temp_mode")) {
        try {
            ranges.init_temp_mode =
                init_temp_mode_from_string(get_string(j, where, "init_temp_mode"));
        } catch (const std::invalid_argument& e) {
            fail(where + ".init_temp_mode", e.what());
        }
    }
    ranges.init_temp_peak = get_double_or(j, where, "init_temp_peak", ranges.init_temp_peak);
    try {
        ranges.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return ranges;
}

json sampled_episode_to_json(const SampledEpisodeConfig& sampled) {
    return json{{"seed", sampled.seed},
                {"payload_mass", sampled.payload_mass},
                {"com_displacement", vector_to_json(sampled.com_displacement)},
                {"external_force", vector_to_json(sampled.external_force)},
                {"ground_friction", sampled.ground_friction},
                {"init_joint_scale", sampled.init_joint_scale},
                {"system_delay_s", sampled.system_delay_s},
                {"motor_strength_scale", sampled.motor_strength_scale},
                {"init_motor_temp", vector_to_json(sampled.init_motor_temp)},
                {"ambient_temp", sampled.ambient_temp}};
}

RobotSnapshot snapshot_from_json(const json& j, const std::string& where) {
    check_keys(j, where,
               {"schema_version", "cmd_lin_vel", "cmd_yaw_rate", "lin_vel", "ang_vel", "gravity",
                "joint_pos", "joint_vel", "joint_acc", "temperatures", "temp_rate", "action",
                "prev_action", "prev_prev_action", "base_height", "foot_heights", "foot_xy_speed",
                "external_force", "terminated"});
    RobotSnapshot snap;
    auto fill3 = [&](const char* key, Eigen::Vector3d& target) {
        if (j.contains(key)) target = get_vector(j, where, key, 3);
    };
    fill3("cmd_lin_vel", snap.cmd_lin_vel);
    snap.cmd_yaw_rate = get_double_or(j, where, "cmd_yaw_rate", snap.cmd_yaw_rate);
    fill3("lin_vel", snap.lin_vel);
    fill3("ang_vel", snap.ang_vel);
    fill3("gravity", snap.gravity);
    fill3("external_force", snap.external_force);
    for (auto [key, target] :
         std::initializer_list<std::pair<const char*, Eigen::VectorXd*>>{
             {"joint_pos", &snap.joint_pos},
             {"joint_vel", &snap.joint_vel},
             {"joint_acc", &snap.joint_acc},
             {"temperatures", &snap.temperatures},
             {"temp_rate", &snap.temp_rate},
             {"action", &snap.action},
             {"prev_action", &snap.prev_action},
             {"prev_prev_action", &snap.prev_prev_action}}) {
        if (j.contains(key)) *target = get_vector(j, where, key, 12);
    }
    snap.base_height = get_double_or(j, where, "base_height", snap.base_height);
    if (j.contains("foot_heights")) {
        snap.foot_heights = get_vector(j, where, "foot_heights", 4);
    }
    if (j.contains("foot_xy_speed")) {
        snap.foot_xy_speed = get_vector(j, where, "foot_xy_speed", 4);
    }
    snap.terminated = get_bool_or(j, where, "terminated", snap.terminated);
    try {
        snap.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return snap;
}

PiecewiseConstantSchedule schedule_from_json(const json& j, const std::string& where,
                                             int node_count, int env_index) {
    check_keys(j, where, {"schema_version", "entries"});
    if (!j.contains("entries") || !j.at("entries").is_array() || j.at("entries").empty()) {
        fail(where, "missing or empty 'entries' array");
    }
    std::vector<PiecewiseConstantSchedule::Entry> entries;
    for (size_t k = 0; k < j.at("entries").size(); ++k) {
        const json& ej = j.at("entries")[k];
        const std::string ctx = where + ".entries[" + std::to_string(k) + "]";
        check_keys(ej, ctx, {"t", "watts"});
        PiecewiseConstantSchedule::Entry entry;
        entry.t = get_double(ej, ctx, "t");
        entry.watts = get_vector(ej, ctx, "watts", node_count);
        if (entry.watts[env_index] != 0.0) {
            fail(ctx + ".watts", "environment entry (index " + std::to_string(env_index) +
                                     ") must be zero");
        }
        if (!entry.watts.allFinite()) fail(ctx + ".watts", "entries must be finite");
        entries.push_back(std::move(entry));
    }
    if (entries.front().t != 0.0) fail(where + ".entries[0]", "first entry must start at t = 0");
    try {
        return PiecewiseConstantSchedule(std::move(entries));
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    const std::string where = "scenario";
    check_keys(j, where,
               {"schema_version", "network", "gait", "actuation", "controller", "horizon", "h",
                "window_samples", "reward", "randomization"});
    if (!j.contains("network")) fail(where, "missing required field 'network'");

    const json& nj = j.at("network");
    std::optional<ThermalNetwork> network;
    if (nj.is_string()) {
        const auto network_path = base_dir / nj.get<std::string>();
        network = load_network(network_path);
    } else if (nj.is_object()) {
        json inline_net = nj;
        if (!inline_net.contains("schema_version")) inline_net["schema_version"] = kSchemaVersion;
        check_schema_version(inline_net, where + ".network");
        network = network_from_json(inline_net, where + ".network");
    } else {
        fail(where + ".network", "expected a file path or an inline network object");
    }

    Scenario scenario(std::move(*network));
    if (j.contains("gait")) scenario.gait = gait_from_json(j.at("gait"), where + ".gait");
    if (j.contains("actuation")) {
        scenario.actuation = actuation_from_json(j.at("actuation"), where + ".actuation",
                                                 scenario.network.motor_count());
    } else if (scenario.network.motor_count() != scenario.actuation.joint_count()) {
        scenario.actuation =
            actuation_from_json(json::object(), where, scenario.network.motor_count());
    }
    if (j.contains("controller")) {
        try {
            scenario.controller = controller_from_string(get_string(j, where, "controller"));
        } catch (const std::invalid_argument& e) {
            fail(where + ".controller", e.what());
        }
    }
    scenario.horizon = get_double_or(j, where, "horizon", scenario.horizon);
    scenario.h = get_double_or(j, where, "h", scenario.h);
    if (j.contains("window_samples")) scenario.window_samples = get_int(j, where, "window_samples");
    if (scenario.window_samples < 1) fail(where + ".window_samples", "must be >= 1");
    if (!(scenario.horizon > 0.0)) fail(where + ".horizon", "must be > 0");
    if (!(scenario.h > 0.0)) fail(where + ".h", "must be > 0");
    if (j.contains("reward")) scenario.reward = reward_from_json(j.at("reward"), where + ".reward");
    if (j.contains("randomization")) {
        scenario.randomization =
            ranges_from_json(j.at("randomization"), where + ".randomization");
        if (scenario.randomization->motor_count != scenario.network.motor_count()) {
            fail(where + ".randomization.motor_count",
                 "does not match the network's motor count");
        }
    }

    // The barrier weight must be feasible for this network: with an
    // infeasible gamma_t even the zero-input hot state violates the
    // constraint, so reject the combination outright.
    const double gamma_star = solve_gamma_bound(scenario.network, scenario.reward);
    if (scenario.reward.gamma_t > gamma_star) {
        fail(where + ".reward.gamma_t",
             "value " + detail::format_double(scenario.reward.gamma_t) +
                 " exceeds the feasible bound " + detail::format_double(gamma_star) +
                 " for this network");
    }
    return scenario;
}

json load_config_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + ": malformed JSON");
    if (!j.is_object()) throw ConfigError(path.string() + ": expected a top-level JSON object");
    check_schema_version(j, path.string());
    return j;
}

ThermalNetwork load_network(const std::filesystem::path& path) {
    return network_from_json(load_config_json(path), path.string());
}

RewardConfig load_reward_config(const std::filesystem::path& path) {
    return reward_from_json(load_config_json(path), path.string());
}

RandomizationRanges load_ranges(const std::filesystem::path& path) {
    return ranges_from_json(load_config_json(path), path.string());
}

RobotSnapshot load_snapshot(const std::filesystem::path& path) {
    return snapshot_from_json(load_config_json(path), path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
    try {
        return scenario_from_json(load_config_json(path), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

PiecewiseConstantSchedule load_schedule(const std::filesystem::path& path,
                                        const ThermalNetwork& network) {
    return schedule_from_json(load_config_json(path), path.string(), network.node_count(),
                              network.environment_index());
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
    const json j = load_config_json(path);
    const std::string where = path.string();
    check_keys(j, where, {"schema_version", "base", "variations", "seeds", "jobs"});
    if (!j.contains("base")) fail(where, "missing required field 'base'");

    SweepConfig sweep;
    const json& base = j.at("base");
    if (base.is_string()) {
        const auto base_path = path.parent_path() / base.get<std::string>();
        sweep.base_scenario = load_config_json(base_path);
        sweep.base_dir = base_path.parent_path();
    } else if (base.is_object()) {
        sweep.base_scenario = base;
        if (!sweep.base_scenario.contains("schema_version")) {
            sweep.base_scenario["schema_version"] = kSchemaVersion;
        }
        sweep.base_dir = path.parent_path();
    } else {
        fail(where + ".base", "expected a scenario path or inline scenario object");
    }

    if (!j.contains("variations") || !j.at("variations").is_array() ||
        j.at("variations").empty()) {
        fail(where, "missing or empty 'variations' array");
    }
    for (size_t k = 0; k < j.at("variations").size(); ++k) {
        const json& vj = j.at("variations")[k];
        const std::string ctx = where + ".variations[" + std::to_string(k) + "]";
        check_keys(vj, ctx, {"label", "patch"});
        std::string label = vj.contains("label") ? get_string(vj, ctx, "label")
                                                 : "var" + std::to_string(k);
        json patch = vj.contains("patch") ? vj.at("patch") : json::object();
        if (!patch.is_object()) fail(ctx + ".patch", "expected an object");
        sweep.variations.emplace_back(std::move(label), std::move(patch));
    }

    if (j.contains("seeds")) {
        const json& sj = j.at("seeds");
        if (!sj.is_array() || sj.empty()) fail(where + ".seeds", "expected a nonempty array");
        for (size_t k = 0; k < sj.size(); ++k) {
            if (!sj[k].is_number_unsigned() && !sj[k].is_number_integer()) {
                fail(where + ".seeds[" + std::to_string(k) + "]", "expected an integer");
            }
            const auto value = sj[k].get<std::int64_t>();
            if (value < 0) fail(where + ".seeds[" + std::to_string(k) + "]", "must be >= 0");
            sweep.seeds.push_back(static_cast<std::uint64_t>(value));
        }
    } else {
        sweep.seeds = {0};
    }
    if (j.contains("jobs")) sweep.jobs = get_int(j, where, "jobs");
    if (sweep.jobs < 0) fail(where + ".jobs", "must be >= 0");
    return sweep;
}

std::vector<SweepVariation> materialize_sweep(const SweepConfig& sweep) {
    std::vector<SweepVariation> variations;
    variations.reserve(sweep.variations.size());
    for (const auto& [label, patch] : sweep.variations) {
        json merged = sweep.base_scenario;
        merged.merge_patch(patch);
        try {
            variations.push_back({label, scenario_from_json(merged, sweep.base_dir)});
        } catch (const ConfigError& e) {
            throw ConfigError("variation '" + label + "': " + e.what());
        }
    }
    return variations;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("failed to move " + tmp.string() + " into place: " + ec.message());
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string digest_string(std::string_view bytes) {
    static const char* hex = "0123456789abcdef";
    const std::uint64_t hash = fnv1a64(bytes);
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) {
        out += hex[(hash >> shift) & 0xF];
    }
    return out;
}

json manifest_to_json(const RunManifest& manifest) {
    json j{{"schema_version", kSchemaVersion},
           {"tool", "quadtherm"},
           {"version", QUADTHERM_VERSION},
           {"command", manifest.command},
           {"config_digest", manifest.config_digest},
           {"outputs", manifest.outputs},
           {"duration_ms", manifest.duration_ms}};
    if (manifest.seed) j["seed"] = *manifest.seed;
    return j;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    atomic_write(path, manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace quadtherm
