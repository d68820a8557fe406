#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "quadtherm/config_io.hpp"
#include "quadtherm/version.hpp"

namespace py = pybind11;
using namespace quadtherm;

namespace {

py::dict endurance_summary(const EnduranceResult& result) {
    py::dict out;
    out["completed_horizon"] = result.completed_horizon;
    out["max_motor_temp"] = result.max_motor_temp;
    out["mean_thermal_penalty"] = result.mean_thermal_penalty;
    out["overheat_time"] =
        result.overheat_time ? py::cast(*result.overheat_time) : py::none();
    out["hottest_motor"] =
        result.hottest_motor ? py::cast(*result.hottest_motor) : py::none();
    out["times"] = result.trace.times;
    out["temperatures"] = result.trace.temperatures;
    out["inputs"] = result.trace.inputs;
    out["applied_rms"] = result.applied_rms;
    out["throttle"] = result.throttle_history;
    return out;
}

py::dict sampled_dict(const SampledEpisodeConfig& s) {
    py::dict out;
    out["seed"] = s.seed;
    out["payload_mass"] = s.payload_mass;
    out["com_displacement"] = s.com_displacement;
    out["external_force"] = s.external_force;
    out["ground_friction"] = s.ground_friction;
    out["init_joint_scale"] = s.init_joint_scale;
    out["system_delay_s"] = s.system_delay_s;
    out["motor_strength_scale"] = s.motor_strength_scale;
    out["init_motor_temp"] = s.init_motor_temp;
    out["ambient_temp"] = s.ambient_temp;
    return out;
}

}  // namespace

PYBIND11_MODULE(_quadtherm, m) {
    m.doc() = "Quadruped motor thermal network simulation and thermal-constraint analysis";
    m.attr("__version__") = QUADTHERM_VERSION;

    py::class_<ThermalNetwork>(m, "ThermalNetwork")
        .def_property_readonly("node_count", &ThermalNetwork::node_count)
        .def_property_readonly("motor_count", &ThermalNetwork::motor_count)
        .def_property_readonly("environment_index", &ThermalNetwork::environment_index)
        .def_property_readonly("ambient", &ThermalNetwork::ambient)
        .def_property_readonly("motor_indices", &ThermalNetwork::motor_indices)
        .def("aux_heat_vector", &ThermalNetwork::aux_heat_vector)
        .def("__repr__", [](const ThermalNetwork& net) {
            std::ostringstream out;
            out << "ThermalNetwork(nodes=" << net.node_count() << ", edges=" << net.edges().size()
                << ", ambient=" << net.ambient() << ")";
            return out.str();
        });

    py::class_<RewardConfig>(m, "RewardConfig")
        .def(py::init<>())
        .def_readwrite("sigma", &RewardConfig::sigma)
        .def_readwrite("h_target", &RewardConfig::h_target)
        .def_readwrite("pz_target", &RewardConfig::pz_target)
        .def_readwrite("t_max", &RewardConfig::t_max)
        .def_readwrite("clip_min", &RewardConfig::clip_min)
        .def_readwrite("clip_max", &RewardConfig::clip_max)
        .def_readwrite("gamma_t", &RewardConfig::gamma_t)
        .def_readwrite("worst_case_ambient", &RewardConfig::worst_case_ambient);

    py::class_<RobotSnapshot>(m, "RobotSnapshot")
        .def(py::init<>())
        .def_readwrite("cmd_lin_vel", &RobotSnapshot::cmd_lin_vel)
        .def_readwrite("cmd_yaw_rate", &RobotSnapshot::cmd_yaw_rate)
        .def_readwrite("lin_vel", &RobotSnapshot::lin_vel)
        .def_readwrite("ang_vel", &RobotSnapshot::ang_vel)
        .def_readwrite("gravity", &RobotSnapshot::gravity)
        .def_readwrite("joint_pos", &RobotSnapshot::joint_pos)
        .def_readwrite("joint_vel", &RobotSnapshot::joint_vel)
        .def_readwrite("joint_acc", &RobotSnapshot::joint_acc)
        .def_readwrite("temperatures", &RobotSnapshot::temperatures)
        .def_readwrite("temp_rate", &RobotSnapshot::temp_rate)
        .def_readwrite("action", &RobotSnapshot::action)
        .def_readwrite("prev_action", &RobotSnapshot::prev_action)
        .def_readwrite("prev_prev_action", &RobotSnapshot::prev_prev_action)
        .def_readwrite("base_height", &RobotSnapshot::base_height)
        .def_readwrite("foot_heights", &RobotSnapshot::foot_heights)
        .def_readwrite("foot_xy_speed", &RobotSnapshot::foot_xy_speed)
        .def_readwrite("external_force", &RobotSnapshot::external_force)
        .def_readwrite("terminated", &RobotSnapshot::terminated);

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("horizon", [](const Scenario& s) { return s.horizon; })
        .def_property_readonly("h", [](const Scenario& s) { return s.h; })
        .def_property_readonly("controller",
                               [](const Scenario& s) { return to_string(s.controller); });

    m.def("placeholder_network", &placeholder_network,
          "Synthetic 14-node quadruped network used by the shipped demos");
    m.def(
        "load_network",
        [](const std::filesystem::path& path) { return load_network(path); },
        py::arg("path"));
    m.def(
        "network_from_json",
        [](const std::string& text) {
            return network_from_json(nlohmann::json::parse(text), "network");
        },
        py::arg("text"), "Parse a network from a JSON string");

    m.def("single_node_analytic", &single_node_analytic, py::arg("capacitance"),
          py::arg("resistance"), py::arg("winding_resistance"), py::arg("ambient"),
          py::arg("initial_temp"), py::arg("current"), py::arg("t"),
          "Closed-form single-motor temperature at time t");

    m.def(
        "discretize",
        [](const ThermalNetwork& net, double h, const std::string& method) {
            const SystemMatrices mat =
                discretize(build_generator(net), h, discretize_method_from_string(method));
            return py::make_tuple(mat.A, mat.B);
        },
        py::arg("network"), py::arg("h"), py::arg("method") = "exact",
        "Discrete update pair (A, B) for the network at step h");

    m.def(
        "steady_state",
        [](const ThermalNetwork& net, const Eigen::VectorXd& watts) {
            return steady_state(net, HeatInput{watts});
        },
        py::arg("network"), py::arg("watts"));

    m.def(
        "simulate",
        [](const ThermalNetwork& net, const Eigen::VectorXd& watts,
           const Eigen::VectorXd& initial_temps, double horizon, double h,
           const std::string& method) {
            const SimulationTrace trace =
                simulate(net, HeatInput{watts}, initial_temps, horizon, h,
                         discretize_method_from_string(method));
            py::dict out;
            out["times"] = trace.times;
            out["temperatures"] = trace.temperatures;
            out["inputs"] = trace.inputs;
            return out;
        },
        py::arg("network"), py::arg("watts"), py::arg("initial_temps"), py::arg("horizon"),
        py::arg("h"), py::arg("method") = "exact",
        "Integrate a constant heat input; returns times/temperatures/inputs arrays");

    m.def(
        "torque_rms",
        [](const Eigen::MatrixXd& samples) {
            return torque_rms(TorqueWindow{samples, 0.005});
        },
        py::arg("samples"), "Per-column RMS of an inner-loop torque window");
    m.def(
        "joule_heat",
        [](const Eigen::VectorXd& rms, const Eigen::VectorXd& heat_coeff) {
            ActuationParams params = placeholder_actuation();
            params.kp = Eigen::VectorXd::Zero(heat_coeff.size());
            params.kd = Eigen::VectorXd::Zero(heat_coeff.size());
            params.torque_limit = Eigen::VectorXd::Constant(heat_coeff.size(), 1.0);
            params.nominal_angles = Eigen::VectorXd::Zero(heat_coeff.size());
            params.heat_coeff = heat_coeff;
            return joule_heat(rms, params);
        },
        py::arg("rms"), py::arg("heat_coeff"));
    m.def(
        "pd_torque",
        [](const Eigen::VectorXd& target, const Eigen::VectorXd& pos, const Eigen::VectorXd& vel,
           double kp, double kd, double torque_limit) {
            ActuationParams params;
            const auto n = target.size();
            params.kp = Eigen::VectorXd::Constant(n, kp);
            params.kd = Eigen::VectorXd::Constant(n, kd);
            params.torque_limit = Eigen::VectorXd::Constant(n, torque_limit);
            params.nominal_angles = Eigen::VectorXd::Zero(n);
            params.heat_coeff = Eigen::VectorXd::Zero(n);
            return pd_torque(target, pos, vel, params);
        },
        py::arg("target"), py::arg("pos"), py::arg("vel"), py::arg("kp") = 28.0,
        py::arg("kd") = 0.7, py::arg("torque_limit") = 33.5);

    m.def(
        "clip_temperatures",
        [](const Eigen::VectorXd& temps, const RewardConfig& cfg) {
            return clip_temperatures(temps, cfg);
        },
        py::arg("temps"), py::arg("config") = RewardConfig{});
    m.def(
        "cbf_margin",
        [](const Eigen::VectorXd& temp_rate, const Eigen::VectorXd& clipped,
           const RewardConfig& cfg) { return cbf_margin(temp_rate, clipped, cfg); },
        py::arg("temp_rate"), py::arg("clipped_temps"), py::arg("config") = RewardConfig{});
    m.def(
        "thermal_reward_term",
        [](const Eigen::VectorXd& margins, const RewardConfig& cfg) {
            return thermal_reward_term(margins, cfg);
        },
        py::arg("margins"), py::arg("config") = RewardConfig{});
    m.def(
        "total_reward",
        [](const RobotSnapshot& snap, const RewardConfig& cfg) {
            const RewardBreakdown breakdown = total_reward(snap, cfg);
            py::dict terms;
            const auto& names = RewardBreakdown::term_names();
            for (int k = 0; k < RewardBreakdown::kTermCount; ++k) {
                terms[names[static_cast<size_t>(k)].c_str()] =
                    breakdown.terms[static_cast<size_t>(k)];
            }
            return py::make_tuple(breakdown.total, terms);
        },
        py::arg("snapshot"), py::arg("config") = RewardConfig{},
        "Returns (total, {term_name: weighted value})");

    m.def(
        "max_feasible_gamma",
        [](const ThermalNetwork& net, const RewardConfig& cfg, double h) {
            return solve_gamma_bound(net, cfg, h);
        },
        py::arg("network"), py::arg("config") = RewardConfig{}, py::arg("h") = kGammaSolveStep,
        "Largest thermal-barrier weight feasible at the worst hot state");

    m.def(
        "sample_episode",
        [](std::uint64_t seed) { return sampled_dict(sample_episode(RandomizationRanges{}, seed)); },
        py::arg("seed"), "Seeded episode draw with the default ranges");

    m.def(
        "load_scenario",
        [](const std::filesystem::path& path) { return load_scenario(path); }, py::arg("path"));
    m.def(
        "run_endurance",
        [](const Scenario& scenario, const std::string& controller, std::uint64_t seed) {
            Scenario run = scenario;
            if (!controller.empty()) run.controller = controller_from_string(controller);
            return endurance_summary(run_endurance(run, seed));
        },
        py::arg("scenario"), py::arg("controller") = "", py::arg("seed") = 0,
        "Run one endurance experiment; returns a summary dict with trace arrays");
    m.def(
        "time_to_threshold",
        [](const std::vector<double>& times, const Eigen::MatrixXd& temperatures,
           double threshold) -> std::optional<double> {
            SimulationTrace trace;
            trace.times = times;
            trace.temperatures = temperatures;
            trace.inputs = Eigen::MatrixXd::Zero(temperatures.rows(), temperatures.cols());
            return time_to_threshold(trace, threshold);
        },
        py::arg("times"), py::arg("temperatures"), py::arg("threshold"),
        "First interpolated crossing time, or None");

    py::register_exception<ConfigError>(m, "ConfigError");
}
