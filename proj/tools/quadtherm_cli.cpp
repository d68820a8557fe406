// Command-line front end: binds the configuration files to the library and
// emits CSV/JSON artifacts. Exit codes: 0 success, 1 runtime failure,
// 2 usage or configuration error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "quadtherm/config_io.hpp"
#include "quadtherm/detail/format.hpp"
#include "quadtherm/version.hpp"

namespace fs = std::filesystem;
using namespace quadtherm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::string read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class ManifestTimer {
public:
    ManifestTimer(std::string command, std::string digest, std::optional<std::uint64_t> seed)
        : start_(std::chrono::steady_clock::now()) {
        manifest_.command = std::move(command);
        manifest_.config_digest = std::move(digest);
        manifest_.seed = seed;
    }

    void add_output(const fs::path& path) { manifest_.outputs.push_back(path.string()); }

    void write_next_to(const fs::path& primary_output) {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_.duration_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
        write_manifest(fs::path(primary_output.string() + ".manifest.json"), manifest_);
    }

private:
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

struct SimulateArgs {
    std::string network_file;
    std::string schedule_file;
    double h = 0.02;
    double horizon = 60.0;
    std::string method = "exact";
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    const ThermalNetwork network = load_network(args.network_file);
    const PiecewiseConstantSchedule schedule = load_schedule(args.schedule_file, network);
    const DiscretizeMethod method = discretize_method_from_string(args.method);

    ManifestTimer manifest("simulate",
                           digest_string(read_file_bytes(args.network_file) +
                                         read_file_bytes(args.schedule_file)),
                           std::nullopt);

    const SimulationTrace trace = simulate(network, schedule, network.uniform_ambient(),
                                           args.horizon, args.h, method);

    std::ostringstream csv;
    trace.write_csv(csv);
    atomic_write(args.out, csv.str());
    manifest.add_output(args.out);
    manifest.write_next_to(args.out);
    std::cout << "wrote " << trace.sample_count() << " rows to " << args.out << "\n";
    return kExitOk;
}

struct EnduranceArgs {
    std::string config_file;
    std::string controller;  // empty = use the scenario's setting
    std::string out;
    std::uint64_t seed = 0;
    double horizon_override = -1.0;
    double h_override = -1.0;
};

int cmd_endurance(const EnduranceArgs& args) {
    Scenario scenario = load_scenario(args.config_file);
    if (!args.controller.empty()) scenario.controller = controller_from_string(args.controller);
    if (args.horizon_override > 0.0) scenario.horizon = args.horizon_override;
    if (args.h_override > 0.0) scenario.h = args.h_override;

    ManifestTimer manifest("endurance", digest_string(read_file_bytes(args.config_file)),
                           args.seed);

    const EnduranceResult result = run_endurance(scenario, args.seed);

    std::ostringstream csv;
    result.trace.write_csv(csv);
    atomic_write(args.out, csv.str());
    manifest.add_output(args.out);

    nlohmann::json summary{{"schema_version", kSchemaVersion},
                           {"controller", to_string(scenario.controller)},
                           {"completed_horizon", result.completed_horizon},
                           {"max_motor_temp", result.max_motor_temp},
                           {"mean_thermal_penalty", result.mean_thermal_penalty}};
    if (result.overheat_time) summary["overheat_time"] = *result.overheat_time;
    if (result.hottest_motor) summary["hottest_motor"] = *result.hottest_motor;
    const fs::path summary_path(args.out + ".summary.json");
    atomic_write(summary_path, summary.dump(2) + "\n");
    manifest.add_output(summary_path);
    manifest.write_next_to(args.out);

    if (result.overheat_time) {
        std::cout << "overheat_time: " << detail::format_double(*result.overheat_time)
                  << " s (motor " << (result.hottest_motor ? *result.hottest_motor : -1) << ")\n";
    } else {
        std::cout << "no overheat within horizon\n";
    }
    return kExitOk;
}

struct SweepArgs {
    std::string config_file;
    std::string out;
    int jobs = -1;
};

int cmd_sweep(const SweepArgs& args) {
    const SweepConfig sweep = load_sweep_config(args.config_file);
    const std::vector<SweepVariation> variations = materialize_sweep(sweep);

    ManifestTimer manifest("sweep", digest_string(read_file_bytes(args.config_file)),
                           std::nullopt);

    const int jobs = args.jobs >= 0 ? args.jobs : sweep.jobs;
    const std::vector<SweepRow> rows = run_sweep(variations, sweep.seeds, jobs);

    std::ostringstream csv;
    write_sweep_csv(rows, csv);
    atomic_write(args.out, csv.str());
    manifest.add_output(args.out);
    manifest.write_next_to(args.out);

    int failures = 0;
    for (const SweepRow& row : rows) {
        if (row.status != "ok") ++failures;
    }
    std::cout << rows.size() << " runs (" << failures << " failed) -> " << args.out << "\n";
    return kExitOk;
}

struct GammaArgs {
    std::string network_file;
    std::string reward_file;
    double h = kGammaSolveStep;
};

int cmd_gamma(const GammaArgs& args) {
    const ThermalNetwork network = load_network(args.network_file);
    const RewardConfig cfg =
        args.reward_file.empty() ? RewardConfig{} : load_reward_config(args.reward_file);
    const double gamma_star = solve_gamma_bound(network, cfg, args.h);
    nlohmann::json out{{"gamma_star", gamma_star},
                       {"gamma_t", cfg.gamma_t},
                       {"admits_gamma_t", cfg.gamma_t <= gamma_star}};
    std::cout << out.dump() << "\n";
    return kExitOk;
}

struct RewardArgs {
    std::string snapshot_file;
    std::string reward_file;
    std::string out;
};

int cmd_reward(const RewardArgs& args) {
    const RobotSnapshot snap = load_snapshot(args.snapshot_file);
    const RewardConfig cfg =
        args.reward_file.empty() ? RewardConfig{} : load_reward_config(args.reward_file);
    const RewardBreakdown breakdown = total_reward(snap, cfg);

    std::ostringstream csv;
    const auto& names = RewardBreakdown::term_names();
    for (const auto& name : names) csv << name << ',';
    csv << "total\n";
    for (double term : breakdown.terms) csv << detail::format_double(term) << ',';
    csv << detail::format_double(breakdown.total) << "\n";

    std::cout << csv.str();
    if (!args.out.empty()) {
        atomic_write(args.out, csv.str());
        ManifestTimer manifest("reward", digest_string(read_file_bytes(args.snapshot_file)),
                               std::nullopt);
        manifest.add_output(args.out);
        manifest.write_next_to(args.out);
    }
    return kExitOk;
}

struct RandomizeArgs {
    std::string ranges_file;
    std::uint64_t seed = 0;
    int count = 1;
    std::string out;
};

int cmd_randomize(const RandomizeArgs& args) {
    const RandomizationRanges ranges =
        args.ranges_file.empty() ? RandomizationRanges{} : load_ranges(args.ranges_file);
    if (args.count < 1) throw ConfigError("--count must be >= 1");

    nlohmann::json records = nlohmann::json::array();
    for (int k = 0; k < args.count; ++k) {
        records.push_back(sampled_episode_to_json(sample_episode(ranges, args.seed +
                                                                 static_cast<std::uint64_t>(k))));
    }
    nlohmann::json out{{"schema_version", kSchemaVersion}, {"records", records}};
    const std::string text = out.dump(2) + "\n";
    if (args.out.empty()) {
        std::cout << text;
    } else {
        atomic_write(args.out, text);
        ManifestTimer manifest("randomize",
                               args.ranges_file.empty() ? digest_string("")
                                                        : digest_string(read_file_bytes(args.ranges_file)),
                               args.seed);
        manifest.add_output(args.out);
        manifest.write_next_to(args.out);
        std::cout << "wrote " << args.count << " records to " << args.out << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadtherm: quadruped motor thermal simulation and analysis toolkit"};
    app.set_version_flag("--version", QUADTHERM_VERSION);
    // The step-size flag is spelled --h, so help must not claim -h.
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Integrate a heat schedule over a thermal network");
    simulate_cmd->add_option("--network", sim.network_file, "Network definition file")->required();
    simulate_cmd->add_option("--schedule", sim.schedule_file, "Piecewise-constant heat schedule")
        ->required();
    simulate_cmd->add_option("--h", sim.h, "Step size in seconds");
    simulate_cmd->add_option("--horizon", sim.horizon, "Total simulated time in seconds");
    simulate_cmd->add_option("--method", sim.method, "Discretization: exact or euler")
        ->check(CLI::IsMember({"exact", "euler"}));
    simulate_cmd->add_option("--out", sim.out, "Output trace CSV")->required();

    EnduranceArgs end;
    CLI::App* endurance_cmd =
        app.add_subcommand("endurance", "Run one baseline or throttled endurance experiment");
    endurance_cmd->add_option("--config", end.config_file, "Scenario file")->required();
    endurance_cmd->add_option("--controller", end.controller, "baseline or throttled")
        ->check(CLI::IsMember({"baseline", "throttled"}));
    endurance_cmd->add_option("--out", end.out, "Output trace CSV")->required();
    endurance_cmd->add_option("--seed", end.seed, "Episode randomization seed");
    endurance_cmd->add_option("--horizon", end.horizon_override, "Override the scenario horizon");
    endurance_cmd->add_option("--h", end.h_override, "Override the scenario step size");

    SweepArgs swp;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a batch of scenario variations");
    sweep_cmd->add_option("--config", swp.config_file, "Sweep file")->required();
    sweep_cmd->add_option("--out", swp.out, "Output summary CSV")->required();
    sweep_cmd->add_option("--jobs", swp.jobs, "Worker threads (0 = hardware concurrency)");

    GammaArgs gam;
    CLI::App* gamma_cmd =
        app.add_subcommand("gamma", "Solve the feasible thermal-barrier weight bound");
    gamma_cmd->add_option("--network", gam.network_file, "Network definition file")->required();
    gamma_cmd->add_option("--reward", gam.reward_file, "Reward parameter file");
    gamma_cmd->add_option("--h", gam.h, "Discretization step for the bound");

    RewardArgs rew;
    CLI::App* reward_cmd = app.add_subcommand("reward", "Evaluate the reward suite on a snapshot");
    reward_cmd->add_option("--snapshot", rew.snapshot_file, "Robot snapshot file")->required();
    reward_cmd->add_option("--reward", rew.reward_file, "Reward parameter file");
    reward_cmd->add_option("--out", rew.out, "Optional breakdown CSV");

    RandomizeArgs rnd;
    CLI::App* randomize_cmd =
        app.add_subcommand("randomize", "Draw seeded episode configurations");
    randomize_cmd->add_option("--ranges", rnd.ranges_file, "Randomization ranges file");
    randomize_cmd->add_option("--seed", rnd.seed, "Base seed");
    randomize_cmd->add_option("--count", rnd.count, "Number of records");
    randomize_cmd->add_option("--out", rnd.out, "Optional output JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(sim);
        if (endurance_cmd->parsed()) return cmd_endurance(end);
        if (sweep_cmd->parsed()) return cmd_sweep(swp);
        if (gamma_cmd->parsed()) return cmd_gamma(gam);
        if (reward_cmd->parsed()) return cmd_reward(rew);
        if (randomize_cmd->parsed()) return cmd_randomize(rnd);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
