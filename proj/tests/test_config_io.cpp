#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "quadtherm/config_io.hpp"

using namespace quadtherm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("quadtherm_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
    fs::path file(const std::string& name, const std::string& contents) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << contents;
        return p;
    }
};

}  // namespace

TEST_CASE("network json round-trips through the parser") {
    const ThermalNetwork net = placeholder_network();
    const json j = network_to_json(net);
    const ThermalNetwork parsed = network_from_json(j, "roundtrip");
    CHECK(parsed.node_count() == net.node_count());
    CHECK(parsed.ambient() == net.ambient());
    CHECK(parsed.edges().size() == net.edges().size());
    for (int m = 0; m < 12; ++m) {
        CHECK(parsed.nodes()[static_cast<size_t>(m)].capacitance ==
              net.nodes()[static_cast<size_t>(m)].capacitance);
    }
}

TEST_CASE("loaders reject unknown keys, bad schema versions and malformed JSON") {
    TempDir dir;

    const auto unknown = dir.file("bad_key.json", R"({
        "schema_version": 1, "ambient": 25.0, "nodez": [], "edges": []
    })");
    CHECK_THROWS_WITH_AS((void)load_network(unknown), doctest::Contains("nodez"), ConfigError);

    const auto version = dir.file("bad_version.json", R"({
        "schema_version": 2, "ambient": 25.0, "nodes": [], "edges": []
    })");
    CHECK_THROWS_WITH_AS((void)load_network(version), doctest::Contains("schema_version"),
                         ConfigError);

    const auto missing_version = dir.file("no_version.json", R"({
        "ambient": 25.0, "nodes": [], "edges": []
    })");
    CHECK_THROWS_AS((void)load_network(missing_version), ConfigError);

    const auto malformed = dir.file("broken.json", "{ this is not json");
    CHECK_THROWS_WITH_AS((void)load_network(malformed), doctest::Contains("malformed"),
                         ConfigError);

    CHECK_THROWS_AS((void)load_network(dir.path / "missing.json"), ConfigError);
}

TEST_CASE("network file errors name the field") {
    TempDir dir;
    const auto bad_edge = dir.file("edge.json", R"({
        "schema_version": 1, "ambient": 25.0,
        "nodes": [
            {"id": 0, "kind": "motor", "capacitance": 1.0, "winding_resistance": 0.1, "aux_heat": 0.0},
            {"id": 1, "kind": "environment", "capacitance": 0.0, "winding_resistance": 0.0, "aux_heat": 0.0}
        ],
        "edges": [{"i": 0, "j": 1, "resistance": -1.0}]
    })");
    CHECK_THROWS_WITH_AS((void)load_network(bad_edge), doctest::Contains("edge (0,1)"),
                         ConfigError);

    const auto bad_kind = dir.file("kind.json", R"({
        "schema_version": 1, "ambient": 25.0,
        "nodes": [{"id": 0, "kind": "reactor", "capacitance": 1.0}],
        "edges": []
    })");
    CHECK_THROWS_WITH_AS((void)load_network(bad_kind), doctest::Contains("kind"), ConfigError);
}

TEST_CASE("reward config parses partial overrides and validates") {
    const RewardConfig cfg = reward_from_json(
        json{{"gamma_t", 0.2}, {"weights", {{"motor_temperature", 3.0}}}}, "cfg");
    CHECK(cfg.gamma_t == 0.2);
    CHECK(cfg.w_motor_temperature == 3.0);
    CHECK(cfg.sigma == 0.25);  // untouched default

    CHECK_THROWS_AS((void)reward_from_json(json{{"clip_min", 62.0}}, "cfg"), ConfigError);
    CHECK_THROWS_AS((void)reward_from_json(json{{"spelling", 1.0}}, "cfg"), ConfigError);
}

TEST_CASE("scenario loading resolves the network path and checks gamma feasibility") {
    TempDir dir;
    dir.file("net.json", network_to_json(placeholder_network()).dump());
    const auto scenario_path = dir.file("scenario.json", R"({
        "schema_version": 1,
        "network": "net.json",
        "gait": {"payload_mass": 1.0},
        "controller": "throttled",
        "horizon": 10.0,
        "h": 0.02
    })");
    const Scenario scenario = load_scenario(scenario_path);
    CHECK(scenario.network.node_count() == 14);
    CHECK(scenario.controller == ControllerKind::Throttled);
    CHECK(scenario.gait.payload_mass == 1.0);
    CHECK(scenario.horizon == 10.0);

    // gamma_t above the feasible bound (0.5 for the placeholder) is rejected.
    const auto infeasible = dir.file("infeasible.json", R"({
        "schema_version": 1,
        "network": "net.json",
        "reward": {"gamma_t": 0.6}
    })");
    CHECK_THROWS_WITH_AS((void)load_scenario(infeasible), doctest::Contains("feasible bound"),
                         ConfigError);
}

TEST_CASE("snapshot defaults fill unspecified fields") {
    const RobotSnapshot snap = snapshot_from_json(
        json{{"temperatures", json::array({61, 40, 40, 40, 40, 40, 40, 40, 40, 40, 40, 40})},
             {"temp_rate", json::array({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})}},
        "snap");
    CHECK(snap.temperatures[0] == 61.0);
    CHECK(snap.gravity.z() == -1.0);
    CHECK_FALSE(snap.terminated);

    CHECK_THROWS_AS((void)snapshot_from_json(json{{"temperatures", json::array({1.0, 2.0})}},
                                             "snap"),
                    ConfigError);
}

TEST_CASE("schedule validation pins t=0, ordering and the environment entry") {
    const ThermalNetwork net = ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                               {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                              {{0, 1, 1.0}}, 25.0);
    const json good{{"entries", json::array({json{{"t", 0.0}, {"watts", {1.0, 0.0}}},
                                             json{{"t", 5.0}, {"watts", {2.0, 0.0}}}})}};
    const PiecewiseConstantSchedule schedule = schedule_from_json(good, "sched", 2, 1);
    CHECK(schedule.value_at(0.0).watts[0] == 1.0);
    CHECK(schedule.value_at(4.999).watts[0] == 1.0);
    CHECK(schedule.value_at(5.0).watts[0] == 2.0);
    CHECK(schedule.value_at(100.0).watts[0] == 2.0);

    const json env_heat{{"entries", json::array({json{{"t", 0.0}, {"watts", {1.0, 3.0}}}})}};
    CHECK_THROWS_WITH_AS((void)schedule_from_json(env_heat, "sched", 2, 1),
                         doctest::Contains("environment"), ConfigError);

    const json late_start{{"entries", json::array({json{{"t", 1.0}, {"watts", {1.0, 0.0}}}})}};
    CHECK_THROWS_AS((void)schedule_from_json(late_start, "sched", 2, 1), ConfigError);

    const json unsorted{{"entries", json::array({json{{"t", 0.0}, {"watts", {1.0, 0.0}}},
                                                 json{{"t", 0.0}, {"watts", {2.0, 0.0}}}})}};
    CHECK_THROWS_AS((void)schedule_from_json(unsorted, "sched", 2, 1), ConfigError);
}

TEST_CASE("sweep config merges patches onto the base scenario") {
    TempDir dir;
    dir.file("net.json", network_to_json(placeholder_network()).dump());
    dir.file("base.json", R"({
        "schema_version": 1,
        "network": "net.json",
        "gait": {"payload_mass": 1.0},
        "horizon": 10.0
    })");
    const auto sweep_path = dir.file("sweep.json", R"({
        "schema_version": 1,
        "base": "base.json",
        "variations": [
            {"label": "light", "patch": {"gait": {"payload_mass": 0.0}}},
            {"label": "heavy", "patch": {"gait": {"payload_mass": 4.0}, "controller": "throttled"}}
        ],
        "seeds": [3, 5]
    })");
    const SweepConfig sweep = load_sweep_config(sweep_path);
    CHECK(sweep.seeds == std::vector<std::uint64_t>{3, 5});
    const std::vector<SweepVariation> variations = materialize_sweep(sweep);
    REQUIRE(variations.size() == 2);
    CHECK(variations[0].scenario.gait.payload_mass == 0.0);
    CHECK(variations[0].scenario.controller == ControllerKind::Baseline);
    CHECK(variations[1].scenario.gait.payload_mass == 4.0);
    CHECK(variations[1].scenario.controller == ControllerKind::Throttled);
    CHECK(variations[1].scenario.horizon == 10.0);  // untouched base value
}

TEST_CASE("atomic_write leaves no partial file behind and digests are stable") {
    TempDir dir;
    const fs::path target = dir.path / "out.csv";
    atomic_write(target, "a,b\n1,2\n");
    CHECK(fs::exists(target));
    CHECK_FALSE(fs::exists(dir.path / "out.csv.tmp"));

    atomic_write(target, "a,b\n3,4\n");
    std::ifstream in(target);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == "a,b\n3,4\n");

    CHECK(digest_string("hello") == digest_string("hello"));
    CHECK(digest_string("hello") != digest_string("hello!"));
    CHECK(digest_string("").rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("sampled episode exports round-trippable JSON") {
    const SampledEpisodeConfig sampled = sample_episode(RandomizationRanges{}, 77);
    const json j = sampled_episode_to_json(sampled);
    CHECK(j.at("seed").get<std::uint64_t>() == 77);
    CHECK(j.at("init_motor_temp").size() == 12);
    CHECK(j.at("payload_mass").get<double>() == sampled.payload_mass);
}
