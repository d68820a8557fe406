// End-to-end checks of the installed command-line surface. The binary path
// and the shipped data directory arrive through environment variables set by
// CTest.

#include <doctest.h>

#include <json.hpp>

#include "quadtherm/config_io.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_command(const std::string& command) {
    RunResult result;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer{};
    while (::fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
        result.output += buffer.data();
    }
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string cli_path() {
    const char* env = std::getenv("QUADTHERM_CLI_BIN");
    REQUIRE_MESSAGE(env != nullptr, "QUADTHERM_CLI_BIN must point at the CLI binary");
    return env;
}

std::string data_dir() {
    const char* env = std::getenv("QUADTHERM_DATA_DIR");
    REQUIRE_MESSAGE(env != nullptr, "QUADTHERM_DATA_DIR must point at the data directory");
    return env;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("quadtherm_cli_" + std::to_string(::getpid()) + "_" +
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
};

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

}  // namespace

TEST_CASE("simulate: row-count contract, manifest, determinism") {
    TempDir dir;
    const std::string network = data_dir() + "/placeholder_network.json";
    const std::string schedule = data_dir() + "/example_schedule.json";
    const fs::path out = dir.path / "trace.csv";

    const std::string command = cli_path() + " simulate --network " + network + " --schedule " +
                                schedule + " --h 0.02 --horizon 1 --out " + out.string();
    const RunResult first = run_command(command);
    CHECK(first.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(count_lines(csv) == 52);  // header + horizon/h + 1 rows
    CHECK(csv.rfind("t,T_0,", 0) == 0);
    CHECK(fs::exists(out.string() + ".manifest.json"));

    const RunResult second = run_command(command);
    CHECK(second.exit_code == 0);
    CHECK(slurp(out) == csv);
}

TEST_CASE("simulate: minimal two-node config") {
    TempDir dir;
    const fs::path net = dir.path / "net.json";
    std::ofstream(net) << R"({
        "schema_version": 1, "ambient": 20.0,
        "nodes": [
            {"id": 0, "kind": "motor", "capacitance": 0.5, "winding_resistance": 0.1, "aux_heat": 0.0},
            {"id": 1, "kind": "environment", "capacitance": 0.0, "winding_resistance": 0.0, "aux_heat": 0.0}
        ],
        "edges": [{"i": 0, "j": 1, "resistance": 2.0}]
    })";
    const fs::path schedule = dir.path / "schedule.json";
    std::ofstream(schedule) << R"({
        "schema_version": 1,
        "entries": [{"t": 0.0, "watts": [1.5, 0.0]}]
    })";
    const fs::path out = dir.path / "trace.csv";
    const RunResult result =
        run_command(cli_path() + " simulate --network " + net.string() + " --schedule " +
                    schedule.string() + " --h 0.5 --horizon 10 --out " + out.string());
    CHECK(result.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(count_lines(csv) == 22);  // header + 10/0.5 + 1 rows
    CHECK(csv.rfind("t,T_0,T_1,Q_0,Q_1\n", 0) == 0);
}

TEST_CASE("shipped placeholder network file matches the built-in definition") {
    const nlohmann::json shipped =
        nlohmann::json::parse(slurp(fs::path(data_dir()) / "placeholder_network.json"));
    CHECK(shipped == quadtherm::network_to_json(quadtherm::placeholder_network()));
}

TEST_CASE("simulate: malformed config exits 2 and writes nothing") {
    TempDir dir;
    const fs::path bad = dir.path / "bad.json";
    std::ofstream(bad) << "{ nope";
    const fs::path out = dir.path / "trace.csv";

    const RunResult result =
        run_command(cli_path() + " simulate --network " + bad.string() + " --schedule " +
                    bad.string() + " --h 0.02 --horizon 1 --out " + out.string());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("malformed") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("endurance: baseline overheats, throttled does not") {
    TempDir dir;
    const std::string scenario = data_dir() + "/demo_scenario.json";

    const fs::path base_out = dir.path / "baseline.csv";
    const RunResult baseline =
        run_command(cli_path() + " endurance --config " + scenario +
                    " --controller baseline --out " + base_out.string());
    CHECK(baseline.exit_code == 0);
    CHECK(baseline.output.find("overheat_time:") != std::string::npos);

    const fs::path thr_out = dir.path / "throttled.csv";
    const RunResult throttled =
        run_command(cli_path() + " endurance --config " + scenario +
                    " --controller throttled --out " + thr_out.string());
    CHECK(throttled.exit_code == 0);
    CHECK(throttled.output.find("no overheat within horizon") != std::string::npos);
    CHECK(fs::exists(thr_out.string() + ".summary.json"));
}

TEST_CASE("endurance: bogus controller is a usage error") {
    const RunResult result = run_command(cli_path() + " endurance --config x.json " +
                                         "--controller bogus --out y.csv");
    CHECK(result.exit_code == 2);
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
    CHECK(run_command(cli_path() + " gamma --network x.json --frobnicate").exit_code == 2);
    CHECK(run_command(cli_path()).exit_code == 2);
    CHECK(run_command(cli_path() + " --help").exit_code == 0);
    CHECK(run_command(cli_path() + " simulate --help").exit_code == 0);
}

TEST_CASE("gamma: placeholder bound admits the default gamma_t") {
    const RunResult result =
        run_command(cli_path() + " gamma --network " + data_dir() + "/placeholder_network.json");
    CHECK(result.exit_code == 0);
    const nlohmann::json parsed = nlohmann::json::parse(result.output);
    CHECK(parsed.at("gamma_star").get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(parsed.at("admits_gamma_t").get<bool>());
    CHECK(parsed.at("gamma_t").get<double>() == 0.35);
}

TEST_CASE("reward: breakdown CSV on the example snapshot") {
    const RunResult result =
        run_command(cli_path() + " reward --snapshot " + data_dir() + "/example_snapshot.json");
    CHECK(result.exit_code == 0);
    CHECK(result.output.rfind("lin_vel_tracking,", 0) == 0);
    CHECK(result.output.find("motor_temperature,total") != std::string::npos);
    CHECK(count_lines(result.output) == 2);
}

TEST_CASE("randomize: seeded records land in range and reproduce") {
    TempDir dir;
    const std::string ranges = data_dir() + "/default_ranges.json";
    const std::string command = cli_path() + " randomize --ranges " + ranges +
                                " --seed 11 --count 3";
    const RunResult first = run_command(command);
    CHECK(first.exit_code == 0);
    const RunResult second = run_command(command);
    CHECK(second.output == first.output);
    CHECK(first.output.find("\"records\"") != std::string::npos);

    const fs::path out = dir.path / "records.json";
    CHECK(run_command(command + " --out " + out.string()).exit_code == 0);
    CHECK(fs::exists(out));
}

TEST_CASE("sweep: demo file produces one ordered row per run") {
    TempDir dir;
    const fs::path out = dir.path / "sweep.csv";
    const RunResult result = run_command(cli_path() + " sweep --config " + data_dir() +
                                         "/demo_sweep.json --out " + out.string() + " --jobs 4");
    CHECK(result.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(count_lines(csv) == 7);  // header + 6 variations x 1 seed
    CHECK(csv.rfind("run,label,seed,controller,status,", 0) == 0);
    CHECK(csv.find("payload_0") < csv.find("payload_4"));
    CHECK(csv.find("payload_3_throttled") != std::string::npos);
}
