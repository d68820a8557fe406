#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadtherm/actuation.hpp"
#include "quadtherm/errors.hpp"
#include "quadtherm/randomizer.hpp"
#include "quadtherm/reward.hpp"
#include "quadtherm/scenario.hpp"
#include "quadtherm/thermal_network.hpp"

namespace quadtherm {

/// Every config file carries "schema_version"; loaders reject other values.
inline constexpr int kSchemaVersion = 1;

// ---- JSON object <-> domain types ----------------------------------------
// The *_from_json parsers reject unknown keys so typos never pass silently.
// `where` prefixes error messages with the field location.

[[nodiscard]] ThermalNetwork network_from_json(const nlohmann::json& j, const std::string& where);
[[nodiscard]] nlohmann::json network_to_json(const ThermalNetwork& network);

[[nodiscard]] RewardConfig reward_from_json(const nlohmann::json& j, const std::string& where);
[[nodiscard]] nlohmann::json reward_to_json(const RewardConfig& cfg);

[[nodiscard]] ActuationParams actuation_from_json(const nlohmann::json& j, const std::string& where,
                                                  int joint_count = 12);

[[nodiscard]] GaitParams gait_from_json(const nlohmann::json& j, const std::string& where);

[[nodiscard]] RandomizationRanges ranges_from_json(const nlohmann::json& j,
                                                   const std::string& where);
[[nodiscard]] nlohmann::json sampled_episode_to_json(const SampledEpisodeConfig& sampled);

[[nodiscard]] RobotSnapshot snapshot_from_json(const nlohmann::json& j, const std::string& where);

[[nodiscard]] PiecewiseConstantSchedule schedule_from_json(const nlohmann::json& j,
                                                           const std::string& where,
                                                           int node_count, int env_index);

/// Scenario object; a string "network" field is resolved against base_dir.
/// Rejects reward parameters whose gamma_t exceeds the network's feasible
/// bound.
[[nodiscard]] Scenario scenario_from_json(const nlohmann::json& j,
                                          const std::filesystem::path& base_dir);

// ---- File loaders ---------------------------------------------------------
// Parse errors and schema violations raise ConfigError naming the file and
// field.

[[nodiscard]] nlohmann::json load_config_json(const std::filesystem::path& path);

[[nodiscard]] ThermalNetwork load_network(const std::filesystem::path& path);
[[nodiscard]] RewardConfig load_reward_config(const std::filesystem::path& path);
[[nodiscard]] RandomizationRanges load_ranges(const std::filesystem::path& path);
[[nodiscard]] RobotSnapshot load_snapshot(const std::filesystem::path& path);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] PiecewiseConstantSchedule load_schedule(const std::filesystem::path& path,
                                                      const ThermalNetwork& network);

/// Sweep file: base scenario (inline or path), labeled JSON merge patches,
/// and the seed list.
struct SweepConfig {
    nlohmann::json base_scenario;
    std::filesystem::path base_dir;
    std::vector<std::pair<std::string, nlohmann::json>> variations;  ///< label, patch
    std::vector<std::uint64_t> seeds;
    int jobs = 0;
};

[[nodiscard]] SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Applies each variation's merge patch (RFC 7386) to the base scenario.
[[nodiscard]] std::vector<SweepVariation> materialize_sweep(const SweepConfig& sweep);

// ---- Output helpers --------------------------------------------------------

/// Writes through a temp file in the same directory plus rename, so a failed
/// run never leaves a partial artifact.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// FNV-1a 64-bit over the raw bytes; changes iff the bytes change.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string digest_string(std::string_view bytes);

/// Provenance record written next to each output file.
struct RunManifest {
    std::string command;
    std::string config_digest;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    double duration_ms = 0.0;
};

[[nodiscard]] nlohmann::json manifest_to_json(const RunManifest& manifest);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace quadtherm
