#pragma once

// File-based configuration and run manifests.
//
// Lookup order for every setting: command-line flag, then a file under
// $AGNI_CONFIG_ROOT (analog.conf, baselines.json), then built-in defaults.
//
// analog.conf is line oriented, "key = value", '#' starts a comment. Keys:
// vdd_v, v_sat_v, tau_ns, c_ratio_cell_bl, c_ratio_lane_bl, c_bitline_ff,
// noise_sigma_mv, rng_seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agni/analog.hpp"
#include "json.hpp"

namespace agni {

inline constexpr const char* kConfigRootEnv = "AGNI_CONFIG_ROOT";

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Overrides the fields of `base` named in the text. Throws Config with the
/// line number on unknown keys or bad values.
AnalogParams parse_analog_conf(std::string_view text, AnalogParams base, const std::string& source = "analog.conf");

/// $AGNI_CONFIG_ROOT when set and non-empty.
std::optional<std::filesystem::path> config_root();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct RunManifest {
  std::vector<std::string> command_line;
  std::map<std::string, std::string> config_hashes;  // name -> fnv1a64 hex
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;  // UTC, from SOURCE_DATE_EPOCH when set

  nlohmann::json to_json() const;
};

/// ISO-8601 UTC time of SOURCE_DATE_EPOCH, or of now when unset.
std::string manifest_timestamp();

/// Path of the manifest written next to an output file.
std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace agni
