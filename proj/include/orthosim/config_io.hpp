#pragma once

// Text formats: INI experiment configs in, JSON run documents and sidecars out.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orthosim/experiment.hpp"

namespace orthosim::config_io {

inline constexpr const char* kConfigSchema = "orthosim/1";
inline constexpr const char* kRunSchema = "orthosim-run/1";
inline constexpr const char* kMetadataSchema = "orthosim-results/1";

struct ConfigIssue {
  /// 1-based line in the source text; 0 when the problem is not tied to a line.
  std::size_t line = 0;
  std::string field;
  std::string message;
};

struct LoadedConfig {
  experiment::ExperimentSpec spec;
  std::vector<ConfigIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Parses and validates an INI config. Syntax errors, unknown keys,
/// malformed values and violated invariants all become issues.
LoadedConfig parse_config(const std::string& text);

/// Throws std::runtime_error when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Parses "0.5", "pi", "pi/8", "3pi/8" or "3*pi/8".
std::optional<double> parse_angle(std::string_view text);
std::optional<std::vector<bool>> parse_bits(std::string_view text);
std::string format_bits(const std::vector<bool>& bits);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

nlohmann::ordered_json to_json(const adversary::AttackReport& report);
nlohmann::ordered_json to_json(const metrics::SecurityVerdict& verdict);
/// The versioned run document. The transcript is inlined as an array of records.
nlohmann::ordered_json to_json(const protocols::RunResult& result, bool include_transcript = true);

nlohmann::ordered_json metadata_json(const experiment::ExperimentSpec& spec, std::string_view config_text,
                                     std::size_t rows);

}  // namespace orthosim::config_io
