#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lrfbench/calibration.hpp"
#include "lrfbench/harness.hpp"
#include "lrfbench/scoring.hpp"
#include "lrfbench/workload.hpp"

namespace lrfbench {

inline constexpr std::string_view kToolVersion = "0.1.0";

// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Provenance block carried by every output of a command invocation. The
// digest covers everything except the timestamp, so reruns of the same
// command produce byte-identical data files.
struct RunManifest {
  std::string command;
  std::string tool_version = std::string(kToolVersion);
  std::uint64_t stream_seed = 0;
  std::string suite_digest;
  std::string timestamp;  // ISO 8601 UTC
};

nlohmann::json manifest_json(const RunManifest& m, bool include_timestamp);
std::string manifest_digest(const RunManifest& m);
std::string utc_timestamp();

// Digest of the suite's structural description (names, sizes, budgets,
// metric directions, regularizer support).
nlohmann::json suite_json(const Suite& suite);
std::string suite_digest(const Suite& suite);

nlohmann::json to_json(const OptimizerConfig& cfg);
nlohmann::json to_json(const ScheduleSpec& spec);
nlohmann::json to_json(const RegularizerKnobs& knobs);
nlohmann::json to_json(const TrialSpec& spec);
nlohmann::json to_json(const TrialRecord& record);
nlohmann::json to_json(const SuiteTargets& targets);
nlohmann::json to_json(const TimeTable& table);

SuiteTargets suite_targets_from_json(const nlohmann::json& j);

// Long-form table: one "algorithm,workload,fraction" row per cell, with the
// literal UNREACHED for +inf. Lines starting with '#' are comments.
std::string time_table_csv(const TimeTable& table, std::string_view manifest_digest);
// Strict inverse: rejects malformed headers or cells, duplicates, and holes.
TimeTable time_table_from_csv(std::string_view text);

// "tau,p" breakpoints of the step function over [1, tau_max].
std::string profile_csv(const PerformanceProfile& profile, double tau_max,
                        std::string_view manifest_digest);

// Writes via a temporary file in the same directory, then renames into
// place, creating parent directories as needed.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

// $LRFBENCH_OUT when set, otherwise ./out.
std::filesystem::path default_output_dir();

}  // namespace lrfbench
