#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncsagree/corpus.hpp"

namespace ncsagree::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

struct SystemConfig {
  std::string system_id;
  corpus::IdNamespace ns = corpus::IdNamespace::doi;
  corpus::AssignmentPolicy policy =
      corpus::AssignmentPolicy::all_assignments_averaged;
  std::filesystem::path assignments_path;
};

enum class PairThresholds { analysis_population, full_match };

struct RunConfig {
  std::filesystem::path publications_path;
  std::vector<SystemConfig> systems;
  corpus::MatchMode match_mode = corpus::MatchMode::full;
  int css_iterations = 3;
  int bootstrap_replicates = 1000;
  bool seed_set = false;
  std::uint64_t seed = 0;
  std::int64_t freq_threshold = 5000;
  std::filesystem::path out_dir = "out";
  PairThresholds pair_thresholds = PairThresholds::analysis_population;
  std::vector<std::string> alluvial_order;  // empty: config order
  bool dump_ncs = false;
  bool dump_css = false;
  unsigned workers = 0;  // 0: hardware concurrency
  corpus::YearRange year_range;
};

std::string to_string(PairThresholds mode);
PairThresholds parse_pair_thresholds(const std::string& s);

// Canonical JSON form of the effective config; echoed into the manifest.
nlohmann::json to_json(const RunConfig& config);

// Paths in the file are resolved against its directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir);

// Empty iff run() could start; each diagnostic names the offending field.
std::vector<std::string> validate(const RunConfig& config);

// ingest -> resolve -> join -> normalize -> CSS -> agreement -> report.
// Throws ncsagree::Error; on success the out dir contains the full report
// set including the manifest.
void run(const RunConfig& config);

}  // namespace ncsagree::pipeline
