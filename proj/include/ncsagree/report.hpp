#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncsagree/agreement.hpp"
#include "ncsagree/corpus.hpp"

namespace ncsagree::report {

// Fixed 6-decimal formatting for every floating-point field in report files.
std::string fixed6(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

struct AlluvialBand {
  int step = 0;  // adjacent pair (order[step], order[step+1])
  int source_class = 0;
  int target_class = 0;
  std::int64_t count = 0;
};

struct SystemClasses {
  std::string system_id;
  std::vector<int> classes;  // aligned over one shared paper set
};

// Bands with count > 0 for each adjacent pair in the order, sorted by
// (step, source, target). Bands of a step sum to the paper total and equal
// the contingency cells of that system pair.
std::vector<AlluvialBand> alluvial_bands(
    const std::vector<SystemClasses>& systems,
    const std::vector<std::string>& order);

struct FieldFrequencyRow {
  std::string system_id;
  std::string field_id;
  std::int64_t n_papers = 0;
};

struct BoxplotRow {
  std::string system_id;
  corpus::DistributionSummary summary;
};

struct MetricRow {
  std::string input;
  std::string metric;
  std::string value;
};

std::string render_pairwise_tsv(
    const std::vector<agreement::AgreementResult>& results);
std::string render_contingency_tsv(
    const std::vector<agreement::AgreementResult>& results);
std::string render_alluvial_tsv(const std::vector<AlluvialBand>& bands,
                                const std::vector<std::string>& order);
std::string render_field_frequency_tsv(
    const std::vector<FieldFrequencyRow>& rows);
std::string render_boxplot_tsv(const std::vector<BoxplotRow>& rows);
std::string render_metrics_tsv(const std::vector<MetricRow>& rows);

// name -> bytes; std::map keeps the write order stable.
using FileSet = std::map<std::string, std::string>;

// Writes every file (creating out_dir if needed). On any failure the files
// created by this call are removed before the error propagates.
std::vector<std::filesystem::path> export_report(
    const FileSet& files, const std::filesystem::path& out_dir);

}  // namespace ncsagree::report
