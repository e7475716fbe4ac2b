#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ncsagree/corpus.hpp"

namespace ncsagree::synthetic {

struct SyntheticSystem {
  std::string system_id;
  std::size_t n_fields = 1;
  corpus::IdNamespace ns = corpus::IdNamespace::doi;
  corpus::AssignmentPolicy policy =
      corpus::AssignmentPolicy::all_assignments_averaged;
  double secondary_prob = 0.0;  // chance of one extra non-primary field
  double scramble_prob = 0.1;   // chance the shared topic is ignored
};

struct SyntheticConfig {
  std::uint64_t seed = 0;
  std::size_t n_papers = 0;
  std::int32_t year_min = 2006;
  std::int32_t year_max = 2011;
  double citation_scale = 8.0;  // 0 means every citation count is 0
  std::vector<SyntheticSystem> systems;
};

struct SyntheticCorpus {
  std::vector<corpus::PublicationRecord> publications;
  std::vector<std::vector<corpus::FieldAssignment>> assignments;  // per system
};

// Deterministic for a fixed config. Every paper carries doi, pmid and ut.
// Fields are drawn from a shared per-paper topic so systems agree partially;
// marginal field frequencies stay uniform.
SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config);

// Six systems of mixed granularity, namespace and policy; the corpus used by
// the end-to-end checks and the synth subcommand.
SyntheticConfig default_six_system_config(std::uint64_t seed,
                                          std::size_t n_papers);

// Writes publications.tsv, assignments_<system>.tsv and config.json (a run
// config referencing them) under dir. Returns the config path.
std::filesystem::path write_synthetic_corpus(const SyntheticConfig& config,
                                             const SyntheticCorpus& corpus,
                                             const std::filesystem::path& dir);

}  // namespace ncsagree::synthetic
