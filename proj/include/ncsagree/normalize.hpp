#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ncsagree/corpus.hpp"

namespace ncsagree::normalize {

// Citation sums are kept as exact integers; the mean is a deferred division,
// so mean() * n_papers reproduces the sum without accumulation drift.
struct ReferenceSetStats {
  std::int32_t field = 0;  // interned id within the system
  std::int32_t pub_year = 0;
  std::int64_t n_papers = 0;
  std::int64_t citation_sum = 0;

  double mean() const {
    return static_cast<double>(citation_sum) / static_cast<double>(n_papers);
  }
};

struct ReferenceSets {
  std::string system_id;
  std::unordered_map<std::uint64_t, ReferenceSetStats> by_field_year;

  static std::uint64_t key(std::int32_t field, std::int32_t year) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(field)) << 32) |
           static_cast<std::uint32_t>(year);
  }
  const ReferenceSetStats* find(std::int32_t field, std::int32_t year) const;
  std::vector<ReferenceSetStats> sorted() const;  // by (field, year)
};

ReferenceSets build_reference_sets(const corpus::Corpus& corpus,
                                   const corpus::SystemPopulation& population);

struct NcsTable {
  std::string system_id;
  // Indexed by corpus paper id; NaN / 0 fields = paper not in this system.
  std::vector<double> score_by_paper;
  std::vector<std::int32_t> n_fields_by_paper;

  bool has(std::uint32_t paper_id) const {
    return n_fields_by_paper[paper_id] > 0;
  }
  double at(std::uint32_t paper_id) const { return score_by_paper[paper_id]; }
};

// Single field: c/e of the paper's (field, year) set. Multiple fields: the
// unweighted mean of c/e over the distinct fields. A zero-mean set scores its
// (necessarily uncited) members 0.
NcsTable compute_ncs(const corpus::Corpus& corpus,
                     const corpus::SystemPopulation& population,
                     const ReferenceSets& refsets);

}  // namespace ncsagree::normalize
