#pragma once

// Shared fixtures for tests: in-memory corpus construction.

#include <sstream>
#include <string>
#include <vector>

#include "ncsagree/corpus.hpp"
#include "ncsagree/synthetic.hpp"

namespace testutil {

inline ncsagree::corpus::PublicationsLoad load_pubs(
    const std::string& tsv, const ncsagree::corpus::YearRange& years = {}) {
  std::istringstream in(tsv);
  return ncsagree::corpus::load_publications(in, years);
}

inline ncsagree::corpus::AssignmentsLoad load_assign(
    const std::string& tsv,
    const ncsagree::corpus::ClassificationSystemDescriptor& desc) {
  std::istringstream in(tsv);
  return ncsagree::corpus::load_assignments(in, desc);
}

// Build a linked corpus straight from generated records, bypassing the TSV
// surface (which has its own tests).
inline ncsagree::corpus::Corpus corpus_from_synth(
    const ncsagree::synthetic::SyntheticConfig& config,
    const ncsagree::synthetic::SyntheticCorpus& synth) {
  namespace c = ncsagree::corpus;
  c::Corpus corp;
  corp.papers = synth.publications;
  for (std::size_t s = 0; s < config.systems.size(); ++s) {
    const auto& sys = config.systems[s];
    const c::ClassificationSystemDescriptor desc{sys.system_id, sys.ns,
                                                 sys.policy};
    c::AssignmentsLoad load;
    load.system_id = sys.system_id;
    load.assignments = synth.assignments[s];
    const auto resolved = c::resolve_assignments(load, desc.policy);
    corp.systems.push_back(c::link_system(corp.papers, desc, resolved));
  }
  return corp;
}

}  // namespace testutil
