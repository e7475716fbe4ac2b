#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncsagree/errors.hpp"

namespace ncsagree::corpus {

enum class IdNamespace { doi, pmid, ut };
enum class AssignmentPolicy { all_assignments_averaged, primary_only };
enum class MatchMode { pairwise, full };

std::string to_string(IdNamespace ns);
std::string to_string(AssignmentPolicy policy);
std::string to_string(MatchMode mode);
IdNamespace parse_namespace(const std::string& s);
AssignmentPolicy parse_policy(const std::string& s);
MatchMode parse_match_mode(const std::string& s);

// Lowercase + whitespace-trim; idempotent.
std::string normalize_doi(std::string_view raw);
std::string trim(std::string_view raw);

struct PublicationRecord {
  std::optional<std::string> doi;    // stored normalized
  std::optional<std::uint64_t> pmid;
  std::optional<std::string> ut;     // stored trimmed
  std::int32_t pub_year = 0;
  std::int64_t citations = 0;

  bool operator==(const PublicationRecord&) const = default;
};

struct YearRange {
  std::int32_t min_year = 1900;
  std::int32_t max_year = 2100;
};

struct LoadReport {
  std::string source;
  std::size_t rows_total = 0;
  std::size_t accepted = 0;
  std::size_t duplicates_merged = 0;
  // reason -> count, keyed for deterministic emission
  std::map<std::string, std::size_t> rejected;

  std::size_t rejected_total() const;
};

struct PublicationsLoad {
  std::vector<PublicationRecord> records;
  LoadReport report;
};

// Rejects malformed rows (recorded per reason), merges rows that share any
// identifier keeping the max citation count. Zero valid rows is fatal.
PublicationsLoad load_publications(std::istream& in, const YearRange& years = {},
                                   const std::string& source = "<memory>");
PublicationsLoad load_publications_file(const std::filesystem::path& path,
                                        const YearRange& years = {});

// Canonical TSV; load(write(load(x))) == load(x).
void write_publications(const std::vector<PublicationRecord>& records,
                        std::ostream& out);
void write_publications_file(const std::vector<PublicationRecord>& records,
                             const std::filesystem::path& path);

struct ClassificationSystemDescriptor {
  std::string system_id;
  IdNamespace ns = IdNamespace::doi;
  AssignmentPolicy policy = AssignmentPolicy::all_assignments_averaged;
};

struct FieldAssignment {
  std::string paper_key;  // in the system's namespace, normalized
  std::string field_id;
  bool is_primary = false;

  bool operator==(const FieldAssignment&) const = default;
};

struct AssignmentsLoad {
  std::string system_id;
  std::vector<FieldAssignment> assignments;  // (paper_key, field_id) unique
  std::size_t distinct_papers = 0;
  std::size_t distinct_fields = 0;
  LoadReport report;
};

AssignmentsLoad load_assignments(std::istream& in,
                                 const ClassificationSystemDescriptor& system,
                                 const std::string& source = "<memory>");
AssignmentsLoad load_assignments_file(const std::filesystem::path& path,
                                      const ClassificationSystemDescriptor& system);

struct ResolveReport {
  std::size_t papers = 0;                   // papers retained
  std::size_t dropped_no_primary = 0;       // primary-only, zero primaries
  std::size_t multi_primary_tiebreaks = 0;  // primary-only, >1 primary
};

struct ResolvedAssignments {
  // paper_key -> sorted unique field ids (exactly one under primary-only)
  std::map<std::string, std::vector<std::string>> fields_by_paper;
  ResolveReport report;
};

ResolvedAssignments resolve_assignments(const AssignmentsLoad& load,
                                        AssignmentPolicy policy);

// One classification system linked against the publication list: papers are
// corpus indices, fields are interned per system.
struct SystemPopulation {
  ClassificationSystemDescriptor desc;
  std::vector<std::string> field_names;           // intern table
  std::vector<std::uint32_t> paper_ids;           // ascending corpus indices
  std::vector<std::vector<std::int32_t>> fields;  // per paper, sorted unique
  ResolveReport resolve_report;
  std::size_t unmatched_keys = 0;  // resolved keys with no publication

  std::size_t size() const { return paper_ids.size(); }
};

SystemPopulation link_system(const std::vector<PublicationRecord>& papers,
                             const ClassificationSystemDescriptor& desc,
                             const ResolvedAssignments& resolved);

struct Corpus {
  std::vector<PublicationRecord> papers;
  std::vector<SystemPopulation> systems;

  const SystemPopulation& system(const std::string& system_id) const;
};

struct JoinSystemStats {
  std::string system_id;
  std::size_t population_papers = 0;
  std::size_t population_fields = 0;
  std::size_t retained_fields = 0;  // fields with >=1 matched paper
  double retained_fields_pct = 0.0;
};

struct MatchedDataset {
  MatchMode mode = MatchMode::full;
  std::vector<std::string> system_ids;
  std::vector<std::uint32_t> paper_ids;  // ascending
  std::vector<JoinSystemStats> stats;
};

// full: one dataset over the intersection of all systems; pairwise: one per
// unordered pair in config order. Empty intersections are fatal.
std::vector<MatchedDataset> join_systems(const Corpus& corpus, MatchMode mode);

struct DistributionSummary {
  std::size_t n_fields = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::vector<std::int64_t> outliers;     // field sizes outside 1.5*IQR fences
  std::int64_t total_memberships = 0;     // sum of field sizes
};

DistributionSummary papers_per_field_summary(const Corpus& corpus,
                                             const MatchedDataset& dataset,
                                             const std::string& system_id);

// Papers per field within the dataset, sorted by count desc then field name.
std::vector<std::pair<std::string, std::int64_t>> field_sizes(
    const Corpus& corpus, const MatchedDataset& dataset,
    const std::string& system_id);

}  // namespace ncsagree::corpus
