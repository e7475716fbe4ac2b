#include "ncsagree/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ncsagree/tsv.hpp"

namespace ncsagree::corpus {

namespace {

constexpr std::string_view kPublicationsHeader = "doi\tpmid\tut\tpub_year\tcitations";
constexpr std::string_view kAssignmentsHeader = "paper_key\tfield_id\tis_primary";

void bump(std::map<std::string, std::size_t>& reasons, const char* reason) {
  ++reasons[reason];
}

// Union-find over publication slots; rows can bridge records through
// different identifiers.
class Slots {
 public:
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }

  // smaller (first-seen) index wins as root
  std::size_t merge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::string to_string(IdNamespace ns) {
  switch (ns) {
    case IdNamespace::doi: return "doi";
    case IdNamespace::pmid: return "pmid";
    case IdNamespace::ut: return "ut";
  }
  return "?";
}

std::string to_string(AssignmentPolicy policy) {
  return policy == AssignmentPolicy::primary_only ? "primary-only"
                                                  : "all-assignments-averaged";
}

std::string to_string(MatchMode mode) {
  return mode == MatchMode::full ? "full" : "pairwise";
}

IdNamespace parse_namespace(const std::string& s) {
  if (s == "doi") return IdNamespace::doi;
  if (s == "pmid") return IdNamespace::pmid;
  if (s == "ut") return IdNamespace::ut;
  throw ConfigError("unknown identifier namespace '" + s + "'");
}

AssignmentPolicy parse_policy(const std::string& s) {
  if (s == "all-assignments-averaged")
    return AssignmentPolicy::all_assignments_averaged;
  if (s == "primary-only") return AssignmentPolicy::primary_only;
  throw ConfigError("unknown assignment policy '" + s + "'");
}

MatchMode parse_match_mode(const std::string& s) {
  if (s == "full") return MatchMode::full;
  if (s == "pairwise") return MatchMode::pairwise;
  throw ConfigError("unknown match mode '" + s + "'");
}

std::string trim(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  return std::string(raw.substr(b, e - b));
}

std::string normalize_doi(std::string_view raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

std::size_t LoadReport::rejected_total() const {
  std::size_t total = 0;
  for (const auto& [reason, count] : rejected) total += count;
  return total;
}

PublicationsLoad load_publications(std::istream& in, const YearRange& years,
                                   const std::string& source) {
  PublicationsLoad out;
  out.report.source = source;

  std::string line;
  if (!std::getline(in, line) ||
      tsv::strip_cr(line) != kPublicationsHeader)
    throw IngestError("corpus: publications file " + source +
                      " must start with header '" +
                      std::string(kPublicationsHeader) + "'");

  std::vector<PublicationRecord> records;
  Slots slots;
  std::unordered_map<std::string, std::size_t> by_doi;
  std::unordered_map<std::uint64_t, std::size_t> by_pmid;
  std::unordered_map<std::string, std::size_t> by_ut;

  while (std::getline(in, line)) {
    const std::string_view row = tsv::strip_cr(line);
    if (row.empty()) continue;
    ++out.report.rows_total;
    const auto fields = tsv::split(row);
    if (fields.size() != 5) {
      bump(out.report.rejected, "malformed row");
      continue;
    }

    PublicationRecord rec;
    const std::string doi = normalize_doi(fields[0]);
    if (!doi.empty()) rec.doi = doi;
    const std::string pmid_raw = trim(fields[1]);
    if (!pmid_raw.empty()) {
      const auto pmid = tsv::parse_int<std::uint64_t>(pmid_raw);
      if (!pmid) {
        bump(out.report.rejected, "invalid pmid");
        continue;
      }
      rec.pmid = *pmid;
    }
    const std::string ut = trim(fields[2]);
    if (!ut.empty()) rec.ut = ut;
    if (!rec.doi && !rec.pmid && !rec.ut) {
      bump(out.report.rejected, "missing identifiers");
      continue;
    }

    const std::string year_raw = trim(fields[3]);
    if (year_raw.empty()) {
      bump(out.report.rejected, "missing pub_year");
      continue;
    }
    const auto year = tsv::parse_int<std::int32_t>(year_raw);
    if (!year) {
      bump(out.report.rejected, "invalid pub_year");
      continue;
    }
    if (*year < years.min_year || *year > years.max_year) {
      bump(out.report.rejected, "pub_year out of range");
      continue;
    }
    rec.pub_year = *year;

    const std::string cites_raw = trim(fields[4]);
    if (cites_raw.empty()) {
      bump(out.report.rejected, "missing citations");
      continue;
    }
    const auto cites = tsv::parse_int<std::int64_t>(cites_raw);
    if (!cites) {
      bump(out.report.rejected, "invalid citations");
      continue;
    }
    if (*cites < 0) {
      bump(out.report.rejected, "negative citations");
      continue;
    }
    rec.citations = *cites;
    ++out.report.accepted;

    // gather every record this row's identifiers touch
    std::size_t root = static_cast<std::size_t>(-1);
    const auto touch = [&](std::size_t idx) {
      root = root == static_cast<std::size_t>(-1) ? slots.find(idx)
                                                  : slots.merge(root, idx);
    };
    if (rec.doi) {
      const auto it = by_doi.find(*rec.doi);
      if (it != by_doi.end()) touch(it->second);
    }
    if (rec.pmid) {
      const auto it = by_pmid.find(*rec.pmid);
      if (it != by_pmid.end()) touch(it->second);
    }
    if (rec.ut) {
      const auto it = by_ut.find(*rec.ut);
      if (it != by_ut.end()) touch(it->second);
    }
    if (root == static_cast<std::size_t>(-1)) {
      root = slots.add();
      records.push_back(rec);
    } else {
      ++out.report.duplicates_merged;
      PublicationRecord& kept = records[root];
      kept.citations = std::max(kept.citations, rec.citations);
      if (!kept.doi) kept.doi = rec.doi;
      if (!kept.pmid) kept.pmid = rec.pmid;
      if (!kept.ut) kept.ut = rec.ut;
    }
    if (rec.doi) by_doi.emplace(*rec.doi, root);
    if (rec.pmid) by_pmid.emplace(*rec.pmid, root);
    if (rec.ut) by_ut.emplace(*rec.ut, root);
  }

  if (out.report.accepted == 0)
    throw IngestError("corpus: no valid publication rows in " + source);

  // keep only union-find roots, folding merged slots into them
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t root = slots.find(i);
    if (root == i) continue;
    PublicationRecord& kept = records[root];
    const PublicationRecord& gone = records[i];
    kept.citations = std::max(kept.citations, gone.citations);
    if (!kept.doi) kept.doi = gone.doi;
    if (!kept.pmid) kept.pmid = gone.pmid;
    if (!kept.ut) kept.ut = gone.ut;
  }
  out.records.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    if (slots.find(i) == i) out.records.push_back(std::move(records[i]));
  return out;
}

PublicationsLoad load_publications_file(const std::filesystem::path& path,
                                        const YearRange& years) {
  std::ifstream in(path);
  if (!in) throw IoError("corpus: cannot open " + path.string());
  return load_publications(in, years, path.filename().string());
}

void write_publications(const std::vector<PublicationRecord>& records,
                        std::ostream& out) {
  out << kPublicationsHeader << '\n';
  for (const auto& r : records) {
    out << (r.doi ? *r.doi : "") << '\t';
    if (r.pmid) out << *r.pmid;
    out << '\t' << (r.ut ? *r.ut : "") << '\t' << r.pub_year << '\t'
        << r.citations << '\n';
  }
}

void write_publications_file(const std::vector<PublicationRecord>& records,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("corpus: cannot write " + path.string());
  write_publications(records, out);
  if (!out) throw IoError("corpus: write failed for " + path.string());
}

AssignmentsLoad load_assignments(std::istream& in,
                                 const ClassificationSystemDescriptor& system,
                                 const std::string& source) {
  AssignmentsLoad out;
  out.system_id = system.system_id;
  out.report.source = source;

  std::string line;
  if (!std::getline(in, line) || tsv::strip_cr(line) != kAssignmentsHeader)
    throw IngestError("corpus: assignments file " + source + " for system " +
                      system.system_id + " must start with header '" +
                      std::string(kAssignmentsHeader) + "'");

  std::unordered_map<std::string, std::size_t> seen;  // key \x1f field -> idx
  while (std::getline(in, line)) {
    const std::string_view row = tsv::strip_cr(line);
    if (row.empty()) continue;
    ++out.report.rows_total;
    const auto fields = tsv::split(row);
    if (fields.size() != 3) {
      bump(out.report.rejected, "malformed row");
      continue;
    }
    std::string key = system.ns == IdNamespace::doi ? normalize_doi(fields[0])
                                                    : trim(fields[0]);
    if (key.empty()) {
      bump(out.report.rejected, "empty paper_key");
      continue;
    }
    if (system.ns == IdNamespace::pmid) {
      // canonical decimal form, so 007 and 7 dedup to one key; non-numeric
      // keys are kept and simply never match a publication
      if (const auto num = tsv::parse_int<std::uint64_t>(key))
        key = std::to_string(*num);
    }
    std::string field = trim(fields[1]);
    if (field.empty()) {
      bump(out.report.rejected, "empty field_id");
      continue;
    }
    const std::string primary_raw = trim(fields[2]);
    bool primary = false;
    if (primary_raw == "1") {
      primary = true;
    } else if (primary_raw != "0") {
      bump(out.report.rejected, "invalid is_primary");
      continue;
    }
    ++out.report.accepted;

    std::string dedup_key = key;
    dedup_key.push_back('\x1f');
    dedup_key.append(field);
    const auto [it, inserted] =
        seen.emplace(std::move(dedup_key), out.assignments.size());
    if (inserted) {
      out.assignments.push_back(
          FieldAssignment{std::move(key), std::move(field), primary});
    } else {
      ++out.report.duplicates_merged;
      out.assignments[it->second].is_primary |= primary;
    }
  }

  if (out.assignments.empty())
    throw IngestError("corpus: no valid assignment rows in " + source +
                      " for system " + system.system_id);

  std::vector<std::string_view> papers, fields_seen;
  papers.reserve(out.assignments.size());
  fields_seen.reserve(out.assignments.size());
  for (const auto& a : out.assignments) {
    papers.push_back(a.paper_key);
    fields_seen.push_back(a.field_id);
  }
  const auto count_distinct = [](std::vector<std::string_view>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) -
                                    v.begin());
  };
  out.distinct_papers = count_distinct(papers);
  out.distinct_fields = count_distinct(fields_seen);
  return out;
}

AssignmentsLoad load_assignments_file(
    const std::filesystem::path& path,
    const ClassificationSystemDescriptor& system) {
  std::ifstream in(path);
  if (!in) throw IoError("corpus: cannot open " + path.string());
  return load_assignments(in, system, path.filename().string());
}

ResolvedAssignments resolve_assignments(const AssignmentsLoad& load,
                                        AssignmentPolicy policy) {
  std::map<std::string, std::vector<const FieldAssignment*>> grouped;
  for (const auto& a : load.assignments)
    grouped[a.paper_key].push_back(&a);

  ResolvedAssignments out;
  for (auto& [key, rows] : grouped) {
    if (policy == AssignmentPolicy::all_assignments_averaged) {
      std::vector<std::string> fields;
      fields.reserve(rows.size());
      for (const auto* a : rows) fields.push_back(a->field_id);
      std::sort(fields.begin(), fields.end());
      fields.erase(std::unique(fields.begin(), fields.end()), fields.end());
      out.fields_by_paper.emplace(key, std::move(fields));
      continue;
    }
    // primary-only
    std::vector<std::string> primaries;
    for (const auto* a : rows)
      if (a->is_primary) primaries.push_back(a->field_id);
    if (primaries.empty()) {
      ++out.report.dropped_no_primary;
      continue;
    }
    if (primaries.size() > 1) {
      ++out.report.multi_primary_tiebreaks;
      std::sort(primaries.begin(), primaries.end());
    }
    out.fields_by_paper.emplace(key,
                                std::vector<std::string>{primaries.front()});
  }
  out.report.papers = out.fields_by_paper.size();
  return out;
}

SystemPopulation link_system(const std::vector<PublicationRecord>& papers,
                             const ClassificationSystemDescriptor& desc,
                             const ResolvedAssignments& resolved) {
  std::unordered_map<std::string, std::uint32_t> by_key;
  by_key.reserve(papers.size());
  for (std::uint32_t i = 0; i < papers.size(); ++i) {
    const auto& p = papers[i];
    switch (desc.ns) {
      case IdNamespace::doi:
        if (p.doi) by_key.emplace(*p.doi, i);
        break;
      case IdNamespace::pmid:
        if (p.pmid) by_key.emplace(std::to_string(*p.pmid), i);
        break;
      case IdNamespace::ut:
        if (p.ut) by_key.emplace(*p.ut, i);
        break;
    }
  }

  SystemPopulation pop;
  pop.desc = desc;
  pop.resolve_report = resolved.report;

  std::map<std::string, std::int32_t> intern;
  std::vector<std::pair<std::uint32_t, const std::vector<std::string>*>> hits;
  for (const auto& [key, fields] : resolved.fields_by_paper) {
    std::string lookup = key;
    if (desc.ns == IdNamespace::pmid) {
      // canonical decimal form; non-numeric keys cannot match
      const auto num = tsv::parse_int<std::uint64_t>(key);
      if (!num) {
        ++pop.unmatched_keys;
        continue;
      }
      lookup = std::to_string(*num);
    }
    const auto it = by_key.find(lookup);
    if (it == by_key.end()) {
      ++pop.unmatched_keys;
      continue;
    }
    hits.emplace_back(it->second, &fields);
    for (const auto& f : fields) intern.emplace(f, 0);
  }

  pop.field_names.reserve(intern.size());
  for (auto& [name, id] : intern) {
    id = static_cast<std::int32_t>(pop.field_names.size());
    pop.field_names.push_back(name);
  }

  std::sort(hits.begin(), hits.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  pop.paper_ids.reserve(hits.size());
  pop.fields.reserve(hits.size());
  for (const auto& [paper_id, fields] : hits) {
    pop.paper_ids.push_back(paper_id);
    std::vector<std::int32_t> ids;
    ids.reserve(fields->size());
    for (const auto& f : *fields) ids.push_back(intern.at(f));
    std::sort(ids.begin(), ids.end());
    pop.fields.push_back(std::move(ids));
  }
  return pop;
}

const SystemPopulation& Corpus::system(const std::string& system_id) const {
  for (const auto& s : systems)
    if (s.desc.system_id == system_id) return s;
  throw ConsistencyError("corpus: unknown system '" + system_id + "'");
}

namespace {

std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(std::min(a.size(), b.size()));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

JoinSystemStats join_stats(const SystemPopulation& sys,
                           const std::vector<std::uint32_t>& matched) {
  JoinSystemStats st;
  st.system_id = sys.desc.system_id;
  st.population_papers = sys.size();
  st.population_fields = sys.field_names.size();
  std::vector<char> used(sys.field_names.size(), 0);
  for (const std::uint32_t paper : matched) {
    const auto it = std::lower_bound(sys.paper_ids.begin(),
                                     sys.paper_ids.end(), paper);
    if (it == sys.paper_ids.end() || *it != paper) continue;
    const auto pos =
        static_cast<std::size_t>(it - sys.paper_ids.begin());
    for (const std::int32_t f : sys.fields[pos]) used[f] = 1;
  }
  st.retained_fields = static_cast<std::size_t>(
      std::count(used.begin(), used.end(), char{1}));
  st.retained_fields_pct =
      st.population_fields == 0
          ? 0.0
          : 100.0 * static_cast<double>(st.retained_fields) /
                static_cast<double>(st.population_fields);
  return st;
}

[[noreturn]] void throw_empty_join(const Corpus& corpus, std::size_t upto) {
  // name the first pair whose pairwise intersection is empty
  for (std::size_t i = 0; i < corpus.systems.size(); ++i)
    for (std::size_t j = i + 1; j < corpus.systems.size(); ++j)
      if (intersect(corpus.systems[i].paper_ids, corpus.systems[j].paper_ids)
              .empty())
        throw IngestError("corpus: no papers match both '" +
                          corpus.systems[i].desc.system_id + "' and '" +
                          corpus.systems[j].desc.system_id + "'");
  throw IngestError(
      "corpus: matched paper set became empty after joining '" +
      corpus.systems[upto].desc.system_id +
      "' (every pairwise intersection is non-empty)");
}

}  // namespace

std::vector<MatchedDataset> join_systems(const Corpus& corpus,
                                         MatchMode mode) {
  if (corpus.systems.size() < 2)
    throw ConfigError("corpus: join needs at least 2 systems");

  std::vector<MatchedDataset> out;
  if (mode == MatchMode::full) {
    std::vector<std::uint32_t> matched = corpus.systems.front().paper_ids;
    for (std::size_t s = 1; s < corpus.systems.size(); ++s) {
      matched = intersect(matched, corpus.systems[s].paper_ids);
      if (matched.empty()) throw_empty_join(corpus, s);
    }
    MatchedDataset ds;
    ds.mode = MatchMode::full;
    for (const auto& sys : corpus.systems) {
      ds.system_ids.push_back(sys.desc.system_id);
      ds.stats.push_back(join_stats(sys, matched));
    }
    ds.paper_ids = std::move(matched);
    out.push_back(std::move(ds));
    return out;
  }

  for (std::size_t i = 0; i < corpus.systems.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus.systems.size(); ++j) {
      const auto& a = corpus.systems[i];
      const auto& b = corpus.systems[j];
      MatchedDataset ds;
      ds.mode = MatchMode::pairwise;
      ds.paper_ids = intersect(a.paper_ids, b.paper_ids);
      if (ds.paper_ids.empty())
        throw IngestError("corpus: no papers match both '" +
                          a.desc.system_id + "' and '" + b.desc.system_id +
                          "'");
      ds.system_ids = {a.desc.system_id, b.desc.system_id};
      ds.stats = {join_stats(a, ds.paper_ids),
                  join_stats(b, ds.paper_ids)};
      out.push_back(std::move(ds));
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::int64_t>> field_sizes(
    const Corpus& corpus, const MatchedDataset& dataset,
    const std::string& system_id) {
  const SystemPopulation& sys = corpus.system(system_id);
  std::vector<std::int64_t> counts(sys.field_names.size(), 0);
  for (const std::uint32_t paper : dataset.paper_ids) {
    const auto it =
        std::lower_bound(sys.paper_ids.begin(), sys.paper_ids.end(), paper);
    if (it == sys.paper_ids.end() || *it != paper)
      throw ConsistencyError("corpus: dataset paper missing from system '" +
                             system_id + "'");
    const auto pos = static_cast<std::size_t>(it - sys.paper_ids.begin());
    for (const std::int32_t f : sys.fields[pos]) ++counts[f];
  }
  std::vector<std::pair<std::string, std::int64_t>> out;
  for (std::size_t f = 0; f < counts.size(); ++f)
    if (counts[f] > 0) out.emplace_back(sys.field_names[f], counts[f]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

namespace {

double median_span(const std::vector<std::int64_t>& sorted, std::size_t lo,
                   std::size_t hi) {  // [lo, hi)
  const std::size_t n = hi - lo;
  const std::size_t mid = lo + n / 2;
  if (n % 2 == 1) return static_cast<double>(sorted[mid]);
  return 0.5 * (static_cast<double>(sorted[mid - 1]) +
                static_cast<double>(sorted[mid]));
}

}  // namespace

DistributionSummary papers_per_field_summary(const Corpus& corpus,
                                             const MatchedDataset& dataset,
                                             const std::string& system_id) {
  if (dataset.paper_ids.empty())
    throw ConsistencyError("corpus: summary of an empty dataset");
  const auto sized = field_sizes(corpus, dataset, system_id);
  std::vector<std::int64_t> sizes;
  sizes.reserve(sized.size());
  for (const auto& [name, count] : sized) sizes.push_back(count);
  std::sort(sizes.begin(), sizes.end());

  DistributionSummary s;
  s.n_fields = sizes.size();
  s.total_memberships = std::accumulate(sizes.begin(), sizes.end(),
                                        std::int64_t{0});
  const std::size_t n = sizes.size();
  s.min = static_cast<double>(sizes.front());
  s.max = static_cast<double>(sizes.back());
  s.median = median_span(sizes, 0, n);
  // Tukey hinges: odd n keeps the median element in both halves
  const std::size_t half = n / 2;
  s.q1 = median_span(sizes, 0, n % 2 == 1 ? half + 1 : half);
  s.q3 = median_span(sizes, half, n);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  for (const std::int64_t v : sizes)
    if (static_cast<double>(v) < lo_fence || static_cast<double>(v) > hi_fence)
      s.outliers.push_back(v);
  return s;
}

}  // namespace ncsagree::corpus
