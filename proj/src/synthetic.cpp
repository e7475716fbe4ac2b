#include "ncsagree/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "ncsagree/errors.hpp"
#include "ncsagree/rng.hpp"

namespace ncsagree::synthetic {

namespace {

std::string padded(const char* prefix, std::uint64_t value, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*llu", prefix, width,
                static_cast<unsigned long long>(value));
  return buf;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

void validate(const SyntheticConfig& config) {
  if (config.n_papers == 0)
    throw ConfigError("synth: paper count must be >= 1");
  if (config.systems.empty())
    throw ConfigError("synth: need at least one system");
  if (config.year_min > config.year_max)
    throw ConfigError("synth: year_min exceeds year_max");
  if (config.citation_scale < 0.0)
    throw ConfigError("synth: citation_scale must be >= 0");
  for (const auto& sys : config.systems) {
    if (sys.system_id.empty()) throw ConfigError("synth: empty system_id");
    if (sys.n_fields == 0)
      throw ConfigError("synth: system " + sys.system_id +
                        " needs at least one field");
    if (sys.secondary_prob < 0.0 || sys.secondary_prob > 1.0 ||
        sys.scramble_prob < 0.0 || sys.scramble_prob > 1.0)
      throw ConfigError("synth: probabilities must lie in [0, 1] for " +
                        sys.system_id);
  }
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config) {
  validate(config);

  SyntheticCorpus out;
  out.publications.reserve(config.n_papers);
  out.assignments.resize(config.systems.size());

  std::vector<int> field_width;
  field_width.reserve(config.systems.size());
  for (const auto& sys : config.systems)
    field_width.push_back(digits(sys.n_fields - 1));

  auto g = rng::engine(rng::mix(config.seed));
  const auto year_span =
      static_cast<std::uint64_t>(config.year_max - config.year_min) + 1;

  for (std::size_t i = 0; i < config.n_papers; ++i) {
    corpus::PublicationRecord rec;
    rec.doi = padded("10.5555/p", i, 7);
    rec.pmid = 10000001 + i;
    rec.ut = padded("SYN:", i, 9);
    rec.pub_year =
        config.year_min +
        static_cast<std::int32_t>(rng::uniform_below(g, year_span));
    // older papers accumulate more citations
    const double age_boost =
        1.0 + 0.15 * static_cast<double>(config.year_max - rec.pub_year);
    rec.citations = static_cast<std::int64_t>(
        config.citation_scale * age_boost * rng::exponential(g));
    const double topic = rng::uniform01(g);

    for (std::size_t s = 0; s < config.systems.size(); ++s) {
      const auto& sys = config.systems[s];
      const double t = rng::uniform01(g) < sys.scramble_prob
                           ? rng::uniform01(g)
                           : topic;
      const auto field = static_cast<std::uint64_t>(
          t * static_cast<double>(sys.n_fields));
      const auto primary_field =
          std::min<std::uint64_t>(field, sys.n_fields - 1);
      const std::string key =
          sys.ns == corpus::IdNamespace::doi    ? *rec.doi
          : sys.ns == corpus::IdNamespace::pmid ? std::to_string(*rec.pmid)
                                                : *rec.ut;
      const bool mark_primary =
          sys.policy == corpus::AssignmentPolicy::primary_only;
      out.assignments[s].push_back(corpus::FieldAssignment{
          key, padded("f", primary_field, field_width[s]), mark_primary});
      if (sys.n_fields > 1 && rng::uniform01(g) < sys.secondary_prob) {
        const auto offset = 1 + rng::uniform_below(g, sys.n_fields - 1);
        const auto secondary = (primary_field + offset) % sys.n_fields;
        out.assignments[s].push_back(corpus::FieldAssignment{
            key, padded("f", secondary, field_width[s]), false});
      }
    }
    out.publications.push_back(std::move(rec));
  }
  return out;
}

SyntheticConfig default_six_system_config(std::uint64_t seed,
                                          std::size_t n_papers) {
  using corpus::AssignmentPolicy;
  using corpus::IdNamespace;
  SyntheticConfig config;
  config.seed = seed;
  config.n_papers = n_papers;
  config.citation_scale = 8.0;
  config.systems = {
      {"journal_sets", 240, IdNamespace::doi,
       AssignmentPolicy::all_assignments_averaged, 0.35, 0.08},
      {"sections", 80, IdNamespace::doi, AssignmentPolicy::primary_only,
       0.25, 0.10},
      {"clusters_coarse", 600, IdNamespace::ut,
       AssignmentPolicy::all_assignments_averaged, 0.0, 0.12},
      {"clusters_mid", 1200, IdNamespace::ut,
       AssignmentPolicy::all_assignments_averaged, 0.0, 0.15},
      {"clusters_fine", 2400, IdNamespace::ut,
       AssignmentPolicy::all_assignments_averaged, 0.0, 0.18},
      {"semantic", 900, IdNamespace::pmid,
       AssignmentPolicy::all_assignments_averaged, 0.0, 0.45},
  };
  return config;
}

std::filesystem::path write_synthetic_corpus(
    const SyntheticConfig& config, const SyntheticCorpus& corpus,
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("synth: cannot create " + dir.string() + ": " +
                  ec.message());

  corpus::write_publications_file(corpus.publications,
                                  dir / "publications.tsv");

  nlohmann::json systems = nlohmann::json::array();
  for (std::size_t s = 0; s < config.systems.size(); ++s) {
    const auto& sys = config.systems[s];
    const std::string name = "assignments_" + sys.system_id + ".tsv";
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("synth: cannot write " + (dir / name).string());
    out << "paper_key\tfield_id\tis_primary\n";
    for (const auto& a : corpus.assignments[s])
      out << a.paper_key << '\t' << a.field_id << '\t'
          << (a.is_primary ? '1' : '0') << '\n';
    if (!out) throw IoError("synth: write failed for " + (dir / name).string());
    systems.push_back({{"system_id", sys.system_id},
                       {"namespace", corpus::to_string(sys.ns)},
                       {"policy", corpus::to_string(sys.policy)},
                       {"assignments", name}});
  }

  nlohmann::json doc{
      {"publications", "publications.tsv"},
      {"systems", systems},
      {"match_mode", "full"},
      {"css_iterations", 3},
      {"bootstrap_replicates", 1000},
      {"seed", config.seed},
      {"freq_threshold",
       std::max<std::int64_t>(1, static_cast<std::int64_t>(config.n_papers) / 100)},
      {"out_dir", "out"},
  };
  const fs::path config_path = dir / "config.json";
  std::ofstream out(config_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("synth: cannot write " + config_path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("synth: write failed for " + config_path.string());
  return config_path;
}

}  // namespace ncsagree::synthetic
