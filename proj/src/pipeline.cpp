#include "ncsagree/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ncsagree/agreement.hpp"
#include "ncsagree/css.hpp"
#include "ncsagree/errors.hpp"
#include "ncsagree/normalize.hpp"
#include "ncsagree/parallel.hpp"
#include "ncsagree/report.hpp"

namespace ncsagree::pipeline {

namespace fs = std::filesystem;

std::string to_string(PairThresholds mode) {
  return mode == PairThresholds::full_match ? "full-match"
                                            : "analysis-population";
}

PairThresholds parse_pair_thresholds(const std::string& s) {
  if (s == "analysis-population") return PairThresholds::analysis_population;
  if (s == "full-match") return PairThresholds::full_match;
  throw ConfigError("pair_thresholds: unknown value '" + s + "'");
}

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key,
                              const char* context) {
  const auto it = doc.find(key);
  if (it == doc.end())
    throw ConfigError(std::string("config: missing required field '") + key +
                      "' in " + context);
  return *it;
}

std::string as_string(const nlohmann::json& value, const char* key) {
  if (!value.is_string())
    throw ConfigError(std::string("config: field '") + key +
                      "' must be a string");
  return value.get<std::string>();
}

void reject_unknown_keys(const nlohmann::json& doc,
                         const std::set<std::string>& known,
                         const char* context) {
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key))
      throw ConfigError(std::string("config: unknown field '") + key +
                        "' in " + context);
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc,
                           const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  reject_unknown_keys(
      doc,
      {"publications", "systems", "match_mode", "css_iterations",
       "bootstrap_replicates", "seed", "freq_threshold", "out_dir",
       "pair_thresholds", "alluvial_order", "dump_ncs", "dump_css", "workers",
       "year_range"},
      "run config");

  RunConfig config;
  config.publications_path =
      resolve(base_dir, as_string(require(doc, "publications", "run config"),
                                  "publications"));

  const auto& systems = require(doc, "systems", "run config");
  if (!systems.is_array())
    throw ConfigError("config: field 'systems' must be an array");
  for (const auto& entry : systems) {
    if (!entry.is_object())
      throw ConfigError("config: each system must be an object");
    reject_unknown_keys(entry, {"system_id", "namespace", "policy",
                                "assignments"},
                        "system entry");
    SystemConfig sys;
    sys.system_id =
        as_string(require(entry, "system_id", "system entry"), "system_id");
    sys.ns = corpus::parse_namespace(
        as_string(require(entry, "namespace", "system entry"), "namespace"));
    sys.policy = corpus::parse_policy(
        as_string(require(entry, "policy", "system entry"), "policy"));
    sys.assignments_path = resolve(
        base_dir,
        as_string(require(entry, "assignments", "system entry"), "assignments"));
    config.systems.push_back(std::move(sys));
  }

  try {
    if (doc.contains("match_mode"))
      config.match_mode =
          corpus::parse_match_mode(as_string(doc["match_mode"], "match_mode"));
    if (doc.contains("css_iterations"))
      config.css_iterations = doc["css_iterations"].get<int>();
    if (doc.contains("bootstrap_replicates"))
      config.bootstrap_replicates = doc["bootstrap_replicates"].get<int>();
    if (doc.contains("seed")) {
      config.seed = doc["seed"].get<std::uint64_t>();
      config.seed_set = true;
    }
    if (doc.contains("freq_threshold"))
      config.freq_threshold = doc["freq_threshold"].get<std::int64_t>();
    if (doc.contains("out_dir"))
      config.out_dir = fs::path(as_string(doc["out_dir"], "out_dir"));
    if (doc.contains("pair_thresholds"))
      config.pair_thresholds = parse_pair_thresholds(
          as_string(doc["pair_thresholds"], "pair_thresholds"));
    if (doc.contains("alluvial_order"))
      config.alluvial_order =
          doc["alluvial_order"].get<std::vector<std::string>>();
    if (doc.contains("dump_ncs")) config.dump_ncs = doc["dump_ncs"].get<bool>();
    if (doc.contains("dump_css")) config.dump_css = doc["dump_css"].get<bool>();
    if (doc.contains("workers"))
      config.workers = doc["workers"].get<unsigned>();
    if (doc.contains("year_range")) {
      const auto& yr = doc["year_range"];
      reject_unknown_keys(yr, {"min", "max"}, "year_range");
      config.year_range.min_year = require(yr, "min", "year_range").get<int>();
      config.year_range.max_year = require(yr, "max", "year_range").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json systems = nlohmann::json::array();
  for (const auto& sys : config.systems)
    systems.push_back({{"system_id", sys.system_id},
                       {"namespace", corpus::to_string(sys.ns)},
                       {"policy", corpus::to_string(sys.policy)},
                       {"assignments", sys.assignments_path.string()}});
  // analysis parameters only: out_dir and workers never change the report
  // content, so echoing them would break byte-identity across equivalent runs
  nlohmann::json doc{
      {"publications", config.publications_path.string()},
      {"systems", systems},
      {"match_mode", corpus::to_string(config.match_mode)},
      {"css_iterations", config.css_iterations},
      {"bootstrap_replicates", config.bootstrap_replicates},
      {"freq_threshold", config.freq_threshold},
      {"pair_thresholds", to_string(config.pair_thresholds)},
      {"alluvial_order", config.alluvial_order},
      {"dump_ncs", config.dump_ncs},
      {"dump_css", config.dump_css},
      {"year_range",
       {{"min", config.year_range.min_year},
        {"max", config.year_range.max_year}}},
  };
  if (config.seed_set) doc["seed"] = config.seed;
  return doc;
}

std::vector<std::string> validate(const RunConfig& config) {
  std::vector<std::string> diags;
  if (config.publications_path.empty())
    diags.push_back("publications: path is empty");
  else if (!fs::exists(config.publications_path))
    diags.push_back("publications: file not found: " +
                    config.publications_path.string());

  if (config.systems.size() < 2)
    diags.push_back("systems: need at least 2 systems, got " +
                    std::to_string(config.systems.size()));
  std::set<std::string> ids;
  for (const auto& sys : config.systems) {
    if (sys.system_id.empty()) {
      diags.push_back("systems: empty system_id");
      continue;
    }
    if (!ids.insert(sys.system_id).second)
      diags.push_back("systems: duplicate system_id '" + sys.system_id + "'");
    if (sys.assignments_path.empty())
      diags.push_back("systems[" + sys.system_id +
                      "].assignments: path is empty");
    else if (!fs::exists(sys.assignments_path))
      diags.push_back("systems[" + sys.system_id +
                      "].assignments: file not found: " +
                      sys.assignments_path.string());
  }

  if (config.css_iterations < 1)
    diags.push_back("css_iterations: must be >= 1");
  if (config.bootstrap_replicates < 0)
    diags.push_back("bootstrap_replicates: must be >= 0");
  if (config.bootstrap_replicates > 0 && !config.seed_set)
    diags.push_back("seed: required when bootstrap_replicates > 0");
  if (config.freq_threshold < 0)
    diags.push_back("freq_threshold: must be >= 0");
  if (config.out_dir.empty()) diags.push_back("out_dir: path is empty");
  if (config.year_range.min_year > config.year_range.max_year)
    diags.push_back("year_range: min exceeds max");

  if (!config.alluvial_order.empty()) {
    if (config.alluvial_order.size() < 2)
      diags.push_back("alluvial_order: need at least 2 systems");
    std::set<std::string> seen;
    for (const auto& id : config.alluvial_order) {
      if (!ids.contains(id))
        diags.push_back("alluvial_order: unknown system '" + id + "'");
      if (!seen.insert(id).second)
        diags.push_back("alluvial_order: duplicate system '" + id + "'");
    }
  }
  return diags;
}

namespace {

void append_load_metrics(std::vector<report::MetricRow>& rows,
                         const corpus::LoadReport& rep) {
  rows.push_back({rep.source, "rows_total", std::to_string(rep.rows_total)});
  rows.push_back({rep.source, "accepted", std::to_string(rep.accepted)});
  rows.push_back(
      {rep.source, "rejected_total", std::to_string(rep.rejected_total())});
  for (const auto& [reason, count] : rep.rejected)
    rows.push_back({rep.source, "rejected: " + reason, std::to_string(count)});
  rows.push_back({rep.source, "duplicates_merged",
                  std::to_string(rep.duplicates_merged)});
}

std::string identifier_columns(const corpus::PublicationRecord& p) {
  std::string out = p.doi ? *p.doi : "";
  out.push_back('\t');
  if (p.pmid) out += std::to_string(*p.pmid);
  out.push_back('\t');
  if (p.ut) out += *p.ut;
  return out;
}

}  // namespace

void run(const RunConfig& config) {
  {
    const auto diags = validate(config);
    if (!diags.empty()) {
      std::string msg = "config: invalid run configuration:";
      for (const auto& d : diags) msg += "\n  - " + d;
      throw ConfigError(msg);
    }
  }
  const unsigned workers = effective_workers(config.workers);

  // ingest + resolve + link
  std::vector<report::MetricRow> metrics;
  auto pubs = corpus::load_publications_file(config.publications_path,
                                             config.year_range);
  append_load_metrics(metrics, pubs.report);
  metrics.push_back({pubs.report.source, "records",
                     std::to_string(pubs.records.size())});

  corpus::Corpus corp;
  corp.papers = std::move(pubs.records);
  for (const auto& sys : config.systems) {
    const corpus::ClassificationSystemDescriptor desc{sys.system_id, sys.ns,
                                                      sys.policy};
    const auto load = corpus::load_assignments_file(sys.assignments_path, desc);
    append_load_metrics(metrics, load.report);
    metrics.push_back({load.report.source, "distinct_papers",
                       std::to_string(load.distinct_papers)});
    metrics.push_back({load.report.source, "distinct_fields",
                       std::to_string(load.distinct_fields)});
    const auto resolved = corpus::resolve_assignments(load, desc.policy);
    auto pop = corpus::link_system(corp.papers, desc, resolved);
    metrics.push_back({"system:" + sys.system_id, "dropped_no_primary",
                       std::to_string(pop.resolve_report.dropped_no_primary)});
    metrics.push_back(
        {"system:" + sys.system_id, "multi_primary_tiebreaks",
         std::to_string(pop.resolve_report.multi_primary_tiebreaks)});
    metrics.push_back({"system:" + sys.system_id, "unmatched_keys",
                       std::to_string(pop.unmatched_keys)});
    metrics.push_back({"system:" + sys.system_id, "population_papers",
                       std::to_string(pop.size())});
    corp.systems.push_back(std::move(pop));
  }

  // join: the full intersection always exists; pair sets only in pairwise mode
  const auto full_ds =
      std::move(corpus::join_systems(corp, corpus::MatchMode::full).front());
  metrics.push_back(
      {"join", "matched_papers", std::to_string(full_ds.paper_ids.size())});
  for (const auto& st : full_ds.stats) {
    metrics.push_back({"join:" + st.system_id, "retained_fields",
                       std::to_string(st.retained_fields)});
    metrics.push_back({"join:" + st.system_id, "population_fields",
                       std::to_string(st.population_fields)});
    metrics.push_back({"join:" + st.system_id, "retained_fields_pct",
                       report::fixed6(st.retained_fields_pct)});
  }

  // normalize on each system's full population
  std::vector<normalize::NcsTable> ncs;
  ncs.reserve(corp.systems.size());
  for (const auto& sys : corp.systems)
    ncs.push_back(normalize::compute_ncs(
        corp, sys, normalize::build_reference_sets(corp, sys)));

  const auto scores_over = [&](const corpus::MatchedDataset& ds,
                               std::size_t sys_index) {
    std::vector<double> v;
    v.reserve(ds.paper_ids.size());
    for (const std::uint32_t paper : ds.paper_ids) {
      if (!ncs[sys_index].has(paper))
        throw ConsistencyError("pipeline: matched paper lacks an NCS in '" +
                               config.systems[sys_index].system_id + "'");
      v.push_back(ncs[sys_index].at(paper));
    }
    return v;
  };

  std::vector<agreement::SystemScores> full_scores;
  std::vector<css::CssThresholds> full_thresholds;
  for (std::size_t s = 0; s < corp.systems.size(); ++s) {
    full_scores.push_back(agreement::SystemScores{
        config.systems[s].system_id, scores_over(full_ds, s)});
    full_thresholds.push_back(css::compute_thresholds(
        full_scores.back().scores, config.css_iterations));
  }

  // agreement
  agreement::CompareOptions opts;
  opts.css_iterations = config.css_iterations;
  opts.bootstrap_replicates = config.bootstrap_replicates;
  opts.seed = config.seed;
  opts.workers = workers;
  opts.match_mode = corpus::to_string(config.match_mode);

  std::vector<agreement::AgreementResult> results;
  if (config.match_mode == corpus::MatchMode::full) {
    // the analysis population is the full match, so the precomputed
    // thresholds are exactly the per-pair ones
    opts.fixed_thresholds = &full_thresholds;
    results = agreement::pairwise_compare(full_scores, opts);
  } else {
    const auto pair_datasets =
        corpus::join_systems(corp, corpus::MatchMode::pairwise);
    std::size_t pair = 0;
    for (std::size_t i = 0; i < corp.systems.size(); ++i) {
      for (std::size_t j = i + 1; j < corp.systems.size(); ++j, ++pair) {
        const auto& ds = pair_datasets[pair];
        const agreement::SystemScores a{config.systems[i].system_id,
                                        scores_over(ds, i)};
        const agreement::SystemScores b{config.systems[j].system_id,
                                        scores_over(ds, j)};
        const bool reuse =
            config.pair_thresholds == PairThresholds::full_match;
        results.push_back(agreement::compare_pair(
            a, b, opts, pair, reuse ? &full_thresholds[i] : nullptr,
            reuse ? &full_thresholds[j] : nullptr));
      }
    }
  }

  // dataset-level artifacts always describe the full intersection
  std::vector<report::SystemClasses> classes;
  for (std::size_t s = 0; s < corp.systems.size(); ++s)
    classes.push_back(report::SystemClasses{
        config.systems[s].system_id,
        css::assign_classes(full_scores[s].scores, full_thresholds[s])});
  std::vector<std::string> order = config.alluvial_order;
  if (order.empty())
    for (const auto& sys : config.systems) order.push_back(sys.system_id);
  const auto bands = report::alluvial_bands(classes, order);

  std::vector<report::BoxplotRow> boxplots;
  std::vector<report::FieldFrequencyRow> freq_rows;
  for (const auto& sys : config.systems) {
    boxplots.push_back(report::BoxplotRow{
        sys.system_id,
        corpus::papers_per_field_summary(corp, full_ds, sys.system_id)});
    for (const auto& [field, count] :
         corpus::field_sizes(corp, full_ds, sys.system_id))
      if (count >= config.freq_threshold)
        freq_rows.push_back(
            report::FieldFrequencyRow{sys.system_id, field, count});
  }

  // manifest
  nlohmann::json inputs;
  inputs["publications"] = {
      {"path", config.publications_path.string()},
      {"fnv1a64", report::fnv1a64_hex(slurp(config.publications_path))}};
  for (const auto& sys : config.systems)
    inputs["assignments:" + sys.system_id] = {
        {"path", sys.assignments_path.string()},
        {"fnv1a64", report::fnv1a64_hex(slurp(sys.assignments_path))}};

  nlohmann::json manifest{
      {"version", std::string(kVersion)},
      {"config", to_json(config)},
      {"inputs", inputs},
      {"conventions",
       {{"css_class_boundary", "at-threshold-goes-up"},
        {"css_truncated_part", "keeps-boundary-values"},
        {"quartiles", "tukey-hinges"},
        {"outlier_fences", "1.5*IQR"},
        {"kappa_ci", "seeded-bootstrap-percentile-type6"},
        {"lcc_ci", "fisher-z-asymptotic"},
        {"kappa_band", "two-decimal-rounding-upper-inclusive"},
        {"zero_mean_reference_set", "ncs=0"},
        {"doi_normalization", "lowercase-trim"},
        {"multi_field_ncs", "unweighted-mean-over-distinct-fields"},
        {"duplicate_publications", "max-citations"},
        {"multi_primary", "lexicographic-tiebreak"}}},
      {"counts",
       {{"papers", corp.papers.size()},
        {"matched_papers", full_ds.paper_ids.size()},
        {"systems", corp.systems.size()},
        {"pairs", results.size()}}},
  };

  // assemble and write
  report::FileSet files;
  files["pairwise_agreement.tsv"] = report::render_pairwise_tsv(results);
  files["contingency_tables.tsv"] = report::render_contingency_tsv(results);
  files["alluvial_bands.tsv"] = report::render_alluvial_tsv(bands, order);
  files["field_frequency.tsv"] = report::render_field_frequency_tsv(freq_rows);
  files["boxplot_summary.tsv"] = report::render_boxplot_tsv(boxplots);
  files["load_report.tsv"] = report::render_metrics_tsv(metrics);
  files["manifest.json"] = manifest.dump(2) + "\n";

  if (config.dump_ncs) {
    for (std::size_t s = 0; s < corp.systems.size(); ++s) {
      std::ostringstream out;
      out << "doi\tpmid\tut\tscore\tn_fields\n";
      for (const std::uint32_t paper : corp.systems[s].paper_ids)
        out << identifier_columns(corp.papers[paper]) << '\t'
            << report::fixed6(ncs[s].at(paper)) << '\t'
            << ncs[s].n_fields_by_paper[paper] << '\n';
      files["ncs_" + config.systems[s].system_id + ".tsv"] = out.str();
    }
  }
  if (config.dump_css) {
    const int k = config.css_iterations + 1;
    for (std::size_t s = 0; s < corp.systems.size(); ++s) {
      std::ostringstream out;
      out << "doi\tpmid\tut\tsystem_id\tncs\tclass_level\tclass_label\n";
      for (std::size_t p = 0; p < full_ds.paper_ids.size(); ++p) {
        const int level = classes[s].classes[p];
        out << identifier_columns(corp.papers[full_ds.paper_ids[p]]) << '\t'
            << config.systems[s].system_id << '\t'
            << report::fixed6(full_scores[s].scores[p]) << '\t' << level
            << '\t' << css::class_label(level, k) << '\n';
      }
      files["css_" + config.systems[s].system_id + ".tsv"] = out.str();
    }
  }

  report::export_report(files, config.out_dir);
}

}  // namespace ncsagree::pipeline
