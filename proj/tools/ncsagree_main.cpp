#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ncsagree/agreement.hpp"
#include "ncsagree/errors.hpp"
#include "ncsagree/pipeline.hpp"
#include "ncsagree/report.hpp"
#include "ncsagree/synthetic.hpp"
#include "ncsagree/tsv.hpp"

namespace {

using ncsagree::report::fixed6;

struct RunFlags {
  std::string config_path;
  std::optional<std::string> match_mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> bootstrap;
  std::optional<int> css_iterations;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  std::optional<std::int64_t> freq_threshold;
};

ncsagree::pipeline::RunConfig load_with_overrides(const RunFlags& flags) {
  auto config = ncsagree::pipeline::load_run_config(flags.config_path);
  if (flags.match_mode)
    config.match_mode = ncsagree::corpus::parse_match_mode(*flags.match_mode);
  if (flags.seed) {
    config.seed = *flags.seed;
    config.seed_set = true;
  }
  if (flags.bootstrap) config.bootstrap_replicates = *flags.bootstrap;
  if (flags.css_iterations) config.css_iterations = *flags.css_iterations;
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.workers) config.workers = *flags.workers;
  if (flags.freq_threshold) config.freq_threshold = *flags.freq_threshold;
  return config;
}

template <typename T>
std::vector<T> read_column(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ncsagree::IoError(std::string("stats: cannot open ") + path);
  std::vector<T> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = ncsagree::tsv::strip_cr(line);
    const std::string token = ncsagree::corpus::trim(row);
    if (token.empty()) continue;
    if constexpr (std::is_integral_v<T>) {
      const auto v = ncsagree::tsv::parse_int<T>(token);
      if (!v)
        throw ncsagree::IngestError("stats: " + path + " line " +
                                    std::to_string(line_no) + ": invalid " +
                                    what);
      values.push_back(*v);
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ncsagree::IngestError("stats: " + path + " line " +
                                    std::to_string(line_no) + ": invalid " +
                                    what);
      }
    }
  }
  return values;
}

void print_estimate(const char* name, const ncsagree::agreement::Estimate& e) {
  std::cout << name << '\t' << fixed6(e.value);
  if (e.has_ci())
    std::cout << "\tci95\t" << fixed6(e.ci_low) << '\t' << fixed6(e.ci_high);
  std::cout << '\n';
}

int run_stats(const std::string& classes_a, const std::string& classes_b,
              const std::string& scores_a, const std::string& scores_b, int k,
              std::uint64_t seed, int bootstrap) {
  namespace agr = ncsagree::agreement;
  bool did_anything = false;
  if (!classes_a.empty() || !classes_b.empty()) {
    if (classes_a.empty() || classes_b.empty())
      throw ncsagree::ConfigError(
          "stats: --classes-a and --classes-b must be given together");
    const auto a = read_column<int>(classes_a, "class level");
    const auto b = read_column<int>(classes_b, "class level");
    const auto table = agr::contingency(a, b, k);
    std::cout << "n\t" << table.total() << '\n';
    std::cout << "percent_agreement\t" << fixed6(agr::percent_agreement(table))
              << '\n';
    const agr::BootstrapSpec boot{seed, bootstrap, 0, 0};
    const auto kappa =
        agr::weighted_kappa(table, agr::WeightMatrix::linear(k), boot);
    print_estimate("kappa", kappa);
    std::cout << "kappa_band\t" << agr::interpret_kappa(kappa.value) << '\n';
    did_anything = true;
  }
  if (!scores_a.empty() || !scores_b.empty()) {
    if (scores_a.empty() || scores_b.empty())
      throw ncsagree::ConfigError(
          "stats: --scores-a and --scores-b must be given together");
    const auto x = read_column<double>(scores_a, "score");
    const auto y = read_column<double>(scores_b, "score");
    print_estimate("lcc", agr::lin_ccc(x, y));
    did_anything = true;
  }
  if (!did_anything)
    throw ncsagree::ConfigError(
        "stats: provide --classes-a/--classes-b and/or --scores-a/--scores-b");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field-normalized citation scores under multiple "
               "classification systems and their agreement"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand(
      "run", "Execute the full pipeline from a run config");
  run_cmd->add_option("--config", run_flags.config_path, "Run config JSON")
      ->required();
  run_cmd->add_option("--match-mode", run_flags.match_mode,
                      "pairwise or full");
  run_cmd->add_option("--seed", run_flags.seed, "Bootstrap seed");
  run_cmd->add_option("--bootstrap", run_flags.bootstrap,
                      "Bootstrap replicates (0 disables)");
  run_cmd->add_option("--css-iterations", run_flags.css_iterations,
                      "Truncation iterations (default 3)");
  run_cmd->add_option("--out", run_flags.out_dir, "Output directory");
  run_cmd->add_option("--workers", run_flags.workers,
                      "Worker threads (0 = all cores)");
  run_cmd->add_option("--freq-threshold", run_flags.freq_threshold,
                      "Minimum papers for the field-frequency table");

  RunFlags validate_flags;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a run config and its inputs");
  validate_cmd
      ->add_option("--config", validate_flags.config_path, "Run config JSON")
      ->required();

  std::string synth_dir;
  std::uint64_t synth_seed = 0;
  std::size_t synth_papers = 50000;
  double synth_citation_scale = 8.0;
  std::vector<std::size_t> synth_fields;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a deterministic synthetic corpus plus run config");
  synth_cmd->add_option("--out", synth_dir, "Directory for the corpus")
      ->required();
  synth_cmd->add_option("--seed", synth_seed, "Generator seed")->required();
  synth_cmd->add_option("--papers", synth_papers, "Paper count");
  synth_cmd->add_option("--citation-scale", synth_citation_scale,
                        "Mean citation scale (0 = uncited corpus)");
  synth_cmd->add_option(
      "--fields", synth_fields,
      "Override per-system field counts (six values, default preset)");

  std::string stats_classes_a, stats_classes_b, stats_scores_a, stats_scores_b;
  int stats_k = 4;
  std::uint64_t stats_seed = 0;
  int stats_bootstrap = 1000;
  auto* stats_cmd = app.add_subcommand(
      "stats", "Agreement statistics on precomputed vectors (desk checks)");
  stats_cmd->add_option("--classes-a", stats_classes_a,
                        "Class levels, one per line");
  stats_cmd->add_option("--classes-b", stats_classes_b,
                        "Class levels, one per line");
  stats_cmd->add_option("--scores-a", stats_scores_a,
                        "Scores, one per line (for lcc)");
  stats_cmd->add_option("--scores-b", stats_scores_b,
                        "Scores, one per line (for lcc)");
  stats_cmd->add_option("--k", stats_k, "Number of classes (default 4)");
  stats_cmd->add_option("--seed", stats_seed, "Bootstrap seed");
  stats_cmd->add_option("--bootstrap", stats_bootstrap,
                        "Bootstrap replicates (0 disables)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto config = load_with_overrides(run_flags);
      ncsagree::pipeline::run(config);
      std::cout << "report written to " << config.out_dir.string() << '\n';
      return 0;
    }
    if (validate_cmd->parsed()) {
      const auto config =
          ncsagree::pipeline::load_run_config(validate_flags.config_path);
      const auto diags = ncsagree::pipeline::validate(config);
      if (diags.empty()) {
        std::cout << "config ok\n";
        return 0;
      }
      for (const auto& d : diags) std::cout << d << '\n';
      return static_cast<int>(ncsagree::ExitCode::config);
    }
    if (synth_cmd->parsed()) {
      auto config = ncsagree::synthetic::default_six_system_config(
          synth_seed, synth_papers);
      config.citation_scale = synth_citation_scale;
      if (!synth_fields.empty()) {
        if (synth_fields.size() != config.systems.size())
          throw ncsagree::ConfigError(
              "synth: --fields needs exactly " +
              std::to_string(config.systems.size()) + " values");
        for (std::size_t s = 0; s < synth_fields.size(); ++s)
          config.systems[s].n_fields = synth_fields[s];
      }
      const auto corpus = ncsagree::synthetic::generate_synthetic_corpus(config);
      const auto config_path =
          ncsagree::synthetic::write_synthetic_corpus(config, corpus, synth_dir);
      std::cout << "corpus written; run config: " << config_path.string()
                << '\n';
      return 0;
    }
    if (stats_cmd->parsed())
      return run_stats(stats_classes_a, stats_classes_b, stats_scores_a,
                       stats_scores_b, stats_k, stats_seed, stats_bootstrap);
  } catch (const ncsagree::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
