#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncsagree/css.hpp"

namespace ncsagree::agreement {

struct ContingencyTable {
  int k = 4;
  std::string row_system;
  std::string col_system;
  std::vector<std::int64_t> counts;  // row-major k*k

  std::int64_t at(int i, int j) const { return counts[i * k + j]; }
  std::int64_t& at(int i, int j) { return counts[i * k + j]; }
  std::int64_t total() const;
  std::int64_t trace() const;
  ContingencyTable transposed() const;
};

// Cell (i, j) counts papers in class i+1 under A and class j+1 under B.
ContingencyTable contingency(std::span<const int> classes_a,
                             std::span<const int> classes_b, int k,
                             std::string row_system = {},
                             std::string col_system = {});

double percent_agreement(const ContingencyTable& table);

struct WeightMatrix {
  int k = 4;
  std::vector<double> w;  // row-major, symmetric, diagonal 1

  double at(int i, int j) const { return w[i * k + j]; }
  // 1 - |i-j|/k: at k=4 the 1/0.75/0.5/0.25 scheme.
  static WeightMatrix linear(int k);
};

struct Estimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();

  bool has_ci() const { return !std::isnan(ci_low) && !std::isnan(ci_high); }
};

struct BootstrapSpec {
  std::uint64_t seed = 0;
  int replicates = 1000;
  unsigned workers = 1;
  std::uint64_t stream = 0;  // distinguishes independent uses of one seed
};

// kappa = (p_o - p_e) / (1 - p_e) with p_o = sum w_ij p_ij and
// p_e = sum w_ij p_i. p_.j. All mass weighted-fully-agreeing with p_o = 1
// yields 1; p_e = 1 with p_o < 1 is a degeneracy error.
double weighted_kappa_point(const ContingencyTable& table,
                            const WeightMatrix& weights);

// Point estimate plus seeded percentile-bootstrap CI over papers.
Estimate weighted_kappa(const ContingencyTable& table,
                        const WeightMatrix& weights, const BootstrapSpec& boot);

double lin_ccc_point(std::span<const double> x, std::span<const double> y);

// 95% CI per Lin (1989): Fisher z transform with the asymptotic standard
// error, back-transformed.
Estimate lin_ccc(std::span<const double> x, std::span<const double> y);

Estimate lin_ccc_bootstrap(std::span<const double> x, std::span<const double> y,
                           const BootstrapSpec& boot);

// Landis-Koch band of the value after rounding to two decimals; each band is
// closed at its printed upper endpoint.
std::string_view interpret_kappa(double value);

struct AgreementResult {
  std::string system_a;
  std::string system_b;
  std::int64_t n = 0;
  ContingencyTable table;
  double percent = 0.0;
  Estimate kappa;
  std::string kappa_band;
  Estimate lcc;
  std::string match_mode;
  std::uint64_t bootstrap_seed = 0;
  int bootstrap_replicates = 0;
};

struct SystemScores {
  std::string system_id;
  std::vector<double> scores;  // aligned over the shared paper set
};

struct CompareOptions {
  int css_iterations = 3;
  int bootstrap_replicates = 1000;  // 0 disables the kappa/lcc bootstrap CI
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool lcc_bootstrap_ci = false;  // default: Fisher z interval
  std::string match_mode = "full";
  // Override: classify with these thresholds instead of recomputing on the
  // analysis population (one entry per system, aligned with the inputs).
  const std::vector<css::CssThresholds>* fixed_thresholds = nullptr;
};

AgreementResult compare_pair(const SystemScores& a, const SystemScores& b,
                             const CompareOptions& opts,
                             std::uint64_t pair_stream,
                             const css::CssThresholds* thresholds_a = nullptr,
                             const css::CssThresholds* thresholds_b = nullptr);

// All unordered pairs of the given systems over one shared paper set; pair
// (i, j), i < j, uses stream index of its position in the enumeration.
std::vector<AgreementResult> pairwise_compare(
    const std::vector<SystemScores>& systems, const CompareOptions& opts);

}  // namespace ncsagree::agreement
