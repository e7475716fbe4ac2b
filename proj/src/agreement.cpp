#include "ncsagree/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "ncsagree/errors.hpp"
#include "ncsagree/parallel.hpp"
#include "ncsagree/rng.hpp"

namespace ncsagree::agreement {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Neumaier-compensated sum; keeps the 1e-12 invariants honest at corpus scale.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double get() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct KappaSums {
  double observed = 0.0;  // sum w_ij n_ij
  double expected = 0.0;  // sum w_ij n_i. n_.j
  double n = 0.0;
};

KappaSums kappa_sums(std::span<const std::int64_t> counts, int k,
                     const WeightMatrix& weights) {
  std::vector<double> row(k, 0.0), col(k, 0.0);
  double n = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double c = static_cast<double>(counts[i * k + j]);
      row[i] += c;
      col[j] += c;
      n += c;
    }
  KappaSums s;
  s.n = n;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      s.observed += weights.at(i, j) * static_cast<double>(counts[i * k + j]);
      s.expected += weights.at(i, j) * row[i] * col[j];
    }
  return s;
}

// kappa = (p_o - p_e)/(1 - p_e) evaluated as (n*S_o - S_e)/(n^2 - S_e); for
// quarter-step weights and realistic totals every term is an exact double.
double kappa_from_counts(std::span<const std::int64_t> counts, int k,
                         const WeightMatrix& weights) {
  const KappaSums s = kappa_sums(counts, k, weights);
  const double num = s.n * s.observed - s.expected;
  const double den = s.n * s.n - s.expected;
  if (den == 0.0) {
    if (num == 0.0) return 1.0;  // p_o = p_e = 1
    throw DegeneracyError("kappa: chance agreement is 1 but observed is not");
  }
  return num / den;
}

void validate_weights(const ContingencyTable& table,
                      const WeightMatrix& weights) {
  if (weights.k != table.k)
    throw ConsistencyError("kappa: weight matrix size does not match table");
  for (int i = 0; i < weights.k; ++i) {
    if (weights.at(i, i) != 1.0)
      throw ConsistencyError("kappa: weight diagonal must be 1");
    for (int j = 0; j < i; ++j)
      if (weights.at(i, j) != weights.at(j, i))
        throw ConsistencyError("kappa: weight matrix must be symmetric");
  }
}

// Interpolated order statistic at p*(B+1) (type 6), clamped to the sample.
double percentile(const std::vector<double>& sorted, double p) {
  const double r = p * static_cast<double>(sorted.size() + 1);
  if (r <= 1.0) return sorted.front();
  if (r >= static_cast<double>(sorted.size())) return sorted.back();
  const auto lo = static_cast<std::size_t>(r);
  const double frac = r - static_cast<double>(lo);
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

struct Moments {
  std::size_t n = 0;
  double mean_x = 0.0, mean_y = 0.0;
  double var_x = 0.0, var_y = 0.0, cov = 0.0;  // population (1/n)
};

Moments moments(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ConsistencyError("lcc: input vectors differ in length");
  if (x.size() < 2)
    throw ConsistencyError("lcc: need at least two paired values");
  const auto n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  Moments m;
  m.n = x.size();
  m.mean_x = sx.get() / n;
  m.mean_y = sy.get() / n;
  CompensatedSum sxx, syy, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dy * dx);
  }
  m.var_x = sxx.get() / n;
  m.var_y = syy.get() / n;
  m.cov = sxy.get() / n;
  return m;
}

double lcc_from_moments(const Moments& m) {
  if (m.var_x == 0.0 && m.var_y == 0.0)
    throw DegeneracyError("lcc: both vectors are constant");
  const double shift = (m.mean_x - m.mean_y) * (m.mean_x - m.mean_y);
  return 2.0 * m.cov / (m.var_x + m.var_y + shift);
}

}  // namespace

std::int64_t ContingencyTable::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ContingencyTable::trace() const {
  std::int64_t t = 0;
  for (int i = 0; i < k; ++i) t += at(i, i);
  return t;
}

ContingencyTable ContingencyTable::transposed() const {
  ContingencyTable t;
  t.k = k;
  t.row_system = col_system;
  t.col_system = row_system;
  t.counts.assign(counts.size(), 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) t.at(j, i) = at(i, j);
  return t;
}

ContingencyTable contingency(std::span<const int> classes_a,
                             std::span<const int> classes_b, int k,
                             std::string row_system, std::string col_system) {
  if (k < 2) throw ConsistencyError("contingency: need at least 2 classes");
  if (classes_a.size() != classes_b.size())
    throw ConsistencyError("contingency: class vectors differ in length");
  if (classes_a.empty())
    throw ConsistencyError("contingency: class vectors are empty");
  ContingencyTable t;
  t.k = k;
  t.row_system = std::move(row_system);
  t.col_system = std::move(col_system);
  t.counts.assign(static_cast<std::size_t>(k) * k, 0);
  for (std::size_t p = 0; p < classes_a.size(); ++p) {
    const int a = classes_a[p];
    const int b = classes_b[p];
    if (a < 1 || a > k || b < 1 || b > k)
      throw ConsistencyError("contingency: class level out of range 1.." +
                             std::to_string(k));
    ++t.at(a - 1, b - 1);
  }
  return t;
}

double percent_agreement(const ContingencyTable& table) {
  const std::int64_t n = table.total();
  if (n <= 0) throw ConsistencyError("percent agreement: empty table");
  return static_cast<double>(table.trace()) / static_cast<double>(n);
}

WeightMatrix WeightMatrix::linear(int k) {
  if (k < 2) throw ConsistencyError("weights: need at least 2 classes");
  WeightMatrix m;
  m.k = k;
  m.w.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      m.w[i * k + j] =
          1.0 - static_cast<double>(std::abs(i - j)) / static_cast<double>(k);
  return m;
}

double weighted_kappa_point(const ContingencyTable& table,
                            const WeightMatrix& weights) {
  validate_weights(table, weights);
  if (table.total() <= 0) throw ConsistencyError("kappa: empty table");
  return kappa_from_counts(table.counts, table.k, weights);
}

Estimate weighted_kappa(const ContingencyTable& table,
                        const WeightMatrix& weights,
                        const BootstrapSpec& boot) {
  Estimate est;
  est.value = weighted_kappa_point(table, weights);
  if (boot.replicates <= 0) return est;

  const int k = table.k;
  const auto n = static_cast<std::uint64_t>(table.total());
  std::vector<double> cell_weights(table.counts.size());
  for (std::size_t c = 0; c < table.counts.size(); ++c)
    cell_weights[c] = static_cast<double>(table.counts[c]);
  const rng::AliasTable alias(cell_weights);

  std::vector<double> reps(static_cast<std::size_t>(boot.replicates));
  parallel_chunks(
      reps.size(), boot.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(k) * k);
        for (std::size_t r = begin; r < end; ++r) {
          auto g = rng::engine(rng::substream_seed(boot.seed, boot.stream, r));
          std::fill(counts.begin(), counts.end(), 0);
          for (std::uint64_t i = 0; i < n; ++i) ++counts[alias.draw(g)];
          reps[r] = kappa_from_counts(counts, k, weights);
        }
      });
  std::sort(reps.begin(), reps.end());
  est.ci_low = std::min(percentile(reps, 0.025), est.value);
  est.ci_high = std::max(percentile(reps, 0.975), est.value);
  return est;
}

double lin_ccc_point(std::span<const double> x, std::span<const double> y) {
  return lcc_from_moments(moments(x, y));
}

Estimate lin_ccc(std::span<const double> x, std::span<const double> y) {
  const Moments m = moments(x, y);
  Estimate est;
  est.value = lcc_from_moments(m);

  const double p = est.value;
  const double r = m.cov / std::sqrt(m.var_x * m.var_y);
  if (m.n < 3 || r == 0.0 || !std::isfinite(r) || std::abs(p) >= 1.0) {
    // no asymptotic interval exists; report a point interval
    est.ci_low = est.ci_high = p;
    return est;
  }
  const double u =
      (m.mean_y - m.mean_x) / std::pow(m.var_x * m.var_y, 0.25);
  const double p2 = p * p;
  const double r2 = r * r;
  double var_p = ((1.0 - r2) * p2 * (1.0 - p2) / r2 +
                  2.0 * p2 * p * (1.0 - p) * u * u / r -
                  0.5 * p2 * p2 * u * u * u * u / r2) /
                 static_cast<double>(m.n - 2);
  var_p = std::max(var_p, 0.0);
  const double se_z = std::sqrt(var_p) / (1.0 - p2);
  const double z = std::atanh(p);
  est.ci_low = std::min(std::tanh(z - kZ95 * se_z), p);
  est.ci_high = std::max(std::tanh(z + kZ95 * se_z), p);
  return est;
}

Estimate lin_ccc_bootstrap(std::span<const double> x,
                           std::span<const double> y,
                           const BootstrapSpec& boot) {
  Estimate est;
  est.value = lin_ccc_point(x, y);
  if (boot.replicates <= 0) return est;
  const std::size_t n = x.size();
  std::vector<double> reps(static_cast<std::size_t>(boot.replicates));
  parallel_chunks(
      reps.size(), boot.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> rx(n), ry(n);
        for (std::size_t r = begin; r < end; ++r) {
          auto g = rng::engine(rng::substream_seed(boot.seed, boot.stream, r));
          for (std::size_t i = 0; i < n; ++i) {
            const auto pick = rng::uniform_below(g, n);
            rx[i] = x[pick];
            ry[i] = y[pick];
          }
          try {
            reps[r] = lin_ccc_point(rx, ry);
          } catch (const DegeneracyError&) {
            reps[r] = 1.0;  // every resampled pair identical
          }
        }
      });
  std::sort(reps.begin(), reps.end());
  est.ci_low = std::min(percentile(reps, 0.025), est.value);
  est.ci_high = std::max(percentile(reps, 0.975), est.value);
  return est;
}

std::string_view interpret_kappa(double value) {
  const double r = std::round(value * 100.0) / 100.0;
  if (r < 0.0) return "poor";
  if (r <= 0.20) return "slight";
  if (r <= 0.40) return "fair";
  if (r <= 0.60) return "moderate";
  if (r <= 0.80) return "substantial";
  return "almost perfect";
}

AgreementResult compare_pair(const SystemScores& a, const SystemScores& b,
                             const CompareOptions& opts,
                             std::uint64_t pair_stream,
                             const css::CssThresholds* thresholds_a,
                             const css::CssThresholds* thresholds_b) {
  if (a.scores.size() != b.scores.size())
    throw ConsistencyError("compare: score vectors differ in length for " +
                           a.system_id + " vs " + b.system_id);
  const css::CssThresholds tha =
      thresholds_a ? *thresholds_a
                   : css::compute_thresholds(a.scores, opts.css_iterations);
  const css::CssThresholds thb =
      thresholds_b ? *thresholds_b
                   : css::compute_thresholds(b.scores, opts.css_iterations);
  if (tha.num_classes() != thb.num_classes())
    throw ConsistencyError("compare: class counts differ between systems");
  const int k = tha.num_classes();

  AgreementResult res;
  res.system_a = a.system_id;
  res.system_b = b.system_id;
  res.n = static_cast<std::int64_t>(a.scores.size());
  res.table = contingency(css::assign_classes(a.scores, tha),
                          css::assign_classes(b.scores, thb), k, a.system_id,
                          b.system_id);
  res.percent = percent_agreement(res.table);

  BootstrapSpec kappa_boot{opts.seed, opts.bootstrap_replicates, opts.workers,
                           2 * pair_stream};
  res.kappa = weighted_kappa(res.table, WeightMatrix::linear(k), kappa_boot);
  res.kappa_band = std::string(interpret_kappa(res.kappa.value));

  if (opts.lcc_bootstrap_ci && opts.bootstrap_replicates > 0) {
    BootstrapSpec lcc_boot{opts.seed, opts.bootstrap_replicates, opts.workers,
                           2 * pair_stream + 1};
    res.lcc = lin_ccc_bootstrap(a.scores, b.scores, lcc_boot);
  } else {
    res.lcc = lin_ccc(a.scores, b.scores);
  }
  res.match_mode = opts.match_mode;
  res.bootstrap_seed = opts.seed;
  res.bootstrap_replicates = opts.bootstrap_replicates;
  return res;
}

std::vector<AgreementResult> pairwise_compare(
    const std::vector<SystemScores>& systems, const CompareOptions& opts) {
  if (systems.size() < 2)
    throw ConfigError("compare: need at least 2 systems");
  if (opts.fixed_thresholds && opts.fixed_thresholds->size() != systems.size())
    throw ConsistencyError("compare: fixed thresholds do not match systems");
  std::vector<AgreementResult> results;
  results.reserve(systems.size() * (systems.size() - 1) / 2);
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    for (std::size_t j = i + 1; j < systems.size(); ++j) {
      const css::CssThresholds* tha =
          opts.fixed_thresholds ? &(*opts.fixed_thresholds)[i] : nullptr;
      const css::CssThresholds* thb =
          opts.fixed_thresholds ? &(*opts.fixed_thresholds)[j] : nullptr;
      results.push_back(
          compare_pair(systems[i], systems[j], opts, stream, tha, thb));
      ++stream;
    }
  }
  return results;
}

}  // namespace ncsagree::agreement
