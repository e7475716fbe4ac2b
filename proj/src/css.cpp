#include "ncsagree/css.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ncsagree/errors.hpp"

namespace ncsagree::css {

namespace {

// Plain left-to-right sum over the sorted suffix. Sorting first makes the
// result independent of the input permutation.
double suffix_mean(const std::vector<double>& sorted, std::size_t lo) {
  double sum = 0.0;
  for (std::size_t i = lo; i < sorted.size(); ++i) sum += sorted[i];
  return sum / static_cast<double>(sorted.size() - lo);
}

}  // namespace

CssThresholds compute_thresholds(std::span<const double> scores,
                                 int iterations) {
  if (scores.empty())
    throw ConsistencyError("css: cannot compute thresholds of an empty score list");
  if (iterations < 1)
    throw ConfigError("css: iterations must be >= 1, got " +
                      std::to_string(iterations));
  for (double s : scores)
    if (!std::isfinite(s) || s < 0.0)
      throw ConsistencyError("css: scores must be finite and non-negative");

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(iterations));
  std::size_t lo = 0;
  for (int j = 0; j < iterations; ++j) {
    if (lo >= n) {  // empty upper part: repeat the last mean
      means.push_back(means.back());
      continue;
    }
    // clamp guards against summation spill past the part's extremes
    const double m =
        std::clamp(suffix_mean(sorted, lo), sorted[lo], sorted[n - 1]);
    means.push_back(m);
    lo = static_cast<std::size_t>(
        std::lower_bound(sorted.begin() + static_cast<std::ptrdiff_t>(lo),
                         sorted.end(), m) -
        sorted.begin());
  }
  return CssThresholds{std::move(means)};
}

int assign_class(double score, const CssThresholds& thresholds) {
  if (thresholds.means.empty())
    throw ConsistencyError("css: thresholds are empty");
  int level = 1;
  for (double m : thresholds.means)
    if (score >= m) ++level;
  return level;
}

std::vector<int> assign_classes(std::span<const double> scores,
                                const CssThresholds& thresholds) {
  std::vector<int> classes;
  classes.reserve(scores.size());
  for (double s : scores) classes.push_back(assign_class(s, thresholds));
  return classes;
}

std::string class_label(int level, int num_classes) {
  if (num_classes == 4) {
    switch (level) {
      case 1: return "poorly cited";
      case 2: return "fairly cited";
      case 3: return "remarkably cited";
      case 4: return "outstandingly cited";
      default: break;
    }
  }
  return "class " + std::to_string(level);
}

}  // namespace ncsagree::css
