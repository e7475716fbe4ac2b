#pragma once

#include <span>
#include <string>
#include <vector>

namespace ncsagree::css {

struct CssThresholds {
  std::vector<double> means;  // m_1..m_iterations, non-decreasing

  int num_classes() const { return static_cast<int>(means.size()) + 1; }
};

// Iterated mean truncation: m_1 = mean of all scores, m_{j+1} = mean of the
// part >= m_j. Scores equal to the running mean stay in the truncated part.
CssThresholds compute_thresholds(std::span<const double> scores,
                                 int iterations = 3);

// Class 1 strictly below m_1, top class at or above the last mean, otherwise
// the half-open band [m_{j-1}, m_j).
int assign_class(double score, const CssThresholds& thresholds);
std::vector<int> assign_classes(std::span<const double> scores,
                                const CssThresholds& thresholds);

// Pure function of (level, class count); the four-class labels follow the
// poorly/fairly/remarkably/outstandingly cited scale.
std::string class_label(int level, int num_classes);

}  // namespace ncsagree::css
