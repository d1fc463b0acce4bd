#pragma once

#include <span>

namespace trine::testing {

/// O(n^2) AUC: fraction of (positive, negative) pairs ranked correctly, ties count half.
inline double pair_auc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace trine::testing
