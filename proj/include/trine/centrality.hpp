#pragma once

#include <array>
#include <vector>

#include "trine/graph.hpp"

namespace trine {

struct HitsOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

/// Hub and authority scores, each L2-normalised over all nodes of the graph.
struct CentralityScores {
  std::array<std::vector<double>, 3> authority;
  std::array<std::vector<double>, 3> hub;
  int iterations = 0;
  bool converged = false;
  /// Set when the graph has no edges; every score is then zero.
  bool degenerate = false;

  /// H(v): the authority score.
  double score(NodeId v) const { return authority[party_index(v.party)].at(v.index); }
};

/// Weighted HITS on the symmetric cross-party adjacency of all three relations.
/// Stops when both successive-iterate L2 changes drop below tol.
CentralityScores hits(const TripartiteGraph& g, const HitsOptions& opts = {}, Exec exec = Exec::Parallel);

/// y = A x over the concatenated node ordering. Rows are independent, so the
/// parallel kernel is bit-identical to the serial one.
void adjacency_multiply(const TripartiteGraph& g, std::span<const double> x, std::span<double> y, Exec exec);

/// Number of walks launched from a node: clamp(ceil(score * scale), min_walks, max_walks).
int walk_budget(double score, int min_walks, int max_walks, double scale);

}  // namespace trine
