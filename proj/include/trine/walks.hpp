#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trine/centrality.hpp"
#include "trine/graph.hpp"

namespace trine {

struct WalkConfig {
  int length = 32;
  int min_walks = 1;
  int max_walks = 32;
  /// Multiplier applied to H(v) before clamping; <= 0 means "use |V|".
  double scale = 0.0;
  std::uint64_t seed = 1;
};

struct WalkOrigin {
  std::uint32_t metapath = 0;
  NodeId start;
  std::uint32_t walk_index = 0;
};

/// Raw metapath-guided walks plus where each one came from.
struct WalkCorpus {
  std::vector<std::vector<NodeId>> sequences;
  std::vector<WalkOrigin> origins;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return sequences.size(); }
};

/// Per-party homogeneous sequences; entries are node indices within the party.
struct TypedCorpus {
  std::array<std::vector<std::vector<std::uint32_t>>, 3> sequences;

  const std::vector<std::vector<std::uint32_t>>& of(Party p) const { return sequences[party_index(p)]; }
  std::size_t token_count(Party p) const;
};

/// One metapath-guided walk of at most `length` nodes starting at `start`.
/// Each step picks uniformly among the current node's neighbors of the next
/// metapath type; a walk stops early when no such neighbor exists.
std::vector<NodeId> metapath_walk(const TripartiteGraph& g, NodeId start, const Metapath& metapath, int length, Rng& rng);

/// Launches walk_budget(H(v)) walks from every node for every metapath that
/// starts at the node's type. Every walk owns an RNG stream derived from
/// (seed, metapath, node, walk index), so the result is independent of `exec`.
WalkCorpus generate_corpus(const TripartiteGraph& g, std::span<const Metapath> metapaths, const CentralityScores& scores,
                           const WalkConfig& cfg, Exec exec = Exec::Parallel);

/// Splits every walk into its per-party subsequences, preserving order.
TypedCorpus filter_by_type(const WalkCorpus& corpus);

/// One walk per line, space-separated labels.
void write_walks(std::ostream& out, const WalkCorpus& corpus, const TripartiteGraph& g);

}  // namespace trine
