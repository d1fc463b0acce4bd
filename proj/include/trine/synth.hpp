#pragma once

#include <cstdint>

#include "trine/graph.hpp"

namespace trine {

/// Planted-community tripartite benchmark: node i of every party belongs to
/// community i % communities; each cross-party pair is linked with p_in inside
/// a community and p_out across communities, weight 1.
struct SynthConfig {
  int users = 300;  // T1
  int tags = 60;    // T2
  int items = 30;   // T3
  int communities = 3;
  double p_in = 0.3;
  double p_out = 0.02;
  std::uint64_t seed = 1;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

TripartiteGraph planted_graph(const SynthConfig& cfg, const Schema& schema = {});

}  // namespace trine
