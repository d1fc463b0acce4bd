#pragma once

#include <sstream>
#include <string>

#include "trine/common.hpp"
#include "trine/graph.hpp"

namespace trine::testing {

inline TripartiteGraph graph_from(const std::string& text, const Schema& schema = {}) {
  std::istringstream in(text);
  return parse_edge_list(in, schema);
}

/// A graph consistent with the worked neighbor example: the P-neighbors of u1
/// are {p1, p3}; two metapath steps from u1 reach {u2, u3, c1, c3}.
inline TripartiteGraph figure_one_graph() {
  return graph_from(
      "u1 p1\n"
      "u1 p3\n"
      "u2 p1\n"
      "u3 p3\n"
      "p1 c1\n"
      "p3 c3\n"
      "u2 p2\n"
      "p2 c2\n"
      "u3 c2\n");
}

/// Random tripartite graph with the given party sizes; each cross pair linked
/// with probability p and weight in [0.5, 2.5).
inline TripartiteGraph random_graph(std::uint64_t seed, int n1, int n2, int n3, double p, bool weighted = true) {
  GraphBuilder b;
  const std::array<int, 3> n{n1, n2, n3};
  const char chars[3] = {'u', 'p', 'c'};
  for (std::size_t k = 0; k < 3; ++k)
    for (int i = 0; i < n[k]; ++i) b.add_node(std::string(1, chars[k]) + std::to_string(i));
  Rng rng(seed);
  for (auto r : kRelations) {
    const auto [pa, pb] = relation_parties(r);
    for (int i = 0; i < n[party_index(pa)]; ++i)
      for (int j = 0; j < n[party_index(pb)]; ++j)
        if (uniform01(rng) < p)
          b.add_edge(NodeId{pa, static_cast<std::uint32_t>(i)}, NodeId{pb, static_cast<std::uint32_t>(j)},
                     weighted ? 0.5 + 2.0 * uniform01(rng) : 1.0);
  }
  return b.build();
}

}  // namespace trine::testing
