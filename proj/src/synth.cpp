#include "trine/synth.hpp"

#include <array>
#include <string>

namespace trine {

TripartiteGraph planted_graph(const SynthConfig& cfg, const Schema& schema) {
  if (cfg.users < 0 || cfg.tags < 0 || cfg.items < 0) throw ConfigError("party sizes must be >= 0");
  if (cfg.communities < 1) throw ConfigError("need at least one community");
  if (!(cfg.p_in >= 0.0 && cfg.p_in <= 1.0 && cfg.p_out >= 0.0 && cfg.p_out <= 1.0))
    throw ConfigError("edge probabilities must lie in [0, 1]");

  GraphBuilder builder(schema);
  const std::array<int, 3> sizes{cfg.users, cfg.tags, cfg.items};
  for (auto p : kParties)
    for (int i = 0; i < sizes[party_index(p)]; ++i) builder.add_node(std::string(1, schema.type_char(p)) + std::to_string(i));

  Rng rng(derive_seed(cfg.seed, 0x73796e7468ULL));
  for (auto r : kRelations) {
    const auto [pa, pb] = relation_parties(r);
    for (int i = 0; i < sizes[party_index(pa)]; ++i) {
      for (int j = 0; j < sizes[party_index(pb)]; ++j) {
        const double p = (i % cfg.communities) == (j % cfg.communities) ? cfg.p_in : cfg.p_out;
        if (uniform01(rng) < p)
          builder.add_edge(NodeId{pa, static_cast<std::uint32_t>(i)}, NodeId{pb, static_cast<std::uint32_t>(j)}, 1.0);
      }
    }
  }
  return builder.build();
}

}  // namespace trine
