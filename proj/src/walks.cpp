#include "trine/walks.hpp"

#include <iostream>
#include <ostream>

namespace trine {

std::size_t TypedCorpus::token_count(Party p) const {
  std::size_t n = 0;
  for (const auto& s : of(p)) n += s.size();
  return n;
}

std::vector<NodeId> metapath_walk(const TripartiteGraph& g, NodeId start, const Metapath& metapath, int length, Rng& rng) {
  if (!g.contains(start)) throw ValidationError("walk start node is not in the graph");
  if (start.party != metapath.front()) throw ValidationError("walk start node type does not match the metapath");
  if (length < 1) throw ConfigError("walk length must be >= 1");

  std::vector<NodeId> walk;
  walk.reserve(static_cast<std::size_t>(length));
  walk.push_back(start);
  std::size_t pos = 0;
  NodeId cur = start;
  while (walk.size() < static_cast<std::size_t>(length)) {
    pos = metapath.next(pos);
    const auto candidates = g.neighbors(cur, metapath.at(pos));
    if (candidates.empty()) break;
    cur = NodeId{metapath.at(pos), candidates[uniform_index(rng, candidates.size())].index};
    walk.push_back(cur);
  }
  return walk;
}

WalkCorpus generate_corpus(const TripartiteGraph& g, std::span<const Metapath> metapaths, const CentralityScores& scores,
                           const WalkConfig& cfg, Exec exec) {
  if (metapaths.empty()) throw ConfigError("at least one metapath is required");
  WalkCorpus corpus;
  if (g.node_count() == 0) return corpus;

  const double scale = cfg.scale > 0.0 ? cfg.scale : static_cast<double>(g.node_count());
  for (auto p : kParties) {
    bool covered = false;
    for (const auto& m : metapaths) covered = covered || m.front() == p;
    if (!covered && g.node_count(p) > 0) {
      std::string msg = "no metapath starts at party " + std::to_string(party_index(p) + 1) + " ('" +
                        std::string(1, g.schema().type_char(p)) + "'); its nodes launch no walks";
      std::cerr << "warning: " << msg << '\n';
      corpus.warnings.push_back(std::move(msg));
    }
  }

  // Task list in canonical order: node (T1, T2, T3 by index), then metapath.
  struct Task {
    NodeId node;
    std::uint32_t metapath;
    int walks;
    std::size_t first;
  };
  std::vector<Task> tasks;
  std::size_t total = 0;
  for (auto p : kParties) {
    for (std::uint32_t i = 0; i < g.node_count(p); ++i) {
      const NodeId v{p, i};
      for (std::uint32_t m = 0; m < metapaths.size(); ++m) {
        if (metapaths[m].front() != p) continue;
        const int w = walk_budget(scores.score(v), cfg.min_walks, cfg.max_walks, scale);
        tasks.push_back(Task{v, m, w, total});
        total += static_cast<std::size_t>(w);
      }
    }
  }

  corpus.sequences.resize(total);
  corpus.origins.resize(total);
  auto run = [&](const Task& t) {
    for (int k = 0; k < t.walks; ++k) {
      Rng rng(derive_seed(cfg.seed, 0x77616c6bULL, t.metapath, g.global_index(t.node), k));
      const auto slot = t.first + static_cast<std::size_t>(k);
      corpus.sequences[slot] = metapath_walk(g, t.node, metapaths[t.metapath], cfg.length, rng);
      corpus.origins[slot] = WalkOrigin{t.metapath, t.node, static_cast<std::uint32_t>(k)};
    }
  };

  const auto ntasks = static_cast<std::ptrdiff_t>(tasks.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t t = 0; t < ntasks; ++t) run(tasks[static_cast<std::size_t>(t)]);
  } else {
    for (std::ptrdiff_t t = 0; t < ntasks; ++t) run(tasks[static_cast<std::size_t>(t)]);
  }
  return corpus;
}

TypedCorpus filter_by_type(const WalkCorpus& corpus) {
  TypedCorpus typed;
  for (const auto& walk : corpus.sequences) {
    std::array<std::vector<std::uint32_t>, 3> parts;
    for (const auto& v : walk) parts[party_index(v.party)].push_back(v.index);
    for (std::size_t p = 0; p < 3; ++p)
      if (!parts[p].empty()) typed.sequences[p].push_back(std::move(parts[p]));
  }
  return typed;
}

void write_walks(std::ostream& out, const WalkCorpus& corpus, const TripartiteGraph& g) {
  for (const auto& walk : corpus.sequences) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << g.label(walk[i]);
    }
    out << '\n';
  }
}

}  // namespace trine
