#include "trine/trainer.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <optional>

namespace trine {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (dim < 1) fail("dim must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail("learning rate must be > 0");
  if (!(gamma >= 0.0)) fail("gamma must be >= 0");
  for (double a : alpha)
    if (!(a >= 0.0)) fail("alpha weights must be >= 0");
  for (double b : beta)
    if (!(b >= 0.0)) fail("beta weights must be >= 0");
  if (negatives < 0) fail("negatives must be >= 0");
  if (window < 1) fail("window must be >= 1");
  if (walk_length < 1) fail("walk length must be >= 1");
  if (min_walks < 1) fail("min walks must be >= 1");
  if (min_walks > max_walks) fail("min walks exceeds max walks");
  if (!(power > 0.0)) fail("power must be > 0");
  if (bucket_fraction < 0.0 || bucket_fraction >= 1.0) fail("bucket fraction must lie in [0, 1)");
  if (contexts_per_edge < 0) fail("contexts per edge must be >= 0");
  if (epochs < 0) fail("epochs must be >= 0");
  if (!(tol > 0.0 && tol < 1.0)) fail("tol must lie in (0, 1)");
  if (hits_max_iter < 1) fail("hits max iterations must be >= 1");
  if (!(hits_tol > 0.0)) fail("hits tol must be > 0");
  if (loss_pairs < 0) fail("loss pairs must be >= 0");
}

std::size_t EmbeddingStore::dim() const noexcept {
  for (const auto& m : node)
    if (m.cols()) return m.cols();
  return 0;
}

bool EmbeddingStore::all_finite() const {
  for (const auto* mats : {&node, &context})
    for (const auto& m : *mats)
      for (double x : m.data())
        if (!std::isfinite(x)) return false;
  return true;
}

EmbeddingStore init_embeddings(const TripartiteGraph& g, const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto d = static_cast<std::size_t>(cfg.dim);
  const double half = 0.5 / static_cast<double>(d);
  EmbeddingStore store;
  for (auto p : kParties) {
    const auto pi = party_index(p);
    store.node[pi] = Matrix(g.node_count(p), d);
    store.context[pi] = Matrix(g.node_count(p), d);
  }
  for (auto* mats : {&store.node, &store.context})
    for (auto& m : *mats)
      for (double& x : m.data()) x = (2.0 * uniform01(rng) - 1.0) * half;
  return store;
}

namespace {

double clip_step(double s) { return std::clamp(s, -kMaxStep, kMaxStep); }

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NonFiniteError(std::string("non-finite parameter after ") + what);
}

}  // namespace

void explicit_step(std::span<double> u, std::span<double> v, double weight, double coef, double lr) {
  // d/du [c w log s(u.v)] = c w s(-u.v) v, and symmetrically for v.
  const double step = clip_step(lr * coef * weight * sigmoid(-dot(u, v)));
  if (step == 0.0) return;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = u[i];
    u[i] += step * v[i];
    v[i] += step * ui;
  }
}

void explicit_update(EmbeddingStore& store, const Edge& e, const TrainConfig& cfg, double lr) {
  const auto r = relation_between(e.src.party, e.dst.party);
  auto u = store.vec(e.src);
  auto v = store.vec(e.dst);
  explicit_step(u, v, e.weight, cfg.gamma * cfg.beta[relation_index(r)], lr);
  require_finite(u, "explicit update");
  require_finite(v, "explicit update");
}

void implicit_update(EmbeddingStore& store, Party party, std::uint32_t center, std::uint32_t context,
                     std::span<const std::uint32_t> negatives, double alpha, double lr) {
  auto& ctx = store.context[party_index(party)];
  auto x = store.node[party_index(party)].row(center);
  const auto d = x.size();

  const auto count = negatives.size() + 1;
  std::vector<double> steps(count);
  std::vector<double> acc(d, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const auto z = k == 0 ? context : negatives[k - 1];
    const double label = k == 0 ? 1.0 : 0.0;
    const auto theta = ctx.row(z);
    steps[k] = clip_step(lr * alpha * (label - sigmoid(dot(x, theta))));
    for (std::size_t i = 0; i < d; ++i) acc[i] += steps[k] * theta[i];
  }
  for (std::size_t k = 0; k < count; ++k) {
    auto theta = ctx.row(k == 0 ? context : negatives[k - 1]);
    for (std::size_t i = 0; i < d; ++i) theta[i] += steps[k] * x[i];
    require_finite(theta, "implicit update");
  }
  for (std::size_t i = 0; i < d; ++i) x[i] += acc[i];
  require_finite(x, "implicit update");
}

// ---------------------------------------------------------------------------

bool LossReport::finite() const {
  if (!std::isfinite(objective)) return false;
  for (double v : implicit)
    if (!std::isfinite(v)) return false;
  for (double v : explicit_)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

/// Positions of every token that has at least one window partner.
class OccurrenceIndex {
 public:
  struct Slot {
    std::uint32_t seq;
    std::uint32_t pos;
  };

  OccurrenceIndex(const TypedCorpus& typed, const std::array<std::size_t, 3>& node_counts) : typed_(&typed) {
    for (auto p : kParties) {
      auto& per_node = by_node_[party_index(p)];
      per_node.resize(node_counts[party_index(p)]);
      const auto& seqs = typed.of(p);
      for (std::uint32_t s = 0; s < seqs.size(); ++s) {
        if (seqs[s].size() < 2) continue;
        for (std::uint32_t i = 0; i < seqs[s].size(); ++i) {
          per_node.at(seqs[s][i]).push_back({s, i});
          all_[party_index(p)].push_back({s, i});
        }
      }
    }
  }

  bool has_context(Party p, std::uint32_t node) const { return !by_node_[party_index(p)][node].empty(); }

  /// Uniform occurrence of `node`, then a uniform partner inside its window.
  ContextPair sample_for(Party p, std::uint32_t node, int window, Rng& rng) const {
    const auto& slots = by_node_[party_index(p)][node];
    return partner(p, slots[uniform_index(rng, slots.size())], window, rng);
  }

  ContextPair sample_any(Party p, int window, Rng& rng) const {
    const auto& slots = all_[party_index(p)];
    return partner(p, slots[uniform_index(rng, slots.size())], window, rng);
  }

 private:
  ContextPair partner(Party p, Slot s, int window, Rng& rng) const {
    const auto& seq = typed_->of(p)[s.seq];
    const auto i = static_cast<std::ptrdiff_t>(s.pos);
    const auto lo = std::max<std::ptrdiff_t>(0, i - window);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(seq.size()) - 1, i + window);
    auto j = lo + static_cast<std::ptrdiff_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo)));
    if (j >= i) ++j;
    return {seq[s.pos], seq[static_cast<std::size_t>(j)]};
  }

  const TypedCorpus* typed_;
  std::array<std::vector<std::vector<Slot>>, 3> by_node_;
  std::array<std::vector<Slot>, 3> all_;
};

std::array<std::size_t, 3> corpus_node_counts(const TypedCorpus& typed) {
  std::array<std::size_t, 3> counts{0, 0, 0};
  for (auto p : kParties)
    for (const auto& seq : typed.of(p))
      for (auto v : seq) counts[party_index(p)] = std::max<std::size_t>(counts[party_index(p)], v + 1);
  return counts;
}

std::vector<std::uint32_t> draw_negatives(const NegativeSampler& sampler, NodeId center, std::uint32_t context, int ns,
                                          Rng& rng, bool& degenerate) {
  try {
    return sampler.sample_negatives(center, ns, rng, context);
  } catch (const SamplerError&) {
    degenerate = true;
    return {};
  }
}

}  // namespace

LossProbe make_loss_probe(const TypedCorpus& typed, const NegativeSampler& sampler, const TrainConfig& cfg) {
  LossProbe probe;
  Rng rng(derive_seed(cfg.seed, 0x6c6f7373ULL));
  bool degenerate = false;
  std::optional<OccurrenceIndex> index;
  for (auto p : kParties) {
    auto& out = probe.samples[party_index(p)];
    std::size_t total = 0;
    for (const auto& seq : typed.of(p)) {
      const auto n = seq.size();
      const auto k = static_cast<std::size_t>(cfg.window);
      for (std::size_t i = 0; i < n; ++i) total += std::min(n - 1, i + k) - (i >= k ? i - k : 0);
    }
    auto add = [&](ContextPair cp) {
      auto negs = draw_negatives(sampler, NodeId{p, cp.center}, cp.context, cfg.negatives, rng, degenerate);
      out.push_back({cp.center, cp.context, std::move(negs)});
    };
    if (total <= static_cast<std::size_t>(cfg.loss_pairs)) {
      for (const auto& seq : typed.of(p))
        for (const auto& cp : context_pairs(seq, cfg.window)) add(cp);
    } else {
      if (!index) index.emplace(typed, corpus_node_counts(typed));
      for (int s = 0; s < cfg.loss_pairs; ++s) add(index->sample_any(p, cfg.window, rng));
    }
  }
  return probe;
}

LossReport compute_loss(const EmbeddingStore& store, const TripartiteGraph& g, const LossProbe& probe, const TrainConfig& cfg) {
  LossReport rep;
  for (auto r : kRelations) {
    double o = 0.0;
    for (const auto& e : g.edges(r)) o -= e.weight * log_sigmoid(dot(store.vec(e.src), store.vec(e.dst)));
    rep.explicit_[relation_index(r)] = o;
  }
  for (auto p : kParties) {
    const auto pi = party_index(p);
    double o = 0.0;
    for (const auto& s : probe.samples[pi]) {
      const auto x = store.node[pi].row(s.center);
      o -= log_sigmoid(dot(x, store.context[pi].row(s.context)));
      for (auto z : s.negatives) o -= log_sigmoid(-dot(x, store.context[pi].row(z)));
    }
    rep.implicit[pi] = o;
  }
  double weighted = 0.0;
  for (std::size_t i = 0; i < 3; ++i) weighted += cfg.alpha[i] * rep.implicit[i] + cfg.gamma * cfg.beta[i] * rep.explicit_[i];
  rep.objective = -weighted;
  return rep;
}

LossReport compute_loss(const EmbeddingStore& store, const TripartiteGraph& g, const TypedCorpus& typed,
                        const NegativeSampler& sampler, const TrainConfig& cfg) {
  return compute_loss(store, g, make_loss_probe(typed, sampler, cfg), cfg);
}

// ---------------------------------------------------------------------------

TrainingData prepare_training(const TripartiteGraph& g, std::span<const Metapath> metapaths, const TrainConfig& cfg, Exec exec) {
  cfg.validate();
  TrainingData data;
  data.scores = hits(g, HitsOptions{cfg.hits_max_iter, cfg.hits_tol}, exec);
  data.corpus = generate_corpus(g, metapaths, data.scores, cfg.walk_config(), exec);
  data.typed = filter_by_type(data.corpus);
  data.sampler = build_negative_sampler(data.typed, g, cfg.sampler_config());
  return data;
}

TrainResult train(const TripartiteGraph& g, std::span<const Metapath> metapaths, const TrainConfig& cfg, Exec exec) {
  cfg.validate();
  if (g.edge_count() == 0) throw ValidationError("cannot train on a graph without edges");
  return train(g, prepare_training(g, metapaths, cfg, exec), cfg);
}

TrainResult train(const TripartiteGraph& g, const TrainingData& data, const TrainConfig& cfg) {
  cfg.validate();
  if (g.edge_count() == 0) throw ValidationError("cannot train on a graph without edges");

  TrainResult result;
  result.warnings = data.corpus.warnings;
  result.warnings.insert(result.warnings.end(), data.sampler.warnings.begin(), data.sampler.warnings.end());

  Rng init_rng(derive_seed(cfg.seed, 0x696e6974ULL));
  result.store = init_embeddings(g, cfg, init_rng);
  auto& store = result.store;

  std::array<std::size_t, 3> counts{};
  for (auto p : kParties) counts[party_index(p)] = g.node_count(p);
  const OccurrenceIndex occurrences(data.typed, counts);
  const LossProbe probe = make_loss_probe(data.typed, data.sampler, cfg);
  result.history.push_back(compute_loss(store, g, probe, cfg));

  const double total_updates = static_cast<double>(cfg.epochs) * static_cast<double>(g.edge_count());
  double done = 0.0;
  bool degenerate = false;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const EmbeddingStore checkpoint = store;
    Rng rng(derive_seed(cfg.seed, 0x736764ULL, epoch));
    try {
      for (auto r : kRelations) {
        const auto edges = g.edges(r);
        std::vector<std::size_t> order(edges.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng order_rng(derive_seed(cfg.seed, 0x6f72646572ULL, epoch, relation_index(r)));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(order_rng, i)]);

        for (auto idx : order) {
          const double lr = cfg.lr_decay ? cfg.lr * std::max(0.01, 1.0 - done / total_updates) : cfg.lr;
          done += 1.0;
          const auto& e = edges[idx];
          explicit_update(store, e, cfg, lr);
          for (const NodeId endpoint : {e.src, e.dst}) {
            const auto p = endpoint.party;
            if (!occurrences.has_context(p, endpoint.index)) continue;
            for (int c = 0; c < cfg.contexts_per_edge; ++c) {
              const auto cp = occurrences.sample_for(p, endpoint.index, cfg.window, rng);
              const auto negs = draw_negatives(data.sampler, endpoint, cp.context, cfg.negatives, rng, degenerate);
              implicit_update(store, p, cp.center, cp.context, negs, cfg.alpha[party_index(p)], lr);
            }
          }
        }
      }
    } catch (const NonFiniteError& err) {
      store = checkpoint;
      result.status = TrainStatus::Diverged;
      result.diagnostic = "epoch " + std::to_string(epoch) + ": " + err.what() + "; restored the last finite checkpoint";
      break;
    }

    auto loss = compute_loss(store, g, probe, cfg);
    if (!loss.finite()) {
      store = checkpoint;
      result.status = TrainStatus::Diverged;
      result.diagnostic = "epoch " + std::to_string(epoch) + ": loss became non-finite; restored the last finite checkpoint";
      break;
    }
    const double prev = result.history.back().objective;
    result.history.push_back(loss);
    result.epochs_run = epoch;
    if (std::abs(loss.objective - prev) <= cfg.tol * std::max(std::abs(prev), 1e-300)) {
      result.status = TrainStatus::Converged;
      break;
    }
  }

  if (degenerate) {
    result.warnings.push_back("some centers had no admissible negatives; their pairs were trained without negatives");
    std::cerr << "warning: " << result.warnings.back() << '\n';
  }
  return result;
}

}  // namespace trine
