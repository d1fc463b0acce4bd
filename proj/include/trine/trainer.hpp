#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trine/graph.hpp"
#include "trine/matrix.hpp"
#include "trine/sampling.hpp"
#include "trine/walks.hpp"

namespace trine {

/// Logistic function, evaluated without overflow for any finite x.
inline double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(sigmoid(x)) without cancellation.
inline double log_sigmoid(double x) noexcept {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

/// Every TriNE hyperparameter.
struct TrainConfig {
  int dim = 128;
  std::array<double, 3> alpha{1.0, 1.0, 1.0};  // implicit weights per party
  std::array<double, 3> beta{1.0, 1.0, 1.0};   // explicit weights per relation
  double lr = 0.025;
  double gamma = 1.0;
  bool lr_decay = false;
  int negatives = 4;
  int window = 5;
  int walk_length = 32;
  int min_walks = 1;
  int max_walks = 32;
  double walk_scale = 0.0;  // <= 0: |V|
  double power = 0.75;
  double bucket_fraction = 0.5;
  int contexts_per_edge = 5;
  int epochs = 20;
  double tol = 1e-4;
  int hits_max_iter = 100;
  double hits_tol = 1e-8;
  int loss_pairs = 20000;
  std::uint64_t seed = 1;

  /// Throws ConfigError on any violated constraint.
  void validate() const;

  WalkConfig walk_config() const { return {walk_length, min_walks, max_walks, walk_scale, seed}; }
  SamplerConfig sampler_config() const { return {power, window, bucket_fraction}; }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Node embeddings and context vectors, one matrix per party.
struct EmbeddingStore {
  std::array<Matrix, 3> node;
  std::array<Matrix, 3> context;

  std::size_t dim() const noexcept;
  std::span<double> vec(NodeId v) { return node[party_index(v.party)].row(v.index); }
  std::span<const double> vec(NodeId v) const { return node[party_index(v.party)].row(v.index); }
  std::span<double> ctx(NodeId v) { return context[party_index(v.party)].row(v.index); }
  std::span<const double> ctx(NodeId v) const { return context[party_index(v.party)].row(v.index); }

  bool all_finite() const;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;
};

/// Entries i.i.d. uniform in [-0.5/d, 0.5/d].
EmbeddingStore init_embeddings(const TripartiteGraph& g, const TrainConfig& cfg, Rng& rng);

/// Largest magnitude of a single SGD scalar (lr * coefficient); keeps extreme
/// weights or learning rates from blowing the parameters up.
inline constexpr double kMaxStep = 1.0;

/// Ascent step on coef * w * log sigmoid(u.v) for both endpoint vectors.
void explicit_step(std::span<double> u, std::span<double> v, double weight, double coef, double lr);

/// Explicit update for one observed edge; coefficient gamma * beta[relation].
void explicit_update(EmbeddingStore& store, const Edge& e, const TrainConfig& cfg, double lr);
inline void explicit_update(EmbeddingStore& store, const Edge& e, const TrainConfig& cfg) {
  explicit_update(store, e, cfg, cfg.lr);
}

/// Skip-gram ascent step on alpha * [log s(x.c) + sum_z log s(-x.z)] for the
/// center embedding x and the context vectors of {context} U negatives.
/// Every coefficient is computed from the pre-step parameters.
void implicit_update(EmbeddingStore& store, Party party, std::uint32_t center, std::uint32_t context,
                     std::span<const std::uint32_t> negatives, double alpha, double lr);

struct LossReport {
  std::array<double, 3> implicit{0.0, 0.0, 0.0};  // O1..O3, negative log-likelihoods
  std::array<double, 3> explicit_{0.0, 0.0, 0.0};  // O4..O6, KL terms without constants
  double objective = 0.0;                          // L, to be increased

  bool finite() const;
};

/// Fixed evaluation draw of window pairs and negatives used to monitor O1..O3.
struct LossProbe {
  struct Sample {
    std::uint32_t center;
    std::uint32_t context;
    std::vector<std::uint32_t> negatives;
  };
  std::array<std::vector<Sample>, 3> samples;
};

LossProbe make_loss_probe(const TypedCorpus& typed, const NegativeSampler& sampler, const TrainConfig& cfg);

LossReport compute_loss(const EmbeddingStore& store, const TripartiteGraph& g, const LossProbe& probe, const TrainConfig& cfg);
LossReport compute_loss(const EmbeddingStore& store, const TripartiteGraph& g, const TypedCorpus& typed,
                        const NegativeSampler& sampler, const TrainConfig& cfg);

enum class TrainStatus { Converged, EpochsExhausted, Diverged };

struct TrainResult {
  EmbeddingStore store;
  /// history[0] is the loss at initialisation, history[e] after epoch e.
  std::vector<LossReport> history;
  int epochs_run = 0;
  TrainStatus status = TrainStatus::EpochsExhausted;
  std::string diagnostic;
  std::vector<std::string> warnings;
};

/// Everything derived from the graph before SGD starts.
struct TrainingData {
  CentralityScores scores;
  WalkCorpus corpus;
  TypedCorpus typed;
  NegativeSampler sampler;
};

TrainingData prepare_training(const TripartiteGraph& g, std::span<const Metapath> metapaths, const TrainConfig& cfg,
                              Exec exec = Exec::Parallel);

/// Full joint optimisation. Deterministic for a fixed config; `exec` only
/// affects corpus generation, which is itself exec-independent.
TrainResult train(const TripartiteGraph& g, std::span<const Metapath> metapaths, const TrainConfig& cfg,
                  Exec exec = Exec::Parallel);
TrainResult train(const TripartiteGraph& g, const TrainingData& data, const TrainConfig& cfg);

}  // namespace trine
