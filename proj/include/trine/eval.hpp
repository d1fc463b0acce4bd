#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "trine/graph.hpp"
#include "trine/matrix.hpp"
#include "trine/trainer.hpp"

namespace trine {

/// Componentwise mean of two embedding rows.
std::vector<double> edge_embedding(const EmbeddingStore& store, NodeId u, NodeId v);

struct LinkSample {
  NodeId a;
  NodeId b;
  int label = 0;  // 1 = observed edge, 0 = sampled non-edge
};

/// All edges of `relation` as positives plus ceil(neg_ratio * |E_r|) distinct
/// non-edges drawn uniformly. Throws ValidationError when too few non-edges exist.
std::vector<LinkSample> make_link_dataset(const TripartiteGraph& g, Relation relation, double neg_ratio, Rng& rng);

/// Label-stratified fold id per sample.
std::vector<int> kfold_split(std::span<const int> labels, int folds, Rng& rng);

struct LogisticConfig {
  double l2 = 1e-4;
  double tol = 1e-6;
  int max_iter = 10000;
};

/// Binary logistic regression with an unpenalised intercept, fit by full-batch
/// gradient descent on mean log-loss + l2/2 |w|^2.
class LogisticRegression {
 public:
  /// Throws ValidationError unless both labels occur.
  void fit(const Matrix& x, std::span<const int> y, const LogisticConfig& cfg = {});
  double predict_proba(std::span<const double> features) const;

  std::span<const double> weights() const noexcept { return w_; }
  double bias() const noexcept { return b_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> w_;
  double b_ = 0.0;
  int iterations_ = 0;
};

/// Rank-statistic AUC with mid-ranks for ties. Throws MetricError on single-class input.
double auc_roc(std::span<const double> scores, std::span<const int> labels);
/// Step-wise area under the precision-recall curve (tied scores form one step).
double auc_pr(std::span<const double> scores, std::span<const int> labels);
/// F1 of the rule score >= threshold.
double f1_score(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct EvalConfig {
  int folds = 5;
  double neg_ratio = 1.0;
  double threshold = 0.5;
  LogisticConfig classifier;
  std::uint64_t seed = 1;
};

struct FoldMetrics {
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double f1 = 0.0;
  std::size_t test_positives = 0;
  std::size_t test_negatives = 0;
};

struct EvalReport {
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Link prediction with pre-computed embeddings: dataset, stratified folds,
/// one classifier per fold.
EvalReport evaluate(const EmbeddingStore& store, const TripartiteGraph& g, Relation relation, const EvalConfig& cfg,
                    Exec exec = Exec::Parallel);

enum class EmbeddingSource { Trained, RandomControl };

/// Leakage-safe protocol: each fold's test positives are removed from the graph
/// before embeddings are trained for that fold.
EvalReport evaluate_end_to_end(const TripartiteGraph& g, std::span<const Metapath> metapaths, const TrainConfig& train_cfg,
                               Relation relation, const EvalConfig& cfg, EmbeddingSource source = EmbeddingSource::Trained,
                               Exec exec = Exec::Parallel);

/// `key = value` lines.
void write_report(std::ostream& out, const EvalReport& report);
/// Human-readable per-fold table.
void print_report(std::ostream& out, const EvalReport& report);

}  // namespace trine
