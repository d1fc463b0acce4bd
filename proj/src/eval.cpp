#include "trine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace trine {

std::vector<double> edge_embedding(const EmbeddingStore& store, NodeId u, NodeId v) {
  const auto a = store.vec(u);
  const auto b = store.vec(v);
  if (a.size() != b.size()) throw ValidationError("edge endpoints have different embedding dimensions");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
  return out;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

std::vector<LinkSample> make_link_dataset(const TripartiteGraph& g, Relation relation, double neg_ratio, Rng& rng) {
  if (!(neg_ratio > 0.0)) throw ConfigError("negative ratio must be > 0");
  const auto edges = g.edges(relation);
  if (edges.empty()) throw ValidationError("relation " + relation_name(relation) + " has no edges");

  const auto [pa, pb] = relation_parties(relation);
  const std::uint64_t na = g.node_count(pa);
  const std::uint64_t nb = g.node_count(pb);
  const std::uint64_t available = na * nb - edges.size();
  const auto wanted = static_cast<std::uint64_t>(std::ceil(neg_ratio * static_cast<double>(edges.size())));
  if (wanted > available)
    throw ValidationError("relation " + relation_name(relation) + " is too dense: " + std::to_string(wanted) +
                          " negatives requested, " + std::to_string(available) + " non-edges exist");

  std::vector<LinkSample> out;
  out.reserve(edges.size() + wanted);
  std::unordered_set<std::uint64_t> taken;
  for (const auto& e : edges) {
    out.push_back({e.src, e.dst, 1});
    taken.insert(std::uint64_t{e.src.index} * nb + e.dst.index);
  }

  auto push = [&](std::uint64_t key) {
    out.push_back({NodeId{pa, static_cast<std::uint32_t>(key / nb)}, NodeId{pb, static_cast<std::uint32_t>(key % nb)}, 0});
  };
  if (2 * wanted > available) {
    // Dense: enumerate the complement and take a uniform prefix.
    std::vector<std::uint64_t> pool;
    pool.reserve(available);
    for (std::uint64_t k = 0; k < na * nb; ++k)
      if (!taken.contains(k)) pool.push_back(k);
    for (std::uint64_t i = 0; i < wanted; ++i) {
      std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
      push(pool[i]);
    }
  } else {
    for (std::uint64_t drawn = 0; drawn < wanted;) {
      const auto key = uniform_index(rng, na * nb);
      if (taken.insert(key).second) {
        push(key);
        ++drawn;
      }
    }
  }
  return out;
}

std::vector<int> kfold_split(std::span<const int> labels, int folds, Rng& rng) {
  if (folds < 2) throw ConfigError("need at least two folds");
  if (labels.size() < static_cast<std::size_t>(folds)) throw ValidationError("fewer samples than folds");
  std::vector<int> fold(labels.size(), -1);
  std::size_t next = 0;
  for (int cls : {1, 0}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if ((labels[i] != 0 ? 1 : 0) == cls) idx.push_back(i);
    shuffle(idx, rng);
    for (auto i : idx) fold[i] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
  }
  return fold;
}

// ---------------------------------------------------------------------------

void LogisticRegression::fit(const Matrix& x, std::span<const int> y, const LogisticConfig& cfg) {
  const auto n = x.rows();
  const auto d = x.cols();
  if (y.size() != n) throw ValidationError("label count does not match the feature rows");
  const auto pos = static_cast<std::size_t>(std::count_if(y.begin(), y.end(), [](int v) { return v != 0; }));
  if (pos == 0 || pos == n) throw ValidationError("logistic regression needs both labels in the training set");
  if (!(cfg.l2 >= 0.0) || !(cfg.tol > 0.0) || cfg.max_iter < 1) throw ConfigError("invalid logistic regression settings");

  // Step 1/L with L bounding the Hessian: 0.25 * lambda_max([X 1]^T [X 1] / n) + l2.
  std::vector<double> v(d + 1, 1.0), t(d + 1);
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = x.row(i);
      const double s = dot(r, std::span<const double>(v.data(), d)) + v[d];
      for (std::size_t j = 0; j < d; ++j) t[j] += s * r[j];
      t[d] += s;
    }
    double norm = 0.0;
    for (double& e : t) e /= static_cast<double>(n), norm += e * e;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    lambda = norm;
    for (std::size_t j = 0; j <= d; ++j) v[j] = t[j] / norm;
  }
  const double step = 1.0 / (0.25 * lambda * 1.01 + cfg.l2 + 1e-12);

  w_.assign(d, 0.0);
  b_ = 0.0;
  std::vector<double> grad(d);
  for (iterations_ = 1; iterations_ <= cfg.max_iter; ++iterations_) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = x.row(i);
      const double err = sigmoid(dot(r, w_) + b_) - (y[i] != 0 ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * r[j];
      gb += err;
    }
    double gnorm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] = grad[j] / static_cast<double>(n) + cfg.l2 * w_[j];
      gnorm += grad[j] * grad[j];
    }
    gb /= static_cast<double>(n);
    gnorm = std::sqrt(gnorm + gb * gb);
    if (gnorm < cfg.tol) break;
    for (std::size_t j = 0; j < d; ++j) w_[j] -= step * grad[j];
    b_ -= step * gb;
  }
}

double LogisticRegression::predict_proba(std::span<const double> features) const {
  if (features.size() != w_.size()) throw ValidationError("feature dimension does not match the classifier");
  return sigmoid(dot(features, w_) + b_);
}

// ---------------------------------------------------------------------------

namespace {

std::pair<std::size_t, std::size_t> class_counts(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("score and label counts differ");
  const auto pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int v) { return v != 0; }));
  return {pos, labels.size() - pos};
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = class_counts(scores, labels);
  if (pos == 0 || neg == 0) throw MetricError("AUC-ROC is undefined for single-class input");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;  // ranks are 1-based; ties share the mid-rank
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] != 0) rank_sum += mid;
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  const auto [pos, neg] = class_counts(scores, labels);
  if (pos == 0 || neg == 0) throw MetricError("AUC-PR is undefined for single-class input");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  double area = 0.0, prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] != 0 ? tp : fp)++;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

double f1_score(std::span<const double> scores, std::span<const int> labels, double threshold) {
  class_counts(scores, labels);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  const auto denom = 2 * tp + fp + fn;
  return denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

struct Split {
  std::vector<LinkSample> samples;
  std::vector<int> fold;
};

Split make_split(const TripartiteGraph& g, Relation relation, const EvalConfig& cfg) {
  Split s;
  Rng data_rng(derive_seed(cfg.seed, 0x64617461ULL));
  s.samples = make_link_dataset(g, relation, cfg.neg_ratio, data_rng);
  std::vector<int> labels;
  for (const auto& x : s.samples) labels.push_back(x.label);
  Rng fold_rng(derive_seed(cfg.seed, 0x666f6c64ULL));
  s.fold = kfold_split(labels, cfg.folds, fold_rng);
  return s;
}

FoldMetrics score_fold(const EmbeddingStore& store, const Split& split, int fold, const EvalConfig& cfg) {
  const auto d = store.dim();
  std::size_t n_train = 0;
  for (int f : split.fold) n_train += f != fold;

  Matrix x_train(n_train, d);
  std::vector<int> y_train;
  std::vector<double> test_scores;
  std::vector<int> y_test;
  std::size_t row = 0;
  for (std::size_t i = 0; i < split.samples.size(); ++i) {
    if (split.fold[i] == fold) continue;
    const auto feat = edge_embedding(store, split.samples[i].a, split.samples[i].b);
    std::copy(feat.begin(), feat.end(), x_train.row(row++).begin());
    y_train.push_back(split.samples[i].label);
  }
  LogisticRegression clf;
  clf.fit(x_train, y_train, cfg.classifier);
  for (std::size_t i = 0; i < split.samples.size(); ++i) {
    if (split.fold[i] != fold) continue;
    test_scores.push_back(clf.predict_proba(edge_embedding(store, split.samples[i].a, split.samples[i].b)));
    y_test.push_back(split.samples[i].label);
  }

  FoldMetrics m;
  m.auc_roc = auc_roc(test_scores, y_test);
  m.auc_pr = auc_pr(test_scores, y_test);
  m.f1 = f1_score(test_scores, y_test, cfg.threshold);
  m.test_positives = static_cast<std::size_t>(std::count(y_test.begin(), y_test.end(), 1));
  m.test_negatives = y_test.size() - m.test_positives;
  return m;
}

EvalReport assemble(std::vector<FoldMetrics> folds, const Split& split) {
  EvalReport rep;
  rep.folds = std::move(folds);
  for (const auto& f : rep.folds) {
    rep.mean.auc_roc += f.auc_roc;
    rep.mean.auc_pr += f.auc_pr;
    rep.mean.f1 += f.f1;
    rep.mean.test_positives += f.test_positives;
    rep.mean.test_negatives += f.test_negatives;
  }
  const double k = static_cast<double>(rep.folds.size());
  rep.mean.auc_roc /= k;
  rep.mean.auc_pr /= k;
  rep.mean.f1 /= k;
  rep.mean.test_positives /= rep.folds.size();
  rep.mean.test_negatives /= rep.folds.size();
  for (const auto& s : split.samples) (s.label ? rep.positives : rep.negatives)++;
  return rep;
}

/// Runs body(fold) for every fold; parallel across folds, results in fold order.
template <typename Body>
std::vector<FoldMetrics> for_each_fold(int folds, Exec exec, Body body) {
  std::vector<FoldMetrics> out(static_cast<std::size_t>(folds));
  if (exec == Exec::Parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (int f = 0; f < folds; ++f) {
      try {
        out[static_cast<std::size_t>(f)] = body(f);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (int f = 0; f < folds; ++f) out[static_cast<std::size_t>(f)] = body(f);
  }
  return out;
}

}  // namespace

EvalReport evaluate(const EmbeddingStore& store, const TripartiteGraph& g, Relation relation, const EvalConfig& cfg, Exec exec) {
  for (auto p : kParties)
    if (store.node[party_index(p)].rows() != g.node_count(p)) throw ValidationError("embedding store does not match the graph");
  const auto split = make_split(g, relation, cfg);
  auto folds = for_each_fold(cfg.folds, exec, [&](int f) { return score_fold(store, split, f, cfg); });
  return assemble(std::move(folds), split);
}

EvalReport evaluate_end_to_end(const TripartiteGraph& g, std::span<const Metapath> metapaths, const TrainConfig& train_cfg,
                               Relation relation, const EvalConfig& cfg, EmbeddingSource source, Exec exec) {
  train_cfg.validate();
  const auto split = make_split(g, relation, cfg);
  auto folds = for_each_fold(cfg.folds, exec, [&](int f) {
    EmbeddingStore store;
    if (source == EmbeddingSource::Trained) {
      std::vector<std::pair<NodeId, NodeId>> held_out;
      for (std::size_t i = 0; i < split.samples.size(); ++i)
        if (split.fold[i] == f && split.samples[i].label == 1) held_out.emplace_back(split.samples[i].a, split.samples[i].b);
      const auto train_graph = g.without_edges(held_out);
      store = train(train_graph, metapaths, train_cfg, Exec::Serial).store;
    } else {
      Rng rng(derive_seed(train_cfg.seed, 0x696e6974ULL));
      store = init_embeddings(g, train_cfg, rng);
    }
    return score_fold(store, split, f, cfg);
  });
  return assemble(std::move(folds), split);
}

// ---------------------------------------------------------------------------

void write_report(std::ostream& out, const EvalReport& report) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  out << "folds = " << report.folds.size() << '\n';
  out << "positives = " << report.positives << '\n';
  out << "negatives = " << report.negatives << '\n';
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const auto& f = report.folds[i];
    const auto key = "fold" + std::to_string(i + 1) + ".";
    out << key << "auc_roc = " << num(f.auc_roc) << '\n';
    out << key << "auc_pr = " << num(f.auc_pr) << '\n';
    out << key << "f1 = " << num(f.f1) << '\n';
  }
  out << "mean.auc_roc = " << num(report.mean.auc_roc) << '\n';
  out << "mean.auc_pr = " << num(report.mean.auc_pr) << '\n';
  out << "mean.f1 = " << num(report.mean.f1) << '\n';
}

void print_report(std::ostream& out, const EvalReport& report) {
  char buf[128];
  out << "fold   AUC-ROC   AUC-PR    F1       test+  test-\n";
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const auto& f = report.folds[i];
    std::snprintf(buf, sizeof buf, "%-6zu %-9.4f %-9.4f %-8.4f %-6zu %zu\n", i + 1, f.auc_roc, f.auc_pr, f.f1,
                  f.test_positives, f.test_negatives);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "mean   %-9.4f %-9.4f %-8.4f\n", report.mean.auc_roc, report.mean.auc_pr, report.mean.f1);
  out << buf;
}

}  // namespace trine
