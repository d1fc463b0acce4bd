// Acceptance gate: one PASS/FAIL/SKIP line per criterion; exit status 1 on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/dense_hits.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/gradient_checks.hpp"
#include "oracles/pair_auc.hpp"
#include "trine/commands.hpp"
#include "trine/eval.hpp"
#include "trine/synth.hpp"
#include "trine/trainer.hpp"

using namespace trine;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kGradientRelErr = 1e-4;
constexpr double kGradientSeconds = 5.0;
constexpr int kWalkSteps = 100000;
constexpr double kWalkFreqTol = 0.01;
constexpr double kWalkSeconds = 5.0;
constexpr double kHitsTol = 1e-8;
constexpr double kE2eMinAuc = 0.85;
constexpr double kControlAuc = 0.5;
constexpr double kControlTol = 0.05;
constexpr double kE2eSeconds = 120.0;
constexpr double kVisualizeUsMinAuc = 0.60;
constexpr double kMonotoneFraction = 0.90;

enum class Outcome { Pass, Fail, Skip };

struct Check {
  Outcome outcome;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const std::vector<Metapath>& default_paths() {
  static const std::vector<Metapath> paths{parse_metapath("upcpu"), parse_metapath("cpupc")};
  return paths;
}

Check gradient_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int trials = 0;
  for (std::size_t d : {2u, 8u}) {
    Rng rng(derive_seed(1, d));
    for (int t = 0; t < 100; ++t) {
      std::vector<double> u(d), v(d);
      for (auto& x : u) x = 2.0 * uniform01(rng) - 1.0;
      for (auto& x : v) x = 2.0 * uniform01(rng) - 1.0;
      const double w = 0.1 + 5.0 * uniform01(rng);
      const double coef = 0.1 + 2.0 * uniform01(rng);
      worst = std::max(worst, trine::testing::explicit_gradient_error(u, v, w, coef, 1e-4));
      const int negs = static_cast<int>(uniform_index(rng, 6));
      worst = std::max(worst, trine::testing::implicit_gradient_error(d, 8, rng, negs, 0.1 + 2.0 * uniform01(rng), 1e-4));
      trials += 2;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < kGradientRelErr && secs < kGradientSeconds;
  return {ok ? Outcome::Pass : Outcome::Fail,
          std::to_string(trials) + " instances, worst relative error " + fmt("%.3g, %.2f s", worst, secs)};
}

Check walk_law() {
  const auto t0 = Clock::now();
  GraphBuilder b;
  for (int i = 0; i < 5; ++i) b.add_edge("u0", "p" + std::to_string(i));
  const auto g = b.build();
  const auto center = *g.find("u0");
  const auto mp = parse_metapath("up");
  std::vector<int> hist(5, 0);
  Rng rng(2024);
  for (int s = 0; s < kWalkSteps; ++s) ++hist[metapath_walk(g, center, mp, 2, rng)[1].index];
  double worst = 0.0;
  for (int c : hist) worst = std::max(worst, std::abs(c / double(kWalkSteps) - 0.2));
  const double secs = seconds_since(t0);
  return {worst <= kWalkFreqTol && secs < kWalkSeconds ? Outcome::Pass : Outcome::Fail,
          fmt("max |freq - 0.2| = %.4f over 100000 steps, %.2f s", worst, secs)};
}

Check hits_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = trine::testing::random_graph(derive_seed(7, seed), 12, 10, 8, 0.2);
    const auto s = hits(g, HitsOptions{10000, 1e-13});
    const auto oracle = trine::testing::dense_hits_authority(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) worst = std::max(worst, std::abs(s.score(g.node_at(k)) - oracle[k]));
  }
  return {worst <= kHitsTol ? Outcome::Pass : Outcome::Fail, fmt("20 graphs of 30 nodes, max deviation %.3g", worst)};
}

Check auc_oracle() {
  Rng rng(31);
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 49);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = t % 2 ? uniform01(rng) : static_cast<double>(uniform_index(rng, 8));
      y[i] = static_cast<int>(uniform_index(rng, 2));
    }
    y[0] = 1;
    y[n - 1] = 0;
    mismatches += auc_roc(s, y) != trine::testing::pair_auc(s, y);
  }
  return {mismatches == 0 ? Outcome::Pass : Outcome::Fail, std::to_string(mismatches) + " of 50 sets differ"};
}

Check synthetic_end_to_end() {
  const auto t0 = Clock::now();
  const auto g = planted_graph(SynthConfig{300, 60, 30, 3, 0.3, 0.02, 1});
  TrainConfig tc;
  tc.dim = 32;
  EvalConfig ec;
  ec.folds = 5;
  const auto trained = evaluate_end_to_end(g, default_paths(), tc, Relation::E3, ec, EmbeddingSource::Trained);
  const auto control = evaluate_end_to_end(g, default_paths(), tc, Relation::E3, ec, EmbeddingSource::RandomControl);
  const double secs = seconds_since(t0);
  const bool ok = trained.mean.auc_roc >= kE2eMinAuc && std::abs(control.mean.auc_roc - kControlAuc) <= kControlTol &&
                  secs < kE2eSeconds;
  return {ok ? Outcome::Pass : Outcome::Fail,
          fmt("trained AUC-ROC %.4f (need >= 0.85), control %.4f (need 0.5 +- 0.05), %.1f s", trained.mean.auc_roc,
              control.mean.auc_roc, secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check determinism() {
  const auto dir = fs::temp_directory_path() / "trine_acceptance";
  fs::create_directories(dir);
  const auto graph = (dir / "graph.txt").string();
  std::vector<std::string> differing;
  int runs = 0;

  // every subcommand, each writing to files
  auto twice = [&](const std::string& name, const std::function<std::vector<std::string>(const std::string&)>& args,
                   const std::vector<std::string>& suffixes) {
    std::vector<std::string> first;
    for (int round = 0; round < 2; ++round) {
      const auto stem = (dir / (name + std::to_string(round))).string();
      std::ostringstream out, log;
      if (run_main(args(stem), out, log) != 0) {
        differing.push_back(name + " (failed: " + log.str().substr(log.str().rfind('\n', log.str().size() - 2) + 1) + ")");
        return;
      }
      std::vector<std::string> contents;
      for (const auto& s : suffixes) contents.push_back(slurp(stem + s));
      if (round == 0) first = contents;
      else if (contents != first) differing.push_back(name);
    }
    ++runs;
  };

  twice("synth", [&](const std::string& stem) { return std::vector<std::string>{"synth", "--users", "60", "--tags", "15", "--items", "9", "--seed", "5", "--out", stem + ".txt"}; }, {".txt"});
  fs::copy_file(dir / "synth0.txt", graph, fs::copy_options::overwrite_existing);
  twice("hits", [&](const std::string& stem) { return std::vector<std::string>{"hits", "--edges", graph, "--out", stem + ".txt"}; }, {".txt"});
  twice("walks", [&](const std::string& stem) { return std::vector<std::string>{"walks", "--edges", graph, "--out", stem + ".txt"}; }, {".txt"});
  twice("train", [&](const std::string& stem) { return std::vector<std::string>{"train", "--edges", graph, "--dim", "16", "--epochs", "5", "--out", stem + ".emb"}; },
        {".emb", ".emb.context"});
  const auto emb = (dir / "train0.emb").string();
  twice("evaluate", [&](const std::string& stem) { return std::vector<std::string>{"evaluate", "--edges", graph, "--embeddings", emb, "--report", stem + ".txt"}; }, {".txt"});
  twice("e2e", [&](const std::string& stem) { return std::vector<std::string>{"e2e", "--edges", graph, "--dim", "8", "--epochs", "3", "--folds", "3", "--report", stem + ".txt"}; }, {".txt"});

  std::string detail = std::to_string(runs) + " of 6 subcommands byte-identical";
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty() && runs == 6 ? Outcome::Pass : Outcome::Fail, detail};
}

Check visualizeus_soft_check() {
  const char* path = std::getenv("TRINE_VISUALIZEUS");
  if (!path) return {Outcome::Skip, "set TRINE_VISUALIZEUS to the edge list to run"};
  const auto g = load_edge_list(path);
  TrainConfig tc;
  const auto store = train(g, default_paths(), tc).store;
  const auto rep = evaluate(store, g, Relation::E3, EvalConfig{});
  return {rep.mean.auc_roc >= kVisualizeUsMinAuc ? Outcome::Pass : Outcome::Fail,
          fmt("AUC-ROC %.4f (need >= 0.60)", rep.mean.auc_roc)};
}

Check loss_monotonicity() {
  const auto g = planted_graph(SynthConfig{15, 9, 6, 3, 0.5, 0.05, 1});
  TrainConfig tc;
  tc.dim = 16;
  tc.lr = 0.01;
  tc.epochs = 50;
  tc.tol = 1e-15;
  const auto r = train(g, default_paths(), tc);
  int up = 0;
  const int transitions = static_cast<int>(r.history.size()) - 1;
  for (std::size_t e = 1; e < r.history.size(); ++e) up += r.history[e].objective >= r.history[e - 1].objective;
  const double frac = transitions > 0 ? up / double(transitions) : 0.0;
  const bool ok = transitions == 50 && frac >= kMonotoneFraction && r.history.back().objective > r.history.front().objective;
  return {ok ? Outcome::Pass : Outcome::Fail,
          fmt("%.0f of %.0f transitions non-decreasing, L %.4g", up, transitions, r.history.front().objective) +
              fmt(" -> %.4g", r.history.back().objective)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"gradient oracle", gradient_oracle},
      {"walk law", walk_law},
      {"HITS oracle", hits_oracle},
      {"AUC oracle", auc_oracle},
      {"synthetic end-to-end", synthetic_end_to_end},
      {"determinism", determinism},
      {"VisualizeUs soft check", visualizeus_soft_check},
      {"loss monotonicity", loss_monotonicity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c = {Outcome::Fail, std::string("threw: ") + e.what()};
    }
    const char* tag = c.outcome == Outcome::Pass ? "PASS" : c.outcome == Outcome::Fail ? "FAIL" : "SKIP";
    failures += c.outcome == Outcome::Fail;
    std::printf("%s  %-24s %s\n", tag, name.c_str(), c.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
