#include "trine/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "trine/centrality.hpp"
#include "trine/embedding_io.hpp"
#include "trine/eval.hpp"
#include "trine/synth.hpp"
#include "trine/walks.hpp"

namespace trine {
namespace {

/// Writes to `path`, or to `fallback` when path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error("cannot write '" + path + "'");
  fn(file);
  if (!file) throw Error("write to '" + path + "' failed");
}

const char* status_name(TrainStatus s) {
  switch (s) {
    case TrainStatus::Converged: return "converged";
    case TrainStatus::EpochsExhausted: return "epochs exhausted";
    case TrainStatus::Diverged: return "diverged";
  }
  return "?";
}

void log_history(std::ostream& log, const TrainResult& r) {
  char buf[160];
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    const auto& l = r.history[e];
    std::snprintf(buf, sizeof buf, "epoch %3zu  L = %.6g  O1..O3 = %.4g %.4g %.4g  O4..O6 = %.4g %.4g %.4g\n", e,
                  l.objective, l.implicit[0], l.implicit[1], l.implicit[2], l.explicit_[0], l.explicit_[1], l.explicit_[2]);
    log << buf;
  }
  log << "training " << status_name(r.status) << " after " << r.epochs_run << " epochs\n";
  if (!r.diagnostic.empty()) log << r.diagnostic << '\n';
}

int cmd_train(const RunConfig& cfg, Exec exec, std::ostream& log) {
  const auto g = load_edge_list(cfg.edges, cfg.parsed_schema());
  log << "graph: " << g.node_count(Party::T1) << '/' << g.node_count(Party::T2) << '/' << g.node_count(Party::T3)
      << " nodes, " << g.edge_count() << " edges\n";
  const auto metapaths = cfg.parsed_metapaths();
  const auto result = train(g, metapaths, cfg.train, exec);
  log_history(log, result);
  save_embeddings(result.store, g, cfg.out, cfg.context_out.empty() ? cfg.out + ".context" : cfg.context_out);
  return result.status == TrainStatus::Diverged ? 3 : 0;
}

int cmd_walks(const RunConfig& cfg, Exec exec, std::ostream& out) {
  const auto g = load_edge_list(cfg.edges, cfg.parsed_schema());
  const auto scores = hits(g, HitsOptions{cfg.train.hits_max_iter, cfg.train.hits_tol}, exec);
  const auto metapaths = cfg.parsed_metapaths();
  const auto corpus = generate_corpus(g, metapaths, scores, cfg.train.walk_config(), exec);
  emit(cfg.out, out, [&](std::ostream& os) { write_walks(os, corpus, g); });
  return 0;
}

int cmd_hits(const RunConfig& cfg, Exec exec, std::ostream& out) {
  const auto g = load_edge_list(cfg.edges, cfg.parsed_schema());
  const auto scores = hits(g, HitsOptions{cfg.train.hits_max_iter, cfg.train.hits_tol}, exec);
  std::vector<std::size_t> order(g.node_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto score_of = [&](std::size_t i) { return scores.score(g.node_at(i)); };
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score_of(a) > score_of(b); });
  emit(cfg.out, out, [&](std::ostream& os) {
    char buf[40];
    for (auto i : order) {
      std::snprintf(buf, sizeof buf, " %.12g\n", score_of(i));
      os << g.label(g.node_at(i)) << buf;
    }
  });
  return 0;
}

void finish_report(const RunConfig& cfg, const EvalReport& rep, std::ostream& out) {
  print_report(out, rep);
  if (!cfg.report.empty()) emit(cfg.report, out, [&](std::ostream& os) { write_report(os, rep); });
}

int cmd_evaluate(const RunConfig& cfg, Exec exec, std::ostream& out) {
  const auto schema = cfg.parsed_schema();
  const auto g = load_edge_list(cfg.edges, schema);
  const auto store = align_to_graph(load_embeddings(cfg.embeddings, schema), g);
  finish_report(cfg, evaluate(store, g, parse_relation(cfg.relation), cfg.eval_config(), exec), out);
  return 0;
}

int cmd_e2e(const RunConfig& cfg, Exec exec, std::ostream& out) {
  const auto g = load_edge_list(cfg.edges, cfg.parsed_schema());
  const auto metapaths = cfg.parsed_metapaths();
  const auto source = cfg.control ? EmbeddingSource::RandomControl : EmbeddingSource::Trained;
  finish_report(cfg, evaluate_end_to_end(g, metapaths, cfg.train, parse_relation(cfg.relation), cfg.eval_config(), source, exec),
                out);
  return 0;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const auto g = planted_graph(cfg.synth, cfg.parsed_schema());
  emit(cfg.out, out, [&](std::ostream& os) { write_edge_list(os, g); });
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  log << "# effective configuration: " << cfg.command << '\n' << dump_config(cfg);
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  const auto exec = cfg.serial ? Exec::Serial : Exec::Parallel;

  if (cfg.command == "train") return cmd_train(cfg, exec, log);
  if (cfg.command == "walks") return cmd_walks(cfg, exec, out);
  if (cfg.command == "hits") return cmd_hits(cfg, exec, out);
  if (cfg.command == "evaluate") return cmd_evaluate(cfg, exec, out);
  if (cfg.command == "e2e") return cmd_e2e(cfg, exec, out);
  if (cfg.command == "synth") return cmd_synth(cfg, out);
  log << "error: unknown subcommand '" << cfg.command << "'\n";
  return 2;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  try {
    return run(parse_config(args), out, log);
  } catch (const UsageError& e) {
    (e.exit_code() == 0 ? out : log) << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace trine
