#include "trine/run_config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace trine {

std::vector<Metapath> RunConfig::parsed_metapaths() const {
  const auto s = parsed_schema();
  std::vector<Metapath> out;
  if (metapaths.empty()) {
    out.emplace_back(std::vector<Party>{Party::T1, Party::T2, Party::T3, Party::T2, Party::T1});
    out.emplace_back(std::vector<Party>{Party::T3, Party::T2, Party::T1, Party::T2, Party::T3});
    return out;
  }
  for (const auto& m : metapaths) out.push_back(parse_metapath(m, s));
  return out;
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig e;
  e.folds = folds;
  e.neg_ratio = neg_ratio;
  e.threshold = threshold;
  e.classifier = LogisticConfig{l2, lr_tol, lr_max_iter};
  e.seed = train.seed;
  return e;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"train", "walks", "hits", "evaluate", "e2e", "synth"};
  return names;
}

namespace {

std::string render(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string render(int v) { return std::to_string(v); }
std::string render(std::uint64_t v) { return std::to_string(v); }
std::string render(bool v) { return v ? "true" : "false"; }
std::string render(const std::string& v) { return v; }
std::string render(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

/// CLI11 app bound to one RunConfig, remembering how to print each option.
class Binder {
 public:
  explicit Binder(RunConfig& cfg) : cfg_(cfg) {
    app_.require_subcommand(1, 1);
    app_.description("Tripartite network embedding: walks, HITS, training and link-prediction evaluation.");

    auto* train = add("train", "Learn node embeddings from an edge list");
    common(train);
    graph_input(train);
    walk_options(train);
    train_options(train);
    bind(train, "out", cfg.out, "Node embedding output file");
    bind(train, "context-out", cfg.context_out, "Context vector output file (default: <out>.context)");

    auto* walks = add("walks", "Write the metapath-guided walk corpus");
    common(walks);
    graph_input(walks);
    walk_options(walks);
    bind(walks, "out", cfg.out, "Walk output file (default: stdout)");

    auto* hits = add("hits", "Print HITS authority scores in descending order");
    common(hits);
    bind(hits, "edges", cfg.edges, "Edge list file");
    bind(hits, "hits-max-iter", cfg.train.hits_max_iter, "HITS iteration cap");
    bind(hits, "hits-tol", cfg.train.hits_tol, "HITS convergence tolerance");
    bind(hits, "out", cfg.out, "Output file (default: stdout)");

    auto* evaluate = add("evaluate", "Link prediction with a saved embedding file");
    common(evaluate);
    bind(evaluate, "edges", cfg.edges, "Edge list file");
    bind(evaluate, "embeddings", cfg.embeddings, "Node embedding file");
    eval_options(evaluate);

    auto* e2e = add("e2e", "Train and evaluate with held-out edges removed per fold");
    common(e2e);
    graph_input(e2e);
    walk_options(e2e);
    train_options(e2e);
    eval_options(e2e);
    bind(e2e, "control", cfg.control, "Use untrained random embeddings (null-model control)");

    auto* synth = add("synth", "Generate a planted-community tripartite edge list");
    bind(synth, "config", config_path_, "Read options from a key = value file");
    bind(synth, "schema", cfg.schema, "Type characters for the three parties");
    bind(synth, "seed", cfg.synth.seed, "Random seed");
    bind(synth, "users", cfg.synth.users, "Party 1 size");
    bind(synth, "tags", cfg.synth.tags, "Party 2 size");
    bind(synth, "items", cfg.synth.items, "Party 3 size");
    bind(synth, "communities", cfg.synth.communities, "Number of planted communities");
    bind(synth, "p-in", cfg.synth.p_in, "Edge probability inside a community");
    bind(synth, "p-out", cfg.synth.p_out, "Edge probability across communities");
    bind(synth, "out", cfg.out, "Edge list output file (default: stdout)");
  }

  CLI::App& app() { return app_; }

  CLI::App* sub(const std::string& name) { return app_.get_subcommand_no_throw(name); }

  std::string dump(const std::string& name) const {
    std::string s;
    for (const auto& [key, fn] : renderers_.at(name)) {
      const auto value = fn();
      if (key != "config" && !value.empty()) s += key + " = " + value + '\n';
    }
    return s;
  }

 private:
  CLI::App* add(const std::string& name, const std::string& desc) {
    auto* s = app_.add_subcommand(name, desc);
    s->fallthrough(false);
    order_.push_back(name);
    return s;
  }

  template <typename T>
  void bind(CLI::App* sub, const std::string& key, T& ref, const std::string& desc) {
    CLI::Option* opt = nullptr;
    if constexpr (std::is_same_v<T, bool>) {
      opt = sub->add_flag("--" + key, ref, desc);
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      opt = sub->add_option("--" + key, ref, desc)->delimiter(',');
    } else {
      opt = sub->add_option("--" + key, ref, desc);
    }
    opt->run_callback_for_default();
    if constexpr (!std::is_same_v<T, bool>) opt->default_str(render(ref));
    renderers_[sub->get_name()].emplace_back(key, [&ref] { return render(ref); });
  }

  void common(CLI::App* s) {
    bind(s, "config", config_path_, "Read options from a key = value file");
    bind(s, "seed", cfg_.train.seed, "Random seed for every stochastic step");
    bind(s, "schema", cfg_.schema, "Type characters for parties 1, 2, 3");
    bind(s, "threads", cfg_.threads, "OpenMP threads (0: runtime default)");
    bind(s, "serial", cfg_.serial, "Use the serial reference kernels");
  }

  void graph_input(CLI::App* s) {
    bind(s, "edges", cfg_.edges, "Edge list file");
    bind(s, "metapath", cfg_.metapaths, "Metapath as type characters, repeatable (e.g. upcpu)");
  }

  void walk_options(CLI::App* s) {
    bind(s, "walk-length", cfg_.train.walk_length, "Walk length l");
    bind(s, "min-walks", cfg_.train.min_walks, "Minimum walks per node");
    bind(s, "max-walks", cfg_.train.max_walks, "Maximum walks per node");
    bind(s, "walk-scale", cfg_.train.walk_scale, "Centrality multiplier for walk budgets (<= 0: |V|)");
    bind(s, "hits-max-iter", cfg_.train.hits_max_iter, "HITS iteration cap");
    bind(s, "hits-tol", cfg_.train.hits_tol, "HITS convergence tolerance");
  }

  void train_options(CLI::App* s) {
    auto& t = cfg_.train;
    bind(s, "dim", t.dim, "Embedding dimension");
    bind(s, "window", t.window, "Skip-gram window size k");
    bind(s, "negatives", t.negatives, "Negative samples per positive");
    bind(s, "lr", t.lr, "Learning rate");
    bind(s, "lr-decay", t.lr_decay, "Decay the learning rate linearly to lr/100");
    bind(s, "alpha1", t.alpha[0], "Implicit weight, party 1");
    bind(s, "alpha2", t.alpha[1], "Implicit weight, party 2");
    bind(s, "alpha3", t.alpha[2], "Implicit weight, party 3");
    bind(s, "beta1", t.beta[0], "Explicit weight, relation 12");
    bind(s, "beta2", t.beta[1], "Explicit weight, relation 23");
    bind(s, "beta3", t.beta[2], "Explicit weight, relation 13");
    bind(s, "gamma", t.gamma, "Explicit gradient scale");
    bind(s, "power", t.power, "Negative sampling exponent");
    bind(s, "bucket-fraction", t.bucket_fraction, "Exclusion bucket cap as a fraction of the party");
    bind(s, "contexts-per-edge", t.contexts_per_edge, "Window pairs trained per edge endpoint");
    bind(s, "epochs", t.epochs, "Maximum epochs");
    bind(s, "tol", t.tol, "Relative objective change that stops training");
    bind(s, "loss-pairs", t.loss_pairs, "Window pairs per party in the monitoring probe");
  }

  void eval_options(CLI::App* s) {
    bind(s, "relation", cfg_.relation, "Target relation: 12, 23 or 13");
    bind(s, "folds", cfg_.folds, "Cross-validation folds");
    bind(s, "neg-ratio", cfg_.neg_ratio, "Negatives per positive link");
    bind(s, "threshold", cfg_.threshold, "F1 decision threshold");
    bind(s, "l2", cfg_.l2, "Classifier L2 penalty");
    bind(s, "lr-tol", cfg_.lr_tol, "Classifier gradient-norm tolerance");
    bind(s, "lr-max-iter", cfg_.lr_max_iter, "Classifier iteration cap");
    bind(s, "report", cfg_.report, "Write key = value metrics to this file");
  }

  RunConfig& cfg_;
  CLI::App app_;
  std::string config_path_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::pair<std::string, std::function<std::string()>>>> renderers_;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

void check_required(const RunConfig& cfg) {
  auto need = [&](bool ok, const char* flag) {
    if (!ok) throw UsageError(cfg.command + ": " + flag + " is required");
  };
  const auto& c = cfg.command;
  if (c == "train" || c == "walks" || c == "hits" || c == "evaluate" || c == "e2e") need(!cfg.edges.empty(), "--edges");
  if (c == "train") need(!cfg.out.empty(), "--out");
  if (c == "evaluate") need(!cfg.embeddings.empty(), "--embeddings");
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  Binder binder(cfg);
  auto& app = binder.app();

  if (args.empty()) throw UsageError(app.help());
  if (args[0] == "-h" || args[0] == "--help") throw UsageError(app.help(), 0);
  auto* sub = binder.sub(args[0]);
  if (!sub) throw UsageError("unknown subcommand '" + args[0] + "'\n" + app.help());

  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }

  try {
    if (!config_path.empty()) {
      for (const auto& [key, value] : read_config_file(config_path)) {
        auto* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError("config file key '" + key + "' is not an option of '" + args[0] + "'");
        opt->default_val(value);
      }
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(sub->help(), 0);
  } catch (const CLI::Error& e) {
    throw UsageError(std::string(e.what()) + "\n" + sub->help());
  }

  cfg.command = args[0];
  try {
    check_required(cfg);
    cfg.parsed_schema();
    cfg.parsed_metapaths();
    if (cfg.command == "evaluate" || cfg.command == "e2e") {
      parse_relation(cfg.relation);
      if (cfg.folds < 2) throw ConfigError("--folds must be >= 2");
      if (!(cfg.neg_ratio > 0.0)) throw ConfigError("--neg-ratio must be > 0");
    }
    if (cfg.command != "synth" && cfg.command != "evaluate") cfg.train.validate();
    if (cfg.threads < 0) throw ConfigError("--threads must be >= 0");
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(cfg.command + ": " + e.what());
  }
  return cfg;
}

std::string dump_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  Binder binder(copy);
  if (!binder.sub(cfg.command)) throw UsageError("unknown subcommand '" + cfg.command + "'");
  return binder.dump(cfg.command);
}

}  // namespace trine
