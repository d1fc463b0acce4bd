#pragma once

#include <string>
#include <vector>

#include "trine/eval.hpp"
#include "trine/synth.hpp"
#include "trine/trainer.hpp"

namespace trine {

/// Everything a CLI run needs. Precedence: flag > config file > default.
struct RunConfig {
  std::string command;
  TrainConfig train;
  SynthConfig synth;

  std::string edges;
  std::string embeddings;
  std::string out;
  std::string context_out;
  std::string report;
  std::vector<std::string> metapaths;  // empty: T1-T2-T3-T2-T1 and T3-T2-T1-T2-T3
  std::string schema = "upc";

  std::string relation = "13";
  int folds = 5;
  double neg_ratio = 1.0;
  double threshold = 0.5;
  double l2 = 1e-4;
  double lr_tol = 1e-6;
  int lr_max_iter = 10000;
  bool control = false;

  int threads = 0;
  bool serial = false;

  Schema parsed_schema() const { return Schema::from_chars(schema); }
  std::vector<Metapath> parsed_metapaths() const;
  EvalConfig eval_config() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Thrown for bad command lines; `message` is printable usage text.
class UsageError : public ConfigError {
 public:
  UsageError(const std::string& what, int exit_code = 2) : ConfigError(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Parses `<subcommand> [flags...]`. A `--config F` flag loads `key = value`
/// lines (keys are long flag names, '#' starts a comment); unknown keys are
/// rejected. Throws UsageError.
RunConfig parse_config(const std::vector<std::string>& args);

/// Effective configuration of the parsed subcommand as `key = value` lines;
/// feeding it back through --config reproduces the same RunConfig.
std::string dump_config(const RunConfig& cfg);

/// Subcommands understood by parse_config.
const std::vector<std::string>& subcommands();

}  // namespace trine
