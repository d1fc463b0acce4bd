#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trine/graph.hpp"
#include "trine/walks.hpp"

namespace trine {

/// (center, context) pair of same-party node indices.
struct ContextPair {
  std::uint32_t center;
  std::uint32_t context;

  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

/// Every (seq[i], seq[j]) with 0 < |i - j| <= window, in (i, j) order.
std::vector<ContextPair> context_pairs(std::span<const std::uint32_t> seq, int window);

/// Walker/Vose alias table over a discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights must be non-negative with a positive sum.
  explicit AliasTable(std::span<const double> weights);

  std::uint32_t sample(Rng& rng) const;
  std::size_t size() const noexcept { return prob_.size(); }
  double probability(std::uint32_t i) const { return p_.at(i); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<double> p_;
};

struct SamplerConfig {
  double power = 0.75;
  int window = 5;
  /// Bucket size cap as a fraction of (|party| - 1).
  double bucket_fraction = 0.5;
};

/// Per-party unigram^power proposal plus per-node exclusion buckets.
/// Immutable after construction; sampling only touches the caller's RNG.
class NegativeSampler {
 public:
  NegativeSampler() = default;
  /// `weights[p][i]` is the unnormalised proposal mass of node i in party p;
  /// `exclusions[p][i]` lists nodes never drawn as negatives for center i.
  NegativeSampler(std::array<std::vector<double>, 3> weights, std::array<std::vector<std::vector<std::uint32_t>>, 3> exclusions);

  /// Proposal probability of v within its party.
  double probability(NodeId v) const;
  std::span<const std::uint32_t> exclusions(NodeId v) const;

  /// ns draws with replacement from the center's party, rejecting the center,
  /// its bucket and `also_reject`. Throws SamplerError when nothing is admissible.
  std::vector<std::uint32_t> sample_negatives(NodeId center, int ns, Rng& rng,
                                              std::optional<std::uint32_t> also_reject = std::nullopt) const;

  std::vector<std::string> warnings;

 private:
  std::array<AliasTable, 3> tables_;
  std::array<std::vector<double>, 3> weights_;
  std::array<std::vector<std::vector<std::uint32_t>>, 3> exclusions_;
};

/// Builds the sampler from corpus occurrence counts. A party with an empty
/// corpus falls back to a uniform table (with a warning).
NegativeSampler build_negative_sampler(const TypedCorpus& typed, const TripartiteGraph& g, const SamplerConfig& cfg = {});

}  // namespace trine
