#include "trine/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <unordered_map>

namespace trine {

std::vector<ContextPair> context_pairs(std::span<const std::uint32_t> seq, int window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  std::vector<ContextPair> out;
  const auto n = static_cast<std::ptrdiff_t>(seq.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - window);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (auto j = lo; j <= hi; ++j)
      if (j != i) out.push_back({seq[static_cast<std::size_t>(i)], seq[static_cast<std::size_t>(j)]});
  }
  return out;
}

// ---------------------------------------------------------------------------

AliasTable::AliasTable(std::span<const double> weights) {
  const auto n = weights.size();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (n == 0 || !(total > 0.0) || !std::isfinite(total)) throw SamplerError("alias table needs a positive finite total weight");

  p_.resize(n);
  prob_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw SamplerError("negative sampling weight");
    p_[i] = weights[i] / total;
    scaled[i] = p_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) prob_[i] = 1.0, alias_[i] = i;
  for (auto i : small) prob_[i] = 1.0, alias_[i] = i;  // rounding leftovers
}

std::uint32_t AliasTable::sample(Rng& rng) const {
  const auto i = static_cast<std::uint32_t>(uniform_index(rng, prob_.size()));
  return uniform01(rng) < prob_[i] ? i : alias_[i];
}

// ---------------------------------------------------------------------------

NegativeSampler::NegativeSampler(std::array<std::vector<double>, 3> weights,
                                 std::array<std::vector<std::vector<std::uint32_t>>, 3> exclusions)
    : weights_(std::move(weights)), exclusions_(std::move(exclusions)) {
  for (std::size_t p = 0; p < 3; ++p) {
    const auto n = weights_[p].size();
    exclusions_[p].resize(n);
    for (auto& ex : exclusions_[p]) {
      std::sort(ex.begin(), ex.end());
      ex.erase(std::unique(ex.begin(), ex.end()), ex.end());
    }
    if (n > 0) tables_[p] = AliasTable(weights_[p]);
  }
}

double NegativeSampler::probability(NodeId v) const { return tables_[party_index(v.party)].probability(v.index); }

std::span<const std::uint32_t> NegativeSampler::exclusions(NodeId v) const {
  return exclusions_[party_index(v.party)].at(v.index);
}

std::vector<std::uint32_t> NegativeSampler::sample_negatives(NodeId center, int ns, Rng& rng,
                                                             std::optional<std::uint32_t> also_reject) const {
  if (ns < 0) throw ConfigError("negative sample count must be >= 0");
  std::vector<std::uint32_t> out;
  if (ns == 0) return out;

  const auto pi = party_index(center.party);
  const auto& table = tables_[pi];
  if (center.index >= table.size()) throw SamplerError("center node has no sampling table entry");
  const auto& excluded = exclusions_[pi][center.index];
  auto rejected = [&](std::uint32_t z) {
    return z == center.index || (also_reject && z == *also_reject) || std::binary_search(excluded.begin(), excluded.end(), z);
  };

  bool admissible = false;
  for (std::uint32_t z = 0; z < table.size() && !admissible; ++z) admissible = !rejected(z) && table.probability(z) > 0.0;
  if (!admissible) throw SamplerError("every node of the party is excluded for this center (degenerate party)");

  out.reserve(static_cast<std::size_t>(ns));
  const long cap = 100L * ns;
  long tries = 0;
  while (out.size() < static_cast<std::size_t>(ns)) {
    if (++tries > cap) throw SamplerError("negative sampling exceeded its retry budget");
    const auto z = table.sample(rng);
    if (!rejected(z)) out.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------

NegativeSampler build_negative_sampler(const TypedCorpus& typed, const TripartiteGraph& g, const SamplerConfig& cfg) {
  if (!(cfg.power > 0.0)) throw ConfigError("sampler power must be > 0");
  if (cfg.window < 1) throw ConfigError("window must be >= 1");
  if (cfg.bucket_fraction < 0.0 || cfg.bucket_fraction >= 1.0) throw ConfigError("bucket fraction must lie in [0, 1)");

  std::array<std::vector<double>, 3> weights;
  std::array<std::vector<std::vector<std::uint32_t>>, 3> exclusions;
  std::vector<std::string> warnings;

  for (auto p : kParties) {
    const auto pi = party_index(p);
    const auto n = g.node_count(p);
    std::vector<double> counts(n, 0.0);
    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> cooc(n);
    for (const auto& seq : typed.of(p)) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        counts.at(seq[i]) += 1.0;
        const auto hi = std::min(seq.size(), i + static_cast<std::size_t>(cfg.window) + 1);
        for (std::size_t j = i + 1; j < hi; ++j) {
          if (seq[i] == seq[j]) continue;
          ++cooc[seq[i]][seq[j]];
          ++cooc[seq[j]][seq[i]];
        }
      }
    }

    const bool empty = std::all_of(counts.begin(), counts.end(), [](double c) { return c == 0.0; });
    if (empty) {
      if (n > 0) {
        warnings.push_back("party " + std::to_string(pi + 1) + " has an empty corpus; negative sampling is uniform");
        std::cerr << "warning: " << warnings.back() << '\n';
      }
      weights[pi].assign(n, 1.0);
    } else {
      weights[pi].resize(n);
      for (std::size_t i = 0; i < n; ++i) weights[pi][i] = std::pow(counts[i], cfg.power);
    }

    const auto cap = n > 1 ? static_cast<std::size_t>(std::floor(cfg.bucket_fraction * static_cast<double>(n - 1))) : 0;
    exclusions[pi].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> ranked(cooc[i].begin(), cooc[i].end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      if (ranked.size() > cap) ranked.resize(cap);
      auto& ex = exclusions[pi][i];
      for (const auto& [node, c] : ranked) ex.push_back(node);
    }
  }

  NegativeSampler sampler(std::move(weights), std::move(exclusions));
  sampler.warnings = std::move(warnings);
  return sampler;
}

}  // namespace trine
