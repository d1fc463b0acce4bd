#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles/fixtures.hpp"
#include "trine/sampling.hpp"

using namespace trine;

namespace {

// Brute-force window pairs: every (i, j) with 0 < |i-j| <= w.
std::size_t brute_pair_count(std::size_t n, int w) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && static_cast<int>(i > j ? i - j : j - i) <= w) ++c;
  return c;
}

TypedCorpus corpus_of(Party p, std::vector<std::vector<std::uint32_t>> seqs) {
  TypedCorpus t;
  t.sequences[party_index(p)] = std::move(seqs);
  return t;
}

TripartiteGraph users(int n) {
  GraphBuilder b;
  for (int i = 0; i < n; ++i) b.add_node("u" + std::to_string(i));
  return b.build();
}

}  // namespace

TEST_CASE("context window examples") {
  const std::vector<std::uint32_t> seq{10, 11, 12, 13};
  const auto pairs = context_pairs(seq, 1);
  CHECK(pairs == std::vector<ContextPair>{{10, 11}, {11, 10}, {11, 12}, {12, 11}, {12, 13}, {13, 12}});
  CHECK(context_pairs(seq, 10).size() == 12);
  CHECK(context_pairs(std::vector<std::uint32_t>{5}, 3).empty());
  CHECK_THROWS_AS(context_pairs(seq, 0), ConfigError);
}

TEST_CASE("property: pair counts match a brute-force double loop") {
  for (std::size_t n = 0; n < 25; ++n)
    for (int w = 1; w <= 7; ++w) {
      std::vector<std::uint32_t> seq(n);
      for (std::size_t i = 0; i < n; ++i) seq[i] = static_cast<std::uint32_t>(i);
      const auto pairs = context_pairs(seq, w);
      CHECK(pairs.size() == brute_pair_count(n, w));
      for (const auto& pr : pairs) CHECK(std::abs(static_cast<int>(pr.center) - static_cast<int>(pr.context)) <= w);
    }
}

TEST_CASE("unigram power shapes the proposal") {
  // node 0 occurs 16 times, node 1 twice; separated so their windows never meet
  std::vector<std::vector<std::uint32_t>> seqs;
  for (int i = 0; i < 16; ++i) seqs.push_back({0});
  for (int i = 0; i < 2; ++i) seqs.push_back({1});
  const auto g = users(3);
  const auto t = corpus_of(Party::T1, seqs);

  const auto linear = build_negative_sampler(t, g, {1.0, 5, 0.5});
  CHECK(linear.probability({Party::T1, 0}) / linear.probability({Party::T1, 1}) == doctest::Approx(8.0));

  const auto damped = build_negative_sampler(t, g, {0.75, 5, 0.5});
  CHECK(damped.probability({Party::T1, 0}) / damped.probability({Party::T1, 1}) == doctest::Approx(std::pow(8.0, 0.75)));
  CHECK(damped.probability({Party::T1, 2}) == 0.0);

  // 16 vs 1 occurrence at power 0.75 gives exactly 8
  std::vector<std::vector<std::uint32_t>> s2;
  for (int i = 0; i < 16; ++i) s2.push_back({0});
  s2.push_back({1});
  const auto s = build_negative_sampler(corpus_of(Party::T1, s2), g);
  CHECK(s.probability({Party::T1, 0}) / s.probability({Party::T1, 1}) == doctest::Approx(8.0));
}

TEST_CASE("empty party corpus falls back to uniform") {
  const auto g = users(4);
  const auto s = build_negative_sampler(TypedCorpus{}, g);
  for (std::uint32_t i = 0; i < 4; ++i) CHECK(s.probability({Party::T1, i}) == doctest::Approx(0.25));
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("ns = 0 returns nothing") {
  const auto g = users(4);
  const auto s = build_negative_sampler(TypedCorpus{}, g);
  Rng rng(1);
  CHECK(s.sample_negatives({Party::T1, 0}, 0, rng).empty());
}

TEST_CASE("two-node party: forced outcome and degenerate error") {
  const auto g = users(2);
  const auto s = build_negative_sampler(corpus_of(Party::T1, {{0, 1, 0, 1}}), g);
  // floor(0.5 * 1) = 0: buckets are empty
  CHECK(s.exclusions({Party::T1, 0}).empty());
  Rng rng(1);
  for (auto z : s.sample_negatives({Party::T1, 0}, 50, rng)) CHECK(z == 1);
  CHECK_THROWS_AS(s.sample_negatives({Party::T1, 0}, 3, rng, 1u), SamplerError);
}

TEST_CASE("bucket holds the most frequent co-occurring nodes, capped") {
  const auto g = users(7);
  // node 0 co-occurs with 1 (x3), 2 (x2), 3 (x1)
  const auto t = corpus_of(Party::T1, {{0, 1}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {3, 0}, {4}, {5}, {6}});
  const auto s = build_negative_sampler(t, g, {0.75, 1, 0.5});
  const auto ex = s.exclusions({Party::T1, 0});
  CHECK(std::vector<std::uint32_t>(ex.begin(), ex.end()) == std::vector<std::uint32_t>{1, 2, 3});
  const auto tight = build_negative_sampler(t, g, {0.75, 1, 0.34});  // floor(0.34 * 6) = 2
  const auto ex2 = tight.exclusions({Party::T1, 0});
  CHECK(std::vector<std::uint32_t>(ex2.begin(), ex2.end()) == std::vector<std::uint32_t>{1, 2});
}

TEST_CASE("empirical frequencies over 5 nodes within 1 percent absolute") {
  const std::vector<double> w{5.0, 1.0, 1.0, 2.0, 1.0};
  AliasTable table(w);
  Rng rng(7);
  std::vector<int> hist(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hist[table.sample(rng)];
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(hist[i] / double(n) - w[i] / 10.0) < 0.01);
}

TEST_CASE("property: excluded nodes and the center are never drawn") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = trine::testing::random_graph(seed, 20, 15, 10, 0.2);
    WalkConfig wc;
    wc.length = 10;
    wc.seed = seed;
    const std::vector<Metapath> paths{parse_metapath("upcpu"), parse_metapath("cpupc")};
    const auto typed = filter_by_type(generate_corpus(g, paths, hits(g), wc));
    const auto s = build_negative_sampler(typed, g);
    Rng rng(seed);
    for (auto p : kParties)
      for (std::uint32_t i = 0; i < g.node_count(p); ++i) {
        const NodeId c{p, i};
        const auto ex = s.exclusions(c);
        CHECK(ex.size() <= (g.node_count(p) - 1) / 2);
        try {
          for (auto z : s.sample_negatives(c, 20, rng)) {
            CHECK(z != i);
            CHECK(std::find(ex.begin(), ex.end(), z) == ex.end());
          }
        } catch (const SamplerError&) {
          // nodes absent from the corpus may leave nothing admissible
        }
      }
  }
}

TEST_CASE("sampling is deterministic for a fixed stream") {
  const auto g = users(10);
  const auto s = build_negative_sampler(corpus_of(Party::T1, {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}), g, {0.75, 2, 0.2});
  Rng a(5), b(5);
  CHECK(s.sample_negatives({Party::T1, 3}, 40, a) == s.sample_negatives({Party::T1, 3}, 40, b));
}

TEST_CASE("alias table rejects bad weights") {
  CHECK_THROWS_AS(AliasTable(std::vector<double>{}), SamplerError);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), SamplerError);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -1.0, 2.0}), SamplerError);
}
