#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "trine/graph.hpp"
#include "trine/matrix.hpp"
#include "trine/trainer.hpp"

namespace trine {

/// Per-party vectors keyed by node label, as stored in an embedding file.
struct LabeledVectors {
  std::array<std::vector<std::string>, 3> labels;
  std::array<Matrix, 3> vectors;
  std::size_t dim = 0;

  std::size_t count() const noexcept { return labels[0].size() + labels[1].size() + labels[2].size(); }
  friend bool operator==(const LabeledVectors&, const LabeledVectors&) = default;
};

/// Header `<node-count> <d>`, then `<label> <v1> ... <vd>` per node (T1, T2, T3
/// order) with 9 significant digits.
void write_vectors(std::ostream& out, const std::array<Matrix, 3>& vectors, const TripartiteGraph& g);
LabeledVectors read_vectors(std::istream& in, const Schema& schema = {});

/// Writes node embeddings to `path` and, if non-empty, context vectors to `context_path`.
void save_embeddings(const EmbeddingStore& store, const TripartiteGraph& g, const std::filesystem::path& path,
                     const std::filesystem::path& context_path = {});
LabeledVectors load_embeddings(const std::filesystem::path& path, const Schema& schema = {});

/// Rebuilds a store aligned to g's node indices. Context matrices are filled
/// from `contexts` when given, otherwise left zero. Throws ValidationError if a
/// graph node has no vector.
EmbeddingStore align_to_graph(const LabeledVectors& nodes, const TripartiteGraph& g, const LabeledVectors* contexts = nullptr);

}  // namespace trine
