#include "trine/embedding_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace trine {

void write_vectors(std::ostream& out, const std::array<Matrix, 3>& vectors, const TripartiteGraph& g) {
  std::size_t dim = 0;
  for (const auto& m : vectors) dim = std::max(dim, m.cols());
  out << g.node_count() << ' ' << dim << '\n';
  char buf[40];
  for (auto p : kParties) {
    const auto& m = vectors[party_index(p)];
    if (m.rows() != g.node_count(p)) throw ValidationError("embedding rows do not match the graph's party size");
    for (std::uint32_t i = 0; i < m.rows(); ++i) {
      out << g.label(NodeId{p, i});
      for (double x : m.row(i)) {
        std::snprintf(buf, sizeof buf, " %.9g", x);
        out << buf;
      }
      out << '\n';
    }
  }
}

LabeledVectors read_vectors(std::istream& in, const Schema& schema) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t count = 0;
  LabeledVectors lv;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  {
    std::istringstream head(line);
    std::string extra;
    if (!(head >> count >> lv.dim) || (head >> extra)) throw ParseError("expected header '<node-count> <d>'", lineno);
    if (lv.dim == 0) throw ParseError("embedding dimension must be positive", lineno);
  }

  std::array<std::vector<double>, 3> flat;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string label, tok;
    fields >> label;
    const auto party = label.size() >= 2 ? schema.party_of(label.front()) : std::nullopt;
    if (!party) throw ParseError("bad node label '" + label + "'", lineno);
    auto& dst = flat[party_index(*party)];
    std::size_t got = 0;
    while (fields >> tok) {
      double x = 0.0;
      const auto* end = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(tok.data(), end, x);
      if (ec != std::errc{} || ptr != end) throw ParseError("bad number '" + tok + "'", lineno);
      dst.push_back(x);
      ++got;
    }
    if (got != lv.dim)
      throw ParseError("expected " + std::to_string(lv.dim) + " values, found " + std::to_string(got), lineno);
    lv.labels[party_index(*party)].push_back(std::move(label));
    ++rows;
  }
  if (rows != count)
    throw ParseError("header declares " + std::to_string(count) + " nodes but the body has " + std::to_string(rows), lineno);

  for (std::size_t p = 0; p < 3; ++p) {
    lv.vectors[p] = Matrix(lv.labels[p].size(), lv.dim);
    std::copy(flat[p].begin(), flat[p].end(), lv.vectors[p].data().begin());
  }
  return lv;
}

void save_embeddings(const EmbeddingStore& store, const TripartiteGraph& g, const std::filesystem::path& path,
                     const std::filesystem::path& context_path) {
  auto dump = [&](const std::array<Matrix, 3>& m, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    write_vectors(out, m, g);
    if (!out) throw Error("write to '" + p.string() + "' failed");
  };
  dump(store.node, path);
  if (!context_path.empty()) dump(store.context, context_path);
}

LabeledVectors load_embeddings(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file '" + path.string() + "'");
  return read_vectors(in, schema);
}

EmbeddingStore align_to_graph(const LabeledVectors& nodes, const TripartiteGraph& g, const LabeledVectors* contexts) {
  auto fill = [&](const LabeledVectors& src, std::array<Matrix, 3>& dst) {
    for (auto p : kParties) {
      const auto pi = party_index(p);
      std::unordered_map<std::string_view, std::size_t> row_of;
      for (std::size_t i = 0; i < src.labels[pi].size(); ++i) row_of.emplace(src.labels[pi][i], i);
      dst[pi] = Matrix(g.node_count(p), src.dim);
      for (std::uint32_t i = 0; i < g.node_count(p); ++i) {
        const auto& label = g.label(NodeId{p, i});
        const auto it = row_of.find(label);
        if (it == row_of.end()) throw ValidationError("no embedding for node '" + label + "'");
        const auto row = src.vectors[pi].row(it->second);
        std::copy(row.begin(), row.end(), dst[pi].row(i).begin());
      }
    }
  };
  EmbeddingStore store;
  fill(nodes, store.node);
  if (contexts) {
    if (contexts->dim != nodes.dim) throw ValidationError("context and node embedding dimensions differ");
    fill(*contexts, store.context);
  } else {
    for (auto p : kParties) store.context[party_index(p)] = Matrix(g.node_count(p), nodes.dim);
  }
  return store;
}

}  // namespace trine
