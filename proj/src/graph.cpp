#include "trine/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace trine {

Relation relation_between(Party a, Party b) {
  if (a == b) throw ValidationError("no relation joins a party to itself");
  const auto lo = std::min(a, b);
  const auto hi = std::max(a, b);
  if (lo == Party::T1 && hi == Party::T2) return Relation::E1;
  if (lo == Party::T2 && hi == Party::T3) return Relation::E2;
  return Relation::E3;
}

Relation parse_relation(std::string_view text) {
  if (text == "12" || text == "21") return Relation::E1;
  if (text == "23" || text == "32") return Relation::E2;
  if (text == "13" || text == "31") return Relation::E3;
  throw ConfigError("unknown relation '" + std::string(text) + "' (expected 12, 23 or 13)");
}

std::string relation_name(Relation r) {
  switch (r) {
    case Relation::E1: return "12";
    case Relation::E2: return "23";
    case Relation::E3: return "13";
  }
  return "?";
}

std::optional<Party> Schema::party_of(char c) const noexcept {
  for (auto p : kParties)
    if (type_chars[party_index(p)] == c) return p;
  return std::nullopt;
}

Schema Schema::from_chars(std::string_view chars) {
  if (chars.size() != 3) throw ConfigError("schema needs exactly three type characters, got '" + std::string(chars) + "'");
  Schema s;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!std::islower(static_cast<unsigned char>(chars[i])))
      throw ConfigError("schema type characters must be lowercase letters");
    s.type_chars[i] = chars[i];
  }
  if (s.type_chars[0] == s.type_chars[1] || s.type_chars[1] == s.type_chars[2] || s.type_chars[0] == s.type_chars[2])
    throw ConfigError("schema type characters must be distinct");
  return s;
}

// ---------------------------------------------------------------------------

TripartiteGraph::TripartiteGraph() : TripartiteGraph(Parts{}) {}

TripartiteGraph::TripartiteGraph(Parts parts) : parts_(std::move(parts)) {
  for (auto p : kParties) {
    const auto pi = party_index(p);
    auto& idx = index_[pi];
    idx.reserve(parts_.labels[pi].size());
    for (std::uint32_t i = 0; i < parts_.labels[pi].size(); ++i) idx.emplace(parts_.labels[pi][i], i);
    for (auto q : kParties) {
      auto& csr = parts_.adjacency[pi][party_index(q)];
      if (csr.offsets.empty()) csr.offsets.assign(parts_.labels[pi].size() + 1, 0);
    }
  }
}

std::size_t TripartiteGraph::node_count() const noexcept {
  return node_count(Party::T1) + node_count(Party::T2) + node_count(Party::T3);
}

std::size_t TripartiteGraph::edge_count() const noexcept {
  return edge_count(Relation::E1) + edge_count(Relation::E2) + edge_count(Relation::E3);
}

std::span<const Neighbor> TripartiteGraph::neighbors(NodeId v, Party target) const {
  if (target == v.party) throw ValidationError("neighbor query within a single party");
  if (!contains(v)) throw ValidationError("node index " + std::to_string(v.index) + " out of range");
  return parts_.adjacency[party_index(v.party)][party_index(target)].row(v.index);
}

std::size_t TripartiteGraph::degree(NodeId v) const {
  std::size_t d = 0;
  for (auto q : kParties)
    if (q != v.party) d += neighbors(v, q).size();
  return d;
}

std::optional<NodeId> TripartiteGraph::find(std::string_view label) const {
  if (label.empty()) return std::nullopt;
  const auto p = parts_.schema.party_of(label.front());
  if (!p) return std::nullopt;
  const auto& idx = index_[party_index(*p)];
  const auto it = idx.find(std::string(label));
  if (it == idx.end()) return std::nullopt;
  return NodeId{*p, it->second};
}

std::size_t TripartiteGraph::offset(Party p) const noexcept {
  switch (p) {
    case Party::T1: return 0;
    case Party::T2: return node_count(Party::T1);
    case Party::T3: return node_count(Party::T1) + node_count(Party::T2);
  }
  return 0;
}

NodeId TripartiteGraph::node_at(std::size_t global) const {
  for (auto p : kParties) {
    if (global < node_count(p)) return NodeId{p, static_cast<std::uint32_t>(global)};
    global -= node_count(p);
  }
  throw ValidationError("global node index out of range");
}

TripartiteGraph TripartiteGraph::without_edges(std::span<const std::pair<NodeId, NodeId>> removed) const {
  std::set<std::pair<NodeId, NodeId>> drop;
  for (auto [a, b] : removed) drop.emplace(std::min(a, b), std::max(a, b));

  GraphBuilder builder(parts_.schema);
  for (auto p : kParties)
    for (const auto& l : labels(p)) builder.add_node(l);
  for (auto r : kRelations)
    for (const auto& e : edges(r))
      if (!drop.contains({std::min(e.src, e.dst), std::max(e.src, e.dst)})) builder.add_edge(e.src, e.dst, e.weight);
  return builder.build();
}

// ---------------------------------------------------------------------------

GraphBuilder::GraphBuilder(Schema schema) : schema_(std::move(schema)) {}

NodeId GraphBuilder::add_node(std::string_view label) {
  if (label.size() < 2) throw ValidationError("node label '" + std::string(label) + "' lacks an identifier");
  const auto party = schema_.party_of(label.front());
  if (!party) throw SchemaError("unknown node type prefix in label '" + std::string(label) + "'");
  const auto pi = party_index(*party);
  auto [it, inserted] = index_[pi].try_emplace(std::string(label), static_cast<std::uint32_t>(labels_[pi].size()));
  if (inserted) labels_[pi].emplace_back(label);
  return NodeId{*party, it->second};
}

void GraphBuilder::add_edge(std::string_view src, std::string_view dst, double weight) {
  const auto a = add_node(src);
  const auto b = add_node(dst);
  add_edge(a, b, weight);
}

void GraphBuilder::add_edge(NodeId a, NodeId b, double weight) {
  if (a.party == b.party) throw ValidationError("intra-party edge");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw ValidationError("edge weight must be positive and finite");
  if (a.index >= labels_[party_index(a.party)].size() || b.index >= labels_[party_index(b.party)].size())
    throw ValidationError("edge endpoint not registered with the builder");
  if (b.party < a.party) std::swap(a, b);
  edges_[relation_index(relation_between(a.party, b.party))][{a.index, b.index}] += weight;
}

TripartiteGraph GraphBuilder::build() const {
  TripartiteGraph::Parts parts;
  parts.schema = schema_;
  parts.labels = labels_;

  // Bucket neighbors per (from, to) party, then compress.
  std::array<std::array<std::vector<std::vector<Neighbor>>, 3>, 3> lists;
  for (auto p : kParties)
    for (auto q : kParties) lists[party_index(p)][party_index(q)].resize(labels_[party_index(p)].size());

  for (auto r : kRelations) {
    const auto [pa, pb] = relation_parties(r);
    auto& edges = parts.edges[relation_index(r)];
    double total = 0.0;
    for (const auto& [key, w] : edges_[relation_index(r)]) {
      edges.push_back(Edge{NodeId{pa, key.first}, NodeId{pb, key.second}, w});
      lists[party_index(pa)][party_index(pb)][key.first].push_back({key.second, w});
      lists[party_index(pb)][party_index(pa)][key.second].push_back({key.first, w});
      total += w;
    }
    parts.total_weight[relation_index(r)] = total;
  }

  for (auto p : kParties) {
    for (auto q : kParties) {
      auto& rows = lists[party_index(p)][party_index(q)];
      auto& csr = parts.adjacency[party_index(p)][party_index(q)];
      csr.offsets.assign(rows.size() + 1, 0);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::sort(rows[i].begin(), rows[i].end(), [](const Neighbor& x, const Neighbor& y) { return x.index < y.index; });
        csr.offsets[i + 1] = csr.offsets[i] + rows[i].size();
      }
      csr.entries.reserve(csr.offsets.back());
      for (auto& row : rows) csr.entries.insert(csr.entries.end(), row.begin(), row.end());
    }
  }
  return TripartiteGraph(std::move(parts));
}

// ---------------------------------------------------------------------------

TripartiteGraph parse_edge_list(std::istream& in, const Schema& schema) {
  GraphBuilder builder(schema);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string src, dst, wtext, extra;
    fields >> src >> dst;
    if (dst.empty()) throw ParseError("expected '<src> <dst> [weight]'", lineno);
    double weight = 1.0;
    if (fields >> wtext) {
      const auto* end = wtext.data() + wtext.size();
      auto [ptr, ec] = std::from_chars(wtext.data(), end, weight);
      if (ec != std::errc{} || ptr != end) throw ParseError("bad weight '" + wtext + "'", lineno);
      if (fields >> extra) throw ParseError("trailing field '" + extra + "'", lineno);
    }
    try {
      builder.add_edge(src, dst, weight);
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return builder.build();
}

TripartiteGraph load_edge_list(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path.string() + "'");
  return parse_edge_list(in, schema);
}

void write_edge_list(std::ostream& out, const TripartiteGraph& g) {
  char buf[64];
  for (auto r : kRelations) {
    for (const auto& e : g.edges(r)) {
      std::snprintf(buf, sizeof buf, "%.17g", e.weight);
      out << g.label(e.src) << ' ' << g.label(e.dst) << ' ' << buf << '\n';
    }
  }
}

std::vector<std::pair<NodeId, double>> neighbors(const TripartiteGraph& g, NodeId v, Party target) {
  std::vector<std::pair<NodeId, double>> out;
  for (const auto& n : g.neighbors(v, target)) out.emplace_back(NodeId{target, n.index}, n.weight);
  return out;
}

// ---------------------------------------------------------------------------

ValidationReport validate(const TripartiteGraph& g) {
  ValidationReport report;
  const auto& parts = g.parts();
  auto name = [&](Party p, std::uint32_t i) {
    const auto& labels = parts.labels[party_index(p)];
    return i < labels.size() ? labels[i] : "#" + std::to_string(i);
  };

  for (auto p : kParties) {
    const auto n = parts.labels[party_index(p)].size();
    for (auto q : kParties) {
      const auto& csr = parts.adjacency[party_index(p)][party_index(q)];
      if (csr.offsets.size() != n + 1) {
        report.violations.push_back("adjacency row count mismatch for party pair " + std::to_string(party_index(p)) +
                                    "->" + std::to_string(party_index(q)));
        continue;
      }
      if (p == q && !csr.entries.empty()) {
        report.violations.push_back("intra-party adjacency present in party " + std::to_string(party_index(p)));
        continue;
      }
      const auto& back = parts.adjacency[party_index(q)][party_index(p)];
      const auto nq = parts.labels[party_index(q)].size();
      for (std::uint32_t i = 0; i < n; ++i) {
        const auto row = csr.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
          const auto& nb = row[k];
          if (k > 0 && row[k - 1].index >= nb.index)
            report.violations.push_back("unsorted or duplicate neighbor list at " + name(p, i));
          if (!(nb.weight > 0.0) || !std::isfinite(nb.weight))
            report.violations.push_back("non-positive weight on " + name(p, i) + "--" + name(q, nb.index));
          if (nb.index >= nq) {
            report.violations.push_back("neighbor index out of range at " + name(p, i));
            continue;
          }
          if (back.offsets.size() != nq + 1) continue;
          const auto mirror = back.row(nb.index);
          const auto it = std::find_if(mirror.begin(), mirror.end(), [&](const Neighbor& m) { return m.index == i; });
          if (it == mirror.end() || it->weight != nb.weight)
            report.violations.push_back("asymmetric adjacency " + name(p, i) + "--" + name(q, nb.index));
        }
      }
    }
  }

  for (auto r : kRelations) {
    const auto [pa, pb] = relation_parties(r);
    double sum = 0.0;
    for (const auto& e : parts.edges[relation_index(r)]) {
      sum += e.weight;
      if (e.src.party == e.dst.party) {
        report.violations.push_back("intra-party edge in relation " + relation_name(r));
        continue;
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        report.violations.push_back("non-positive weight on edge " + name(e.src.party, e.src.index) + "--" +
                                    name(e.dst.party, e.dst.index));
      if (relation_between(e.src.party, e.dst.party) != r) {
        report.violations.push_back("edge filed under the wrong relation " + relation_name(r));
        continue;
      }
      const auto& csr = parts.adjacency[party_index(e.src.party)][party_index(e.dst.party)];
      if (e.src.index >= parts.labels[party_index(e.src.party)].size() || csr.offsets.size() < e.src.index + 2) {
        report.violations.push_back("edge endpoint out of range in relation " + relation_name(r));
        continue;
      }
      const auto row = csr.row(e.src.index);
      if (std::none_of(row.begin(), row.end(), [&](const Neighbor& n) { return n.index == e.dst.index && n.weight == e.weight; }))
        report.violations.push_back("edge missing from adjacency " + name(e.src.party, e.src.index) + "--" +
                                    name(e.dst.party, e.dst.index));
    }
    const auto stored = parts.total_weight[relation_index(r)];
    if (std::abs(sum - stored) > 1e-9 * std::max(1.0, std::abs(sum)))
      report.violations.push_back("relation " + relation_name(r) + " total weight mismatch");
    const auto& csr = parts.adjacency[party_index(pa)][party_index(pb)];
    if (!csr.offsets.empty() && csr.entries.size() != parts.edges[relation_index(r)].size())
      report.violations.push_back("relation " + relation_name(r) + " edge count differs from adjacency");
  }
  return report;
}

// ---------------------------------------------------------------------------

Metapath::Metapath(std::vector<Party> types) : types_(std::move(types)) {
  if (types_.size() < 2) throw ValidationError("a metapath needs at least two node types");
  for (std::size_t i = 1; i < types_.size(); ++i)
    if (types_[i] == types_[i - 1]) throw ValidationError("metapath repeats a node type on consecutive positions");
}

std::size_t Metapath::next(std::size_t pos) const noexcept {
  if (pos + 1 < types_.size()) return pos + 1;
  return types_.front() == types_.back() ? 1 : 0;
}

std::string Metapath::to_string(const Schema& schema) const {
  std::string s;
  for (auto t : types_) s.push_back(schema.type_char(t));
  return s;
}

Metapath parse_metapath(std::string_view text, const Schema& schema) {
  std::vector<Party> types;
  for (char c : text) {
    const auto p = schema.party_of(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (!p) throw SchemaError("metapath '" + std::string(text) + "' uses unknown type '" + std::string(1, c) + "'");
    types.push_back(*p);
  }
  return Metapath(std::move(types));
}

}  // namespace trine
