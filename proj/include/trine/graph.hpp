#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trine/common.hpp"

namespace trine {

enum class Party : std::uint8_t { T1 = 0, T2 = 1, T3 = 2 };

inline constexpr std::array<Party, 3> kParties{Party::T1, Party::T2, Party::T3};

constexpr std::size_t party_index(Party p) noexcept { return static_cast<std::size_t>(p); }

/// The three cross-party relations: E1 = T1xT2, E2 = T2xT3, E3 = T1xT3.
enum class Relation : std::uint8_t { E1 = 0, E2 = 1, E3 = 2 };

inline constexpr std::array<Relation, 3> kRelations{Relation::E1, Relation::E2, Relation::E3};

constexpr std::size_t relation_index(Relation r) noexcept { return static_cast<std::size_t>(r); }

/// Endpoint parties of a relation, in canonical (lower party first) order.
constexpr std::pair<Party, Party> relation_parties(Relation r) noexcept {
  switch (r) {
    case Relation::E1: return {Party::T1, Party::T2};
    case Relation::E2: return {Party::T2, Party::T3};
    case Relation::E3: return {Party::T1, Party::T3};
  }
  return {Party::T1, Party::T2};
}

/// Relation joining two distinct parties. Throws ValidationError when a == b.
Relation relation_between(Party a, Party b);

/// Parses "12", "23", "13" (either order) into a relation.
Relation parse_relation(std::string_view text);
std::string relation_name(Relation r);

struct NodeId {
  Party party = Party::T1;
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct Edge {
  NodeId src;
  NodeId dst;
  double weight = 1.0;
};

struct Neighbor {
  std::uint32_t index;
  double weight;

  friend constexpr bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Type characters and human-readable names for the three parties.
struct Schema {
  std::array<char, 3> type_chars{'u', 'p', 'c'};
  std::array<std::string, 3> names{"user", "page", "category"};

  std::optional<Party> party_of(char c) const noexcept;
  char type_char(Party p) const noexcept { return type_chars[party_index(p)]; }

  /// Builds a schema from a three-character string such as "upc".
  static Schema from_chars(std::string_view chars);

  friend bool operator==(const Schema&, const Schema&) = default;
};

/// Compressed adjacency from one party towards another.
struct Csr {
  std::vector<std::size_t> offsets;  // size = source count + 1
  std::vector<Neighbor> entries;

  std::span<const Neighbor> row(std::size_t i) const {
    return {entries.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

/// Weighted tripartite graph. Immutable once built; safe for concurrent reads.
class TripartiteGraph {
 public:
  /// Raw storage. The constructor taking Parts does not validate, so tests can
  /// build faulty graphs and feed them to validate().
  struct Parts {
    Schema schema;
    std::array<std::vector<std::string>, 3> labels;
    std::array<std::array<Csr, 3>, 3> adjacency;  // [from party][to party]
    std::array<std::vector<Edge>, 3> edges;       // per relation, canonical orientation
    std::array<double, 3> total_weight{0.0, 0.0, 0.0};
  };

  TripartiteGraph();
  explicit TripartiteGraph(Parts parts);

  const Schema& schema() const noexcept { return parts_.schema; }
  std::size_t node_count(Party p) const noexcept { return parts_.labels[party_index(p)].size(); }
  std::size_t node_count() const noexcept;
  std::size_t edge_count() const noexcept;
  std::size_t edge_count(Relation r) const noexcept { return parts_.edges[relation_index(r)].size(); }

  std::span<const Edge> edges(Relation r) const noexcept { return parts_.edges[relation_index(r)]; }
  double total_weight(Relation r) const noexcept { return parts_.total_weight[relation_index(r)]; }

  bool contains(NodeId v) const noexcept { return v.index < node_count(v.party); }

  /// Neighbors of v within party `target`, sorted by index. Throws ValidationError
  /// if target == v.party or v is not in the graph.
  std::span<const Neighbor> neighbors(NodeId v, Party target) const;

  /// Total number of cross-party neighbors of v.
  std::size_t degree(NodeId v) const;

  const std::string& label(NodeId v) const { return parts_.labels[party_index(v.party)].at(v.index); }
  std::span<const std::string> labels(Party p) const noexcept { return parts_.labels[party_index(p)]; }
  std::optional<NodeId> find(std::string_view label) const;

  /// Offset of a party's block in the concatenated (T1, T2, T3) node ordering.
  std::size_t offset(Party p) const noexcept;
  std::size_t global_index(NodeId v) const noexcept { return offset(v.party) + v.index; }
  NodeId node_at(std::size_t global) const;

  /// Copy with the listed cross-party pairs removed; the node set is kept.
  TripartiteGraph without_edges(std::span<const std::pair<NodeId, NodeId>> removed) const;

  const Parts& parts() const noexcept { return parts_; }

 private:
  Parts parts_;
  std::array<std::unordered_map<std::string, std::uint32_t>, 3> index_;
};

/// Accumulates labelled edges and produces a symmetric TripartiteGraph.
/// Duplicate edges have their weights summed.
class GraphBuilder {
 public:
  explicit GraphBuilder(Schema schema = {});

  NodeId add_node(std::string_view label);
  /// Adds (or merges into) an edge. Throws SchemaError/ValidationError on bad input.
  void add_edge(std::string_view src, std::string_view dst, double weight = 1.0);
  void add_edge(NodeId a, NodeId b, double weight = 1.0);

  TripartiteGraph build() const;

 private:
  Schema schema_;
  std::array<std::vector<std::string>, 3> labels_;
  std::array<std::unordered_map<std::string, std::uint32_t>, 3> index_;
  std::array<std::map<std::pair<std::uint32_t, std::uint32_t>, double>, 3> edges_;
};

/// Reads the whitespace edge-list format: `<src> <dst> [weight]`, '#' comments.
TripartiteGraph parse_edge_list(std::istream& in, const Schema& schema = {});
TripartiteGraph load_edge_list(const std::filesystem::path& path, const Schema& schema = {});
void write_edge_list(std::ostream& out, const TripartiteGraph& g);

/// Free-function form of TripartiteGraph::neighbors.
std::vector<std::pair<NodeId, double>> neighbors(const TripartiteGraph& g, NodeId v, Party target);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks every structural invariant; never throws.
ValidationReport validate(const TripartiteGraph& g);

/// A schema-valid sequence of node types guiding walk transitions.
class Metapath {
 public:
  /// Throws ValidationError if shorter than 2 or if two consecutive types repeat.
  explicit Metapath(std::vector<Party> types);

  std::span<const Party> types() const noexcept { return types_; }
  std::size_t size() const noexcept { return types_.size(); }
  Party front() const noexcept { return types_.front(); }
  Party at(std::size_t pos) const { return types_.at(pos); }

  /// Position following `pos` when the scheme is walked cyclically.
  /// Palindromic schemes (same first/last type) continue at index 1, others at 0.
  std::size_t next(std::size_t pos) const noexcept;

  std::string to_string(const Schema& schema) const;

  friend bool operator==(const Metapath&, const Metapath&) = default;

 private:
  std::vector<Party> types_;
};

/// Parses a type-character string such as "upcpu".
Metapath parse_metapath(std::string_view text, const Schema& schema = {});

}  // namespace trine
