#pragma once

// Planted planar trees with typed leaves.
//
// Nodes are addressed by the path of child indices from the root node; the
// root edge is the empty path. The level of a node is path length + 1, so the
// root vertex sits at level 1 and its children at level 2.

#include "paperlab/exact.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace paperlab {

enum class LeafKind { Straight, Snaky, Bumpy };

char leaf_symbol(LeafKind k);

class SlotOutOfRange : public Error {
 public:
  using Error::Error;
};

class BadEdge : public Error {
 public:
  using Error::Error;
};

class MalformedCode : public Error {
 public:
  using Error::Error;
};

class UnboundedSpec : public Error {
 public:
  using Error::Error;
};

using TreePath = std::vector<std::size_t>;

class PlanarTree {
 public:
  /// The single-leaf tree.
  static PlanarTree leaf(LeafKind kind = LeafKind::Snaky);
  static PlanarTree vertex(std::vector<PlanarTree> children);
  static PlanarTree corolla(const std::vector<LeafKind>& leaves);
  static PlanarTree corolla(std::size_t arity, LeafKind kind = LeafKind::Snaky);

  bool is_leaf() const { return leaf_; }
  LeafKind kind() const { return kind_; }
  const std::vector<PlanarTree>& children() const { return children_; }
  std::size_t arity() const { return children_.size(); }

  std::vector<LeafKind> leaves() const;
  std::size_t leaf_count() const;
  std::size_t count(LeafKind k) const;
  std::size_t inner_vertex_count() const;
  /// Largest node level; 1 for the single-leaf tree, 2 for a corolla.
  std::size_t height() const;

  const PlanarTree& at(const TreePath& path) const;
  PlanarTree replaced(const TreePath& path, PlanarTree subtree) const;
  /// Paths of inner vertices in preorder.
  std::vector<TreePath> vertex_paths() const;
  /// Paths of leaves, left to right.
  std::vector<TreePath> leaf_paths() const;

  std::string code() const;
  bool operator==(const PlanarTree& o) const { return code() == o.code(); }
  std::strong_ordering operator<=>(const PlanarTree& o) const { return code() <=> o.code(); }

 private:
  void collect_leaves(std::vector<LeafKind>& out) const;
  void collect_paths(TreePath& cur, std::vector<TreePath>& out, bool vertices) const;
  void write(std::string& out) const;

  bool leaf_ = true;
  LeafKind kind_ = LeafKind::Snaky;
  std::vector<PlanarTree> children_;
};

using TreeCode = std::string;

TreeCode canonical_code(const PlanarTree& t);
PlanarTree decode(const TreeCode& code);

/// S replaces the i-th leaf of T (1-based, all leaf kinds counted).
PlanarTree graft(const PlanarTree& t, std::size_t i, const PlanarTree& s);
/// Merges the inner vertex at `edge` into its parent vertex.
PlanarTree contract_inner_edge(const PlanarTree& t, const TreePath& edge);
/// Inserts an arity-1 vertex on the edge whose top node is at `edge`.
PlanarTree subdivide_edge(const PlanarTree& t, const TreePath& edge);
/// Contracts every inner edge.
PlanarTree contract_all(const PlanarTree& t);

struct TreeSpec {
  std::size_t snaky = 0;
  std::size_t max_straight = 0;
  std::size_t min_straight = 0;
  std::size_t bumpy = 0;
  std::optional<std::size_t> max_inner_vertices;
  std::size_t min_inner_vertices = 0;
  std::optional<std::size_t> max_height;
  /// Leaf kinds permitted at a level; levels not listed permit all kinds.
  std::map<std::size_t, std::set<LeafKind>> level_leaf_kinds;
  /// Levels at which inner vertices may not sit.
  std::set<std::size_t> leaf_only_levels;
  std::optional<std::set<std::size_t>> arities;
};

/// All trees meeting the spec in canonical-code order. Throws UnboundedSpec
/// when the spec admits infinitely many trees.
std::vector<PlanarTree> enumerate_trees(const TreeSpec& spec);

}  // namespace paperlab
