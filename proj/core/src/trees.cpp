#include "paperlab/trees.hpp"

#include <algorithm>
#include <functional>
#include <tuple>

namespace paperlab {

char leaf_symbol(LeafKind k) {
  switch (k) {
    case LeafKind::Straight: return '|';
    case LeafKind::Snaky: return '~';
    case LeafKind::Bumpy: return '*';
  }
  return '?';
}

PlanarTree PlanarTree::leaf(LeafKind kind) {
  PlanarTree t;
  t.leaf_ = true;
  t.kind_ = kind;
  return t;
}

PlanarTree PlanarTree::vertex(std::vector<PlanarTree> children) {
  PlanarTree t;
  t.leaf_ = false;
  t.children_ = std::move(children);
  return t;
}

PlanarTree PlanarTree::corolla(const std::vector<LeafKind>& leaves) {
  std::vector<PlanarTree> ch;
  for (auto k : leaves) ch.push_back(leaf(k));
  return vertex(std::move(ch));
}

PlanarTree PlanarTree::corolla(std::size_t arity, LeafKind kind) {
  return corolla(std::vector<LeafKind>(arity, kind));
}

void PlanarTree::collect_leaves(std::vector<LeafKind>& out) const {
  if (leaf_) {
    out.push_back(kind_);
    return;
  }
  for (const auto& c : children_) c.collect_leaves(out);
}

std::vector<LeafKind> PlanarTree::leaves() const {
  std::vector<LeafKind> out;
  collect_leaves(out);
  return out;
}

std::size_t PlanarTree::leaf_count() const {
  if (leaf_) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

std::size_t PlanarTree::count(LeafKind k) const {
  auto l = leaves();
  return static_cast<std::size_t>(std::count(l.begin(), l.end(), k));
}

std::size_t PlanarTree::inner_vertex_count() const {
  if (leaf_) return 0;
  std::size_t n = 1;
  for (const auto& c : children_) n += c.inner_vertex_count();
  return n;
}

std::size_t PlanarTree::height() const {
  std::size_t h = 0;
  for (const auto& c : children_) h = std::max(h, c.height());
  return h + 1;
}

const PlanarTree& PlanarTree::at(const TreePath& path) const {
  const PlanarTree* t = this;
  for (std::size_t i : path) {
    if (t->leaf_ || i >= t->children_.size()) throw BadEdge("path does not name a node");
    t = &t->children_[i];
  }
  return *t;
}

PlanarTree PlanarTree::replaced(const TreePath& path, PlanarTree subtree) const {
  PlanarTree out = *this;
  PlanarTree* t = &out;
  for (std::size_t i : path) {
    if (t->leaf_ || i >= t->children_.size()) throw BadEdge("path does not name a node");
    t = &t->children_[i];
  }
  *t = std::move(subtree);
  return out;
}

void PlanarTree::collect_paths(TreePath& cur, std::vector<TreePath>& out, bool vertices) const {
  if (leaf_) {
    if (!vertices) out.push_back(cur);
    return;
  }
  if (vertices) out.push_back(cur);
  for (std::size_t i = 0; i < children_.size(); ++i) {
    cur.push_back(i);
    children_[i].collect_paths(cur, out, vertices);
    cur.pop_back();
  }
}

std::vector<TreePath> PlanarTree::vertex_paths() const {
  std::vector<TreePath> out;
  TreePath cur;
  collect_paths(cur, out, true);
  return out;
}

std::vector<TreePath> PlanarTree::leaf_paths() const {
  std::vector<TreePath> out;
  TreePath cur;
  collect_paths(cur, out, false);
  return out;
}

void PlanarTree::write(std::string& out) const {
  if (leaf_) {
    out.push_back(leaf_symbol(kind_));
    return;
  }
  out.push_back('(');
  for (const auto& c : children_) c.write(out);
  out.push_back(')');
}

std::string PlanarTree::code() const {
  std::string s;
  write(s);
  return s;
}

TreeCode canonical_code(const PlanarTree& t) { return t.code(); }

PlanarTree decode(const TreeCode& code) {
  std::size_t pos = 0;
  std::function<PlanarTree()> parse = [&]() -> PlanarTree {
    if (pos >= code.size()) throw MalformedCode("unexpected end of tree code");
    char ch = code[pos++];
    switch (ch) {
      case '|': return PlanarTree::leaf(LeafKind::Straight);
      case '~': return PlanarTree::leaf(LeafKind::Snaky);
      case '*': return PlanarTree::leaf(LeafKind::Bumpy);
      case '(': {
        std::vector<PlanarTree> ch_list;
        while (pos < code.size() && code[pos] != ')') ch_list.push_back(parse());
        if (pos >= code.size()) throw MalformedCode("unbalanced parenthesis in tree code");
        ++pos;
        return PlanarTree::vertex(std::move(ch_list));
      }
      default: throw MalformedCode(std::string("unexpected symbol '") + ch + "' in tree code");
    }
  };
  PlanarTree t = parse();
  if (pos != code.size()) throw MalformedCode("trailing characters in tree code");
  return t;
}

PlanarTree graft(const PlanarTree& t, std::size_t i, const PlanarTree& s) {
  auto paths = t.leaf_paths();
  if (i < 1 || i > paths.size())
    throw SlotOutOfRange("graft slot " + std::to_string(i) + " outside 1.." + std::to_string(paths.size()));
  return t.replaced(paths[i - 1], s);
}

PlanarTree contract_inner_edge(const PlanarTree& t, const TreePath& edge) {
  if (edge.empty()) throw BadEdge("the root edge has no lower vertex");
  const PlanarTree& top = t.at(edge);
  if (top.is_leaf()) throw BadEdge("cannot contract a leaf edge");
  TreePath parent_path(edge.begin(), edge.end() - 1);
  const PlanarTree& parent = t.at(parent_path);
  std::vector<PlanarTree> merged;
  for (std::size_t k = 0; k < parent.arity(); ++k) {
    if (k == edge.back()) {
      for (const auto& c : top.children()) merged.push_back(c);
    } else {
      merged.push_back(parent.children()[k]);
    }
  }
  return t.replaced(parent_path, PlanarTree::vertex(std::move(merged)));
}

PlanarTree subdivide_edge(const PlanarTree& t, const TreePath& edge) {
  return t.replaced(edge, PlanarTree::vertex({t.at(edge)}));
}

PlanarTree contract_all(const PlanarTree& t) {
  if (t.is_leaf()) return t;
  std::vector<PlanarTree> merged;
  for (const auto& c : t.children()) {
    PlanarTree cc = contract_all(c);
    if (cc.is_leaf()) {
      merged.push_back(cc);
    } else {
      for (const auto& g : cc.children()) merged.push_back(g);
    }
  }
  return PlanarTree::vertex(std::move(merged));
}

// ---------------------------------------------------------------- enumeration

namespace {

struct Counts {
  std::size_t v, a, b, c;  // inner vertices, snaky, straight, bumpy
  auto operator<=>(const Counts&) const = default;
  std::size_t weight() const { return v + a + b + c; }
};

class Enumerator {
 public:
  Enumerator(const TreeSpec& spec) : spec_(spec) {}

  const std::vector<PlanarTree>& trees(std::size_t level, Counts n) {
    auto key = std::make_tuple(level, n);
    if (auto it = tree_cache_.find(key); it != tree_cache_.end()) return it->second;
    std::vector<PlanarTree> out;
    if (!spec_.max_height || level <= *spec_.max_height) {
      if (n.v == 0) {
        if (n.a + n.b + n.c == 1) {
          LeafKind k = n.a ? LeafKind::Snaky : n.b ? LeafKind::Straight : LeafKind::Bumpy;
          if (leaf_allowed(level, k)) out.push_back(PlanarTree::leaf(k));
        }
      } else if (!spec_.leaf_only_levels.count(level)) {
        Counts rest{n.v - 1, n.a, n.b, n.c};
        for (std::size_t k = 0; k <= rest.weight(); ++k) {
          if (spec_.arities && !spec_.arities->count(k)) continue;
          for (const auto& f : forests(level + 1, rest, k)) out.push_back(PlanarTree::vertex(f));
        }
      }
    }
    return tree_cache_.emplace(key, std::move(out)).first->second;
  }

  const std::vector<std::vector<PlanarTree>>& forests(std::size_t level, Counts n, std::size_t k) {
    auto key = std::make_tuple(level, n, k);
    if (auto it = forest_cache_.find(key); it != forest_cache_.end()) return it->second;
    std::vector<std::vector<PlanarTree>> out;
    if (k == 0) {
      if (n.weight() == 0) out.push_back({});
    } else if (n.weight() >= k) {
      for (std::size_t v = 0; v <= n.v; ++v)
        for (std::size_t a = 0; a <= n.a; ++a)
          for (std::size_t b = 0; b <= n.b; ++b)
            for (std::size_t c = 0; c <= n.c; ++c) {
              Counts first{v, a, b, c};
              if (first.weight() == 0) continue;
              Counts rest{n.v - v, n.a - a, n.b - b, n.c - c};
              if (rest.weight() < k - 1) continue;
              const auto& heads = trees(level, first);
              if (heads.empty()) continue;
              const auto& tails = forests(level, rest, k - 1);
              for (const auto& h : heads)
                for (const auto& t : tails) {
                  std::vector<PlanarTree> f{h};
                  f.insert(f.end(), t.begin(), t.end());
                  out.push_back(std::move(f));
                }
            }
    }
    return forest_cache_.emplace(key, std::move(out)).first->second;
  }

 private:
  bool leaf_allowed(std::size_t level, LeafKind k) const {
    auto it = spec_.level_leaf_kinds.find(level);
    return it == spec_.level_leaf_kinds.end() || it->second.count(k);
  }

  const TreeSpec& spec_;
  std::map<std::tuple<std::size_t, Counts>, std::vector<PlanarTree>> tree_cache_;
  std::map<std::tuple<std::size_t, Counts, std::size_t>, std::vector<std::vector<PlanarTree>>> forest_cache_;
};

std::size_t vertex_bound(const TreeSpec& spec) {
  if (spec.max_inner_vertices) return *spec.max_inner_vertices;
  const std::size_t leaves = spec.snaky + spec.max_straight + spec.bumpy;
  if (spec.arities && !spec.arities->empty()) {
    std::size_t lo = *spec.arities->begin();
    if (lo >= 2) return leaves == 0 ? 0 : leaves - 1;
    if (lo >= 1 && spec.max_height) return leaves * (*spec.max_height > 1 ? *spec.max_height - 1 : 0);
  }
  throw UnboundedSpec("tree spec admits infinitely many trees; bound the inner vertices or exclude arities 0 and 1");
}

}  // namespace

std::vector<PlanarTree> enumerate_trees(const TreeSpec& spec) {
  if (spec.min_straight > spec.max_straight) return {};
  const std::size_t vmax = vertex_bound(spec);
  Enumerator en(spec);
  std::vector<PlanarTree> out;
  for (std::size_t v = spec.min_inner_vertices; v <= vmax; ++v)
    for (std::size_t s = spec.min_straight; s <= spec.max_straight; ++s) {
      const auto& ts = en.trees(1, Counts{v, spec.snaky, s, spec.bumpy});
      out.insert(out.end(), ts.begin(), ts.end());
    }
  std::vector<std::pair<std::string, PlanarTree>> keyed;
  for (auto& t : out) keyed.emplace_back(t.code(), std::move(t));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
              keyed.end());
  std::vector<PlanarTree> sorted;
  for (auto& [c, t] : keyed) sorted.push_back(std::move(t));
  return sorted;
}

}  // namespace paperlab
