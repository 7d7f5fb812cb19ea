#include "paperlab/enveloping.hpp"
#include "blocks_internal.hpp"

#include <algorithm>
#include <functional>

namespace paperlab {

namespace {

int sign_of(long e) { return (e % 2 == 0) ? 1 : -1; }

void for_each_word(std::size_t base, std::size_t len, const std::function<void(const std::vector<std::uint32_t>&)>& f) {
  std::vector<std::uint32_t> w(len, 0);
  if (len > 0 && base == 0) return;
  while (true) {
    f(w);
    std::size_t k = len;
    while (k > 0) {
      if (++w[k - 1] < base) break;
      w[k - 1] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

int tree_degree(const OAlgebra& a, const LevelTree& t) {
  const Operad& O = *a.operad();
  int d = O.degree(t.children.size(), t.op);
  for (const auto& c : t.children) {
    if (c.kind == LevelTree::Child::Kind::Label) d += a.degree(c.label);
    if (c.kind == LevelTree::Child::Kind::Vertex) {
      d += O.degree(c.labels.size(), c.op);
      for (auto l : c.labels) d += a.degree(l);
    }
  }
  return d;
}

std::map<LevelTree, Scalar> tree_differential(const OAlgebra& a, const LevelTree& t) {
  const Operad& O = *a.operad();
  std::map<LevelTree, Scalar> out;
  const std::size_t N = t.children.size();
  for (const auto& [op, c] : O.differential(N, t.op)) {
    LevelTree u = t;
    u.op = op;
    out[u] += c;
  }
  int running = O.degree(N, t.op);
  for (std::size_t k = 0; k < N; ++k) {
    const auto& ch = t.children[k];
    if (ch.kind == LevelTree::Child::Kind::Label) {
      for (const auto& [b, c] : a.differential(ch.label)) {
        LevelTree u = t;
        u.children[k].label = static_cast<std::uint32_t>(b);
        out[u] += c * sign_of(running);
      }
      running += a.degree(ch.label);
    } else if (ch.kind == LevelTree::Child::Kind::Vertex) {
      const std::size_t m = ch.labels.size();
      for (const auto& [op, c] : O.differential(m, ch.op)) {
        LevelTree u = t;
        u.children[k].op = op;
        out[u] += c * sign_of(running);
      }
      running += O.degree(m, ch.op);
      for (std::size_t j = 0; j < m; ++j) {
        for (const auto& [b, c] : a.differential(ch.labels[j])) {
          LevelTree u = t;
          u.children[k].labels[j] = static_cast<std::uint32_t>(b);
          out[u] += c * sign_of(running);
        }
        running += a.degree(ch.labels[j]);
      }
    }
  }
  return out;
}

// Root arity n + s0 + r; vertex arities bounded by the remaining label budget.
void for_each_level_tree(const OAlgebra& a, std::size_t n, const TruncationBounds& b,
                         const std::function<void(const LevelTree&)>& emit) {
  const Operad& O = *a.operad();
  const std::size_t S = b.max_straight_leaves;
  const std::size_t rmax = b.max_inner_vertices - 1;
  for (std::size_t s0 = 0; s0 <= S; ++s0)
    for (std::size_t r = 0; r <= rmax && s0 + r <= S; ++r) {
      const std::size_t N = n + s0 + r;
      if (O.dim(N) == 0) continue;
      LevelTree t;
      t.children.resize(N);
      std::function<void(std::size_t, std::size_t, std::size_t, std::size_t, std::size_t)> rec =
          [&](std::size_t k, std::size_t snaky, std::size_t labels, std::size_t verts, std::size_t budget) {
            if (k == N) {
              for (std::size_t op = 0; op < O.dim(N); ++op) {
                t.op = op;
                emit(t);
              }
              return;
            }
            auto& ch = t.children[k];
            if (snaky > 0) {
              ch = LevelTree::Child{};
              rec(k + 1, snaky - 1, labels, verts, budget);
            }
            if (labels > 0)
              for (std::uint32_t l = 0; l < a.dim(); ++l) {
                ch = LevelTree::Child{LevelTree::Child::Kind::Label, l, 0, {}};
                rec(k + 1, snaky, labels - 1, verts, budget);
              }
            if (verts > 0)
              for (std::size_t m = 0; m <= budget; ++m)
                for (std::size_t op = 0; op < O.dim(m); ++op)
                  for_each_word(a.dim(), m, [&](const std::vector<std::uint32_t>& w) {
                    t.children[k] = LevelTree::Child{LevelTree::Child::Kind::Vertex, 0, op, w};
                    rec(k + 1, snaky, labels, verts - 1, budget - m);
                  });
          };
      rec(0, n, s0, r, S - s0);
    }
}

}  // namespace

PlanarTree LevelTree::shape() const {
  std::vector<PlanarTree> kids;
  for (const auto& c : children) {
    switch (c.kind) {
      case Child::Kind::Snaky: kids.push_back(PlanarTree::leaf(LeafKind::Snaky)); break;
      case Child::Kind::Label: kids.push_back(PlanarTree::leaf(LeafKind::Straight)); break;
      case Child::Kind::Vertex: kids.push_back(PlanarTree::corolla(c.labels.size(), LeafKind::Straight)); break;
    }
  }
  return PlanarTree::vertex(std::move(kids));
}

std::string LevelTree::code() const {
  std::string s = shape().code() + " o" + std::to_string(op) + " [";
  bool first = true;
  auto put = [&](const std::string& x) {
    s += (first ? "" : ",") + x;
    first = false;
  };
  for (const auto& c : children) {
    if (c.kind == Child::Kind::Label) put(std::to_string(c.label));
    if (c.kind == Child::Kind::Vertex) {
      put("o" + std::to_string(c.op));
      for (auto l : c.labels) put(std::to_string(l));
    }
  }
  return s + "]";
}

OA0Block build_OA0(const OAlgebra& a, std::size_t n, const TruncationBounds& b) {
  b.validate();
  const Operad& O = *a.operad();
  std::vector<Corolla> gens;
  for (std::size_t s = 0; s <= b.max_straight_leaves; ++s) {
    const std::size_t N = n + s;
    if (O.dim(N) == 0) continue;
    std::vector<bool> mask(N, false);
    std::fill(mask.begin(), mask.begin() + s, true);
    do {
      for (std::size_t op = 0; op < O.dim(N); ++op)
        for_each_word(a.dim(), s, [&](const std::vector<std::uint32_t>& w) {
          Corolla g{op, std::vector<std::uint32_t>(N, kSnakyLeaf)};
          for (std::size_t k = 0, j = 0; k < N; ++k)
            if (mask[k]) g.leaves[k] = w[j++];
          gens.push_back(std::move(g));
        });
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  auto built = detail::assemble<Corolla>(
      a.ring(), std::move(gens), [&](const Corolla& g) { return corolla_degree(a, g); },
      [](const Corolla& g) { return g.code(); }, [&](const Corolla& g) { return corolla_differential(a, g); });
  return OA0Block{std::move(built.complex), std::move(built.basis)};
}

OA1Block build_OA1(const OAlgebra& a, std::size_t n, const TruncationBounds& b) {
  b.validate();
  std::vector<LevelTree> trees;
  for_each_level_tree(a, n, b, [&](const LevelTree& t) { trees.push_back(t); });
  auto built = detail::assemble<LevelTree>(
      a.ring(), std::move(trees), [&](const LevelTree& t) { return tree_degree(a, t); },
      [](const LevelTree& t) { return t.code(); }, [&](const LevelTree& t) { return tree_differential(a, t); });
  return OA1Block{std::move(built.complex), std::move(built.basis)};
}

CorollaVec contract_corollas(const OAlgebra& a, const LevelTree& t) {
  std::vector<std::pair<std::vector<std::uint32_t>, Scalar>> partial{{{}, Scalar(1)}};
  for (const auto& ch : t.children) {
    std::vector<std::pair<std::vector<std::uint32_t>, Scalar>> next;
    for (auto& [leaves, c] : partial) {
      switch (ch.kind) {
        case LevelTree::Child::Kind::Snaky:
          leaves.push_back(kSnakyLeaf);
          next.emplace_back(std::move(leaves), c);
          break;
        case LevelTree::Child::Kind::Label:
          leaves.push_back(ch.label);
          next.emplace_back(std::move(leaves), c);
          break;
        case LevelTree::Child::Kind::Vertex: {
          std::vector<std::size_t> args(ch.labels.begin(), ch.labels.end());
          for (const auto& [x, cx] : a.act(ch.labels.size(), ch.op, args)) {
            auto l = leaves;
            l.push_back(static_cast<std::uint32_t>(x));
            next.emplace_back(std::move(l), c * cx);
          }
          break;
        }
      }
    }
    partial = std::move(next);
  }
  CorollaVec out;
  for (auto& [leaves, c] : partial) out[Corolla{t.op, std::move(leaves)}] += c;
  for (auto it = out.begin(); it != out.end();) it = sgn(a.ring().normalize(it->second)) == 0 ? out.erase(it) : std::next(it);
  return out;
}

CorollaVec contract_edges(const OAlgebra& a, const LevelTree& t) {
  const Operad& O = *a.operad();
  struct State {
    std::size_t op;
    std::vector<std::uint32_t> prefix;
    Scalar c;
  };
  std::vector<State> states{{t.op, {}, Scalar(1)}};
  int label_degrees = 0;
  const std::size_t total = t.children.size();
  for (std::size_t k = 0; k < total; ++k) {
    const auto& ch = t.children[k];
    if (ch.kind != LevelTree::Child::Kind::Vertex) {
      for (auto& st : states) st.prefix.push_back(ch.kind == LevelTree::Child::Kind::Snaky ? kSnakyLeaf : ch.label);
      if (ch.kind == LevelTree::Child::Kind::Label) label_degrees += a.degree(ch.label);
      continue;
    }
    const std::size_t m = ch.labels.size();
    const int sg = sign_of(static_cast<long>(O.degree(m, ch.op)) * label_degrees);
    std::vector<State> next;
    for (const auto& st : states) {
      const std::size_t arity = st.prefix.size() + (total - k);
      for (const auto& [op, c] : O.compose(arity, st.op, st.prefix.size() + 1, m, ch.op)) {
        State ns{op, st.prefix, st.c * c * sg};
        ns.prefix.insert(ns.prefix.end(), ch.labels.begin(), ch.labels.end());
        next.push_back(std::move(ns));
      }
    }
    for (auto l : ch.labels) label_degrees += a.degree(l);
    states = std::move(next);
  }
  CorollaVec out;
  for (auto& st : states) out[Corolla{st.op, std::move(st.prefix)}] += st.c;
  for (auto it = out.begin(); it != out.end();) it = sgn(a.ring().normalize(it->second)) == 0 ? out.erase(it) : std::next(it);
  return out;
}

std::map<LevelTree, Scalar> subdivide_labels(const OAlgebra& a, const Corolla& g, const TruncationBounds& b) {
  if (g.straight() > b.max_inner_vertices - 1)
    throw WindowExceeded("subdividing " + g.code() + " needs " + std::to_string(g.straight()) +
                         " level-2 vertices, bound allows " + std::to_string(b.max_inner_vertices - 1));
  std::vector<std::pair<LevelTree, Scalar>> partial{{LevelTree{g.op, {}}, Scalar(1)}};
  for (auto l : g.leaves) {
    std::vector<std::pair<LevelTree, Scalar>> next;
    for (auto& [t, c] : partial) {
      if (l == kSnakyLeaf) {
        t.children.push_back(LevelTree::Child{});
        next.emplace_back(std::move(t), c);
        continue;
      }
      for (const auto& [u, cu] : a.operad()->unit()) {
        LevelTree v = t;
        v.children.push_back(LevelTree::Child{LevelTree::Child::Kind::Vertex, 0, u, {l}});
        next.emplace_back(std::move(v), c * cu);
      }
    }
    partial = std::move(next);
  }
  return {partial.begin(), partial.end()};
}

CoequalizerArrows coequalizer_arrows(const OAlgebra& a, std::size_t n, const TruncationBounds& b) {
  CoequalizerArrows r;
  r.upper = build_OA1(a, n, b);
  r.lower = build_OA0(a, n, b);
  auto up_index = detail::index_of(r.upper.basis);
  auto low_index = detail::index_of(r.lower.basis);
  r.d_corolla = detail::linear_map<LevelTree, Corolla>(r.upper.complex, r.upper.basis, r.lower.complex, low_index,
                                                       [&](const LevelTree& t) { return contract_corollas(a, t); });
  r.d_edge = detail::linear_map<LevelTree, Corolla>(r.upper.complex, r.upper.basis, r.lower.complex, low_index,
                                                    [&](const LevelTree& t) { return contract_edges(a, t); });
  r.section = detail::linear_map<Corolla, LevelTree>(r.lower.complex, r.lower.basis, r.upper.complex, up_index,
                                                     [&](const Corolla& g) { return subdivide_labels(a, g, b); });
  return r;
}

}  // namespace paperlab
