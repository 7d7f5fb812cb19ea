#include "paperlab/enveloping.hpp"
#include "blocks_internal.hpp"

#include <functional>

namespace paperlab {

using detail::summand_offsets;

namespace {

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

void require_operad(const OAlgebra& a, std::initializer_list<const char*> names, ClosedFormKind kind) {
  for (const char* n : names)
    if (a.operad()->name() == n) return;
  throw Error("closed form '" + to_string(kind) + "' does not apply to operad '" + a.operad()->name() + "'");
}

std::shared_ptr<const FreeOperad> require_free(const AlgebraPtr& a) {
  auto f = std::dynamic_pointer_cast<const FreeOperad>(a->operad());
  if (!f) throw Error("closed form 'free' needs a free operad, got '" + a->operad()->name() + "'");
  for (const auto& [arity, v] : f->generators()) {
    if (v.total_rank() == 0) continue;
    if (arity != 2) throw Error("closed form 'free' supports generators in arity 2 only");
    for (int d : v.degrees())
      if (!v.differential(d).is_zero()) throw Error("closed form 'free' needs a zero differential on V");
  }
  for (int d : a->carrier().degrees())
    if (!a->carrier().differential(d).is_zero()) throw Error("closed form 'free' needs a zero differential on A");
  return f;
}

std::vector<std::vector<std::uint32_t>> gaps_of(const Corolla& g) {
  std::vector<std::vector<std::uint32_t>> gaps(1);
  for (auto l : g.leaves) {
    if (l == kSnakyLeaf)
      gaps.emplace_back();
    else
      gaps.back().push_back(l);
  }
  return gaps;
}

// Which leaves of a free-operad tree sit under each node; used to find the
// maximal subtrees all of whose leaves are straight.
struct Pruned {
  PlanarTree root;
  std::vector<std::size_t> root_labels;
  struct Piece {
    PlanarTree shape;
    std::vector<std::size_t> labels;
    std::vector<std::uint32_t> leaves;
  };
  std::vector<Piece> pieces;  // left to right
};

Pruned prune(const LabeledTree& t, const std::vector<std::uint32_t>& leaves) {
  Pruned out;
  std::size_t leaf = 0, vertex = 0;
  auto all_straight = [&](const PlanarTree& node, std::size_t l0) {
    std::size_t count = node.leaf_count();
    for (std::size_t k = l0; k < l0 + count; ++k)
      if (leaves[k] == kSnakyLeaf) return false;
    return true;
  };
  std::function<PlanarTree(const PlanarTree&)> walk = [&](const PlanarTree& node) -> PlanarTree {
    if (all_straight(node, leaf)) {
      Pruned::Piece p;
      p.shape = node;
      std::size_t nv = node.inner_vertex_count();
      p.labels.assign(t.labels.begin() + vertex, t.labels.begin() + vertex + nv);
      std::size_t nl = node.leaf_count();
      p.leaves.assign(leaves.begin() + leaf, leaves.begin() + leaf + nl);
      leaf += nl;
      vertex += nv;
      out.pieces.push_back(std::move(p));
      return PlanarTree::leaf(LeafKind::Snaky);
    }
    if (node.is_leaf()) {
      ++leaf;
      return node;
    }
    out.root_labels.push_back(t.labels[vertex++]);
    std::vector<PlanarTree> kids;
    for (const auto& c : node.children()) kids.push_back(walk(c));
    return PlanarTree::vertex(std::move(kids));
  };
  out.root = walk(t.shape);
  return out;
}

std::size_t tree_index(const FreeOperad& o, std::size_t arity, const PlanarTree& shape,
                       const std::vector<std::size_t>& labels) {
  auto idx = o.index_of(arity, LabeledTree{shape, labels});
  if (!idx) throw WindowExceeded("tree outside the free operad's size bound");
  return *idx;
}

// The level-2 tree obtained by pruning maximal straight subtrees.
LevelTree free_prune(const FreeOperad& o, const Corolla& g) {
  const LabeledTree& t = o.basis(g.leaves.size())[g.op];
  Pruned p = prune(t, g.leaves);
  LevelTree out;
  std::size_t pos = 0;
  for (const auto& pc : p.pieces) {
    while (g.leaves[pos] == kSnakyLeaf) {
      out.children.push_back(LevelTree::Child{});
      ++pos;
    }
    LevelTree::Child ch;
    ch.kind = LevelTree::Child::Kind::Vertex;
    ch.op = tree_index(o, pc.leaves.size(), pc.shape, pc.labels);
    ch.labels = pc.leaves;
    out.children.push_back(std::move(ch));
    pos += pc.leaves.size();
  }
  while (pos < g.leaves.size()) {
    out.children.push_back(LevelTree::Child{});
    ++pos;
  }
  out.op = tree_index(o, out.children.size(), p.root, p.root_labels);
  return out;
}

bool free_reduced(const FreeOperad& o, const Corolla& g) {
  const LabeledTree& t = o.basis(g.leaves.size())[g.op];
  Pruned p = prune(t, g.leaves);
  for (const auto& pc : p.pieces)
    if (!pc.shape.is_leaf()) return false;
  return true;
}

ChainComplex zero_complex(const Ring& r) { return ChainComplex(r); }

}  // namespace

ClosedFormKind parse_closed_form_kind(const std::string& s) {
  if (s == "initial") return ClosedFormKind::Initial;
  if (s == "uass") return ClosedFormKind::Uass;
  if (s == "ass") return ClosedFormKind::Ass;
  if (s == "arity1") return ClosedFormKind::Arity1;
  if (s == "a3zero") return ClosedFormKind::A3zero;
  if (s == "free") return ClosedFormKind::Free;
  throw Error("unknown closed form '" + s + "'");
}

std::string to_string(ClosedFormKind k) {
  switch (k) {
    case ClosedFormKind::Initial: return "initial";
    case ClosedFormKind::Uass: return "uass";
    case ClosedFormKind::Ass: return "ass";
    case ClosedFormKind::Arity1: return "arity1";
    case ClosedFormKind::A3zero: return "a3zero";
    case ClosedFormKind::Free: return "free";
  }
  return "?";
}

ChainComplex decomposables_quotient(const OAlgebra& a, std::size_t arity_bound) {
  const Operad& O = *a.operad();
  ChainComplex c = a.carrier();
  std::map<int, std::vector<SparseVec>> images;
  for (std::size_t m = 2; m <= arity_bound; ++m)
    for (std::size_t op = 0; op < O.dim(m); ++op)
      for_each_word(a.dim(), m, [&](const std::vector<std::uint32_t>& w) {
        std::vector<std::size_t> args(w.begin(), w.end());
        SparseVec v = a.act(m, op, args);
        if (v.empty()) return;
        images[c.unflatten(v.front().first).first].push_back(std::move(v));
      });
  for (const auto& [d, cols] : images) {
    Matrix r(a.ring(), c.rank(d), cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k)
      for (const auto& [i, x] : cols[k]) r.add_to(i - c.flat_offset(d), k, x);
    c.set_relations(d, r);
  }
  return minimize(c).complex;
}

std::vector<ChainComplex> closed_form(ClosedFormKind kind, const AlgebraPtr& ap, const TruncationBounds& bounds) {
  bounds.validate();
  const OAlgebra& a = *ap;
  const Operad& O = *a.operad();
  const Ring& R = a.ring();
  const std::size_t top = bounds.max_arity;
  std::vector<ChainComplex> out;
  switch (kind) {
    case ClosedFormKind::Initial:
      for (std::size_t n = 0; n <= top; ++n) out.push_back(O.component(n));
      break;
    case ClosedFormKind::Uass:
      require_operad(a, {"uass"}, kind);
      for (std::size_t n = 0; n <= top; ++n) out.push_back(tensor_power(a.carrier(), n + 1));
      break;
    case ClosedFormKind::Ass: {
      require_operad(a, {"ass"}, kind);
      ChainComplex plus = direct_sum({a.carrier(), ChainComplex::unit(R)}, R).complex;
      out.push_back(a.carrier());
      for (std::size_t n = 1; n <= top; ++n) out.push_back(tensor_power(plus, n + 1));
      break;
    }
    case ClosedFormKind::Arity1:
      require_operad(a, {"arity1", "initial"}, kind);
      out.push_back(a.carrier());
      if (top >= 1) out.push_back(O.component(1));
      for (std::size_t n = 2; n <= top; ++n) out.push_back(zero_complex(R));
      break;
    case ClosedFormKind::A3zero: {
      require_operad(a, {"a3zero"}, kind);
      ChainComplex q = decomposables_quotient(a, 2);
      out.push_back(a.carrier());
      if (top >= 1) out.push_back(direct_sum({ChainComplex::unit(R), q, q}, R).complex);
      if (top >= 2) out.push_back(ChainComplex::unit(R));
      for (std::size_t n = 3; n <= top; ++n) out.push_back(zero_complex(R));
      break;
    }
    case ClosedFormKind::Free: {
      auto f = require_free(ap);
      const std::size_t S = bounds.max_straight_leaves;
      if (f->size_bound() + 1 < top + S)
        throw Error("free operad size bound " + std::to_string(f->size_bound()) + " is below max_arity + S - 1 = " +
                    std::to_string(top + S - 1));
      const ChainComplex& v2 = f->generators().at(2);
      std::vector<int> vdeg, adeg;
      for (std::size_t i = 0; i < v2.total_rank(); ++i) vdeg.push_back(v2.unflatten(i).first);
      for (std::size_t i = 0; i < a.dim(); ++i) adeg.push_back(a.degree(i));
      for (std::size_t n = 0; n <= top; ++n) {
        TreeSpec spec;
        spec.snaky = n;
        spec.max_straight = S;
        spec.arities = std::set<std::size_t>{2};
        std::map<int, std::vector<std::string>> labels;
        for (const auto& t : enumerate_trees(spec)) {
          bool reduced = true;
          for (const auto& p : t.vertex_paths()) {
            const PlanarTree& v = t.at(p);
            bool all = true;
            for (const auto& c : v.children()) all = all && c.is_leaf() && c.kind() == LeafKind::Straight;
            reduced = reduced && !all;
          }
          if (!reduced) continue;
          const std::size_t nv = t.inner_vertex_count(), ns = t.count(LeafKind::Straight);
          std::vector<std::size_t> digits(nv + ns, 0), base;
          for (std::size_t k = 0; k < nv; ++k) base.push_back(vdeg.size());
          for (std::size_t k = 0; k < ns; ++k) base.push_back(adeg.size());
          if (std::find(base.begin(), base.end(), 0) != base.end()) continue;
          while (true) {
            int d = 0;
            std::string lab = t.code() + " [";
            for (std::size_t k = 0; k < digits.size(); ++k) {
              d += k < nv ? vdeg[digits[k]] : adeg[digits[k]];
              lab += (k ? "," : "") + std::to_string(digits[k]);
            }
            labels[d].push_back(lab + "]");
            std::size_t k = 0;
            while (k < digits.size() && ++digits[k] == base[k]) digits[k++] = 0;
            if (k == digits.size()) break;
          }
        }
        ChainComplex c(R);
        for (auto& [d, ls] : labels) {
          const std::size_t r = ls.size();
          c.set_rank(d, r, std::move(ls));
        }
        out.push_back(std::move(c));
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- witnesses

namespace {

using WVec = std::map<std::size_t, Scalar>;

template <class T>
std::map<T, Scalar> scaled(std::map<T, Scalar> m, const Scalar& c) {
  for (auto& [k, v] : m) v *= c;
  return m;
}

// Expands ⊗_k v_k of sparse vectors into words with coefficients.
std::vector<std::pair<std::vector<std::size_t>, Scalar>> expand(const std::vector<SparseVec>& parts) {
  std::vector<std::pair<std::vector<std::size_t>, Scalar>> terms{{{}, Scalar(1)}};
  for (const auto& p : parts) {
    std::vector<std::pair<std::vector<std::size_t>, Scalar>> next;
    for (const auto& [w, c] : terms)
      for (const auto& [b, cb] : p) {
        auto w2 = w;
        w2.push_back(b);
        next.emplace_back(std::move(w2), c * cb);
      }
    terms = std::move(next);
  }
  return terms;
}

std::map<std::size_t, std::size_t> identity_index(std::size_t n) {
  std::map<std::size_t, std::size_t> m;
  for (std::size_t i = 0; i < n; ++i) m.emplace(i, i);
  return m;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

struct WitnessBuilder {
  SplitCoequalizerWitness w;
  std::map<LevelTree, std::size_t> up;
  std::map<Corolla, std::size_t> low;
  std::function<std::map<LevelTree, Scalar>(const Corolla&)> t;
  std::function<WVec(const Corolla&)> e;
  std::function<CorollaVec(std::size_t)> s;
  bool f_is_edge = true;

  void finish(const OAlgebra& a) {
    auto edge = [&](const LevelTree& x) { return contract_edges(a, x); };
    auto corolla = [&](const LevelTree& x) { return contract_corollas(a, x); };
    std::function<CorollaVec(const LevelTree&)> fe = edge, fc = corolla;
    w.f = detail::linear_map<LevelTree, Corolla>(w.upper.complex, w.upper.basis, w.lower.complex, low,
                                                 f_is_edge ? fe : fc);
    w.g = detail::linear_map<LevelTree, Corolla>(w.upper.complex, w.upper.basis, w.lower.complex, low,
                                                 f_is_edge ? fc : fe);
    w.t = detail::linear_map<Corolla, LevelTree>(w.lower.complex, w.lower.basis, w.upper.complex, up, t);
    w.e = detail::linear_map<Corolla, std::size_t>(w.lower.complex, w.lower.basis, w.quotient,
                                                   identity_index(w.quotient.total_rank()), e);
    w.s = detail::linear_map<std::size_t, Corolla>(w.quotient, iota(w.quotient.total_rank()), w.lower.complex, low, s);
  }
};

}  // namespace

SplitCoequalizerWitness split_coequalizer_witness(ClosedFormKind kind, const AlgebraPtr& ap, std::size_t n,
                                                  const TruncationBounds& bounds) {
  const OAlgebra& a = *ap;
  const Operad& O = *a.operad();
  const Ring& R = a.ring();
  WitnessBuilder b;
  b.w.upper = build_OA1(a, n, bounds);
  b.w.lower = build_OA0(a, n, bounds);
  b.up = detail::index_of(b.w.upper.basis);
  b.low = detail::index_of(b.w.lower.basis);
  std::optional<TensorBasis> tb;
  auto fill_labels = [&] {
    for (int d : b.w.quotient.degrees())
      for (const auto& l : b.w.quotient.labels(d)) b.w.quotient_labels.push_back(l);
  };

  switch (kind) {
    case ClosedFormKind::Initial: {
      if (a.carrier().total_rank() != O.dim(0)) throw Error("initial witness needs the initial algebra");
      b.w.quotient = O.component(n);
      b.f_is_edge = false;
      b.t = [&](const Corolla& g) {
        LevelTree x{g.op, {}};
        for (auto l : g.leaves)
          x.children.push_back(l == kSnakyLeaf ? LevelTree::Child{}
                                               : LevelTree::Child{LevelTree::Child::Kind::Vertex, 0, l, {}});
        return std::map<LevelTree, Scalar>{{x, Scalar(1)}};
      };
      b.e = [&](const Corolla& g) {
        WVec out;
        for (const auto& [x, c] : b.t(g))
          for (const auto& [h, ch] : contract_edges(a, x)) out[h.op] += c * ch;
        return out;
      };
      b.s = [&](std::size_t op) { return CorollaVec{{Corolla{op, std::vector<std::uint32_t>(n, kSnakyLeaf)}, 1}}; };
      break;
    }
    case ClosedFormKind::Uass:
    case ClosedFormKind::Ass: {
      const bool unital = kind == ClosedFormKind::Uass;
      require_operad(a, {unital ? "uass" : "ass"}, kind);
      std::vector<std::size_t> a_flat;
      std::size_t one_flat = 0;
      if (unital || n == 0) {
        std::vector<ChainComplex> factors(unital ? n + 1 : 1, a.carrier());
        tb.emplace(R, factors);
        a_flat = iota(a.dim());
      } else {
        DirectSum ds = direct_sum({a.carrier(), ChainComplex::unit(R)}, R);
        auto offs = summand_offsets(ds);
        a_flat = offs[0];
        one_flat = offs[1][0];
        tb.emplace(R, std::vector<ChainComplex>(n + 1, ds.complex));
      }
      b.w.quotient = tb->complex();
      const bool plus = !unital && n > 0;
      b.f_is_edge = true;
      b.t = [&, plus](const Corolla& g) {
        LevelTree x;
        auto gaps = gaps_of(g);
        for (std::size_t k = 0; k < gaps.size(); ++k) {
          if (k > 0) x.children.push_back(LevelTree::Child{});
          if (plus && gaps[k].empty()) continue;
          x.children.push_back(LevelTree::Child{LevelTree::Child::Kind::Vertex, 0, 0, gaps[k]});
        }
        x.op = 0;
        return std::map<LevelTree, Scalar>{{x, Scalar(1)}};
      };
      b.e = [&, plus, a_flat, one_flat](const Corolla& g) {
        std::vector<SparseVec> parts;
        for (const auto& gap : gaps_of(g)) {
          if (plus && gap.empty()) {
            parts.push_back(sparse_unit(one_flat));
            continue;
          }
          std::vector<std::size_t> args(gap.begin(), gap.end());
          SparseVec p;
          for (const auto& [x, c] : a.act(gap.size(), 0, args)) p.emplace_back(a_flat[x], c);
          parts.push_back(p);
        }
        WVec out;
        for (const auto& [word, c] : expand(parts)) out[tb->index(word)] += c;
        return out;
      };
      b.s = [&, plus, a_flat, one_flat](std::size_t x) {
        auto parts = tb->decompose(x);
        std::vector<std::uint32_t> leaves;
        for (std::size_t k = 0; k < parts.size(); ++k) {
          if (k > 0) leaves.push_back(kSnakyLeaf);
          if (plus && parts[k] == one_flat) continue;
          auto it = std::find(a_flat.begin(), a_flat.end(), parts[k]);
          leaves.push_back(static_cast<std::uint32_t>(it - a_flat.begin()));
        }
        return CorollaVec{{Corolla{0, leaves}, 1}};
      };
      break;
    }
    case ClosedFormKind::Free: {
      auto fo = require_free(ap);
      const FreeOperad& F = *fo;
      std::vector<Corolla> reduced;
      for (const auto& g : b.w.lower.basis)
        if (free_reduced(F, g)) reduced.push_back(g);
      auto built = detail::assemble<Corolla>(
          R, reduced, [&](const Corolla& g) { return corolla_degree(a, g); },
          [](const Corolla& g) { return g.code(); }, [&](const Corolla& g) { return corolla_differential(a, g); });
      b.w.quotient = built.complex;
      auto w_index = detail::index_of(built.basis);
      auto w_basis = built.basis;
      b.f_is_edge = true;
      b.t = [&a, &F](const Corolla& g) {
        LevelTree x = free_prune(F, g);
        CorollaVec back = contract_edges(a, x);
        if (back.size() != 1 || back.begin()->first != g || abs(back.begin()->second) != 1)
          throw Error("free witness: pruning " + g.code() + " does not contract back");
        return std::map<LevelTree, Scalar>{{x, back.begin()->second}};
      };
      b.e = [&a, &F, w_index](const Corolla& g) {
        LevelTree x = free_prune(F, g);
        Scalar eps = contract_edges(a, x).begin()->second;
        WVec out;
        for (const auto& [h, c] : contract_corollas(a, x)) {
          auto it = w_index.find(h);
          if (it == w_index.end()) throw Error("free witness: " + h.code() + " is not reduced");
          out[it->second] += eps * c;
        }
        return out;
      };
      b.s = [w_basis](std::size_t x) { return CorollaVec{{w_basis[x], 1}}; };
      break;
    }
    default:
      throw Error("no split coequalizer witness for closed form '" + to_string(kind) + "'");
  }
  b.finish(a);
  fill_labels();
  return b.w;
}

void check_split_coequalizer(const SplitCoequalizerWitness& w) {
  auto report = [](const char* name, const ChainMap& lhs, const ChainMap& rhs, const std::vector<std::string>& labels) {
    if (maps_equal(lhs, rhs)) return;
    const ChainComplex& src = lhs.source();
    for (int d : src.degrees()) {
      Matrix diff = lhs.component(d) - rhs.component(d);
      for (std::size_t c = 0; c < diff.cols(); ++c)
        if (!diff.column(c).is_zero()) {
          std::size_t flat = src.flat_offset(d) + c;
          throw AxiomViolation(std::string("split coequalizer: ") + name + " fails on " +
                               (flat < labels.size() ? labels[flat] : std::to_string(flat)));
        }
    }
    throw AxiomViolation(std::string("split coequalizer: ") + name + " fails");
  };
  std::vector<std::string> up, low;
  for (const auto& t : w.upper.basis) up.push_back(t.code());
  for (const auto& g : w.lower.basis) low.push_back(g.code());
  report("ef = eg", w.e.after(w.f), w.e.after(w.g), up);
  report("es = id", w.e.after(w.s), ChainMap::identity(w.quotient), w.quotient_labels);
  report("ft = id", w.f.after(w.t), ChainMap::identity(w.lower.complex), low);
  report("se = gt", w.s.after(w.e), w.g.after(w.t), low);
}

}  // namespace paperlab
