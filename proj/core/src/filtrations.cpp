#include "paperlab/enveloping.hpp"
#include "blocks_internal.hpp"

#include <functional>
#include <numeric>

namespace paperlab {

using detail::summand_offsets;

namespace {

Scalar sign_of(long e) { return (e % 2 == 0) ? Scalar(1) : Scalar(-1); }

// k-subsets of {0..m-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t m, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > m) return out;
  std::vector<std::size_t> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    out.push_back(s);
    std::size_t i = k;
    while (i > 0 && s[i - 1] == m - k + i - 1) --i;
    if (i == 0) return out;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

SparseVec column_of(const ChainMap& f, std::size_t flat) {
  auto [d, local] = f.source().unflatten(flat);
  const ChainComplex& T = f.target();
  if (T.rank(d) == 0) return {};
  Matrix m = f.component(d);
  SparseVec out;
  const std::size_t off = T.flat_offset(d);
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (sgn(m(r, local)) != 0) out.emplace_back(off + r, m(r, local));
  return out;
}

int flat_degree(const ChainComplex& c, std::size_t flat) { return c.unflatten(flat).first; }

bool all_isomorphisms(const std::vector<ChainMap>& maps, std::size_t window) {
  if (window == 0 || maps.size() < window) return false;
  for (std::size_t k = maps.size() - window; k < maps.size(); ++k)
    if (!is_isomorphism(maps[k])) return false;
  return true;
}

ChainMap map_from_columns(const ChainComplex& source, const ChainComplex& target,
                          const std::function<SparseVec(std::size_t)>& column) {
  std::vector<std::size_t> basis(source.total_rank());
  std::iota(basis.begin(), basis.end(), 0);
  std::map<std::size_t, std::size_t> index;
  for (std::size_t j = 0; j < target.total_rank(); ++j) index.emplace(j, j);
  return detail::linear_map<std::size_t, std::size_t>(source, basis, target, index, [&](const std::size_t& j) {
    std::map<std::size_t, Scalar> img;
    for (const auto& [k, c] : column(j)) img[k] += c;
    return img;
  });
}

// Zero modulo the relations of c?
bool vanishes_in(const ChainComplex& c, const SparseVec& v) {
  std::map<int, Matrix> cols;
  for (const auto& [k, x] : v) {
    if (sgn(x) == 0) continue;
    auto [d, local] = c.unflatten(k);
    auto it = cols.find(d);
    if (it == cols.end()) it = cols.emplace(d, Matrix(c.ring(), c.rank(d), 1)).first;
    it->second.add_to(local, 0, x);
  }
  for (auto& [d, col] : cols)
    if (!col.is_zero() && !columns_in_span(c.relations(d), col)) return false;
  return true;
}

}  // namespace

FiltrationStages filtration_with_base(Envelope& env, const FreeAttachment& att, std::size_t n, std::size_t max_t,
                                      const ChainMap& base) {
  validate(att.f);
  validate(att.gbar);
  const Ring& R = env.ring();
  const ChainComplex& Y = att.f.source();
  const ChainComplex& Z = att.f.target();
  if (Y.total_rank() != att.gbar.source().total_rank())
    throw NotParallel("filtration: f and the attaching map have different sources");
  if (att.gbar.target().total_rank() != env.algebra().carrier().total_rank())
    throw NotParallel("filtration: the attaching map must land in the algebra");

  FiltrationStages out;
  out.arity = n;
  out.stages.push_back(base.target());

  // Per stage: the pattern list, the block basis E ⊗ Z^{⊗t} and its offsets in the sum.
  struct Level {
    std::map<std::vector<std::size_t>, std::size_t> pattern_index;
    std::optional<TensorBasis> block;
    std::vector<std::vector<std::size_t>> offsets;
  };
  std::vector<Level> levels(1);

  for (std::size_t t = 1; t <= max_t; ++t) {
    const ChainComplex E = env.component(t + n).complex;
    const ChainComplex& prev = out.stages.back();
    const auto patterns = subsets(t + n, t);
    const std::size_t np = patterns.size();

    Level lv;
    for (std::size_t p = 0; p < np; ++p) lv.pattern_index.emplace(patterns[p], p);
    std::vector<ChainComplex> block_factors{E};
    for (std::size_t k = 0; k < t; ++k) block_factors.push_back(Z);
    lv.block.emplace(R, block_factors);
    DirectSum ysum = direct_sum(std::vector<ChainComplex>(np, lv.block->complex()), R);
    lv.offsets = summand_offsets(ysum);

    ComplexCube cube = tensor_cube(std::vector<ChainMap>(t, att.f));
    LatchingMap latch = cube_latching_map(cube);
    const ChainComplex& L = latch.map.source();
    const unsigned full = (1u << t) - 1;

    std::vector<ChainComplex> punctured(cube.vertices.begin(), cube.vertices.begin() + full);
    DirectSum psum = direct_sum(punctured, R);
    auto poffs = summand_offsets(psum);
    std::map<std::size_t, std::pair<unsigned, std::size_t>> pflat;
    for (unsigned v = 0; v < full; ++v)
      for (std::size_t j = 0; j < poffs[v].size(); ++j) pflat.emplace(poffs[v][j], std::make_pair(v, j));
    std::vector<TensorBasis> vbasis;
    for (unsigned v = 0; v <= full; ++v) {
      std::vector<ChainComplex> fs;
      for (std::size_t i = 0; i < t; ++i) fs.push_back(((v >> i) & 1u) ? Z : Y);
      vbasis.emplace_back(R, fs);
    }

    // Ψ̄_{t-1} on a basis element of the previous block sum.
    auto previous_char = [&](const std::vector<std::size_t>& pattern, std::size_t e,
                             const std::vector<std::size_t>& zs) -> SparseVec {
      if (t == 1) return column_of(base, e);
      const Level& pl = levels[t - 1];
      std::vector<std::size_t> key{e};
      key.insert(key.end(), zs.begin(), zs.end());
      const std::size_t flat = pl.offsets[pl.pattern_index.at(pattern)][pl.block->index(key)];
      return column_of(out.characteristic[t - 2], flat);
    };

    // Ψ_v(e ⊗ x_1 ⊗ ... ⊗ x_t) on a punctured vertex v.
    auto psi_vertex = [&](std::size_t p, std::size_t e, unsigned v, const std::vector<std::size_t>& xs) {
      std::size_t j = 0;
      while ((v >> j) & 1u) ++j;
      long before = 0;
      for (std::size_t k = 0; k < j; ++k) before += flat_degree(((v >> k) & 1u) ? Z : Y, xs[k]);
      const Scalar s = sign_of(static_cast<long>(flat_degree(Y, xs[j])) * before);
      SparseVec a = column_of(att.gbar, xs[j]);
      std::map<std::size_t, Scalar> acc;
      if (a.empty()) return SparseVec{};
      SparseVec inserted = env.insert(t + n, e, patterns[p][j] + 1, a);
      if (inserted.empty()) return SparseVec{};

      std::vector<std::size_t> pattern2;
      for (std::size_t k = 0; k < t; ++k) {
        if (k == j) continue;
        std::size_t pos = patterns[p][k];
        pattern2.push_back(pos > patterns[p][j] ? pos - 1 : pos);
      }
      // The remaining factors as combinations in Z.
      std::vector<SparseVec> zvals;
      for (std::size_t k = 0; k < t; ++k) {
        if (k == j) continue;
        zvals.push_back(((v >> k) & 1u) ? sparse_unit(xs[k]) : column_of(att.f, xs[k]));
      }
      std::vector<std::size_t> zs(zvals.size());
      std::function<void(std::size_t, const Scalar&)> expand = [&](std::size_t k, const Scalar& c) {
        if (k == zvals.size()) {
          for (const auto& [e2, ce] : inserted)
            for (const auto& [q, cq] : previous_char(pattern2, e2, zs)) acc[q] += s * c * ce * cq;
          return;
        }
        for (const auto& [z, cz] : zvals[k]) {
          zs[k] = z;
          expand(k + 1, c * cz);
        }
      };
      expand(0, Scalar(1));
      return sparse_normalized(R, std::move(acc));
    };

    TensorBasis el(R, {E, L});
    DirectSum xsum = direct_sum(std::vector<ChainComplex>(np, el.complex()), R);
    auto xoffs = summand_offsets(xsum);
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> xflat;
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t j = 0; j < xoffs[p].size(); ++j) xflat.emplace(xoffs[p][j], std::make_pair(p, j));

    ChainMap phi = map_from_columns(xsum.complex, ysum.complex, [&](std::size_t col) {
      auto [p, local] = xflat.at(col);
      auto el_parts = el.decompose(local);
      SparseVec img;
      for (const auto& [z, c] : column_of(latch.map, el_parts[1])) {
        std::vector<std::size_t> key{el_parts[0]};
        for (auto zi : vbasis[full].decompose(z)) key.push_back(zi);
        img.emplace_back(lv.offsets[p][lv.block->index(key)], c);
      }
      return img;
    });

    ChainMap psi = map_from_columns(xsum.complex, prev, [&](std::size_t col) {
      auto [p, local] = xflat.at(col);
      auto el_parts = el.decompose(local);
      SparseVec img;
      for (const auto& [q, c] : column_of(latch.lift, el_parts[1])) {
        auto [v, vl] = pflat.at(q);
        sparse_axpy(img, c, psi_vertex(p, el_parts[0], v, vbasis[v].decompose(vl)));
      }
      return img;
    });

    // The vertex maps must form a cocone over the punctured cube.
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t e = 0; e < E.total_rank(); ++e)
        for (unsigned v = 0; v < full; ++v)
          for (std::size_t x = 0; x < cube.vertices[v].total_rank(); ++x)
            for (std::size_t i = 0; i < t; ++i) {
              const unsigned w = v | (1u << i);
              if (w == v || w == full) continue;
              SparseVec diff = psi_vertex(p, e, v, vbasis[v].decompose(x));
              for (const auto& [y, c] : column_of(cube.edge(v, static_cast<int>(i)), x))
                sparse_axpy(diff, -c, psi_vertex(p, e, w, vbasis[w].decompose(y)));
              if (!vanishes_in(prev, diff))
                throw Error("filtration: attaching map is not compatible along the cube at stage " +
                            std::to_string(t));
            }

    PushoutResult po = pushout(psi, phi);
    out.stages.push_back(po.object);
    out.maps.push_back(po.from_a);
    out.characteristic.push_back(po.from_y);
    out.attaching.push_back(psi);
    out.glued_along.push_back(phi);
    levels.push_back(std::move(lv));

    if (all_isomorphisms(out.maps, env.bounds().stabilization_window)) {
      out.status = StageStatus::Stabilized;
      break;
    }
  }
  return out;
}

FiltrationStages filtration_algebra_pushout(Envelope& env, const FreeAttachment& att, std::size_t n,
                                            std::size_t max_t) {
  return filtration_with_base(env, att, n, max_t, ChainMap::identity(env.component(n).complex));
}

namespace {

// An alternating tree: odd vertices carry O_A, even vertices carry V.
struct AltTree {
  std::size_t arity = 0;                  // odd: O_A arity; even: V arity
  bool even = false;
  std::vector<std::optional<AltTree>> children;  // nullopt = snaky leaf (odd parents only)
};

bool is_odd_cork(const AltTree& t) { return !t.even && t.children.empty(); }

// Trees rooted at an odd vertex with exactly `evens` even vertices and `leaves` snaky leaves.
std::vector<AltTree> odd_trees(std::size_t evens, std::size_t leaves, std::size_t max_arity,
                               const std::vector<std::size_t>& v_arities);

// Lists of `count` subtrees (each a leaf or an even-rooted tree) distributing evens and leaves.
void child_lists(std::size_t count, std::size_t evens, std::size_t leaves, bool odd_parent, std::size_t max_arity,
                 const std::vector<std::size_t>& v_arities, std::vector<std::optional<AltTree>>& cur,
                 std::vector<std::vector<std::optional<AltTree>>>& out);

std::vector<AltTree> even_trees(std::size_t evens, std::size_t leaves, std::size_t max_arity,
                                const std::vector<std::size_t>& v_arities) {
  std::vector<AltTree> out;
  if (evens == 0) return out;
  for (std::size_t m : v_arities) {
    std::vector<std::vector<std::optional<AltTree>>> lists;
    std::vector<std::optional<AltTree>> cur;
    child_lists(m, evens - 1, leaves, false, max_arity, v_arities, cur, lists);
    for (auto& l : lists) {
      bool all_corks = std::all_of(l.begin(), l.end(), [](const auto& c) { return c && is_odd_cork(*c); });
      if (all_corks) continue;
      out.push_back(AltTree{m, true, std::move(l)});
    }
  }
  return out;
}

std::vector<AltTree> odd_trees(std::size_t evens, std::size_t leaves, std::size_t max_arity,
                               const std::vector<std::size_t>& v_arities) {
  std::vector<AltTree> out;
  for (std::size_t k = 0; k <= max_arity; ++k) {
    std::vector<std::vector<std::optional<AltTree>>> lists;
    std::vector<std::optional<AltTree>> cur;
    child_lists(k, evens, leaves, true, max_arity, v_arities, cur, lists);
    for (auto& l : lists) out.push_back(AltTree{k, false, std::move(l)});
  }
  return out;
}

void child_lists(std::size_t count, std::size_t evens, std::size_t leaves, bool odd_parent, std::size_t max_arity,
                 const std::vector<std::size_t>& v_arities, std::vector<std::optional<AltTree>>& cur,
                 std::vector<std::vector<std::optional<AltTree>>>& out) {
  if (cur.size() == count) {
    if (evens == 0 && leaves == 0) out.push_back(cur);
    return;
  }
  if (odd_parent && leaves > 0) {
    cur.push_back(std::nullopt);
    child_lists(count, evens, leaves - 1, odd_parent, max_arity, v_arities, cur, out);
    cur.pop_back();
  }
  for (std::size_t e = odd_parent ? 1 : 0; e <= evens; ++e)
    for (std::size_t l = 0; l <= leaves; ++l) {
      auto subs = odd_parent ? even_trees(e, l, max_arity, v_arities) : odd_trees(e, l, max_arity, v_arities);
      for (auto& s : subs) {
        cur.push_back(std::move(s));
        child_lists(count, evens - e, leaves - l, odd_parent, max_arity, v_arities, cur, out);
        cur.pop_back();
      }
    }
}

void blocks_of(const AltTree& t, Envelope& env, const SequenceV& v, std::vector<ChainComplex>& out) {
  if (t.even)
    out.push_back(v.at(t.arity));
  else
    out.push_back(env.component(t.arity).complex);
  for (const auto& c : t.children)
    if (c) blocks_of(*c, env, v, out);
}

}  // namespace

FiltrationStages filtration_operad_pushout(Envelope& env, const SequenceV& u, const SequenceV& v, std::size_t n,
                                           std::size_t max_t) {
  for (const auto& [k, c] : u)
    if (c.total_rank() != 0) throw Error("filtration: only U = 0 is supported for operad push-outs");
  const Ring& R = env.ring();
  const auto max_arity = env.operad().max_arity().value_or(env.bounds().max_arity);
  std::vector<std::size_t> v_arities;
  for (const auto& [k, c] : v)
    if (c.total_rank() > 0) v_arities.push_back(k);

  FiltrationStages out;
  out.arity = n;
  out.stages.push_back(env.component(n).complex);
  for (std::size_t t = 1; t <= max_t; ++t) {
    std::vector<ChainComplex> blocks;
    for (const auto& tree : odd_trees(t, n, max_arity, v_arities)) {
      std::vector<ChainComplex> factors;
      blocks_of(tree, env, v, factors);
      blocks.push_back(TensorBasis(R, factors).complex());
    }
    DirectSum layer = direct_sum(blocks, R);
    DirectSum next = direct_sum({out.stages.back(), layer.complex}, R);
    out.stages.push_back(next.complex);
    out.maps.push_back(next.injections[0]);
    out.characteristic.push_back(next.injections[1]);
  }
  // Trees with more even vertices can reappear after empty layers, so every stage is built.
  if (all_isomorphisms(out.maps, env.bounds().stabilization_window)) out.status = StageStatus::Stabilized;
  return out;
}

}  // namespace paperlab
