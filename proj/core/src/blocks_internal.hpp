#pragma once

// Helpers for complexes whose basis is a list of combinatorial objects.

#include "paperlab/enveloping.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace paperlab::detail {

template <class T>
struct Assembled {
  ChainComplex complex;
  std::vector<T> basis;  // flat order
};

template <class T>
std::map<T, std::size_t> index_of(const std::vector<T>& basis) {
  std::map<T, std::size_t> idx;
  for (std::size_t i = 0; i < basis.size(); ++i) idx.emplace(basis[i], i);
  return idx;
}

// Sorts the items by degree (stable) and builds the complex; the differential
// must stay inside the item set.
template <class T>
Assembled<T> assemble(const Ring& ring, std::vector<T> items, const std::function<int(const T&)>& degree,
                      const std::function<std::string(const T&)>& label,
                      const std::function<std::map<T, Scalar>(const T&)>& differential) {
  std::vector<std::pair<int, std::size_t>> order;
  for (std::size_t i = 0; i < items.size(); ++i) order.emplace_back(degree(items[i]), i);
  std::stable_sort(order.begin(), order.end(), [](auto& x, auto& y) { return x.first < y.first; });
  Assembled<T> out{ChainComplex(ring), {}};
  std::map<int, std::vector<std::string>> labels;
  for (const auto& [d, i] : order) {
    labels[d].push_back(label(items[i]));
    out.basis.push_back(std::move(items[i]));
  }
  for (auto& [d, ls] : labels) {
    const std::size_t r = ls.size();
    out.complex.set_rank(d, r, std::move(ls));
  }
  auto idx = index_of(out.basis);
  for (int d : out.complex.degrees()) {
    if (out.complex.rank(d - 1) == 0) continue;
    Matrix m(ring, out.complex.rank(d - 1), out.complex.rank(d));
    const std::size_t base = out.complex.flat_offset(d), below = out.complex.flat_offset(d - 1);
    for (std::size_t col = 0; col < out.complex.rank(d); ++col)
      for (const auto& [t, c] : differential(out.basis[base + col])) {
        auto it = idx.find(t);
        if (it == idx.end()) throw WindowExceeded("differential leaves the truncation window");
        m.add_to(it->second - below, col, c);
      }
    out.complex.set_differential(d, m);
  }
  return out;
}

template <class S, class T>
ChainMap linear_map(const ChainComplex& source, const std::vector<S>& source_basis, const ChainComplex& target,
                    const std::map<T, std::size_t>& target_index,
                    const std::function<std::map<T, Scalar>(const S&)>& image) {
  ChainMap f(source, target);
  std::map<int, Matrix> blocks;
  for (std::size_t j = 0; j < source_basis.size(); ++j) {
    auto [d, local] = source.unflatten(j);
    for (const auto& [t, c] : image(source_basis[j])) {
      if (sgn(c) == 0) continue;
      auto it = target_index.find(t);
      if (it == target_index.end()) throw WindowExceeded("map leaves the truncation window");
      auto [e, row] = target.unflatten(it->second);
      if (e != d) throw Error("map does not preserve degree");
      auto b = blocks.find(d);
      if (b == blocks.end()) b = blocks.emplace(d, Matrix(source.ring(), target.rank(d), source.rank(d))).first;
      b->second.add_to(row, local, c);
    }
  }
  for (auto& [d, m] : blocks) f.set_component(d, m);
  return f;
}

// Flat index of each summand basis element in a direct sum.
inline std::vector<std::vector<std::size_t>> summand_offsets(const DirectSum& ds) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& inj : ds.injections) {
    const ChainComplex& s = inj.source();
    std::vector<std::size_t> v(s.total_rank());
    for (std::size_t j = 0; j < v.size(); ++j) {
      auto [d, local] = s.unflatten(j);
      Matrix m = inj.component(d);
      for (std::size_t r = 0; r < m.rows(); ++r)
        if (sgn(m(r, local)) != 0) v[j] = ds.complex.flat_offset(d) + r;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace paperlab::detail

namespace paperlab {

CorollaVec contract_corollas(const OAlgebra& a, const LevelTree& t);
CorollaVec contract_edges(const OAlgebra& a, const LevelTree& t);
std::map<LevelTree, Scalar> subdivide_labels(const OAlgebra& a, const Corolla& g, const TruncationBounds& b);

/// The algebra filtration started from base : O_A(n) -> B_0 in place of the identity.
FiltrationStages filtration_with_base(Envelope& env, const FreeAttachment& att, std::size_t n, std::size_t max_t,
                                      const ChainMap& base);

}  // namespace paperlab
