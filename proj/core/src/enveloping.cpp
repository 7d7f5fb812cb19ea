#include "paperlab/enveloping.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace paperlab {

namespace {

using GenTerms = std::vector<std::pair<Corolla, Scalar>>;

int sign_of(long e) { return (e % 2 == 0) ? 1 : -1; }

// Calls f on every k-subset of {0..n-1}, ascending.
void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (k > n) return;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    f(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

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

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
    std::size_t h = k.size();
    for (auto x : k) h = (h * 1000003u) ^ x;
    return h;
  }
};

std::vector<std::uint32_t> key_of(const Corolla& g) {
  std::vector<std::uint32_t> k;
  k.reserve(g.leaves.size() + 1);
  k.push_back(static_cast<std::uint32_t>(g.op));
  k.insert(k.end(), g.leaves.begin(), g.leaves.end());
  return k;
}

// Sparse elimination of relation rows. A pivot row expresses its pivot as minus
// the rest; rows are kept reduced lazily and re-cleaned when newer pivots appear
// in them. Over Z only unit coefficients are pivoted; other rows stay as residual
// relations.
class Eliminator {
 public:
  explicit Eliminator(Ring ring) : ring_(ring) {}

  void resize(std::size_t ids) { slot_.resize(ids, -1); }
  bool is_pivot(std::size_t id) const { return slot_[id] >= 0; }
  const std::vector<SparseVec>& residuals() const { return residual_; }

  void add(const SparseVec& row) {
    SparseVec v = reduce(row);
    if (v.empty()) return;
    if (!try_pivot(v)) residual_.push_back(std::move(v));
  }

  SparseVec reduce(const SparseVec& v) {
    SparseVec out;
    std::vector<std::pair<long, Scalar>> subs;
    for (const auto& [id, c] : v) {
      if (slot_[id] >= 0)
        subs.emplace_back(slot_[id], c);
      else
        out.emplace_back(id, c);
    }
    for (const auto& [k, c] : subs) {
      clean(static_cast<std::size_t>(k));
      sparse_axpy(out, -c, rows_[k].rest);
    }
    return sparse_normalize(ring_, out);
  }

  void settle() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<SparseVec> keep;
      for (const auto& r : residual_) {
        SparseVec v = reduce(r);
        if (v.empty()) continue;
        if (try_pivot(v)) {
          changed = true;
          continue;
        }
        keep.push_back(std::move(v));
      }
      residual_ = std::move(keep);
    }
  }

 private:
  struct Row {
    std::size_t pivot;
    SparseVec rest;
    std::size_t stamp;
  };

  bool try_pivot(const SparseVec& v) {
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
      if (!ring_.is_unit(it->second)) continue;
      Scalar inv = ring_.inverse(it->second);
      SparseVec rest;
      for (const auto& [id, c] : v)
        if (id != it->first) rest.emplace_back(id, c * inv);
      rest = sparse_normalize(ring_, rest);
      slot_[it->first] = static_cast<long>(rows_.size());
      rows_.push_back(Row{it->first, std::move(rest), rows_.size() + 1});
      return true;
    }
    return false;
  }

  void clean(std::size_t root) {
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      std::size_t k = stack.back();
      if (rows_[k].stamp == rows_.size()) {
        stack.pop_back();
        continue;
      }
      bool pushed = false;
      bool dirty = false;
      for (const auto& [id, c] : rows_[k].rest) {
        long q = slot_[id];
        if (q < 0) continue;
        dirty = true;
        if (rows_[q].stamp != rows_.size()) {
          stack.push_back(static_cast<std::size_t>(q));
          pushed = true;
        }
      }
      if (pushed) continue;
      if (dirty) {
        SparseVec out;
        std::vector<std::pair<long, Scalar>> subs;
        for (const auto& [id, c] : rows_[k].rest) {
          if (slot_[id] >= 0)
            subs.emplace_back(slot_[id], c);
          else
            out.emplace_back(id, c);
        }
        for (const auto& [q, c] : subs) sparse_axpy(out, -c, rows_[q].rest);
        rows_[k].rest = sparse_normalize(ring_, out);
      }
      rows_[k].stamp = rows_.size();
      stack.pop_back();
    }
  }

  Ring ring_;
  std::vector<long> slot_;
  std::vector<Row> rows_;
  std::vector<SparseVec> residual_;
};

// Solves M w ≡ y modulo nothing, with M = [T | R]; returns the first t entries.
std::optional<std::vector<Scalar>> solve_with(const SmithForm& sf, const Ring& ring, std::size_t t,
                                              const std::vector<Scalar>& y) {
  const Matrix& U = sf.U;
  const Matrix& D = sf.D;
  const Matrix& V = sf.V;
  std::vector<Scalar> z(U.rows(), Scalar(0));
  for (std::size_t i = 0; i < U.rows(); ++i)
    for (std::size_t j = 0; j < U.cols(); ++j)
      if (sgn(U(i, j)) != 0 && sgn(y[j]) != 0) z[i] += U(i, j) * y[j];
  std::vector<Scalar> w(V.rows(), Scalar(0));
  for (std::size_t i = 0; i < z.size(); ++i) {
    Scalar zi = ring.normalize(z[i]);
    if (i < sf.rank) {
      Scalar q = zi / D(i, i);
      if (ring.kind() == Ring::Kind::PrimeField) q = ring.normalize(zi * ring.inverse(D(i, i)));
      if (!ring.contains(q)) return std::nullopt;
      for (std::size_t r = 0; r < V.rows(); ++r) w[r] += V(r, i) * q;
    } else if (sgn(zi) != 0) {
      return std::nullopt;
    }
  }
  std::vector<Scalar> out(t);
  for (std::size_t r = 0; r < t; ++r) out[r] = ring.normalize(w[r]);
  return out;
}

}  // namespace

void TruncationBounds::validate() const {
  if (max_inner_vertices == 0 || max_straight_leaves == 0 || max_arity == 0 || stabilization_window == 0)
    throw Error("truncation bounds must be positive");
}

std::size_t Corolla::straight() const {
  return static_cast<std::size_t>(std::count_if(leaves.begin(), leaves.end(), [](auto l) { return l != kSnakyLeaf; }));
}

std::size_t Corolla::snaky() const { return leaves.size() - straight(); }

PlanarTree Corolla::shape() const {
  std::vector<LeafKind> kinds;
  for (auto l : leaves) kinds.push_back(l == kSnakyLeaf ? LeafKind::Snaky : LeafKind::Straight);
  return PlanarTree::corolla(kinds);
}

std::string Corolla::code() const {
  std::string s = shape().code() + " o" + std::to_string(op) + " [";
  bool first = true;
  for (auto l : leaves) {
    if (l == kSnakyLeaf) continue;
    s += (first ? "" : ",") + std::to_string(l);
    first = false;
  }
  return s + "]";
}

// ---------------------------------------------------------------- engine

struct Envelope::Engine {
  struct Snapshot {
    std::map<int, std::vector<std::size_t>> basis;  // non-pivot ids per degree
    std::unordered_map<std::size_t, std::size_t> local;
    ChainComplex presented;
    Presentation pres;
    std::map<int, Matrix> projection;
    std::vector<CorollaVec> lifts;  // per minimized flat basis element
    bool identity = false;          // presented complex already minimal
  };

  Engine(const Envelope& env, std::size_t arity) : env(env), n(arity), elim(env.ring()) {}

  const Envelope& env;
  std::size_t n;
  long S = -1;
  std::vector<Corolla> gens;
  std::vector<int> degree;
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, KeyHash> index;
  Eliminator elim;
  std::optional<Snapshot> snap;

  void grow_to(std::size_t target) {
    while (S < static_cast<long>(target)) {
      ++S;
      add_level(static_cast<std::size_t>(S));
    }
  }

  void add_level(std::size_t L) {
    snap.reset();
    const Operad& O = env.operad();
    const OAlgebra& A = env.algebra();
    const std::size_t N = n + L;
    if (O.dim(N) > 0) {
      for (std::size_t op = 0; op < O.dim(N); ++op)
        for_each_subset(N, L, [&](const std::vector<std::size_t>& pos) {
          for_each_word(A.dim(), L, [&](const std::vector<std::uint32_t>& w) {
            Corolla g{op, std::vector<std::uint32_t>(N, kSnakyLeaf)};
            for (std::size_t k = 0; k < L; ++k) g.leaves[pos[k]] = w[k];
            index.emplace(key_of(g), static_cast<std::uint32_t>(gens.size()));
            degree.push_back(env.generator_degree(g));
            gens.push_back(std::move(g));
          });
        });
      elim.resize(gens.size());
    }
    if (!env.quotient()) return;
    for_each_relation(L, [&](const GenTerms& row) { elim.add(to_ids(row)); });
  }

  std::optional<std::size_t> id_of(const Corolla& g) const {
    auto it = index.find(key_of(g));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  SparseVec to_ids(const GenTerms& terms) const {
    std::map<std::size_t, Scalar> acc;
    for (const auto& [g, c] : terms) {
      auto id = id_of(g);
      if (!id) {
        if (static_cast<long>(g.straight()) > S)
          throw WindowExceeded("generator " + g.code() + " exceeds straight-leaf bound " + std::to_string(S));
        throw Error("enveloping engine: unknown generator " + g.code());
      }
      acc[*id] += c;
    }
    return sparse_normalized(env.ring(), std::move(acc));
  }

  // Elementary relations whose larger side has exactly L straight leaves.
  void for_each_relation(std::size_t L, const std::function<void(const GenTerms&)>& emit) const {
    const Operad& O = env.operad();
    const OAlgebra& A = env.algebra();
    const SparseVec unit = O.unit();
    const bool unit_is_basis = unit.size() == 1 && unit[0].second == 1;
    for (std::size_t s = 1; s <= L; ++s) {
      std::vector<std::size_t> ms;
      if (s == L) ms.push_back(0);
      ms.push_back(L - s + 1);
      for (std::size_t m : ms) {
        const std::size_t N = n + s;
        if (O.dim(N) == 0 || O.dim(m) == 0) continue;
        for_each_subset(N, s, [&](const std::vector<std::size_t>& pos) {
          for (std::size_t j = 0; j < s; ++j) {
            for_each_word(A.dim(), s - 1, [&](const std::vector<std::uint32_t>& others) {
              std::vector<std::uint32_t> leaves(N, kSnakyLeaf);
              int before = 0;
              for (std::size_t k = 0, w = 0; k < s; ++k) {
                if (k == j) continue;
                leaves[pos[k]] = others[w++];
                if (k < j) before += A.degree(leaves[pos[k]]);
              }
              for (std::size_t op2 = 0; op2 < O.dim(m); ++op2) {
                if (m == 1 && unit_is_basis && op2 == unit[0].first) continue;
                const int sgn2 = sign_of(static_cast<long>(O.degree(m, op2)) * before);
                for (std::size_t op = 0; op < O.dim(N); ++op) {
                  SparseVec composed = O.compose(N, op, pos[j] + 1, m, op2);
                  for_each_word(A.dim(), m, [&](const std::vector<std::uint32_t>& b) {
                    GenTerms row;
                    std::vector<std::size_t> args(b.begin(), b.end());
                    for (const auto& [a, c] : A.act(m, op2, args)) {
                      Corolla g{op, leaves};
                      g.leaves[pos[j]] = static_cast<std::uint32_t>(a);
                      row.emplace_back(std::move(g), c);
                    }
                    if (!composed.empty()) {
                      std::vector<std::uint32_t> merged(leaves.begin(), leaves.begin() + pos[j]);
                      merged.insert(merged.end(), b.begin(), b.end());
                      merged.insert(merged.end(), leaves.begin() + pos[j] + 1, leaves.end());
                      for (const auto& [op3, c3] : composed) row.emplace_back(Corolla{op3, merged}, -c3 * sgn2);
                    }
                    if (!row.empty()) emit(row);
                  });
                }
              }
            });
          }
        });
      }
    }
  }

  Snapshot& snapshot() {
    if (snap) return *snap;
    elim.settle();
    Snapshot sn;
    const Ring& R = env.ring();
    for (std::size_t id = 0; id < gens.size(); ++id) {
      if (elim.is_pivot(id)) continue;
      auto& v = sn.basis[degree[id]];
      sn.local[id] = v.size();
      v.push_back(id);
    }
    ChainComplex c(R);
    for (const auto& [d, ids] : sn.basis) {
      std::vector<std::string> labels;
      for (auto id : ids) labels.push_back(gens[id].code());
      c.set_rank(d, ids.size(), labels);
    }
    for (const auto& [d, ids] : sn.basis) {
      auto below = sn.basis.find(d - 1);
      if (below == sn.basis.end()) continue;
      Matrix D(R, below->second.size(), ids.size());
      for (std::size_t col = 0; col < ids.size(); ++col) {
        CorollaVec dg = env.generator_differential(gens[ids[col]]);
        SparseVec r = elim.reduce(to_ids(GenTerms(dg.begin(), dg.end())));
        for (const auto& [id, coef] : r) D.add_to(sn.local.at(id), col, coef);
      }
      c.set_differential(d, D);
    }
    std::map<int, std::vector<SparseVec>> rel;
    for (const auto& r : elim.residuals()) rel[degree[r.front().first]].push_back(r);
    for (const auto& [d, rows] : rel) {
      Matrix M(R, c.rank(d), rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k)
        for (const auto& [id, coef] : rows[k]) M.add_to(sn.local.at(id), k, coef);
      c.set_relations(d, M);
    }
    sn.presented = c;
    bool minimal = elim.residuals().empty();
    for (int d : c.degrees()) {
      if (!minimal) break;
      Matrix D = c.differential(d);
      for (std::size_t i = 0; i < D.rows() && minimal; ++i)
        for (std::size_t j = 0; j < D.cols() && minimal; ++j) minimal = !R.is_unit(D(i, j));
    }
    sn.identity = minimal;
    if (minimal) {
      sn.pres.complex = c;
      for (int d : c.degrees())
        for (auto id : sn.basis.at(d)) sn.lifts.push_back(CorollaVec{{gens[id], Scalar(1)}});
    } else {
      sn.pres = minimize(c);
      for (int d : sn.pres.complex.degrees()) sn.projection.emplace(d, sn.pres.projection.component(d));
      const ChainComplex& m = sn.pres.complex;
      sn.lifts.resize(m.total_rank());
      for (int d : m.degrees()) {
        Matrix L = sn.pres.lift.component(d);
        const auto& ids = sn.basis.at(d);
        for (std::size_t j = 0; j < m.rank(d); ++j) {
          CorollaVec v;
          for (std::size_t i = 0; i < ids.size(); ++i)
            if (sgn(L(i, j)) != 0) v[gens[ids[i]]] += L(i, j);
          sn.lifts[m.flat_offset(d) + j] = std::move(v);
        }
      }
    }
    snap = std::move(sn);
    return *snap;
  }

  // Coordinates in the current snapshot's minimized complex.
  SparseVec coordinates(const CorollaVec& x) {
    Snapshot& sn = snapshot();
    SparseVec r = elim.reduce(to_ids(GenTerms(x.begin(), x.end())));
    std::map<int, std::vector<std::pair<std::size_t, Scalar>>> by_degree;
    for (const auto& [id, c] : r) by_degree[degree[id]].emplace_back(sn.local.at(id), c);
    std::map<std::size_t, Scalar> out;
    const ChainComplex& m = sn.pres.complex;
    for (const auto& [d, entries] : by_degree) {
      if (sn.identity) {
        for (const auto& [col, c] : entries) out[m.flat_offset(d) + col] += c;
        continue;
      }
      auto it = sn.projection.find(d);
      if (it == sn.projection.end()) continue;
      const Matrix& P = it->second;
      for (std::size_t row = 0; row < P.rows(); ++row) {
        Scalar acc = 0;
        for (const auto& [col, c] : entries) acc += P(row, col) * c;
        if (sgn(acc) != 0) out[m.flat_offset(d) + row] += acc;
      }
    }
    return sparse_normalized(env.ring(), std::move(out));
  }
};

struct Envelope::Canonical {
  EnvelopingComponent comp;
  std::vector<CorollaVec> lifts;
  long transition_at = -1;
  struct Solver {
    SmithForm sf;
    std::size_t cols = 0;
  };
  std::map<int, Solver> solvers;
};

Envelope::Envelope(AlgebraPtr algebra, TruncationBounds bounds, bool quotient)
    : algebra_(std::move(algebra)), bounds_(bounds), quotient_(quotient) {
  bounds_.validate();
}

Envelope::~Envelope() = default;

Envelope::Engine& Envelope::engine(std::size_t n) {
  auto& e = engines_[n];
  if (!e) e = std::make_unique<Engine>(*this, n);
  return *e;
}

int corolla_degree(const OAlgebra& a, const Corolla& g) {
  int d = a.operad()->degree(g.leaves.size(), g.op);
  for (auto l : g.leaves)
    if (l != kSnakyLeaf) d += a.degree(l);
  return d;
}

CorollaVec corolla_differential(const OAlgebra& a, const Corolla& g) {
  CorollaVec out;
  const std::size_t N = g.leaves.size();
  for (const auto& [op, c] : a.operad()->differential(N, g.op)) out[Corolla{op, g.leaves}] += c;
  int running = a.operad()->degree(N, g.op);
  for (std::size_t k = 0; k < N; ++k) {
    if (g.leaves[k] == kSnakyLeaf) continue;
    for (const auto& [b, c] : a.differential(g.leaves[k])) {
      Corolla h = g;
      h.leaves[k] = static_cast<std::uint32_t>(b);
      out[h] += c * sign_of(running);
    }
    running += a.degree(g.leaves[k]);
  }
  for (auto it = out.begin(); it != out.end();) it = sgn(a.ring().normalize(it->second)) == 0 ? out.erase(it) : std::next(it);
  return out;
}

CorollaVec compose_corollas(const OAlgebra& a, const Corolla& x, std::size_t i, const Corolla& y) {
  std::size_t pos = 0, seen = 0;
  for (; pos < x.leaves.size(); ++pos)
    if (x.leaves[pos] == kSnakyLeaf && ++seen == i) break;
  if (pos == x.leaves.size()) throw SlotOutOfRange("no snaky leaf number " + std::to_string(i));
  int before = 0, after = 0, ylabels = 0;
  for (std::size_t k = 0; k < x.leaves.size(); ++k)
    if (x.leaves[k] != kSnakyLeaf) (k < pos ? before : after) += a.degree(x.leaves[k]);
  for (auto l : y.leaves)
    if (l != kSnakyLeaf) ylabels += a.degree(l);
  const int yop = a.operad()->degree(y.leaves.size(), y.op);
  const int sg = sign_of(static_cast<long>(yop + ylabels) * after + static_cast<long>(yop) * before);
  std::vector<std::uint32_t> leaves(x.leaves.begin(), x.leaves.begin() + pos);
  leaves.insert(leaves.end(), y.leaves.begin(), y.leaves.end());
  leaves.insert(leaves.end(), x.leaves.begin() + pos + 1, x.leaves.end());
  CorollaVec out;
  for (const auto& [op, c] : a.operad()->compose(x.leaves.size(), x.op, pos + 1, y.leaves.size(), y.op))
    out[Corolla{op, leaves}] += c * sg;
  return out;
}

int Envelope::generator_degree(const Corolla& g) const { return corolla_degree(*algebra_, g); }

CorollaVec Envelope::generator_differential(const Corolla& g) const { return corolla_differential(*algebra_, g); }

CorollaVec Envelope::compose_generators(const Corolla& x, std::size_t i, const Corolla& y) const {
  return compose_corollas(*algebra_, x, i, y);
}

Envelope::Canonical& Envelope::canonical(std::size_t n) {
  auto& slot = canonical_[n];
  if (slot) return *slot;
  auto can = std::make_unique<Canonical>();
  Engine& e = engine(n);
  EnvelopingComponent& comp = can->comp;
  comp.arity = n;
  const std::size_t window = bounds_.stabilization_window;

  auto take = [&](Engine::Snapshot& sn, std::size_t S) {
    comp.complex = sn.pres.complex;
    comp.bound = S;
    can->lifts = sn.lifts;
    comp.basis_codes.clear();
    for (const auto& l : can->lifts) comp.basis_codes.push_back(l.empty() ? "0" : l.begin()->first.code());
  };

  if (!quotient_) {
    e.grow_to(bounds_.max_straight_leaves);
    auto& sn = e.snapshot();
    comp.history.push_back({bounds_.max_straight_leaves, complex_invariants(sn.pres.complex)});
    take(sn, bounds_.max_straight_leaves);
    comp.stabilized = false;
    slot = std::move(can);
    return *slot;
  }

  std::vector<std::vector<CorollaVec>> prev_lifts;
  std::vector<ChainComplex> prev_complex;
  std::size_t run = 0;  // consecutive bounds with equal invariants ending here
  for (std::size_t S = 0; S <= bounds_.max_straight_leaves; ++S) {
    e.grow_to(S);
    auto& sn = e.snapshot();
    auto inv = complex_invariants(sn.pres.complex);
    bool same = false;
    if (!comp.history.empty() && comp.history.back().invariants == inv) {
      ChainMap tr(prev_complex.back(), sn.pres.complex);
      std::map<int, Matrix> blocks;
      for (int d : prev_complex.back().degrees())
        if (sn.pres.complex.rank(d) > 0) blocks.emplace(d, Matrix(ring(), sn.pres.complex.rank(d), prev_complex.back().rank(d)));
      for (std::size_t j = 0; j < prev_lifts.back().size(); ++j) {
        auto [d, local] = prev_complex.back().unflatten(j);
        auto it = blocks.find(d);
        if (it == blocks.end()) continue;
        for (const auto& [k, c] : e.coordinates(prev_lifts.back()[j]))
          it->second.add_to(k - sn.pres.complex.flat_offset(d), local, c);
      }
      for (auto& [d, M] : blocks) tr.set_component(d, M);
      same = is_isomorphism(tr);
    }
    run = same ? run + 1 : 1;
    comp.history.push_back({S, inv});
    prev_lifts.push_back(sn.lifts);
    prev_complex.push_back(sn.pres.complex);
    if (run >= window) {
      const std::size_t first = S + 1 - window;
      comp.complex = prev_complex[first];
      comp.bound = first;
      can->lifts = prev_lifts[first];
      comp.basis_codes.clear();
      for (const auto& l : can->lifts) comp.basis_codes.push_back(l.empty() ? "0" : l.begin()->first.code());
      comp.stabilized = true;
      slot = std::move(can);
      return *slot;
    }
  }
  take(e.snapshot(), bounds_.max_straight_leaves);
  comp.stabilized = false;
  slot = std::move(can);
  return *slot;
}

const EnvelopingComponent& Envelope::component(std::size_t n) { return canonical(n).comp; }

CorollaVec Envelope::lift(std::size_t n, std::size_t basis) { return canonical(n).lifts.at(basis); }

SparseVec Envelope::project(std::size_t n, const CorollaVec& x) {
  Canonical& can = canonical(n);
  Engine& e = engine(n);
  std::size_t need = can.comp.bound;
  for (const auto& [g, c] : x) {
    if (g.snaky() != n) throw Error("project: generator " + g.code() + " has the wrong arity");
    need = std::max(need, g.straight());
  }
  const std::size_t cap = quotient_ ? 2 * bounds_.max_straight_leaves : bounds_.max_straight_leaves;
  if (need > cap)
    throw WindowExceeded("arity " + std::to_string(n) + ": needs " + std::to_string(need) +
                         " straight leaves, cap is " + std::to_string(cap));
  e.grow_to(need);
  if (e.S == static_cast<long>(can.comp.bound)) return e.coordinates(x);

  auto& sn = e.snapshot();
  const ChainComplex& cur = sn.pres.complex;
  const ChainComplex& canon = can.comp.complex;
  if (can.transition_at != e.S) {
    can.solvers.clear();
    std::map<int, Matrix> T;
    for (int d : cur.degrees()) T.emplace(d, Matrix(ring(), cur.rank(d), canon.rank(d)));
    for (std::size_t j = 0; j < can.lifts.size(); ++j) {
      auto [d, local] = canon.unflatten(j);
      auto it = T.find(d);
      if (it == T.end()) continue;
      for (const auto& [k, c] : e.coordinates(can.lifts[j])) it->second.add_to(k - cur.flat_offset(d), local, c);
    }
    for (auto& [d, M] : T) {
      Matrix full = Matrix::hstack(M, cur.relations(d));
      can.solvers[d] = Canonical::Solver{diagonalize(full), M.cols()};
    }
    can.transition_at = e.S;
  }
  SparseVec y = e.coordinates(x);
  std::map<int, std::vector<Scalar>> by_degree;
  for (const auto& [k, c] : y) {
    auto [d, local] = cur.unflatten(k);
    auto& v = by_degree[d];
    if (v.empty()) v.assign(cur.rank(d), Scalar(0));
    v[local] = c;
  }
  std::map<std::size_t, Scalar> out;
  for (const auto& [d, v] : by_degree) {
    auto it = can.solvers.find(d);
    std::optional<std::vector<Scalar>> sol;
    if (it != can.solvers.end()) sol = solve_with(it->second.sf, ring(), it->second.cols, v);
    if (!sol)
      throw WindowExceeded("arity " + std::to_string(n) + ": class at bound " + std::to_string(e.S) +
                           " is not represented at the canonical bound " + std::to_string(can.comp.bound));
    for (std::size_t j = 0; j < sol->size(); ++j)
      if (sgn((*sol)[j]) != 0) out[canon.flat_offset(d) + j] += (*sol)[j];
  }
  return sparse_normalized(ring(), std::move(out));
}

SparseVec Envelope::compose(std::size_t p, std::size_t x, std::size_t i, std::size_t q, std::size_t y) {
  if (i < 1 || i > p) throw SlotOutOfRange("composition slot " + std::to_string(i) + " outside 1.." + std::to_string(p));
  CorollaVec lx = lift(p, x), ly = lift(q, y), acc;
  for (const auto& [g, c] : lx)
    for (const auto& [h, d] : ly)
      for (const auto& [k, e] : compose_generators(g, i, h)) acc[k] += c * d * e;
  return project(p + q - 1, acc);
}

SparseVec Envelope::compose(std::size_t p, const SparseVec& x, std::size_t i, std::size_t q, const SparseVec& y) {
  SparseVec out;
  for (const auto& [a, ca] : x)
    for (const auto& [b, cb] : y) sparse_axpy(out, ca * cb, compose(p, a, i, q, b));
  return sparse_normalize(ring(), out);
}

ChainMap Envelope::composition_map(std::size_t p, std::size_t q, std::size_t i) {
  const ChainComplex& A = component(p).complex;
  const ChainComplex& B = component(q).complex;
  const ChainComplex& C = component(p + q - 1).complex;
  TensorBasis tb(ring(), {A, B});
  const ChainComplex& S = tb.complex();
  ChainMap f(S, C);
  for (int d : S.degrees()) {
    if (C.rank(d) == 0) continue;
    Matrix M(ring(), C.rank(d), S.rank(d));
    for (std::size_t j = 0; j < S.rank(d); ++j) {
      auto parts = tb.decompose(S.flat_offset(d) + j);
      for (const auto& [k, c] : compose(p, parts[0], i, q, parts[1])) M.add_to(k - C.flat_offset(d), j, c);
    }
    f.set_component(d, M);
  }
  return f;
}

void Envelope::check_descent(std::size_t p, std::size_t q, std::size_t i) {
  if (!quotient_) return;
  const std::size_t r = p + q - 1;
  const ChainComplex& C = component(r).complex;
  auto vanishes = [&](const SparseVec& v) {
    if (v.empty()) return true;
    auto [d, local] = C.unflatten(v.front().first);
    Matrix y(ring(), C.rank(d), 1);
    for (const auto& [k, c] : v) y.set(k - C.flat_offset(d), 0, c);
    return columns_in_span(C.relations(d), y);
  };
  auto check = [&](std::size_t side) {
    const std::size_t a = side == 0 ? p : q;
    const std::size_t other = side == 0 ? q : p;
    const std::size_t other_dim = component(other).complex.total_rank();
    Engine& e = engine(a);
    const std::size_t top = component(a).bound;
    for (std::size_t L = 1; L <= top; ++L)
      e.for_each_relation(L, [&](const GenTerms& row) {
        for (std::size_t b = 0; b < other_dim; ++b) {
          CorollaVec acc;
          for (const auto& [g, c] : row)
            for (const auto& [h, d] : lift(other, b))
              for (const auto& [k, v] : side == 0 ? compose_generators(g, i, h) : compose_generators(h, i, g))
                acc[k] += c * d * v;
          SparseVec img = project(r, acc);
          if (!vanishes(img)) {
            std::string rel;
            for (const auto& [g, c] : row) rel += (rel.empty() ? "" : " + ") + c.get_str() + "*" + g.code();
            throw DescentFailure("composition o_" + std::to_string(i) + " does not kill relation " + rel +
                                 " against basis element " + std::to_string(b) + ": image " + sparse_show(img));
          }
        }
      });
  };
  check(0);
  check(1);
}

SparseVec Envelope::unit() {
  CorollaVec u;
  for (const auto& [op, c] : operad().unit()) u[Corolla{op, {kSnakyLeaf}}] += c;
  return project(1, u);
}

SparseVec Envelope::insert(std::size_t n, std::size_t x, std::size_t i, const SparseVec& a) {
  CorollaVec acc;
  for (const auto& [g, c] : lift(n, x)) {
    std::size_t pos = 0, seen = 0;
    for (; pos < g.leaves.size(); ++pos)
      if (g.leaves[pos] == kSnakyLeaf && ++seen == i) break;
    if (pos == g.leaves.size()) throw SlotOutOfRange("no snaky leaf number " + std::to_string(i));
    int after = 0;
    for (std::size_t k = pos + 1; k < g.leaves.size(); ++k)
      if (g.leaves[k] != kSnakyLeaf) after += algebra_->degree(g.leaves[k]);
    for (const auto& [b, cb] : a) {
      Corolla h = g;
      h.leaves[pos] = static_cast<std::uint32_t>(b);
      acc[h] += c * cb * sign_of(static_cast<long>(algebra_->degree(b)) * after);
    }
  }
  return project(n - 1, acc);
}

ChainMap Envelope::evaluation() {
  const ChainComplex& E = component(0).complex;
  const ChainComplex& A = algebra_->carrier();
  ChainMap f(E, A);
  std::map<int, Matrix> blocks;
  for (int d : E.degrees())
    if (A.rank(d) > 0) blocks.emplace(d, Matrix(ring(), A.rank(d), E.rank(d)));
  for (std::size_t j = 0; j < E.total_rank(); ++j) {
    auto [d, local] = E.unflatten(j);
    auto it = blocks.find(d);
    if (it == blocks.end()) continue;
    SparseVec v;
    for (const auto& [g, c] : lift(0, j)) {
      std::vector<std::size_t> args(g.leaves.begin(), g.leaves.end());
      sparse_axpy(v, c, algebra_->act(g.leaves.size(), g.op, args));
    }
    for (const auto& [k, c] : sparse_normalize(ring(), v)) it->second.add_to(k - A.flat_offset(d), local, c);
  }
  for (auto& [d, M] : blocks) f.set_component(d, M);
  return f;
}

ChainMap Envelope::coevaluation() {
  const ChainComplex& E = component(0).complex;
  const ChainComplex& A = algebra_->carrier();
  ChainMap f(A, E);
  std::map<int, Matrix> blocks;
  for (int d : A.degrees())
    if (E.rank(d) > 0) blocks.emplace(d, Matrix(ring(), E.rank(d), A.rank(d)));
  for (std::size_t a = 0; a < A.total_rank(); ++a) {
    auto [d, local] = A.unflatten(a);
    auto it = blocks.find(d);
    if (it == blocks.end()) continue;
    CorollaVec x;
    for (const auto& [op, c] : operad().unit()) x[Corolla{op, {static_cast<std::uint32_t>(a)}}] += c;
    for (const auto& [k, c] : project(0, x)) it->second.add_to(k - E.flat_offset(d), local, c);
  }
  for (auto& [d, M] : blocks) f.set_component(d, M);
  return f;
}

EnvelopingResult enveloping_operad(Envelope& env, std::size_t n) {
  EnvelopingResult r;
  r.bounds = env.bounds();
  r.stabilized = true;
  for (std::size_t k = 0; k <= n; ++k) {
    r.components.push_back(env.component(k));
    r.stabilized = r.stabilized && r.components.back().stabilized;
  }
  return r;
}

EnvelopingResult enveloping_operad(AlgebraPtr algebra, std::size_t n, const TruncationBounds& bounds) {
  Envelope env(std::move(algebra), bounds);
  return enveloping_operad(env, n);
}

ChainMap enveloping_map(Envelope& source, Envelope& target, const AlgebraMorphism& phi, std::size_t n) {
  const ChainComplex& S = source.component(n).complex;
  const ChainComplex& T = target.component(n).complex;
  ChainMap f(S, T);
  std::map<int, Matrix> blocks;
  for (int d : S.degrees())
    if (T.rank(d) > 0) blocks.emplace(d, Matrix(source.ring(), T.rank(d), S.rank(d)));
  for (std::size_t j = 0; j < S.total_rank(); ++j) {
    auto [d, local] = S.unflatten(j);
    auto it = blocks.find(d);
    if (it == blocks.end()) continue;
    CorollaVec acc;
    for (const auto& [g, c] : source.lift(n, j)) {
      CorollaVec partial{{Corolla{g.op, {}}, c}};
      for (auto l : g.leaves) {
        CorollaVec next;
        for (const auto& [h, hc] : partial) {
          if (l == kSnakyLeaf) {
            Corolla k = h;
            k.leaves.push_back(kSnakyLeaf);
            next[k] += hc;
            continue;
          }
          for (const auto& [b, bc] : phi.apply(l)) {
            Corolla k = h;
            k.leaves.push_back(static_cast<std::uint32_t>(b));
            next[k] += hc * bc;
          }
        }
        partial = std::move(next);
      }
      for (const auto& [h, hc] : partial) acc[h] += hc;
    }
    for (const auto& [k, c] : target.project(n, acc)) it->second.add_to(k - T.flat_offset(d), local, c);
  }
  for (auto& [d, M] : blocks) f.set_component(d, M);
  return f;
}

}  // namespace paperlab
