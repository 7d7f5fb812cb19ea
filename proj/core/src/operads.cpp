#include "paperlab/operads.hpp"

#include <algorithm>
#include <sstream>

namespace paperlab {

// ---------------------------------------------------------------- sparse vectors

void sparse_axpy(SparseVec& y, const Scalar& a, const SparseVec& x) {
  if (sgn(a) == 0 || x.empty()) return;
  SparseVec out;
  out.reserve(y.size() + x.size());
  std::size_t i = 0, j = 0;
  while (i < y.size() || j < x.size()) {
    if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
      out.push_back(y[i++]);
    } else if (i == y.size() || x[j].first < y[i].first) {
      out.emplace_back(x[j].first, a * x[j].second);
      ++j;
    } else {
      Scalar v = y[i].second + a * x[j].second;
      if (sgn(v) != 0) out.emplace_back(y[i].first, v);
      ++i;
      ++j;
    }
  }
  y = std::move(out);
}

SparseVec sparse_normalized(const Ring& ring, std::map<std::size_t, Scalar> entries) {
  SparseVec out;
  for (auto& [k, v] : entries) {
    Scalar n = ring.normalize(v);
    if (sgn(n) != 0) out.emplace_back(k, n);
  }
  return out;
}

SparseVec sparse_unit(std::size_t index) { return {{index, Scalar(1)}}; }

SparseVec sparse_normalize(const Ring& ring, const SparseVec& v) {
  SparseVec out;
  for (const auto& [k, c] : v) {
    Scalar n = ring.normalize(c);
    if (sgn(n) != 0) out.emplace_back(k, n);
  }
  return out;
}

std::string sparse_show(const SparseVec& v) {
  std::ostringstream os;
  os << "{";
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k].first << ":" << v[k].second.get_str();
  os << "}";
  return os.str();
}

SparseVec flat_differential(const ChainComplex& c, std::size_t flat) {
  auto [n, local] = c.unflatten(flat);
  SparseVec out;
  if (c.rank(n - 1) == 0) return out;
  Matrix d = c.differential(n);
  std::size_t base = c.flat_offset(n - 1);
  for (std::size_t r = 0; r < d.rows(); ++r)
    if (sgn(d(r, local)) != 0) out.emplace_back(base + r, d(r, local));
  return out;
}

// ---------------------------------------------------------------- operad base

const Operad::Cached& Operad::cached(std::size_t n) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return *it->second;
  }
  auto c = std::make_unique<Cached>();
  c->complex = make_component(n);
  for (int d : c->complex.degrees())
    for (auto& l : c->complex.labels(d)) {
      c->degrees.push_back(d);
      c->labels.push_back(l);
    }
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = cache_.emplace(n, std::move(c));
  return *it->second;
}

const ChainComplex& Operad::component(std::size_t n) const { return cached(n).complex; }

int Operad::degree(std::size_t n, std::size_t basis) const { return cached(n).degrees.at(basis); }

std::string Operad::label(std::size_t n, std::size_t basis) const { return cached(n).labels.at(basis); }

SparseVec Operad::differential(std::size_t n, std::size_t basis) const {
  return flat_differential(component(n), basis);
}

SparseVec Operad::compose(std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b) const {
  if (i < 1 || i > p) throw SlotOutOfRange("composition slot " + std::to_string(i) + " outside 1.." + std::to_string(p));
  if (a >= dim(p) || b >= dim(q)) throw Error("composition: basis index out of range");
  return sparse_normalize(ring_, compose_basis(p, a, i, q, b));
}

SparseVec Operad::compose(std::size_t p, const SparseVec& a, std::size_t i, std::size_t q, const SparseVec& b) const {
  SparseVec out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) sparse_axpy(out, cx * cy, compose(p, x, i, q, y));
  return sparse_normalize(ring_, out);
}

ChainMap Operad::composition_map(std::size_t p, std::size_t q, std::size_t i) const {
  const ChainComplex& A = component(p);
  const ChainComplex& B = component(q);
  const ChainComplex& C = component(p + q - 1);
  ChainComplex S = tensor(A, B);
  ChainMap f(S, C);
  for (int n : S.degrees()) {
    if (C.rank(n) == 0) continue;
    Matrix m(ring_, C.rank(n), S.rank(n));
    std::size_t off = 0;
    for (int dp : A.degrees()) {
      int dq = n - dp;
      if (B.rank(dq) == 0) continue;
      for (std::size_t x = 0; x < A.rank(dp); ++x)
        for (std::size_t y = 0; y < B.rank(dq); ++y) {
          auto v = compose(p, A.flat_offset(dp) + x, i, q, B.flat_offset(dq) + y);
          for (const auto& [k, c] : v) {
            auto [deg, local] = C.unflatten(k);
            if (deg != n) throw AxiomViolation("composition does not preserve degree");
            m.add_to(local, off + x * B.rank(dq) + y, c);
          }
        }
      off += A.rank(dp) * B.rank(dq);
    }
    f.set_component(n, m);
  }
  return f;
}

// ---------------------------------------------------------------- builtins

Monoid Monoid::ground() { return truncated_polynomial(1); }

Monoid Monoid::truncated_polynomial(std::size_t m) {
  Monoid out;
  out.rank = m;
  out.table.assign(m, std::vector<std::vector<long>>(m, std::vector<long>(m, 0)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; i + j < m; ++j) out.table[i][j][i + j] = 1;
  out.unit.assign(m, 0);
  out.unit[0] = 1;
  for (std::size_t i = 0; i < m; ++i) out.labels.push_back(i == 0 ? "1" : i == 1 ? "t" : "t^" + std::to_string(i));
  return out;
}

namespace {

// k in degree 0 for arities in [lo, hi]; every composition is the identification.
class ConstantOperad : public Operad {
 public:
  ConstantOperad(Ring ring, std::string name, std::size_t lo, std::optional<std::size_t> hi,
                 std::function<SparseVec(std::size_t, std::size_t, std::size_t)> rule = {})
      : Operad(ring), name_(std::move(name)), lo_(lo), hi_(hi), rule_(std::move(rule)) {}

  std::string name() const override { return name_; }
  std::optional<std::size_t> max_arity() const override { return hi_; }
  SparseVec unit() const override { return sparse_unit(0); }

 protected:
  bool supported(std::size_t n) const { return n >= lo_ && (!hi_ || n <= *hi_); }

  ChainComplex make_component(std::size_t n) const override {
    if (!supported(n)) return ChainComplex(ring());
    return ChainComplex::concentrated(ring(), 0, 1, {label_for(n)});
  }

  SparseVec compose_basis(std::size_t p, std::size_t, std::size_t i, std::size_t q, std::size_t) const override {
    if (rule_) return rule_(p, i, q);
    return supported(p + q - 1) ? sparse_unit(0) : SparseVec{};
  }

  virtual std::string label_for(std::size_t n) const { return "m" + std::to_string(n); }

 private:
  std::string name_;
  std::size_t lo_;
  std::optional<std::size_t> hi_;
  std::function<SparseVec(std::size_t, std::size_t, std::size_t)> rule_;
};

class A3ZeroOperad : public ConstantOperad {
 public:
  explicit A3ZeroOperad(Ring ring)
      : ConstantOperad(ring, "a3zero", 1, 2, [](std::size_t p, std::size_t, std::size_t q) {
          return p + q - 1 <= 2 ? sparse_unit(0) : SparseVec{};
        }) {}

 protected:
  std::string label_for(std::size_t n) const override { return n == 1 ? "u" : "mu"; }
};

class Arity1Operad : public Operad {
 public:
  Arity1Operad(Ring ring, Monoid m, std::string name) : Operad(ring), m_(std::move(m)), name_(std::move(name)) {
    if (m_.table.size() != m_.rank || m_.unit.size() != m_.rank) throw Error("monoid: table shape mismatch");
  }

  std::string name() const override { return name_; }
  std::optional<std::size_t> max_arity() const override { return 1; }
  SparseVec unit() const override {
    SparseVec u;
    for (std::size_t k = 0; k < m_.rank; ++k)
      if (m_.unit[k] != 0) u.emplace_back(k, Scalar(m_.unit[k]));
    return sparse_normalize(ring(), u);
  }

 protected:
  ChainComplex make_component(std::size_t n) const override {
    if (n != 1) return ChainComplex(ring());
    return ChainComplex::concentrated(ring(), 0, m_.rank, m_.labels.size() == m_.rank ? m_.labels : std::vector<std::string>{});
  }

  SparseVec compose_basis(std::size_t, std::size_t a, std::size_t, std::size_t, std::size_t b) const override {
    SparseVec out;
    for (std::size_t k = 0; k < m_.rank; ++k)
      if (m_.table[a][b][k] != 0) out.emplace_back(k, Scalar(m_.table[a][b][k]));
    return out;
  }

 private:
  Monoid m_;
  std::string name_;
};

class OverrideOperad : public Operad {
 public:
  OverrideOperad(OperadPtr base, std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b,
                 SparseVec value)
      : Operad(base->ring()), base_(std::move(base)), key_{p, a, i, q, b}, value_(std::move(value)) {}

  std::string name() const override { return base_->name() + "-modified"; }
  std::optional<std::size_t> max_arity() const override { return base_->max_arity(); }
  SparseVec unit() const override { return base_->unit(); }

 protected:
  ChainComplex make_component(std::size_t n) const override { return base_->component(n); }
  SparseVec compose_basis(std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b) const override {
    if (std::vector<std::size_t>{p, a, i, q, b} == key_) return value_;
    return base_->compose(p, a, i, q, b);
  }

 private:
  OperadPtr base_;
  std::vector<std::size_t> key_;
  SparseVec value_;
};

}  // namespace

OperadPtr builtin_uass(Ring ring) { return std::make_shared<ConstantOperad>(ring, "uass", 0, std::nullopt); }

OperadPtr builtin_ass(Ring ring) { return std::make_shared<ConstantOperad>(ring, "ass", 1, std::nullopt); }

OperadPtr builtin_a3zero(Ring ring) { return std::make_shared<A3ZeroOperad>(ring); }

OperadPtr builtin_arity1(Ring ring, const Monoid& m) { return std::make_shared<Arity1Operad>(ring, m, "arity1"); }

OperadPtr builtin_initial(Ring ring) { return std::make_shared<Arity1Operad>(ring, Monoid::ground(), "initial"); }

OperadPtr builtin_operad(const std::string& name, Ring ring) {
  if (name == "uass") return builtin_uass(ring);
  if (name == "ass") return builtin_ass(ring);
  if (name == "a3zero") return builtin_a3zero(ring);
  if (name == "initial") return builtin_initial(ring);
  throw Error("unknown builtin operad '" + name + "'");
}

OperadPtr with_composition_override(OperadPtr base, std::size_t p, std::size_t a, std::size_t i, std::size_t q,
                                    std::size_t b, SparseVec value) {
  return std::make_shared<OverrideOperad>(std::move(base), p, a, i, q, b, std::move(value));
}

// ---------------------------------------------------------------- free operads

std::string LabeledTree::code() const {
  std::string s = shape.code() + "[";
  for (std::size_t k = 0; k < labels.size(); ++k) s += (k ? "," : "") + std::to_string(labels[k]);
  return s + "]";
}

FreeOperad::FreeOperad(Ring ring, SequenceV v, std::size_t size_bound)
    : Operad(ring), v_(std::move(v)), size_bound_(size_bound) {
  for (const auto& [a, c] : v_) {
    if (!(c.ring() == ring)) throw RingMismatch("free operad: generator ring mismatch");
    if (!c.is_free()) throw Error("free operad: generators must be free complexes");
  }
}

std::optional<std::size_t> FreeOperad::max_arity() const {
  std::size_t m = 1;
  for (const auto& [a, c] : v_)
    if (c.total_rank() > 0) m = std::max(m, a);
  return 1 + size_bound_ * (m > 0 ? m - 1 : 0);
}

SparseVec FreeOperad::unit() const {
  auto idx = index_of(1, LabeledTree{PlanarTree::leaf(), {}});
  return idx ? sparse_unit(*idx) : SparseVec{};
}

int FreeOperad::tree_degree(const LabeledTree& t) const {
  int d = 0;
  auto vs = t.shape.vertex_paths();
  for (std::size_t k = 0; k < vs.size(); ++k) d += v_.at(t.shape.at(vs[k]).arity()).unflatten(t.labels[k]).first;
  return d;
}

const FreeOperad::Basis& FreeOperad::basis_data(std::size_t n) const {
  {
    std::lock_guard<std::mutex> lock(basis_mutex_);
    if (auto it = bases_.find(n); it != bases_.end()) return *it->second;
  }
  auto b = std::make_unique<Basis>();
  TreeSpec spec;
  spec.snaky = n;
  spec.max_inner_vertices = size_bound_;
  std::set<std::size_t> ar;
  for (const auto& [a, c] : v_)
    if (c.total_rank() > 0) ar.insert(a);
  spec.arities = ar;
  std::vector<std::pair<int, LabeledTree>> all;
  for (const auto& shape : enumerate_trees(spec)) {
    auto vs = shape.vertex_paths();
    std::vector<std::size_t> dims;
    for (const auto& p : vs) dims.push_back(v_.at(shape.at(p).arity()).total_rank());
    std::vector<std::size_t> labels(vs.size(), 0);
    while (true) {
      LabeledTree t{shape, labels};
      all.emplace_back(tree_degree(t), t);
      std::size_t k = 0;
      while (k < labels.size() && ++labels[k] == dims[k]) labels[k++] = 0;
      if (k == labels.size()) break;
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first < y.first : x.second.code() < y.second.code();
  });
  for (auto& [d, t] : all) {
    b->index.emplace(t.code(), b->trees.size());
    b->trees.push_back(std::move(t));
  }
  std::lock_guard<std::mutex> lock(basis_mutex_);
  auto [it, inserted] = bases_.emplace(n, std::move(b));
  return *it->second;
}

const std::vector<LabeledTree>& FreeOperad::basis(std::size_t n) const { return basis_data(n).trees; }

std::optional<std::size_t> FreeOperad::index_of(std::size_t n, const LabeledTree& t) const {
  const auto& b = basis_data(n);
  auto it = b.index.find(t.code());
  if (it == b.index.end()) return std::nullopt;
  return it->second;
}

ChainComplex FreeOperad::make_component(std::size_t n) const {
  const auto& trees = basis(n);
  ChainComplex c(ring());
  std::map<int, std::vector<std::string>> labels;
  std::vector<int> degs;
  for (const auto& t : trees) {
    degs.push_back(tree_degree(t));
    labels[degs.back()].push_back(t.code());
  }
  for (auto& [d, ls] : labels) c.set_rank(d, ls.size(), ls);
  for (auto& [d, ls] : labels) {
    if (c.rank(d - 1) == 0) continue;
    Matrix m(ring(), c.rank(d - 1), c.rank(d));
    std::size_t base = c.flat_offset(d), below = c.flat_offset(d - 1);
    for (std::size_t col = 0; col < ls.size(); ++col) {
      const LabeledTree& t = trees[base + col];
      auto vs = t.shape.vertex_paths();
      int before = 0;
      for (std::size_t k = 0; k < vs.size(); ++k) {
        const ChainComplex& gen = v_.at(t.shape.at(vs[k]).arity());
        Scalar sign = before % 2 ? Scalar(-1) : Scalar(1);
        for (const auto& [img, coef] : flat_differential(gen, t.labels[k])) {
          LabeledTree u = t;
          u.labels[k] = img;
          auto idx = index_of(n, u);
          if (idx) m.add_to(*idx - below, col, sign * coef);
        }
        before += gen.unflatten(t.labels[k]).first;
      }
    }
    c.set_differential(d, m);
  }
  return c;
}

SparseVec FreeOperad::compose_basis(std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b) const {
  const LabeledTree& ta = basis(p)[a];
  const LabeledTree& tb = basis(q)[b];
  if (ta.labels.size() + tb.labels.size() > size_bound_) return {};
  // Vertices of ta that precede its i-th leaf in preorder.
  std::size_t before = 0, leaves_seen = 0;
  bool found = false;
  std::function<void(const PlanarTree&)> walk = [&](const PlanarTree& t) {
    if (found) return;
    if (t.is_leaf()) {
      if (++leaves_seen == i) found = true;
      return;
    }
    ++before;
    for (const auto& c : t.children()) walk(c);
  };
  walk(ta.shape);
  LabeledTree out{graft(ta.shape, i, tb.shape), {}};
  out.labels.insert(out.labels.end(), ta.labels.begin(), ta.labels.begin() + before);
  out.labels.insert(out.labels.end(), tb.labels.begin(), tb.labels.end());
  out.labels.insert(out.labels.end(), ta.labels.begin() + before, ta.labels.end());
  int after_deg = 0;
  auto vs = ta.shape.vertex_paths();
  for (std::size_t k = before; k < vs.size(); ++k) after_deg += v_.at(ta.shape.at(vs[k]).arity()).unflatten(ta.labels[k]).first;
  int sign = (tree_degree(tb) * after_deg) % 2 ? -1 : 1;
  auto idx = index_of(p + q - 1, out);
  if (!idx) return {};
  return {{*idx, Scalar(sign)}};
}

std::shared_ptr<const FreeOperad> free_operad(Ring ring, SequenceV v, std::size_t size_bound) {
  return std::make_shared<FreeOperad>(ring, std::move(v), size_bound);
}

// ---------------------------------------------------------------- axiom checks

namespace {

SparseVec d_of(const Operad& o, std::size_t n, const SparseVec& x) {
  SparseVec out;
  for (const auto& [k, c] : x) sparse_axpy(out, c, o.differential(n, k));
  return out;
}

[[noreturn]] void violation(const std::string& law, const std::string& witness, const SparseVec& lhs,
                            const SparseVec& rhs) {
  throw AxiomViolation(law + " fails at " + witness + ": " + sparse_show(lhs) + " != " + sparse_show(rhs));
}

std::string wit(std::initializer_list<std::pair<const char*, std::size_t>> kv) {
  std::string s = "(";
  bool first = true;
  for (const auto& [k, v] : kv) {
    s += (first ? "" : ", ") + std::string(k) + "=" + std::to_string(v);
    first = false;
  }
  return s + ")";
}

}  // namespace

void check_operad_axioms(const Operad& o, std::size_t arity_bound) {
  const Ring& R = o.ring();
  for (std::size_t n = 0; n <= arity_bound; ++n) {
    try {
      validate(o.component(n));
    } catch (const NotAComplex& e) {
      throw AxiomViolation("component " + std::to_string(n) + " is not a complex: " + e.what());
    }
  }
  const SparseVec u = o.unit();
  for (std::size_t n = 0; n <= arity_bound; ++n)
    for (std::size_t x = 0; x < o.dim(n); ++x) {
      SparseVec ex = sparse_unit(x);
      auto left = o.compose(1, u, 1, n, ex);
      if (left != ex) violation("left unit", wit({{"n", n}, {"x", x}}), left, ex);
      for (std::size_t i = 1; i <= n; ++i) {
        auto right = o.compose(n, ex, i, 1, u);
        if (right != ex) violation("right unit", wit({{"n", n}, {"x", x}, {"i", i}}), right, ex);
      }
    }

  for (std::size_t p = 1; p <= arity_bound + 1; ++p)
    for (std::size_t q = 0; p + q <= arity_bound + 1; ++q)
      for (std::size_t a = 0; a < o.dim(p); ++a)
        for (std::size_t b = 0; b < o.dim(q); ++b)
          for (std::size_t i = 1; i <= p; ++i) {
            SparseVec ea = sparse_unit(a), eb = sparse_unit(b);
            auto lhs = d_of(o, p + q - 1, o.compose(p, a, i, q, b));
            auto rhs = o.compose(p, d_of(o, p, ea), i, q, eb);
            Scalar sign = o.degree(p, a) % 2 ? Scalar(-1) : Scalar(1);
            sparse_axpy(rhs, sign, o.compose(p, ea, i, q, d_of(o, q, eb)));
            rhs = sparse_normalize(R, rhs);
            if (lhs != rhs) violation("Leibniz rule", wit({{"p", p}, {"q", q}, {"i", i}, {"a", a}, {"b", b}}), lhs, rhs);
          }

  for (std::size_t p = 1; p <= arity_bound + 2; ++p)
    for (std::size_t q = 0; p + q <= arity_bound + 2; ++q)
      for (std::size_t r = 0; p + q + r <= arity_bound + 2; ++r)
        for (std::size_t a = 0; a < o.dim(p); ++a)
          for (std::size_t b = 0; b < o.dim(q); ++b)
            for (std::size_t c = 0; c < o.dim(r); ++c) {
              SparseVec ea = sparse_unit(a), eb = sparse_unit(b), ec = sparse_unit(c);
              const std::size_t pq = p + q - 1;
              for (std::size_t i = 1; i <= p; ++i) {
                SparseVec ab = o.compose(p, ea, i, q, eb);
                for (std::size_t j = 1; j <= q; ++j) {
                  auto lhs = o.compose(pq, ab, i + j - 1, r, ec);
                  auto rhs = o.compose(p, ea, i, q + r - 1, o.compose(q, eb, j, r, ec));
                  if (lhs != rhs)
                    violation("nested associativity",
                              wit({{"p", p}, {"q", q}, {"r", r}, {"i", i}, {"j", j}, {"a", a}, {"b", b}, {"c", c}}),
                              lhs, rhs);
                }
                for (std::size_t j = i + 1; j <= p; ++j) {
                  auto lhs = o.compose(pq, ab, j + q - 1, r, ec);
                  auto rhs = o.compose(p + r - 1, o.compose(p, ea, j, r, ec), i, q, eb);
                  if ((o.degree(q, b) * o.degree(r, c)) % 2) rhs = sparse_normalize(R, [&] {
                      SparseVec neg;
                      sparse_axpy(neg, Scalar(-1), rhs);
                      return neg;
                    }());
                  if (lhs != rhs)
                    violation("disjoint associativity",
                              wit({{"p", p}, {"q", q}, {"r", r}, {"i", i}, {"j", j}, {"a", a}, {"b", b}, {"c", c}}),
                              lhs, rhs);
                }
              }
            }
}

SparseVec OperadMorphism::apply(std::size_t n, const SparseVec& x) const {
  SparseVec out;
  for (const auto& [k, c] : x) sparse_axpy(out, c, map(n, k));
  return sparse_normalize(target->ring(), out);
}

void check_operad_morphism(const OperadMorphism& m, std::size_t arity_bound) {
  const Operad& S = *m.source;
  const Operad& T = *m.target;
  auto u = m.apply(1, S.unit());
  if (u != T.unit()) violation("unit preservation", "(arity 1)", u, T.unit());
  for (std::size_t n = 0; n <= arity_bound; ++n)
    for (std::size_t x = 0; x < S.dim(n); ++x) {
      auto lhs = m.apply(n, d_of(S, n, sparse_unit(x)));
      auto rhs = d_of(T, n, m.map(n, x));
      if (sparse_normalize(T.ring(), lhs) != sparse_normalize(T.ring(), rhs))
        violation("chain map condition", wit({{"n", n}, {"x", x}}), lhs, rhs);
    }
  for (std::size_t p = 1; p <= arity_bound + 1; ++p)
    for (std::size_t q = 0; p + q <= arity_bound + 1; ++q)
      for (std::size_t a = 0; a < S.dim(p); ++a)
        for (std::size_t b = 0; b < S.dim(q); ++b)
          for (std::size_t i = 1; i <= p; ++i) {
            auto lhs = m.apply(p + q - 1, S.compose(p, a, i, q, b));
            auto rhs = T.compose(p, m.map(p, a), i, q, m.map(q, b));
            if (lhs != rhs) violation("composition preservation", wit({{"p", p}, {"q", q}, {"i", i}}), lhs, rhs);
          }
}

}  // namespace paperlab
