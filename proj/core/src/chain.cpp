#include "paperlab/chain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace paperlab {

namespace {

void paste(Matrix& M, std::size_t r0, std::size_t c0, const Matrix& B) {
  for (std::size_t i = 0; i < B.rows(); ++i)
    for (std::size_t j = 0; j < B.cols(); ++j)
      if (sgn(B(i, j)) != 0) M.add_to(r0 + i, c0 + j, B(i, j));
}

// Concatenates column blocks that share a row count.
Matrix hcat(const Ring& ring, std::size_t rows, const std::vector<Matrix>& blocks) {
  std::size_t cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Matrix out(ring, rows, cols);
  std::size_t c = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw ShapeMismatch("hcat: row mismatch");
    paste(out, 0, c, b);
    c += b.cols();
  }
  return out;
}

bool in_span(const Matrix& G, const Matrix& H) {
  if (H.cols() == 0 || H.is_zero()) return true;
  if (G.cols() == 0) return false;
  return columns_in_span(G, H);
}

std::set<int> degree_union(const ChainComplex& a, const ChainComplex& b) {
  std::set<int> out;
  for (int n : a.degrees()) out.insert(n);
  for (int n : b.degrees()) out.insert(n);
  return out;
}

bool same_ranks(const ChainComplex& a, const ChainComplex& b) {
  if (!(a.ring() == b.ring())) return false;
  for (int n : degree_union(a, b))
    if (a.rank(n) != b.rank(n)) return false;
  return true;
}

// Generators of the cycle lattice {y : d y ∈ R_{n-1}}.
Matrix cycles(const ChainComplex& c, int n) {
  const std::size_t r = c.rank(n);
  if (c.rank(n - 1) == 0) return Matrix::identity(c.ring(), r);
  Matrix A = Matrix::hstack(c.differential(n), c.relations(n - 1));
  Matrix K = kernel_basis(A);
  return K.rows_range(0, r);
}

// Generators of im(d_{n+1}) + R_n.
Matrix boundaries(const ChainComplex& c, int n) {
  return hcat(c.ring(), c.rank(n), {c.differential(n + 1), c.relations(n)});
}

// The top `keep` rows of a kernel basis of [A | B].
Matrix preimage_generators(const Matrix& A, const Matrix& B) {
  if (A.rows() == 0) return Matrix::identity(A.ring(), A.cols());
  Matrix K = kernel_basis(Matrix::hstack(A, B));
  return K.rows_range(0, A.cols());
}

void require_same_ring(const Ring& a, const Ring& b, const char* where) {
  if (!(a == b)) throw RingMismatch(std::string(where) + ": ring mismatch (" + a.name() + " vs " + b.name() + ")");
}

}  // namespace

// ---------------------------------------------------------------- complexes

ChainComplex ChainComplex::unit(Ring ring, std::string label) {
  ChainComplex c(ring);
  c.set_rank(0, 1, {std::move(label)});
  return c;
}

ChainComplex ChainComplex::concentrated(Ring ring, int degree, std::size_t rank, std::vector<std::string> labels) {
  ChainComplex c(ring);
  c.set_rank(degree, rank, std::move(labels));
  return c;
}

const ChainComplex::Part* ChainComplex::part(int n) const {
  auto it = parts_.find(n);
  return it == parts_.end() ? nullptr : &it->second;
}

void ChainComplex::set_rank(int n, std::size_t rank, std::vector<std::string> labels) {
  Part& p = parts_[n];
  if (p.rank != rank) {
    p.differential.reset();
    p.relations.reset();
    auto up = parts_.find(n + 1);
    if (up != parts_.end()) up->second.differential.reset();
  }
  p.rank = rank;
  p.labels = std::move(labels);
}

void ChainComplex::set_differential(int n, Matrix d) {
  if (d.rows() != rank(n - 1) || d.cols() != rank(n))
    throw ShapeMismatch("differential at degree " + std::to_string(n) + " has the wrong shape");
  require_same_ring(ring_, d.ring(), "set_differential");
  parts_[n].differential = std::move(d);
}

void ChainComplex::set_relations(int n, Matrix r) {
  if (r.rows() != rank(n)) throw ShapeMismatch("relations at degree " + std::to_string(n) + " have the wrong shape");
  require_same_ring(ring_, r.ring(), "set_relations");
  parts_[n].relations = std::move(r);
}

void ChainComplex::set_labels(int n, std::vector<std::string> labels) { parts_[n].labels = std::move(labels); }

std::size_t ChainComplex::rank(int n) const {
  const Part* p = part(n);
  return p ? p->rank : 0;
}

Matrix ChainComplex::differential(int n) const {
  const Part* p = part(n);
  if (p && p->differential && p->differential->rows() == rank(n - 1) && p->differential->cols() == rank(n))
    return *p->differential;
  return Matrix(ring_, rank(n - 1), rank(n));
}

Matrix ChainComplex::relations(int n) const {
  const Part* p = part(n);
  if (p && p->relations && p->relations->rows() == rank(n)) return *p->relations;
  return Matrix(ring_, rank(n), 0);
}

std::vector<std::string> ChainComplex::labels(int n) const {
  const Part* p = part(n);
  std::size_t r = rank(n);
  if (p && p->labels.size() == r) return p->labels;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < r; ++i) out.push_back("e" + std::to_string(n) + "_" + std::to_string(i));
  return out;
}

std::vector<int> ChainComplex::degrees() const {
  std::vector<int> out;
  for (const auto& [n, p] : parts_)
    if (p.rank > 0) out.push_back(n);
  return out;
}

bool ChainComplex::is_free() const {
  for (int n : degrees())
    if (!relations(n).is_zero()) return false;
  return true;
}

std::size_t ChainComplex::total_rank() const {
  std::size_t t = 0;
  for (const auto& [n, p] : parts_) t += p.rank;
  return t;
}

std::size_t ChainComplex::flat_offset(int n) const {
  std::size_t off = 0;
  for (const auto& [m, p] : parts_) {
    if (m >= n) break;
    off += p.rank;
  }
  return off;
}

std::pair<int, std::size_t> ChainComplex::unflatten(std::size_t flat) const {
  for (const auto& [m, p] : parts_) {
    if (flat < p.rank) return {m, flat};
    flat -= p.rank;
  }
  throw Error("unflatten: index out of range");
}

bool ChainComplex::operator==(const ChainComplex& o) const {
  if (!same_ranks(*this, o)) return false;
  for (int n : degree_union(*this, o)) {
    if (!(differential(n) == o.differential(n))) return false;
    if (!(relations(n) == o.relations(n))) return false;
  }
  return true;
}

// ---------------------------------------------------------------- maps

ChainMap::ChainMap(ChainComplex source, ChainComplex target) {
  require_same_ring(source.ring(), target.ring(), "ChainMap");
  source_ = std::make_shared<const ChainComplex>(std::move(source));
  target_ = std::make_shared<const ChainComplex>(std::move(target));
}

ChainMap ChainMap::identity(const ChainComplex& c) {
  ChainMap f(c, c);
  for (int n : c.degrees()) f.set_component(n, Matrix::identity(c.ring(), c.rank(n)));
  return f;
}

ChainMap ChainMap::zero(const ChainComplex& source, const ChainComplex& target) { return ChainMap(source, target); }

void ChainMap::set_component(int n, Matrix m) {
  if (m.rows() != target_->rank(n) || m.cols() != source_->rank(n))
    throw ShapeMismatch("chain map component at degree " + std::to_string(n) + " has the wrong shape");
  components_[n] = std::move(m);
}

Matrix ChainMap::component(int n) const {
  auto it = components_.find(n);
  if (it != components_.end()) return it->second;
  return Matrix(ring(), target_->rank(n), source_->rank(n));
}

ChainMap ChainMap::after(const ChainMap& f) const {
  if (!same_ranks(f.target(), source())) throw NotAChainMap("composition: maps are not composable");
  ChainMap out;
  out.source_ = f.source_;
  out.target_ = target_;
  for (int n : f.source().degrees())
    if (target().rank(n) > 0) out.components_[n] = component(n) * f.component(n);
  return out;
}

ChainMap ChainMap::operator+(const ChainMap& o) const {
  if (!same_ranks(source(), o.source()) || !same_ranks(target(), o.target()))
    throw NotParallel("sum of maps with different source or target");
  ChainMap out = *this;
  for (int n : source().degrees())
    if (target().rank(n) > 0) out.components_[n] = component(n) + o.component(n);
  return out;
}

ChainMap ChainMap::operator-(const ChainMap& o) const {
  ChainMap neg = o;
  for (auto& [n, m] : neg.components_) m = -m;
  return *this + neg;
}

// ---------------------------------------------------------------- validation

void validate(const ChainComplex& c) {
  for (int n : c.degrees()) {
    Matrix d = c.differential(n);
    Matrix dd = c.differential(n - 1) * d;
    if (!in_span(c.relations(n - 2), dd)) throw NotAComplex(n, "d∘d is nonzero");
    if (!in_span(c.relations(n - 1), d * c.relations(n))) throw NotAComplex(n, "relations are not d-stable");
  }
}

void validate(const ChainMap& f) {
  const ChainComplex& S = f.source();
  const ChainComplex& T = f.target();
  for (int n : S.degrees()) {
    Matrix fn = f.component(n);
    if (!in_span(T.relations(n), fn * S.relations(n)))
      throw NotAChainMap("degree " + std::to_string(n) + ": relations are not preserved");
    Matrix comm = T.differential(n) * fn - f.component(n - 1) * S.differential(n);
    if (!in_span(T.relations(n - 1), comm))
      throw NotAChainMap("degree " + std::to_string(n) + ": does not commute with d");
  }
}

// ---------------------------------------------------------------- invariants

FgModule module_at(const ChainComplex& c, int n) {
  if (c.relations(n).cols() == 0) return FgModule{c.ring(), c.rank(n), {}};
  return cokernel(c.relations(n).cols() ? c.relations(n) : Matrix(c.ring(), c.rank(n), 0));
}

FgModule homology(const ChainComplex& c, int n) {
  if (c.rank(n) == 0) return FgModule{c.ring(), 0, {}};
  if (c.relations(n).cols() == 0 && c.differential(n).is_zero() && c.differential(n + 1).is_zero())
    return FgModule{c.ring(), c.rank(n), {}};
  return subquotient(cycles(c, n), boundaries(c, n));
}

std::map<int, DegreeInvariants> complex_invariants(const ChainComplex& c) {
  std::map<int, DegreeInvariants> out;
  for (int n : c.degrees()) {
    FgModule m = module_at(c, n);
    FgModule h = homology(c, n);
    if (m.is_zero() && h.is_zero()) continue;
    out[n] = DegreeInvariants{module_invariants(m), module_invariants(h)};
  }
  return out;
}

bool same_invariants(const ChainComplex& a, const ChainComplex& b) {
  return a.ring() == b.ring() && complex_invariants(a) == complex_invariants(b);
}

std::string describe(const std::map<int, DegreeInvariants>& inv) {
  auto mod = [](const ModuleInvariants& m) {
    FgModule tmp{Ring::parse(m.ring), m.rank, {}};
    for (const auto& t : m.torsion) tmp.torsion.emplace_back(t);
    return tmp.to_string();
  };
  std::ostringstream os;
  bool first = true;
  for (const auto& [n, d] : inv) {
    os << (first ? "" : "; ") << "deg " << n << ": " << mod(d.module) << " (H = " << mod(d.homology) << ")";
    first = false;
  }
  return first ? "0" : os.str();
}

bool maps_equal(const ChainMap& f, const ChainMap& g) {
  if (!same_ranks(f.source(), g.source()) || !same_ranks(f.target(), g.target())) return false;
  for (int n : f.source().degrees())
    if (!in_span(f.target().relations(n), f.component(n) - g.component(n))) return false;
  return true;
}

FgModule map_kernel(const ChainMap& f, int n) {
  const ChainComplex& S = f.source();
  if (S.rank(n) == 0) return FgModule{f.ring(), 0, {}};
  Matrix G = preimage_generators(f.component(n), f.target().relations(n));
  return subquotient(G, S.relations(n));
}

FgModule map_cokernel(const ChainMap& f, int n) {
  const ChainComplex& T = f.target();
  if (T.rank(n) == 0) return FgModule{f.ring(), 0, {}};
  return subquotient(Matrix::identity(f.ring(), T.rank(n)), Matrix::hstack(T.relations(n), f.component(n)));
}

bool is_isomorphism(const ChainMap& f) {
  for (int n : degree_union(f.source(), f.target()))
    if (!map_kernel(f, n).is_zero() || !map_cokernel(f, n).is_zero()) return false;
  return true;
}

// ---------------------------------------------------------------- minimization

Presentation minimize(const ChainComplex& c) {
  const Ring& R = c.ring();
  struct Step {
    Matrix P, L, rel;
    std::vector<std::string> labels;
  };
  std::map<int, Step> steps;
  for (int n : c.degrees()) {
    const std::size_t r = c.rank(n);
    Matrix rel = c.relations(n);
    Step st;
    if (rel.cols() == 0 || rel.is_zero()) {
      st.P = Matrix::identity(R, r);
      st.L = Matrix::identity(R, r);
      st.rel = Matrix(R, r, 0);
      st.labels = c.labels(n);
    } else {
      auto s = diagonalize(rel);
      std::vector<std::size_t> keep;
      std::vector<Scalar> torsion;
      for (std::size_t i = 0; i < r; ++i) {
        if (i < s.rank && R.is_unit(s.D(i, i))) continue;
        keep.push_back(i);
        if (i < s.rank) torsion.push_back(s.D(i, i));
      }
      st.P = s.U.select_rows(keep);
      st.L = s.U.inverse().select_columns(keep);
      st.rel = Matrix(R, keep.size(), torsion.size());
      for (std::size_t j = 0; j < torsion.size(); ++j) st.rel.set(j, j, torsion[j]);
      auto old = c.labels(n);
      for (std::size_t j = 0; j < keep.size(); ++j) {
        std::size_t hit = r, nnz = 0;
        for (std::size_t i = 0; i < r; ++i)
          if (sgn(st.L(i, j)) != 0) {
            ++nnz;
            hit = i;
          }
        bool basis = nnz == 1 && st.L(hit, j) == 1;
        st.labels.push_back(basis ? old[hit] : "g" + std::to_string(n) + "." + std::to_string(j));
      }
    }
    steps.emplace(n, std::move(st));
  }

  ChainComplex out(R);
  for (auto& [n, st] : steps)
    if (st.P.rows() > 0) out.set_rank(n, st.P.rows(), st.labels);
  for (auto& [n, st] : steps) {
    if (st.P.rows() == 0) continue;
    out.set_relations(n, st.rel);
    auto below = steps.find(n - 1);
    if (below != steps.end() && below->second.P.rows() > 0)
      out.set_differential(n, below->second.P * c.differential(n) * st.L);
  }

  ChainMap proj(c, out), lift(out, c);
  for (auto& [n, st] : steps) {
    if (st.P.rows() == 0) continue;
    proj.set_component(n, st.P);
    lift.set_component(n, st.L);
  }
  return Presentation{out, proj, lift};
}

// ---------------------------------------------------------------- tensor products

namespace {

struct Block {
  int p, q;
  std::size_t offset;
};

using BlockLayout = std::map<int, std::vector<Block>>;

BlockLayout tensor_layout(const ChainComplex& c, const ChainComplex& d) {
  BlockLayout lay;
  std::map<int, std::size_t> size;
  for (int p : c.degrees())
    for (int q : d.degrees()) {
      int n = p + q;
      lay[n].push_back(Block{p, q, size[n]});
      size[n] += c.rank(p) * d.rank(q);
    }
  return lay;
}

const Block* find_block(const BlockLayout& lay, int p, int q) {
  auto it = lay.find(p + q);
  if (it == lay.end()) return nullptr;
  for (const auto& b : it->second)
    if (b.p == p) return &b;
  return nullptr;
}

}  // namespace

ChainComplex tensor(const ChainComplex& c, const ChainComplex& d) {
  require_same_ring(c.ring(), d.ring(), "tensor");
  const Ring& R = c.ring();
  BlockLayout lay = tensor_layout(c, d);
  ChainComplex out(R);
  for (const auto& [n, blocks] : lay) {
    std::vector<std::string> labels;
    for (const auto& b : blocks) {
      auto lc = c.labels(b.p), ld = d.labels(b.q);
      for (const auto& x : lc)
        for (const auto& y : ld) labels.push_back(x + "⊗" + y);
    }
    out.set_rank(n, labels.size(), labels);
  }
  for (const auto& [n, blocks] : lay) {
    const std::size_t rn = out.rank(n);
    if (out.rank(n - 1) > 0) {
      Matrix D(R, out.rank(n - 1), rn);
      for (const auto& b : blocks) {
        if (const Block* t = find_block(lay, b.p - 1, b.q))
          paste(D, t->offset, b.offset, Matrix::kronecker(c.differential(b.p), Matrix::identity(R, d.rank(b.q))));
        if (const Block* t = find_block(lay, b.p, b.q - 1)) {
          Matrix k = Matrix::kronecker(Matrix::identity(R, c.rank(b.p)), d.differential(b.q));
          paste(D, t->offset, b.offset, (b.p % 2 == 0) ? k : -k);
        }
      }
      out.set_differential(n, D);
    }
    std::vector<Matrix> rels;
    for (const auto& b : blocks) {
      Matrix rc = c.relations(b.p), rd = d.relations(b.q);
      if (rc.cols() > 0 && !rc.is_zero()) {
        Matrix k = Matrix::kronecker(rc, Matrix::identity(R, d.rank(b.q)));
        Matrix col(R, rn, k.cols());
        paste(col, b.offset, 0, k);
        rels.push_back(col);
      }
      if (rd.cols() > 0 && !rd.is_zero()) {
        Matrix k = Matrix::kronecker(Matrix::identity(R, c.rank(b.p)), rd);
        Matrix col(R, rn, k.cols());
        paste(col, b.offset, 0, k);
        rels.push_back(col);
      }
    }
    if (!rels.empty()) out.set_relations(n, hcat(R, rn, rels));
  }
  return out;
}

ChainMap tensor(const ChainMap& f, const ChainMap& g) {
  require_same_ring(f.ring(), g.ring(), "tensor");
  const Ring& R = f.ring();
  ChainComplex S = tensor(f.source(), g.source());
  ChainComplex T = tensor(f.target(), g.target());
  BlockLayout ls = tensor_layout(f.source(), g.source());
  BlockLayout lt = tensor_layout(f.target(), g.target());
  ChainMap out(S, T);
  for (const auto& [n, blocks] : ls) {
    if (T.rank(n) == 0) continue;
    Matrix M(R, T.rank(n), S.rank(n));
    for (const auto& b : blocks)
      if (const Block* t = find_block(lt, b.p, b.q))
        paste(M, t->offset, b.offset, Matrix::kronecker(f.component(b.p), g.component(b.q)));
    out.set_component(n, M);
  }
  return out;
}

ChainComplex tensor_power(const ChainComplex& c, std::size_t t) {
  if (t == 0) return ChainComplex::unit(c.ring());
  ChainComplex out = c;
  for (std::size_t i = 1; i < t; ++i) out = tensor(out, c);
  return out;
}

namespace {

// Offset of the (p, q) block inside degree p + q of tensor(c, d).
std::size_t block_offset(const ChainComplex& c, const ChainComplex& d, int p, int q) {
  std::size_t off = 0;
  for (int p2 : c.degrees()) {
    if (p2 >= p) break;
    off += c.rank(p2) * d.rank(p + q - p2);
  }
  return off;
}

}  // namespace

TensorBasis::TensorBasis(const Ring& ring, std::vector<ChainComplex> factors) : factors_(std::move(factors)) {
  partial_.push_back(ChainComplex::unit(ring));
  for (std::size_t k = 0; k < factors_.size(); ++k)
    partial_.push_back(k == 0 ? factors_[0] : tensor(partial_.back(), factors_[k]));
}

std::size_t TensorBasis::index(const std::vector<std::size_t>& flat) const {
  if (flat.size() != factors_.size()) throw ShapeMismatch("TensorBasis::index: wrong number of factors");
  if (flat.empty()) return 0;
  std::size_t cur = flat[0];
  for (std::size_t k = 1; k < flat.size(); ++k) {
    const ChainComplex& left = partial_[k];
    const ChainComplex& right = factors_[k];
    auto [p, i] = left.unflatten(cur);
    auto [q, j] = right.unflatten(flat[k]);
    cur = partial_[k + 1].flat_offset(p + q) + block_offset(left, right, p, q) + i * right.rank(q) + j;
  }
  return cur;
}

std::vector<std::size_t> TensorBasis::decompose(std::size_t flat) const {
  std::vector<std::size_t> out(factors_.size());
  if (factors_.empty()) return out;
  std::size_t cur = flat;
  for (std::size_t k = factors_.size() - 1; k >= 1; --k) {
    const ChainComplex& left = partial_[k];
    const ChainComplex& right = factors_[k];
    auto [n, idx] = partial_[k + 1].unflatten(cur);
    std::size_t off = 0;
    bool found = false;
    for (int p : left.degrees()) {
      std::size_t size = left.rank(p) * right.rank(n - p);
      if (idx < off + size) {
        std::size_t local = idx - off, rq = right.rank(n - p);
        out[k] = right.flat_offset(n - p) + local % rq;
        cur = left.flat_offset(p) + local / rq;
        found = true;
        break;
      }
      off += size;
    }
    if (!found) throw ShapeMismatch("TensorBasis::decompose: index out of range");
  }
  out[0] = cur;
  return out;
}

// ---------------------------------------------------------------- direct sums

DirectSum direct_sum(const std::vector<ChainComplex>& summands, const Ring& ring) {
  for (const auto& s : summands) require_same_ring(ring, s.ring(), "direct_sum");
  std::set<int> degs;
  for (const auto& s : summands)
    for (int n : s.degrees()) degs.insert(n);

  ChainComplex out(ring);
  std::map<int, std::vector<std::size_t>> offsets;
  for (int n : degs) {
    std::vector<std::string> labels;
    std::size_t off = 0;
    for (const auto& s : summands) {
      offsets[n].push_back(off);
      off += s.rank(n);
      for (auto& l : s.labels(n)) labels.push_back(l);
    }
    out.set_rank(n, off, labels);
  }
  for (int n : degs) {
    if (out.rank(n - 1) > 0) {
      Matrix D(ring, out.rank(n - 1), out.rank(n));
      for (std::size_t k = 0; k < summands.size(); ++k)
        paste(D, offsets[n - 1][k], offsets[n][k], summands[k].differential(n));
      out.set_differential(n, D);
    }
    std::vector<Matrix> rels;
    for (std::size_t k = 0; k < summands.size(); ++k) {
      Matrix r = summands[k].relations(n);
      if (r.cols() == 0 || r.is_zero()) continue;
      Matrix col(ring, out.rank(n), r.cols());
      paste(col, offsets[n][k], 0, r);
      rels.push_back(col);
    }
    if (!rels.empty()) out.set_relations(n, hcat(ring, out.rank(n), rels));
  }

  DirectSum ds{out, {}, {}};
  for (std::size_t k = 0; k < summands.size(); ++k) {
    ChainMap inj(summands[k], out), pr(out, summands[k]);
    for (int n : summands[k].degrees()) {
      Matrix i(ring, out.rank(n), summands[k].rank(n));
      paste(i, offsets[n][k], 0, Matrix::identity(ring, summands[k].rank(n)));
      inj.set_component(n, i);
      pr.set_component(n, i.transpose());
    }
    ds.injections.push_back(inj);
    ds.projections.push_back(pr);
  }
  return ds;
}

// ---------------------------------------------------------------- colimits

PushoutResult pushout(const ChainMap& f, const ChainMap& g) {
  require_same_ring(f.ring(), g.ring(), "pushout");
  if (!same_ranks(f.source(), g.source())) throw NotParallel("pushout: maps have different sources");
  const Ring& R = f.ring();
  DirectSum ds = direct_sum({f.target(), g.target()}, R);
  ChainComplex carrier = ds.complex;
  for (int n : carrier.degrees()) {
    Matrix glue = Matrix::vstack(f.component(n), -g.component(n));
    if (glue.cols() == 0 || glue.is_zero()) continue;
    carrier.set_relations(n, Matrix::hstack(carrier.relations(n), glue));
  }
  Presentation pres = minimize(carrier);
  // Injections retargeted at the glued carrier so that the projection composes.
  auto retarget = [&](const ChainMap& inj) {
    ChainMap m(inj.source(), carrier);
    for (int n : inj.source().degrees()) m.set_component(n, inj.component(n));
    return m;
  };
  return PushoutResult{pres.complex, pres.projection.after(retarget(ds.injections[0])),
                       pres.projection.after(retarget(ds.injections[1])), pres.lift};
}

ChainMap pushout_induced(const PushoutResult& p, const ChainMap& h_a, const ChainMap& h_y) {
  if (!same_ranks(h_a.target(), h_y.target())) throw NotParallel("pushout_induced: cocone legs disagree on target");
  const ChainComplex& W = h_a.target();
  ChainMap out(p.object, W);
  for (int n : p.object.degrees()) {
    if (W.rank(n) == 0) continue;
    Matrix carrier_map = hcat(h_a.ring(), W.rank(n), {h_a.component(n), h_y.component(n)});
    out.set_component(n, carrier_map * p.lift.component(n));
  }
  return out;
}

CoequalizerResult quotient_by_images(const ChainComplex& y, const std::vector<ChainMap>& maps) {
  ChainComplex carrier = y;
  for (int n : y.degrees()) {
    std::vector<Matrix> cols{y.relations(n)};
    for (const auto& m : maps) {
      if (!same_ranks(m.target(), y)) throw NotParallel("quotient_by_images: map does not land in the complex");
      Matrix c = m.component(n);
      if (c.cols() > 0 && !c.is_zero()) cols.push_back(c);
    }
    if (cols.size() > 1) carrier.set_relations(n, hcat(y.ring(), y.rank(n), cols));
  }
  Presentation pres = minimize(carrier);
  ChainMap proj(y, pres.complex);
  for (int n : y.degrees())
    if (pres.complex.rank(n) > 0) proj.set_component(n, pres.projection.component(n));
  return CoequalizerResult{pres.complex, proj, pres.lift};
}

CoequalizerResult coequalizer(const ChainMap& f, const ChainMap& g, const std::optional<ChainMap>& section) {
  require_same_ring(f.ring(), g.ring(), "coequalizer");
  if (!same_ranks(f.source(), g.source()) || !same_ranks(f.target(), g.target()))
    throw NotParallel("coequalizer: maps are not parallel");
  if (section) {
    ChainMap id = ChainMap::identity(f.target());
    if (!same_ranks(section->source(), f.target()) || !same_ranks(section->target(), f.source()))
      throw BadSection("section has the wrong shape");
    if (!maps_equal(f.after(*section), id) || !maps_equal(g.after(*section), id))
      throw BadSection("f∘s or g∘s is not the identity");
  }
  return quotient_by_images(f.target(), {f - g});
}

SequentialColimit sequential_colimit(const std::vector<ChainMap>& maps, std::size_t window) {
  if (maps.empty()) throw Error("sequential_colimit: empty sequence");
  for (std::size_t i = 0; i + 1 < maps.size(); ++i)
    if (!same_ranks(maps[i].target(), maps[i + 1].source()))
      throw NotAChainMap("sequential_colimit: stage " + std::to_string(i) + " is not composable");
  SequentialColimit out;
  out.colimit = maps.back().target();
  std::size_t k = maps.size();
  while (k > 0 && is_isomorphism(maps[k - 1])) --k;
  out.stable_from = k;
  out.stabilized = maps.size() - k >= window;
  return out;
}

// ---------------------------------------------------------------- cubes

const ChainMap& ComplexCube::edge(unsigned vertex, int direction) const {
  auto it = edges.find({vertex, direction});
  if (it == edges.end())
    throw Error("cube: missing edge at vertex " + std::to_string(vertex) + " direction " + std::to_string(direction));
  return it->second;
}

ChainMap ComplexCube::path(unsigned from, unsigned to) const {
  if ((from & ~to) != 0) throw Error("cube: no path between incomparable vertices");
  ChainMap out = ChainMap::identity(vertices.at(from));
  unsigned cur = from;
  for (int i = 0; i < dimension; ++i) {
    unsigned bit = 1u << i;
    if ((to & bit) && !(cur & bit)) {
      out = edge(cur, i).after(out);
      cur |= bit;
    }
  }
  return out;
}

void validate(const ComplexCube& cube) {
  const unsigned size = 1u << cube.dimension;
  if (cube.vertices.size() != size) throw Error("cube: wrong number of vertices");
  for (unsigned v = 0; v < size; ++v)
    for (int i = 0; i < cube.dimension; ++i) {
      unsigned bi = 1u << i;
      if (v & bi) continue;
      const ChainMap& e = cube.edge(v, i);
      if (!same_ranks(e.source(), cube.vertices[v]) || !same_ranks(e.target(), cube.vertices[v | bi]))
        throw Error("cube: edge endpoints do not match vertices");
      for (int j = i + 1; j < cube.dimension; ++j) {
        unsigned bj = 1u << j;
        if (v & bj) continue;
        ChainMap a = cube.edge(v | bi, j).after(e);
        ChainMap b = cube.edge(v | bj, i).after(cube.edge(v, j));
        if (!maps_equal(a, b)) throw Error("cube: square does not commute");
      }
    }
}

ComplexCube tensor_cube(const std::vector<ChainMap>& maps) {
  if (maps.empty()) throw Error("tensor_cube: no maps");
  const int t = static_cast<int>(maps.size());
  ComplexCube cube;
  cube.dimension = t;
  auto factor = [&](int i, bool one) { return one ? maps[i].target() : maps[i].source(); };
  for (unsigned v = 0; v < (1u << t); ++v) {
    ChainComplex c = factor(0, v & 1u);
    for (int i = 1; i < t; ++i) c = tensor(c, factor(i, v & (1u << i)));
    cube.vertices.push_back(c);
  }
  for (unsigned v = 0; v < (1u << t); ++v)
    for (int i = 0; i < t; ++i) {
      if (v & (1u << i)) continue;
      auto piece = [&](int j) { return j == i ? maps[j] : ChainMap::identity(factor(j, v & (1u << j))); };
      ChainMap e = piece(0);
      for (int j = 1; j < t; ++j) e = tensor(e, piece(j));
      // Rebind endpoints to the stored vertices.
      ChainMap bound(cube.vertices[v], cube.vertices[v | (1u << i)]);
      for (int n : cube.vertices[v].degrees())
        if (cube.vertices[v | (1u << i)].rank(n) > 0) bound.set_component(n, e.component(n));
      cube.edges.emplace(std::make_pair(v, i), bound);
    }
  return cube;
}

LatchingMap cube_latching_map(const ComplexCube& cube) {
  const unsigned full = (1u << cube.dimension) - 1;
  const ChainComplex& top = cube.vertices.at(full);
  const Ring& R = top.ring();
  std::vector<ChainComplex> punctured(cube.vertices.begin(), cube.vertices.begin() + full);
  DirectSum ds = direct_sum(punctured, R);
  ChainComplex carrier = ds.complex;

  for (int n : carrier.degrees()) {
    std::vector<Matrix> cols{carrier.relations(n)};
    for (unsigned v = 0; v < full; ++v)
      for (int i = 0; i < cube.dimension; ++i) {
        unsigned w = v | (1u << i);
        if (w == v || w == full) continue;
        if (cube.vertices[v].rank(n) == 0) continue;
        Matrix glue = ds.injections[w].component(n) * cube.edge(v, i).component(n) - ds.injections[v].component(n);
        if (!glue.is_zero()) cols.push_back(glue);
      }
    if (cols.size() > 1) carrier.set_relations(n, hcat(R, carrier.rank(n), cols));
  }
  Presentation pres = minimize(carrier);

  ChainMap to_top(pres.complex, top);
  for (int n : pres.complex.degrees()) {
    if (top.rank(n) == 0) continue;
    std::vector<Matrix> blocks;
    for (unsigned v = 0; v < full; ++v) blocks.push_back(cube.path(v, full).component(n));
    to_top.set_component(n, hcat(R, top.rank(n), blocks) * pres.lift.component(n));
  }
  return LatchingMap{to_top, pres.lift};
}

ChainMap pushout_product(const ChainMap& f, const ChainMap& g) {
  const ChainComplex &A = f.source(), &B = f.target(), &C = g.source(), &D = g.target();
  ChainMap left = tensor(ChainMap::identity(A), g);   // A⊗C -> A⊗D
  ChainMap right = tensor(f, ChainMap::identity(C));  // A⊗C -> B⊗C
  PushoutResult p = pushout(left, right);
  ChainMap to_ad = tensor(f, ChainMap::identity(D));  // A⊗D -> B⊗D
  ChainMap to_bc = tensor(ChainMap::identity(B), g);  // B⊗C -> B⊗D
  return pushout_induced(p, to_ad, to_bc);
}

ChainMap pushout_product_power(const ChainMap& f, std::size_t t) {
  if (t == 0) throw Error("pushout_product_power: t must be positive");
  ChainMap out = f;
  for (std::size_t i = 1; i < t; ++i) out = pushout_product(out, f);
  return out;
}

// ---------------------------------------------------------------- quasi-isomorphisms

QuasiIsoReport is_quasi_iso(const ChainMap& f) {
  QuasiIsoReport rep;
  const ChainComplex& S = f.source();
  const ChainComplex& T = f.target();
  for (int n : degree_union(S, T)) {
    QuasiIsoDegree d;
    d.source_homology = homology(S, n);
    d.target_homology = homology(T, n);
    Matrix ZS = S.rank(n) ? cycles(S, n) : Matrix(f.ring(), 0, 0);
    if (S.rank(n) == 0) {
      d.kernel = FgModule{f.ring(), 0, {}};
    } else {
      Matrix image = f.component(n) * ZS;
      Matrix coeff = preimage_generators(image, boundaries(T, n));
      d.kernel = subquotient(ZS * coeff, boundaries(S, n));
    }
    if (T.rank(n) == 0) {
      d.cokernel = FgModule{f.ring(), 0, {}};
    } else {
      Matrix hit = S.rank(n) ? f.component(n) * ZS : Matrix(f.ring(), T.rank(n), 0);
      d.cokernel = subquotient(cycles(T, n), Matrix::hstack(boundaries(T, n), hit));
    }
    if (!d.kernel.is_zero() || !d.cokernel.is_zero()) rep.quasi_isomorphism = false;
    if (d.source_homology.is_zero() && d.target_homology.is_zero() && d.kernel.is_zero() && d.cokernel.is_zero())
      continue;
    rep.degrees[n] = d;
  }
  return rep;
}

}  // namespace paperlab
