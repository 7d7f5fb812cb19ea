#include "paperlab/algebras.hpp"

#include <algorithm>
#include <functional>

namespace paperlab {

namespace {

SparseVec negated(const SparseVec& v) {
  SparseVec out;
  sparse_axpy(out, Scalar(-1), v);
  return out;
}

SparseVec linear(const std::vector<SparseVec>& images, const SparseVec& x) {
  SparseVec out;
  for (const auto& [k, c] : x) sparse_axpy(out, c, images.at(k));
  return out;
}

// Calls f on every tuple in {0..base-1}^len.
void for_each_tuple(std::size_t base, std::size_t len, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> t(len, 0);
  if (len > 0 && base == 0) return;
  while (true) {
    f(t);
    std::size_t k = len;
    while (k > 0) {
      if (++t[k - 1] < base) break;
      t[k - 1] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

std::string tuple_str(const std::vector<std::size_t>& t) {
  std::string s = "[";
  for (std::size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
  return s + "]";
}

[[noreturn]] void violation(const std::string& law, const std::string& witness, const SparseVec& lhs,
                            const SparseVec& rhs) {
  throw AxiomViolation(law + " fails at " + witness + ": " + sparse_show(lhs) + " != " + sparse_show(rhs));
}

int tuple_degree(const OAlgebra& a, const std::vector<std::size_t>& args, std::size_t upto) {
  int d = 0;
  for (std::size_t k = 0; k < upto; ++k) d += a.degree(args[k]);
  return d;
}

}  // namespace

OAlgebra::OAlgebra(OperadPtr operad, ChainComplex carrier, Action action, std::string name)
    : operad_(std::move(operad)), carrier_(std::move(carrier)), action_(std::move(action)), name_(std::move(name)) {
  if (!(carrier_.ring() == operad_->ring())) throw RingMismatch("algebra carrier and operad use different rings");
  if (!carrier_.is_free()) throw Error("algebra carriers must be free complexes");
  for (int n : carrier_.degrees()) {
    auto labels = carrier_.labels(n);
    for (std::size_t i = 0; i < carrier_.rank(n); ++i) {
      degrees_.push_back(n);
      labels_.push_back(labels[i]);
    }
  }
  for (std::size_t i = 0; i < degrees_.size(); ++i) d_.push_back(flat_differential(carrier_, i));
}

SparseVec OAlgebra::differential(std::size_t basis) const { return d_.at(basis); }

SparseVec OAlgebra::act(std::size_t n, std::size_t op, const std::vector<std::size_t>& args) const {
  std::vector<std::size_t> key{n, op};
  key.insert(key.end(), args.begin(), args.end());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  SparseVec v = sparse_normalize(ring(), action_(n, op, args));
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(key, std::move(v)).first->second;
}

SparseVec OAlgebra::act(std::size_t n, const SparseVec& op, const std::vector<SparseVec>& args) const {
  SparseVec out;
  std::vector<std::size_t> idx(n);
  std::function<void(std::size_t, Scalar)> rec = [&](std::size_t k, Scalar c) {
    if (k == n) {
      for (const auto& [o, co] : op) sparse_axpy(out, c * co, act(n, o, idx));
      return;
    }
    for (const auto& [b, cb] : args[k]) {
      idx[k] = b;
      rec(k + 1, c * cb);
    }
  };
  rec(0, Scalar(1));
  return sparse_normalize(ring(), out);
}

ChainMap OAlgebra::structure_map(std::size_t n) const {
  std::vector<ChainComplex> factors{operad_->component(n)};
  for (std::size_t k = 0; k < n; ++k) factors.push_back(carrier_);
  TensorBasis tb(ring(), factors);
  const ChainComplex& S = tb.complex();
  ChainMap f(S, carrier_);
  for (int m : S.degrees()) {
    if (carrier_.rank(m) == 0) continue;
    Matrix M(ring(), carrier_.rank(m), S.rank(m));
    const std::size_t base = S.flat_offset(m), tbase = carrier_.flat_offset(m);
    for (std::size_t j = 0; j < S.rank(m); ++j) {
      auto parts = tb.decompose(base + j);
      std::vector<std::size_t> args(parts.begin() + 1, parts.end());
      for (const auto& [k, c] : act(n, parts[0], args)) M.add_to(k - tbase, j, c);
    }
    f.set_component(m, M);
  }
  return f;
}

// ---------------------------------------------------------------- constructors

AlgebraPtr associative_algebra(OperadPtr operad, ChainComplex carrier, ProductTable products,
                               std::optional<SparseVec> unit, std::string name) {
  const std::string kind = operad->name();
  if (kind != "uass" && kind != "ass" && kind != "a3zero")
    throw Error("associative_algebra: unsupported operad " + kind);
  if (kind == "uass" && !unit) throw Error("associative_algebra: uass needs a unit element");
  const std::size_t dim = carrier.total_rank();
  if (products.size() != dim) throw Error("associative_algebra: product table has wrong size");
  const Ring ring = operad->ring();
  auto mul = [products, ring](const SparseVec& x, const SparseVec& y) {
    SparseVec out;
    for (const auto& [i, a] : x)
      for (const auto& [j, b] : y) sparse_axpy(out, a * b, products.at(i).at(j));
    return sparse_normalize(ring, out);
  };
  OAlgebra::Action act = [kind, mul, unit](std::size_t n, std::size_t, const std::vector<std::size_t>& args) {
    if (n == 0) return kind == "uass" ? *unit : SparseVec{};
    if (kind == "a3zero" && n > 2) return SparseVec{};
    SparseVec cur = sparse_unit(args[0]);
    for (std::size_t k = 1; k < n; ++k) cur = mul(cur, sparse_unit(args[k]));
    return cur;
  };
  return std::make_shared<OAlgebra>(operad, std::move(carrier), act, std::move(name));
}

AlgebraPtr module_algebra(OperadPtr operad, ChainComplex carrier, ProductTable action, std::string name) {
  if (operad->max_arity() != std::optional<std::size_t>(1) || operad->dim(0) != 0)
    throw Error("module_algebra: the operad must be concentrated in arity 1");
  if (action.size() != operad->dim(1)) throw Error("module_algebra: action table has wrong size");
  OAlgebra::Action act = [action](std::size_t n, std::size_t op, const std::vector<std::size_t>& args) {
    if (n != 1) return SparseVec{};
    return action.at(op).at(args[0]);
  };
  return std::make_shared<OAlgebra>(operad, std::move(carrier), act, std::move(name));
}

AlgebraPtr initial_algebra(OperadPtr operad) {
  const Operad* o = operad.get();
  OAlgebra::Action act = [o](std::size_t n, std::size_t op, const std::vector<std::size_t>& args) {
    SparseVec cur = sparse_unit(op);
    std::size_t arity = n;
    for (std::size_t k = 0; k < n; ++k, --arity) cur = o->compose(arity, cur, 1, 0, sparse_unit(args[k]));
    return cur;
  };
  return std::make_shared<OAlgebra>(operad, operad->component(0), act, "initial");
}

AlgebraPtr zero_algebra(OperadPtr operad) {
  Ring r = operad->ring();
  return std::make_shared<OAlgebra>(
      operad, ChainComplex(r), [](std::size_t, std::size_t, const std::vector<std::size_t>&) { return SparseVec{}; },
      "zero");
}

AlgebraPtr truncated_polynomial_algebra(Ring ring, std::size_t m, int x_degree) {
  if (m == 0) return zero_algebra(builtin_uass(ring));
  ChainComplex c(ring);
  std::map<int, std::vector<std::string>> labels;
  for (std::size_t i = 0; i < m; ++i) labels[static_cast<int>(i) * x_degree].push_back(i == 0 ? "1" : i == 1 ? "x" : "x^" + std::to_string(i));
  for (auto& [d, l] : labels) c.set_rank(d, l.size(), l);
  // Flat index of x^i: degrees ascending; when x has degree 0 all powers share degree 0.
  std::vector<std::size_t> flat(m);
  {
    std::vector<std::pair<int, std::size_t>> order;
    for (std::size_t i = 0; i < m; ++i) order.emplace_back(static_cast<int>(i) * x_degree, i);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < m; ++k) flat[order[k].second] = k;
  }
  std::vector<std::size_t> power(m);
  for (std::size_t i = 0; i < m; ++i) power[flat[i]] = i;
  ProductTable t(m, std::vector<SparseVec>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (power[a] + power[b] < m) t[a][b] = sparse_unit(flat[power[a] + power[b]]);
  std::string name = "k[x]/x^" + std::to_string(m);
  return associative_algebra(builtin_uass(ring), c, t, sparse_unit(flat[0]), name);
}

AlgebraPtr a3zero_torsion_example(Ring ring) {
  ChainComplex c = ChainComplex::concentrated(ring, 0, 2, {"x", "y"});
  ProductTable t(2, std::vector<SparseVec>(2));
  t[0][0] = {{1, Scalar(2)}};
  return associative_algebra(builtin_a3zero(ring), c, t, {}, "x^2=2y");
}

AlgebraPtr a3zero_dg_example(Ring ring) {
  ChainComplex c(ring);
  c.set_rank(0, 2, {"y", "y2"});
  c.set_rank(1, 1, {"z"});
  c.set_differential(1, Matrix(ring, 2, 1, {{0}, {1}}));
  ProductTable t(3, std::vector<SparseVec>(3));
  t[0][0] = sparse_unit(1);
  return associative_algebra(builtin_a3zero(ring), c, t, {}, "dz=y^2");
}

AlgebraPtr a3zero_square_zero(Ring ring) {
  ChainComplex c = ChainComplex::concentrated(ring, 0, 1, {"x"});
  return associative_algebra(builtin_a3zero(ring), c, ProductTable(1, std::vector<SparseVec>(1)), {}, "x^2=0");
}

// ---------------------------------------------------------------- checks

void check_algebra_axioms(const OAlgebra& a, std::size_t arity_bound) {
  const Operad& o = *a.operad();
  const Ring& R = a.ring();
  try {
    validate(a.carrier());
  } catch (const NotAComplex& e) {
    throw AxiomViolation(std::string("carrier is not a complex: ") + e.what());
  }
  const std::size_t dim = a.dim();
  std::vector<SparseVec> dA(dim);
  for (std::size_t i = 0; i < dim; ++i) dA[i] = a.differential(i);

  for (std::size_t n = 0; n <= arity_bound; ++n)
    for (std::size_t op = 0; op < o.dim(n); ++op) {
      const int dop = o.degree(n, op);
      for_each_tuple(dim, n, [&](const std::vector<std::size_t>& args) {
        SparseVec lhs = linear(dA, a.act(n, op, args));
        std::vector<SparseVec> vargs;
        for (auto x : args) vargs.push_back(sparse_unit(x));
        SparseVec rhs = a.act(n, o.differential(n, op), vargs);
        for (std::size_t k = 0; k < n; ++k) {
          auto v = vargs;
          v[k] = dA[args[k]];
          const int s = dop + tuple_degree(a, args, k);
          sparse_axpy(rhs, s % 2 ? Scalar(-1) : Scalar(1), a.act(n, sparse_unit(op), v));
        }
        rhs = sparse_normalize(R, rhs);
        lhs = sparse_normalize(R, lhs);
        if (lhs != rhs)
          violation("chain-map condition", "(n=" + std::to_string(n) + ", op=" + std::to_string(op) + ", args=" + tuple_str(args) + ")",
                    lhs, rhs);
      });
    }

  const SparseVec u = o.unit();
  for (std::size_t x = 0; x < dim; ++x) {
    SparseVec got = a.act(1, u, {sparse_unit(x)});
    if (got != sparse_unit(x)) violation("unit law", "(x=" + std::to_string(x) + ")", got, sparse_unit(x));
  }

  for (std::size_t p = 1; p <= arity_bound + 1; ++p)
    for (std::size_t q = 0; p + q <= arity_bound + 1; ++q)
      for (std::size_t ea = 0; ea < o.dim(p); ++ea)
        for (std::size_t eb = 0; eb < o.dim(q); ++eb)
          for (std::size_t i = 1; i <= p; ++i) {
            SparseVec comp = o.compose(p, ea, i, q, eb);
            const int db = o.degree(q, eb);
            for_each_tuple(dim, p + q - 1, [&](const std::vector<std::size_t>& args) {
              std::vector<SparseVec> all;
              for (auto x : args) all.push_back(sparse_unit(x));
              SparseVec lhs = a.act(p + q - 1, comp, all);
              std::vector<SparseVec> inner(all.begin() + (i - 1), all.begin() + (i - 1 + q));
              std::vector<SparseVec> outer(all.begin(), all.begin() + (i - 1));
              outer.push_back(a.act(q, sparse_unit(eb), inner));
              outer.insert(outer.end(), all.begin() + (i - 1 + q), all.end());
              SparseVec rhs = a.act(p, sparse_unit(ea), outer);
              if ((db * tuple_degree(a, args, i - 1)) % 2) rhs = negated(rhs);
              if (lhs != rhs)
                violation("associativity",
                          "(p=" + std::to_string(p) + ", q=" + std::to_string(q) + ", i=" + std::to_string(i) +
                              ", a=" + std::to_string(ea) + ", b=" + std::to_string(eb) + ", args=" + tuple_str(args) + ")",
                          lhs, rhs);
            });
          }
}

SparseVec AlgebraMorphism::apply(std::size_t basis) const {
  const ChainComplex& S = map.source();
  const ChainComplex& T = map.target();
  auto [n, local] = S.unflatten(basis);
  SparseVec out;
  if (T.rank(n) == 0) return out;
  Matrix m = map.component(n);
  const std::size_t base = T.flat_offset(n);
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (sgn(m(r, local)) != 0) out.emplace_back(base + r, m(r, local));
  return out;
}

SparseVec AlgebraMorphism::apply(const SparseVec& x) const {
  SparseVec out;
  for (const auto& [k, c] : x) sparse_axpy(out, c, apply(k));
  return sparse_normalize(map.ring(), out);
}

void check_algebra_morphism(const AlgebraMorphism& f, std::size_t arity_bound) {
  try {
    validate(f.map);
  } catch (const NotAChainMap& e) {
    throw AxiomViolation(std::string("not a chain map: ") + e.what());
  }
  const OAlgebra& A = *f.source;
  const OAlgebra& B = *f.target;
  const Operad& o = *A.operad();
  for (std::size_t n = 0; n <= arity_bound; ++n)
    for (std::size_t op = 0; op < o.dim(n); ++op)
      for_each_tuple(A.dim(), n, [&](const std::vector<std::size_t>& args) {
        SparseVec lhs = f.apply(A.act(n, op, args));
        std::vector<SparseVec> images;
        for (auto x : args) images.push_back(f.apply(x));
        SparseVec rhs = B.act(n, sparse_unit(op), images);
        if (lhs != rhs)
          violation("compatibility with structure maps",
                    "(n=" + std::to_string(n) + ", op=" + std::to_string(op) + ", args=" + tuple_str(args) + ")", lhs, rhs);
      });
}

// ---------------------------------------------------------------- free algebras

FreeAlgebra free_algebra(OperadPtr operad, const ChainComplex& x, std::size_t arity_bound) {
  if (!x.is_free()) throw Error("free_algebra: generators must form a free complex");
  const Ring ring = operad->ring();
  const Operad& o = *operad;
  const std::size_t xdim = x.total_rank();
  std::vector<int> xdeg(xdim);
  std::vector<std::string> xlab;
  for (int n : x.degrees())
    for (const auto& l : x.labels(n)) xlab.push_back(l);
  for (std::size_t i = 0; i < xdim; ++i) xdeg[i] = x.unflatten(i).first;

  struct Entry {
    int degree;
    FreeWord word;
  };
  std::vector<Entry> entries;
  for (std::size_t n = 0; n <= arity_bound; ++n)
    for (std::size_t op = 0; op < o.dim(n); ++op)
      for_each_tuple(xdim, n, [&](const std::vector<std::size_t>& letters) {
        int d = o.degree(n, op);
        for (auto l : letters) d += xdeg[l];
        entries.push_back(Entry{d, FreeWord{n, op, letters}});
      });
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.degree < b.degree; });

  auto key_of = [](const FreeWord& w) {
    std::vector<std::size_t> k{w.arity, w.op};
    k.insert(k.end(), w.letters.begin(), w.letters.end());
    return k;
  };
  auto index = std::make_shared<std::map<std::vector<std::size_t>, std::size_t>>();
  std::vector<FreeWord> words;
  std::map<int, std::vector<std::string>> labels;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const FreeWord& w = entries[k].word;
    (*index)[key_of(w)] = k;
    words.push_back(w);
    std::string l = o.label(w.arity, w.op) + "(";
    for (std::size_t j = 0; j < w.letters.size(); ++j) l += (j ? "," : "") + xlab[w.letters[j]];
    labels[entries[k].degree].push_back(l + ")");
  }

  ChainComplex carrier(ring);
  for (auto& [d, l] : labels) carrier.set_rank(d, l.size(), l);
  // Differential by the Leibniz rule.
  std::vector<SparseVec> dx(xdim);
  for (std::size_t i = 0; i < xdim; ++i) dx[i] = flat_differential(x, i);
  for (int d : carrier.degrees()) {
    if (carrier.rank(d - 1) == 0) continue;
    Matrix D(ring, carrier.rank(d - 1), carrier.rank(d));
    const std::size_t base = carrier.flat_offset(d), tbase = carrier.flat_offset(d - 1);
    for (std::size_t j = 0; j < carrier.rank(d); ++j) {
      const FreeWord& w = words[base + j];
      SparseVec out;
      for (const auto& [op2, c] : o.differential(w.arity, w.op)) {
        FreeWord v{w.arity, op2, w.letters};
        sparse_axpy(out, c, sparse_unit(index->at(key_of(v))));
      }
      int sign = o.degree(w.arity, w.op);
      for (std::size_t k = 0; k < w.letters.size(); ++k) {
        for (const auto& [l2, c] : dx[w.letters[k]]) {
          FreeWord v = w;
          v.letters[k] = l2;
          sparse_axpy(out, sign % 2 ? Scalar(-c) : c, sparse_unit(index->at(key_of(v))));
        }
        sign += xdeg[w.letters[k]];
      }
      for (const auto& [k, c] : sparse_normalize(ring, out)) D.add_to(k - tbase, j, c);
    }
    carrier.set_differential(d, D);
  }

  auto shared_words = std::make_shared<std::vector<FreeWord>>(words);
  const Operad* op_ptr = operad.get();
  OAlgebra::Action act = [op_ptr, shared_words, index, xdeg, arity_bound, key_of](
                             std::size_t p, std::size_t op, const std::vector<std::size_t>& args) {
    const Operad& o = *op_ptr;
    std::size_t total = 0;
    for (auto a : args) total += (*shared_words)[a].arity;
    if (total > arity_bound) return SparseVec{};
    SparseVec cur = sparse_unit(op);
    std::size_t arity = p, pos = 1;
    int letters_deg = 0;
    bool negative = false;
    std::vector<std::size_t> letters;
    for (auto a : args) {
      const FreeWord& w = (*shared_words)[a];
      if ((o.degree(w.arity, w.op) * letters_deg) % 2) negative = !negative;
      cur = o.compose(arity, cur, pos, w.arity, sparse_unit(w.op));
      arity = arity + w.arity - 1;
      pos += w.arity;
      for (auto l : w.letters) letters_deg += xdeg[l];
      letters.insert(letters.end(), w.letters.begin(), w.letters.end());
    }
    SparseVec out;
    for (const auto& [op2, c] : cur) {
      FreeWord v{total, op2, letters};
      out.emplace_back(index->at(key_of(v)), negative ? Scalar(-c) : c);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  };
  auto alg = std::make_shared<OAlgebra>(operad, carrier, act, "free");
  alg->truncated = !operad->max_arity() || *operad->max_arity() > arity_bound;

  ChainMap unit_map(x, carrier);
  if (arity_bound >= 1) {
    for (int n : x.degrees()) {
      if (carrier.rank(n) == 0) continue;
      Matrix M(ring, carrier.rank(n), x.rank(n));
      for (std::size_t j = 0; j < x.rank(n); ++j)
        for (const auto& [u, c] : operad->unit()) {
          FreeWord v{1, u, {x.flat_offset(n) + j}};
          M.add_to(index->at(key_of(v)) - carrier.flat_offset(n), j, c);
        }
      unit_map.set_component(n, M);
    }
  }
  return FreeAlgebra{alg, words, unit_map};
}

}  // namespace paperlab

namespace paperlab {

AlgebraPtr free_operad_algebra(std::shared_ptr<const FreeOperad> operad, ChainComplex carrier, GeneratorAction action,
                               std::string name) {
  std::vector<int> deg;
  for (int d : carrier.degrees())
    for (std::size_t i = 0; i < carrier.rank(d); ++i) deg.push_back(d);
  const FreeOperad* o = operad.get();
  Ring ring = operad->ring();
  OAlgebra::Action act = [o, deg, action, ring](std::size_t n, std::size_t op, const std::vector<std::size_t>& args) {
    const LabeledTree& t = o->basis(n)[op];
    std::size_t leaf = 0, vertex = 0;
    struct Out {
      SparseVec value;
      int label_degree = 0;
      int arg_degree = 0;
    };
    std::function<Out(const PlanarTree&)> eval = [&](const PlanarTree& node) -> Out {
      if (node.is_leaf()) {
        std::size_t a = args[leaf++];
        return Out{sparse_unit(a), 0, deg[a]};
      }
      const std::size_t v = t.labels[vertex++];
      const ChainComplex& gen = o->generators().at(node.arity());
      Out out;
      out.label_degree = gen.unflatten(v).first;
      std::vector<Out> kids;
      int sign_exp = 0;
      for (const auto& child : node.children()) {
        kids.push_back(eval(child));
        sign_exp += kids.back().label_degree * out.arg_degree;
        out.label_degree += kids.back().label_degree;
        out.arg_degree += kids.back().arg_degree;
      }
      // Expand the multilinear generator action over the children's values.
      std::vector<std::pair<std::vector<std::size_t>, Scalar>> terms{{{}, Scalar(sign_exp % 2 ? -1 : 1)}};
      for (const auto& k : kids) {
        std::vector<std::pair<std::vector<std::size_t>, Scalar>> next;
        for (const auto& [w, c] : terms)
          for (const auto& [b, cb] : k.value) {
            auto w2 = w;
            w2.push_back(b);
            next.emplace_back(std::move(w2), c * cb);
          }
        terms = std::move(next);
      }
      for (const auto& [w, c] : terms) sparse_axpy(out.value, c, action(v, w));
      out.value = sparse_normalize(ring, out.value);
      return out;
    };
    return eval(t.shape).value;
  };
  return std::make_shared<OAlgebra>(std::move(operad), std::move(carrier), act, std::move(name));
}

}  // namespace paperlab
