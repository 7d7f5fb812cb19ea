#include "schema.hpp"

namespace paperlab::cli {

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw SchemaError(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

int degree_key(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    int d = std::stoi(key, &used);
    if (used == key.size()) return d;
  } catch (const std::exception&) {
  }
  throw SchemaError(path, "'" + key + "' is not a degree");
}

SparseVec parse_sparse(const json& j, const Ring& ring, std::size_t dim, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected a list of [index, coefficient] pairs");
  std::map<std::size_t, Scalar> acc;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw SchemaError(p, "expected [index, coefficient]");
    std::size_t k = count(j[i][0], p + "[0]");
    if (k >= dim) throw SchemaError(p + "[0]", "basis index " + std::to_string(k) + " out of range");
    acc[k] += parse_scalar_json(j[i][1], p + "[1]");
  }
  try {
    return sparse_normalized(ring, std::move(acc));
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

std::vector<std::size_t> index_list(const json& j, std::size_t dim, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected a list of basis indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::size_t k = count(j[i], path + "[" + std::to_string(i) + "]");
    if (k >= dim) throw SchemaError(path + "[" + std::to_string(i) + "]", "basis index out of range");
    out.push_back(k);
  }
  return out;
}

AlgebraPtr preset(const std::string& name, const OperadPtr& o, const Ring& ring, const std::string& path) {
  const std::string on = o->name();
  auto need = [&](const std::string& op) {
    if (on != op) throw SchemaError(path, "preset '" + name + "' needs operad '" + op + "', got '" + on + "'");
  };
  if (name == "zero") return zero_algebra(o);
  if (name == "initial") return initial_algebra(o);
  static const std::map<std::string, std::string> operad_of{
      {"ground", "uass"},          {"dual_numbers", "uass"}, {"torsion_example", "a3zero"},
      {"dg_example", "a3zero"},    {"square_zero", "a3zero"}};
  auto it = operad_of.find(name);
  if (it == operad_of.end()) throw SchemaError(path, "unknown preset '" + name + "'");
  need(it->second);
  if (name == "ground") return truncated_polynomial_algebra(ring, 1);
  if (name == "dual_numbers") return truncated_polynomial_algebra(ring, 2);
  if (name == "torsion_example") return a3zero_torsion_example(ring);
  if (name == "dg_example") return a3zero_dg_example(ring);
  return a3zero_square_zero(ring);
}

}  // namespace

Ring parse_ring(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a ring tag such as \"Z\", \"Q\" or \"F_5\"");
  try {
    return Ring::parse(j.get<std::string>());
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

Scalar parse_scalar_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Scalar(j.get<long>());
  if (j.is_string()) {
    try {
      return parse_scalar(j.get<std::string>());
    } catch (const std::exception& e) {
      throw SchemaError(path, e.what());
    }
  }
  throw SchemaError(path, "expected an integer or a rational string like \"1/2\"");
}

Matrix parse_matrix(const json& j, const Ring& ring, std::size_t rows, std::size_t cols, const std::string& path) {
  auto shape = [&](const std::string& got) {
    return "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " + got;
  };
  if (!j.is_array()) throw SchemaError(path, shape("a non-list"));
  if (j.size() != rows) throw SchemaError(path, shape(std::to_string(j.size()) + " rows"));
  Matrix m(ring, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError(rp, shape("a row of " + std::to_string(j[r].is_array() ? j[r].size() : 0) + " entries"));
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cp = rp + "[" + std::to_string(c) + "]";
      Scalar x = parse_scalar_json(j[r][c], cp);
      try {
        m.set(r, c, ring.normalize(x));
      } catch (const Error& e) {
        throw SchemaError(cp, e.what());
      }
    }
  }
  return m;
}

ChainComplex parse_complex(const json& j, const Ring& ring, const std::string& path) {
  const json& ranks = field(j, "ranks", path);
  if (!ranks.is_object()) throw SchemaError(path + ".ranks", "expected an object of degree: rank");
  ChainComplex c(ring);
  for (auto& [key, v] : ranks.items()) {
    const std::string p = path + ".ranks." + key;
    c.set_rank(degree_key(key, p), count(v, p));
  }
  if (j.contains("labels")) {
    for (auto& [key, v] : j["labels"].items()) {
      const std::string p = path + ".labels." + key;
      const int d = degree_key(key, p);
      if (!v.is_array() || v.size() != c.rank(d)) throw SchemaError(p, "expected one label per basis element");
      std::vector<std::string> ls;
      for (const auto& l : v) {
        if (!l.is_string()) throw SchemaError(p, "labels must be strings");
        ls.push_back(l.get<std::string>());
      }
      c.set_labels(d, ls);
    }
  }
  if (j.contains("differentials")) {
    for (auto& [key, v] : j["differentials"].items()) {
      const std::string p = path + ".differentials." + key;
      const int d = degree_key(key, p);
      c.set_differential(d, parse_matrix(v, ring, c.rank(d - 1), c.rank(d), p));
    }
  }
  try {
    validate(c);
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return c;
}

ChainMap parse_map(const json& j, const ChainComplex& source, const ChainComplex& target, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object of degree: matrix");
  ChainMap f(source, target);
  for (auto& [key, v] : j.items()) {
    const std::string p = path + "." + key;
    const int d = degree_key(key, p);
    f.set_component(d, parse_matrix(v, source.ring(), target.rank(d), source.rank(d), p));
  }
  try {
    validate(f);
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return f;
}

OperadPtr parse_operad(const json& j, const Ring& ring, const std::string& path) {
  if (j.is_string()) {
    try {
      return builtin_operad(j.get<std::string>(), ring);
    } catch (const Error& e) {
      throw SchemaError(path, e.what());
    }
  }
  if (j.is_object() && j.contains("arity1"))
    return builtin_arity1(ring, Monoid::truncated_polynomial(count(j["arity1"], path + ".arity1")));
  if (j.is_object() && j.contains("free")) {
    const json& gens = j["free"];
    if (!gens.is_object()) throw SchemaError(path + ".free", "expected an object of arity: complex");
    SequenceV v;
    for (auto& [key, c] : gens.items()) {
      const std::string p = path + ".free." + key;
      const int arity = degree_key(key, p);
      if (arity < 0) throw SchemaError(p, "arity must be nonnegative");
      v.emplace(static_cast<std::size_t>(arity), parse_complex(c, ring, p));
    }
    return free_operad(ring, v, count(field(j, "size_bound", path), path + ".size_bound"));
  }
  throw SchemaError(path, "expected a builtin operad name, {\"arity1\": m} or {\"free\": ...}");
}

AlgebraPtr parse_algebra(const json& j, const Ring& ring, const std::string& path) {
  OperadPtr o = parse_operad(field(j, "operad", path), ring, path + ".operad");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw SchemaError(path + ".preset", "expected a string");
    return preset(j["preset"].get<std::string>(), o, ring, path + ".preset");
  }
  ChainComplex carrier = parse_complex(field(j, "carrier", path), ring, path + ".carrier");
  const std::size_t dim = carrier.total_rank();
  AlgebraPtr a;
  try {
    if (auto fo = std::dynamic_pointer_cast<const FreeOperad>(o)) {
      std::map<std::pair<std::size_t, std::vector<std::size_t>>, SparseVec> table;
      if (j.contains("actions")) {
        const json& acts = j["actions"];
        for (std::size_t i = 0; i < acts.size(); ++i) {
          const std::string p = path + ".actions[" + std::to_string(i) + "]";
          if (!acts[i].is_array() || acts[i].size() != 3) throw SchemaError(p, "expected [v, [args], value]");
          table[{count(acts[i][0], p + "[0]"), index_list(acts[i][1], dim, p + "[1]")}] =
              parse_sparse(acts[i][2], ring, dim, p + "[2]");
        }
      }
      a = free_operad_algebra(fo, carrier, [table](std::size_t v, const std::vector<std::size_t>& args) {
        auto it = table.find({v, args});
        return it == table.end() ? SparseVec{} : it->second;
      });
    } else {
      const bool module = o->name() == "arity1" || o->name() == "initial";
      const std::size_t left = module ? o->dim(1) : dim;
      ProductTable t(left, std::vector<SparseVec>(dim));
      if (j.contains("products")) {
        const json& ps = j["products"];
        if (!ps.is_array()) throw SchemaError(path + ".products", "expected a list of [i, j, value]");
        for (std::size_t i = 0; i < ps.size(); ++i) {
          const std::string p = path + ".products[" + std::to_string(i) + "]";
          if (!ps[i].is_array() || ps[i].size() != 3) throw SchemaError(p, "expected [i, j, value]");
          std::size_t l = count(ps[i][0], p + "[0]"), r = count(ps[i][1], p + "[1]");
          if (l >= left || r >= dim) throw SchemaError(p, "basis index out of range");
          t[l][r] = parse_sparse(ps[i][2], ring, dim, p + "[2]");
        }
      }
      if (module) {
        a = module_algebra(o, carrier, t);
      } else {
        std::optional<SparseVec> unit;
        if (j.contains("unit")) unit = parse_sparse(j["unit"], ring, dim, path + ".unit");
        a = associative_algebra(o, carrier, t, unit);
      }
    }
    check_algebra_axioms(*a, 3);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return a;
}

FreeAttachment parse_attachment(const json& j, const AlgebraPtr& a, const std::string& path) {
  ChainComplex y = parse_complex(field(j, "Y", path), a->ring(), path + ".Y");
  ChainComplex z = parse_complex(field(j, "Z", path), a->ring(), path + ".Z");
  ChainMap f = j.contains("f") ? parse_map(j["f"], y, z, path + ".f") : ChainMap::zero(y, z);
  ChainMap g = j.contains("gbar") ? parse_map(j["gbar"], y, a->carrier(), path + ".gbar")
                                  : ChainMap::zero(y, a->carrier());
  return FreeAttachment{f, g};
}

TruncationBounds parse_bounds(const json& j, const std::string& path) {
  TruncationBounds b;
  if (j.is_null()) return b;
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto opt = [&](const char* key, std::size_t& out) {
    if (j.contains(key)) out = count(j[key], path + "." + key);
  };
  opt("max_straight_leaves", b.max_straight_leaves);
  opt("max_arity", b.max_arity);
  opt("max_inner_vertices", b.max_inner_vertices);
  opt("stabilization_window", b.stabilization_window);
  try {
    b.validate();
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return b;
}

}  // namespace paperlab::cli
