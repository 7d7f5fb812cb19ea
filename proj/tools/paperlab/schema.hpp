#pragma once

// JSON input schemas. Every parser takes the JSON path of its argument so
// errors point at the offending field.

#include <paperlab/pushouts.hpp>

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace paperlab::cli {

using nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::runtime_error("schema error at " + path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Ring parse_ring(const json& j, const std::string& path);
Scalar parse_scalar_json(const json& j, const std::string& path);
Matrix parse_matrix(const json& j, const Ring& ring, std::size_t rows, std::size_t cols, const std::string& path);

/// {"ranks": {"0": 2}, "labels": {"0": ["y", "y2"]}, "differentials": {"1": [[0], [1]]}}
/// with d_n : C_n -> C_{n-1} given as rank(n-1) rows of rank(n) entries.
ChainComplex parse_complex(const json& j, const Ring& ring, const std::string& path);

/// {"<degree>": matrix}; missing degrees are zero.
ChainMap parse_map(const json& j, const ChainComplex& source, const ChainComplex& target, const std::string& path);

/// "uass" | "ass" | "a3zero" | "initial" | {"arity1": m} (monoid k[t]/t^m) |
/// {"free": {"<arity>": complex}, "size_bound": N}.
OperadPtr parse_operad(const json& j, const Ring& ring, const std::string& path);

/// {"operad": ..., "preset": "zero" | "initial" | "ground" | "dual_numbers" |
/// "torsion_example" | "dg_example" | "square_zero"} or
/// {"operad": ..., "carrier": complex, "products": [[i, j, [[k, c], ...]], ...], "unit": [[k, c]]};
/// over a free operad "actions": [[v, [args...], [[k, c], ...]], ...].
AlgebraPtr parse_algebra(const json& j, const Ring& ring, const std::string& path);

/// {"Y": complex, "Z": complex, "f": map, "gbar": map}.
FreeAttachment parse_attachment(const json& j, const AlgebraPtr& a, const std::string& path);

/// {"max_straight_leaves", "max_arity", "max_inner_vertices", "stabilization_window"}, all optional.
TruncationBounds parse_bounds(const json& j, const std::string& path);

}  // namespace paperlab::cli
