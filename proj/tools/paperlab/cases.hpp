#pragma once

// The verification cases and task runner behind the subcommands.

#include "report.hpp"
#include "schema.hpp"

#include <optional>

namespace paperlab::cli {

struct Overrides {
  std::optional<Ring> ring;
  std::optional<std::size_t> bound;
  std::optional<std::size_t> window;
};

json modules_json(const ChainComplex& c);

std::vector<Report> verify_yau(std::size_t bound, const Ring& ring);
Report verify_a3zero(const Ring& ring);
Report verify_quasi_iso(const Ring& ring);
std::vector<Report> crosscheck(const Ring& ring, const TruncationBounds& bounds);

Report envelope_report(const std::string& id, const AlgebraPtr& a, std::size_t max_arity,
                       const TruncationBounds& bounds);
Report pushout_report(const std::string& id, const AlgebraPtr& a, const FreeAttachment& att,
                      const TruncationBounds& bounds, std::size_t stages, bool corrected);

/// {"ring": "Q", "tasks": [{"id": ..., "kind": "verify" | "crosscheck" | "envelope" | "pushout", ...}]}.
/// Throws SchemaError before running anything.
std::vector<Report> run_tasks(const json& doc, const Overrides& o);

}  // namespace paperlab::cli
