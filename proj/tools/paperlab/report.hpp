#pragma once

// Verification reports: expected vs computed values with provenance tags.

#include "json.hpp"

#include <string>
#include <vector>

namespace paperlab::cli {

using nlohmann::json;

enum class Status { Pass, Fail, NotStabilized };
std::string to_string(Status s);

struct Report {
  std::string id;
  json inputs = json::object();
  json expected = json::object();  // keys that must match in `computed`
  std::string provenance;           // PAPER, DERIVED, TRIVIAL or NONE
  json computed = json::object();
  Status status = Status::Fail;
  std::string message;
  double runtime_seconds = 0;  // kept out of the report body
};

/// Pass iff every expected key is present in computed with an equal value;
/// NotStabilized when `stabilized` is false, regardless of the values.
void settle(Report& r, bool stabilized = true);

/// Deterministic body: no runtimes.
json to_json(const std::vector<Report>& reports);
json timing_json(const std::vector<Report>& reports);
std::string to_text(const std::vector<Report>& reports);

/// 1 if anything failed, else 2 if anything did not stabilize, else 0.
int exit_code(const std::vector<Report>& reports);

}  // namespace paperlab::cli
