#include "report.hpp"

#include <cstdio>
#include <sstream>

namespace paperlab::cli {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::NotStabilized:
      return "not-stabilized";
  }
  return "fail";
}

void settle(Report& r, bool stabilized) {
  if (!stabilized) {
    r.status = Status::NotStabilized;
    return;
  }
  r.status = Status::Pass;
  for (auto& [key, value] : r.expected.items()) {
    auto it = r.computed.find(key);
    if (it == r.computed.end() || *it != value) {
      r.status = Status::Fail;
      if (!r.message.empty()) r.message += "; ";
      r.message += key + " differs";
    }
  }
}

json to_json(const std::vector<Report>& reports) {
  json out = json::object();
  json list = json::array();
  std::size_t pass = 0, fail = 0, unstable = 0;
  for (const auto& r : reports) {
    json e = {{"id", r.id},
              {"inputs", r.inputs},
              {"expected", r.expected},
              {"provenance", r.provenance},
              {"computed", r.computed},
              {"status", to_string(r.status)}};
    if (!r.message.empty()) e["message"] = r.message;
    list.push_back(std::move(e));
    (r.status == Status::Pass ? pass : r.status == Status::Fail ? fail : unstable) += 1;
  }
  out["reports"] = std::move(list);
  out["summary"] = {{"pass", pass}, {"fail", fail}, {"not-stabilized", unstable}};
  return out;
}

json timing_json(const std::vector<Report>& reports) {
  json out = json::object();
  for (const auto& r : reports) out[r.id] = r.runtime_seconds;
  return out;
}

std::string to_text(const std::vector<Report>& reports) {
  std::ostringstream s;
  for (const auto& r : reports) {
    char t[32];
    std::snprintf(t, sizeof t, "%.3f s", r.runtime_seconds);
    s << to_string(r.status) << "  " << r.id << "  [" << r.provenance << "]  (" << t << ")\n";
    for (auto& [key, value] : r.expected.items()) {
      auto it = r.computed.find(key);
      s << "    " << key << ": expected " << value.dump() << ", computed "
        << (it == r.computed.end() ? std::string("-") : it->dump()) << "\n";
    }
    if (!r.message.empty()) s << "    " << r.message << "\n";
  }
  if (reports.empty()) s << "no reports\n";
  return s.str();
}

int exit_code(const std::vector<Report>& reports) {
  bool unstable = false;
  for (const auto& r : reports) {
    if (r.status == Status::Fail) return 1;
    if (r.status == Status::NotStabilized) unstable = true;
  }
  return unstable ? 2 : 0;
}

}  // namespace paperlab::cli
