#include "doctest.h"

#include <fstream>

#include "cases.hpp"
#include "report.hpp"
#include "schema.hpp"

using namespace paperlab::cli;

namespace {

json fixture(const std::string& name) {
  std::ifstream in(std::string(PAPERLAB_FIXTURE_DIR) + "/" + name);
  REQUIRE(in);
  return json::parse(in);
}

Report with(Status s) {
  Report r;
  r.status = s;
  return r;
}

}  // namespace

TEST_CASE("malformed differential is a schema error with its path") {
  try {
    run_tasks(fixture("malformed_differential.json"), {});
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "$.tasks[0].algebra.carrier.differentials.1");
    CHECK(std::string(e.what()).find("2x1") != std::string::npos);
  }
}

TEST_CASE("schema errors are raised before any task runs") {
  json doc = fixture("yau.json");
  doc["tasks"].push_back({{"id", "yau-corrected"}, {"kind", "verify"}, {"case", "yau"}});
  CHECK_THROWS_AS(run_tasks(doc, {}), SchemaError);
  doc["tasks"].back()["id"] = "other";
  doc["tasks"].back()["kind"] = "nonsense";
  CHECK_THROWS_AS(run_tasks(doc, {}), SchemaError);
}

TEST_CASE("empty task list") {
  auto reports = run_tasks(fixture("empty.json"), {});
  CHECK(reports.empty());
  CHECK(exit_code(reports) == 0);
  CHECK(to_json(reports)["reports"].empty());
}

TEST_CASE("Yau fixture passes and the body is deterministic") {
  auto a = run_tasks(fixture("yau.json"), {});
  auto b = run_tasks(fixture("yau.json"), {});
  REQUIRE(a.size() == 2);
  for (const auto& r : a) CHECK_MESSAGE(r.status == Status::Pass, r.id);
  CHECK(a[0].computed["graded_dimension"] == 0);
  CHECK(a[1].computed["graded_dimension"] == 6);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_json(a).dump().find("runtime") == std::string::npos);
}

TEST_CASE("a wrong expectation fails") {
  json doc = fixture("yau.json");
  doc["tasks"][0]["expected"]["graded_dimension"] = 1;
  auto reports = run_tasks(doc, {});
  CHECK(reports[0].status == Status::Fail);
  CHECK(exit_code(reports) == 1);
}

TEST_CASE("exit code contract") {
  CHECK(exit_code({with(Status::Pass)}) == 0);
  CHECK(exit_code({with(Status::Pass), with(Status::NotStabilized)}) == 2);
  CHECK(exit_code({with(Status::NotStabilized), with(Status::Fail)}) == 1);
}

TEST_CASE("settle compares expected keys only") {
  Report r;
  r.expected = {{"x", 1}};
  r.computed = {{"x", 1}, {"y", 2}};
  settle(r);
  CHECK(r.status == Status::Pass);
  settle(r, false);
  CHECK(r.status == Status::NotStabilized);
  r.expected["z"] = 3;
  settle(r);
  CHECK(r.status == Status::Fail);
}

TEST_CASE("ring parsing") {
  CHECK(parse_ring("Q", "$") == paperlab::Ring::rationals());
  CHECK(parse_ring("F_5", "$") == paperlab::Ring::prime_field(5));
  CHECK_THROWS_AS(parse_ring("F_4", "$.ring"), SchemaError);
  CHECK_THROWS_AS(parse_ring(3, "$.ring"), SchemaError);
}
