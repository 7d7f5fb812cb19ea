#include "cases.hpp"

#include <paperlab/corpus.hpp>

#include <chrono>
#include <functional>
#include <set>

namespace paperlab::cli {

namespace {

json integer_json(const Integer& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

json module_json(const FgModule& m) {
  json t = json::array();
  for (const auto& x : m.torsion) t.push_back(integer_json(x));
  return {{"rank", m.rank}, {"torsion", t}};
}

json homology_json(const ChainComplex& c) {
  json out = json::object();
  for (int d : c.degrees()) {
    FgModule h = homology(c, d);
    if (!h.is_zero()) out[std::to_string(d)] = module_json(h);
  }
  return out;
}

Report make_report(std::string id, json inputs, json expected, std::string provenance) {
  Report r;
  r.id = std::move(id);
  r.inputs = std::move(inputs);
  r.expected = std::move(expected);
  r.provenance = std::move(provenance);
  return r;
}

// Runs body with timing; library errors become failed or not-stabilized reports.
Report timed(Report r, const std::function<void(Report&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const WindowExceeded& e) {
    r.status = Status::NotStabilized;
    r.message = e.what();
  } catch (const NotStabilized& e) {
    r.status = Status::NotStabilized;
    r.message = e.what();
  } catch (const Error& e) {
    r.status = Status::Fail;
    r.message = e.what();
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

TruncationBounds default_bounds(std::size_t straight, std::size_t arity) {
  TruncationBounds b;
  b.max_straight_leaves = straight;
  b.max_arity = arity;
  return b;
}

json bounds_json(const TruncationBounds& b) {
  return {{"max_straight_leaves", b.max_straight_leaves},
          {"max_arity", b.max_arity},
          {"max_inner_vertices", b.max_inner_vertices},
          {"stabilization_window", b.stabilization_window}};
}

std::size_t twos(const FgModule& m) {
  std::size_t k = 0;
  for (const auto& x : m.torsion) k += x == 2;
  return k;
}

}  // namespace

json modules_json(const ChainComplex& c) {
  json out = json::object();
  for (int d : c.degrees()) {
    FgModule m = module_at(c, d);
    if (!m.is_zero()) out[std::to_string(d)] = module_json(m);
  }
  return out;
}

std::vector<Report> verify_yau(std::size_t bound, const Ring& ring) {
  if (bound == 0) throw Error("verify yau: bound must be at least 1");
  auto inst = yau_instance(ring);
  const TruncationBounds b = default_bounds(4, bound + 1);
  json inputs = {{"operad", "uass"}, {"algebra", "zero"}, {"Y", "0"}, {"Z", "k"}, {"bound", bound},
                 {"ring", ring.name()}};
  std::vector<Report> out;
  Report good = make_report("yau-corrected", inputs, {{"graded_dimension", 0}}, "PAPER");
  out.push_back(timed(good, [&](Report& r) {
    auto tr = pushout_along_free_corrected(inst.algebra, inst.attachment, b, bound);
    r.computed = {{"graded_dimension", graded_dimension(tr.result)}, {"stages", tr.stages.size()},
                  {"stabilized", tr.stabilized}};
    settle(r, tr.stabilized);
  }));
  Report bad = make_report("yau-uncorrected", inputs, {{"graded_dimension", bound}}, "DERIVED");
  out.push_back(timed(bad, [&](Report& r) {
    auto tr = pushout_along_free_original_wrong(inst.algebra, inst.attachment, b, bound);
    r.computed = {{"graded_dimension", graded_dimension(tr.result)}, {"stages", tr.stages.size()},
                  {"stabilized", tr.stabilized}};
    settle(r);
  }));
  return out;
}

Report verify_a3zero(const Ring& ring) {
  json inputs = {{"operad", "a3zero"}, {"algebra", "x^2 = 2y, xy = yx = y^2 = 0"}, {"ring", ring.name()}};
  json expected = {{"A/A^2", {{"rank", 1}, {"torsion", {2}}}},
                   {"O_A(1)", {{"rank", 3}, {"torsion", {2, 2}}}},
                   {"O_A(2)", {{"rank", 1}, {"torsion", json::array()}}},
                   {"coker f' twos", 2}};
  if (!(ring == Ring::integers())) expected = {{"A/A^2", {{"rank", 1}, {"torsion", json::array()}}}};
  return timed(make_report("a3zero", inputs, expected, "PAPER"), [&](Report& r) {
    auto a = a3zero_torsion_example(ring);
    const TruncationBounds b = default_bounds(6, 4);
    Envelope env(a, b);
    auto coprod = coproduct_with_free_unit(a, b);
    FgModule coker = map_cokernel(coprod.f_prime, 0);
    r.computed = {{"A/A^2", module_json(module_at(decomposables_quotient(*a, 3), 0))},
                  {"O_A(1)", module_json(module_at(env.component(1).complex, 0))},
                  {"O_A(2)", module_json(module_at(env.component(2).complex, 0))},
                  {"coker f'", module_json(coker)},
                  {"coker f' twos", twos(coker)}};
    bool stable = true;
    for (std::size_t n = 0; n <= 2; ++n) stable = stable && env.component(n).stabilized;
    settle(r, stable);
  });
}

Report verify_quasi_iso(const Ring& ring) {
  json inputs = {{"A", "k z -> k y + k y^2, d z = y^2"}, {"B", "k x, x^2 = 0"}, {"phi", "y -> x"},
                 {"ring", ring.name()}};
  json expected = {{"phi quasi-iso", true},
                   {"dim H1(A/A^2)", 1},
                   {"dim H1(O_A(1))", 2},
                   {"dim H1(O_B(1))", 0},
                   {"arity-1 map quasi-iso", false}};
  return timed(make_report("quasi-iso", inputs, expected, "PAPER"), [&](Report& r) {
    auto phi = quasi_iso_example_map(ring);
    const TruncationBounds b = default_bounds(6, 3);
    Envelope ea(phi.source, b), eb(phi.target, b);
    r.computed = {{"phi quasi-iso", is_quasi_iso(phi.map).quasi_isomorphism},
                  {"dim H1(A/A^2)", homology(decomposables_quotient(*phi.source, 3), 1).rank},
                  {"dim H1(O_A(1))", homology(ea.component(1).complex, 1).rank},
                  {"dim H1(O_B(1))", homology(eb.component(1).complex, 1).rank},
                  {"arity-1 map quasi-iso", is_quasi_iso(enveloping_map(ea, eb, phi, 1)).quasi_isomorphism}};
    settle(r, ea.component(1).stabilized && eb.component(1).stabilized);
  });
}

std::vector<Report> crosscheck(const Ring& ring, const TruncationBounds& bounds) {
  std::vector<Report> out;
  for (const auto& inst : crosscheck_instances(ring)) {
    json inputs = {{"kind", to_string(inst.kind)}, {"algebra", inst.algebra->name()},
                   {"operad", inst.algebra->operad()->name()}, {"ring", inst.algebra->ring().name()},
                   {"bounds", bounds_json(bounds)}};
    out.push_back(timed(make_report("crosscheck-" + inst.id, inputs, json::object(), inst.provenance), [&](Report& r) {
      auto cf = closed_form(inst.kind, inst.algebra, bounds);
      Envelope env(inst.algebra, bounds);
      json expect = json::object(), got = json::object();
      bool stable = true;
      for (std::size_t n = 0; n <= bounds.max_arity && n < cf.size(); ++n) {
        expect[std::to_string(n)] = modules_json(cf[n]);
        const auto& c = env.component(n);
        got[std::to_string(n)] = modules_json(c.complex);
        stable = stable && c.stabilized;
      }
      r.expected = {{"modules", expect}};
      r.computed = {{"modules", got}};
      settle(r, stable);
    }));
  }
  return out;
}

Report envelope_report(const std::string& id, const AlgebraPtr& a, std::size_t max_arity,
                       const TruncationBounds& bounds) {
  json inputs = {{"algebra", a->name()}, {"operad", a->operad()->name()}, {"ring", a->ring().name()},
                 {"arities", max_arity}, {"bounds", bounds_json(bounds)}};
  return timed(make_report(id, inputs, json::object(), "NONE"), [&](Report& r) {
    Envelope env(a, bounds);
    json arities = json::object(), modules = json::object();
    bool stable = true;
    for (std::size_t n = 0; n <= max_arity; ++n) {
      const auto& c = env.component(n);
      json basis = json::object();
      for (int d : c.complex.degrees())
        if (c.complex.rank(d) > 0) basis[std::to_string(d)] = c.complex.labels(d);
      arities[std::to_string(n)] = {{"bound", c.bound},
                                    {"stabilized", c.stabilized},
                                    {"modules", modules_json(c.complex)},
                                    {"homology", homology_json(c.complex)},
                                    {"basis", basis}};
      modules[std::to_string(n)] = modules_json(c.complex);
      stable = stable && c.stabilized;
    }
    r.computed = {{"arities", arities}, {"modules", modules}};
    settle(r, stable);
  });
}

Report pushout_report(const std::string& id, const AlgebraPtr& a, const FreeAttachment& att,
                      const TruncationBounds& bounds, std::size_t stages, bool corrected) {
  json inputs = {{"algebra", a->name()}, {"operad", a->operad()->name()}, {"ring", a->ring().name()},
                 {"construction", corrected ? "corrected" : "uncorrected"}, {"stages", stages},
                 {"bounds", bounds_json(bounds)}};
  return timed(make_report(id, inputs, json::object(), "NONE"), [&](Report& r) {
    auto tr = corrected ? pushout_along_free_corrected(a, att, bounds, stages)
                        : pushout_along_free_original_wrong(a, att, bounds, stages);
    json st = json::array();
    for (std::size_t t = 0; t < tr.stages.size(); ++t)
      st.push_back({{"t", t + 1}, {"modules", modules_json(tr.stages[t].object)}});
    r.computed = {{"graded_dimension", graded_dimension(tr.result)},
                  {"modules", modules_json(tr.result)},
                  {"homology", homology_json(tr.result)},
                  {"stabilized", tr.stabilized},
                  {"stages", st}};
    settle(r, tr.stabilized || !corrected);
  });
}

std::vector<Report> run_tasks(const json& doc, const Overrides& o) {
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  Ring ring = Ring::rationals();
  if (doc.contains("ring")) ring = parse_ring(doc["ring"], "$.ring");
  if (o.ring) ring = *o.ring;
  if (!doc.contains("tasks")) throw SchemaError("$", "missing field 'tasks'");
  const json& tasks = doc["tasks"];
  if (!tasks.is_array()) throw SchemaError("$.tasks", "expected a list");

  // Parse everything first so a schema error runs nothing.
  std::vector<std::function<std::vector<Report>()>> jobs;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string p = "$.tasks[" + std::to_string(i) + "]";
    const json& t = tasks[i];
    if (!t.is_object()) throw SchemaError(p, "expected an object");
    if (!t.contains("id") || !t["id"].is_string()) throw SchemaError(p, "missing string field 'id'");
    const std::string id = t["id"].get<std::string>();
    if (!ids.insert(id).second) throw SchemaError(p + ".id", "duplicate id '" + id + "'");
    if (!t.contains("kind") || !t["kind"].is_string()) throw SchemaError(p, "missing string field 'kind'");
    const std::string kind = t["kind"].get<std::string>();
    TruncationBounds b = parse_bounds(t.value("bounds", json()), p + ".bounds");
    if (o.window) b.stabilization_window = *o.window;
    json expected = t.value("expected", json::object());
    if (!expected.is_object()) throw SchemaError(p + ".expected", "expected an object");
    const std::string prov = t.value("provenance", std::string(expected.empty() ? "NONE" : "DERIVED"));

    auto finish = [expected, prov, t](std::vector<Report> rs) {
      for (auto& r : rs) {
        r.inputs["task"] = t;
        if (!expected.empty()) {
          const bool unstable = r.status == Status::NotStabilized;
          r.expected = expected;
          r.provenance = prov;
          r.message.clear();
          if (!unstable) settle(r);
        }
      }
      return rs;
    };

    if (kind == "verify") {
      const std::string c = t.value("case", "");
      const std::size_t bound = o.bound ? *o.bound : t.value("bound", std::size_t{6});
      if (c == "yau")
        jobs.push_back([=] {
          auto rs = verify_yau(bound, ring);
          for (auto& r : rs) r.id = id + "/" + r.id;
          return rs;
        });
      else if (c == "a3zero")
        jobs.push_back([=] {
          Report r = verify_a3zero(doc.contains("ring") || o.ring ? ring : Ring::integers());
          r.id = id;
          return std::vector<Report>{r};
        });
      else if (c == "quasi-iso")
        jobs.push_back([=] {
          Report r = verify_quasi_iso(ring);
          r.id = id;
          return std::vector<Report>{r};
        });
      else
        throw SchemaError(p + ".case", "expected \"yau\", \"a3zero\" or \"quasi-iso\"");
    } else if (kind == "crosscheck") {
      if (o.bound) b.max_straight_leaves = *o.bound;
      jobs.push_back([=] {
        auto rs = crosscheck(ring, b);
        for (auto& r : rs) r.id = id + "/" + r.id;
        return rs;
      });
    } else if (kind == "envelope") {
      if (!t.contains("algebra")) throw SchemaError(p, "missing field 'algebra'");
      AlgebraPtr a = parse_algebra(t["algebra"], ring, p + ".algebra");
      if (o.bound) b.max_straight_leaves = *o.bound;
      const std::size_t arities = t.value("arities", b.max_arity);
      jobs.push_back([=] { return finish({envelope_report(id, a, arities, b)}); });
    } else if (kind == "pushout") {
      if (!t.contains("algebra")) throw SchemaError(p, "missing field 'algebra'");
      if (!t.contains("attachment")) throw SchemaError(p, "missing field 'attachment'");
      AlgebraPtr a = parse_algebra(t["algebra"], ring, p + ".algebra");
      FreeAttachment att = parse_attachment(t["attachment"], a, p + ".attachment");
      const std::string construction = t.value("construction", "corrected");
      if (construction != "corrected" && construction != "uncorrected")
        throw SchemaError(p + ".construction", "expected \"corrected\" or \"uncorrected\"");
      const std::size_t stages = o.bound ? *o.bound : t.value("stages", std::size_t{4});
      jobs.push_back([=] { return finish({pushout_report(id, a, att, b, stages, construction == "corrected")}); });
    } else {
      throw SchemaError(p + ".kind", "unknown task kind '" + kind + "'");
    }
  }
  std::vector<Report> out;
  for (auto& job : jobs)
    for (auto& r : job()) out.push_back(std::move(r));
  return out;
}

}  // namespace paperlab::cli
