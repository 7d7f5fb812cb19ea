#include "cases.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace paperlab;
using namespace paperlab::cli;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

// The JSON body goes to --json-out, runtimes to <json-out>.timing.json.
int emit(const std::vector<Report>& reports, const std::string& json_out) {
  std::cout << to_text(reports);
  if (!json_out.empty()) {
    write_file(json_out, to_json(reports).dump(2) + "\n");
    write_file(json_out + ".timing.json", timing_json(reports).dump(2) + "\n");
  }
  return exit_code(reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paperlab: enveloping operads and push-outs of operad algebras"};
  app.require_subcommand(1);

  std::string ring_tag, json_out;
  std::size_t bound = 0, window = 0;
  app.fallthrough();
  app.add_option("--ring", ring_tag, "Coefficient ring: Z, Q or F_p");
  app.add_option("--bound", bound, "Truncation bound (stages, straight leaves or N, per subcommand)");
  app.add_option("--window", window, "Stabilization window");
  app.add_option("--json-out", json_out, "Write the JSON report here");

  auto* verify = app.add_subcommand("verify", "Re-run a bundled counterexample");
  std::string which;
  verify->add_option("case", which, "yau | a3zero | quasi-iso")->required()->check(
      CLI::IsMember({"yau", "a3zero", "quasi-iso"}));

  auto* cross = app.add_subcommand("crosscheck", "Closed forms against the truncated coequalizer");

  auto* envelope = app.add_subcommand("envelope", "Enveloping operad components of an algebra");
  std::string algebra_file;
  std::size_t arities = 3;
  envelope->add_option("algebra", algebra_file, "JSON file with {\"ring\", \"algebra\"}")->required();
  envelope->add_option("--arity", arities, "Largest arity");

  auto* pushout = app.add_subcommand("pushout", "Push-out along a free map");
  std::string pushout_file;
  bool uncorrected = false;
  pushout->add_option("input", pushout_file, "JSON file with {\"ring\", \"algebra\", \"attachment\"}")->required();
  pushout->add_flag("--uncorrected", uncorrected, "Use the uncorrected stage construction");

  auto* run = app.add_subcommand("run", "Run a task file");
  std::string task_file;
  run->add_option("file", task_file, "JSON task file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    Overrides o;
    if (!ring_tag.empty()) o.ring = parse_ring(json(ring_tag), "--ring");
    if (bound > 0) o.bound = bound;
    if (window > 0) o.window = window;
    auto bounds_for = [&](std::size_t straight, std::size_t arity) {
      TruncationBounds b;
      b.max_straight_leaves = o.bound.value_or(straight);
      b.max_arity = arity;
      if (o.window) b.stabilization_window = *o.window;
      return b;
    };

    if (*verify) {
      if (which == "yau") return emit(verify_yau(o.bound.value_or(6), o.ring.value_or(Ring::rationals())), json_out);
      if (which == "a3zero") return emit({verify_a3zero(o.ring.value_or(Ring::integers()))}, json_out);
      return emit({verify_quasi_iso(o.ring.value_or(Ring::rationals()))}, json_out);
    }
    if (*cross) return emit(crosscheck(o.ring.value_or(Ring::rationals()), bounds_for(6, 4)), json_out);
    if (*envelope) {
      json doc = read_json(algebra_file);
      Ring ring = o.ring ? *o.ring : doc.contains("ring") ? parse_ring(doc["ring"], "$.ring") : Ring::rationals();
      if (!doc.contains("algebra")) throw SchemaError("$", "missing field 'algebra'");
      AlgebraPtr a = parse_algebra(doc["algebra"], ring, "$.algebra");
      return emit({envelope_report("envelope", a, arities, bounds_for(6, std::max<std::size_t>(arities, 1)))}, json_out);
    }
    if (*pushout) {
      json doc = read_json(pushout_file);
      Ring ring = o.ring ? *o.ring : doc.contains("ring") ? parse_ring(doc["ring"], "$.ring") : Ring::rationals();
      if (!doc.contains("algebra")) throw SchemaError("$", "missing field 'algebra'");
      if (!doc.contains("attachment")) throw SchemaError("$", "missing field 'attachment'");
      AlgebraPtr a = parse_algebra(doc["algebra"], ring, "$.algebra");
      FreeAttachment att = parse_attachment(doc["attachment"], a, "$.attachment");
      const std::size_t stages = o.bound.value_or(4);
      TruncationBounds b;
      b.max_arity = stages + 1;
      if (o.window) b.stabilization_window = *o.window;
      return emit({pushout_report("pushout", a, att, b, stages, !uncorrected)}, json_out);
    }
    if (*run) return emit(run_tasks(read_json(task_file), o), json_out);
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
