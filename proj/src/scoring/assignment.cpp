#include "prologian/scoring/assignment.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace prologian {

using nlohmann::json;

const PredicateSpec* AssignmentSpec::find_suite(std::string_view suite) const {
  for (const auto& p : predicates)
    if (p.suite == suite) return &p;
  return nullptr;
}

namespace {

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SpecError(where + ": field '" + key + "' has the wrong type");
  }
}

std::uint64_t limit(const json& limits, const char* key, std::uint64_t fallback) {
  auto it = limits.find(key);
  if (it == limits.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() <= 0)
    throw SpecError(std::string("limits.") + key + " must be a positive integer");
  return it->get<std::uint64_t>();
}

}  // namespace

AssignmentSpec parse_assignment_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("assignment spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("assignment spec must be a JSON object");

  AssignmentSpec spec;
  spec.assignment = field<std::string>(doc, "assignment", "spec");
  if (spec.assignment.empty()) throw SpecError("spec: 'assignment' must not be empty");
  if (auto it = doc.find("reveal_bodies"); it != doc.end()) {
    if (!it->is_boolean()) throw SpecError("spec: 'reveal_bodies' must be a boolean");
    spec.reveal_bodies = it->get<bool>();
  }
  if (auto it = doc.find("limits"); it != doc.end()) {
    if (!it->is_object()) throw SpecError("spec: 'limits' must be an object");
    spec.limits.max_steps = limit(*it, "max_steps", spec.limits.max_steps);
    spec.limits.max_solutions = limit(*it, "max_solutions", spec.limits.max_solutions);
    spec.limits.max_depth = limit(*it, "max_depth", spec.limits.max_depth);
  }

  auto preds = doc.find("predicates");
  if (preds == doc.end() || !preds->is_array()) throw SpecError("spec: 'predicates' must be an array");
  std::set<PredicateIndicator> seen_pred;
  std::set<std::string> seen_suite;
  for (std::size_t i = 0; i < preds->size(); ++i) {
    const json& p = (*preds)[i];
    std::string where = "predicates[" + std::to_string(i) + "]";
    if (!p.is_object()) throw SpecError(where + " must be an object");
    PredicateSpec ps;
    ps.predicate.name = field<std::string>(p, "name", where);
    std::int64_t arity = field<std::int64_t>(p, "arity", where);
    std::int64_t points = field<std::int64_t>(p, "points", where);
    if (arity < 0) throw SpecError(where + ": arity must be non-negative");
    if (points < 0) throw SpecError(where + ": points must be non-negative");
    ps.predicate.arity = static_cast<std::size_t>(arity);
    ps.points = static_cast<unsigned>(points);
    ps.suite = p.contains("suite") ? field<std::string>(p, "suite", where) : ps.predicate.name;
    if (auto t = p.find("technique"); t != p.end() && !t->is_null()) {
      if (!t->is_string()) throw SpecError(where + ": technique must be a string");
      ps.technique = parse_technique(t->get<std::string>());
      if (!ps.technique) throw SpecError(where + ": unknown technique '" + t->get<std::string>() + "'");
    }
    if (!seen_pred.insert(ps.predicate).second)
      throw SpecError(where + ": duplicate predicate " + ps.predicate.str());
    if (!seen_suite.insert(ps.suite).second)
      throw SpecError(where + ": suite '" + ps.suite + "' is attributed to more than one predicate");
    spec.predicates.push_back(std::move(ps));
  }
  return spec;
}

AssignmentSpec load_assignment_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read assignment spec " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_assignment_spec(buf.str());
}

void validate_against_tests(const AssignmentSpec& spec, const TestFile& tests) {
  for (const auto& p : spec.predicates) {
    std::size_t n = 0;
    for (const auto& c : tests.cases) n += c.suite == p.suite;
    if (n > 0) continue;
    throw SpecError("suite '" + p.suite + "' for " + p.predicate.str() + " is missing from the tests");
  }
}

std::string to_json(const AssignmentSpec& spec) {
  nlohmann::ordered_json doc;
  doc["assignment"] = spec.assignment;
  doc["predicates"] = nlohmann::ordered_json::array();
  for (const auto& p : spec.predicates) {
    nlohmann::ordered_json e;
    e["name"] = p.predicate.name;
    e["arity"] = p.predicate.arity;
    e["points"] = p.points;
    e["suite"] = p.suite;
    if (p.technique) e["technique"] = std::string(to_string(*p.technique));
    doc["predicates"].push_back(std::move(e));
  }
  doc["limits"] = {{"max_steps", spec.limits.max_steps},
                   {"max_solutions", spec.limits.max_solutions},
                   {"max_depth", spec.limits.max_depth}};
  doc["reveal_bodies"] = spec.reveal_bodies;
  return doc.dump(2) + "\n";
}

}  // namespace prologian
