#include "prologian/scoring/scorecard.hpp"

#include <ctime>

#include <json.hpp>

namespace prologian {

Scorecard score_submission(const std::vector<TestResult>& results, const AssignmentSpec& spec, std::size_t warnings,
                           std::int64_t timestamp) {
  Scorecard card;
  card.assignment = spec.assignment;
  card.warnings = warnings;
  card.timestamp = timestamp;
  for (const auto& r : results) {
    ++card.tests_total;
    card.tests_passed += r.verdict == Verdict::Pass;
  }
  for (const auto& p : spec.predicates) {
    PredicateScore s;
    s.predicate = p.predicate;
    s.suite = p.suite;
    s.points_possible = p.points;
    for (const auto& r : results) {
      if (r.suite != p.suite) continue;
      ++s.total;
      s.passed += r.verdict == Verdict::Pass;
    }
    if (s.total == 0) throw SpecError("suite '" + p.suite + "' for " + p.predicate.str() + " has no test results");
    s.points_awarded = s.passed == s.total ? s.points_possible : 0;
    card.max_points += s.points_possible;
    card.total_points += s.points_awarded;
    card.predicates.push_back(std::move(s));
  }
  return card;
}

std::string format_timestamp(std::int64_t seconds) {
  std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string scorecard_to_json(const Scorecard& card) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["assignment"] = card.assignment;
  doc["predicates"] = nlohmann::ordered_json::array();
  for (const auto& p : card.predicates) {
    doc["predicates"].push_back({{"predicate", p.predicate.str()},
                                 {"suite", p.suite},
                                 {"tests_passed", p.passed},
                                 {"tests_total", p.total},
                                 {"points_awarded", p.points_awarded},
                                 {"points_possible", p.points_possible}});
  }
  doc["total_points"] = card.total_points;
  doc["max_points"] = card.max_points;
  doc["tests_passed"] = card.tests_passed;
  doc["tests_total"] = card.tests_total;
  doc["warnings"] = card.warnings;
  doc["timestamp"] = card.timestamp;
  return doc.dump(2) + "\n";
}

Scorecard scorecard_from_json(std::string_view json_text) {
  try {
    auto doc = nlohmann::json::parse(json_text);
    Scorecard card;
    card.assignment = doc.at("assignment").get<std::string>();
    for (const auto& p : doc.at("predicates")) {
      PredicateScore s;
      std::string pi = p.at("predicate").get<std::string>();
      auto slash = pi.rfind('/');
      if (slash == std::string::npos) throw SpecError("malformed predicate indicator '" + pi + "'");
      s.predicate.name = pi.substr(0, slash);
      s.predicate.arity = std::stoul(pi.substr(slash + 1));
      s.suite = p.at("suite").get<std::string>();
      s.passed = p.at("tests_passed").get<std::size_t>();
      s.total = p.at("tests_total").get<std::size_t>();
      s.points_awarded = p.at("points_awarded").get<unsigned>();
      s.points_possible = p.at("points_possible").get<unsigned>();
      card.predicates.push_back(std::move(s));
    }
    card.total_points = doc.at("total_points").get<unsigned>();
    card.max_points = doc.at("max_points").get<unsigned>();
    card.tests_passed = doc.at("tests_passed").get<std::size_t>();
    card.tests_total = doc.at("tests_total").get<std::size_t>();
    card.warnings = doc.value("warnings", std::size_t{0});
    card.timestamp = doc.at("timestamp").get<std::int64_t>();
    return card;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed scorecard: ") + e.what());
  } catch (const std::logic_error& e) {
    throw SpecError(std::string("malformed scorecard: ") + e.what());
  }
}

}  // namespace prologian
