#include "prologian/scoring/report.hpp"

#include <map>

#include "prologian/syntax/writer.hpp"

namespace prologian {

using Doc = nlohmann::ordered_json;

namespace {

Doc span_json(const SourceSpan& s) {
  return {{"line", s.start_line}, {"column", s.start_col}, {"end_line", s.end_line}, {"end_column", s.end_col}};
}

Doc indicators(const std::vector<PredicateIndicator>& pis) {
  Doc out = Doc::array();
  for (const auto& p : pis) out.push_back(p.str());
  return out;
}

Doc error_json(const RuntimeError& e) {
  Doc d;
  d["kind"] = std::string(to_string(e.kind));
  d["message"] = e.message;
  if (e.kind == RuntimeError::Kind::UnknownPredicate) d["predicate"] = e.predicate.str();
  if (e.culprit) d["location"] = span_json(*e.culprit);
  d["call_chain"] = indicators(e.call_chain);
  return d;
}

Doc technique_rows(const ReportInput& in) {
  std::map<PredicateIndicator, const SolutionTypeVerdict*> found;
  for (const auto& v : in.verdicts) found[v.predicate] = &v;
  std::map<PredicateIndicator, const TechniqueViolation*> bad;
  for (const auto& v : in.violations) bad[v.predicate] = &v;
  Doc rows = Doc::array();
  for (const auto& req : in.requirements) {
    Doc r;
    r["predicate"] = req.predicate.str();
    r["required"] = std::string(to_string(req.required));
    auto f = found.find(req.predicate);
    if (f != found.end()) {
      r["found"] = std::string(to_string(f->second->verdict));
      r["higher_order"] = f->second->higher_order();
    } else {
      r["found"] = nullptr;
      r["higher_order"] = false;
    }
    auto b = bad.find(req.predicate);
    r["ok"] = b == bad.end();
    r["message"] = b == bad.end() ? "" : b->second->message;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string cell(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

std::string fenced(const std::string& text, const std::string& lang) {
  std::string body = text;
  if (body.empty() || body.back() != '\n') body += '\n';
  return "```" + lang + "\n" + body + "```\n";
}

}  // namespace

Report render_report(const ReportInput& in) {
  Doc doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["assignment"] = in.scorecard.assignment;
  doc["submission"] = in.submission;

  Doc syntax = Doc::array();
  for (const auto& e : in.syntax_errors) {
    Doc d = span_json(e.span);
    d["message"] = e.message;
    d["snippet"] = e.snippet;
    syntax.push_back(std::move(d));
  }
  doc["syntax_errors"] = std::move(syntax);

  std::map<std::string, const TestCase*> by_id;
  for (const auto& c : in.cases) by_id[c.id()] = &c;

  Doc tests = Doc::array();
  Doc diffs = Doc::array();
  for (const auto& r : in.results) {
    Doc t;
    t["id"] = r.id();
    t["suite"] = r.suite;
    t["name"] = r.name;
    t["verdict"] = std::string(to_string(r.verdict));
    t["message"] = r.message;
    t["steps"] = r.steps_used;
    t["targets"] = indicators(r.targets);
    t["open_choice_point"] = r.open_choice_warning;
    t["second_answer"] = r.second_answer ? Doc(*r.second_answer) : Doc(nullptr);
    t["error"] = r.error ? error_json(*r.error) : Doc(nullptr);
    t["call_chain"] = indicators(r.call_chain);
    auto c = by_id.find(r.id());
    t["body"] = in.reveal_bodies && c != by_id.end() ? Doc(c->second->text) : Doc(nullptr);
    tests.push_back(std::move(t));
    if (r.diff && r.diff->diverges) {
      Doc d;
      d["test"] = r.id();
      d["expected"] = format_term(number_vars(r.diff->expected));
      d["actual"] = r.diff->actual ? Doc(format_term(number_vars(*r.diff->actual))) : Doc(nullptr);
      d["path"] = format_path(r.diff->path);
      d["rendered"] = r.diff->rendered;
      diffs.push_back(std::move(d));
    }
  }
  doc["tests"] = std::move(tests);
  doc["diffs"] = std::move(diffs);

  Doc warnings = Doc::array();
  for (const auto& w : in.warnings) {
    Doc d;
    d["kind"] = std::string(to_string(w.kind));
    d["subject"] = w.subject;
    d["message"] = w.message;
    d["location"] = w.span ? span_json(*w.span) : Doc(nullptr);
    Doc sugg = Doc::array();
    if (w.suggestion)
      for (const auto& c : w.suggestion->candidates) sugg.push_back(c.predicate.str());
    d["suggestions"] = std::move(sugg);
    warnings.push_back(std::move(d));
  }
  doc["warnings"] = std::move(warnings);
  doc["technique"] = technique_rows(in);

  const Scorecard& sc = in.scorecard;
  Doc card;
  Doc preds = Doc::array();
  for (const auto& p : sc.predicates)
    preds.push_back({{"predicate", p.predicate.str()},
                     {"suite", p.suite},
                     {"tests_passed", p.passed},
                     {"tests_total", p.total},
                     {"points_awarded", p.points_awarded},
                     {"points_possible", p.points_possible}});
  card["predicates"] = std::move(preds);
  card["total_points"] = sc.total_points;
  card["max_points"] = sc.max_points;
  card["tests_passed"] = sc.tests_passed;
  card["tests_total"] = sc.tests_total;
  card["warnings"] = sc.warnings;
  card["timestamp"] = sc.timestamp;
  doc["scorecard"] = std::move(card);

  Report out;
  out.markdown = render_markdown(doc);
  out.json = doc.dump(2) + "\n";
  out.document = std::move(doc);
  return out;
}

std::string render_markdown(const Doc& doc) {
  std::string md = "# Feedback report: " + doc["assignment"].get<std::string>() + "\n\n";
  md += "Submission: `" + doc["submission"].get<std::string>() + "`\n\n";

  md += "## Syntax errors\n\n";
  if (doc["syntax_errors"].empty()) md += "None.\n\n";
  for (const auto& e : doc["syntax_errors"]) {
    md += "- line " + std::to_string(e["line"].get<int>()) + ", column " + std::to_string(e["column"].get<int>()) +
          ": " + e["message"].get<std::string>() + "\n\n";
    md += fenced(e["snippet"].get<std::string>(), "text") + "\n";
  }

  md += "## Test results\n\n";
  if (doc["tests"].empty()) {
    md += "No tests were run.\n\n";
  } else {
    md += "| Test | Verdict | Steps | Details |\n|---|---|---:|---|\n";
    for (const auto& t : doc["tests"])
      md += "| `" + cell(t["id"].get<std::string>()) + "` | " + t["verdict"].get<std::string>() + " | " +
            std::to_string(t["steps"].get<std::uint64_t>()) + " | " + cell(t["message"].get<std::string>()) + " |\n";
    md += "\n";
    for (const auto& t : doc["tests"]) {
      if (t["verdict"] == "Pass" || t["body"].is_null()) continue;
      md += "### `" + t["id"].get<std::string>() + "`\n\n" + fenced(t["body"].get<std::string>(), "prolog") + "\n";
    }
  }

  md += "## Differences\n\n";
  if (doc["diffs"].empty()) md += "None.\n\n";
  for (const auto& d : doc["diffs"])
    md += "### `" + d["test"].get<std::string>() + "`\n\n" + fenced(d["rendered"].get<std::string>(), "text") + "\n";

  md += "## Warnings\n\n";
  if (doc["warnings"].empty()) md += "None.\n\n";
  for (const auto& w : doc["warnings"]) {
    md += "- **" + w["kind"].get<std::string>() + "**";
    if (!w["location"].is_null()) md += " (line " + std::to_string(w["location"]["line"].get<int>()) + ")";
    md += ": " + w["message"].get<std::string>() + "\n";
  }
  if (!doc["warnings"].empty()) md += "\n";

  md += "## Technique\n\n";
  if (doc["technique"].empty()) {
    md += "No technique requirements.\n\n";
  } else {
    md += "| Predicate | Required | Found | Status |\n|---|---|---|---|\n";
    for (const auto& r : doc["technique"]) {
      std::string found = r["found"].is_null() ? "not defined" : r["found"].get<std::string>();
      std::string status = r["ok"].get<bool>() ? "ok" : cell(r["message"].get<std::string>());
      md += "| `" + r["predicate"].get<std::string>() + "` | " + r["required"].get<std::string>() + " | " + found +
            " | " + status + " |\n";
    }
    md += "\n";
  }

  const auto& sc = doc["scorecard"];
  md += "## Scorecard\n\n| Predicate | Suite | Tests passed | Points |\n|---|---|---:|---:|\n";
  for (const auto& p : sc["predicates"])
    md += "| `" + p["predicate"].get<std::string>() + "` | " + p["suite"].get<std::string>() + " | " +
          std::to_string(p["tests_passed"].get<std::size_t>()) + "/" +
          std::to_string(p["tests_total"].get<std::size_t>()) + " | " +
          std::to_string(p["points_awarded"].get<unsigned>()) + "/" +
          std::to_string(p["points_possible"].get<unsigned>()) + " |\n";
  md += "| **Total** | | " + std::to_string(sc["tests_passed"].get<std::size_t>()) + "/" +
        std::to_string(sc["tests_total"].get<std::size_t>()) + " | " +
        std::to_string(sc["total_points"].get<unsigned>()) + "/" + std::to_string(sc["max_points"].get<unsigned>()) +
        " |\n";
  return md;
}

}  // namespace prologian
