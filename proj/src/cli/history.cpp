#include <iostream>

#include <json.hpp>

#include "common.hpp"
#include "prologian/analytics/bug_classifier.hpp"
#include "prologian/analytics/corpus.hpp"
#include "prologian/syntax/parser.hpp"
#include "prologian/syntax/writer.hpp"

namespace prologian::cli {

using Doc = nlohmann::ordered_json;

namespace {

Doc position_json(const std::optional<TermPosition>& p) {
  if (!p) return nullptr;
  Doc d;
  d["part"] = p->part == TermPosition::Part::Head ? "head" : "body";
  d["goal"] = p->goal;
  d["args"] = p->args;
  return d;
}

Doc term_json(const std::optional<Term>& t) { return t ? Doc(format_term(*t)) : Doc(nullptr); }

Doc diff_document(const std::vector<PredicateDiff>& diff, const std::vector<BugLabel>& labels) {
  Doc doc;
  doc["schema_version"] = 1;
  Doc preds = Doc::array();
  for (const auto& pd : diff) {
    Doc p;
    p["predicate"] = pd.predicate.str();
    p["kind"] = std::string(to_string(pd.kind));
    p["renamed_from"] = pd.renamed_from ? Doc(pd.renamed_from->str()) : Doc(nullptr);
    Doc edits = Doc::array();
    for (const auto& ce : pd.edits) {
      Doc e;
      e["kind"] = std::string(to_string(ce.kind));
      e["old_index"] = ce.old_index ? Doc(*ce.old_index) : Doc(nullptr);
      e["new_index"] = ce.new_index ? Doc(*ce.new_index) : Doc(nullptr);
      Doc script = Doc::array();
      for (const auto& op : ce.script)
        script.push_back({{"kind", std::string(to_string(op.kind))},
                          {"old_position", position_json(op.old_pos)},
                          {"new_position", position_json(op.new_pos)},
                          {"before", term_json(op.before)},
                          {"after", term_json(op.after)},
                          {"description", op.str()}});
      e["script"] = std::move(script);
      edits.push_back(std::move(e));
    }
    p["edits"] = std::move(edits);
    preds.push_back(std::move(p));
  }
  doc["diff"] = std::move(preds);
  Doc ls = Doc::array();
  for (const auto& l : labels) {
    Doc d;
    d["type"] = std::string(to_string(l.type));
    d["subtype"] = l.subtype ? Doc(std::string(to_string(*l.subtype))) : Doc(nullptr);
    d["predicate"] = l.predicate.str();
    d["line"] = l.evidence ? Doc(l.evidence->start_line) : Doc(nullptr);
    d["label"] = l.str();
    ls.push_back(std::move(d));
  }
  doc["labels"] = std::move(ls);
  return doc;
}

std::string render_diff_document(const Doc& doc) {
  std::string out;
  for (const auto& p : doc["diff"]) {
    out += p["kind"].get<std::string>() + " " + p["predicate"].get<std::string>();
    if (!p["renamed_from"].is_null()) out += " (renamed from " + p["renamed_from"].get<std::string>() + ")";
    out += "\n";
    for (const auto& e : p["edits"]) {
      out += "  " + e["kind"].get<std::string>();
      if (!e["new_index"].is_null()) out += " (clause " + std::to_string(e["new_index"].get<std::size_t>() + 1) + ")";
      else if (!e["old_index"].is_null()) out += " (old clause " + std::to_string(e["old_index"].get<std::size_t>() + 1) + ")";
      out += "\n";
      for (const auto& op : e["script"]) out += "    " + op["description"].get<std::string>() + "\n";
    }
  }
  out += "Bug labels:\n";
  for (const auto& l : doc["labels"]) {
    out += "  " + l["label"].get<std::string>() + " in " + l["predicate"].get<std::string>();
    if (!l["line"].is_null()) out += " (line " + std::to_string(l["line"].get<int>()) + ")";
    out += "\n";
  }
  return out;
}

Doc stats_document(const CorpusStats& stats) {
  Doc doc;
  doc["schema_version"] = 1;
  doc["records"] = stats.records;
  Doc as = Doc::array();
  for (const auto& a : stats.assignments)
    as.push_back({{"assignment", a.assignment},
                  {"correct", a.correct},
                  {"incorrect", a.incorrect},
                  {"total", a.total},
                  {"avg_clauses", a.avg_clauses}});
  doc["assignments"] = std::move(as);
  Doc cats = Doc::array();
  for (const auto& [label, n] : stats.categories)
    cats.push_back({{"progress", std::string(to_string(label.progress))}, {"correct", label.correct}, {"count", n}});
  doc["categories"] = std::move(cats);
  return doc;
}

Corpus load(const std::filesystem::path& root, const std::optional<std::string>& assignment, std::ostream& err,
            bool& ok) {
  try {
    ok = true;
    return load_corpus(root, assignment);
  } catch (const CorpusError& e) {
    err << "prologian: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "prologian: " << e.what() << "\n";
  }
  ok = false;
  return {};
}

}  // namespace

int cmd_history(const HistoryOptions& o, std::ostream& out, std::ostream& err) {
  bool ok = false;
  Corpus corpus = load(o.corpus, o.assignment, err, ok);
  if (!ok) return kInputError;
  CorpusStats stats = corpus_stats(corpus.records, corpus.full_sets);
  Doc doc = stats_document(stats);
  Doc subs = Doc::array();
  for (const auto& c : stats.classified)
    subs.push_back({{"assignment", c.assignment},
                    {"student", c.student},
                    {"timestamp", c.timestamp},
                    {"tests_passed", c.tests_passed},
                    {"progress", std::string(to_string(c.label.progress))},
                    {"correct", c.label.correct}});
  doc["submissions"] = std::move(subs);
  if (o.json) {
    out << doc.dump(2) << "\n";
    return kPassed;
  }
  for (const auto& s : doc["submissions"])
    out << s["assignment"].get<std::string>() << "  " << s["student"].get<std::string>() << "  "
        << s["timestamp"].get<std::int64_t>() << "  " << s["progress"].get<std::string>() << "/"
        << (s["correct"].get<bool>() ? "Correct" : "Incorrect") << "  (" << s["tests_passed"].get<std::size_t>()
        << " passed)\n";
  out << "\n" << render_category_table(stats);
  return kPassed;
}

int cmd_classify_bug(const ClassifyOptions& o, std::ostream& out, std::ostream& err) {
  std::string a, b;
  try {
    a = read_text(o.old_program);
    b = read_text(o.new_program);
  } catch (const InputError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  }
  ParseResult pa = parse_program(a);
  ParseResult pb = parse_program(b);
  if (!pa.ok() || !pb.ok()) {
    if (!pa.ok()) err << o.old_program.string() << ":\n" << render_errors(a, pa.errors);
    if (!pb.ok()) err << o.new_program.string() << ":\n" << render_errors(b, pb.errors);
    return kInputError;
  }
  std::vector<PredicateDiff> diff = diff_programs(pa.program, pb.program);
  if (diff.empty()) {
    err << "prologian: the programs are identical; nothing to classify\n";
    return kInputError;
  }
  Doc doc = diff_document(diff, classify_bug(diff, pa.program, pb.program));
  out << (o.json ? doc.dump(2) + "\n" : render_diff_document(doc));
  return kPassed;
}

int cmd_stats(const StatsOptions& o, std::ostream& out, std::ostream& err) {
  bool ok = false;
  Corpus corpus = load(o.corpus, o.assignment, err, ok);
  if (!ok) return kInputError;
  CorpusStats stats = corpus_stats(corpus.records, corpus.full_sets);
  if (o.json) out << stats_document(stats).dump(2) << "\n";
  else out << render_stats_table(stats) << "\n" << render_category_table(stats);
  return kPassed;
}

}  // namespace prologian::cli
