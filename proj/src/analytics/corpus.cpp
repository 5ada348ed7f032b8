#include "prologian/analytics/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "prologian/harness/runner.hpp"
#include "prologian/harness/test_file.hpp"
#include "prologian/syntax/parser.hpp"

namespace prologian {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (directories ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::int64_t> parse_timestamp(const std::string& stem) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), v);
  if (ec != std::errc() || ptr != stem.data() + stem.size() || stem.empty()) return std::nullopt;
  return v;
}

}  // namespace

Corpus load_corpus(const fs::path& root, const std::optional<std::string>& assignment, const EngineLimits& limits) {
  if (!fs::is_directory(root)) throw CorpusError("corpus directory " + root.string() + " does not exist");
  Corpus corpus;
  bool found = false;
  for (const fs::path& adir : sorted_entries(root, true)) {
    std::string aid = adir.filename().string();
    if (assignment && aid != *assignment) continue;
    found = true;
    fs::path tests_path = adir / "tests.plt";
    if (!fs::exists(tests_path)) throw CorpusError("assignment " + aid + " has no tests.plt");
    TestFile tests = parse_test_file(read_file(tests_path));
    if (!tests.ok()) throw CorpusError(tests_path.string() + ": " + tests.errors.front().message);
    PassSet& full = corpus.full_sets[aid];
    for (const auto& c : tests.cases) full.insert(c.id());

    for (const fs::path& sdir : sorted_entries(adir, true)) {
      std::vector<SubmissionRecord> history;
      for (const fs::path& file : sorted_entries(sdir, false)) {
        if (file.extension() != ".pl") continue;
        std::optional<std::int64_t> ts = parse_timestamp(file.stem().string());
        if (!ts) throw CorpusError(file.string() + ": submission files must be named <unix-timestamp>.pl");
        SubmissionRecord r;
        r.student = sdir.filename().string();
        r.assignment = aid;
        r.timestamp = *ts;
        r.source = read_file(file);
        ParseResult parsed = parse_program(r.source);
        r.clause_count = parsed.program.clauses().size();
        for (const auto& res : run_suite(parsed.program, tests, limits))
          if (res.verdict == Verdict::Pass) r.passed.insert(res.id());
        history.push_back(std::move(r));
      }
      std::sort(history.begin(), history.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
      for (auto& r : history) corpus.records.push_back(std::move(r));
    }
  }
  if (assignment && !found) throw CorpusError("assignment " + *assignment + " not found in " + root.string());
  return corpus;
}

CorpusStats corpus_stats(const std::vector<SubmissionRecord>& records, const std::map<std::string, PassSet>& full_sets) {
  std::map<std::string, std::map<std::string, std::vector<const SubmissionRecord*>>> groups;
  for (const auto& r : records) groups[r.assignment][r.student].push_back(&r);

  CorpusStats stats;
  stats.records = records.size();
  static const PassSet empty;
  for (auto& [aid, students] : groups) {
    auto fit = full_sets.find(aid);
    const PassSet& full = fit == full_sets.end() ? empty : fit->second;
    AssignmentStats a;
    a.assignment = aid;
    std::size_t clauses = 0;
    for (auto& [sid, history] : students) {
      std::stable_sort(history.begin(), history.end(),
                       [](const auto* x, const auto* y) { return x->timestamp < y->timestamp; });
      std::vector<PassSet> sets;
      for (const auto* r : history) sets.push_back(r->passed);
      std::vector<HistoryLabel> labels = classify_history(sets, full);
      for (std::size_t i = 0; i < history.size(); ++i) {
        const auto* r = history[i];
        ++a.total;
        (labels[i].correct ? a.correct : a.incorrect) += 1;
        clauses += r->clause_count;
        ++stats.categories[labels[i]];
        stats.classified.push_back({sid, aid, r->timestamp, r->passed.size(), labels[i]});
      }
    }
    a.avg_clauses = a.total == 0 ? 0.0 : static_cast<double>(clauses) / static_cast<double>(a.total);
    stats.assignments.push_back(std::move(a));
  }
  return stats;
}

namespace {

std::string table(const std::vector<std::vector<std::string>>& rows, const std::vector<bool>& right) {
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string line;
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      std::string pad(width[c] - rows[i][c].size(), ' ');
      line += right[c] ? pad + rows[i][c] : rows[i][c] + pad;
      if (c + 1 < rows[i].size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (i == 0) {
      std::string rule;
      for (std::size_t c = 0; c < width.size(); ++c) rule += std::string(width[c], '-') + (c + 1 < width.size() ? "  " : "");
      out += rule + "\n";
    }
  }
  return out;
}

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

std::string render_stats_table(const CorpusStats& stats) {
  std::vector<std::vector<std::string>> rows{{"Assignment", "Correct", "Incorrect", "Total", "Avg. Clauses"}};
  std::size_t c = 0, i = 0, t = 0;
  for (const auto& a : stats.assignments) {
    rows.push_back({a.assignment, std::to_string(a.correct), std::to_string(a.incorrect), std::to_string(a.total),
                    fixed2(a.avg_clauses)});
    c += a.correct, i += a.incorrect, t += a.total;
  }
  rows.push_back({"All", std::to_string(c), std::to_string(i), std::to_string(t), ""});
  return table(rows, {false, true, true, true, true});
}

std::string render_category_table(const CorpusStats& stats) {
  std::vector<std::vector<std::string>> rows{{"Category", "Correct", "Incorrect", "Total"}};
  std::size_t all = 0;
  for (Progress p : {Progress::FirstSubmission, Progress::BugFixed, Progress::BugIntroduced, Progress::Mixed,
                     Progress::NoChange}) {
    auto count = [&](bool ok) {
      auto it = stats.categories.find(HistoryLabel{p, ok});
      return it == stats.categories.end() ? std::size_t{0} : it->second;
    };
    std::size_t c = count(true), i = count(false);
    all += c + i;
    rows.push_back({std::string(to_string(p)), std::to_string(c), std::to_string(i), std::to_string(c + i)});
  }
  rows.push_back({"All", "", "", std::to_string(all)});
  return table(rows, {false, true, true, true});
}

}  // namespace prologian
