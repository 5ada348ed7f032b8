#include "prologian/cli/commands.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "common.hpp"

namespace prologian::cli {

std::optional<ColorMode> parse_color_mode(std::string_view text) {
  if (text == "auto") return ColorMode::Auto;
  if (text == "always") return ColorMode::Always;
  if (text == "never") return ColorMode::Never;
  return std::nullopt;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw InputError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

bool use_color(const std::optional<ColorMode>& flag) {
  ColorMode mode = ColorMode::Auto;
  if (flag) {
    mode = *flag;
  } else if (const char* env = std::getenv("PROLOGIAN_COLOR")) {
    if (auto m = parse_color_mode(env)) mode = *m;
  }
  if (mode == ColorMode::Auto) return ::isatty(STDERR_FILENO) != 0;
  return mode == ColorMode::Always;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Automated feedback for Prolog submissions", "prologian"};
  app.require_subcommand(1);

  CheckOptions check;
  std::string check_color;
  std::optional<std::uint64_t> max_steps;
  std::optional<std::int64_t> timestamp;
  auto* c = app.add_subcommand("check", "Run the tests on a submission and write the feedback report");
  c->add_option("program", check.program, "Submission (.pl)")->required();
  c->add_option("--spec", check.spec, "Assignment specification (JSON)")->required();
  c->add_option("--tests", check.tests, "Test file (.plt)")->required();
  c->add_option("--report", check.report_dir, "Directory for report.md, report.json and scorecard.json");
  c->add_flag("--json", check.json, "Print the report document as JSON");
  c->add_flag("--trace", check.trace, "Print call/exit/fail/redo events to standard error");
  c->add_option("--max-steps", max_steps, "Override the assignment's step limit")->check(CLI::PositiveNumber);
  c->add_option("--color", check_color, "auto, always or never")->check(CLI::IsMember({"auto", "always", "never"}));
  c->add_option("--timeout", check.timeout_seconds, "Wall-clock limit in seconds")->check(CLI::PositiveNumber);
  c->add_option("--timestamp", timestamp, "Submission time (seconds since the Unix epoch)");
  c->add_option("--jobs", check.jobs, "Tests run in parallel")->check(CLI::PositiveNumber);

  RankOptions rank;
  auto* r = app.add_subcommand("rank", "Update or show the leaderboard");
  r->add_option("--board", rank.board, "Leaderboard file (JSON)")->required();
  auto* add = r->add_option("--add", rank.add_scorecard, "Scorecard to record");
  auto* student = r->add_option("--student", rank.student, "Pseudonymous student id");
  auto* show = r->add_flag("--show", rank.show, "Print the ranked table");
  r->add_flag("--json", rank.json, "Print the board as JSON");
  r->add_option("--lock-timeout", rank.lock_timeout_ms, "Milliseconds to wait for the lock");
  add->needs(student);
  student->needs(add);
  add->excludes(show);

  HistoryOptions history;
  auto* h = app.add_subcommand("history", "Classify every submission in a corpus against its predecessor");
  h->add_option("corpus", history.corpus, "Corpus directory")->required();
  h->add_option("--assignment", history.assignment, "Restrict to one assignment");
  h->add_flag("--json", history.json, "Print JSON");

  ClassifyOptions classify;
  auto* b = app.add_subcommand("classify-bug", "Diff a buggy program against its fix and label the bug");
  b->add_option("old", classify.old_program, "Buggy version")->required();
  b->add_option("new", classify.new_program, "Fixed version")->required();
  b->add_flag("--json", classify.json, "Print JSON");

  StatsOptions stats;
  auto* s = app.add_subcommand("stats", "Correct and incorrect submissions per assignment");
  s->add_option("corpus", stats.corpus, "Corpus directory")->required();
  s->add_option("--assignment", stats.assignment, "Restrict to one assignment");
  s->add_flag("--json", stats.json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPassed;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPassed;
  } catch (const CLI::ParseError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (c->parsed()) {
      check.max_steps = max_steps;
      check.timestamp = timestamp;
      if (!check_color.empty()) check.color = parse_color_mode(check_color);
      return cmd_check(check, out, err);
    }
    if (r->parsed()) {
      if (!rank.add_scorecard && !rank.show) rank.show = true;
      return cmd_rank(rank, out, err);
    }
    if (h->parsed()) return cmd_history(history, out, err);
    if (b->parsed()) return cmd_classify_bug(classify, out, err);
    if (s->parsed()) return cmd_stats(stats, out, err);
  } catch (const std::exception& e) {
    err << "prologian: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace prologian::cli
