#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "prologian/cli/commands.hpp"

using namespace prologian;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = fs::path(PROLOGIAN_TEST_DATA) / "fixtures";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "prologian");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Run check(const std::string& submission, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {"check",
                                   (kFixtures / "check" / submission).string(),
                                   "--spec",
                                   (kFixtures / "check" / "spec.json").string(),
                                   "--tests",
                                   (kFixtures / "check" / "tests.plt").string(),
                                   "--timestamp",
                                   "1700000000",
                                   "--color",
                                   "never"};
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("prologian-cli-" + std::to_string(std::random_device{}()) + "-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(check("correct.pl").code == cli::kPassed);
  CHECK(check("max_nocut.pl").code == cli::kFailures);
  CHECK(check("wrong_argument.pl").code == cli::kFailures);
  CHECK(check("syntax_error.pl").code == cli::kFailures);
  CHECK(check("loop.pl").code == cli::kFailures);
}

TEST_CASE("check reports the open choice point of max without cut") {
  Run r = check("max_nocut.pl");
  CHECK(r.out.find("backtracking gives another answer: M = 2") != std::string::npos);
}

TEST_CASE("check reports unknown predicates with suggestions") {
  Run r = check("misspelled.pl");
  CHECK(r.out.find("unknown predicate multiply/3; did you mean mult/3?") != std::string::npos);
}

TEST_CASE("check reports possible infinite loops") {
  Run r = check("loop.pl");
  CHECK(r.out.find("possible infinite loop in mult/3") != std::string::npos);
}

TEST_CASE("check input errors exit with 2") {
  CHECK(check("does_not_exist.pl").code == cli::kInputError);
  Run missing_spec = run({"check", (kFixtures / "check" / "correct.pl").string(), "--spec", "/nonexistent/spec.json",
                          "--tests", (kFixtures / "check" / "tests.plt").string()});
  CHECK(missing_spec.code == cli::kInputError);
  CHECK(run({"check"}).code == cli::kInputError);
  CHECK(run({"no-such-command"}).code == cli::kInputError);
}

TEST_CASE("check writes a report directory") {
  TempDir dir;
  Run r = check("wrong_argument.pl", {"--report", dir.path.string()});
  CHECK(r.code == cli::kFailures);
  CHECK(fs::exists(dir.path / "report.md"));
  CHECK(fs::exists(dir.path / "scorecard.json"));
  auto doc = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(doc["scorecard"]["total_points"] == 5);
}

TEST_CASE("check --json prints the report document") {
  Run r = check("correct.pl", {"--json"});
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["scorecard"]["total_points"] == 15);
  CHECK(doc["schema_version"] == 1);
}

TEST_CASE("repeated checks are byte-identical") {
  TempDir a, b;
  check("wrong_argument.pl", {"--report", a.path.string()});
  check("wrong_argument.pl", {"--report", b.path.string()});
  CHECK(slurp(a.path / "report.md") == slurp(b.path / "report.md"));
  CHECK(slurp(a.path / "report.json") == slurp(b.path / "report.json"));
}

TEST_CASE("rank adds and shows") {
  TempDir dir;
  Run c = check("wrong_argument.pl", {"--report", dir.path.string()});
  fs::path board = dir.path / "board.json";
  fs::path card = dir.path / "scorecard.json";
  CHECK(run({"rank", "--board", board.string(), "--add", card.string(), "--student", "s1"}).code == cli::kPassed);
  std::string first = slurp(board);
  CHECK(run({"rank", "--board", board.string(), "--add", card.string(), "--student", "s1"}).code == cli::kPassed);
  CHECK(slurp(board) == first);
  Run show = run({"rank", "--board", board.string()});
  CHECK(show.code == cli::kPassed);
  CHECK(show.out.find("s1") != std::string::npos);
  Run json = run({"rank", "--board", board.string(), "--json"});
  CHECK(nlohmann::json::parse(json.out).size() == 1);
}

TEST_CASE("rank rejects bad input") {
  TempDir dir;
  fs::path board = dir.path / "board.json";
  std::ofstream(board) << "{ not json";
  CHECK(run({"rank", "--board", board.string()}).code == cli::kInputError);
  CHECK(run({"rank", "--board", (dir.path / "b2.json").string(), "--add", "x.json"}).code == cli::kInputError);
}

TEST_CASE("classify-bug prints labels") {
  fs::path d = kFixtures / "bugs" / "cut_problem";
  Run r = run({"classify-bug", (d / "old.pl").string(), (d / "new.pl").string()});
  CHECK(r.code == cli::kPassed);
  CHECK(r.out.find("CutProblem/MissingCut") != std::string::npos);
  Run j = run({"classify-bug", (d / "old.pl").string(), (d / "new.pl").string(), "--json"});
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["labels"][0]["type"] == "CutProblem");
  CHECK(run({"classify-bug", (d / "old.pl").string(), (d / "old.pl").string()}).code != cli::kInternalError);
}

TEST_CASE("history and stats over the corpus") {
  fs::path corpus = kFixtures / "corpus";
  Run h = run({"history", corpus.string(), "--json"});
  REQUIRE(h.code == cli::kPassed);
  auto doc = nlohmann::json::parse(h.out);
  CHECK(doc["submissions"].size() == 30);
  std::size_t sum = 0;
  for (const auto& c : doc["categories"]) sum += c["count"].get<std::size_t>();
  CHECK(sum == 30);

  Run s = run({"stats", corpus.string()});
  CHECK(s.code == cli::kPassed);
  CHECK(s.out.find("lists-mult") != std::string::npos);
  Run one = run({"stats", corpus.string(), "--assignment", "lists-max", "--json"});
  auto stats = nlohmann::json::parse(one.out);
  CHECK(stats["records"] == 11);
}
