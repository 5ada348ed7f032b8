#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace prologian::cli {

enum ExitCode : int {
  kPassed = 0,
  /// Ran, but the submission has failures, errors or warnings.
  kFailures = 1,
  /// Bad spec, unreadable or malformed input.
  kInputError = 2,
  kInternalError = 3,
};

enum class ColorMode { Auto, Always, Never };

/// Accepts auto, always and never. Returns nullopt otherwise.
std::optional<ColorMode> parse_color_mode(std::string_view text);

struct CheckOptions {
  std::filesystem::path program;
  std::filesystem::path spec;
  std::filesystem::path tests;
  std::optional<std::filesystem::path> report_dir;
  bool json = false;
  bool trace = false;
  std::optional<std::uint64_t> max_steps;
  /// Unset means PROLOGIAN_COLOR, then auto.
  std::optional<ColorMode> color;
  unsigned timeout_seconds = 60;
  /// Overrides SOURCE_DATE_EPOCH and the program's modification time.
  std::optional<std::int64_t> timestamp;
  std::size_t jobs = 1;
};

struct RankOptions {
  std::filesystem::path board;
  std::optional<std::filesystem::path> add_scorecard;
  std::optional<std::string> student;
  bool show = false;
  bool json = false;
  unsigned lock_timeout_ms = 10'000;
};

struct HistoryOptions {
  std::filesystem::path corpus;
  std::optional<std::string> assignment;
  bool json = false;
};

struct ClassifyOptions {
  std::filesystem::path old_program;
  std::filesystem::path new_program;
  bool json = false;
};

struct StatsOptions {
  std::filesystem::path corpus;
  std::optional<std::string> assignment;
  bool json = false;
};

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err);
int cmd_rank(const RankOptions& options, std::ostream& out, std::ostream& err);
int cmd_history(const HistoryOptions& options, std::ostream& out, std::ostream& err);
int cmd_classify_bug(const ClassifyOptions& options, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);

/// Parses arguments and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prologian::cli
