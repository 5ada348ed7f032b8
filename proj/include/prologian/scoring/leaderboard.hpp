#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace prologian {

struct LeaderboardEntry {
  /// Opaque pseudonymous id supplied by the caller.
  std::string student;
  unsigned points = 0;
  std::size_t tests_passed = 0;
  /// When this score was first reached (seconds since the Unix epoch).
  std::int64_t timestamp = 0;

  bool operator==(const LeaderboardEntry&) const = default;
};

using Leaderboard = std::vector<LeaderboardEntry>;

/// Points desc, tests desc, timestamp asc, then student id.
bool ranks_before(const LeaderboardEntry& a, const LeaderboardEntry& b);

/// Replaces the student's entry only on a strictly better (points, tests).
Leaderboard update_leaderboard(Leaderboard board, const LeaderboardEntry& entry);

class LeaderboardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LockTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws LeaderboardError when malformed or when a student appears twice.
Leaderboard parse_leaderboard(std::string_view json_text);
std::string serialize_leaderboard(const Leaderboard& board);

/// Missing files read as an empty board.
Leaderboard load_leaderboard(const std::filesystem::path& path);
/// Writes a temporary file next to `path`, then renames it over `path`.
void save_leaderboard(const std::filesystem::path& path, const Leaderboard& board);

/// Advisory lock held through `<path>.lock`, created exclusively.
class LeaderboardLock {
 public:
  LeaderboardLock(const std::filesystem::path& board, std::chrono::milliseconds timeout);
  ~LeaderboardLock();
  LeaderboardLock(const LeaderboardLock&) = delete;
  LeaderboardLock& operator=(const LeaderboardLock&) = delete;

 private:
  std::filesystem::path lock_path_;
};

/// Locked read-modify-write. The file is left untouched when nothing changes.
Leaderboard add_to_leaderboard(const std::filesystem::path& path, const LeaderboardEntry& entry,
                               std::chrono::milliseconds timeout = std::chrono::seconds(10));

/// Aligned table with a rank column.
std::string render_leaderboard(const Leaderboard& board);

}  // namespace prologian
