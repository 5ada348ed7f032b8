#include "prologian/scoring/leaderboard.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "prologian/scoring/scorecard.hpp"

namespace prologian {

bool ranks_before(const LeaderboardEntry& a, const LeaderboardEntry& b) {
  if (a.points != b.points) return a.points > b.points;
  if (a.tests_passed != b.tests_passed) return a.tests_passed > b.tests_passed;
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.student < b.student;
}

Leaderboard update_leaderboard(Leaderboard board, const LeaderboardEntry& entry) {
  auto it = std::find_if(board.begin(), board.end(), [&](const auto& e) { return e.student == entry.student; });
  if (it == board.end()) {
    board.push_back(entry);
  } else if (std::pair(entry.points, entry.tests_passed) > std::pair(it->points, it->tests_passed)) {
    *it = entry;
  }
  std::sort(board.begin(), board.end(), ranks_before);
  return board;
}

Leaderboard parse_leaderboard(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LeaderboardError(std::string("leaderboard is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw LeaderboardError("leaderboard must be a JSON array");
  Leaderboard board;
  std::set<std::string> seen;
  for (const auto& e : doc) {
    try {
      LeaderboardEntry entry;
      entry.student = e.at("student").get<std::string>();
      std::int64_t points = e.at("points").get<std::int64_t>();
      std::int64_t tests = e.at("tests_passed").get<std::int64_t>();
      if (points < 0 || tests < 0) throw LeaderboardError("negative score in leaderboard");
      entry.points = static_cast<unsigned>(points);
      entry.tests_passed = static_cast<std::size_t>(tests);
      entry.timestamp = e.at("timestamp").get<std::int64_t>();
      if (!seen.insert(entry.student).second)
        throw LeaderboardError("student '" + entry.student + "' appears twice in the leaderboard");
      board.push_back(std::move(entry));
    } catch (const nlohmann::json::exception& ex) {
      throw LeaderboardError(std::string("malformed leaderboard entry: ") + ex.what());
    }
  }
  std::sort(board.begin(), board.end(), ranks_before);
  return board;
}

std::string serialize_leaderboard(const Leaderboard& board) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& e : board)
    doc.push_back({{"student", e.student}, {"points", e.points}, {"tests_passed", e.tests_passed}, {"timestamp", e.timestamp}});
  return doc.dump(2) + "\n";
}

Leaderboard load_leaderboard(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return {};
    throw LeaderboardError("cannot read leaderboard " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_leaderboard(buf.str());
}

void save_leaderboard(const std::filesystem::path& path, const Leaderboard& board) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LeaderboardError("cannot write " + tmp.string());
    out << serialize_leaderboard(board);
    out.flush();
    if (!out) throw LeaderboardError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw LeaderboardError("cannot replace " + path.string() + ": " + ec.message());
  }
}

LeaderboardLock::LeaderboardLock(const std::filesystem::path& board, std::chrono::milliseconds timeout)
    : lock_path_(board) {
  lock_path_ += ".lock";
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      ::close(fd);
      return;
    }
    if (errno != EEXIST) throw LeaderboardError("cannot create lock " + lock_path_.string() + ": " + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline)
      throw LockTimeout("timed out waiting for leaderboard lock " + lock_path_.string());
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

LeaderboardLock::~LeaderboardLock() {
  std::error_code ec;
  std::filesystem::remove(lock_path_, ec);
}

Leaderboard add_to_leaderboard(const std::filesystem::path& path, const LeaderboardEntry& entry,
                               std::chrono::milliseconds timeout) {
  LeaderboardLock lock(path, timeout);
  Leaderboard before = load_leaderboard(path);
  Leaderboard after = update_leaderboard(before, entry);
  if (after != before || !std::filesystem::exists(path)) save_leaderboard(path, after);
  return after;
}

std::string render_leaderboard(const Leaderboard& board) {
  std::vector<std::array<std::string, 5>> rows;
  rows.push_back({"Rank", "Student", "Points", "Tests passed", "Since"});
  for (std::size_t i = 0; i < board.size(); ++i) {
    const auto& e = board[i];
    rows.push_back({std::to_string(i + 1), e.student, std::to_string(e.points), std::to_string(e.tests_passed),
                    format_timestamp(e.timestamp)});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string line;
    for (std::size_t c = 0; c < 5; ++c) {
      const std::string& cell = rows[i][c];
      bool right = c == 0 || c == 2 || c == 3;
      std::string pad(width[c] - cell.size(), ' ');
      line += right ? pad + cell : cell + pad;
      if (c + 1 < 5) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (i == 0) {
      std::string rule;
      for (std::size_t c = 0; c < 5; ++c) rule += std::string(width[c], '-') + (c + 1 < 5 ? "  " : "");
      out += rule + "\n";
    }
  }
  return out;
}

}  // namespace prologian
