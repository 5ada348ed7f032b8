#include <iostream>

#include <json.hpp>

#include "common.hpp"
#include "prologian/scoring/leaderboard.hpp"
#include "prologian/scoring/scorecard.hpp"

namespace prologian::cli {

int cmd_rank(const RankOptions& o, std::ostream& out, std::ostream& err) {
  try {
    Leaderboard board;
    if (o.add_scorecard) {
      Scorecard card = scorecard_from_json(read_text(*o.add_scorecard));
      LeaderboardEntry entry{*o.student, card.total_points, card.tests_passed, card.timestamp};
      board = add_to_leaderboard(o.board, entry, std::chrono::milliseconds(o.lock_timeout_ms));
    } else {
      board = load_leaderboard(o.board);
    }
    if (o.show || o.json) out << (o.json ? serialize_leaderboard(board) : render_leaderboard(board));
    return kPassed;
  } catch (const LockTimeout& e) {
    err << "prologian: " << e.what() << "\n";
    return kInternalError;
  } catch (const LeaderboardError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  } catch (const SpecError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace prologian::cli
