#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian {

class LineMap {
 public:
  explicit LineMap(std::string_view source);

  std::pair<int, int> line_col(std::size_t offset) const;
  SourceSpan span(std::size_t begin, std::size_t end) const;
  /// Line text without its terminator.
  std::string_view line_text(int line) const;

 private:
  std::string_view source_;
  std::vector<std::size_t> starts_;
};

}  // namespace prologian
