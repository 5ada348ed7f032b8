#include "prologian/syntax/diagnostics.hpp"

#include <algorithm>
#include <sstream>

#include "line_map.hpp"

namespace prologian {

LineMap::LineMap(std::string_view source) : source_(source) {
  starts_.push_back(0);
  for (std::size_t i = 0; i < source.size(); ++i)
    if (source[i] == '\n') starts_.push_back(i + 1);
}

std::pair<int, int> LineMap::line_col(std::size_t offset) const {
  offset = std::min(offset, source_.size());
  auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  std::size_t line = static_cast<std::size_t>(it - starts_.begin()) - 1;
  int col = 1;
  for (std::size_t i = starts_[line]; i < offset; ++i)
    if ((static_cast<unsigned char>(source_[i]) & 0xC0) != 0x80) ++col;
  return {static_cast<int>(line) + 1, col};
}

SourceSpan LineMap::span(std::size_t begin, std::size_t end) const {
  SourceSpan s;
  s.start_offset = std::min(begin, source_.size());
  s.end_offset = std::clamp(end, s.start_offset, source_.size());
  std::tie(s.start_line, s.start_col) = line_col(s.start_offset);
  std::tie(s.end_line, s.end_col) = line_col(s.end_offset);
  return s;
}

std::string_view LineMap::line_text(int line) const {
  auto idx = static_cast<std::size_t>(line - 1);
  if (idx >= starts_.size()) return {};
  std::size_t b = starts_[idx];
  std::size_t e = idx + 1 < starts_.size() ? starts_[idx + 1] - 1 : source_.size();
  if (e > b && source_[e - 1] == '\r') --e;
  return source_.substr(b, e - b);
}

SourceSpan span_of(std::string_view source, std::size_t begin, std::size_t end) {
  return LineMap(source).span(begin, end);
}

namespace {

constexpr std::string_view kRed = "\x1b[31;1m";
constexpr std::string_view kBlue = "\x1b[34;1m";
constexpr std::string_view kReset = "\x1b[0m";

int display_width(std::string_view text) {
  int w = 0;
  for (char c : text)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++w;
  return w;
}

// Marker starting at column `from` (1-based) covering `width` columns.
std::string marker(int from, int width) {
  std::string m(static_cast<std::size_t>(std::max(from - 1, 0)), ' ');
  m += '^';
  if (width > 1) m.append(static_cast<std::size_t>(width - 1), '~');
  return m;
}

}  // namespace

std::string render_error(std::string_view source, const SyntaxError& err, RenderOptions opts) {
  LineMap map(source);
  const auto& sp = err.span;
  std::string first_prefix = std::to_string(sp.start_line) + ":" + std::to_string(sp.start_col);
  std::string last_prefix = std::to_string(sp.end_line) + ":" + std::to_string(sp.end_col);
  std::size_t gutter = std::max(first_prefix.size(), last_prefix.size());
  auto pad = [&](std::string s) {
    s.resize(gutter, ' ');
    return s;
  };
  auto gutter_text = [&](const std::string& s) {
    std::string g = pad(s) + " | ";
    return opts.color ? std::string(kBlue) + g + std::string(kReset) : g;
  };
  auto mark = [&](const std::string& m) {
    return opts.color ? std::string(kRed) + m + std::string(kReset) : m;
  };

  std::ostringstream out;
  std::string_view first = map.line_text(sp.start_line);
  if (sp.start_line == sp.end_line) {
    int width = std::max(sp.end_col - sp.start_col, 1);
    out << gutter_text(first_prefix) << first << '\n';
    out << gutter_text("") << mark(marker(sp.start_col, width)) << '\n';
    return out.str();
  }
  std::string_view last = map.line_text(sp.end_line);
  int first_width = std::max(display_width(first) - sp.start_col + 1, 1);
  out << gutter_text(first_prefix) << first << '\n';
  out << gutter_text("") << mark(marker(sp.start_col, first_width)) << '\n';
  out << gutter_text("") << "\xE2\x80\xA6" << '\n';
  out << gutter_text(std::to_string(sp.end_line) + ":1") << last << '\n';
  out << gutter_text("") << mark(marker(1, std::max(sp.end_col - 1, 1))) << '\n';
  return out.str();
}

std::string render_errors(std::string_view source, std::vector<SyntaxError> errors, RenderOptions opts) {
  std::stable_sort(errors.begin(), errors.end(), [](const SyntaxError& a, const SyntaxError& b) {
    return a.span.start_offset < b.span.start_offset;
  });
  std::string out;
  for (const auto& e : errors) {
    out += "syntax error: " + e.message + "\n";
    out += render_error(source, e, opts);
  }
  return out;
}

SyntaxError make_syntax_error(std::string_view source, std::string message, SourceSpan span) {
  SyntaxError err{std::move(message), span, {}};
  err.snippet = render_error(source, err);
  return err;
}

}  // namespace prologian
