#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian {

struct SyntaxError {
  std::string message;
  SourceSpan span;
  /// Rendered excerpt of the source with an underline marker (see render_error).
  std::string snippet;
};

/// Thrown by the non-recovering entry points (parse_query, parse_term).
class SyntaxErrorException : public std::runtime_error {
 public:
  explicit SyntaxErrorException(SyntaxError err)
      : std::runtime_error(err.message), error_(std::move(err)) {}
  const SyntaxError& error() const { return error_; }

 private:
  SyntaxError error_;
};

struct RenderOptions {
  bool color = false;
};

/// Renders the offending line(s) with a `line:col` gutter and a `^~~` marker
/// line under the span. Multi-line spans show the first and last lines with
/// an ellipsis line between them.
std::string render_error(std::string_view source, const SyntaxError& err, RenderOptions opts = {});

/// One block per error, in source order, each preceded by its message.
std::string render_errors(std::string_view source, std::vector<SyntaxError> errors,
                          RenderOptions opts = {});

/// Computes the span of [begin, end) in `source`.
SourceSpan span_of(std::string_view source, std::size_t begin, std::size_t end);

SyntaxError make_syntax_error(std::string_view source, std::string message, SourceSpan span);

}  // namespace prologian
