#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "prologian/engine/substitution.hpp"
#include "prologian/syntax/term.hpp"

namespace prologian {

struct EngineLimits {
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t max_solutions = 64;
  std::uint64_t max_depth = 100'000;

  /// Throws std::invalid_argument unless every limit is positive.
  void validate() const;
};

enum class SolveStatus : std::uint8_t { Exhausted, ChoicePointsRemain, StepLimitReached, DepthLimitReached };
std::string_view to_string(SolveStatus status);

struct Binding {
  std::string name;
  int var_id = -1;
  Term value;
};

/// One answer to a query, restricted to the query's named variables.
struct Answer {
  std::vector<Binding> bindings;
  /// Unexplored alternatives remained when this answer was produced.
  bool open_alternatives = false;

  const Term* get(std::string_view name) const;
  Substitution substitution() const;
  /// `X = 1, Y = f(_A)` style; "true" when there are no bindings.
  std::string str() const;
};

struct SolveOutcome {
  std::vector<Answer> solutions;
  SolveStatus status = SolveStatus::Exhausted;
  std::uint64_t steps_used = 0;
  /// Predicates on the call chain (outermost first) when a limit stopped the search.
  std::vector<PredicateIndicator> limit_call_chain;
};

/// Reads the per-answer flag. Throws std::out_of_range for a bad index.
bool has_open_alternatives(const SolveOutcome& outcome, std::size_t index);

struct RuntimeError {
  enum class Kind : std::uint8_t { UnknownPredicate, Instantiation, TypeError, ZeroDivisor, ResourceLimit };

  Kind kind = Kind::TypeError;
  std::string message;
  /// Set for UnknownPredicate.
  PredicateIndicator predicate;
  /// Call site, when it could be located in user source.
  std::optional<SourceSpan> culprit;
  Origin origin = Origin::Query;
  std::vector<PredicateIndicator> call_chain;

  std::string str() const;
};
std::string_view to_string(RuntimeError::Kind kind);

/// Thrown when a query is aborted by an error (arithmetic, instantiation, ...).
class EngineError : public std::runtime_error {
 public:
  EngineError(RuntimeError err, std::uint64_t steps)
      : std::runtime_error(err.str()), error_(std::move(err)), steps_(steps) {}
  const RuntimeError& error() const { return error_; }
  std::uint64_t steps_used() const { return steps_; }

 private:
  RuntimeError error_;
  std::uint64_t steps_;
};

/// Thrown when the cancellation flag passed in EngineOptions is raised.
class EngineCancelled : public std::runtime_error {
 public:
  EngineCancelled() : std::runtime_error("query cancelled") {}
};

enum class TracePort : std::uint8_t { Call, Exit, Fail, Redo };

struct TraceEvent {
  TracePort port;
  std::size_t depth;
  std::string goal;
};

struct EngineOptions {
  bool occurs_check = true;
  /// Receives call/exit/fail/redo events when set.
  std::function<void(const TraceEvent&)> trace;
  /// Polled periodically; raising it makes the running query throw EngineCancelled.
  const std::atomic<bool>* cancel = nullptr;
  /// Heap cells a single query may allocate before a ResourceLimit error.
  std::size_t max_heap_cells = 16u << 20;
};

/// A number produced by arithmetic evaluation.
using Number = std::variant<std::int64_t, double>;
Term number_to_term(const Number& n);

/// Built-in predicates implemented natively or as control constructs.
bool is_builtin(const PredicateIndicator& pi);
/// Predicates supplied by the bundled Prolog library (append/3, member/2, ...).
bool is_library_predicate(const PredicateIndicator& pi);
std::vector<PredicateIndicator> builtin_predicates();
std::vector<PredicateIndicator> library_predicates();

class Machine;

/// Executes queries against a loaded program. One query runs at a time;
/// engines share no state and may live on different threads.
class Engine {
 public:
  explicit Engine(const Program& program, EngineOptions options = {});
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  /// Starts a new query, abandoning any previous one.
  void start(const Term& query, const EngineLimits& limits = {});
  /// Next answer, or nullopt once the search ends (see status()).
  std::optional<Answer> next();
  /// Whether a further call to next() could still produce an answer.
  bool has_more() const;
  SolveStatus status() const;
  std::uint64_t steps_used() const;
  std::vector<PredicateIndicator> limit_call_chain() const;

  /// Collects up to limits.max_solutions answers. Throws EngineError.
  SolveOutcome solve(const Term& query, const EngineLimits& limits = {});

  /// Unknown predicates called so far, one entry per (name, arity).
  const std::vector<RuntimeError>& unknown_predicates() const;
  /// Text produced by write/1, nl/0 and friends.
  const std::string& output() const;

 private:
  std::unique_ptr<Machine> machine_;
};

/// Loads the program and runs one query.
SolveOutcome solve(const Program& program, const Term& query, const EngineLimits& limits = {},
                   EngineOptions options = {});

/// Evaluates an arithmetic expression after applying `s`. Throws EngineError.
Number eval_arith(const Term& expr, const Substitution& s = {});

}  // namespace prologian
