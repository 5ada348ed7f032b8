#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace prologian {

/// Byte offsets are half-open [start_offset, end_offset). Lines and columns
/// are 1-based; end_col points one past the last character on end_line.
struct SourceSpan {
  std::size_t start_offset = 0;
  std::size_t end_offset = 0;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool contains(const SourceSpan& other) const {
    return start_offset <= other.start_offset && other.end_offset <= end_offset;
  }
  bool operator==(const SourceSpan&) const = default;
};

/// Smallest span covering both arguments.
SourceSpan merge(const SourceSpan& a, const SourceSpan& b);

struct PredicateIndicator {
  std::string name;
  std::size_t arity = 0;

  std::string str() const { return name + "/" + std::to_string(arity); }
  auto operator<=>(const PredicateIndicator&) const = default;
};

struct Term {
  enum class Kind : std::uint8_t { Atom, Integer, Float, Var, Compound };

  Kind kind = Kind::Atom;
  std::string name;  // atom text, functor name or variable name
  std::int64_t int_value = 0;
  double float_value = 0.0;
  int var_id = -1;
  std::vector<Term> args;
  SourceSpan span;

  static Term atom(std::string name, SourceSpan span = {});
  static Term integer(std::int64_t value, SourceSpan span = {});
  static Term floating(double value, SourceSpan span = {});
  static Term var(std::string name, int id, SourceSpan span = {});
  static Term compound(std::string name, std::vector<Term> args, SourceSpan span = {});
  static Term nil(SourceSpan span = {}) { return atom("[]", span); }
  static Term cons(Term head, Term tail, SourceSpan span = {});
  /// Builds a proper list, or a partial list when `tail` is given.
  static Term list(std::vector<Term> items, Term tail = nil());

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_atom(std::string_view n) const { return kind == Kind::Atom && name == n; }
  bool is_var() const { return kind == Kind::Var; }
  bool is_number() const { return kind == Kind::Integer || kind == Kind::Float; }
  bool is_compound() const { return kind == Kind::Compound; }
  bool is_compound(std::string_view n, std::size_t arity) const {
    return kind == Kind::Compound && name == n && args.size() == arity;
  }
  bool is_atomic() const { return kind != Kind::Var && kind != Kind::Compound; }
  bool is_callable() const { return kind == Kind::Atom || kind == Kind::Compound; }
  bool is_cons() const { return is_compound(".", 2); }
  bool is_nil() const { return is_atom("[]"); }

  std::size_t arity() const { return args.size(); }
  /// Only meaningful for callable terms.
  PredicateIndicator indicator() const { return {name, args.size()}; }
  bool is_ground() const;
  /// Number of nodes in the tree.
  std::size_t size() const;
};

/// Equality ignoring spans. Variables are equal when their ids and names match.
bool same_structure(const Term& a, const Term& b);

/// Variables equal by name only; used when comparing terms from separate parses.
bool same_shape_by_name(const Term& a, const Term& b);

/// Collects distinct variables in depth-first, left-to-right order.
std::vector<const Term*> variables_of(const Term& t);

/// Splits a right-nested ','/2 chain into its goals.
std::vector<Term> flatten_conjunction(const Term& t);
Term make_conjunction(const std::vector<Term>& goals);

/// Returns items and the tail if `t` is a (possibly partial) list.
struct ListView {
  std::vector<const Term*> items;
  const Term* tail = nullptr;
  bool proper() const { return tail != nullptr && tail->is_nil(); }
};
ListView view_list(const Term& t);

enum class Origin : std::uint8_t { Submission, Tests, Library, Query };
std::string_view to_string(Origin origin);

struct Clause {
  Term head;
  std::vector<Term> body;  // empty for facts
  SourceSpan span;
  Origin origin = Origin::Submission;
  int var_count = 0;

  bool is_fact() const { return body.empty(); }
  PredicateIndicator indicator() const { return head.indicator(); }
  Term body_term() const;
  /// Rebuilds the clause as a single ':-'/2 (or fact) term.
  Term as_term() const;
};

class Program {
 public:
  void add_clause(Clause clause);
  void add_directive(Term directive) { directives_.push_back(std::move(directive)); }
  /// Appends every clause and directive of `other`, preserving order.
  void append(const Program& other);

  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::vector<Term>& directives() const { return directives_; }
  const std::map<PredicateIndicator, std::vector<std::size_t>>& index() const { return index_; }

  bool defines(const PredicateIndicator& pi) const { return index_.count(pi) != 0; }
  std::vector<const Clause*> clauses_of(const PredicateIndicator& pi) const;
  /// Predicates in order of first definition.
  std::vector<PredicateIndicator> predicates() const;

 private:
  std::vector<Clause> clauses_;
  std::vector<Term> directives_;
  std::map<PredicateIndicator, std::vector<std::size_t>> index_;
  std::vector<PredicateIndicator> order_;
};

}  // namespace prologian
