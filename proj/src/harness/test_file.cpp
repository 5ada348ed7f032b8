#include "prologian/harness/test_file.hpp"

#include <algorithm>
#include <set>

#include "prologian/engine/engine.hpp"
#include "prologian/syntax/parser.hpp"
#include "prologian/syntax/writer.hpp"

namespace prologian {

namespace {

struct OpenSuite {
  std::string name;
  SourceSpan span;
};

bool is_control(const Term& t) {
  return t.is_compound(",", 2) || t.is_compound(";", 2) || t.is_compound("->", 2) || t.is_compound("\\+", 1) ||
         t.is_compound("not", 1);
}

void collect_calls(const Term& t, std::vector<PredicateIndicator>& out) {
  if (!t.is_callable()) return;
  if (is_control(t)) {
    for (const Term& a : t.args) collect_calls(a, out);
    return;
  }
  if (t.name == "call" && !t.args.empty()) {
    const Term& g = t.args[0];
    if (g.is_callable()) {
      Term extended = g;
      for (std::size_t i = 1; i < t.args.size(); ++i) extended.args.push_back(t.args[i]);
      if (extended.args.empty()) extended = Term::atom(g.name);
      else extended.kind = Term::Kind::Compound;
      collect_calls(extended, out);
    }
    return;
  }
  if (t.is_compound("findall", 3)) {
    collect_calls(t.args[1], out);
    return;
  }
  out.push_back(t.indicator());
}

std::string_view text_of(std::string_view source, const SourceSpan& span) {
  return source.substr(span.start_offset, span.end_offset - span.start_offset);
}

}  // namespace

std::vector<PredicateIndicator> direct_calls(const Term& body) {
  std::vector<PredicateIndicator> calls;
  collect_calls(body, calls);
  std::vector<PredicateIndicator> unique;
  for (auto& c : calls)
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  return unique;
}

std::vector<PredicateIndicator> infer_targets(const std::string& suite, const Term& body, const Program& helpers) {
  std::vector<PredicateIndicator> calls = direct_calls(body);
  std::vector<PredicateIndicator> named;
  for (const auto& c : calls)
    if (c.name == suite && !is_builtin(c)) named.push_back(c);
  if (!named.empty()) return named;
  std::vector<PredicateIndicator> out;
  for (const auto& c : calls)
    if (!is_builtin(c) && !is_library_predicate(c) && !helpers.defines(c)) out.push_back(c);
  return out;
}

TestFile parse_test_file(std::string_view source) {
  TestFile out;
  ReadResult read = read_terms(source);
  out.errors = std::move(read.errors);
  std::optional<OpenSuite> open;
  std::set<std::pair<std::string, std::string>> seen;

  auto error = [&](std::string message, const SourceSpan& span) {
    out.errors.push_back(make_syntax_error(source, std::move(message), span));
  };

  for (auto& rt : read.terms) {
    const Term& t = rt.term;
    if (t.is_compound(":-", 1)) {
      const Term& d = t.args[0];
      if ((d.is_compound("begin_tests", 1) || d.is_compound("begin_tests", 2))) {
        if (open) {
          error("nested test suite: '" + format_term(d.args[0]) + "' opened inside '" + open->name + "'", rt.span);
          continue;
        }
        open = OpenSuite{format_term(d.args[0], WriteOptions{false, false}), rt.span};
        continue;
      }
      if (d.is_compound("end_tests", 1)) {
        std::string name = format_term(d.args[0], WriteOptions{false, false});
        if (!open) error("end_tests(" + name + ") without matching begin_tests", rt.span);
        else if (open->name != name) error("end_tests(" + name + ") does not match begin_tests(" + open->name + ")", rt.span);
        open.reset();
        continue;
      }
      out.helpers.add_directive(d);
      continue;
    }

    bool is_test = open && (t.is_compound(":-", 2) ? (t.args[0].is_compound("test", 1) || t.args[0].is_compound("test", 2))
                                                   : (t.is_compound("test", 1) || t.is_compound("test", 2)));
    if (!is_test) {
      std::string msg;
      if (auto clause = term_to_clause(rt, Origin::Tests, &msg)) out.helpers.add_clause(std::move(*clause));
      else error(msg, t.span);
      continue;
    }

    const Term& head = t.is_compound(":-", 2) ? t.args[0] : t;
    TestCase tc;
    tc.suite = open->name;
    tc.name = format_term(head.args[0]);
    tc.body = t.is_compound(":-", 2) ? t.args[1] : Term::atom("true", head.span);
    tc.span = rt.span;
    tc.text = std::string(text_of(source, rt.span));

    bool bad = false;
    if (head.args.size() == 2) {
      std::vector<const Term*> opts;
      ListView view = view_list(head.args[1]);
      if (view.tail && view.proper()) opts = view.items;
      else opts.push_back(&head.args[1]);
      for (const Term* o : opts) {
        if (o->is_atom("fail") || o->is_atom("false")) {
          tc.expect_fail = true;
        } else if (o->is_atom("nondet")) {
          tc.nondet = true;
        } else if (o->is_compound("all", 1) && o->args[0].is_compound("==", 2)) {
          tc.all_template = o->args[0].args[0];
          tc.all_expected = o->args[0].args[1];
        } else {
          error("unknown test option '" + format_term(*o) + "'", o->span);
          bad = true;
        }
      }
      if (tc.expect_fail && tc.all_template) {
        error("conflicting test options: fail and all/1", head.args[1].span);
        bad = true;
      }
    }
    if (!seen.insert({tc.suite, tc.name}).second) {
      error("duplicate test label '" + tc.name + "' in suite '" + tc.suite + "'", head.span);
      bad = true;
    }
    if (!bad) out.cases.push_back(std::move(tc));
  }
  if (open) error("unterminated test suite '" + open->name + "'", open->span);

  for (auto& tc : out.cases) tc.targets = infer_targets(tc.suite, tc.body, out.helpers);
  std::stable_sort(out.errors.begin(), out.errors.end(), [](const SyntaxError& a, const SyntaxError& b) {
    return a.span.start_offset < b.span.start_offset;
  });
  return out;
}

}  // namespace prologian
