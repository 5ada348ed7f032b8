#include "library.hpp"

#include <algorithm>
#include <set>

#include "prologian/syntax/parser.hpp"

namespace prologian {

namespace detail {

namespace {

// Helpers keep the list argument first so first-argument indexing leaves no
// spurious choice points on proper lists.
constexpr std::string_view kLibrarySource = R"PL(
append([], L, L).
append([H|T], L, [H|R]) :- append(T, L, R).

member(X, [H|T]) :- '$member'(T, X, H).
'$member'(_, X, X).
'$member'([H|T], X, _) :- '$member'(T, X, H).

memberchk(X, L) :- '$memberchk'(L, X).
'$memberchk'([H|T], X) :- ( X = H -> true ; '$memberchk'(T, X) ).

length(L, N) :- is_list(L), !, '$length'(L, 0, N).
length(L, N) :- integer(N), !, N >= 0, '$length_make'(N, L0), L = L0.
length(L, N) :- var(N), '$length_gen'(L, 0, N).
'$length'([], N, N).
'$length'([_|T], N0, N) :- N1 is N0 + 1, '$length'(T, N1, N).
'$length_make'(0, L) :- !, L = [].
'$length_make'(N, [_|T]) :- N1 is N - 1, '$length_make'(N1, T).
'$length_gen'([], N, N).
'$length_gen'([_|T], N0, N) :- N1 is N0 + 1, '$length_gen'(T, N1, N).

reverse(L, R) :- '$reverse'(L, [], R).
'$reverse'([], A, A).
'$reverse'([H|T], A, R) :- '$reverse'(T, [H|A], R).

nth0(I, L, E) :- integer(I), !, I >= 0, '$nth_det'(I, L, E).
nth0(I, L, E) :- var(I), '$nth_gen'(L, E, 0, I).
nth1(I, L, E) :- integer(I), !, I >= 1, I0 is I - 1, '$nth_det'(I0, L, E).
nth1(I, L, E) :- var(I), '$nth_gen'(L, E, 1, I).
'$nth_det'(0, L, E) :- !, L = [E|_].
'$nth_det'(I, [_|T], E) :- I1 is I - 1, '$nth_det'(I1, T, E).
'$nth_gen'([E|_], E, B, B).
'$nth_gen'([_|T], E, B0, B) :- B1 is B0 + 1, '$nth_gen'(T, E, B1, B).

last([X|Xs], Last) :- '$last'(Xs, X, Last).
'$last'([], Last, Last).
'$last'([X|Xs], _, Last) :- '$last'(Xs, X, Last).

maplist(G, L) :- '$maplist'(L, G).
'$maplist'([], _).
'$maplist'([X|Xs], G) :- call(G, X), '$maplist'(Xs, G).
maplist(G, L1, L2) :- '$maplist'(L1, L2, G).
'$maplist'([], [], _).
'$maplist'([X|Xs], [Y|Ys], G) :- call(G, X, Y), '$maplist'(Xs, Ys, G).
maplist(G, L1, L2, L3) :- '$maplist'(L1, L2, L3, G).
'$maplist'([], [], [], _).
'$maplist'([X|Xs], [Y|Ys], [Z|Zs], G) :- call(G, X, Y, Z), '$maplist'(Xs, Ys, Zs, G).

foldl(G, L, V0, V) :- '$foldl'(L, G, V0, V).
'$foldl'([], _, V, V).
'$foldl'([X|Xs], G, V0, V) :- call(G, X, V0, V1), '$foldl'(Xs, G, V1, V).
foldl(G, L1, L2, V0, V) :- '$foldl'(L1, L2, G, V0, V).
'$foldl'([], [], _, V, V).
'$foldl'([X|Xs], [Y|Ys], G, V0, V) :- call(G, X, Y, V0, V1), '$foldl'(Xs, Ys, G, V1, V).
foldl(G, L1, L2, L3, V0, V) :- '$foldl'(L1, L2, L3, G, V0, V).
'$foldl'([], [], [], _, V, V).
'$foldl'([X|Xs], [Y|Ys], [Z|Zs], G, V0, V) :- call(G, X, Y, Z, V0, V1), '$foldl'(Xs, Ys, Zs, G, V1, V).

sum_list(Xs, Sum) :- '$sum_list'(Xs, 0, Sum).
sumlist(Xs, Sum) :- '$sum_list'(Xs, 0, Sum).
'$sum_list'([], Sum, Sum).
'$sum_list'([X|Xs], Sum0, Sum) :- Sum1 is Sum0 + X, '$sum_list'(Xs, Sum1, Sum).

max_list([H|T], M) :- '$max_list'(T, H, M).
'$max_list'([], M, M).
'$max_list'([H|T], M0, M) :- M1 is max(M0, H), '$max_list'(T, M1, M).
min_list([H|T], M) :- '$min_list'(T, H, M).
'$min_list'([], M, M).
'$min_list'([H|T], M0, M) :- M1 is min(M0, H), '$min_list'(T, M1, M).

msort(L, S) :- '$msort'(L, S).

select(X, [H|T], R) :- '$select'(T, H, X, R).
'$select'(T, H, H, T).
'$select'([H2|T], H, X, [H|R]) :- '$select'(T, H2, X, R).

delete([], _, []).
delete([E|T], D, R) :- ( \+ E \= D -> delete(T, D, R) ; R = [E|R1], delete(T, D, R1) ).

subtract([], _, []).
subtract([E|T], D, R) :- ( '$memberchk'(D, E) -> subtract(T, D, R) ; R = [E|R1], subtract(T, D, R1) ).

numlist(L, H, R) :- L =< H, '$numlist'(L, H, R).
'$numlist'(H, H, R) :- !, R = [H].
'$numlist'(L, H, [L|T]) :- L1 is L + 1, '$numlist'(L1, H, T).

include(P, L, R) :- '$include'(L, P, R).
'$include'([], _, []).
'$include'([X|Xs], P, R) :- ( call(P, X) -> R = [X|R1] ; R = R1 ), '$include'(Xs, P, R1).
exclude(P, L, R) :- '$exclude'(L, P, R).
'$exclude'([], _, []).
'$exclude'([X|Xs], P, R) :- ( call(P, X) -> R = R1 ; R = [X|R1] ), '$exclude'(Xs, P, R1).

once(G) :- call(G), !.
ignore(G) :- ( call(G) -> true ; true ).
forall(C, A) :- \+ ( call(C), \+ call(A) ).
)PL";

}  // namespace

const Program& library_program() {
  static const Program program = [] {
    ParseResult parsed = parse_program(kLibrarySource, Origin::Library);
    return parsed.program;
  }();
  return program;
}

const std::vector<BuiltinSpec>& builtin_specs() {
  static const std::vector<BuiltinSpec> specs = [] {
    std::vector<BuiltinSpec> s = {
        {"true", 0, Builtin::True},       {"fail", 0, Builtin::Fail},         {"false", 0, Builtin::Fail},
        {"!", 0, Builtin::Cut},           {"=", 2, Builtin::Unify},           {"\\=", 2, Builtin::NotUnify},
        {"==", 2, Builtin::Identical},    {"\\==", 2, Builtin::NotIdentical}, {"is", 2, Builtin::Is},
        {"=:=", 2, Builtin::ArithEq},     {"=\\=", 2, Builtin::ArithNe},      {"<", 2, Builtin::Less},
        {">", 2, Builtin::Greater},       {"=<", 2, Builtin::LessEq},         {">=", 2, Builtin::GreaterEq},
        {"\\+", 1, Builtin::Not},         {"not", 1, Builtin::Not},           {",", 2, Builtin::Conj},
        {";", 2, Builtin::Disj},          {"->", 2, Builtin::IfThen},         {"findall", 3, Builtin::Findall},
        {"between", 3, Builtin::Between}, {"var", 1, Builtin::Var},           {"nonvar", 1, Builtin::Nonvar},
        {"atom", 1, Builtin::Atom},       {"number", 1, Builtin::Number},     {"integer", 1, Builtin::Integer},
        {"float", 1, Builtin::Float},     {"atomic", 1, Builtin::Atomic},     {"compound", 1, Builtin::Compound},
        {"callable", 1, Builtin::Callable}, {"is_list", 1, Builtin::IsList},  {"$msort", 2, Builtin::Msort},
        {"sort", 2, Builtin::Sort},       {"compare", 3, Builtin::Compare},   {"@<", 2, Builtin::TermLess},
        {"@>", 2, Builtin::TermGreater},  {"@=<", 2, Builtin::TermLessEq},    {"@>=", 2, Builtin::TermGreaterEq},
        {"write", 1, Builtin::Write},     {"print", 1, Builtin::Print},       {"writeq", 1, Builtin::Print},
        {"writeln", 1, Builtin::Writeln}, {"nl", 0, Builtin::Nl},             {"format", 1, Builtin::Format},
        {"format", 2, Builtin::Format},   {"functor", 3, Builtin::Functor},   {"arg", 3, Builtin::Arg},
        {"=..", 2, Builtin::Univ},        {"copy_term", 2, Builtin::CopyTerm}, {"succ", 2, Builtin::Succ},
        {"plus", 3, Builtin::Plus},
    };
    for (std::size_t n = 1; n <= 8; ++n) s.push_back({"call", n, Builtin::Call});
    return s;
  }();
  return specs;
}

}  // namespace detail

bool is_builtin(const PredicateIndicator& pi) {
  static const std::set<PredicateIndicator> all = [] {
    std::set<PredicateIndicator> s;
    for (const auto& b : detail::builtin_specs()) s.insert({std::string(b.name), b.arity});
    return s;
  }();
  return all.count(pi) != 0;
}

bool is_library_predicate(const PredicateIndicator& pi) {
  return !pi.name.empty() && pi.name.front() != '$' && detail::library_program().defines(pi);
}

std::vector<PredicateIndicator> builtin_predicates() {
  std::vector<PredicateIndicator> out;
  for (const auto& b : detail::builtin_specs()) out.push_back({std::string(b.name), b.arity});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PredicateIndicator> library_predicates() {
  std::vector<PredicateIndicator> out;
  for (const auto& pi : detail::library_program().predicates())
    if (pi.name.front() != '$') out.push_back(pi);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace prologian
