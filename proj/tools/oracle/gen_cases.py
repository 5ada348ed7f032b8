#!/usr/bin/env python3
"""Generates differential test cases and answers them with SWI-Prolog.

Usage:
    SWIPL_WASM_MODULES=/path/to/node_modules \
        python3 tools/oracle/gen_cases.py --out tests/data/differential_cases.json
"""

import argparse
import json
import os
import random
import subprocess
import sys
from pathlib import Path

MAX_SOLUTIONS = 25

LIST_PROGRAMS = {
    "mult": (
        "mult([], _, []).\n"
        "mult([E1|L1], N, [E2|L2]) :- E2 is E1 * N, mult(L1, N, L2).\n"
    ),
    "max_cut": "max(X, Y, X) :- X >= Y, !.\nmax(_, Y, Y).\n",
    "max_nocut": "max(X, Y, X) :- X >= Y.\nmax(_, Y, Y).\n",
    "len": "len([], 0).\nlen([_|T], N) :- len(T, M), N is M + 1.\n",
    "nrev": (
        "app([], L, L).\n"
        "app([H|T], L, [H|R]) :- app(T, L, R).\n"
        "nrev([], []).\n"
        "nrev([H|T], R) :- nrev(T, RT), app(RT, [H], R).\n"
    ),
    "sum": "sum([], 0).\nsum([H|T], S) :- sum(T, S0), S is S0 + H.\n",
    "fact": "fact(0, 1) :- !.\nfact(N, F) :- N > 0, M is N - 1, fact(M, G), F is N * G.\n",
    "fib": (
        "fib(0, 0).\nfib(1, 1).\n"
        "fib(N, F) :- N > 1, A is N - 1, B is N - 2, fib(A, FA), fib(B, FB), F is FA + FB.\n"
    ),
    "qsort": (
        "qsort([], []).\n"
        "qsort([P|Xs], S) :- part(Xs, P, L, G), qsort(L, SL), qsort(G, SG), append(SL, [P|SG], S).\n"
        "part([], _, [], []).\n"
        "part([X|Xs], P, [X|L], G) :- X =< P, !, part(Xs, P, L, G).\n"
        "part([X|Xs], P, L, [X|G]) :- part(Xs, P, L, G).\n"
    ),
    "del": "del(X, [X|T], T).\ndel(X, [H|T], [H|R]) :- del(X, T, R).\n",
    "perm": (
        "perm([], []).\n"
        "perm(L, [H|T]) :- sel(H, L, R), perm(R, T).\n"
        "sel(X, [X|T], T).\n"
        "sel(X, [H|T], [H|R]) :- sel(X, T, R).\n"
    ),
    "flat": (
        "flat([], []) :- !.\n"
        "flat([H|T], F) :- !, flat(H, FH), flat(T, FT), append(FH, FT, F).\n"
        "flat(X, [X]).\n"
    ),
    "count": (
        "count(_, [], 0).\n"
        "count(X, [X|T], N) :- !, count(X, T, M), N is M + 1.\n"
        "count(X, [_|T], N) :- count(X, T, N).\n"
    ),
    "evens": (
        "evens([], []).\n"
        "evens([H|T], [H|R]) :- 0 is H mod 2, !, evens(T, R).\n"
        "evens([_|T], R) :- evens(T, R).\n"
    ),
    "sublist": "prefix([], _).\nprefix([H|T], [H|L]) :- prefix(T, L).\n",
    "pairs": "pairs(L, X-Y) :- member(X, L), member(Y, L), X @< Y.\n",
    "ite": "sign(X, S) :- ( X > 0 -> S = pos ; X < 0 -> S = neg ; S = zero ).\n",
    "neg": "safe(X, L) :- member(X, [a,b,c,d]), \\+ member(X, L).\n",
    "between": "sq(N, L) :- findall(X-Y, (between(1, N, X), Y is X * X), L).\n",
}


def rand_int_list(rng, lo=-9, hi=9, max_len=5):
    return "[" + ", ".join(str(rng.randint(lo, hi)) for _ in range(rng.randint(0, max_len))) + "]"


def rand_atom_list(rng, max_len=4):
    return "[" + ", ".join(rng.choice("abcd") for _ in range(rng.randint(0, max_len))) + "]"


def list_queries(rng, name):
    """Returns (query, vars) pairs for a curated program."""
    q = []
    if name == "mult":
        for _ in range(4):
            q.append((f"mult({rand_int_list(rng)}, {rng.randint(-3, 3)}, X)", ["X"]))
        q.append(("mult(L, 2, [2, 4])", ["L"]))
        q.append(("mult([1, a], 2, X)", ["X"]))
    elif name in ("max_cut", "max_nocut"):
        for _ in range(4):
            q.append((f"max({rng.randint(-5, 5)}, {rng.randint(-5, 5)}, M)", ["M"]))
        q.append(("max(3, 3, M)", ["M"]))
        q.append(("max(2, 3, 2)", []))
        q.append(("max(A, 3, M)", ["A", "M"]))
    elif name == "len":
        q += [(f"len({rand_atom_list(rng)}, N)", ["N"]) for _ in range(3)]
        q.append(("len([a, b], 2)", []))
    elif name == "nrev":
        q += [(f"nrev({rand_int_list(rng)}, R)", ["R"]) for _ in range(3)]
        q.append(("app(X, Y, [1, 2, 3])", ["X", "Y"]))
    elif name == "sum":
        q += [(f"sum({rand_int_list(rng)}, S)", ["S"]) for _ in range(3)]
        q.append(("sum([1, X], S)", ["X", "S"]))
    elif name == "fact":
        q += [(f"fact({n}, F)", ["F"]) for n in (0, 1, 5, 10)]
        q.append(("fact(-1, F)", ["F"]))
    elif name == "fib":
        q += [(f"fib({n}, F)", ["F"]) for n in (0, 1, 7, 12)]
    elif name == "qsort":
        q += [(f"qsort({rand_int_list(rng, max_len=7)}, S)", ["S"]) for _ in range(4)]
    elif name == "del":
        q += [(f"del(X, {rand_atom_list(rng)}, R)", ["X", "R"]) for _ in range(2)]
        q.append(("del(z, L, [a, b])", ["L"]))
    elif name == "perm":
        q.append(("perm([1, 2, 3], P)", ["P"]))
        q.append(("perm([a, b, c, d], P)", ["P"]))
        q.append(("perm([], P)", ["P"]))
    elif name == "flat":
        q.append(("flat([1, [2, [3, 4]], [], [[5]]], F)", ["F"]))
        q.append(("flat([a, [b]], F)", ["F"]))
    elif name == "count":
        q += [(f"count(a, {rand_atom_list(rng, 6)}, N)", ["N"]) for _ in range(3)]
    elif name == "evens":
        q += [(f"evens({rand_int_list(rng, 0, 20, 6)}, E)", ["E"]) for _ in range(3)]
    elif name == "sublist":
        q.append(("prefix(P, [a, b, c])", ["P"]))
        q.append(("prefix([a, X], [a, b, c])", ["X"]))
    elif name == "pairs":
        q.append(("pairs([c, a, b], P)", ["P"]))
        q.append(("findall(P, pairs([3, 1, 2], P), L)", ["L"]))
    elif name == "ite":
        q += [(f"sign({v}, S)", ["S"]) for v in (5, -2, 0)]
        q.append(("sign(X, S)", ["X", "S"]))
    elif name == "neg":
        q.append(("safe(X, [b, d])", ["X"]))
        q.append(("safe(X, [a, b, c, d])", ["X"]))
    elif name == "between":
        q += [(f"sq({n}, L)", ["L"]) for n in (0, 1, 4)]
    return q


BUILTIN_QUERIES = [
    ("X is 2 + 3 * 4 - 1", ["X"]),
    ("X is 7 // 2, Y is -7 // 2", ["X", "Y"]),
    ("X is 7 mod 3, Y is -7 mod 3, Z is 7 mod -3", ["X", "Y", "Z"]),
    ("X is 7 rem 3, Y is -7 rem 3", ["X", "Y"]),
    ("X is 10 / 4, Y is 4 / 2", ["X", "Y"]),
    ("X is 7 / 2.0", ["X"]),
    ("X is abs(-4) + min(3, 8) * max(2, 1)", ["X"]),
    ("X is -(3), Y is - 3", ["X", "Y"]),
    ("X is 2 ** 3", ["X"]),
    ("X is 1 / 0", ["X"]),
    ("X is 1 mod 0", ["X"]),
    ("X is Y + 1", ["X", "Y"]),
    ("X is foo + 1", ["X"]),
    ("X = a, X < 3", ["X"]),
    ("1 =:= 1.0", []),
    ("1 == 1.0", []),
    ("X = f(Y), Y = 2, X == f(2)", ["X", "Y"]),
    ("f(A, b) = f(a, B)", ["A", "B"]),
    ("X = f(X)", ["X"]),
    ("a \\= b", []),
    ("f(X) \\= f(a)", ["X"]),
    ("msort([c, 1, b, 2.0, f(a), a, g(a, b), Z], L)", ["Z", "L"]),
    ("sort([c, a, b, a, c], L)", ["L"]),
    ("msort([3, 1, 2, 1], L)", ["L"]),
    ("compare(O, 1, 1.0)", ["O"]),
    ("compare(O, a, f(a))", ["O"]),
    ("compare(O, f(b), g(a))", ["O"]),
    ("compare(O, f(a, b), g(a))", ["O"]),
    ("length(L, 2)", ["L"]),
    ("length([a, b | T], 3)", ["T"]),
    ("length(L, N)", ["L", "N"]),
    ("append(X, [c], [a, b, c])", ["X"]),
    ("append(X, Y, [1, 2, 3])", ["X", "Y"]),
    ("member(X, [a, b, c])", ["X"]),
    ("memberchk(X, [a, b, c])", ["X"]),
    ("reverse([1, 2, 3], R)", ["R"]),
    ("nth0(I, [a, b, c], E)", ["I", "E"]),
    ("nth1(2, [a, b, c], E)", ["E"]),
    ("last([1, 2, 3], X)", ["X"]),
    ("select(b, [a, b, c, b], R)", ["R"]),
    ("select(X, [1, 2, 3], R)", ["X", "R"]),
    ("sum_list([1, 2, 3.5], S)", ["S"]),
    ("max_list([3, 1, 4, 1, 5], M), min_list([3, 1, 4], N)", ["M", "N"]),
    ("numlist(1, 5, L)", ["L"]),
    ("delete([a, b, a, c], a, L)", ["L"]),
    ("subtract([1, 2, 3, 4], [2, 4], L)", ["L"]),
    ("findall(X, member(X, []), L)", ["L"]),
    ("findall(X-Y, (member(X, [1, 2]), member(Y, [a, b])), L)", ["L"]),
    ("between(1, 4, X)", ["X"]),
    ("between(3, 2, X)", ["X"]),
    ("findall(X, (between(1, 10, X), X mod 3 =:= 0), L)", ["L"]),
    ("maplist(succ, [1, 2, 3], L)", ["L"]),
    ("maplist(succ, L, [1, 2, 3])", ["L"]),
    ("foldl(plus, [1, 2, 3], 0, S)", ["S"]),
    ("include(integer, [a, 1, b, 2], L)", ["L"]),
    ("exclude(atom, [a, 1, b, 2], L)", ["L"]),
    ("functor(f(a, b, c), N, A)", ["N", "A"]),
    ("functor(T, g, 2)", ["T"]),
    ("arg(2, f(a, b, c), X)", ["X"]),
    ("f(a, B) =.. L", ["B", "L"]),
    ("T =.. [h, 1, 2]", ["T"]),
    ("copy_term(f(X, Y, X), C)", ["X", "Y", "C"]),
    ("X = [1, 2 | T], T = [3]", ["X", "T"]),
    ("X = 'hello world', Y = 'it''s', Z = []", ["X", "Y", "Z"]),
    ("X = {a, b}", ["X"]),
    ("X = (a :- b, c ; d -> e)", ["X"]),
    ("X = (- 1), Y = -(1), Z = -(-(1)), W = 1 - -1", ["X", "Y", "Z", "W"]),
    ("X = f(-), Y = (- a), Z = (\\+ a)",["X", "Y", "Z"]),
    ("( member(X, [1, 2, 3]), X > 1 -> Y = X ; Y = none )", ["X", "Y"]),
    ("\\+ member(z, [a, b])", []),
    ("forall(member(X, [1, 2, 3]), X > 0)", []),
    ("once(member(X, [a, b]))", ["X"]),
    ("ignore(fail), X = done", ["X"]),
    ("atom(a), atomic(1), compound(f(x)), var(_), callable(g), is_list([a])", []),
    ("integer(3), float(3.0), number(3), \\+ integer(3.0)", []),
    ("succ(X, 4), plus(2, Y, 5)", ["X", "Y"]),
    ("X = \"\", true", ["X"]),
    ("call(member, X, [p, q])", ["X"]),
    ("G = member(X, [1, 2]), call(G)", ["G", "X"]),
    ("(X = 1 ; X = 2 ; X = 3), X >= 2", ["X"]),
    ("X @< Y, X = b, Y = a", ["X", "Y"]),
    ("b @> a, f(a) @> z, 1.0 @< 1, 2 @> 1.5", []),
]


class RandomProgram:
    """Stratified programs: p<i> calls only p<j> with j < i."""

    PREDS = 4

    def __init__(self, rng):
        self.rng = rng

    def arg(self):
        r = self.rng.randrange(6)
        if r < 2:
            return self.rng.choice(["a", "b", "c", "1", "2"])
        if r < 4:
            return self.rng.choice(["X", "Y", "Z"])
        if r == 4:
            return f"f({self.rng.choice(['X', 'Y', 'a'])})"
        return f"[{self.rng.choice(['X', 'a'])}|{self.rng.choice(['Y', '[]'])}]"

    def call(self, below):
        return f"p{self.rng.randrange(below)}({self.arg()}, {self.arg()})"

    def goal(self, pred, depth):
        r = self.rng.randrange(4 if depth > 1 else 8)
        if r == 0:
            return self.call(pred) if pred else f"{self.arg()} = {self.arg()}"
        if r == 1:
            return f"{self.arg()} = {self.arg()}"
        if r == 2:
            return "!"
        if r == 3:
            inner = self.call(pred) if pred else f"{self.arg()} = {self.arg()}"
            return f"\\+ {inner}"
        if r == 4:
            return f"( {self.goal(pred, depth + 1)} ; {self.goal(pred, depth + 1)} )"
        if r == 5:
            return (f"( {self.goal(pred, depth + 1)} -> {self.goal(pred, depth + 1)}"
                    f" ; {self.goal(pred, depth + 1)} )")
        if r == 6:
            return f"{self.arg()} \\== {self.arg()}"
        return self.call(pred) if pred else "true"

    def clause(self, pred):
        head = f"p{pred}({self.arg()}, {self.arg()})"
        n = self.rng.randrange(4)
        if n == 0:
            return head + ".\n"
        return head + " :- " + ", ".join(self.goal(pred, 0) for _ in range(n)) + ".\n"

    def program(self):
        out = []
        for i in range(self.PREDS):
            for _ in range(1 + self.rng.randrange(2)):
                out.append(self.clause(i))
        return "".join(out)


def build_cases(seed):
    rng = random.Random(seed)
    cases = []

    def add(category, program, query, vars_):
        cases.append({
            "id": f"{category}-{len(cases):03d}",
            "category": category,
            "program": program,
            "query": query,
            "vars": vars_,
        })

    for name, prog in LIST_PROGRAMS.items():
        for query, vars_ in list_queries(rng, name):
            add(f"list-{name}", prog, query, vars_)
    for query, vars_ in BUILTIN_QUERIES:
        if '"' in query:
            continue
        add("builtin", "", query, vars_)
    gen = RandomProgram(rng)
    for _ in range(90):
        prog = gen.program()
        p = rng.randrange(RandomProgram.PREDS)
        add("random", prog, f"p{p}(A, B)", ["A", "B"])
    return cases


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()

    modules = os.environ.get("SWIPL_WASM_MODULES")
    if not modules:
        sys.exit("SWIPL_WASM_MODULES must point at a node_modules directory containing swipl-wasm")

    payload = json.dumps({"max_solutions": MAX_SOLUTIONS, "cases": build_cases(args.seed)})
    runner = Path(__file__).with_name("run_swipl.mjs")
    done = subprocess.run(["node", str(runner)], input=payload, capture_output=True, text=True,
                          env={**os.environ, "SWIPL_WASM_MODULES": modules})
    if done.returncode != 0:
        sys.stderr.write(done.stderr)
        sys.exit(done.returncode)
    result = json.loads(done.stdout)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(result, indent=1) + "\n")
    print(f"wrote {len(result['cases'])} cases to {args.out}")


if __name__ == "__main__":
    main()
