#!/usr/bin/env python3
"""Runs every JSON-producing command and validates its output against docs/schemas.

Usage: validate_outputs.py <prologian executable> <project root>
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    exe, root = sys.argv[1], Path(sys.argv[2])
    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text())
               for p in (root / "docs" / "schemas").glob("*.schema.json")}
    for schema in schemas.values():
        jsonschema.Draft202012Validator.check_schema(schema)
    fixtures = root / "tests" / "fixtures"
    failures = []
    checked = 0

    def validate(kind, doc, origin):
        nonlocal checked
        checked += 1
        errors = sorted(jsonschema.Draft202012Validator(schemas[kind]).iter_errors(doc), key=str)
        for e in errors:
            failures.append(f"{origin}: {'/'.join(map(str, e.absolute_path))}: {e.message}")

    def run(*args):
        return subprocess.run([exe, *map(str, args)], capture_output=True, text=True, check=False)

    spec = fixtures / "check" / "spec.json"
    tests = fixtures / "check" / "tests.plt"
    validate("assignment", json.loads(spec.read_text()), spec.name)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        board = tmp / "board.json"
        for n, program in enumerate(sorted((fixtures / "check").glob("*.pl"))):
            report_dir = tmp / program.stem
            proc = run("check", program, "--spec", spec, "--tests", tests, "--json", "--report", report_dir,
                       "--timestamp", 1700000000 + n)
            printed = json.loads(proc.stdout)
            written = json.loads((report_dir / "report.json").read_text())
            validate("report", printed, f"check --json {program.name}")
            validate("report", written, f"report.json {program.name}")
            if printed != written:
                failures.append(f"{program.name}: --json output differs from report.json")
            card = report_dir / "scorecard.json"
            validate("scorecard", json.loads(card.read_text()), f"scorecard.json {program.name}")
            run("rank", "--board", board, "--add", card, "--student", f"s{n}")
        validate("leaderboard", json.loads(board.read_text()), "leaderboard file")
        validate("leaderboard", json.loads(run("rank", "--board", board, "--json").stdout), "rank --json")

    corpus = fixtures / "corpus"
    validate("history", json.loads(run("history", corpus, "--json").stdout), "history --json")
    validate("stats", json.loads(run("stats", corpus, "--json").stdout), "stats --json")
    for case in sorted((fixtures / "bugs").iterdir()):
        proc = run("classify-bug", case / "old.pl", case / "new.pl", "--json")
        validate("classify", json.loads(proc.stdout), f"classify-bug {case.name}")

    for f in failures:
        print(f"FAIL {f}")
    print(f"{checked - len(failures)}/{checked} documents valid" if not failures else f"{len(failures)} schema violations")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
