"""Shared builders and a memoized census for the tests."""

import json
from pathlib import Path

from gallai.canonical import from_code
from gallai.multigraph import ColoredMultigraph, Palette
from gallai.oracle import enumerate_census

FIXTURES = Path(__file__).parent / "fixtures"
A, B, C, D = 1, 2, 4, 8


def graph(n, edges, colors="ABC"):
    return ColoredMultigraph.from_sets(n, Palette(tuple(colors)), edges)


def census_fixture():
    return json.loads((FIXTURES / "census.json").read_text())["records"]


_CENSUS = {}


def census(n, c, cap=2):
    key = (n, c, cap)
    if key not in _CENSUS:
        _CENSUS[key] = enumerate_census(n, Palette.letters(c), cap)
    return _CENSUS[key]


def reduced_maximal(n, c):
    pal = Palette.letters(c)
    return [from_code(code, pal) for code in census(n, c).representatives["reduced_maximal_gallai"]]


def gallai_members(n, c):
    pal = Palette.letters(c)
    return [from_code(code, pal) for code in census(n, c).representatives["gallai"]]


ACCEPTANCE_LINES = []


def record(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line
