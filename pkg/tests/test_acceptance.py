"""Acceptance suite: ten exact checks at desk scale.

Each test prints one ``criterion N PASS|FAIL`` line; the lines are repeated
in the terminal summary.  Run alone with ``pytest tests/test_acceptance.py``.
"""

import subprocess
import sys
from itertools import combinations

from gallai.canonical import from_code
from gallai.construction import TildePartition, delta_t, gamma, iterate_m_prime, realizations, signature_choices
from gallai.construction import two_color_sets
from gallai.decomposition import decompose, lemma_violations, prune_block
from gallai.errors import CliqueViolation
from gallai.mixed import check_tree_property
from gallai.multigraph import (
    Palette,
    double_edge_cliques,
    induced_subgraph,
    is_gallai,
    maximal_closure,
    rainbow_triangles,
    reduce,
)
from gallai.oracle import (
    completeness_check,
    has_rainbow_by_selection,
    iter_all_graphs,
    roundtrip_check,
)
from helpers import census, record

ABC = Palette.letters(3)
# leaves may grow the realization past the base; this caps the total vertex count
REALIZATION_VERTICES = 7
FAMILY_SIZE = 4


def reduced_maximal_census(max_n, max_c):
    out = []
    for c in range(1, max_c + 1):
        pal = Palette.letters(c)
        for n in range(1, max_n + 1):
            out += [from_code(code, pal) for code in census(n, c).representatives["reduced_maximal_gallai"]]
    return out


def gallai_census(max_n, max_c):
    out = []
    for c in range(1, max_c + 1):
        pal = Palette.letters(c)
        for n in range(1, max_n + 1):
            out += [from_code(code, pal) for code in census(n, c).representatives["gallai"]]
    return out


def induced_subgraphs(g):
    for k in range(1, g.n + 1):
        for s in combinations(range(g.n), k):
            yield induced_subgraph(g, s)


_FAMILY = []


def family():
    if not _FAMILY:
        _FAMILY.extend(iterate_m_prime(FAMILY_SIZE, ABC, FAMILY_SIZE))
    return _FAMILY


def test_criterion_01_detection_matches_selection_search():
    checked = disagreements = 0
    for c in (1, 2, 3):
        pal = Palette.letters(c)
        for n in (1, 2, 3, 4):
            for g in iter_all_graphs(n, pal, 2):
                checked += 1
                if (not rainbow_triangles(g)) != (not has_rainbow_by_selection(g)):
                    disagreements += 1
    ok = disagreements == 0
    record(1, "rainbow detection vs selection search", ok, f"{checked} graphs, {disagreements} disagreements")
    assert ok


def test_criterion_02_double_edges_form_uniform_cliques():
    graphs = reduced_maximal_census(5, 4)
    failures = []
    for g in graphs:
        try:
            for cls in double_edge_cliques(g):
                sub = induced_subgraph(g, cls.vertices)
                if len(cls.vertices) > 1 and set(sub.masks) != {cls.colors}:
                    failures.append((str(g), cls))
        except CliqueViolation as exc:
            failures.append((str(g), exc.reason))
    ok = not failures
    record(2, "double-edge cliques are uniform", ok, f"{len(graphs)} reduced maximal graphs, {len(failures)} violations")
    assert ok, failures[:3]


def _tree_failures(graphs):
    bad = []
    for g in graphs:
        for lvl, m in enumerate(decompose(g).levels):
            report = check_tree_property(m)
            if not report.ok:
                bad.append((str(g), lvl, report.clause, report.detail))
    return bad


def test_criterion_03_levels_are_rooted_trees():
    members = reduced_maximal_census(5, 4)
    subs = [h for g in reduced_maximal_census(5, 4) for h in induced_subgraphs(g)]
    bad = _tree_failures(members) + _tree_failures(subs)
    ok = not bad
    record(3, "tree property at every level", ok,
           f"{len(members)} census graphs, {len(subs)} induced subgraphs, {len(bad)} failures")
    assert ok, bad[:3]


def test_criterion_04_decomposition_invariants():
    members = reduced_maximal_census(5, 4)
    subs = [h for g in reduced_maximal_census(5, 4) for h in induced_subgraphs(g)]
    bad = []
    for g in members + subs:
        found = lemma_violations(decompose(g))
        if found:
            bad.append((str(g), found))
    ok = not bad
    record(4, "propagation, dominance colors, base root", ok, f"{len(members) + len(subs)} decompositions, {len(bad)} with violations")
    assert ok, bad[:3]


def test_criterion_05_realizations_are_gallai():
    bases = family()
    count = 0
    bad = []
    for base in bases:
        for spec in realizations(base, REALIZATION_VERTICES):
            count += 1
            g = gamma(spec)
            if not is_gallai(g):
                bad.append(str(g))
    ok = not bad and count > 0
    record(5, "every realization of the family is Gallai", ok,
           f"{len(bases)} bases, {count} realizations up to {REALIZATION_VERTICES} vertices, {len(bad)} with rainbow triangles")
    assert ok, bad[:3]


def test_criterion_06_new_root_trees_are_sound():
    trees = count = 0
    not_trees, bad = [], []
    for m in family():
        for ab in two_color_sets(ABC):
            for t in delta_t(m, ab):
                trees += 1
                if t.order != m.order + 1 or not t.is_rooted_tree() or not check_tree_property(t).ok:
                    not_trees.append(str(t))
                for spec in realizations(t, REALIZATION_VERTICES):
                    count += 1
                    if not is_gallai(gamma(spec)):
                        bad.append(str(t))
    ok = not not_trees and not bad
    record(6, "new-root trees are rooted trees with Gallai realizations", ok,
           f"{trees} trees, {count} realizations, {len(not_trees)} malformed, {len(bad)} with rainbow triangles")
    assert ok, (not_trees[:3], bad[:3])


def test_criterion_07_completeness():
    reports = [completeness_check(n, ABC) for n in (3, 4)]
    ok = all(r.ok for r in reports)
    detail = "; ".join(
        f"n={r.n}: {sum(r.expected.values())} expected, {len(r.missing)} missing, {len(r.unsound)} unsound"
        for r in reports
    )
    record(7, "reduced maximal graphs are realized", ok, detail)
    assert ok


def test_criterion_08_roundtrip():
    graphs = reduced_maximal_census(4, 3)
    failed = [(str(g), r) for g in graphs if not (r := roundtrip_check(g)).ok]
    ok = not failed
    record(8, "rebuild from first level", ok, f"{len(graphs)} graphs, {len(failed)} failures")
    assert ok, failed[:3]


def test_criterion_09_pruning_blocks():
    graphs = reduced_maximal_census(4, 4)
    checked = 0
    failed = []
    for g in graphs:
        seq = decompose(g)
        for m in seq.levels:
            for block in m.blocks:
                if len(block.vertices) == g.n:
                    continue
                checked += 1
                report = prune_block(g, seq, block)
                if not report.ok:
                    failed.append((str(g), block, report.detail))
    ok = not failed
    record(9, "pruned decompositions agree", ok, f"{len(graphs)} graphs, {checked} blocks, {len(failed)} failures")
    assert ok, failed[:3]


CLI_RUNS = [
    ["enumerate", "--vertices", "4", "--colors", "3", "--representatives"],
    ["construct", "--family", "--max-size", "3"],
    ["verify-completeness", "--vertices", "3", "--colors", "3"],
]


def test_criterion_10_algorithmic_invariants(tmp_path):
    problems = []
    graphs = gallai_census(4, 3)
    for g in graphs:
        red = reduce(g).graph
        if reduce(red).graph != red:
            problems.append(f"reduce not idempotent on {g}")
        closed = maximal_closure(g)
        if maximal_closure(closed) != closed:
            problems.append(f"closure not idempotent on {g}")
        if decompose(g).depth > g.n:
            problems.append(f"decompose too deep on {g}")
    for k in range(1, 8):
        part = TildePartition(tuple((i,) for i in range(k)), ())
        if len(signature_choices(part, 0b11)) != 2**k - 2:
            problems.append(f"signature count wrong for {k} classes")

    g3 = tmp_path / "g3.json"
    g3.write_text('{"palette":["A","B","C"],"vertices":3,"edges":[{"u":0,"v":1,"colors":["A","B"]},'
                  '{"u":0,"v":2,"colors":["A"]},{"u":1,"v":2,"colors":["B"]}]}')
    runs = CLI_RUNS + [[cmd, str(g3)] for cmd in ("check", "reduce", "maximalize", "decompose")]
    for argv in runs:
        outs = [
            subprocess.run([sys.executable, "-m", "gallai.cli", *argv], capture_output=True).stdout
            for _ in range(2)
        ]
        if outs[0] != outs[1] or not outs[0]:
            problems.append(f"cli output differs for {argv}")
    ok = not problems
    record(10, "idempotence, depth bound, signature counts, CLI determinism", ok,
           f"{len(graphs)} graphs, {len(runs)} CLI commands, {len(problems)} problems")
    assert ok, problems[:5]


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
