import pytest

from gallai.construction import (
    ConstructionSpec,
    TildePartition,
    delta_f,
    delta_f_choices,
    delta_t,
    gallai_graph_base,
    gamma,
    iterate_m_prime,
    nested_gallai_graphs,
    realizations,
    seed_family,
    set_partitions,
    signature_choices,
    spec_from_json,
    spec_to_json,
    tilde_classes,
    two_color_sets,
)
from gallai.canonical import canonical_form
from gallai.decomposition import Signature
from gallai.errors import ConstructionError
from gallai.mixed import MixedGraph, check_tree_property, mixed_canonical_code
from gallai.multigraph import ColoredMultigraph, Palette, is_gallai, is_uniform
from helpers import A, B, C, gallai_members, graph

PAL = Palette.letters(3)
POINT = MixedGraph.build(PAL, 1, [], [])
ROOTED_PAIR = MixedGraph.build(PAL, 2, [], [(0, 1, A | B, 0)])


def leaf(n, mask=0):
    return ColoredMultigraph.uniform(n, PAL, mask)


def cherry(color):
    return MixedGraph.build(PAL, 3, [(1, 2, color)], [(0, 1, A | B, 0), (0, 2, A | B, 0)])


def test_tilde_classes_examples():
    assert tilde_classes(cherry(2), A | B).classes == ((0,), (1, 2))
    assert tilde_classes(cherry(0), A | B).classes == ((0,), (1,), (2,))
    rb = graph(3, {(0, 1): "C", (0, 2): "C", (1, 2): "C"})
    assert tilde_classes(rb, A | B).classes == ((0, 1, 2),)
    with pytest.raises(ValueError):
        tilde_classes(rb, A)


@pytest.mark.parametrize("k, count", [(1, 0), (2, 2), (3, 6), (4, 14)])
def test_signature_choice_counts(k, count):
    part = TildePartition(tuple((i,) for i in range(k)), ())
    sigs = signature_choices(part, A | B)
    assert len(sigs) == count == 2**k - 2
    assert len(set(sigs)) == count
    assert all(s.colors == A | B for s in sigs)


def test_signature_choices_lift_to_classes():
    sigs = signature_choices(tilde_classes(cherry(2), A | B), A | B)
    assert sigs == [Signature.of({0: A, 1: B, 2: B}), Signature.of({0: B, 1: A, 2: A})]


def test_gamma_directed_example():
    spec = ConstructionSpec.of(ROOTED_PAIR, [leaf(2, A | B), leaf(1)], {(0, 1): Signature.of({0: A, 1: B})})
    g = gamma(spec)
    assert g == graph(3, {(0, 1): "AB", (0, 2): "A", (1, 2): "B"})
    assert is_gallai(g)


def test_gamma_undirected_example():
    base = MixedGraph.build(PAL, 2, [(0, 1, 2)], [])
    assert gamma(ConstructionSpec.of(base, [leaf(1), leaf(1)], {})) == graph(2, {(0, 1): "C"})


def test_gamma_rejects_class_inconsistent_signatures():
    base = MixedGraph.build(PAL, 3, [(1, 2, 2)], [(0, 1, A | B, 0), (0, 2, A | B, 0)])
    sigs = {(0, 1): Signature.of({0: A, 1: B}), (0, 2): Signature.of({0: B, 1: A})}
    with pytest.raises(ConstructionError, match="signature class"):
        gamma(ConstructionSpec.of(base, [leaf(2, A | B), leaf(1), leaf(1)], sigs))


@pytest.mark.parametrize(
    "leaves, sig, match",
    [
        ([leaf(1), leaf(1)], {0: A}, "at least 2"),
        ([leaf(2, A | C), leaf(1)], {0: A, 1: C}, "colors differ"),
        ([leaf(2, A | B), leaf(1)], {0: A, 1: A}, "not onto"),
        ([leaf(2, A | B), leaf(1)], {0: A, 1: C}, "outside"),
        ([leaf(2, A | B), leaf(1)], {0: A}, "cover"),
    ],
)
def test_gamma_rejects_bad_specs(leaves, sig, match):
    with pytest.raises(ConstructionError, match=match):
        gamma(ConstructionSpec.of(ROOTED_PAIR, leaves, {(0, 1): Signature.of(sig)}))


def test_gamma_rejects_nonuniform_leaf():
    bad = graph(3, {(0, 1): "A", (0, 2): "A", (1, 2): "B"})
    base = MixedGraph.build(PAL, 1, [], [])
    with pytest.raises(ConstructionError, match="uniform"):
        gamma(ConstructionSpec.of(base, [bad], {}))


def test_spec_json_round_trip():
    spec = ConstructionSpec.of(ROOTED_PAIR, [leaf(2, A | B), leaf(1)], {(0, 1): Signature.of({0: A, 1: B})})
    obj = spec_to_json(spec)
    assert obj["signatures"] == [{"edge": [0, 1], "map": {"0": "A", "1": "B"}}]
    assert spec_from_json(obj) == spec


def test_realizations_respect_bounds():
    specs = list(realizations(ROOTED_PAIR, 3))
    # leaf(0) must be a 2-vertex {A,B} clique, leaf(1) a point; two onto maps
    assert len(specs) == 2
    assert all(gamma(s).n == 3 for s in specs)
    assert list(realizations(ROOTED_PAIR, 2)) == []
    sizes = {gamma(s).n for s in realizations(ROOTED_PAIR, 5)}
    assert sizes == {3, 4, 5}


def test_realization_leaves_are_uniform_gallai():
    for spec in realizations(cherry(2), 5):
        assert all(is_uniform(lf) and is_gallai(lf) for lf in spec.leaves)


def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in set_partitions(list(range(k)))) for k in range(6)] == [1, 1, 2, 5, 15, 52]


def test_delta_t_examples():
    (t,) = delta_t(POINT, A | B)
    assert [(a.source, a.target, a.colors) for a in t.directed] == [(0, 1, A | B)]
    third = MixedGraph.build(PAL, 2, [(0, 1, 2)], [])
    assert len(delta_t(third, A | B)) == 1
    inside = MixedGraph.build(PAL, 2, [(0, 1, 0)], [])
    outs = delta_t(inside, A | B)
    assert len(outs) == 2
    assert sorted(len(t.sigma_classes()) for t in outs) == [1, 2]
    assert len(delta_t(inside, A | B, restrict_sigma=True)) == 1


def test_delta_t_keeps_inner_classes_and_grows_by_one():
    for m in (ROOTED_PAIR, cherry(2), cherry(0)):
        for t in delta_t(m, B | C):
            assert t.order == m.order + 1
            assert t.is_rooted_tree()
            assert check_tree_property(t).ok
            inner = sorted((a.source - 1, a.target - 1, a.colors) for a in t.directed if a.source != 0)
            assert inner == sorted((a.source, a.target, a.colors) for a in m.directed)


def test_delta_t_rejects_bad_colors():
    with pytest.raises(ValueError):
        delta_t(POINT, A)


def test_delta_f_degenerate_substitution():
    base = MixedGraph.build(PAL, 2, [(0, 1, 2)], [])
    assert delta_f(base, [POINT, POINT], {}) == base


def test_delta_f_tree_into_dominating_slot():
    outs = list(delta_f_choices(ROOTED_PAIR, [ROOTED_PAIR, POINT]))
    assert len(outs) == 2
    for m in outs:
        assert m.order == 3
        assert all(not (a.source < 2 and a.target == 2) for a in m.directed)
        for spec in realizations(m, 5):
            assert is_gallai(gamma(spec))


def test_delta_f_rejects_bad_input():
    with pytest.raises(ConstructionError, match="at least 2"):
        delta_f(ROOTED_PAIR, [POINT, POINT], {(0, 1): Signature.of({0: A})})
    with pytest.raises(ConstructionError, match="not onto"):
        delta_f(ROOTED_PAIR, [ROOTED_PAIR, POINT], {(0, 1): Signature.of({0: A, 1: A})})
    other = MixedGraph.build(PAL, 2, [], [(0, 1, B | C, 0)])
    with pytest.raises(ConstructionError, match="other than"):
        delta_f(ROOTED_PAIR, [other, POINT], {(0, 1): Signature.of({0: B, 1: C})})


def test_delta_f_rejects_signature_splitting_a_class():
    base = MixedGraph.build(PAL, 2, [], [(0, 1, A | B, 0)])
    tree = cherry(2)
    with pytest.raises(ConstructionError, match="third color"):
        delta_f(base, [tree, POINT], {(0, 1): Signature.of({0: A, 1: A, 2: B})})


def test_gallai_graph_base():
    k2 = gallai_graph_base(graph(2, {(0, 1): "A"}))
    assert k2.order == 2 and k2.directed == ()
    aab = gallai_graph_base(graph(3, {(0, 1): "A", (0, 2): "A", (1, 2): "B"}))
    assert len(aab.undirected) == 3
    with pytest.raises(ConstructionError):
        gallai_graph_base(graph(3, {(0, 1): "A", (0, 2): "B", (1, 2): "C"}))
    with pytest.raises(ConstructionError):
        gallai_graph_base(graph(2, {(0, 1): "AB"}))


@pytest.mark.parametrize("n, c", [(3, 3), (4, 3), (4, 4), (5, 3)])
def test_nested_seeds_are_all_simple_gallai_graphs(n, c):
    pal = Palette.letters(c)
    built = {canonical_form(g) for g in nested_gallai_graphs(n, pal)[n]}
    simple = {canonical_form(g) for g in gallai_members(n, c) if all(bin(m).count("1") == 1 for m in g.masks)}
    assert built == simple


def test_seed_family_is_undirected():
    seeds = seed_family(4, PAL)
    assert all(m.directed == () for m in seeds)
    assert len({mixed_canonical_code(m) for m in seeds}) == len(seeds)


def test_iterate_small_bounds():
    (only,) = iterate_m_prime(1, PAL, 3)
    assert only.order == 1
    ab = Palette.letters(2)
    fam2 = iterate_m_prime(2, ab, 2)
    codes = {mixed_canonical_code(m) for m in fam2}
    assert mixed_canonical_code(MixedGraph.build(ab, 2, [], [(0, 1, A | B, 0)])) in codes
    k2 = MixedGraph.build(ab, 2, [(0, 1, 0)], [])
    assert mixed_canonical_code(k2) in codes
    assert len(fam2) == 3


def test_iterate_is_closed_under_delta_t_on_small_members():
    fam = iterate_m_prime(3, PAL, 3)
    codes = {mixed_canonical_code(m) for m in fam}
    for m in fam:
        if m.order <= 2:
            for ab in two_color_sets(PAL):
                for t in delta_t(m, ab):
                    assert mixed_canonical_code(t) in codes


def test_iterate_is_deterministic():
    one = iterate_m_prime(4, PAL, 4)
    two = iterate_m_prime(4, PAL, 4)
    assert [mixed_canonical_code(m) for m in one] == [mixed_canonical_code(m) for m in two]


def test_iterate_rejects_bad_bounds():
    with pytest.raises(ValueError):
        iterate_m_prime(0, PAL, 1)
