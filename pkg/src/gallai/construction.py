"""Building Gallai multigraphs from mixed graphs.

``gamma`` substitutes a uniformly colored multigraph (a *leaf*) for every
vertex of a complete mixed graph and joins the leaves according to the
edges: an undirected edge colors every cross pair with its color, a directed
edge ``(u, v)`` lets each vertex of leaf ``u`` see all of leaf ``v`` in one of
the edge's two colors (its *signature*), equal across a signature class.

``delta_t`` grows a rooted tree by adding a new root above a mixed graph,
``delta_f`` replaces the vertices of a mixed graph by rooted trees, and
``iterate_m_prime`` closes a seed family of undirected mixed graphs under
both, up to a vertex bound.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

from gallai.canonical import canonical_form, from_code
from gallai.decomposition import Signature
from gallai.errors import ConstructionError, SchemaError
from gallai.mixed import MixedGraph, mixed_canonical_code
from gallai.mixed import from_json as mixed_from_json
from gallai.mixed import to_json as mixed_to_json
from gallai.multigraph import (
    ColoredMultigraph,
    Palette,
    bits,
    from_json as graph_from_json,
    is_gallai,
    is_uniform,
    pair_index,
    pairs,
    popcount,
    to_json as graph_to_json,
)
from gallai.unionfind import UnionFind

log = logging.getLogger(__name__)


# ------------------------------------------------------------ signature configuration


@dataclass(frozen=True)
class TildePartition:
    classes: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[int, int], ...]

    def class_of(self, v: int) -> int:
        for i, c in enumerate(self.classes):
            if v in c:
                return i
        raise KeyError(v)


def tilde_classes(graph: MixedGraph | ColoredMultigraph, two_colors: int) -> TildePartition:
    """Finest partition joining every pair whose colors leave ``two_colors``.

    ``graph`` is a rooted tree (or a realization of one); a signature toward
    a dominated vertex must be constant on each class.
    """
    if popcount(two_colors) != 2:
        raise ValueError("tilde classes need exactly two colors")
    uf = UnionFind(range(graph.order))
    gens = []
    for a, b in combinations(range(graph.order), 2):
        if graph.pair_mask(a, b) & ~two_colors:
            gens.append((a, b))
            uf.union(a, b)
    return TildePartition(tuple(uf.classes()), tuple(gens))


def signature_choices(classes: TildePartition, two_colors: int) -> list[Signature]:
    """Every onto map from the classes to the two colors, lifted to vertices."""
    cols = list(bits(two_colors))
    if len(cols) != 2:
        raise ValueError("signature choices need exactly two colors")
    out = []
    k = len(classes.classes)
    for pick in product(cols, repeat=k):
        if len(set(pick)) < 2:
            continue
        out.append(Signature.of({v: 1 << col for cls, col in zip(classes.classes, pick) for v in cls}))
    return out


def _onto_maps(size: int, two_colors: int) -> list[Signature]:
    return signature_choices(TildePartition(tuple((v,) for v in range(size)), ()), two_colors)


# ------------------------------------------------------------ Gamma


@dataclass(frozen=True)
class ConstructionSpec:
    """A base mixed graph with one leaf per vertex and one signature per directed edge."""

    base: MixedGraph
    leaves: tuple[ColoredMultigraph, ...]
    signatures: tuple[tuple[tuple[int, int], Signature], ...]

    @classmethod
    def of(cls, base: MixedGraph, leaves: Sequence[ColoredMultigraph],
           signatures: Mapping[tuple[int, int], Signature]) -> "ConstructionSpec":
        return cls(base, tuple(leaves), tuple(sorted(signatures.items())))

    def signature_map(self) -> dict[tuple[int, int], Signature]:
        return dict(self.signatures)


def _check_complete(m: MixedGraph) -> None:
    for a, b in combinations(range(m.order), 2):
        count = (m.edge_color(a, b) is not None) + (m.arc(a, b) is not None) + (m.arc(b, a) is not None)
        if count != 1:
            raise ConstructionError(f"base is not a complete mixed graph: pair {(a, b)} has {count} edges")
    for arc in m.directed:
        if popcount(arc.colors) != 2:
            raise ConstructionError(f"directed edge {(arc.source, arc.target)} needs exactly two colors")


def _out_colors(m: MixedGraph, u: int) -> int | None:
    cols = {a.colors for a in m.out_arcs(u)}
    if len(cols) > 1:
        raise ConstructionError(f"vertex {u} dominates with different color pairs")
    return cols.pop() if cols else None


def gamma(spec: ConstructionSpec) -> ColoredMultigraph:
    """Realize ``spec``; leaves are laid out in base-vertex order."""
    base = spec.base
    _check_complete(base)
    if len(spec.leaves) != base.order:
        raise ConstructionError(f"need {base.order} leaves, got {len(spec.leaves)}")
    pal = base.palette
    for u, leaf in enumerate(spec.leaves):
        if leaf.palette != pal:
            raise ConstructionError(f"leaf {u} uses a different palette")
        if not is_uniform(leaf):
            raise ConstructionError(f"leaf {u} is not uniformly colored")
        if not is_gallai(leaf):
            raise ConstructionError(f"leaf {u} is not Gallai")
        need = _out_colors(base, u)
        if need is not None:
            if leaf.n < 2:
                raise ConstructionError(f"dominating vertex {u} needs a leaf with at least 2 vertices")
            if leaf.masks[0] != need:
                raise ConstructionError(f"leaf {u} colors differ from its directed edges")
    sigs = spec.signature_map()
    arcs = {(a.source, a.target): a for a in base.directed}
    if set(sigs) != set(arcs):
        raise ConstructionError("signatures must be given for exactly the directed edges")
    by_class: dict[int, Signature] = {}
    for key, arc in arcs.items():
        sig = sigs[key]
        size = spec.leaves[arc.source].n
        if [v for v, _ in sig.images] != list(range(size)):
            raise ConstructionError(f"signature of {key} must cover leaf vertices 0..{size - 1}")
        if any(m == 0 or m & ~arc.colors for _, m in sig.images):
            raise ConstructionError(f"signature of {key} uses colors outside the edge")
        if sig.colors != arc.colors:
            raise ConstructionError(f"signature of {key} is not onto the edge colors")
        if by_class.setdefault(arc.sigma, sig) != sig:
            raise ConstructionError(f"signature of {key} differs within its signature class")

    offsets = [0]
    for leaf in spec.leaves:
        offsets.append(offsets[-1] + leaf.n)
    n = offsets[-1]
    masks = [0] * (n * (n - 1) // 2)
    for u, leaf in enumerate(spec.leaves):
        o = offsets[u]
        for (x, y), m in zip(pairs(leaf.n), leaf.masks):
            masks[pair_index(o + x, o + y, n)] = m
    for a, b in combinations(range(base.order), 2):
        col = base.edge_color(a, b)
        if col is not None:
            for x in range(offsets[a], offsets[a + 1]):
                for y in range(offsets[b], offsets[b + 1]):
                    masks[pair_index(x, y, n)] = 1 << col
            continue
        s, t = (a, b) if base.arc(a, b) is not None else (b, a)
        sig = sigs[(s, t)]
        for x in range(leaf_size := spec.leaves[s].n):
            m = sig[x]
            for y in range(offsets[t], offsets[t + 1]):
                masks[pair_index(offsets[s] + x, y, n)] = m
        del leaf_size
    return ColoredMultigraph(n, pal, tuple(masks))


def _leaf_options(base: MixedGraph, u: int, budget: int) -> list[tuple[int, int]]:
    """(size, uniform mask) choices for the leaf at ``u`` within ``budget`` vertices."""
    need = _out_colors(base, u)
    if need is not None:
        return [(size, need) for size in range(2, budget + 1)]
    opts = [(1, 0)]
    for size in range(2, budget + 1):
        for mask in range(1, base.palette.full_mask + 1):
            # uniform cliques on 3+ vertices with 3+ colors hold rainbow triangles
            if size == 2 or popcount(mask) <= 2:
                opts.append((size, mask))
    return opts


def realizations(base: MixedGraph, max_vertices: int) -> Iterator[ConstructionSpec]:
    """Every choice of leaves and signatures with at most ``max_vertices`` vertices."""
    try:
        _check_complete(base)
        doms = {u: _out_colors(base, u) for u in range(base.order)}
    except ConstructionError:
        return
    k = base.order
    minimum = sum(2 if doms[u] is not None else 1 for u in range(k))
    if minimum > max_vertices:
        return
    pal = base.palette
    classes = sorted(base.sigma_classes().items())

    def assign(u: int, budget: int, chosen: list[tuple[int, int]]) -> Iterator[list[tuple[int, int]]]:
        if u == k:
            yield chosen
            return
        rest_min = sum(2 if doms[w] is not None else 1 for w in range(u + 1, k))
        for size, mask in _leaf_options(base, u, budget - rest_min):
            yield from assign(u + 1, budget - size, chosen + [(size, mask)])

    for choice in assign(0, max_vertices, []):
        leaves = [ColoredMultigraph.uniform(size, pal, mask) for size, mask in choice]
        per_class = [_onto_maps(choice[arcs[0].source][0], arcs[0].colors) for _, arcs in classes]
        for picks in product(*per_class):
            sigs = {}
            for (_, arcs), sig in zip(classes, picks):
                for a in arcs:
                    sigs[(a.source, a.target)] = sig
            yield ConstructionSpec.of(base, leaves, sigs)


# ------------------------------------------------------------ Delta_T


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def delta_t(m: MixedGraph, two_colors: int, restrict_sigma: bool = False) -> list[MixedGraph]:
    """Rooted trees obtained by placing a new root 0 above ``m``.

    The new directed edges all carry ``two_colors``.  Edges to vertices in the
    same weak component of ``m``, or to components joined by a color outside
    ``two_colors``, must share a signature class; every coarser grouping is
    also emitted unless ``restrict_sigma``.  Classes of ``m`` are kept.
    """
    if popcount(two_colors) != 2:
        raise ValueError("a new root dominates with exactly two colors")
    comps = m.weak_components()
    uf = UnionFind(range(len(comps)))
    for i, j in combinations(range(len(comps)), 2):
        if any(m.pair_mask(a, b) & ~two_colors for a in comps[i] for b in comps[j]):
            uf.union(i, j)
    forced = uf.classes()
    groupings = [[[list(c)] for c in forced]] if restrict_sigma else set_partitions([list(c) for c in forced])
    offset = max((a.sigma for a in m.directed), default=-1) + 1
    und = [(e.a + 1, e.b + 1, e.color) for e in m.undirected]
    old = [(a.source + 1, a.target + 1, a.colors, a.sigma) for a in m.directed]
    out = []
    for grouping in groupings:
        new = []
        for cid, group in enumerate(grouping):
            for ci in (x for g in group for x in g):
                for v in comps[ci]:
                    new.append((0, v + 1, two_colors, offset + cid))
        out.append(MixedGraph.build(m.palette, m.order + 1, und, old + new))
    return out


# ------------------------------------------------------------ Delta_F


def delta_f(base: MixedGraph, trees: Sequence[MixedGraph],
            signatures: Mapping[tuple[int, int], Signature]) -> MixedGraph:
    """Replace vertex ``u`` of ``base`` by ``trees[u]`` and flatten.

    Cross pairs all become undirected: an undirected base edge passes on its
    color; a directed base edge ``(u, v)`` colors the pair ``(x, y)`` with
    ``signatures[(u, v)][x]`` for ``x`` in ``trees[u]``.  Directed edges and
    signature classes inside the trees are kept.
    """
    _check_complete(base)
    if len(trees) != base.order:
        raise ConstructionError(f"need {base.order} trees, got {len(trees)}")
    for u, t in enumerate(trees):
        if t.palette != base.palette:
            raise ConstructionError(f"tree {u} uses a different palette")
        if not t.is_rooted_tree():
            raise ConstructionError(f"tree {u} is not a rooted tree")
        need = _out_colors(base, u)
        if need is not None:
            if t.order < 2:
                raise ConstructionError(f"dominating vertex {u} needs a tree with at least 2 vertices")
            if t.tau() != need:
                raise ConstructionError(f"tree {u} dominates with colors other than its out-edges")
    arcs = {(a.source, a.target): a for a in base.directed}
    if set(signatures) != set(arcs):
        raise ConstructionError("signatures must be given for exactly the directed edges")
    by_class: dict[int, Signature] = {}
    for key, arc in arcs.items():
        sig = signatures[key]
        t = trees[arc.source]
        if [v for v, _ in sig.images] != list(range(t.order)):
            raise ConstructionError(f"signature of {key} must cover tree vertices 0..{t.order - 1}")
        if any(popcount(m) != 1 or m & ~arc.colors for _, m in sig.images):
            raise ConstructionError(f"signature of {key} must pick one edge color per tree vertex")
        if sig.colors != arc.colors:
            raise ConstructionError(f"signature of {key} is not onto the edge colors")
        for cls in tilde_classes(t, arc.colors).classes:
            if len({sig[v] for v in cls}) > 1:
                raise ConstructionError(f"signature of {key} splits a class joined by a third color")
        if by_class.setdefault(arc.sigma, sig) != sig:
            raise ConstructionError(f"signature of {key} differs within its signature class")

    offsets = [0]
    for t in trees:
        offsets.append(offsets[-1] + t.order)
    und, dirs = [], []
    sig_offset = 0
    for u, t in enumerate(trees):
        o = offsets[u]
        und += [(e.a + o, e.b + o, e.color) for e in t.undirected]
        dirs += [(a.source + o, a.target + o, a.colors, a.sigma + sig_offset) for a in t.directed]
        sig_offset += max((a.sigma for a in t.directed), default=-1) + 1
    for a, b in combinations(range(base.order), 2):
        col = base.edge_color(a, b)
        if col is not None:
            und += [(x, y, col) for x in range(offsets[a], offsets[a + 1]) for y in range(offsets[b], offsets[b + 1])]
            continue
        s, t = (a, b) if base.arc(a, b) is not None else (b, a)
        sig = signatures[(s, t)]
        for x in range(trees[s].order):
            col = sig[x].bit_length() - 1
            und += [(offsets[s] + x, y, col) for y in range(offsets[t], offsets[t + 1])]
    return MixedGraph.build(base.palette, offsets[-1], und, dirs)


def delta_f_choices(base: MixedGraph, trees: Sequence[MixedGraph]) -> Iterator[MixedGraph]:
    """``delta_f`` over every admissible signature assignment."""
    classes = sorted(base.sigma_classes().items())
    per_class = []
    for _, arcs in classes:
        t = trees[arcs[0].source]
        per_class.append(signature_choices(tilde_classes(t, arcs[0].colors), arcs[0].colors))
    for picks in product(*per_class):
        sigs = {(a.source, a.target): sig for (_, arcs), sig in zip(classes, picks) for a in arcs}
        yield delta_f(base, trees, sigs)


# ------------------------------------------------------------ seeds


def _undirected(outer: ColoredMultigraph) -> MixedGraph:
    und = [(u, v, m.bit_length() - 1) for (u, v), m in zip(pairs(outer.n), outer.masks)]
    return MixedGraph.build(outer.palette, outer.n, und, ())


def gallai_graph_base(outer: ColoredMultigraph) -> MixedGraph:
    """Undirected mixed graph of a simple coloring with at most two colors."""
    if any(popcount(m) != 1 for m in outer.masks):
        raise ConstructionError("outer graph must carry exactly one color per pair")
    used = 0
    for m in outer.masks:
        used |= m
    if popcount(used) > 2:
        raise ConstructionError("outer graph may use at most two colors")
    return _undirected(outer)


def _substitute(outer: ColoredMultigraph, parts: Sequence[ColoredMultigraph]) -> ColoredMultigraph:
    """Replace vertex ``i`` of ``outer`` by ``parts[i]``; cross pairs copy the outer color."""
    offsets = [0]
    for p in parts:
        offsets.append(offsets[-1] + p.n)
    n = offsets[-1]
    masks = [0] * (n * (n - 1) // 2)
    for i, p in enumerate(parts):
        o = offsets[i]
        for (x, y), m in zip(pairs(p.n), p.masks):
            masks[pair_index(o + x, o + y, n)] = m
    for (i, j), m in zip(pairs(outer.n), outer.masks):
        for x in range(offsets[i], offsets[i + 1]):
            for y in range(offsets[j], offsets[j + 1]):
                masks[pair_index(x, y, n)] = m
    return ColoredMultigraph(n, outer.palette, tuple(masks))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def nested_gallai_graphs(max_size: int, palette: Palette) -> dict[int, list[ColoredMultigraph]]:
    """Simple Gallai colorings built by nesting two-colored outer graphs.

    Size ``s`` graphs are every outer graph on ``k >= 2`` vertices with at
    most two colors, its vertices replaced by smaller nested graphs.  Results
    are kept up to vertex relabeling only (colors stay fixed), since the
    colors of a part relative to the outer graph matter.
    """
    found: dict[int, dict[bytes, ColoredMultigraph]] = {1: {b"": ColoredMultigraph(1, palette, ())}}
    for s in range(2, max_size + 1):
        out: dict[bytes, ColoredMultigraph] = {}
        for k in range(2, s + 1):
            outers: dict[bytes, ColoredMultigraph] = {}
            for a, b in combinations(range(palette.size), 2) if palette.size > 1 else [(0, 0)]:
                for pick in product((1 << a, 1 << b), repeat=k * (k - 1) // 2):
                    o = ColoredMultigraph(k, palette, pick)
                    outers.setdefault(canonical_form(o, color_symmetry=False), o)
            for outer in outers.values():
                for sizes in _compositions(s, k):
                    for parts in product(*(list(found[z].values()) for z in sizes)):
                        g = _substitute(outer, parts)
                        out.setdefault(canonical_form(g, color_symmetry=False), g)
        found[s] = out
    return {s: list(v.values()) for s, v in found.items()}


def seed_family(size_bound: int, palette: Palette) -> list[MixedGraph]:
    """Undirected mixed graphs of every simple Gallai coloring, up to isomorphism."""
    seeds: dict[bytes, ColoredMultigraph] = {}
    for graphs in nested_gallai_graphs(size_bound, palette).values():
        for g in graphs:
            code = canonical_form(g)
            if code not in seeds:
                seeds[code] = from_code(code, palette)
    return [_undirected(seeds[c]) for c in sorted(seeds)]


# ------------------------------------------------------------ the family


def color_variants(t: MixedGraph) -> list[MixedGraph]:
    """All palette relabelings of ``t`` that differ up to vertex relabeling."""
    seen = {}
    for perm in permutations(range(t.palette.size)):
        v = t.relabel_colors(perm)
        seen.setdefault(mixed_canonical_code(v, color_symmetry=False), v)
    return [seen[k] for k in sorted(seen)]


def delta_f_family(bases: Iterable[MixedGraph], trees: Sequence[MixedGraph],
                   size_bound: int) -> Iterator[MixedGraph]:
    """``delta_f`` over every base, tree assignment and signature choice within the bound."""
    variants = [v for t in trees for v in color_variants(t)]
    by_tau: dict[int, list[MixedGraph]] = {}
    for v in variants:
        if v.order >= 2:
            by_tau.setdefault(v.tau(), []).append(v)
    for base in bases:
        try:
            _check_complete(base)
            needs = [_out_colors(base, u) for u in range(base.order)]
        except ConstructionError:
            continue
        options = [variants if need is None else by_tau.get(need, []) for need in needs]
        floor = [1 if need is None else 2 for need in needs]
        if sum(floor) > size_bound:
            continue

        def assign(u: int, budget: int, chosen: list[MixedGraph]) -> Iterator[list[MixedGraph]]:
            if u == base.order:
                yield chosen
                return
            spare = budget - sum(floor[u + 1:])
            for t in options[u]:
                if t.order <= spare:
                    yield from assign(u + 1, budget - t.order, chosen + [t])

        for chosen in assign(0, size_bound, []):
            yield from delta_f_choices(base, chosen)


def two_color_sets(palette: Palette) -> list[int]:
    return [(1 << a) | (1 << b) for a, b in combinations(range(palette.size), 2)]


def iterate_m_prime(size_bound: int, palette: Palette, depth: int,
                    restrict_sigma: bool = False) -> list[MixedGraph]:
    """Bounded closure of the seed family under ``delta_t`` and ``delta_f``.

    Each round applies both constructions to the whole family so far and
    keeps new members with at most ``size_bound`` vertices; members are
    deduplicated up to vertex and color relabeling.  Stops after ``depth``
    rounds or when a round adds nothing.  Output is sorted by canonical code.
    """
    if size_bound < 1 or depth < 0:
        raise ValueError("size bound must be positive and depth non-negative")
    family = {mixed_canonical_code(m): m for m in seed_family(size_bound, palette)}
    for rnd in range(depth):
        current = [family[k] for k in sorted(family)]
        trees = [m for m in current if m.is_rooted_tree()]
        fresh = []
        for m in current:
            if m.order < size_bound:
                for ab in two_color_sets(palette):
                    fresh.extend(delta_t(m, ab, restrict_sigma))
        fresh.extend(delta_f_family(current, trees, size_bound))
        added = 0
        for m in fresh:
            code = mixed_canonical_code(m)
            if code not in family:
                family[code] = m
                added += 1
        log.info("round %d: %d candidates, %d new, family size %d", rnd + 1, len(fresh), added, len(family))
        if not added:
            break
    return [family[k] for k in sorted(family)]


# ------------------------------------------------------------ JSON


def spec_to_json(spec: ConstructionSpec) -> dict:
    pal = spec.base.palette
    out = mixed_to_json(spec.base)
    out["leaves"] = [{"vertex": u, "graph": graph_to_json(g)} for u, g in enumerate(spec.leaves)]
    out["signatures"] = [
        {"edge": [s, t], "map": {str(v): pal.labels[m.bit_length() - 1] for v, m in sig.images}}
        for (s, t), sig in spec.signatures
    ]
    return out


def spec_from_json(obj: object) -> ConstructionSpec:
    base = mixed_from_json(obj, extra_keys=("leaves", "signatures"))
    assert isinstance(obj, dict)
    pal = base.palette
    leaves: dict[int, ColoredMultigraph] = {}
    for entry in obj.get("leaves", []):
        if not isinstance(entry, dict) or set(entry) != {"vertex", "graph"}:
            raise SchemaError("leaf entries need exactly 'vertex' and 'graph'")
        leaves[entry["vertex"]] = graph_from_json(entry["graph"], palette=pal)
    if sorted(leaves) != list(range(base.order)):
        raise SchemaError(f"leaves must be given for vertices 0..{base.order - 1}")
    sigs = {}
    for entry in obj.get("signatures", []):
        if not isinstance(entry, dict) or set(entry) != {"edge", "map"}:
            raise SchemaError("signature entries need exactly 'edge' and 'map'")
        s, t = entry["edge"]
        try:
            images = {int(k): 1 << pal.index(v) for k, v in entry["map"].items()}
        except (TypeError, ValueError, AttributeError) as exc:
            raise SchemaError(f"bad signature map: {exc}") from None
        sigs[(s, t)] = Signature.of(images)
    return ConstructionSpec.of(base, [leaves[u] for u in range(base.order)], sigs)
