"""Edge-colored mixed graphs: blocks joined by undirected or directed edges.

Undirected edges carry one color, directed edges a two-color mask and a
signature-class id.  Two directed edges share a class only if they leave the
same block.  The same type serves both for one level of a decomposition
(blocks are vertex sets of a source multigraph) and for the abstract inputs
and outputs of the constructions (block ``i`` simply stands for vertex ``i``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations, product
from typing import Iterable, NamedTuple, Sequence

from gallai.errors import SchemaError
from gallai.multigraph import Palette, _expect_keys, bits, popcount
from gallai.unionfind import UnionFind


@dataclass(frozen=True)
class Block:
    id: int
    level: int
    vertices: tuple[int, ...]
    children: tuple[int, ...] = ()
    root_child: int | None = None
    base_root: int | None = None


class Edge(NamedTuple):
    a: int
    b: int
    color: int


class Arc(NamedTuple):
    source: int
    target: int
    colors: int
    sigma: int


def point_blocks(order: int, level: int = 0) -> tuple[Block, ...]:
    return tuple(Block(i, level, (i,), (), None, i) for i in range(order))


@dataclass(frozen=True)
class MixedGraph:
    palette: Palette
    blocks: tuple[Block, ...]
    undirected: tuple[Edge, ...]
    directed: tuple[Arc, ...]
    level: int = 0

    def __post_init__(self) -> None:
        k = len(self.blocks)
        for i, b in enumerate(self.blocks):
            if b.id != i:
                raise ValueError(f"block ids must be 0..{k - 1} in order")
        full = self.palette.full_mask
        for e in self.undirected:
            if not (0 <= e.a < e.b < k):
                raise ValueError(f"bad undirected edge {e}")
            if not 0 <= e.color < self.palette.size:
                raise ValueError(f"color {e.color} outside palette")
        for a in self.directed:
            if a.source == a.target or not (0 <= a.source < k and 0 <= a.target < k):
                raise ValueError(f"bad directed edge {a}")
            if a.colors == 0 or a.colors & ~full:
                raise ValueError(f"directed edge {a} has invalid colors")
        owner: dict[int, int] = {}
        for a in self.directed:
            if owner.setdefault(a.sigma, a.source) != a.source:
                raise ValueError(f"signature class {a.sigma} spans several initial blocks")

    @classmethod
    def build(
        cls,
        palette: Palette,
        blocks: int | Sequence[Block],
        undirected: Iterable[tuple[int, int, int]] = (),
        directed: Iterable[tuple[int, int, int, int]] = (),
        level: int = 0,
    ) -> "MixedGraph":
        """Normalize edge order and renumber signature classes.

        Classes are renumbered by first appearance with directed edges sorted
        by (source, target), so equal inputs always give equal objects.
        """
        if isinstance(blocks, int):
            blocks = point_blocks(blocks, level)
        und = sorted(Edge(min(a, b), max(a, b), c) for a, b, c in undirected)
        arcs = sorted(directed, key=lambda t: (t[0], t[1]))
        renumber: dict[int, int] = {}
        norm = []
        for s, t, m, sig in arcs:
            if sig not in renumber:
                renumber[sig] = len(renumber)
            norm.append(Arc(s, t, m, renumber[sig]))
        return cls(palette, tuple(blocks), tuple(und), tuple(norm), level)

    # ------------------------------------------------------------ lookups

    @property
    def order(self) -> int:
        return len(self.blocks)

    @cached_property
    def _arc_map(self) -> dict[tuple[int, int], Arc]:
        return {(a.source, a.target): a for a in self.directed}

    @cached_property
    def _edge_map(self) -> dict[tuple[int, int], int]:
        return {(e.a, e.b): e.color for e in self.undirected}

    def arc(self, s: int, t: int) -> Arc | None:
        return self._arc_map.get((s, t))

    def edge_color(self, a: int, b: int) -> int | None:
        return self._edge_map.get((min(a, b), max(a, b)))

    def pair_mask(self, a: int, b: int) -> int:
        """List-coloring of the pair ``{a, b}`` whatever its edge type."""
        m = 0
        c = self.edge_color(a, b)
        if c is not None:
            m |= 1 << c
        for arc in (self.arc(a, b), self.arc(b, a)):
            if arc is not None:
                m |= arc.colors
        return m

    def out_arcs(self, s: int) -> list[Arc]:
        return [a for a in self.directed if a.source == s]

    def dominating(self) -> list[int]:
        return sorted({a.source for a in self.directed})

    def sigma_classes(self) -> dict[int, list[Arc]]:
        out: dict[int, list[Arc]] = {}
        for a in self.directed:
            out.setdefault(a.sigma, []).append(a)
        return out

    def weak_components(self) -> list[tuple[int, ...]]:
        """Components of the directed part; undirected edges are ignored."""
        uf = UnionFind(range(self.order))
        for a in self.directed:
            uf.union(a.source, a.target)
        return uf.classes()

    def root(self) -> int | None:
        """The vertex with a directed edge to every other vertex, if unique."""
        k = self.order
        if k == 1:
            return 0
        hits = [s for s in range(k) if len({a.target for a in self.out_arcs(s)}) == k - 1]
        return hits[0] if len(hits) == 1 else None

    def is_rooted_tree(self) -> bool:
        if self.order == 1:
            return True
        if len(self.weak_components()) != 1:
            return False
        return check_tree_property(self).ok

    def tau(self) -> int:
        """Colors with which the root of a rooted tree dominates (0 for a point)."""
        r = self.root()
        if r is None or self.order == 1:
            return 0
        out = 0
        for a in self.out_arcs(r):
            out |= a.colors
        return out

    def relabel_colors(self, color_perm: Sequence[int]) -> "MixedGraph":
        def cm(mask: int) -> int:
            out = 0
            for i in bits(mask):
                out |= 1 << color_perm[i]
            return out

        return MixedGraph(
            self.palette,
            self.blocks,
            tuple(Edge(e.a, e.b, color_perm[e.color]) for e in self.undirected),
            tuple(Arc(a.source, a.target, cm(a.colors), a.sigma) for a in self.directed),
            self.level,
        )

    def __str__(self) -> str:
        lab = self.palette.labels
        parts = [f"{e.a}-{e.b}:{lab[e.color]}" for e in self.undirected]
        parts += [
            f"{a.source}>{a.target}:{''.join(self.palette.labels_of(a.colors))}#{a.sigma}"
            for a in self.directed
        ]
        return f"M{self.order}[{', '.join(parts)}]"


# ------------------------------------------------------------ tree property


@dataclass(frozen=True)
class TreeReport:
    ok: bool
    clause: int | None = None
    witness: tuple = ()
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "clause": self.clause,
            "witness": list(self.witness),
            "detail": self.detail,
        }


def _rooted_tree_failure(members: Sequence[int], arcs: set[tuple[int, int]]) -> tuple[tuple, str] | None:
    """Check that ``arcs`` restricted to ``members`` is a rooted tree.

    Rooted tree means: a strict partial order (irreflexive, antisymmetric,
    transitive) whose Hasse diagram is a tree and which has a minimum element
    with an arc to every other member.
    """
    ms = list(members)
    for x, y in arcs:
        if (y, x) in arcs:
            return (x, y), "directed edges in both directions"
    for x, y in arcs:
        for z in ms:
            if (y, z) in arcs and (x, z) not in arcs:
                return (x, y, z), "directed part is not transitive"
    hasse = [
        (x, y) for x, y in arcs
        if not any((x, z) in arcs and (z, y) in arcs for z in ms)
    ]
    if len(hasse) != len(ms) - 1:
        return tuple(sorted(hasse)), "transitive reduction is not a tree"
    uf = UnionFind(ms)
    for x, y in hasse:
        if not uf.union(x, y):
            return (x, y), "transitive reduction has a cycle"
    roots = [x for x in ms if all((x, y) in arcs for y in ms if y != x)]
    if len(roots) != 1:
        return tuple(ms), "no root reaching every member"
    return None


def check_tree_property(m: MixedGraph) -> TreeReport:
    """Check the four clauses of the tree property on one mixed graph.

    1. complete: every block pair carries exactly one edge;
    2. undirected edges have one color, directed edges two;
    3. every weak component is a rooted tree;
    4. if (U,V) and (V,W) are directed then (U,V) and (U,W) share a class.
    """
    k = m.order
    for a, b in combinations(range(k), 2):
        count = (m.edge_color(a, b) is not None) + (m.arc(a, b) is not None) + (m.arc(b, a) is not None)
        if count != 1:
            return TreeReport(False, 1, (a, b), f"pair carries {count} edges")
    for arc in m.directed:
        if popcount(arc.colors) != 2:
            return TreeReport(False, 2, (arc.source, arc.target), "directed edge without exactly two colors")
    arcs = {(a.source, a.target) for a in m.directed}
    for comp in m.weak_components():
        if len(comp) == 1:
            continue
        cs = set(comp)
        sub = {(x, y) for x, y in arcs if x in cs}
        bad = _rooted_tree_failure(comp, sub)
        if bad is not None:
            return TreeReport(False, 3, bad[0], bad[1])
    for uv in m.directed:
        for vw in m.out_arcs(uv.target):
            uw = m.arc(uv.source, vw.target)
            if uw is None or uw.sigma != uv.sigma:
                return TreeReport(
                    False, 4, (uv.source, uv.target, vw.target),
                    "(U,V),(V,W) directed but (U,V),(U,W) in different signature classes",
                )
    return TreeReport(True)


# ------------------------------------------------------------ canonical code


def _invariants(m: MixedGraph) -> list[tuple[int, int, int]]:
    outd = [0] * m.order
    ind = [0] * m.order
    und = [0] * m.order
    for a in m.directed:
        outd[a.source] += 1
        ind[a.target] += 1
    for e in m.undirected:
        und[e.a] += 1
        und[e.b] += 1
    return [(outd[i], ind[i], und[i]) for i in range(m.order)]


def _vertex_orders(m: MixedGraph) -> Iterable[tuple[int, ...]]:
    """Vertex orderings sorted by an isomorphism invariant; ties are permuted."""
    inv = _invariants(m)
    groups: dict[tuple, list[int]] = {}
    for v in range(m.order):
        groups.setdefault(inv[v], []).append(v)
    cells = [groups[key] for key in sorted(groups)]
    for choice in product(*(permutations(c) for c in cells)):
        yield tuple(v for cell in choice for v in cell)


def mixed_canonical_code(m: MixedGraph, color_symmetry: bool = True) -> tuple:
    """Isomorphism-invariant code of a mixed graph with its signature classes.

    Invariant under vertex relabeling and, if ``color_symmetry``, under
    permutations of the palette.  Block member sets are ignored.
    """
    c = m.palette.size
    color_perms = list(permutations(range(c))) if color_symmetry else [tuple(range(c))]
    k = m.order
    best = None
    for order in _vertex_orders(m):
        for cp in color_perms:
            seq = []
            cls: dict[int, int] = {}
            for i, j in combinations(range(k), 2):
                a, b = order[i], order[j]
                col = m.edge_color(a, b)
                if col is not None:
                    seq.append((0, 1 << cp[col], 0))
                    continue
                arc = m.arc(a, b)
                kind = 1
                if arc is None:
                    arc = m.arc(b, a)
                    kind = 2
                if arc is None:
                    seq.append((3, 0, 0))
                    continue
                cm = 0
                for x in bits(arc.colors):
                    cm |= 1 << cp[x]
                sig = cls.setdefault(arc.sigma, len(cls))
                seq.append((kind, cm, sig))
            key = tuple(seq)
            if best is None or key < best:
                best = key
    return (k, c, best)


# ------------------------------------------------------------ JSON / DOT


def to_json(m: MixedGraph) -> dict:
    lab = m.palette.labels
    return {
        "level": m.level,
        "palette": list(lab),
        "blocks": [
            {
                "id": b.id,
                "vertices": list(b.vertices),
                "children": list(b.children),
                "root_child": b.root_child,
                "base_root": b.base_root,
            }
            for b in m.blocks
        ],
        "undirected": [{"a": e.a, "b": e.b, "color": lab[e.color]} for e in m.undirected],
        "directed": [
            {"from": a.source, "to": a.target, "colors": m.palette.labels_of(a.colors), "sigma_class": a.sigma}
            for a in m.directed
        ],
    }


MIXED_KEYS = {"level", "palette", "blocks", "undirected", "directed"}


def from_json(obj: object, extra_keys: Iterable[str] = ()) -> MixedGraph:
    """Parse mixed-graph JSON.

    ``palette`` may be omitted, in which case the sorted set of labels used
    by the edges becomes the palette.  Blocks may be given as a plain count.
    """
    if not isinstance(obj, dict):
        raise SchemaError("mixed graph must be a JSON object")
    allowed = MIXED_KEYS | set(extra_keys)
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"unknown field(s) in mixed graph: {sorted(extra)}")
    for key in ("blocks", "undirected", "directed"):
        if not isinstance(obj.get(key), (list, int) if key == "blocks" else list):
            raise SchemaError(f"mixed graph needs a {key!r} list")
    und_raw = [_expect_keys(e, {"a", "b", "color"}, "undirected edge") for e in obj["undirected"]]
    dir_raw = [_expect_keys(a, {"from", "to", "colors", "sigma_class"}, "directed edge") for a in obj["directed"]]
    if "palette" in obj:
        try:
            palette = Palette(tuple(obj["palette"]))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad palette: {exc}") from None
    else:
        used = {e["color"] for e in und_raw}
        for a in dir_raw:
            used.update(a["colors"])
        if not used or not all(isinstance(s, str) for s in used):
            raise SchemaError("cannot infer a palette; give 'palette' explicitly")
        palette = Palette(tuple(sorted(used)))
    level = obj.get("level", 0)
    if not isinstance(level, int) or level < 0:
        raise SchemaError("level must be a non-negative integer")
    raw_blocks = obj["blocks"]
    if isinstance(raw_blocks, int):
        blocks = point_blocks(raw_blocks, level)
    else:
        blocks = []
        for i, b in enumerate(raw_blocks):
            if not isinstance(b, dict) or not {"id", "vertices"} <= set(b):
                raise SchemaError("block needs 'id' and 'vertices'")
            extra = set(b) - {"id", "vertices", "children", "root_child", "base_root"}
            if extra:
                raise SchemaError(f"unknown field(s) in block: {sorted(extra)}")
            if b["id"] != i:
                raise SchemaError("block ids must be 0..k-1 in order")
            blocks.append(
                Block(i, level, tuple(b["vertices"]), tuple(b.get("children", ())),
                      b.get("root_child"), b.get("base_root"))
            )
        blocks = tuple(blocks)
    try:
        und = [(e["a"], e["b"], palette.index(e["color"])) for e in und_raw]
        arcs = []
        for a in dir_raw:
            if not isinstance(a["colors"], list):
                raise SchemaError("directed edge colors must be a list")
            arcs.append((a["from"], a["to"], palette.mask_of(a["colors"]), a["sigma_class"]))
        return MixedGraph.build(palette, blocks, und, arcs, level)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from None


def to_dot(m: MixedGraph, name: str = "M") -> str:
    """Graphviz rendering; directed edges carry tick marks for their class."""
    lab = m.palette.labels
    lines = [f"digraph {name} {{", f'  label="level {m.level}";']
    for b in m.blocks:
        members = ",".join(map(str, b.vertices))
        lines.append(f'  b{b.id} [label="{{{members}}}"];')
    for e in m.undirected:
        lines.append(f'  b{e.a} -> b{e.b} [dir=none, label="{lab[e.color]}"];')
    rank: dict[int, int] = {}
    for a in m.directed:
        # tick count distinguishes the classes leaving the same block
        if a.sigma not in rank:
            rank[a.sigma] = sum(1 for s in rank if m.sigma_classes()[s][0].source == a.source) + 1
        cols = ",".join(m.palette.labels_of(a.colors))
        lines.append(f'  b{a.source} -> b{a.target} [label="{cols} {"/" * rank[a.sigma]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
