"""Dominance, signatures and the level sequence of mixed graphs.

Level 0 has one block per vertex; a pair with two or more colors becomes a
directed edge from the lower to the higher vertex.  Each later level merges
the weak components of the previous one into blocks and recomputes dominance
between them.  The sequence stops at the first level whose successor would
have the same blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from gallai.mixed import Block, Edge, MixedGraph, TreeReport, check_tree_property
from gallai.mixed import to_json as mixed_to_json
from gallai.multigraph import ColoredMultigraph, induced_subgraph, popcount, to_json as graph_to_json


@dataclass(frozen=True)
class Signature:
    """Map from each vertex of the dominating side to its color mask.

    ``images`` is sorted by vertex so equal maps compare equal.
    """

    images: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "Signature":
        return cls(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict[int, int]:
        return dict(self.images)

    @property
    def colors(self) -> int:
        out = 0
        for _, m in self.images:
            out |= m
        return out

    def __getitem__(self, vertex: int) -> int:
        for v, m in self.images:
            if v == vertex:
                return m
        raise KeyError(vertex)


def signature(g: ColoredMultigraph, U: Iterable[int], V: Iterable[int]) -> Signature:
    V = tuple(V)
    return Signature.of({u: g.set_mask((u,), V) for u in U})


def dominates(g: ColoredMultigraph, U: Iterable[int], V: Iterable[int]) -> Signature | None:
    """Signature of ``U ⊳ V`` if U dominates V, else None."""
    U, V = tuple(sorted(set(U))), tuple(sorted(set(V)))
    if not U or not V:
        raise ValueError("dominance needs nonempty vertex sets")
    if set(U) & set(V):
        raise ValueError("dominance needs disjoint vertex sets")
    if popcount(g.set_mask(U, V)) <= 1:
        return None
    if len(U) == 1 and len(V) == 1:
        return Signature.of({U[0]: g.mask(U[0], V[0])}) if U[0] < V[0] else None
    m = g.matrix
    for u in U:
        first = m[u][V[0]]
        if any(m[u][v] != first for v in V[1:]):
            return None
    return signature(g, U, V)


def _build_level(g: ColoredMultigraph, groups: list[tuple[int, ...]], level: int,
                 prev: MixedGraph | None) -> MixedGraph:
    blocks = []
    for i, members in enumerate(groups):
        if prev is None:
            blocks.append(Block(i, 0, members, (), None, members[0]))
            continue
        mset = set(members)
        children = tuple(b.id for b in prev.blocks if set(b.vertices) <= mset)
        if len(children) == 1:
            root = children[0]
        else:
            hits = [c for c in children if all(prev.arc(c, d) for d in children if d != c)]
            root = hits[0] if len(hits) == 1 else None
        base = prev.blocks[root].base_root if root is not None else None
        blocks.append(Block(i, level, members, children, root, base))

    undirected: list[Edge] = []
    arcs: list[tuple[int, int, int, int]] = []
    class_ids: dict[tuple, int] = {}
    for i, j in combinations(range(len(groups)), 2):
        U, V = groups[i], groups[j]
        mask = g.set_mask(U, V)
        if popcount(mask) == 1:
            undirected.append(Edge(i, j, mask.bit_length() - 1))
            continue
        for s, t in ((i, j), (j, i)):
            sig = dominates(g, groups[s], groups[t])
            if sig is not None:
                key = (s, sig.images)
                cid = class_ids.setdefault(key, len(class_ids))
                arcs.append((s, t, mask, cid))
    return MixedGraph.build(g.palette, tuple(blocks), undirected, arcs, level)


@dataclass(frozen=True)
class DecompositionSequence:
    source: ColoredMultigraph
    levels: tuple[MixedGraph, ...]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def block_of(self, level: int, vertex: int) -> Block:
        for b in self.levels[level].blocks:
            if vertex in b.vertices:
                return b
        raise KeyError(vertex)

    @cached_property
    def taus(self) -> tuple[tuple[int, ...], ...]:
        out: list[tuple[int, ...]] = []
        for lvl, m in enumerate(self.levels):
            if lvl == 0:
                row = []
                for b in m.blocks:
                    t = 0
                    for a in m.out_arcs(b.id):
                        t |= a.colors
                    row.append(t)
            else:
                row = [out[lvl - 1][b.root_child] if b.root_child is not None else 0 for b in m.blocks]
            out.append(tuple(row))
        return tuple(out)

    def tau(self, block: Block) -> int:
        return self.taus[block.level][block.id]

    def to_json(self, with_reports: bool = True) -> dict:
        pal = self.source.palette
        levels = []
        for lvl, m in enumerate(self.levels):
            entry = mixed_to_json(m)
            entry["tau"] = [pal.labels_of(t) for t in self.taus[lvl]]
            if with_reports:
                entry["tree_property"] = check_tree_property(m).to_json()
            levels.append(entry)
        return {"source": graph_to_json(self.source), "levels": levels}


def decompose(g: ColoredMultigraph) -> DecompositionSequence:
    groups = [(v,) for v in range(g.n)]
    levels = [_build_level(g, groups, 0, None)]
    while True:
        cur = levels[-1]
        comps = cur.weak_components()
        if len(comps) == cur.order:
            break
        groups = sorted(
            (tuple(sorted(v for b in comp for v in cur.blocks[b].vertices)) for comp in comps),
            key=lambda t: t[0],
        )
        levels.append(_build_level(g, groups, len(levels), cur))
    return DecompositionSequence(g, tuple(levels))


def verify_tree_property(seq: DecompositionSequence, level: int) -> TreeReport:
    if not 0 <= level < len(seq.levels):
        raise IndexError(f"level {level} outside 0..{seq.depth}")
    return check_tree_property(seq.levels[level])


def tau(seq: DecompositionSequence, block: Block) -> int:
    return seq.tau(block)


def lemma_violations(seq: DecompositionSequence) -> list[str]:
    """Statements that decompositions of reduced maximal Gallai graphs satisfy.

    * a block dominating V with colors {A,B} and meeting W in one color C
      outside {A,B} forces V to meet W in exactly C;
    * every directed edge out of a block carries its tau, a 2-color set;
    * the base root of a block meets the rest of the block in tau.
    """
    g = seq.source
    found: list[str] = []
    for lvl, m in enumerate(seq.levels):
        groups = [b.vertices for b in m.blocks]
        taus = seq.taus[lvl]
        for arc in m.directed:
            U, V = groups[arc.source], groups[arc.target]
            for w, W in enumerate(groups):
                if w in (arc.source, arc.target):
                    continue
                uw = g.set_mask(U, W)
                if popcount(uw) == 1 and not uw & arc.colors and g.set_mask(V, W) != uw:
                    found.append(f"level {lvl}: color propagation fails for blocks {arc.source},{arc.target},{w}")
            t = taus[arc.source]
            if arc.colors != t or popcount(t) != 2:
                found.append(f"level {lvl}: block {arc.source} dominates {arc.target} with colors other than its tau")
        for b in m.blocks:
            t = taus[b.id]
            if popcount(t) not in (0, 2):
                found.append(f"level {lvl}: block {b.id} has tau of size {popcount(t)}")
            if lvl == 0:
                continue
            if len(b.vertices) == 1:
                if t:
                    found.append(f"level {lvl}: singleton block {b.id} has nonempty tau")
                continue
            br = b.base_root
            if br is None:
                found.append(f"level {lvl}: block {b.id} has no base root")
                continue
            rest = [v for v in b.vertices if v != br]
            if g.set_mask((br,), rest) != t:
                found.append(f"level {lvl}: base root of block {b.id} does not meet its block in tau")
    return found


@dataclass(frozen=True)
class PruneReport:
    ok: bool
    level: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "level": self.level, "detail": self.detail}


def prune_block(g: ColoredMultigraph, seq: DecompositionSequence, block: Block) -> PruneReport:
    """Compare the decomposition of ``g`` minus ``block`` with that of ``g``.

    For every level k up to the block's level, the blocks of the pruned graph
    together with the level-k blocks inside the removed block must be exactly
    the level-k blocks of ``g``.
    """
    n = block.level
    if not 0 <= n < len(seq.levels) or block.id >= seq.levels[n].order or seq.levels[n].blocks[block.id] != block:
        raise ValueError(f"{block} is not a level-{n} block of this decomposition")
    removed = set(block.vertices)
    rest = [v for v in range(g.n) if v not in removed]
    if not rest:
        raise ValueError("removing the block leaves no vertices")
    sub = decompose(induced_subgraph(g, rest))
    for k in range(n + 1):
        full = {frozenset(b.vertices) for b in seq.levels[k].blocks}
        inside = {p for p in full if p <= removed}
        hk = sub.levels[min(k, sub.depth)]
        pruned = {frozenset(rest[i] for i in b.vertices) for b in hk.blocks}
        if full != pruned | inside:
            return PruneReport(False, k, f"blocks differ at level {k}")
    return PruneReport(True)
