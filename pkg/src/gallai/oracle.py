"""Exhaustive ground truth at desk scale.

Everything here is brute force: Gallai detection by trying every color
selection on every triple, labeled counts by full enumeration, and an
isomorphism-class census grown one vertex at a time.  The census feeds the
completeness and round-trip checks of the construction.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import comb, factorial
from typing import Iterator

from gallai.canonical import canonical_form, from_code, orbit_size
from gallai.construction import ConstructionSpec, gamma, iterate_m_prime, realizations
from gallai.decomposition import Signature, decompose
from gallai.errors import BoundsError, ConstructionError
from gallai.multigraph import (
    ColoredMultigraph,
    Palette,
    bits,
    induced_subgraph,
    is_gallai,
    is_maximal,
    is_reduced,
    is_uniform,
    pair_index,
    popcount,
    rainbow_witness,
    to_json as graph_to_json,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 5
DEFAULT_MAX_COLORS = 4
CLASSES = ("gallai", "reduced_gallai", "reduced_maximal_gallai")


# ------------------------------------------------------------ brute force


def has_rainbow_by_selection(g: ColoredMultigraph) -> bool:
    """True if some triple admits one color per pair with three distinct colors."""
    for u, v, w in combinations(range(g.n), 3):
        for x, y, z in product(bits(g.mask(u, v)), bits(g.mask(u, w)), bits(g.mask(v, w))):
            if x != y and y != z and x != z:
                return True
    return False


def edge_masks(palette: Palette, cap: int) -> list[int]:
    """Nonempty color sets of size at most ``cap``, in increasing mask order."""
    return [m for m in range(1, palette.full_mask + 1) if popcount(m) <= cap]


def iter_all_graphs(n: int, palette: Palette, cap: int) -> Iterator[ColoredMultigraph]:
    options = edge_masks(palette, cap)
    for masks in product(options, repeat=n * (n - 1) // 2):
        yield ColoredMultigraph(n, palette, masks)


def labeled_gallai_count(n: int, palette: Palette, cap: int) -> int:
    return sum(1 for g in iter_all_graphs(n, palette, cap) if not has_rainbow_by_selection(g))


def labeled_total(n: int, c: int, cap: int) -> int:
    return sum(comb(c, k) for k in range(1, cap + 1)) ** (n * (n - 1) // 2)


def _cycles(perm: tuple[int, ...]) -> list[int]:
    seen, lengths = set(), []
    for s in range(len(perm)):
        if s in seen:
            continue
        length, x = 0, s
        while x not in seen:
            seen.add(x)
            x = perm[x]
            length += 1
        lengths.append(length)
    return lengths


def total_classes(n: int, c: int, cap: int) -> int:
    """Isomorphism classes of all capped colorings, by Burnside over vertex and color relabelings."""
    if n < 2:
        return 1
    prs = list(combinations(range(n), 2))
    masks = [m for m in range(1, 1 << c) if popcount(m) <= cap]
    fixed_total = 0
    color_perms = list(permutations(range(c)))
    pair_cycle_types = []
    for sigma in permutations(range(n)):
        image = tuple(prs.index(tuple(sorted((sigma[a], sigma[b])))) for a, b in prs)
        pair_cycle_types.append(_cycles(image))
    for pi in color_perms:
        def apply(m: int, times: int) -> int:
            for _ in range(times):
                m = sum(1 << pi[i] for i in bits(m))
            return m

        for lengths in pair_cycle_types:
            count = 1
            for L in lengths:
                count *= sum(1 for m in masks if apply(m, L) == m)
                if not count:
                    break
            fixed_total += count
    return fixed_total // (factorial(n) * factorial(c))


# ------------------------------------------------------------ census


def search_bounds() -> tuple[int, int]:
    """(max vertices, max colors); ``GALLAI_MAX_SEARCH=n,c`` raises the defaults."""
    raw = os.environ.get("GALLAI_MAX_SEARCH")
    if not raw:
        return DEFAULT_MAX_VERTICES, DEFAULT_MAX_COLORS
    try:
        n, c = (int(x) for x in raw.split(","))
    except ValueError:
        raise BoundsError(f"GALLAI_MAX_SEARCH must look like '6,4', got {raw!r}") from None
    return n, c


def check_bounds(n: int, c: int, override: bool = False) -> None:
    if n < 1 or c < 1:
        raise BoundsError("need at least one vertex and one color")
    max_n, max_c = search_bounds()
    if not override and (n > max_n or c > max_c):
        raise BoundsError(
            f"search with n={n}, c={c} exceeds bounds n<={max_n}, c<={max_c}; "
            "set GALLAI_MAX_SEARCH or pass the override flag"
        )


def gallai_classes(n: int, palette: Palette, cap: int) -> list[bytes]:
    """Canonical codes of all Gallai graphs on ``n`` vertices, sorted.

    Grown from the classes on ``n - 1`` vertices: deleting a vertex keeps a
    graph Gallai, so extending one representative per class reaches every
    class.
    """
    options = edge_masks(palette, cap)
    level = [canonical_form(ColoredMultigraph(1, palette, ()))]
    for k in range(2, n + 1):
        found: set[bytes] = set()
        new = k - 1
        for code in level:
            base = from_code(code, palette)
            prefix = [0] * (k * (k - 1) // 2)
            for u, v in combinations(range(new), 2):
                prefix[pair_index(u, v, k)] = base.mask(u, v)
            for picks in product(options, repeat=new):
                if any(rainbow_witness(base.mask(u, v), picks[u], picks[v]) is not None
                       for u, v in combinations(range(new), 2)):
                    continue
                masks = list(prefix)
                for u, m in enumerate(picks):
                    masks[pair_index(u, new, k)] = m
                found.add(canonical_form(ColoredMultigraph(k, palette, tuple(masks))))
        level = sorted(found)
        log.info("n=%d: %d Gallai classes", k, len(level))
    return level


@dataclass(frozen=True)
class ClassCount:
    classes: int
    labeled: int


@dataclass
class CensusRecord:
    n: int
    colors: int
    cap: int
    counts: dict[str, ClassCount]
    representatives: dict[str, list[bytes]] = field(default_factory=dict, repr=False)

    def to_json(self, with_representatives: bool = False) -> dict:
        out: dict = {
            "n": self.n,
            "palette_size": self.colors,
            "multiplicity_cap": self.cap,
            "counts": {k: {"classes": v.classes, "labeled": v.labeled} for k, v in self.counts.items()},
        }
        if with_representatives:
            pal = Palette.letters(self.colors)
            out["representatives"] = {
                k: [graph_to_json(from_code(c, pal)) for c in codes] for k, codes in self.representatives.items()
            }
        return out


def enumerate_census(n: int, palette: Palette, cap: int = 2, override: bool = False) -> CensusRecord:
    check_bounds(n, palette.size, override)
    if cap < 1:
        raise BoundsError("multiplicity cap must be at least 1")
    codes = gallai_classes(n, palette, cap)
    reps = {name: [] for name in CLASSES}
    counts = {name: [0, 0] for name in CLASSES}
    for code in codes:
        g = from_code(code, palette)
        size = orbit_size(g)
        member = {"gallai": True}
        member["reduced_gallai"] = is_reduced(g)
        member["reduced_maximal_gallai"] = member["reduced_gallai"] and is_maximal(g)
        for name in CLASSES:
            if member[name]:
                reps[name].append(code)
                counts[name][0] += 1
                counts[name][1] += size
    out = {"total": ClassCount(total_classes(n, palette.size, cap), labeled_total(n, palette.size, cap))}
    out.update({name: ClassCount(*counts[name]) for name in CLASSES})
    return CensusRecord(n, palette.size, cap, out, reps)


def reduced_maximal_census(max_n: int, palette: Palette, cap: int = 2,
                           override: bool = False) -> dict[int, list[ColoredMultigraph]]:
    """Representatives of reduced maximal Gallai graphs for every size up to ``max_n``."""
    return {
        n: [from_code(c, palette) for c in enumerate_census(n, palette, cap, override).representatives[
            "reduced_maximal_gallai"]]
        for n in range(1, max_n + 1)
    }


# ------------------------------------------------------------ construction checks


@dataclass
class CompletenessReport:
    n: int
    colors: int
    ok: bool
    family_size: int
    realizations: int
    expected: dict[int, int]
    missing: list[bytes]
    unsound: list[bytes]

    def to_json(self) -> dict:
        pal = Palette.letters(self.colors)
        return {
            "n": self.n,
            "palette_size": self.colors,
            "ok": self.ok,
            "family_size": self.family_size,
            "realizations": self.realizations,
            "expected": {str(k): v for k, v in sorted(self.expected.items())},
            "missing": [graph_to_json(from_code(c, pal)) for c in self.missing],
            "unsound": [graph_to_json(from_code(c, pal)) for c in self.unsound],
        }


def completeness_check(n: int, palette: Palette, override: bool = False) -> CompletenessReport:
    """Every reduced maximal Gallai graph on at most ``n`` vertices must be a realization.

    Realizations of the bounded family with at most ``n`` vertices are
    collected up to isomorphism and compared with the census.  Non-Gallai
    realizations are reported as unsound.
    """
    check_bounds(n, palette.size, override)
    census = reduced_maximal_census(n, palette, override=override)
    expected = {canonical_form(g) for gs in census.values() for g in gs}
    family = iterate_m_prime(n, palette, n)
    built: set[bytes] = set()
    unsound: set[bytes] = set()
    count = 0
    for base in family:
        for spec in realizations(base, n):
            g = gamma(spec)
            count += 1
            if not is_gallai(g):
                unsound.add(canonical_form(g))
            elif g.n == 1 or (is_reduced(g) and is_maximal(g)):
                built.add(canonical_form(g))
    missing = sorted(expected - built)
    return CompletenessReport(
        n, palette.size, not missing and not unsound, len(family), count,
        {k: len(v) for k, v in census.items()}, missing, sorted(unsound),
    )


@dataclass
class RoundtripReport:
    ok: bool
    precondition: str | None = None
    level: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "precondition": self.precondition, "level": self.level, "detail": self.detail}


def roundtrip_spec(g: ColoredMultigraph) -> tuple[ConstructionSpec, list[int], int]:
    """Construction input read off the first nontrivial level of ``decompose(g)``.

    Returns the spec, the concatenated block vertices (output vertex ``i`` of
    ``gamma`` is ``g``'s vertex ``order[i]``) and the level used.
    """
    seq = decompose(g)
    level = min(1, seq.depth)
    m = seq.levels[level]
    leaves = [induced_subgraph(g, b.vertices) for b in m.blocks]
    sigs = {}
    for arc in m.directed:
        U, V = m.blocks[arc.source].vertices, m.blocks[arc.target].vertices
        sigs[(arc.source, arc.target)] = Signature.of({i: g.set_mask((u,), V) for i, u in enumerate(U)})
    order = [v for b in m.blocks for v in b.vertices]
    return ConstructionSpec.of(m, leaves, sigs), order, level


def roundtrip_check(g: ColoredMultigraph) -> RoundtripReport:
    if not is_gallai(g):
        return RoundtripReport(False, "not Gallai")
    if not is_reduced(g):
        return RoundtripReport(False, "not reduced")
    if not is_maximal(g):
        return RoundtripReport(False, "not maximal")
    spec, order, level = roundtrip_spec(g)
    for u, leaf in enumerate(spec.leaves):
        if not is_uniform(leaf):
            return RoundtripReport(False, None, level, f"block {u} is not uniformly colored")
    try:
        h = gamma(spec)
    except ConstructionError as exc:
        return RoundtripReport(False, None, level, str(exc))
    back = h.relabel(order)
    if back != g:
        return RoundtripReport(False, None, level, f"rebuilt graph differs: {back}")
    return RoundtripReport(True, None, level)
