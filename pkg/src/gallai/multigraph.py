"""Complete edge-colored multigraphs and their elementary predicates.

Colors are indices into a :class:`Palette`; a set of colors on a vertex pair
is stored as a bitmask (bit ``i`` set means color ``i`` is present).  Pairs
are stored in lexicographic order ``(0,1), (0,2), ..., (0,n-1), (1,2), ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from gallai.errors import CliqueViolation, NotGallaiError, SchemaError


def popcount(mask: int) -> int:
    return mask.bit_count()


def bits(mask: int) -> Iterator[int]:
    """Yield the color indices present in ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def pair_index(u: int, v: int, n: int) -> int:
    if u > v:
        u, v = v, u
    # row offset of u in the upper triangle, then column
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


class Color(NamedTuple):
    id: int
    label: str


@dataclass(frozen=True)
class Palette:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("palette must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in palette {self.labels}")
        if len(self.labels) > 8:
            raise ValueError("palettes larger than 8 colors are not supported")

    @classmethod
    def letters(cls, count: int) -> "Palette":
        return cls(tuple(chr(ord("A") + i) for i in range(count)))

    @classmethod
    def parse(cls, text: str) -> "Palette":
        return cls(tuple(s.strip() for s in text.split(",") if s.strip()))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Color]:
        return (Color(i, s) for i, s in enumerate(self.labels))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SchemaError(f"unknown color {label!r} (palette {list(self.labels)})") from None

    def mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for s in labels:
            bit = 1 << self.index(s)
            if mask & bit:
                raise SchemaError(f"duplicate color {s!r}")
            mask |= bit
        return mask

    def labels_of(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits(mask)]


@dataclass(frozen=True)
class ColoredMultigraph:
    """Complete loop-free multigraph on vertices ``0..n-1``.

    ``masks[pair_index(u, v, n)]`` is the nonempty color set of pair ``uv``.
    """

    n: int
    palette: Palette
    masks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a multigraph needs at least one vertex")
        if len(self.masks) != self.n * (self.n - 1) // 2:
            raise ValueError(f"expected {self.n * (self.n - 1) // 2} pair color sets, got {len(self.masks)}")
        full = self.palette.full_mask
        for p, m in zip(pairs(self.n), self.masks):
            if m == 0:
                raise ValueError(f"pair {p} has no color (graph must be complete)")
            if m & ~full:
                raise ValueError(f"pair {p} uses colors outside the palette")

    @classmethod
    def from_sets(
        cls,
        n: int,
        palette: Palette | Sequence[str],
        colors: Mapping[tuple[int, int], Iterable[str]],
    ) -> "ColoredMultigraph":
        """Build from ``{(u, v): labels}``; every pair must be present."""
        if not isinstance(palette, Palette):
            palette = Palette(tuple(palette))
        masks = [0] * (n * (n - 1) // 2)
        for (u, v), labels in colors.items():
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad pair {(u, v)}")
            masks[pair_index(u, v, n)] = palette.mask_of(labels)
        return cls(n, palette, tuple(masks))

    @classmethod
    def uniform(cls, n: int, palette: Palette, mask: int) -> "ColoredMultigraph":
        return cls(n, palette, (mask,) * (n * (n - 1) // 2))

    @property
    def order(self) -> int:
        return self.n

    def mask(self, u: int, v: int) -> int:
        return self.masks[pair_index(u, v, self.n)]

    pair_mask = mask

    def colors(self, u: int, v: int) -> frozenset[str]:
        return frozenset(self.palette.labels_of(self.mask(u, v)))

    def set_mask(self, U: Iterable[int], V: Iterable[int]) -> int:
        """Union of colors over all pairs between vertex sets U and V."""
        V = tuple(V)
        out = 0
        for u in U:
            for v in V:
                out |= self.masks[pair_index(u, v, self.n)]
        return out

    @cached_property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """Symmetric color-mask matrix with zeros on the diagonal."""
        rows = [[0] * self.n for _ in range(self.n)]
        for (u, v), m in zip(pairs(self.n), self.masks):
            rows[u][v] = rows[v][u] = m
        return tuple(tuple(r) for r in rows)

    def with_mask(self, u: int, v: int, mask: int) -> "ColoredMultigraph":
        masks = list(self.masks)
        masks[pair_index(u, v, self.n)] = mask
        return ColoredMultigraph(self.n, self.palette, tuple(masks))

    def relabel(self, perm: Sequence[int]) -> "ColoredMultigraph":
        """Vertex ``u`` of this graph becomes vertex ``perm[u]`` of the result."""
        masks = [0] * len(self.masks)
        for (u, v), m in zip(pairs(self.n), self.masks):
            masks[pair_index(perm[u], perm[v], self.n)] = m
        return ColoredMultigraph(self.n, self.palette, tuple(masks))

    def recolor(self, color_perm: Sequence[int]) -> "ColoredMultigraph":
        """Apply ``color_perm`` (old index -> new index) to every pair."""
        return ColoredMultigraph(
            self.n, self.palette, tuple(_map_mask(m, color_perm) for m in self.masks)
        )

    def __str__(self) -> str:
        body = ", ".join(
            f"{u}{v}:{''.join(self.palette.labels_of(m))}"
            for (u, v), m in zip(pairs(self.n), self.masks)
        )
        return f"K{self.n}[{body}]"


def _map_mask(mask: int, color_perm: Sequence[int]) -> int:
    out = 0
    for i in bits(mask):
        out |= 1 << color_perm[i]
    return out


class Triangle(NamedTuple):
    """A rainbow triangle ``u < v < w`` with one witness color per pair.

    ``witness`` is ordered as the pairs ``(uv, uw, vw)``.
    """

    vertices: tuple[int, int, int]
    witness: tuple[int, int, int]


@lru_cache(maxsize=None)
def rainbow_witness(a: int, b: int, c: int) -> tuple[int, int, int] | None:
    """Three distinct colors drawn from masks a, b, c in that order, if any.

    A distinct selection exists iff Hall's condition holds, so the cheap test
    runs first and the search only fills in the witness.
    """
    if popcount(a | b) < 2 or popcount(a | c) < 2 or popcount(b | c) < 2:
        return None
    if popcount(a | b | c) < 3:
        return None
    for x in bits(a):
        for y in bits(b & ~(1 << x)):
            rest = c & ~((1 << x) | (1 << y))
            if rest:
                return (x, y, next(bits(rest)))
    raise AssertionError("Hall's condition held but no witness found")


def rainbow_triangles(g: ColoredMultigraph, limit: int | None = None) -> list[Triangle]:
    found: list[Triangle] = []
    m = g.matrix
    for u, v, w in combinations(range(g.n), 3):
        wit = rainbow_witness(m[u][v], m[u][w], m[v][w])
        if wit is not None:
            found.append(Triangle((u, v, w), wit))
            if limit is not None and len(found) >= limit:
                break
    return found


def is_gallai(g: ColoredMultigraph) -> bool:
    return not rainbow_triangles(g, limit=1)


def is_isolated(g: ColoredMultigraph, u: int, v: int) -> bool:
    m = g.matrix
    for w in range(g.n):
        if w == u or w == v:
            continue
        if m[u][w] != m[v][w] or popcount(m[u][w]) != 1:
            return False
    return True


def is_reduced(g: ColoredMultigraph) -> bool:
    return not any(is_isolated(g, u, v) for u, v in pairs(g.n))


class Reduction(NamedTuple):
    graph: ColoredMultigraph
    merge_map: tuple[int, ...]


def reduce(g: ColoredMultigraph) -> Reduction:
    """Collapse isolated pairs until none remain.

    The lowest-index vertex of an isolated pair survives.  ``merge_map[x]``
    is the vertex of the result that original vertex ``x`` collapsed into.
    A 2-vertex graph has a vacuously isolated pair and collapses to a point.
    """
    alive = list(range(g.n))
    owner = list(range(g.n))
    m = g.matrix

    def isolated(u: int, v: int) -> bool:
        for w in alive:
            if w == u or w == v:
                continue
            if m[u][w] != m[v][w] or popcount(m[u][w]) != 1:
                return False
        return True

    while len(alive) > 1:
        hit = next(((u, v) for u, v in combinations(alive, 2) if isolated(u, v)), None)
        if hit is None:
            break
        u, v = hit
        alive.remove(v)
        owner = [u if o == v else o for o in owner]
    position = {x: i for i, x in enumerate(alive)}
    return Reduction(induced_subgraph(g, alive), tuple(position[o] for o in owner))


def can_add(g: ColoredMultigraph, u: int, v: int, color: int) -> bool:
    """True iff adding ``color`` to pair uv creates no rainbow triangle."""
    m = g.matrix
    new = m[u][v] | (1 << color)
    for w in range(g.n):
        if w != u and w != v and rainbow_witness(new, m[u][w], m[v][w]) is not None:
            return False
    return True


def is_maximal(g: ColoredMultigraph) -> bool:
    """No palette color can be added to any pair without a rainbow triangle."""
    m = g.matrix
    full = g.palette.full_mask
    for u, v in pairs(g.n):
        missing = full & ~m[u][v]
        for c in bits(missing):
            if can_add(g, u, v, c):
                return False
    return True


def maximal_closure(g: ColoredMultigraph) -> ColoredMultigraph:
    """Greedy maximal supergraph of a Gallai multigraph.

    Colors are tried in palette order, and for each color every pair in
    lexicographic order; passes repeat until nothing can be added.  Greedy
    closure is not confluent, so this picks one canonical maximal supergraph.
    """
    if not is_gallai(g):
        raise NotGallaiError("maximal closure is only defined for Gallai multigraphs")
    masks = list(g.masks)
    ps = pairs(g.n)
    changed = True
    while changed:
        changed = False
        for c in range(g.palette.size):
            for i, (u, v) in enumerate(ps):
                if masks[i] >> c & 1:
                    continue
                cur = ColoredMultigraph(g.n, g.palette, tuple(masks))
                if can_add(cur, u, v, c):
                    masks[i] |= 1 << c
                    changed = True
    return ColoredMultigraph(g.n, g.palette, tuple(masks))


class CliqueClass(NamedTuple):
    vertices: tuple[int, ...]
    colors: int | None  # shared 2-color mask; None for singletons


def double_edge_cliques(g: ColoredMultigraph, check_preconditions: bool = True) -> list[CliqueClass]:
    """Classes of the relation ``|colors(uv)| == 2`` on a reduced maximal Gallai graph.

    Raises :class:`CliqueViolation` when the relation is not an equivalence
    with one color pair per class, or when a precondition fails.
    """
    if check_preconditions:
        if not is_gallai(g):
            raise CliqueViolation("input is not Gallai", rainbow_triangles(g, 1)[0].vertices)
        if not is_reduced(g):
            raise CliqueViolation("input is not reduced")
        if not is_maximal(g):
            raise CliqueViolation("input is not maximal")
    m = g.matrix
    double = [[u != v and popcount(m[u][v]) == 2 for v in range(g.n)] for u in range(g.n)]
    for u, v, w in combinations(range(g.n), 3):
        for a, b, c in ((u, v, w), (v, u, w), (w, u, v)):
            # a-b and a-c double edges force b-c double with the same colors
            if double[a][b] and double[a][c]:
                if not (m[a][b] == m[a][c] == m[b][c]):
                    raise CliqueViolation("double edges do not form a uniform clique", (a, b, c))
    seen: set[int] = set()
    classes = []
    for u in range(g.n):
        if u in seen:
            continue
        members = tuple([u] + [v for v in range(u + 1, g.n) if double[u][v]])
        seen.update(members)
        classes.append(CliqueClass(members, m[u][members[1]] if len(members) > 1 else None))
    return classes


def induced_subgraph(g: ColoredMultigraph, s: Iterable[int]) -> ColoredMultigraph:
    keep = sorted(set(s))
    if not keep:
        raise ValueError("induced subgraph needs a nonempty vertex set")
    if keep[0] < 0 or keep[-1] >= g.n:
        raise ValueError(f"vertices {keep} out of range for n={g.n}")
    m = g.matrix
    return ColoredMultigraph(
        len(keep), g.palette, tuple(m[a][b] for a, b in combinations(keep, 2))
    )


def is_uniform(g: ColoredMultigraph) -> bool:
    return len(set(g.masks)) <= 1


# ---------------------------------------------------------------- JSON


def to_json(g: ColoredMultigraph) -> dict:
    return {
        "palette": list(g.palette.labels),
        "vertices": g.n,
        "edges": [
            {"u": u, "v": v, "colors": g.palette.labels_of(m)}
            for (u, v), m in zip(pairs(g.n), g.masks)
        ],
    }


def _expect_keys(obj: object, keys: set[str], what: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be a JSON object")
    extra = set(obj) - keys
    missing = keys - set(obj)
    if extra:
        raise SchemaError(f"unknown field(s) in {what}: {sorted(extra)}")
    if missing:
        raise SchemaError(f"missing field(s) in {what}: {sorted(missing)}")
    return obj


def from_json(obj: object, palette: Palette | None = None) -> ColoredMultigraph:
    """Parse the canonical multigraph JSON object.

    ``palette`` optionally replaces the file's palette; it must contain every
    label the file uses.
    """
    obj = _expect_keys(obj, {"palette", "vertices", "edges"}, "multigraph")
    labels = obj["palette"]
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise SchemaError("palette must be a list of strings")
    try:
        file_palette = Palette(tuple(labels))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    pal = palette or file_palette
    n = obj["vertices"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("vertices must be a positive integer")
    edges = obj["edges"]
    if not isinstance(edges, list):
        raise SchemaError("edges must be a list")
    masks: dict[tuple[int, int], int] = {}
    for e in edges:
        e = _expect_keys(e, {"u", "v", "colors"}, "edge")
        u, v, cols = e["u"], e["v"], e["colors"]
        if not (isinstance(u, int) and isinstance(v, int)) or not 0 <= u < v < n:
            raise SchemaError(f"edge endpoints must satisfy 0 <= u < v < {n}, got {(u, v)}")
        if (u, v) in masks:
            raise SchemaError(f"pair {(u, v)} listed twice")
        if not isinstance(cols, list) or not cols or not all(isinstance(s, str) for s in cols):
            raise SchemaError(f"pair {(u, v)} needs a nonempty list of color labels")
        for s in cols:
            file_palette.index(s)
        masks[(u, v)] = pal.mask_of(cols)
    expected = pairs(n)
    if len(masks) != len(expected):
        missing = [p for p in expected if p not in masks]
        raise SchemaError(f"graph is not complete; missing pairs {missing}")
    return ColoredMultigraph(n, pal, tuple(masks[p] for p in expected))
