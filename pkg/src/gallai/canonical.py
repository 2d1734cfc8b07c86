"""Canonical codes of colored multigraphs under vertex and color relabeling.

The code is the lexicographically least pair-mask sequence over all
``n! * c!`` relabelings, prefixed by ``n`` and ``c``.  Exhaustive
minimization is fine at the sizes this package enumerates (n <= 6, c <= 4).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations
from math import factorial

import numpy as np

from gallai.multigraph import ColoredMultigraph, Palette, pair_index

CanonicalCode = bytes


@lru_cache(maxsize=None)
def _pair_perms(n: int) -> np.ndarray:
    """Row p gives, for each new pair, the index of the old pair it reads."""
    rows = []
    for perm in permutations(range(n)):
        rows.append([pair_index(perm[i], perm[j], n) for i, j in combinations(range(n), 2)])
    return np.array(rows, dtype=np.intp).reshape(factorial(n), n * (n - 1) // 2)


@lru_cache(maxsize=None)
def _color_tables(c: int, symmetric: bool) -> np.ndarray:
    perms = list(permutations(range(c))) if symmetric else [tuple(range(c))]
    table = np.zeros((len(perms), 1 << c), dtype=np.int64)
    for k, perm in enumerate(perms):
        for mask in range(1 << c):
            out = 0
            for i in range(c):
                if mask >> i & 1:
                    out |= 1 << perm[i]
            table[k, mask] = out
    return table


def _relabelings(g: ColoredMultigraph, color_symmetry: bool) -> np.ndarray:
    """All relabeled mask sequences, shape (color perms * vertex perms, pairs)."""
    masks = np.asarray(g.masks, dtype=np.intp)
    seqs = masks[_pair_perms(g.n)]
    mapped = _color_tables(g.palette.size, color_symmetry)[:, seqs]
    return mapped.reshape(-1, seqs.shape[1])


def _lexmin(rows: np.ndarray, c: int) -> np.ndarray:
    width = rows.shape[1]
    if width * c <= 62:
        weights = np.array([1 << (c * (width - 1 - j)) for j in range(width)], dtype=np.int64)
        return rows[int(np.argmin(rows @ weights))]
    order = np.lexsort(rows.T[::-1])
    return rows[order[0]]


def canonical_form(g: ColoredMultigraph, color_symmetry: bool = True) -> CanonicalCode:
    c = g.palette.size
    if g.n == 1:
        return bytes([1, c])
    best = _lexmin(_relabelings(g, color_symmetry), c)
    return bytes([g.n, c]) + bytes(int(x) for x in best)


def from_code(code: CanonicalCode, palette: Palette) -> ColoredMultigraph:
    """The canonical representative whose mask sequence is the code itself."""
    n, c = code[0], code[1]
    if c != palette.size:
        raise ValueError(f"code is for {c} colors, palette has {palette.size}")
    return ColoredMultigraph(n, palette, tuple(code[2:]))


def canonical_representative(g: ColoredMultigraph) -> ColoredMultigraph:
    return from_code(canonical_form(g), g.palette)


def automorphism_count(g: ColoredMultigraph, color_symmetry: bool = True) -> int:
    """Number of (vertex, color) relabelings that map ``g`` to itself."""
    if g.n == 1:
        return factorial(g.palette.size) if color_symmetry else 1
    rows = _relabelings(g, color_symmetry)
    ident = np.asarray(g.masks, dtype=rows.dtype)
    return int(np.all(rows == ident, axis=1).sum())


def orbit_size(g: ColoredMultigraph, color_symmetry: bool = True) -> int:
    """Number of distinct labeled graphs isomorphic to ``g``."""
    group = factorial(g.n) * (factorial(g.palette.size) if color_symmetry else 1)
    return group // automorphism_count(g, color_symmetry)
