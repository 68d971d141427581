"""Graded chain complexes over GF(2), their reduction to Conley complexes, and Conley indices.

Chains are represented as Python sets of generator indices (boundaries)
and, for matrix work, as integer bitmasks whose bit r stands for row r.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .blowup import ExtendedGrading, Poset
from .cubical import Cell, Complex

__all__ = [
    "ConleyComplex",
    "EnumerationBudgetError",
    "GradedChainComplex",
    "build_graded_complex",
    "conley_index",
    "enumerate_connection_matrices",
    "euler_check",
    "gf2_rank",
    "reduce",
]


class EnumerationBudgetError(ValueError):
    """Raised when a connection-matrix enumeration would exceed its bit budget."""


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of vectors given as integer bitmasks."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


@dataclass
class GradedChainComplex:
    """Free GF(2) chain complex on the cells of a complex, graded by a poset."""

    cells: list[Cell]
    degree: list[int]
    grade: list[int]
    boundary: list[frozenset[int]]
    poset: Poset

    @property
    def size(self) -> int:
        return len(self.cells)

    def boundary_squared_zero(self) -> bool:
        for k in range(self.size):
            acc: set[int] = set()
            for j in self.boundary[k]:
                acc ^= self.boundary[j]
            if acc:
                return False
        return True

    def filtered(self) -> bool:
        return all(self.poset.leq(self.grade[j], self.grade[k])
                   for k in range(self.size) for j in self.boundary[k])


def build_graded_complex(ext: ExtendedGrading) -> GradedChainComplex:
    """Cellular chain complex of the graded complex with incidences reduced mod 2."""
    cx: Complex = ext.complex
    cells = list(cx.all_cells)
    idx = cx.index
    bd = [frozenset(idx[f] for f, _ in cx.boundary(c)) for c in cells]
    return GradedChainComplex(cells, [c.dim for c in cells], [ext.grade[c] for c in cells], bd, ext.poset)


@dataclass
class ConleyComplex:
    """Reduced complex: surviving generators and the strictly grade-decreasing boundary."""

    generators: list[int]          # indices into the source chain complex
    cells: list[Cell]
    degree: list[int]
    grade: list[int]
    delta: list[int]               # column bitmasks over positions in ``generators``
    poset: Poset

    @property
    def size(self) -> int:
        return len(self.generators)

    def betti(self, p: int, top_degree: int) -> list[int]:
        out = [0] * (top_degree + 1)
        for d, g in zip(self.degree, self.grade):
            if g == p:
                out[d] += 1
        return out

    def all_betti(self, top_degree: int) -> dict[int, list[int]]:
        return {p: self.betti(p, top_degree) for p in range(self.poset.size)}

    def entries(self, delta: Sequence[int] | None = None) -> list[tuple[int, int]]:
        """Unit entries as (from column, to row) position pairs, column-major."""
        delta = self.delta if delta is None else delta
        return [(c, r) for c, col in enumerate(delta) for r in range(self.size) if col >> r & 1]

    def square_zero(self, delta: Sequence[int] | None = None) -> bool:
        delta = self.delta if delta is None else delta
        for col in delta:
            acc = 0
            m = col
            while m:
                low = m & -m
                acc ^= delta[low.bit_length() - 1]
                m ^= low
            if acc:
                return False
        return True

    def strictly_decreasing(self, delta: Sequence[int] | None = None) -> bool:
        delta = self.delta if delta is None else delta
        return all(self.poset.lt(self.grade[r], self.grade[c]) for c, r in self.entries(delta))

    def block(self, k: int, delta: Sequence[int] | None = None, rows=None, cols=None) -> list[list[int]]:
        """Matrix of Delta from degree k to degree k-1 (rows: degree k-1 generators)."""
        delta = self.delta if delta is None else delta
        rows = [i for i in range(self.size) if self.degree[i] == k - 1] if rows is None else rows
        cols = [i for i in range(self.size) if self.degree[i] == k] if cols is None else cols
        return [[delta[c] >> r & 1 for c in cols] for r in rows]

    def to_json(self, top_degree: int) -> dict:
        return {
            "generators": [{"id": i, "degree": self.degree[i], "grade": self.grade[i], "cell": self.cells[i].text()}
                           for i in range(self.size)],
            "boundary": [[c, r] for c, r in self.entries()],
            "betti": {str(p): b for p, b in self.all_betti(top_degree).items()},
        }


def reduce(gcc: GradedChainComplex) -> ConleyComplex:
    """Eliminate same-grade boundary pairs until the boundary is strictly grade-decreasing.

    Grades are processed in increasing id order (a linear extension), then
    degrees ascending, then generators in cell order.  For a generator k
    with a same-grade face q (the smallest such), every other c having q in
    its boundary receives ``bd(c) += bd(k)``; then k and q are removed.
    """
    n = gcc.size
    bd = [set(b) for b in gcc.boundary]
    cob = [set() for _ in range(n)]
    for k in range(n):
        for j in bd[k]:
            cob[j].add(k)
    alive = [True] * n
    grade, degree = gcc.grade, gcc.degree
    order = sorted(range(n), key=lambda i: (grade[i], degree[i], i))
    for k in order:
        if not alive[k]:
            continue
        g = grade[k]
        same = [j for j in bd[k] if grade[j] == g]
        if not same:
            continue
        q = min(same)
        bk = bd[k]
        for c in list(cob[q]):
            if c == k:
                continue
            # bd(c) ^= bd(k), keeping coboundaries in sync
            for j in bk:
                if j in bd[c]:
                    bd[c].discard(j)
                    cob[j].discard(c)
                else:
                    bd[c].add(j)
                    cob[j].add(c)
        for c in list(cob[k]):
            bd[c].discard(k)
        for j in bd[k]:
            cob[j].discard(k)
        for j in bd[q]:
            cob[j].discard(q)
        for c in list(cob[q]):
            bd[c].discard(q)
        bd[k] = set()
        bd[q] = set()
        cob[k] = set()
        cob[q] = set()
        alive[k] = alive[q] = False
    gens = [i for i in range(n) if alive[i]]
    pos = {g: t for t, g in enumerate(gens)}
    delta = []
    for g in gens:
        col = 0
        for j in bd[g]:
            col |= 1 << pos[j]
        delta.append(col)
    return ConleyComplex(gens, [gcc.cells[i] for i in gens], [degree[i] for i in gens],
                         [grade[i] for i in gens], delta, gcc.poset)


def conley_index(ext: ExtendedGrading, p: int) -> list[int]:
    """Betti numbers over GF(2) of the relative pair (preimage of O(p), preimage of O(p)^<).

    The relative chain complex is the quotient on the fiber of p, so its
    Betti numbers follow from ranks of the boundary restricted to that fiber.
    """
    cx = ext.complex
    fiber = [c for c in cx.all_cells if ext.grade[c] == p]
    N = cx.N
    by_dim: list[list[Cell]] = [[] for _ in range(N + 1)]
    for c in fiber:
        by_dim[c.dim].append(c)
    pos = [{c: i for i, c in enumerate(cells)} for cells in by_dim]
    ranks = [0] * (N + 2)
    for k in range(1, N + 1):
        rows = []
        for c in by_dim[k]:
            v = 0
            for f, _ in cx.boundary(c):
                i = pos[k - 1].get(f)
                if i is not None:
                    v |= 1 << i
            rows.append(v)
        ranks[k] = gf2_rank(rows)
    return [len(by_dim[k]) - ranks[k] - ranks[k + 1] for k in range(N + 1)]


def euler_check(cc: ConleyComplex) -> int:
    """Sum over grades and degrees of (-1)^k dim CH_k(p)."""
    return sum((-1) ** d for d in cc.degree)


def _pairs(cc: ConleyComplex) -> list[tuple[int, int]]:
    return [(i, j) for i in range(cc.size) for j in range(cc.size)
            if cc.degree[i] == cc.degree[j] and cc.poset.lt(cc.grade[j], cc.grade[i])]


def enumerate_connection_matrices(cc: ConleyComplex, max_bits: int = 20) -> list[tuple[int, ...]]:
    """All boundaries psi Delta psi^-1 with psi unipotent, degree-preserving and grade-decreasing.

    The group of such psi is generated by transvections ``I + E[j, i]`` with
    deg(i) = deg(j) and grade(j) < grade(i), so the conjugacy orbit is the
    closure of Delta under those elementary conjugations.  Returns the orbit
    sorted, each element a tuple of column bitmasks.
    """
    pairs = _pairs(cc)
    if len(pairs) > max_bits:
        raise EnumerationBudgetError(
            f"{len(pairs)} perturbation pairs exceed the enumeration budget of {max_bits}")
    start = tuple(cc.delta)
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for i, j in pairs:
            cols = list(m)
            # row_j += row_i
            bi, bj = 1 << i, 1 << j
            for c in range(len(cols)):
                if cols[c] & bi:
                    cols[c] ^= bj
            # col_i += col_j
            cols[i] ^= cols[j]
            t = tuple(cols)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)
