"""Blow-up complex, the blowup bijection, and extension of gradings to all cells."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .cubical import Cell, Complex, ComplexError
from .dynamics import ModelError

__all__ = [
    "BlowupComplex",
    "ExtendedGrading",
    "GradingExtensionError",
    "Poset",
    "blowup",
    "downset_pair",
    "extend_grading",
    "extend_top_grading",
]


class GradingExtensionError(RuntimeError):
    """A lower cell whose top cofaces have no unique minimal grade."""

    def __init__(self, cell: Cell, minima: Sequence[int], labels: Sequence[str] | None = None):
        self.cell = cell
        self.minima = list(minima)
        names = [labels[m] if labels else str(m) for m in self.minima]
        super().__init__(f"non-unique minimum grade at {cell.text()}: incomparable minima {names}")


class Poset:
    """Finite poset on ``0..n-1`` given by down-set bitmasks.

    ``below[p]`` has bit q set iff q <= p.  Element ids must form a linear
    extension (q <= p implies q <= p as integers).
    """

    def __init__(self, below: Sequence[int], labels: Sequence[str] | None = None):
        self.below = [int(b) | (1 << p) for p, b in enumerate(below)]
        self.size = len(self.below)
        self.labels = list(labels) if labels is not None else [str(p) for p in range(self.size)]
        for p, b in enumerate(self.below):
            if b >> (p + 1):
                raise ValueError(f"element ids are not a linear extension at {self.labels[p]}")
            q = b
            while q:
                low = q & -q
                r = low.bit_length() - 1
                if self.below[r] & ~b:
                    raise ValueError(f"order relation is not transitive at {self.labels[p]}")
                q ^= low

    @classmethod
    def from_relations(cls, n: int, less: Sequence[tuple[int, int]], labels=None) -> "Poset":
        """Poset generated by pairs ``(q, p)`` meaning q < p; ids need not be sorted."""
        below = [1 << p for p in range(n)]
        changed = True
        for q, p in less:
            below[p] |= 1 << q
        while changed:
            changed = False
            for p in range(n):
                acc = below[p]
                m = acc
                while m:
                    low = m & -m
                    acc |= below[low.bit_length() - 1]
                    m ^= low
                if acc != below[p]:
                    below[p] = acc
                    changed = True
        return cls(below, labels)

    def leq(self, q: int, p: int) -> bool:
        return bool(self.below[p] >> q & 1)

    def lt(self, q: int, p: int) -> bool:
        return q != p and self.leq(q, p)

    def downset(self, p: int) -> int:
        return self.below[p]

    def strict_downset(self, p: int) -> int:
        return self.below[p] & ~(1 << p)

    def minima(self, elems) -> list[int]:
        elems = sorted(set(elems))
        return [m for m in elems if not any(o != m and self.leq(o, m) for o in elems)]


@dataclass(frozen=True)
class BlowupComplex:
    """The blow-up X_b of a complex X: tops of X_b correspond to cells of X."""

    source: Complex
    complex: Complex

    def b(self, cell: Cell) -> Cell:
        if cell not in self.source:
            raise ComplexError(f"{cell.text()} is not a cell of the source complex")
        return Cell(tuple(2 * v + w for v, w in zip(cell.v, cell.w)), (1,) * self.source.N)

    def b_inverse(self, top: Cell) -> Cell:
        if top not in self.complex or top.dim != self.complex.N:
            raise ComplexError(f"{top.text()} is not a top cell of the blow-up complex")
        return Cell(tuple((x - x % 2) // 2 for x in top.v), tuple(x % 2 for x in top.v))


def blowup(cx: Complex) -> BlowupComplex:
    """X_b with vertex limits 2L+1, so that its top cells biject with the cells of X."""
    return BlowupComplex(cx, Complex(2 * L + 1 for L in cx.limits))


class ExtendedGrading:
    """A grading of every cell of a complex, induced by a grading of its top cells."""

    def __init__(self, cx: Complex, poset: Poset, grade: Mapping[Cell, int], blow: BlowupComplex | None = None):
        self.complex = cx
        self.poset = poset
        self.grade = dict(grade)
        self.blowup = blow

    def __call__(self, cell: Cell) -> int:
        return self.grade[cell]

    def fiber(self, p: int) -> list[Cell]:
        return [c for c in self.complex.all_cells if self.grade[c] == p]

    def preimage(self, mask: int) -> list[Cell]:
        return [c for c in self.complex.all_cells if mask >> self.grade[c] & 1]


def extend_top_grading(cx: Complex, top_grade: Mapping[Cell, int], poset: Poset) -> dict[Cell, int]:
    """Grade each lower cell by the unique minimum of the grades of its top cofaces."""
    grade: dict[Cell, int] = {}
    for c in cx.all_cells:
        if c.dim == cx.N:
            grade[c] = top_grade[c]
            continue
        vals = {top_grade[mu] for mu in cx.top_star(c)}
        mins = poset.minima(vals)
        if len(mins) != 1:
            raise GradingExtensionError(c, mins, poset.labels)
        grade[c] = mins[0]
    return grade


def extend_grading(grading, model: str | None = None) -> ExtendedGrading:
    """Extend a grading of X (a :class:`~conley_rook.dynamics.Grading`) to the blow-up X_b."""
    cx = grading.stg.complex
    model = (model or grading.stg.model).upper()
    if model == "F3" and cx.N > 3:
        raise ModelError("F3 undefined above dimension 3")
    blow = blowup(cx)
    poset = Poset(grading.below, [str(p) for p in range(grading.size)])
    top = {blow.b(c): grading.comp[i] for i, c in enumerate(cx.all_cells)}
    return ExtendedGrading(blow.complex, poset, extend_top_grading(blow.complex, top, poset), blow)


def downset_pair(ext: ExtendedGrading, p: int) -> tuple[list[Cell], list[Cell]]:
    """(N, N^-) = preimages of the down-set O(p) and the strict down-set O(p)^<."""
    return ext.preimage(ext.poset.downset(p)), ext.preimage(ext.poset.strict_downset(p))
