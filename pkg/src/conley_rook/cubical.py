"""Abstract cubical complexes X(I) on a rectangular vertex grid.

A cell is a pair ``[v, w]`` of integer vectors: ``v`` is the lower-left
vertex and ``w`` a 0/1 mask of the directions the cell extends in.  All
queries are plain arithmetic on ``(v, w)``; the complex itself only stores
its extents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "Cell",
    "Complex",
    "ComplexError",
    "Extents",
    "boundary_cells",
    "build_complex",
    "directions",
    "extension",
    "incidence",
    "is_face",
    "join",
    "meet",
    "parse_cell",
    "relative_position",
    "top_star",
]


class ComplexError(ValueError):
    """Raised for malformed extents or cells that do not fit a complex."""


class Cell(NamedTuple):
    v: tuple[int, ...]
    w: tuple[int, ...]

    @property
    def dim(self) -> int:
        return sum(self.w)

    @property
    def N(self) -> int:
        return len(self.v)

    @property
    def essential(self) -> frozenset[int]:
        """J_e: 0-based directions the cell extends in."""
        return frozenset(n for n, b in enumerate(self.w) if b)

    @property
    def inessential(self) -> frozenset[int]:
        """J_i: 0-based directions the cell is thin in."""
        return frozenset(n for n, b in enumerate(self.w) if not b)

    def text(self) -> str:
        return ",".join(map(str, self.v)) + ";" + ",".join(map(str, self.w))

    def __str__(self) -> str:
        return f"[{self.v},{self.w}]"


def make_cell(v: Iterable[int], w: Iterable[int]) -> Cell:
    return Cell(tuple(int(x) for x in v), tuple(int(x) for x in w))


def parse_cell(text: str) -> Cell:
    """Parse the ``"v1,...,vN;w1,...,wN"`` text form."""
    try:
        vs, ws = text.strip().split(";")
        v = tuple(int(x) for x in vs.split(","))
        w = tuple(int(x) for x in ws.split(","))
    except ValueError as exc:
        raise ComplexError(f"malformed cell text {text!r}") from exc
    if len(v) != len(w) or any(b not in (0, 1) for b in w):
        raise ComplexError(f"malformed cell text {text!r}")
    return Cell(v, w)


@dataclass(frozen=True)
class Extents:
    """Number of output thresholds K(n) per direction."""

    K: tuple[int, ...]

    def __post_init__(self):
        K = tuple(self.K)
        object.__setattr__(self, "K", K)
        if not K:
            raise ComplexError("extents must have at least one direction")
        for n, k in enumerate(K):
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise ComplexError(f"K({n + 1}) = {k!r} must be a positive integer")

    @property
    def N(self) -> int:
        return len(self.K)


class Complex:
    """Cubical complex whose vertices range over ``prod {0..limits[n]}``.

    For a complex built from extents K the limits are ``K(n) + 1``.  The
    blow-up complex and the small toy complexes used for Conley-complex
    checks are built directly from limits.
    """

    def __init__(self, limits: Iterable[int]):
        self.limits = tuple(int(x) for x in limits)
        if not self.limits or any(x < 1 for x in self.limits):
            raise ComplexError(f"vertex limits must be positive, got {self.limits}")
        self.N = len(self.limits)

    def __repr__(self):
        return f"Complex(limits={self.limits})"

    def __eq__(self, other):
        return isinstance(other, Complex) and other.limits == self.limits

    def __hash__(self):
        return hash(("Complex", self.limits))

    @property
    def K(self) -> tuple[int, ...]:
        return tuple(x - 1 for x in self.limits)

    # -- enumeration -----------------------------------------------------

    def __contains__(self, cell) -> bool:
        v, w = cell
        if len(v) != self.N or len(w) != self.N:
            return False
        return all(b in (0, 1) and 0 <= x and x + b <= L for x, b, L in zip(v, w, self.limits))

    def check(self, cell: Cell) -> Cell:
        if len(cell.v) != self.N or len(cell.w) != self.N:
            raise ComplexError(f"cell {cell} has wrong dimension for N={self.N}")
        if cell not in self:
            raise ComplexError(f"cell {cell} is not in the complex with limits {self.limits}")
        return cell

    def cells(self, dim: int | None = None) -> Iterator[Cell]:
        """All cells in lexicographic (v, w) order, optionally of one dimension."""
        for c in self.all_cells:
            if dim is None or c.dim == dim:
                yield c

    @cached_property
    def all_cells(self) -> tuple[Cell, ...]:
        ranges = [range(L + 1) for L in self.limits]
        out = []
        for v in itertools.product(*ranges):
            for w in itertools.product((0, 1), repeat=self.N):
                if all(x + b <= L for x, b, L in zip(v, w, self.limits)):
                    out.append(Cell(v, w))
        return tuple(out)

    @cached_property
    def index(self) -> dict[Cell, int]:
        return {c: i for i, c in enumerate(self.all_cells)}

    def top_cells(self) -> Iterator[Cell]:
        ones = (1,) * self.N
        for v in itertools.product(*[range(L) for L in self.limits]):
            yield Cell(v, ones)

    def vertices(self) -> Iterator[Cell]:
        zeros = (0,) * self.N
        for v in itertools.product(*[range(L + 1) for L in self.limits]):
            yield Cell(v, zeros)

    def cell_count(self) -> int:
        out = 1
        for L in self.limits:
            out *= 2 * L + 1
        return out

    def top_count(self) -> int:
        out = 1
        for L in self.limits:
            out *= L
        return out

    # -- local structure -------------------------------------------------

    def faces(self, cell: Cell) -> list[Cell]:
        """All faces of ``cell`` (including itself), in lexicographic order."""
        v, w = cell
        opts = []
        for x, b in zip(v, w):
            opts.append(((x, 1), (x, 0), (x + 1, 0)) if b else ((x, 0),))
        out = [Cell(tuple(o[0] for o in combo), tuple(o[1] for o in combo))
               for combo in itertools.product(*opts)]
        out.sort()
        return out

    def cofaces(self, cell: Cell) -> list[Cell]:
        """All cofaces of ``cell`` (including itself), in lexicographic order."""
        v, w = cell
        opts = []
        for x, b, L in zip(v, w, self.limits):
            if b:
                opts.append(((x, 1),))
            else:
                o = [(x, 0)]
                if x + 1 <= L:
                    o.append((x, 1))
                if x >= 1:
                    o.append((x - 1, 1))
                opts.append(tuple(o))
        out = [Cell(tuple(o[0] for o in combo), tuple(o[1] for o in combo))
               for combo in itertools.product(*opts)]
        out.sort()
        return out

    def boundary(self, cell: Cell) -> list[tuple[Cell, int]]:
        """Codimension-one faces with their signed incidence numbers."""
        v, w = cell
        out = []
        sign = 1
        for i, b in enumerate(w):
            if not b:
                continue
            w2 = w[:i] + (0,) + w[i + 1:]
            v2 = v[:i] + (v[i] + 1,) + v[i + 1:]
            out.append((Cell(v, w2), -sign))
            out.append((Cell(v2, w2), sign))
            sign = -sign
        return out

    def coboundary(self, cell: Cell) -> list[tuple[Cell, int]]:
        """Codimension-one cofaces with incidence numbers kappa(coface, cell)."""
        v, w = cell
        out = []
        for i, b in enumerate(w):
            if b:
                continue
            w2 = w[:i] + (1,) + w[i + 1:]
            if v[i] + 1 <= self.limits[i]:
                c = Cell(v, w2)
                out.append((c, incidence(c, cell)))
            if v[i] >= 1:
                c = Cell(v[:i] + (v[i] - 1,) + v[i + 1:], w2)
                out.append((c, incidence(c, cell)))
        return out

    def top_star(self, cell: Cell) -> list[Cell]:
        """Top_X(cell): the top-dimensional cofaces, in lexicographic order."""
        v, w = cell
        opts = []
        for x, b, L in zip(v, w, self.limits):
            if b:
                opts.append((x,))
            else:
                opts.append(tuple(y for y in (x - 1, x) if 0 <= y < L))
        ones = (1,) * self.N
        return [Cell(tuple(combo), ones) for combo in itertools.product(*opts)]

    def is_boundary_cell(self, cell: Cell) -> bool:
        v, w = cell
        return any(b == 0 and (x == 0 or x == L) for x, b, L in zip(v, w, self.limits))


def build_complex(extents: Extents | Iterable[int]) -> Complex:
    """Cubical complex generated by ``prod {0, ..., K(n)+1}``."""
    if not isinstance(extents, Extents):
        extents = Extents(tuple(extents))
    return Complex(k + 1 for k in extents.K)


# -- pairwise relations ----------------------------------------------------

def _same_n(a: Cell, b: Cell):
    if len(a.v) != len(b.v):
        raise ComplexError(f"cells {a} and {b} live in different dimensions")


def is_face(a: Cell, b: Cell) -> bool:
    """a is a face of b: v_a = v_b + q and w_a + q <= w_b for some q in {0,1}^N."""
    _same_n(a, b)
    for va, wa, vb, wb in zip(a.v, a.w, b.v, b.w):
        q = va - vb
        if q not in (0, 1) or wa + q > wb:
            return False
    return True


def relative_position(a: Cell, b: Cell) -> tuple[int, ...]:
    """p(a, b) for a face a of b: (-1)^(v_a - v_b) (w_a - w_b) per direction."""
    if not is_face(a, b):
        raise ComplexError(f"{a} is not a face of {b}")
    return tuple((-1) ** (va - vb) * (wa - wb) for va, wa, vb, wb in zip(a.v, a.w, b.v, b.w))


def extension(a: Cell, b: Cell) -> frozenset[int]:
    """Ex(a, b) = J_i(a) & J_e(b), as 0-based directions."""
    return frozenset(n for n in range(len(a.w)) if a.w[n] == 0 and b.w[n] == 1)


def directions(c: Cell, coface: Cell | None = None):
    """Return ``(J_e, J_i, Ex)``; ``Ex`` is empty when no coface is given."""
    if coface is not None and not is_face(c, coface):
        raise ComplexError(f"{c} is not a face of {coface}")
    ex = extension(c, coface) if coface is not None else frozenset()
    return c.essential, c.inessential, ex


def incidence(a: Cell, b: Cell) -> int:
    """kappa(a, b) in {-1, 0, 1}; nonzero only for codimension-one faces b of a.

    The sign carries the usual orientation factor (-1)^#{j < i : w_j = 1}
    so that the integer boundary squares to zero; it agrees with the plain
    -1/+1 rule whenever i is the first essential direction and is
    irrelevant modulo 2.
    """
    _same_n(a, b)
    if b.dim != a.dim - 1 or not is_face(b, a):
        return 0
    i = next(n for n in range(len(a.w)) if a.w[n] != b.w[n])
    sign = (-1) ** sum(a.w[:i])
    return sign if b.v[i] == a.v[i] + 1 else -sign


def join(cx: Complex, a: Cell, b: Cell) -> Cell | None:
    """Minimal common coface, or None when a and b share no coface."""
    _same_n(a, b)
    lo = tuple(min(x, y) for x, y in zip(a.v, b.v))
    hi = tuple(max(x + p, y + q) for x, p, y, q in zip(a.v, a.w, b.v, b.w))
    w = tuple(h - l for h, l in zip(hi, lo))
    if any(d > 1 for d in w):
        return None
    c = Cell(lo, w)
    if c not in cx:
        return None
    return c


def meet(cx: Complex, a: Cell, b: Cell) -> Cell | None:
    """Maximal common face, or None when a and b share no face."""
    _same_n(a, b)
    lo = tuple(max(x, y) for x, y in zip(a.v, b.v))
    hi = tuple(min(x + p, y + q) for x, p, y, q in zip(a.v, a.w, b.v, b.w))
    w = tuple(h - l for h, l in zip(hi, lo))
    if any(d < 0 for d in w):
        return None
    c = Cell(lo, w)
    return c if c in cx else None


def top_star(cx: Complex, c: Cell) -> list[Cell]:
    return cx.top_star(c)


def boundary_cells(cx: Complex) -> set[Cell]:
    """bdy(X): closure of the codimension-one cells with a unique top coface."""
    out: set[Cell] = set()
    for c in cx.cells(cx.N - 1):
        if len(cx.top_star(c)) == 1:
            out.update(cx.faces(c))
    return out
