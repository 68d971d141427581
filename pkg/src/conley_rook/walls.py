"""Wall labelings, rook fields, and the per-cell direction classes.

Directions are 0-based internally (direction ``n`` here is direction
``n + 1`` in the usual 1-based notation).  Text formats and JSON exports
convert at the boundary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import networkx as nx

from .cubical import Cell, Complex, ComplexError, boundary_cells, extension, parse_cell, relative_position

__all__ = [
    "DirectionClasses",
    "LabelingError",
    "RookField",
    "ValidationResult",
    "WallLabeling",
    "exit_entrance",
    "inducement_maps",
    "is_strongly_dissipative",
    "load_wall_labeling",
    "rook_field",
    "validate",
    "vertex_monotonicity",
    "walls_of",
]

EXIT, ENTRANCE, NEITHER = "exit", "entrance", "neither"


class LabelingError(ValueError):
    """Raised for malformed or inadmissible wall labelings."""


def _ones_except(N: int, n: int) -> tuple[int, ...]:
    return tuple(0 if k == n else 1 for k in range(N))


def lower_wall(mu: Cell, n: int) -> Cell:
    """mu^-_n = [v, 1^(n)]."""
    return Cell(mu.v, _ones_except(len(mu.v), n))


def upper_wall(mu: Cell, n: int) -> Cell:
    """mu^+_n = [v + e_n, 1^(n)]."""
    v = mu.v[:n] + (mu.v[n] + 1,) + mu.v[n + 1:]
    return Cell(v, _ones_except(len(mu.v), n))


def walls_of(cx: Complex) -> list[tuple[Cell, Cell]]:
    """W(X): every (codim-1 face, top cell) pair, in lexicographic order."""
    out = []
    for mu in cx.top_cells():
        for n in range(cx.N):
            out.append((lower_wall(mu, n), mu))
            out.append((upper_wall(mu, n), mu))
    out.sort()
    return out


def wall_direction(xi: Cell) -> int:
    """The unique inessential direction of a codimension-one cell."""
    return xi.w.index(0)


class WallLabeling:
    """Table omega: (wall, top cell) -> +1/-1 over all of W(X)."""

    def __init__(self, cx: Complex, table: Mapping[tuple[Cell, Cell], int]):
        self.complex = cx
        expected = walls_of(cx)
        missing = [p for p in expected if p not in table]
        if missing:
            xi, mu = missing[0]
            raise LabelingError(f"missing wall {xi.text()} {mu.text()} ({len(missing)} missing)")
        extra = set(table) - set(expected)
        if extra:
            xi, mu = sorted(extra)[0]
            raise LabelingError(f"{xi.text()} {mu.text()} is not a wall pair of the complex")
        for key, val in table.items():
            if val not in (1, -1):
                raise LabelingError(f"label {val!r} at {key[0].text()} {key[1].text()} is not +1/-1")
        self.table = {p: int(table[p]) for p in expected}

    def __call__(self, xi: Cell, mu: Cell) -> int:
        return self.table[(xi, mu)]

    def __eq__(self, other):
        return isinstance(other, WallLabeling) and self.complex == other.complex and self.table == other.table

    @property
    def N(self) -> int:
        return self.complex.N

    def lower(self, mu: Cell, n: int) -> int:
        return self.table[(lower_wall(mu, n), mu)]

    def upper(self, mu: Cell, n: int) -> int:
        return self.table[(upper_wall(mu, n), mu)]

    def flipped(self, xi: Cell, mu: Cell) -> "WallLabeling":
        t = dict(self.table)
        t[(xi, mu)] = -t[(xi, mu)]
        return WallLabeling(self.complex, t)

    def to_text(self) -> str:
        lines = [f"{xi.text()} {mu.text()} {'+1' if s > 0 else '-1'}" for (xi, mu), s in self.table.items()]
        return "\n".join(lines) + "\n"


def load_wall_labeling(text: str, K: Iterable[int] | None = None) -> WallLabeling:
    """Parse ``<wall> <top> <+1|-1>`` records; the complex is inferred from the cells."""
    table: dict[tuple[Cell, Cell], int] = {}
    N = None
    hi = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise LabelingError(f"line {lineno}: expected '<wall> <top> <+1|-1>', got {raw!r}")
        try:
            xi, mu = parse_cell(parts[0]), parse_cell(parts[1])
        except ComplexError as exc:
            raise LabelingError(f"line {lineno}: {exc}") from None
        if parts[2] not in ("+1", "-1", "1"):
            raise LabelingError(f"line {lineno}: label {parts[2]!r} is not +1 or -1")
        if N is None:
            N = len(mu.v)
            hi = [0] * N
        if len(xi.v) != N or len(mu.v) != N:
            raise LabelingError(f"line {lineno}: inconsistent dimension")
        if mu.dim != N or xi.dim != N - 1 or not all(0 <= a - b <= 1 for a, b in zip(xi.v, mu.v)):
            raise LabelingError(f"line {lineno}: {parts[0]} is not a wall of the top cell {parts[1]}")
        if (xi, mu) in table:
            raise LabelingError(f"line {lineno}: duplicate wall pair")
        table[(xi, mu)] = -1 if parts[2] == "-1" else 1
        for n in range(N):
            hi[n] = max(hi[n], mu.v[n] + 1)
    if N is None:
        raise LabelingError("empty wall-labeling file")
    limits = [k + 1 for k in K] if K is not None else hi
    try:
        cx = Complex(limits)
    except ComplexError as exc:
        raise LabelingError(str(exc)) from None
    return WallLabeling(cx, table)


# -- validation ------------------------------------------------------------

@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    offending_vertex: Cell | None = None
    inducement: Mapping[Cell, tuple[int, ...]] = field(default_factory=dict)

    def __bool__(self):
        return self.valid


def _adjacent_pairs(tops: list[Cell], n: int):
    s = set(tops)
    for mu in tops:
        nb = Cell(mu.v[:n] + (mu.v[n] + 1,) + mu.v[n + 1:], mu.w)
        if nb in s:
            yield mu, nb


def inducement_maps(omega: WallLabeling, sigma: Cell) -> list[tuple[int, ...]]:
    """All local inducement maps at the vertex sigma (exhaustive over N^N)."""
    cx, N = omega.complex, omega.N
    tops = cx.top_star(sigma)
    # (i): which k may differ between n-adjacent tops
    bad_i = [set() for _ in range(N)]  # bad_i[n] = k that do vary across an n-adjacency
    for n in range(N):
        for mu, nu in _adjacent_pairs(tops, n):
            for k in range(N):
                if k == n:
                    continue
                if omega.lower(mu, k) != omega.lower(nu, k) or omega.upper(mu, k) != omega.upper(nu, k):
                    bad_i[n].add(k)
    # (ii): n-walls containing sigma whose two sides disagree
    flips = set()
    for n in range(N):
        for mu, nu in _adjacent_pairs(tops, n):
            wall = upper_wall(mu, n)
            if omega(wall, mu) != omega(wall, nu):
                flips.add(n)
    out = []
    for cand in itertools.product(range(N), repeat=N):
        ok = True
        for n in range(N):
            if bad_i[n] - {cand[n]}:
                ok = False
                break
            if n in flips and cand[n] != n:
                ok = False
                break
        if ok:
            out.append(cand)
    return out


def validate(omega: WallLabeling) -> ValidationResult:
    """Check that every vertex admits a local inducement map."""
    found = {}
    for sigma in omega.complex.vertices():
        maps = inducement_maps(omega, sigma)
        if not maps:
            return ValidationResult(False, sigma, found)
        found[sigma] = maps[0]
    return ValidationResult(True, None, found)


def is_strongly_dissipative(omega: WallLabeling) -> bool:
    """omega(xi, mu) = -p(xi, mu) on every wall with a single top cell."""
    cx = omega.complex
    for (xi, mu), s in omega.table.items():
        if len(cx.top_star(xi)) == 1:
            n = wall_direction(xi)
            if s != -relative_position(xi, mu)[n]:
                return False
    return True


# -- rook field --------------------------------------------------------------

class RookField:
    """Phi: (cell, top cell) -> {0, +1, -1}^N, memoized one cell at a time."""

    def __init__(self, omega: WallLabeling):
        self.omega = omega
        self.complex = omega.complex
        self.N = omega.N
        self._rows: dict[Cell, dict[Cell, tuple[int, ...]]] = {}
        self._classes: dict[Cell, DirectionClasses] = {}

    def row(self, xi: Cell) -> dict[Cell, tuple[int, ...]]:
        r = self._rows.get(xi)
        if r is None:
            r = {mu: self._compute(xi, mu) for mu in self.complex.top_star(xi)}
            self._rows[xi] = r
        return r

    def __call__(self, xi: Cell, mu: Cell) -> tuple[int, ...]:
        return self.row(xi)[mu]

    def _compute(self, xi: Cell, mu: Cell) -> tuple[int, ...]:
        om = self.omega
        out = []
        for n in range(self.N):
            if xi.w[n]:
                a, b = om.lower(mu, n), om.upper(mu, n)
                out.append(a if a == b else 0)
            elif xi.v[n] == mu.v[n]:
                out.append(om.lower(mu, n))
            else:
                out.append(om.upper(mu, n))
        return tuple(out)

    def classes(self, xi: Cell) -> "DirectionClasses":
        dc = self._classes.get(xi)
        if dc is None:
            dc = _direction_classes(self, xi)
            self._classes[xi] = dc
        return dc


def rook_field(omega: WallLabeling, *, check: bool = True) -> RookField:
    if check:
        res = validate(omega)
        if not res:
            raise LabelingError(f"not a wall labeling: no local inducement map at {res.offending_vertex.text()}")
        if not is_strongly_dissipative(omega):
            raise LabelingError("wall labeling is not strongly dissipative")
    return RookField(omega)


@dataclass(frozen=True)
class DirectionClasses:
    cell: Cell
    R: tuple[frozenset[int], ...]
    G: frozenset[int]
    Nn: frozenset[int]
    O: frozenset[int]
    act: frozenset[int]
    omap: Mapping[int, int]
    tag: str
    is_top: bool

    @property
    def equilibrium(self) -> bool:
        return not self.G

    @property
    def opaque(self) -> bool:
        return not self.is_top and self.cell.inessential <= self.O

    @cached_property
    def bijective(self) -> bool:
        img = [self.omap[n] for n in self.act]
        return set(img) == set(self.act) and len(set(img)) == len(img)

    @property
    def semi_opaque(self) -> bool:
        return not self.is_top and self.bijective

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycle decomposition of the regulation map (semi-opaque cells)."""
        if not self.bijective:
            return []
        seen, out = set(), []
        for n in sorted(self.act):
            if n in seen:
                continue
            cyc = [n]
            seen.add(n)
            m = self.omap[n]
            while m != n:
                cyc.append(m)
                seen.add(m)
                m = self.omap[m]
            out.append(tuple(cyc))
        return out


def _n_walls_containing(cx: Complex, xi: Cell, n: int):
    """Interior n-walls xi_n with xi <= xi_n, with their two top cells (lower, upper)."""
    opts = []
    for m in range(cx.N):
        if m == n:
            opts.append((xi.v[n],))
        elif xi.w[m]:
            opts.append((xi.v[m],))
        else:
            opts.append(tuple(u for u in (xi.v[m] - 1, xi.v[m]) if 0 <= u < cx.limits[m]))
    k = xi.v[n]
    if not (1 <= k <= cx.limits[n] - 1):
        return
    for u in itertools.product(*opts):
        wall = Cell(u, _ones_except(cx.N, n))
        hi_top = Cell(u, (1,) * cx.N)
        lo_top = Cell(u[:n] + (k - 1,) + u[n + 1:], (1,) * cx.N)
        yield wall, lo_top, hi_top


def _direction_classes(phi: RookField, xi: Cell) -> DirectionClasses:
    N, cx = phi.N, phi.complex
    row = phi.row(xi)
    R = tuple(frozenset(vec[n] for vec in row.values()) for n in range(N))
    G = frozenset(n for n in range(N) if len(R[n]) == 1 and 0 not in R[n])
    Nn = frozenset(n for n in range(N) if 0 in R[n])
    O = frozenset(n for n in range(N) if R[n] == {1, -1})
    act, omap = set(), {}
    for n in sorted(xi.inessential):
        targets = set()
        for wall, lo, hi in _n_walls_containing(cx, xi, n):
            a, b = phi(wall, lo), phi(wall, hi)
            targets.update(k for k in range(N) if a[k] != b[k])
        if len(targets) > 1:
            raise LabelingError(f"direction {n + 1} regulates several directions at {xi.text()}")
        if targets:
            act.add(n)
            omap[n] = targets.pop()
    is_top = xi.dim == N
    dc = DirectionClasses(xi, R, G, Nn, O, frozenset(act), omap, "", is_top)
    if not G:
        tag = "equilibrium"
    elif dc.opaque:
        tag = "opaque"
    elif act and dc.semi_opaque:
        tag = "semi-opaque"
    else:
        tag = "regular"
    object.__setattr__(dc, "tag", tag)
    return dc


def direction_classes(phi: RookField, xi: Cell) -> DirectionClasses:
    return phi.classes(xi)


def exit_entrance(phi: RookField, a: Cell, b: Cell) -> str:
    """Classify a proper face a of b as an exit face, an entrance face, or neither."""
    if a == b:
        raise ComplexError("exit/entrance needs a proper face pair")
    p = relative_position(a, b)
    ex = sorted(extension(a, b))
    row = phi.row(a)
    tops = phi.complex.top_star(b)
    if all(row[mu][n] == p[n] for mu in tops for n in ex):
        return EXIT
    if all(row[mu][n] == -p[n] for mu in tops for n in ex):
        return ENTRANCE
    return NEITHER


# -- ramp realizability ------------------------------------------------------

def vertex_monotonicity(omega: WallLabeling):
    """Connectivity of the +1/-1 level sets of Phi_n(sigma, .) on every hypercube face.

    Returns ``None`` when every interior vertex passes, otherwise the first
    offending ``(vertex, direction)`` with a 0-based direction.
    """
    cx, N = omega.complex, omega.N
    phi = RookField(omega)
    bdy = boundary_cells(cx)
    cube = list(itertools.product((0, 1), repeat=N))
    for sigma in cx.vertices():
        if sigma in bdy:
            continue
        corner = tuple(x - 1 for x in sigma.v)
        for n in range(N):
            vals = {}
            for q in cube:
                mu = Cell(tuple(c + d for c, d in zip(corner, q)), (1,) * N)
                vals[q] = phi(sigma, mu)[n]
            if not _cube_monotone(vals, N):
                return sigma, n
    return None


def _cube_monotone(vals: dict[tuple[int, ...], int], N: int) -> bool:
    # every face of the cube: fix a subset of coordinates to given values
    for fixed in itertools.product((None, 0, 1), repeat=N):
        pts = [q for q in vals if all(f is None or q[i] == f for i, f in enumerate(fixed))]
        for sign in (1, -1):
            sub = [q for q in pts if vals[q] == sign]
            if len(sub) > 1:
                g = nx.Graph()
                g.add_nodes_from(sub)
                s = set(sub)
                for q in sub:
                    for i in range(N):
                        if q[i] == 0:
                            r = q[:i] + (1,) + q[i + 1:]
                            if r in s:
                                g.add_edge(q, r)
                if not nx.is_connected(g):
                    return False
    return True
