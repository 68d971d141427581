"""Multivalued maps F0-F3, their strongly connected components, and Morse graphs."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .cubical import Cell, Complex, ComplexError, extension, relative_position
from .walls import ENTRANCE, EXIT, RookField, exit_entrance, lower_wall

__all__ = [
    "DriftRecord",
    "Grading",
    "ModelError",
    "MorseGraph",
    "MorseNode",
    "StateTransitionGraph",
    "build_model",
    "detect_drift",
    "f0",
    "f1",
    "f2",
    "f3",
    "grading",
    "lap_number",
    "opaque_cycles",
    "morse_graph",
]

MODELS = ("F0", "F1", "F2", "F3")


class ModelError(ValueError):
    """Raised when a model is requested outside its domain of definition."""


class StateTransitionGraph:
    """Directed graph on the cells of X, indexed by the complex's cell order."""

    def __init__(self, model: str, cx: Complex, succ: Sequence[Iterable[int]]):
        self.model = model
        self.complex = cx
        self.cells = cx.all_cells
        self.index = cx.index
        self.succ: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in succ)

    def __len__(self):
        return len(self.cells)

    def out(self, cell: Cell) -> list[Cell]:
        return [self.cells[j] for j in sorted(self.succ[self.index[cell]])]

    def has_edge(self, a: Cell, b: Cell) -> bool:
        return self.index[b] in self.succ[self.index[a]]

    def edges(self) -> Iterable[tuple[Cell, Cell]]:
        for i, s in enumerate(self.succ):
            for j in sorted(s):
                yield self.cells[i], self.cells[j]

    def edge_count(self) -> int:
        return sum(len(s) for s in self.succ)

    def self_loops(self) -> list[Cell]:
        return [c for i, c in enumerate(self.cells) if i in self.succ[i]]

    def double_edges(self) -> list[tuple[Cell, Cell]]:
        out = []
        for i, s in enumerate(self.succ):
            for j in s:
                if i < j and i in self.succ[j]:
                    out.append((self.cells[i], self.cells[j]))
        return out

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "edges": [[a.text(), b.text()] for a, b in self.edges()],
        }


def _codim1_pairs(cx: Complex):
    idx = cx.index
    for b in cx.all_cells:
        for a, _ in cx.boundary(b):
            yield idx[a], idx[b], a, b


def f0(cx: Complex) -> StateTransitionGraph:
    """Trivial map: self-loops plus both directions on every codimension-one face pair."""
    succ = [{i} for i in range(len(cx.all_cells))]
    for i, j, _, _ in _codim1_pairs(cx):
        succ[i].add(j)
        succ[j].add(i)
    return StateTransitionGraph("F0", cx, succ)


def _f1_sets(phi: RookField) -> list[set[int]]:
    cx = phi.complex
    succ = [set() for _ in cx.all_cells]
    for i, c in enumerate(cx.all_cells):
        if not phi.classes(c).G:
            succ[i].add(i)
    for i, j, a, b in _codim1_pairs(cx):
        kind = exit_entrance(phi, a, b)
        if kind != EXIT:
            succ[i].add(j)
        if kind != ENTRANCE:
            succ[j].add(i)
    return succ


def f1(phi: RookField) -> StateTransitionGraph:
    return StateTransitionGraph("F1", phi.complex, _f1_sets(phi))


# -- indecisive drift -------------------------------------------------------

@dataclass(frozen=True)
class DriftRecord:
    """A pair (xi, xi') exhibiting indecisive drift, with everything F2 needs."""

    xi: Cell
    xi_prime: Cell
    go_pair: tuple[int, int]
    back_walls: tuple[tuple[Cell, Cell], ...]
    back_value: int
    back_kind: str
    drift: dict = field(compare=False)
    direction: int = 0
    d_plus: Cell | None = None
    d_minus: Cell | None = None


def _go_pairs(phi: RookField, xi: Cell, xp: Cell) -> list[tuple[int, int]]:
    ex = extension(xi, xp)
    if len(ex) != 1:
        return []
    (n_o,) = ex
    row = phi.row(xi)
    tops = set(phi.complex.top_star(xp))
    out = []
    for n_g in sorted(phi.classes(xp).G):
        for mu in tops:
            nb = Cell(mu.v[:n_g] + (mu.v[n_g] + 1,) + mu.v[n_g + 1:], mu.w)
            if nb in tops and row[mu][n_o] != row[nb][n_o]:
                out.append((n_g, n_o))
                break
    return out


def _back_walls(phi: RookField, xi: Cell, xp: Cell, n_o: int) -> list[tuple[Cell, Cell]]:
    # r_n ranges over R_n(xi'), see the decisions ledger for this reading
    cx = phi.complex
    R = phi.classes(xp).R
    dirs = sorted(xp.inessential)
    N = cx.N
    out = []
    for rs in itertools.product(*[sorted(R[n]) for n in dirs]):
        vhat = [0] * N
        for n, r in zip(dirs, rs):
            vhat[n] = (1 + r) // 2
        wall = Cell(tuple(a - b for a, b in zip(xi.v, vhat)), tuple(0 if k == n_o else 1 for k in range(N)))
        top = Cell(tuple(a - b for a, b in zip(xp.v, vhat)), (1,) * N)
        if wall in cx and top in cx:
            out.append((wall, top))
    return sorted(set(out))


def detect_drift(phi: RookField) -> list[DriftRecord]:
    """All face pairs with indecisive drift, in cell order."""
    cx = phi.complex
    out = []
    for _, _, xi, xp in _codim1_pairs(cx):
        gos = _go_pairs(phi, xi, xp)
        if not gos:
            continue
        n_g, n_o = gos[0]
        dc = phi.classes(xi)
        O_i = dc.O & xi.inessential
        ok = True
        for n in O_i - {n_o}:
            pre = {m for m in dc.act if dc.omap[m] == n}
            if pre != {n}:
                ok = False
                break
        if not ok:
            continue
        backs = _back_walls(phi, xi, xp, n_o)
        if not backs:
            # Back walls off the complex: the pair sits on the outer boundary
            # and keeps both of its F1 edges.
            continue
        vals = {phi(w, t)[n_o] for w, t in backs}
        if len(vals) != 1:
            raise ModelError(f"back walls of {xi.text()} -> {xp.text()} disagree in direction {n_o + 1}")
        bval = vals.pop()
        w0, t0 = backs[0]
        bkind = EXIT if bval == relative_position(w0, t0)[n_o] else ENTRANCE
        row = phi.row(xi)
        D = {}
        for mu in cx.top_star(xp):
            val = row[mu][n_o]
            D[mu] = val if val != bval else 0
        dirs = {d for d in D.values() if d}
        if len(dirs) != 1:
            raise ModelError(f"drift map of {xi.text()} -> {xp.text()} has support {sorted(dirs)}")
        direction = dirs.pop()
        if relative_position(xi, xp)[n_o] * direction == 1:
            dp, dm = xp, xi
        else:
            dp, dm = xi, xp
        out.append(DriftRecord(xi, xp, (n_g, n_o), tuple(backs), bval, bkind, D, direction, dp, dm))
    return out


def _f2_sets(phi: RookField, drift: Sequence[DriftRecord] | None = None) -> list[set[int]]:
    succ = _f1_sets(phi)
    idx = phi.complex.index
    for rec in drift if drift is not None else detect_drift(phi):
        i, j = idx[rec.xi], idx[rec.xi_prime]
        if rec.back_kind == EXIT:
            succ[i].discard(j)
        else:
            succ[j].discard(i)
    return succ


def f2(phi: RookField, drift: Sequence[DriftRecord] | None = None) -> StateTransitionGraph:
    return StateTransitionGraph("F2", phi.complex, _f2_sets(phi, drift))


# -- lap numbers and F3 ------------------------------------------------------

def _kappa(cx: Complex, xi: Cell) -> Cell:
    # shift back along directions where v sits on the upper vertex limit
    v = tuple(x - 1 if x == L else x for x, L in zip(xi.v, cx.limits))
    return Cell(v, (1,) * cx.N)


def lap_number(phi: RookField, xi: Cell, sigma: Sequence[int], mu: Cell) -> int:
    """Lap number L_{xi,sigma}(mu) for a cycle sigma of the regulation map at xi.

    ``sigma`` lists a cycle ``(n1 n2 ... nk)`` with 0-based directions.
    """
    dc = phi.classes(xi)
    if not dc.semi_opaque:
        raise ModelError(f"{xi.text()} is not semi-opaque")
    sigma = tuple(sigma)
    k = len(sigma)
    if k == 0 or any(s not in dc.act for s in sigma) or len(set(sigma)) != k:
        raise ModelError(f"{sigma} is not a cycle of the regulation map at {xi.text()}")
    step = {sigma[i]: sigma[(i + 1) % k] for i in range(k)}
    if any(dc.omap[n] != step[n] for n in sigma):
        raise ModelError(f"{sigma} is not a cycle of the regulation map at {xi.text()}")
    cx = phi.complex
    kappa = _kappa(cx, xi)
    p = relative_position(xi, mu)
    count = 0
    for n in sigma:
        m = step[n]
        lab = phi.omega(lower_wall(kappa, m), kappa)
        if lab * p[n] * p[m] < 0:
            count += 1
    return count


def opaque_cycles(phi: RookField, xi: Cell) -> list[tuple[int, ...]]:
    """Cycles of length >= 2 of the regulation map whose support lies in O(xi).

    Conditions 3.1 and 3.2 act only on these.  A cycle through a gradient
    direction would otherwise delete every exit of xi and leave F3(xi) empty.
    """
    dc = phi.classes(xi)
    if not dc.semi_opaque:
        return []
    return [s for s in dc.cycles() if len(s) >= 2 and set(s) <= dc.O]


def unstable_cells(phi: RookField, xi: Cell) -> set[Cell]:
    out: set[Cell] = set()
    cx = phi.complex
    for sigma in opaque_cycles(phi, xi):
        S = set(sigma)
        for xp in cx.cofaces(xi):
            if xp.dim - xi.dim < 2 or not extension(xi, xp) <= S:
                continue
            if all(2 * lap_number(phi, xi, sigma, mu) < len(sigma) for mu in cx.top_star(xp)):
                out.add(xp)
    return out


def f3(phi: RookField, drift: Sequence[DriftRecord] | None = None) -> StateTransitionGraph:
    cx = phi.complex
    if cx.N > 3:
        raise ModelError("F3 undefined above dimension 3")
    succ = _f2_sets(phi, drift)
    idx = cx.index
    for i, xi in enumerate(cx.all_cells):
        for sigma in opaque_cycles(phi, xi):
            S = set(sigma)
            for xp, _ in cx.coboundary(xi):
                if extension(xi, xp) <= S:
                    succ[i].discard(idx[xp])
        for xp in unstable_cells(phi, xi):
            succ[i].add(idx[xp])
    return StateTransitionGraph("F3", cx, succ)


def build_model(model: str, phi: RookField | None, cx: Complex | None = None,
                drift: Sequence[DriftRecord] | None = None) -> StateTransitionGraph:
    model = model.upper()
    if model == "F0":
        return f0(cx if cx is not None else phi.complex)
    if phi is None:
        raise ModelError(f"{model} needs a rook field")
    if model == "F1":
        return f1(phi)
    if model == "F2":
        return f2(phi, drift)
    if model == "F3":
        return f3(phi, drift)
    raise ModelError(f"unknown model {model!r}")


# -- gradings ----------------------------------------------------------------

class Grading:
    """Quotient of X onto the strongly connected components of a map.

    Component ids follow a linear extension of the reachability order with
    minimal components (those reaching nothing else) first and ties broken
    by the smallest member cell.  ``below[p]`` is a bitmask of all q <= p.
    """

    def __init__(self, stg: StateTransitionGraph):
        self.stg = stg
        n = len(stg)
        g = nx.DiGraph()
        g.add_nodes_from(range(n))
        g.add_edges_from((i, j) for i, s in enumerate(stg.succ) for j in s)
        comps = [sorted(c) for c in nx.strongly_connected_components(g)]
        raw_of = [0] * n
        for r, c in enumerate(comps):
            for i in c:
                raw_of[i] = r
        R = len(comps)
        out_raw = [set() for _ in range(R)]
        in_raw = [set() for _ in range(R)]
        for i, s in enumerate(stg.succ):
            for j in s:
                a, b = raw_of[i], raw_of[j]
                if a != b:
                    out_raw[a].add(b)
                    in_raw[b].add(a)
        pending = [len(out_raw[r]) for r in range(R)]
        heap = [(comps[r][0], r) for r in range(R) if pending[r] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            _, r = heapq.heappop(heap)
            order.append(r)
            for a in in_raw[r]:
                pending[a] -= 1
                if pending[a] == 0:
                    heapq.heappush(heap, (comps[a][0], a))
        new_id = {r: k for k, r in enumerate(order)}
        self.members: list[list[int]] = [comps[r] for r in order]
        self.comp: list[int] = [new_id[raw_of[i]] for i in range(n)]
        self.succ: list[frozenset[int]] = [frozenset(new_id[b] for b in out_raw[r]) for r in order]
        self.recurrent: list[bool] = []
        for p, mem in enumerate(self.members):
            ms = set(mem)
            self.recurrent.append(any(stg.succ[i] & ms for i in mem))
        below = []
        for p in range(R):
            m = 1 << p
            for q in self.succ[p]:
                m |= below[q]
            below.append(m)
        self.below: list[int] = below

    def __len__(self):
        return len(self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def of(self, cell: Cell) -> int:
        return self.comp[self.stg.index[cell]]

    def fiber(self, p: int) -> list[Cell]:
        return [self.stg.cells[i] for i in self.members[p]]

    def leq(self, q: int, p: int) -> bool:
        """q <= p: q is reachable from p."""
        return bool(self.below[p] >> q & 1)

    def lt(self, q: int, p: int) -> bool:
        return q != p and self.leq(q, p)

    def condensation_self_edge(self, p: int) -> bool:
        """p in Fbar(p): the weak condensation graph keeps a self-edge at p."""
        mem = self.members[p]
        if len(mem) > 1:
            return True
        i = mem[0]
        return i in self.stg.succ[i]


def grading(stg: StateTransitionGraph) -> Grading:
    return Grading(stg)


# -- Morse graphs --------------------------------------------------------------

@dataclass
class MorseNode:
    id: int
    scc: int
    cells: list[Cell]
    recurrent: bool
    grc: bool
    spurious: bool
    conley_index: list[int] | None = None


@dataclass
class MorseGraph:
    grading: Grading
    nodes: list[MorseNode]
    edges: list[tuple[int, int]]
    all_nodes: list[MorseNode]

    def node_of_scc(self, p: int) -> MorseNode | None:
        for nd in self.nodes:
            if nd.scc == p:
                return nd
        return None

    def to_json(self, *, include_all: bool = False) -> dict:
        def enc(nd):
            d = {"id": nd.id, "cells": [c.text() for c in nd.cells]}
            if nd.conley_index is not None:
                d["conley_index"] = list(nd.conley_index)
            return d
        doc = {"nodes": [enc(nd) for nd in self.nodes], "edges": [list(e) for e in self.edges]}
        if include_all:
            doc["sccs"] = [
                {"scc": nd.scc, "cells": [c.text() for c in nd.cells], "recurrent": nd.recurrent,
                 "grc": nd.grc, "below": [q for q in range(self.grading.size) if self.grading.lt(q, nd.scc)]}
                for nd in self.all_nodes
            ]
        return doc


class GradientConsistencyError(AssertionError):
    pass


def morse_graph(gr: Grading, phi: RookField | None) -> MorseGraph:
    """Recurrent components without a common gradient direction, with Hasse edges."""
    all_nodes = []
    for p in range(gr.size):
        cells = gr.fiber(p)
        common = None
        if phi is not None:
            common = set(range(gr.stg.complex.N))
            for c in cells:
                common &= phi.classes(c).G
                if not common:
                    break
        has_common = bool(common)
        grc = gr.recurrent[p] and has_common
        spurious = gr.condensation_self_edge(p) and has_common
        if grc != spurious:
            raise GradientConsistencyError(f"GRC and spurious flags disagree at component {p}")
        all_nodes.append(MorseNode(-1, p, cells, gr.recurrent[p], grc, spurious))
    kept = [nd for nd in all_nodes if nd.recurrent and not nd.grc]
    for k, nd in enumerate(kept):
        nd.id = k
    edges = []
    for a in kept:
        for b in kept:
            if not gr.lt(b.scc, a.scc):
                continue
            if any(gr.lt(b.scc, c.scc) and gr.lt(c.scc, a.scc) for c in kept):
                continue
            edges.append((a.id, b.id))
    edges.sort()
    return MorseGraph(gr, kept, edges, all_nodes)
