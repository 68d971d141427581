"""Small named wall labelings and gradings used as fixtures and demos."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .blowup import ExtendedGrading, Poset, extend_top_grading
from .cubical import Cell, Complex, make_cell, relative_position
from .walls import WallLabeling, wall_direction, walls_of

__all__ = [
    "FIXTURES",
    "RAMP_FIXTURES",
    "ramp_fixture",
    "bistable_grading",
    "ex7_labeling",
    "nonunique_grading",
    "random_labeling",
    "random_ramp_system",
    "labeling_from_rule",
    "not_wall_labeling",
    "running_labeling",
]


def labeling_from_rule(cx: Complex, rule: Callable[[Cell, Cell, int], int]) -> WallLabeling:
    """Wall labeling with inward boundary walls and ``rule(wall, top, n)`` on interior walls."""
    table = {}
    for xi, mu in walls_of(cx):
        n = wall_direction(xi)
        if len(cx.top_star(xi)) == 1:
            table[(xi, mu)] = -relative_position(xi, mu)[n]
        else:
            table[(xi, mu)] = rule(xi, mu, n)
    return WallLabeling(cx, table)


def running_labeling() -> WallLabeling:
    """Two-dimensional labeling with K = (2, 2): two stable and one saddle-type region."""

    def rule(xi, mu, n):
        i, j = xi.v
        if n == 1:
            return 1 if i in (0, 1) else -1
        return 1 if j in (0, 1) else -1

    return labeling_from_rule(Complex((3, 3)), rule)


def not_wall_labeling() -> WallLabeling:
    """Labeling on K = (1, 1) with no local inducement map at the central vertex."""
    vals = {
        (make_cell((1, 0), (0, 1)), make_cell((0, 0), (1, 1))): 1,
        (make_cell((1, 0), (0, 1)), make_cell((1, 0), (1, 1))): 1,
        (make_cell((1, 1), (0, 1)), make_cell((0, 1), (1, 1))): 1,
        (make_cell((1, 1), (0, 1)), make_cell((1, 1), (1, 1))): -1,
        (make_cell((0, 1), (1, 0)), make_cell((0, 0), (1, 1))): 1,
        (make_cell((0, 1), (1, 0)), make_cell((0, 1), (1, 1))): 1,
        (make_cell((1, 1), (1, 0)), make_cell((1, 0), (1, 1))): 1,
        (make_cell((1, 1), (1, 0)), make_cell((1, 1), (1, 1))): -1,
    }
    return labeling_from_rule(Complex((2, 2)), lambda xi, mu, n: vals[(xi, mu)])


def ex7_labeling() -> WallLabeling:
    """Valid labeling on K = (1, 1) that is not monotone at the central vertex."""
    vals = {
        (make_cell((1, 0), (0, 1)), make_cell((0, 0), (1, 1))): 1,
        (make_cell((1, 0), (0, 1)), make_cell((1, 0), (1, 1))): -1,
        (make_cell((1, 1), (0, 1)), make_cell((0, 1), (1, 1))): -1,
        (make_cell((1, 1), (0, 1)), make_cell((1, 1), (1, 1))): 1,
    }
    return labeling_from_rule(Complex((2, 2)), lambda xi, mu, n: vals.get((xi, mu), 1))


def _graded_squares(rows: list[list[str]], labels: list[str], less: list[tuple[str, str]]) -> ExtendedGrading:
    """Grading of a grid of unit squares; ``rows[j][i]`` grades the square at (i, j)."""
    pos = {name: k for k, name in enumerate(labels)}
    poset = Poset.from_relations(len(labels), [(pos[a], pos[b]) for a, b in less], labels)
    cx = Complex((len(rows[0]), len(rows)))
    top = {Cell((i, j), (1, 1)): pos[name] for j, row in enumerate(rows) for i, name in enumerate(row)}
    return ExtendedGrading(cx, poset, extend_top_grading(cx, top, poset))


def bistable_grading() -> ExtendedGrading:
    """Three squares graded 0, 1, 0' with 0 < 1 and 0' < 1."""
    return _graded_squares([["0", "1", "0'"]], ["0", "0'", "1"], [("0", "1"), ("0'", "1")])


def nonunique_grading() -> ExtendedGrading:
    """Three-by-three squares whose Conley complex admits two connection matrices."""
    labels = ["0", "0'", "0''", "1", "2", "3", "3'", "4", "4'"]
    less = [("0", "1"), ("0'", "1"), ("1", "2"), ("0''", "2"), ("2", "3"), ("2", "3'"),
            ("3", "4"), ("3'", "4'")]
    rows = [["0", "1", "0'"], ["3", "2", "3'"], ["4", "0''", "4'"]]
    return _graded_squares(rows, labels, less)


FIXTURES: dict[str, Callable[[], WallLabeling]] = {
    "running": running_labeling,
    "not-wall-labeling": not_wall_labeling,
    "ex7": ex7_labeling,
}


# -- ramp-system inputs ---------------------------------------------------------

SET1 = {
    "network": "1 -| 1\n2 -| 1\n1 -| 2\n2 -| 2",
    "gamma": ["1", "1"],
    "ell": ["1.4", "0.1", "0.2", "1.4"],
    "u": ["3.7", "10.7", "9.2", "6.2"],
    "theta": ["6.4", "5.6", "11.1", "1.8"],
    "h": ["0.3", "0.35", "0.6", "0.3"],
}

def _ramp(target, source, nu, theta, h):
    return {"target": target, "source": source, "nu": list(nu), "theta": [theta], "h": [h]}


EX2SEC6 = {
    "gamma": ["1", "1"],
    "interactions": [
        {"kind": "I", "partition": [[1, 2]]},
        {"kind": "I", "partition": [[1], [2]]},
    ],
    "ramps": [
        _ramp(1, 1, ("1.21", "14.95"), "15.34", "2"),
        _ramp(1, 2, ("1.47", "3.73"), "55.59", "5"),
        _ramp(2, 1, ("16.30", "6.36"), "2.85", "2"),
        _ramp(2, 2, ("6.36", "19.73"), "60.02", "5"),
    ],
}


PERIODIC = {
    "gamma": ["1", "0.5", "0.5"],
    "interactions": [
        {"kind": "I", "partition": [[1], [2], [3]]},
        {"kind": "I", "partition": [[1], [2]]},
        {"kind": "I", "partition": [[2], [3]]},
    ],
    "ramps": [
        _ramp(1, 1, ("1.80", "8.56"), "27.17", "0.5"),
        _ramp(1, 2, ("13.07", "3.25"), "2.26", "0.5"),
        _ramp(1, 3, ("20.10", "1.07"), "11.73", "0.5"),
        _ramp(2, 1, ("2.44", "0.84"), "39.10", "0.5"),
        _ramp(2, 2, ("0.16", "6.10"), "1.25", "0.5"),
        _ramp(3, 2, ("2.39", "1.36"), "10.47", "0.5"),
        _ramp(3, 3, ("0.05", "5.03"), "6.70", "0.5"),
    ],
}

INTRO2 = {
    "gamma": ["1", "1", "1.2"],
    "interactions": [
        {"kind": "I", "partition": [[1, 2, 3]]},
        {"kind": "I", "partition": [[1], [2, 3]]},
        {"kind": "I", "partition": [[2], [1, 3]]},
    ],
    "ramps": [
        _ramp(1, 1, ("1.01", "4.0"), "6.5", "0.1"),
        _ramp(1, 2, ("1.0", "4.0"), "1.497", "0.1"),
        _ramp(1, 3, ("1.0", "2.0"), "1.87", "0.1"),
        _ramp(2, 1, ("0.875", "0.797"), "8.0", "0.1"),
        _ramp(2, 2, ("0.22", "0.875"), "1.0", "0.1"),
        _ramp(2, 3, ("0.44", "0.875"), "1.16", "0.1"),
        _ramp(3, 1, ("0.76", "1.0"), "3.5", "0.1"),
        _ramp(3, 2, ("1.0", "0.85"), "1.46", "0.1"),
        _ramp(3, 3, ("0.5", "1.0"), "1.61", "0.1"),
    ],
}

RAMP_FIXTURES: dict[str, dict] = {
    "set1": SET1,
    "ex2sec6": EX2SEC6,
    "periodic": PERIODIC,
    "intro2": INTRO2,
}


def ramp_fixture(name: str):
    from .ramp import ramp_system_from_json
    return ramp_system_from_json(RAMP_FIXTURES[name])


# -- random instances ------------------------------------------------------------

def _rand_q(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 997) -> Fraction:
    return lo + (hi - lo) * Fraction(rng.randint(1, den - 1), den)


def random_ramp_system(rng: random.Random, K):
    """Random ramp system with K[m] thresholds on x_m, all gamma = 1 and type I interactions.

    Thresholds are drawn inside the range of the variable's own production
    term so that every threshold can be crossed.  Resamples until the
    (gamma, nu, theta) conditions hold.
    """
    from .ramp import InteractionFunction, RampError, RampFunction, RampSystem, _lambda_s_checks

    N = len(K)
    if any(k < 1 or k > N for k in K):
        raise ValueError(f"need 1 <= K[m] <= N, got {K}")
    while True:
        targets = {m: rng.sample(range(N), K[m]) for m in range(N)}
        sources = [[m for m in range(N) if n in targets[m]] for n in range(N)]
        if any(not s for s in sources):
            continue
        nus = {}
        for n in range(N):
            for m in sources[n]:
                a = Fraction(rng.randint(1, 40), 4)
                b = Fraction(rng.randint(1, 40), 4)
                if a == b:
                    b += Fraction(1, 2)
                nus[(n, m)] = (a, b)
        inter = []
        for n in range(N):
            src = sources[n][:]
            rng.shuffle(src)
            blocks: list[list[int]] = []
            for m in src:
                if blocks and rng.random() < 0.5:
                    blocks[rng.randrange(len(blocks))].append(m)
                else:
                    blocks.append([m])
            inter.append(InteractionFunction("I", tuple(tuple(b) for b in blocks)))
        lo_hi = []
        for n in range(N):
            f = inter[n]
            lo = f({m: min(nus[(n, m)]) for m in sources[n]})
            hi = f({m: max(nus[(n, m)]) for m in sources[n]})
            lo_hi.append((lo, hi))
        ramps = {}
        for n in range(N):
            for m in sources[n]:
                lo, hi = lo_hi[m]
                theta = _rand_q(rng, lo, hi)
                ramps[(n, m)] = RampFunction(nus[(n, m)], (theta,), (Fraction(1, 10**6),))
        try:
            sys = RampSystem([Fraction(1)] * N, inter, ramps)
        except RampError:
            continue
        if all(c.ok for c in _lambda_s_checks(sys)):
            return sys


def random_labeling(rng: random.Random, K, *, method: str = "ramp", flips: int = 8,
                    tries: int = 2000) -> WallLabeling:
    """Random valid, strongly dissipative labeling on the complex with extents K.

    ``method`` selects the sampler:

    * ``"ramp"``: the labeling induced by :func:`random_ramp_system`;
    * ``"flip"``: a ramp labeling followed by up to ``flips`` random
      interior single-wall flips, each kept only if the result is valid;
    * ``"uniform"``: uniform interior labels, rejected until valid
      (practical for two-dimensional complexes only).
    """
    from .walls import LabelingError, validate

    cx = Complex(k + 1 for k in K)
    if method == "uniform":
        for _ in range(tries):
            omega = labeling_from_rule(cx, lambda xi, mu, n: rng.choice((1, -1)))
            if validate(omega):
                return omega
        raise LabelingError(f"no valid labeling found in {tries} random draws for K={tuple(K)}")
    if method not in ("ramp", "flip"):
        raise ValueError(f"unknown sampling method {method!r}")
    from .ramp import wall_labeling_from_ramp
    omega = wall_labeling_from_ramp(random_ramp_system(rng, K))
    if method == "flip":
        interior = [p for p in omega.table if len(cx.top_star(p[0])) == 2]
        for _ in range(flips):
            if not interior:
                break
            cand = omega.flipped(*rng.choice(interior))
            if validate(cand):
                omega = cand
    return omega
