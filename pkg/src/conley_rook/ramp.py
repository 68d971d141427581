"""Ramp systems: parameters, admissibility, h-bounds, induced wall labelings, and cell geometry.

All sign decisions use exact rational arithmetic (:class:`fractions.Fraction`);
decimal inputs are parsed exactly.  Floating point appears only in reports and
in the cube-root step of the uniform-h bound, which is then rounded down.

Notation: ``r[n, m]`` is the ramp in the equation of ``x_n`` that reads the
variable ``x_m``; its thresholds are thresholds of ``x_m`` with target ``n``.
Node and direction indices are 0-based in the API and 1-based in text.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cubical import Cell, Complex, extension, relative_position
from .walls import WallLabeling, rook_field, wall_direction, walls_of

__all__ = [
    "Check",
    "CellGeometry",
    "HReport",
    "InteractionFunction",
    "RampError",
    "RampFunction",
    "RampSystem",
    "cell_geometry",
    "check_admissible",
    "eval_ramp",
    "global_bounds",
    "h_membership",
    "load_ramp_system",
    "network_to_ramp",
    "parse_network",
    "ramp_system_from_json",
    "suggest_uniform_h",
    "wall_labeling_from_ramp",
]


class RampError(ValueError):
    """Malformed or inadmissible ramp-system input."""


def exact(x) -> Fraction:
    """Exact rational from an int, Fraction, or decimal string/float text."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise RampError(f"{x!r} is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise RampError(f"{x!r} is not a number") from None
    raise RampError(f"{x!r} is not a number")


def _fmt(x: Fraction) -> str:
    return f"{float(x):.6g}"


def _sgn(x: Fraction) -> int:
    return (x > 0) - (x < 0)


# -- ramp functions ------------------------------------------------------------

@dataclass(frozen=True)
class RampFunction:
    """Piecewise-linear step function: levels nu, thresholds theta, half-widths h."""

    nu: tuple[Fraction, ...]
    theta: tuple[Fraction, ...]
    h: tuple[Fraction, ...]

    def __post_init__(self):
        nu = tuple(exact(x) for x in self.nu)
        theta = tuple(exact(x) for x in self.theta)
        h = tuple(exact(x) for x in self.h)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "h", h)
        J = len(theta)
        if J < 1 or len(nu) != J + 1 or len(h) != J:
            raise RampError(f"ramp needs J >= 1 thresholds, J half-widths and J+1 levels; got {len(nu)}/{J}/{len(h)}")
        if any(x <= 0 for x in nu) or any(x <= 0 for x in theta) or any(x <= 0 for x in h):
            raise RampError("ramp levels, thresholds and half-widths must be positive")
        for j in range(J):
            if nu[j] == nu[j + 1]:
                raise RampError(f"adjacent levels nu_{j} and nu_{j + 1} are equal")
        for j in range(J - 1):
            if not theta[j] < theta[j + 1]:
                raise RampError(f"thresholds are not increasing at position {j + 1}")
            if not theta[j] + h[j] < theta[j + 1] - h[j + 1]:
                raise RampError(f"ramp segments overlap at thresholds {j + 1} and {j + 2}")
        if not theta[0] - h[0] > 0:
            raise RampError("first ramp segment reaches x <= 0")

    @property
    def J(self) -> int:
        return len(self.theta)

    def __call__(self, x) -> Fraction:
        return eval_ramp(self, x)


def eval_ramp(r: RampFunction, x) -> Fraction:
    """Plateau value nu_j between segments, linear interpolation on [theta_j - h_j, theta_j + h_j]."""
    x = exact(x)
    for j in range(r.J):
        lo, hi = r.theta[j] - r.h[j], r.theta[j] + r.h[j]
        if x < lo:
            return r.nu[j]
        if x <= hi:
            return r.nu[j] + (r.nu[j + 1] - r.nu[j]) * (x - lo) / (2 * r.h[j])
    return r.nu[-1]


@dataclass(frozen=True)
class InteractionFunction:
    """Type I: product over blocks of sums; type II: sum over blocks of products."""

    kind: str
    partition: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in ("I", "II"):
            raise RampError(f"interaction kind must be 'I' or 'II', got {self.kind!r}")
        part = tuple(tuple(int(m) for m in block) for block in self.partition)
        if not part or any(not b for b in part):
            raise RampError("interaction partition has an empty block")
        flat = [m for b in part for m in b]
        if len(flat) != len(set(flat)):
            raise RampError("interaction blocks overlap")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "partition", part)

    @property
    def sources(self) -> frozenset[int]:
        return frozenset(m for b in self.partition for m in b)

    def __call__(self, values: Mapping[int, Fraction]) -> Fraction:
        if self.kind == "I":
            out = Fraction(1)
            for b in self.partition:
                out *= sum((values[m] for m in b), Fraction(0))
            return out
        out = Fraction(0)
        for b in self.partition:
            prod = Fraction(1)
            for m in b:
                prod *= values[m]
            out += prod
        return out


@dataclass(frozen=True)
class Threshold:
    """One threshold of x_m: value, half-width, the ramp r[target, m] and its position j."""

    value: Fraction
    h: Fraction
    target: int
    j: int


class RampSystem:
    """x_n' = -gamma_n x_n + E_n(x) with E_n = f_n(r[n, m](x_m) for m in source(n))."""

    def __init__(self, gamma: Sequence, interactions: Sequence[InteractionFunction],
                 ramps: Mapping[tuple[int, int], RampFunction], names: Sequence[str] | None = None):
        self.gamma = tuple(exact(g) for g in gamma)
        self.N = len(self.gamma)
        if self.N < 1:
            raise RampError("ramp system needs at least one variable")
        if any(g <= 0 for g in self.gamma):
            raise RampError("decay rates gamma must be positive")
        if len(interactions) != self.N:
            raise RampError(f"expected {self.N} interaction functions, got {len(interactions)}")
        self.interactions = tuple(interactions)
        self.ramps = dict(ramps)
        self.names = list(names) if names is not None else [str(n + 1) for n in range(self.N)]
        for (n, m) in self.ramps:
            if not (0 <= n < self.N and 0 <= m < self.N):
                raise RampError(f"ramp r[{n + 1},{m + 1}] refers to an unknown variable")
        for n, f in enumerate(self.interactions):
            have = {m for (t, m) in self.ramps if t == n}
            if set(f.sources) != have:
                raise RampError(f"interaction of node {self.names[n]} uses sources "
                                f"{sorted(x + 1 for x in f.sources)} but ramps exist for {sorted(x + 1 for x in have)}")
        self.thresholds: list[list[Threshold]] = []
        for m in range(self.N):
            th = [Threshold(r.theta[j], r.h[j], n, j)
                  for (n, mm), r in sorted(self.ramps.items()) if mm == m for j in range(r.J)]
            th.sort(key=lambda t: (t.value, t.target, t.j))
            if not th:
                raise RampError(f"variable {self.names[m]} has no output thresholds")
            self.thresholds.append(th)
        # level[n][m][k]: level index of r[n, m] on the k-th region of x_m
        self._level: dict[tuple[int, int], list[int]] = {}
        for (n, m), r in self.ramps.items():
            cnt, acc = [0], 0
            for t in self.thresholds[m]:
                acc += t.target == n
                cnt.append(acc)
            self._level[(n, m)] = cnt

    # -- structure ---------------------------------------------------------

    @property
    def K(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.thresholds)

    def complex(self) -> Complex:
        return Complex(k + 1 for k in self.K)

    def sources(self, n: int) -> list[int]:
        return sorted(self.interactions[n].sources)

    def targets(self, m: int) -> list[int]:
        return sorted({n for (n, mm) in self.ramps if mm == m})

    def E_region(self, n: int, v: Sequence[int]) -> Fraction:
        """E_n on the plateau rectangle D_v, v in prod {0..K(m)}."""
        vals = {m: self.ramps[(n, m)].nu[self._level[(n, m)][v[m]]] for m in self.sources(n)}
        return self.interactions[n](vals)

    def E_top(self, n: int, mu: Cell) -> Fraction:
        return self.E_region(n, mu.v)

    def E_max(self, n: int) -> Fraction:
        return self.interactions[n]({m: max(self.ramps[(n, m)].nu) for m in self.sources(n)})

    def regions(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*[range(k + 1) for k in self.K])

    def with_h(self, h) -> "RampSystem":
        """Copy with h replaced: a single value for every threshold, or a mapping (n, m) -> list."""
        ramps = {}
        for key, r in self.ramps.items():
            if isinstance(h, Mapping):
                hh = tuple(exact(x) for x in h[key])
            else:
                hh = (exact(h),) * r.J
            ramps[key] = RampFunction(r.nu, r.theta, hh)
        return RampSystem(self.gamma, self.interactions, ramps, self.names)

    def to_json(self) -> dict:
        return {
            "gamma": [str(g) for g in self.gamma],
            "interactions": [{"kind": f.kind, "partition": [[m + 1 for m in b] for b in f.partition]}
                             for f in self.interactions],
            "ramps": [{"target": n + 1, "source": m + 1, "nu": [str(x) for x in r.nu],
                       "theta": [str(x) for x in r.theta], "h": [str(x) for x in r.h]}
                      for (n, m), r in sorted(self.ramps.items())],
        }


def global_bounds(sys: RampSystem) -> list[Fraction]:
    """GB_n = max(max E_n / gamma_n, largest threshold of x_n plus its h) + 1."""
    out = []
    for n in range(sys.N):
        top = sys.thresholds[n][-1]
        out.append(max(sys.E_max(n) / sys.gamma[n], top.value + top.h) + 1)
    return out


# -- admissibility -------------------------------------------------------------

@dataclass
class Check:
    """One inequality: passes when ``ok``; lhs/rhs kept exactly for margins."""

    level: str
    name: str
    where: str
    lhs: Fraction | None
    rhs: Fraction | None
    ok: bool
    note: str = ""

    def text(self) -> str:
        if self.lhs is None:
            rel = self.note
        else:
            rel = f"{_fmt(self.lhs)} {'<' if self.ok else '>='} {_fmt(self.rhs)}"
            if self.note:
                rel += f" ({self.note})"
        return f"{self.level} {self.name} {self.where}: {'pass' if self.ok else 'FAIL'} {rel}"

    def to_json(self) -> dict:
        d = {"level": self.level, "name": self.name, "where": self.where, "ok": self.ok}
        if self.lhs is not None:
            d["lhs"] = float(self.lhs)
            d["rhs"] = float(self.rhs)
        if self.note:
            d["note"] = self.note
        return d


def _threshold_name(sys: RampSystem, m: int, k: int) -> str:
    t = sys.thresholds[m][k - 1]
    return f"theta[{sys.names[t.target]},{sys.names[m]},{t.j + 1}] (k={k} of x{sys.names[m]})"


def _lambda_s_checks(sys: RampSystem) -> list[Check]:
    """Conditions on (gamma, nu, theta) alone: distinct thresholds and gamma*theta != E(D_v)."""
    out = []
    for m in range(sys.N):
        th = sys.thresholds[m]
        for k in range(len(th) - 1):
            ok = th[k].value != th[k + 1].value
            out.append(Check("S", "distinct", f"{_threshold_name(sys, m, k + 1)} vs k={k + 2}",
                             None, None, ok, "distinct" if ok else "equal thresholds"))
    for n in range(sys.N):
        ths = sys.thresholds[n]
        for v in sys.regions():
            E = sys.E_region(n, v)
            k = v[n]
            for kk in (k, k + 1):
                if 1 <= kk <= len(ths):
                    val = sys.gamma[n] * ths[kk - 1].value
                    ok = val != E
                    if not ok:
                        out.append(Check("S", "gamma-theta-vs-E",
                                         f"n={sys.names[n]} v={tuple(v)} {_threshold_name(sys, n, kk)}",
                                         None, None, False, f"gamma*theta = E = {_fmt(E)}"))
    return out


def _h0_checks(sys: RampSystem) -> list[Check]:
    out = []
    for m in range(sys.N):
        th = sys.thresholds[m]
        out.append(Check("H0", "positive", _threshold_name(sys, m, 1), Fraction(0), th[0].value - th[0].h,
                         0 < th[0].value - th[0].h, "0 < theta-h"))
        for k in range(len(th) - 1):
            a, b = th[k].value + th[k].h, th[k + 1].value - th[k + 1].h
            out.append(Check("H0", "interleave", f"x{sys.names[m]} k={k + 1},{k + 2}", a, b, a < b))
    return out


@dataclass
class AdmissibilityResult:
    ok: bool
    checks: list[Check]

    @property
    def violations(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    @property
    def first(self) -> Check | None:
        v = self.violations
        return v[0] if v else None

    def __bool__(self):
        return self.ok


def check_admissible(sys: RampSystem) -> AdmissibilityResult:
    """Membership in the admissible parameter set: Lambda(S) conditions plus the h inequalities."""
    checks = _lambda_s_checks(sys) + _h0_checks(sys)
    return AdmissibilityResult(all(c.ok for c in checks), checks)


# -- induced wall labeling -------------------------------------------------------

def wall_labeling_from_ramp(sys: RampSystem) -> WallLabeling:
    """omega(xi, mu) = sgn(-gamma_n theta_k + E_n(mu)) with theta_0 = 0 and theta_{K+1} = GB_n.

    The labels depend on (gamma, nu, theta) only, so only the conditions on
    those are enforced here; the half-widths h are checked separately by
    :func:`check_admissible` and :func:`h_membership`.
    """
    bad = [c for c in _lambda_s_checks(sys) if not c.ok]
    if bad:
        raise RampError(f"inadmissible parameters: {bad[0].text()}")
    cx = sys.complex()
    GB = global_bounds(sys)
    table = {}
    for xi, mu in walls_of(cx):
        n = wall_direction(xi)
        k = xi.v[n]
        if k == 0:
            th = Fraction(0)
        elif k == sys.K[n] + 1:
            th = GB[n]
        else:
            th = sys.thresholds[n][k - 1].value
        s = _sgn(-sys.gamma[n] * th + sys.E_top(n, mu))
        if s == 0:  # pragma: no cover - excluded by admissibility
            raise RampError(f"zero label at {xi.text()} {mu.text()}")
        table[(xi, mu)] = s
    return WallLabeling(cx, table)


# -- cell geometry ---------------------------------------------------------------

@dataclass(frozen=True)
class CellGeometry:
    cell: Cell
    n: int
    interval: tuple[Fraction, Fraction]
    length: Fraction
    mid: Fraction
    lower: Fraction
    upper: Fraction

    def to_json(self) -> dict:
        return {"cell": self.cell.text(), "direction": self.n + 1,
                "interval": [float(x) for x in self.interval], "length": float(self.length),
                "mid": float(self.mid), "L": float(self.lower), "U": float(self.upper)}


def _geo_threshold(sys: RampSystem, n: int, k: int, GB: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """(theta_k, h_k) for x_n with the rectangular-geometrization boundary conventions."""
    th = sys.thresholds[n]
    if k == 0:
        t = (th[0].value - th[0].h) / 4
        return t, t
    if k == len(th) + 1:
        return GB[n] - Fraction(1, 4), Fraction(1, 4)
    return th[k - 1].value, th[k - 1].h


def cell_geometry(sys: RampSystem, xi: Cell, n: int, GB: Sequence[Fraction] | None = None) -> CellGeometry:
    """Interval I_n, its length and midpoint, and the bounds L_n <= U_n of |-gamma x + E| on it."""
    GB = global_bounds(sys) if GB is None else GB
    cx = sys.complex()
    cx.check(xi)
    k = xi.v[n]
    t0, h0 = _geo_threshold(sys, n, k, GB)
    if xi.w[n] == 0:
        lo, hi = t0 - h0, t0 + h0
        mid = t0
    else:
        t1, h1 = _geo_threshold(sys, n, k + 1, GB)
        lo, hi = t0 + h0, t1 - h1
        mid = (lo + hi) / 2
    g = sys.gamma[n]
    L, U = None, None
    for mu in cx.top_star(xi):
        E = sys.E_top(n, mu)
        a, b = -g * lo + E, -g * hi + E
        inf = Fraction(0) if _sgn(a) * _sgn(b) <= 0 else min(abs(a), abs(b))
        sup = max(abs(a), abs(b))
        L = inf if L is None else min(L, inf)
        U = sup if U is None else max(U, sup)
    return CellGeometry(xi, n, (lo, hi), hi - lo, mid, L, U)


# -- h-membership ----------------------------------------------------------------

def _h1_checks(sys: RampSystem) -> list[Check]:
    """E_n(D_v)/gamma_n avoids (theta_k, theta_k + h_k) and (theta_{k+1} - h_{k+1}, theta_{k+1})."""
    out = []
    for n in range(sys.N):
        ths = sys.thresholds[n]
        for v in sys.regions():
            x = sys.E_region(n, v) / sys.gamma[n]
            k = v[n]
            if k >= 1:
                t = ths[k - 1]
                ok = not (t.value < x < t.value + t.h)
                out.append(Check("H1", "right", f"n={sys.names[n]} v={tuple(v)}", None, None, ok,
                                 f"E/gamma={_fmt(x)} vs ({_fmt(t.value)}, {_fmt(t.value + t.h)})"))
            if k + 1 <= len(ths):
                t = ths[k]
                ok = not (t.value - t.h < x < t.value)
                out.append(Check("H1", "left", f"n={sys.names[n]} v={tuple(v)}", None, None, ok,
                                 f"E/gamma={_fmt(x)} vs ({_fmt(t.value - t.h)}, {_fmt(t.value)})"))
    return out


def _three_cycle_vertices(phi) -> list[Cell]:
    out = []
    cx = phi.complex
    for sigma in cx.vertices():
        if cx.is_boundary_cell(sigma):
            continue
        dc = phi.classes(sigma)
        if dc.act == frozenset(range(3)) and any(len(c) == 3 for c in dc.cycles()):
            out.append(sigma)
    return out


def _h3_ratio(sys: RampSystem, sigma: Cell) -> Fraction:
    g1, g2, g3 = sys.gamma
    denom = -g1 * g2 * g3 + (g1 + g2 + g3) * (g1 * g2 + g1 * g3 + g2 * g3)
    num = Fraction(1)
    kp, km = sigma.v, tuple(x - 1 for x in sigma.v)
    for n in range(3):
        num *= abs(sys.E_region(n, kp) - sys.E_region(n, km))
    return num / denom


def _h3_checks(sys: RampSystem, phi) -> list[Check]:
    out = []
    for sigma in _three_cycle_vertices(phi):
        lhs = Fraction(8)
        for n in range(3):
            lhs *= sys.thresholds[n][sigma.v[n] - 1].h
        rhs = _h3_ratio(sys, sigma)
        out.append(Check("H3", "three-cycle", f"vertex {sigma.text()}", lhs, rhs, lhs < rhs))
    return out


def _is_cyclic(phi, alpha: Cell, n: int) -> bool:
    dc = phi.classes(alpha)
    if n not in dc.act:
        return False
    m = n
    for _ in range(len(dc.act)):
        m = dc.omap.get(m)
        if m is None:
            return False
        if m == n:
            return True
    return False


def _proper_faces(cx: Complex, xi: Cell) -> list[Cell]:
    return [a for a in cx.faces(xi) if a != xi]


def _inverse_single(sys: RampSystem, target: int, var: int, k: int, tops: Sequence[Cell], value: Fraction):
    """Solve E_target(x_var) = value on the segment of the k-th threshold of x_var.

    Other inputs of E_target are held at their plateau levels, which must agree
    over ``tops``.  Returns None when the equation is not solvable there.
    """
    if (target, var) not in sys.ramps:
        return None
    t = sys.thresholds[var][k - 1]
    if t.target != target:
        return None
    f = sys.interactions[target]
    base = None
    for mu in tops:
        vals = {m: sys.ramps[(target, m)].nu[sys._level[(target, m)][mu.v[m]]]
                for m in sys.sources(target) if m != var}
        if base is None:
            base = vals
        elif vals != base:
            return None
    r = sys.ramps[(target, var)]
    a = f({**base, var: Fraction(0)})
    b = f({**base, var: Fraction(1)}) - a
    if b == 0:
        return None
    rv = (value - a) / b
    lo_nu, hi_nu = r.nu[t.j], r.nu[t.j + 1]
    if not (min(lo_nu, hi_nu) <= rv <= max(lo_nu, hi_nu)):
        return None
    lo = t.value - t.h
    return lo + (rv - lo_nu) * 2 * t.h / (hi_nu - lo_nu)


def _h2_checks(sys: RampSystem, phi, GB) -> list[Check]:
    from .dynamics import detect_drift, f2

    cx = phi.complex
    N = cx.N
    drift = detect_drift(phi)
    g2 = f2(phi, drift)
    out = []

    def geo(c, n):
        return cell_geometry(sys, c, n, GB)

    def h_at(n, k):
        return sys.thresholds[n][k - 1].h

    def th_at(n, k):
        return sys.thresholds[n][k - 1].value

    for rec in drift:
        xi, xp = rec.xi, rec.xi_prime
        if xi.dim != N - 2 or xp.dim != N - 1:
            continue
        ng, no = rec.go_pair
        where = f"pair {xi.text()} -> {xp.text()} GO=({ng + 1},{no + 1})"
        hg = h_at(ng, xi.v[ng])
        lhs = 2 * hg
        if g2.has_edge(xp, xi):
            G = geo(xp, ng)
            O = geo(xp, no)
            if O.upper == 0:
                out.append(Check("H2", "(i)", where, None, None, False, "U vanishes"))
            else:
                rhs = G.lower / O.upper * O.length / 2
                out.append(Check("H2", "(i)", where, lhs, rhs, lhs < rhs))
        if not g2.has_edge(xi, xp):
            continue
        faces = _proper_faces(cx, xi)
        dc = phi.classes(xi)
        cyclic = any(_is_cyclic(phi, a, no) for a in faces)
        G = geo(xi, ng)
        O = geo(xi, no)
        if O.upper == 0:
            out.append(Check("H2", "(ii-iv)", where, None, None, False, "U vanishes"))
            continue
        ratio = G.lower / O.upper
        if not cyclic and no not in dc.act:
            rhs = ratio * 2 * h_at(no, xi.v[no])
            out.append(Check("H2", "(ii)", where, lhs, rhs, lhs < rhs))
        elif not cyclic:
            nop = dc.omap[no]
            alphas = [a for a in faces if extension(a, xi) == frozenset({nop})]
            for a in alphas:
                k = a.v[nop]
                if not 1 <= k <= sys.K[nop]:
                    out.append(Check("H2", "(iii)", where + f" alpha {a.text()}", None, None, True,
                                     "flagged: boundary face, not evaluable"))
                    continue
                val = sys.gamma[nop] * (th_at(nop, k) + relative_position(a, xi)[nop] * h_at(nop, k))
                x = _inverse_single(sys, nop, no, xi.v[no], cx.top_star(xi), val)
                if x is None:
                    out.append(Check("H2", "(iii)", where + f" alpha {a.text()}", None, None, True,
                                     "flagged: inverse not defined on the segment, not evaluable"))
                    continue
                rhs = ratio * (x - (th_at(no, xi.v[no]) + relative_position(xi, xp)[no] * h_at(no, xi.v[no])))
                out.append(Check("H2", "(iii)", where + f" alpha {a.text()}", lhs, rhs, lhs < rhs, "flagged"))
        else:
            nop = dc.omap.get(no)
            alphas = [a for a in faces if extension(a, xi) == frozenset({no})]
            if nop is None or not alphas:
                out.append(Check("H2", "(iv)", where, None, None, True,
                                 "flagged: no face alpha with Ex(alpha, xi) = {n_o}; condition vacuous"))
                continue
            for a in alphas:
                out.extend(_h2_iv(sys, phi, rec, a, nop, where))
    return out


def _h2_iv(sys, phi, rec, a, nop, where) -> list[Check]:
    # literal balanced reading; see the decisions ledger
    xi, xp = rec.xi, rec.xi_prime
    ng, no = rec.go_pair
    cx = phi.complex
    tag = where + f" alpha {a.text()}"
    tops = cx.top_star(xi)
    Eg_vals = {sys.E_top(ng, mu) for mu in tops}
    if len(Eg_vals) != 1:
        return [Check("H2", "(iv)", tag, None, None, True, "flagged: E_ng varies over Top(xi), not evaluable")]
    Eg = Eg_vals.pop()
    gg, go, gop = sys.gamma[ng], sys.gamma[no], sys.gamma[nop]
    kg, ko, kop = xi.v[ng], xi.v[no], xi.v[nop]
    if not (1 <= kg <= sys.K[ng] and 1 <= ko <= sys.K[no] and 1 <= kop <= sys.K[nop]):
        return [Check("H2", "(iv)", tag, None, None, True, "flagged: boundary index, not evaluable")]
    (r,) = phi.classes(xp).R[ng]
    tg, hg = sys.thresholds[ng][kg - 1].value, sys.thresholds[ng][kg - 1].h
    top_, hop = sys.thresholds[nop][kop - 1].value, sys.thresholds[nop][kop - 1].h
    to = sys.thresholds[no][ko - 1].value
    den_l = gg * (tg - r * hg) - Eg
    x = _inverse_single(sys, nop, no, ko, tops, gop * (top_ + relative_position(a, xi)[nop] * hop))
    den_r = go * (to + relative_position(xi, xp)[no] * hop) - Eg / gg
    if den_l == 0 or den_r == 0 or x is None:
        return [Check("H2", "(iv)", tag, None, None, True, "flagged: not evaluable")]
    lhs = (gg * (tg + r * hg) - Eg) / den_l
    rhs = (go * x - Eg / gg) / den_r
    # inequality reads lhs > rhs; stored as rhs < lhs
    return [Check("H2", "(iv)", tag, rhs, lhs, rhs < lhs, "flagged")]


@dataclass
class HReport:
    level: int
    ok: bool
    checks: list[Check]
    stage: str = ""

    @property
    def violations(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    @property
    def flagged(self) -> list[Check]:
        return [c for c in self.checks if "flagged" in c.note]

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"level": self.level, "ok": self.ok, "stage": self.stage,
                "violations": [c.to_json() for c in self.violations],
                "flagged": [c.to_json() for c in self.flagged],
                "checks": len(self.checks)}


def h_membership(sys: RampSystem, level: int) -> HReport:
    """Check h against H_level; Lambda(S) violations are reported first and stop the check."""
    if level not in (0, 1, 2, 3):
        raise RampError(f"unknown h level {level}")
    s = _lambda_s_checks(sys)
    if not all(c.ok for c in s):
        return HReport(level, False, [c for c in s if not c.ok], "Lambda(S)")
    checks = _h0_checks(sys)
    if level >= 1:
        checks += _h1_checks(sys)
    # H2 evaluates inverse ramp values and needs H1; the H3 bounds need
    # only the induced labeling and are reported at every 3-cycle vertex.
    if level == 2 and all(c.ok for c in checks):
        checks += _h2_checks(sys, rook_field(wall_labeling_from_ramp(sys)), global_bounds(sys))
    elif level == 3 and sys.N == 3:
        checks += _h3_checks(sys, rook_field(wall_labeling_from_ramp(sys)))
    return HReport(level, all(c.ok for c in checks), checks, f"H{level}")


def suggest_uniform_h(sys: RampSystem, level: int) -> Fraction:
    """A uniform half-width inside H_level: half of the existence bound for levels 0, 1, 3.

    The bound depends on (gamma, nu, theta) only; the h values of ``sys`` are ignored.
    """
    if level == 2:
        raise RampError("no uniform-h bound is available for level 2; check candidates with h_membership")
    if level not in (0, 1, 3):
        raise RampError(f"unknown h level {level}")
    bound = None

    def take(x):
        nonlocal bound
        bound = x if bound is None else min(bound, x)

    for m in range(sys.N):
        th = sys.thresholds[m]
        take(th[0].value)
        for k in range(len(th) - 1):
            take((th[k + 1].value - th[k].value) / 2)
    if level >= 1:
        for n in range(sys.N):
            ths = sys.thresholds[n]
            for v in sys.regions():
                x = sys.E_region(n, v) / sys.gamma[n]
                k = v[n]
                lo = ths[k - 1].value if k >= 1 else None
                hi = ths[k].value if k < len(ths) else None
                if (lo is None or lo < x) and (hi is None or x < hi):
                    if lo is not None:
                        take(x - lo)
                    if hi is not None:
                        take(hi - x)
    if level == 3 and sys.N == 3:
        probe = sys.with_h(bound / 2)
        phi = rook_field(wall_labeling_from_ramp(probe))
        for sigma in _three_cycle_vertices(phi):
            ratio = _h3_ratio(sys, sigma)
            cube = Fraction(float(ratio) ** (1 / 3)) * Fraction(999, 1000)
            while cube ** 3 >= ratio:
                cube *= Fraction(999, 1000)
            take(cube / 2)
    return bound / 2


# -- input formats ---------------------------------------------------------------

_EDGE_RE = re.compile(r"^\s*(\S+)\s*(->|-\|)\s*(\S+)\s*$")


def parse_network(text: str) -> tuple[list[str], list[tuple[int, int, bool]]]:
    """Parse lines ``a -> b`` (activation) or ``a -| b`` (repression).

    Returns node names and edges ``(source, target, activating)`` in file
    order.  Nodes are ordered numerically when every name is an integer,
    otherwise by first appearance.
    """
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        m = _EDGE_RE.match(body)
        if not m:
            col = len(body) - len(body.lstrip()) + 1
            arrow = re.search(r"-[>|]", body)
            if arrow is None:
                raise RampError(f"network line {lineno}, column {col}: expected 'a -> b' or 'a -| b'")
            raise RampError(f"network line {lineno}, column {arrow.start() + 1}: malformed edge {body.strip()!r}")
        raw.append((m.group(1), m.group(3), m.group(2) == "->", lineno))
    if not raw:
        raise RampError("network has no edges")
    names: list[str] = []
    for a, b, _, _ in raw:
        for x in (a, b):
            if x not in names:
                names.append(x)
    if all(x.isdigit() for x in names):
        names.sort(key=int)
    pos = {x: i for i, x in enumerate(names)}
    edges = []
    seen = set()
    for a, b, act, lineno in raw:
        key = (pos[a], pos[b])
        if key in seen:
            raise RampError(f"network line {lineno}, column 1: duplicate edge {a} -> {b}")
        seen.add(key)
        edges.append((pos[a], pos[b], act))
    return names, edges


def _default_interaction(sources: Sequence[int]) -> InteractionFunction:
    return InteractionFunction("I", tuple((m,) for m in sorted(sources)))


def _interactions_from_json(spec, names, pos, N, sources_of) -> list[InteractionFunction]:
    if spec is None:
        return [_default_interaction(sources_of[n]) for n in range(N)]
    if isinstance(spec, Mapping):
        items = [spec.get(names[n], spec.get(str(n + 1))) for n in range(N)]
    else:
        items = list(spec)
    if len(items) != N:
        raise RampError(f"expected {N} interaction entries, got {len(items)}")
    out = []
    for n, it in enumerate(items):
        if it is None:
            out.append(_default_interaction(sources_of[n]))
            continue
        part = []
        for block in it.get("partition", []):
            b = []
            for x in block:
                key = str(x)
                if key not in pos:
                    raise RampError(f"interaction of node {names[n]} names unknown source {x!r}")
                b.append(pos[key])
            part.append(tuple(b))
        out.append(InteractionFunction(it.get("kind", "I"), tuple(part)))
    return out


def network_to_ramp(network: str, gamma, ell, u, theta, h, interactions=None) -> RampSystem:
    """Ramp system of a regulatory network: one J = 1 ramp per edge.

    An activating edge gets levels (ell, u), a repressing edge (u, ell).
    Parameter arrays are aligned with the edge lines of ``network``.
    """
    names, edges = parse_network(network)
    N = len(names)
    for key, arr in (("ell", ell), ("u", u), ("theta", theta), ("h", h)):
        if len(arr) != len(edges):
            raise RampError(f"'{key}' has {len(arr)} entries for {len(edges)} edges")
    if len(gamma) != N:
        raise RampError(f"'gamma' has {len(gamma)} entries for {N} nodes")
    ramps = {}
    for (a, b, act), l_, u_, t_, h_ in zip(edges, ell, u, theta, h):
        nu = (l_, u_) if act else (u_, l_)
        ramps[(b, a)] = RampFunction(nu, (t_,), (h_,))
    sources_of = [[a for (a, b, _) in edges if b == n] for n in range(N)]
    pos = {x: i for i, x in enumerate(names)}
    inter = _interactions_from_json(interactions, names, pos, N, sources_of)
    return RampSystem(gamma, inter, ramps, names)


def ramp_system_from_json(doc: Mapping) -> RampSystem:
    """Build a ramp system from a parsed document in either accepted layout."""
    if not isinstance(doc, Mapping):
        raise RampError("ramp input must be a JSON object")
    try:
        if "network" in doc:
            return network_to_ramp(doc["network"], doc["gamma"], doc["ell"], doc["u"], doc["theta"],
                                   doc["h"], doc.get("interactions"))
        gamma = doc["gamma"]
        N = len(gamma)
        names = [str(n + 1) for n in range(N)]
        pos = {x: i for i, x in enumerate(names)}
        ramps = {}
        for i, r in enumerate(doc["ramps"]):
            n, m = int(r["target"]) - 1, int(r["source"]) - 1
            if (n, m) in ramps:
                raise RampError(f"ramp entry {i + 1}: duplicate ramp r[{n + 1},{m + 1}]")
            ramps[(n, m)] = RampFunction(tuple(r["nu"]), tuple(r["theta"]), tuple(r["h"]))
        sources_of = [[m for (n, m) in ramps if n == t] for t in range(N)]
        inter = _interactions_from_json(doc.get("interactions"), names, pos, N, sources_of)
        return RampSystem(gamma, inter, ramps, names)
    except KeyError as exc:
        raise RampError(f"missing key {exc.args[0]!r} in ramp input") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, RampError):
            raise
        raise RampError(f"malformed ramp input: {exc}") from None


def load_ramp_system(text: str) -> RampSystem:
    """Parse JSON ramp or network input with every number read as an exact rational."""
    try:
        doc = json.loads(text, parse_float=Fraction, parse_int=Fraction)
    except json.JSONDecodeError as exc:
        raise RampError(f"JSON error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return ramp_system_from_json(doc)
