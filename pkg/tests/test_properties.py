"""Property tests for the structural invariants of each module on random instances."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import SEED, geo_face, random_instances
from conley_rook.blowup import extend_grading
from conley_rook.conley import build_graded_complex, reduce
from conley_rook.cubical import Complex, extension, incidence, is_face, relative_position
from conley_rook.dynamics import build_model, detect_drift, f1, grading
from conley_rook.fixtures import random_ramp_system
from conley_rook.pipeline import analyze
from conley_rook.ramp import RampFunction, RampSystem, eval_ramp, global_bounds
from conley_rook.walls import rook_field

INSTANCES = [om for _, _, om in random_instances(40, SEED + 11)]
labelings = st.sampled_from(INSTANCES)


# -- cubical ---------------------------------------------------------------------------

@given(st.lists(st.integers(1, 2), min_size=1, max_size=3), st.data())
def test_incidence_support(limits, data):
    cx = Complex(limits)
    cells = cx.all_cells
    a = data.draw(st.sampled_from(cells))
    b = data.draw(st.sampled_from(cells))
    if incidence(a, b) != 0:
        assert geo_face(b, a) and a.dim == b.dim + 1
    if is_face(a, b):
        support = {n for n, x in enumerate(relative_position(a, b)) if x}
        assert support == set(extension(a, b))


# -- walls ------------------------------------------------------------------------------

@given(labelings, st.data())
def test_value_sets_shrink_on_cofaces(om, data):
    """Nonzero values nest along cofaces; inessential directions of the coface nest fully."""
    ph = rook_field(om)
    xi = data.draw(st.sampled_from(om.complex.all_cells))
    R = ph.classes(xi).R
    for xp in om.complex.cofaces(xi):
        Rp = ph.classes(xp).R
        for n in range(om.N):
            assert Rp[n] - {0} <= R[n]
            if n in xp.inessential:
                assert Rp[n] <= R[n]


def test_zero_values_appear_only_on_cofaces():
    # A corner vertex sees only wall labels, while an edge through it whose two
    # parallel walls disagree gets the value 0; so the full sets do not nest.
    from conley_rook.fixtures import running_labeling
    from conley_rook.cubical import parse_cell as P
    ph = rook_field(running_labeling())
    corner, edge = P("0,2;0,0"), P("0,2;1,0")
    assert 0 not in ph.classes(corner).R[0]
    assert 0 in ph.classes(edge).R[0]
    assert not ph.classes(edge).R[0] <= ph.classes(corner).R[0]


@given(labelings, st.data())
def test_gradient_directions_do_not_depend_on_top_cell(om, data):
    ph = rook_field(om)
    xi = data.draw(st.sampled_from(om.complex.all_cells))
    for n in ph.classes(xi).G:
        assert len({ph(xi, mu)[n] for mu in om.complex.top_star(xi)}) == 1


@given(labelings)
def test_opaque_cells(om):
    ph = rook_field(om)
    for xi in om.complex.all_cells:
        dc = ph.classes(xi)
        if dc.opaque:
            inessential = set(xi.inessential)
            assert set(dc.act) == inessential == set(dc.O)
            assert dc.bijective
            essential = set(range(om.N)) - inessential
            assert essential == set(dc.G) | set(dc.Nn)


# -- dynamics -------------------------------------------------------------------------------

@given(labelings)
@settings(max_examples=30)
def test_models_have_no_empty_images(om):
    ph = rook_field(om)
    for model in ("F0", "F1", "F2", "F3"):
        if model == "F3" and om.N > 3:
            continue
        g = build_model(model, ph)
        assert all(g.out(c) for c in om.complex.all_cells)


@given(labelings)
@settings(max_examples=30)
def test_f1_double_edges_extend_in_opaque_directions(om):
    ph = rook_field(om)
    for a, b in f1(ph).double_edges():
        lo, hi = (a, b) if a.dim < b.dim else (b, a)
        assert set(extension(lo, hi)) <= ph.classes(lo).O


@given(labelings)
@settings(max_examples=30)
def test_no_l_shaped_drift(om):
    ph = rook_field(om)
    pairs = {(r.xi, r.xi_prime) for r in detect_drift(ph)}
    for a, b in pairs:
        assert not any(x == b for x, _ in pairs)


@given(labelings)
@settings(max_examples=30)
def test_transient_components_are_single_gradient_cells(om):
    ph = rook_field(om)
    gr = grading(build_model("F3" if om.N <= 3 else "F2", ph))
    for p in range(gr.size):
        if not gr.recurrent[p]:
            (c,) = gr.fiber(p)
            assert ph.classes(c).G


# -- blow-up and Conley complex --------------------------------------------------------

@given(labelings)
@settings(max_examples=20)
def test_blowup_fibers(om):
    res = analyze(om, "F3", conley=False) if om.N <= 3 else analyze(om, "F2", conley=False)
    ext = extend_grading(res.grading)
    cx = ext.complex
    tops = [c for c in cx.all_cells if c.dim == cx.N]
    assert {ext.grade[t] for t in tops} == set(range(ext.poset.size))
    for a in cx.all_cells:
        for b in cx.cofaces(a):
            assert ext.poset.leq(ext.grade[a], ext.grade[b])
    for p in range(ext.poset.size):
        down = set(ext.preimage(ext.poset.downset(p)))
        for c in down:
            assert set(cx.faces(c)) <= down
            assert any(t in down for t in cx.top_star(c))
        for z in down:
            if z.dim != cx.N - 1:
                continue
            star = cx.top_star(z)
            if len(star) == 2:
                inside = [t for t in star if t in down]
                if len(inside) == 1:
                    (s0,) = inside
                    (s1,) = [t for t in star if t not in down]
                    assert ext.poset.lt(ext.grade[s0], ext.grade[s1])


@given(labelings)
@settings(max_examples=15)
def test_reduction_is_deterministic(om):
    model = "F3" if om.N <= 3 else "F2"
    a = analyze(om, model)
    b = analyze(om, model)
    assert a.conley.delta == b.conley.delta and a.conley.grade == b.conley.grade
    again = reduce(build_graded_complex(b.extended))
    assert again.delta == a.conley.delta


# -- ramp systems ---------------------------------------------------------------------------

def _random_system(seed, K):
    return random_ramp_system(random.Random(seed), K)


@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1), (2, 1), (1, 1, 1)]), st.data())
@settings(max_examples=40)
def test_production_monotone_on_boxes(seed, K, data):
    """E_n is monotone in x_m between consecutive threshold segments of x_m."""
    sys = _random_system(seed, K)
    n = data.draw(st.integers(0, sys.N - 1))
    m = data.draw(st.sampled_from(sys.sources(n)))
    region = data.draw(st.integers(0, sys.K[m]))
    th = sys.thresholds[m]
    lo = F(0) if region == 0 else th[region - 1].value - th[region - 1].h
    hi = th[-1].value + th[-1].h + 1 if region == len(th) else th[region].value + th[region].h
    xs = sorted({lo + (hi - lo) * F(i, 12) for i in range(13)})
    point = {k: F(data.draw(st.integers(1, 40)), 2) for k in sys.sources(n)}

    def E(x):
        vals = {k: eval_ramp(sys.ramps[(n, k)], x if k == m else point[k]) for k in sys.sources(n)}
        return sys.interactions[n](vals)

    ys = [E(x) for x in xs]
    assert all(a <= b for a, b in zip(ys, ys[1:])) or all(a >= b for a, b in zip(ys, ys[1:]))


@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1), (2, 1), (1, 1, 1)]), st.data())
@settings(max_examples=40)
def test_global_bound_monotone_in_levels(seed, K, data):
    sys = _random_system(seed, K)
    key = data.draw(st.sampled_from(sorted(sys.ramps)))
    r = sys.ramps[key]
    j = data.draw(st.integers(0, r.J))
    bump = F(data.draw(st.integers(1, 50)), 10)
    nu = list(r.nu)
    nu[j] += bump
    if any(nu[i] == nu[i + 1] for i in range(r.J)):
        return
    ramps = dict(sys.ramps)
    ramps[key] = RampFunction(tuple(nu), r.theta, r.h)
    bigger = RampSystem(sys.gamma, sys.interactions, ramps, sys.names)
    assert all(a <= b for a, b in zip(global_bounds(sys), global_bounds(bigger)))


@pytest.mark.parametrize("K", [(1,), (2, 2), (2, 1, 1)])
def test_random_systems_meet_ramp_invariants(K):
    sys = _random_system(SEED + 12, K)
    assert sys.K == tuple(K)
    for n in range(sys.N):
        assert sys.K[n] == sum(sys.ramps[(t, n)].J for t in sys.targets(n))
