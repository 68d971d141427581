"""Ramp functions, ramp systems, admissibility, induced labelings, h-membership and geometry."""

from __future__ import annotations

import copy
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import SEED
from conley_rook.cubical import relative_position
from conley_rook.fixtures import INTRO2, SET1, ramp_fixture, random_ramp_system, running_labeling
from conley_rook.ramp import (InteractionFunction, RampError, RampFunction, RampSystem, cell_geometry,
                              check_admissible, eval_ramp, global_bounds, h_membership, load_ramp_system,
                              network_to_ramp, parse_network, ramp_system_from_json, suggest_uniform_h,
                              wall_labeling_from_ramp)
from conley_rook.walls import (is_strongly_dissipative, rook_field, validate, vertex_monotonicity, wall_direction,
                               walls_of)
from conley_rook.cubical import parse_cell as P


@pytest.fixture(scope="module")
def set1():
    return ramp_fixture("set1")


def _with(doc, key, idx, value):
    d = copy.deepcopy(doc)
    d[key][idx] = value
    return ramp_system_from_json(d)


# -- ramp functions ------------------------------------------------------------------

def test_eval_ramp_examples(set1):
    r11 = set1.ramps[(0, 0)]
    assert eval_ramp(r11, 0) == F("3.7")
    assert eval_ramp(r11, F("6.4")) == F("2.55") == (F("3.7") + F("1.4")) / 2
    assert eval_ramp(r11, F("6.1")) == F("3.7")
    assert eval_ramp(r11, 100) == F("1.4")


@given(st.fractions(min_value=0, max_value=20))
def test_eval_ramp_plateaus_and_segment(x):
    r = RampFunction((F(1), F(5), F(2)), (F(4), F(10)), (F(1), F(2)))
    y = eval_ramp(r, x)
    if x <= 3:
        assert y == 1
    elif 5 <= x <= 8:
        assert y == 5
    elif x >= 12:
        assert y == 2
    else:
        lo, hi = (3, 5) if x < 5 else (8, 12)
        a, b = (F(1), F(5)) if x < 5 else (F(5), F(2))
        assert y == a + (b - a) * (x - lo) / (hi - lo)


def test_ramp_function_rejects_bad_parameters():
    with pytest.raises(RampError):
        RampFunction((1, 1), (2,), (1,))
    with pytest.raises(RampError):
        RampFunction((1, 2), (2,), (2,))
    with pytest.raises(RampError):
        RampFunction((1, 2, 3), (2, 3), (F(1, 2), F(1, 2)))
    with pytest.raises(RampError):
        RampFunction((1, 2), (2, 3), (1,))


def test_interaction_types():
    vals = {0: F(2), 1: F(3), 2: F(5)}
    assert InteractionFunction("I", ((0, 1), (2,)))(vals) == 25
    assert InteractionFunction("II", ((0, 1), (2,)))(vals) == 11
    with pytest.raises(RampError):
        InteractionFunction("I", ((0,), (0, 1)))
    with pytest.raises(RampError):
        InteractionFunction("III", ((0,),))


# -- systems and bounds ---------------------------------------------------------------

def test_global_bounds_set1(set1):
    assert global_bounds(set1) == [F("40.59"), F("58.04")]
    assert F("3.7") * F("10.7") + 1 == F("40.59")


def test_global_bounds_large_gamma(set1):
    fast = RampSystem((10 ** 6, 10 ** 6), set1.interactions, set1.ramps)
    assert global_bounds(fast) == [F("11.1") + F("0.6") + 1, F("5.6") + F("0.35") + 1]


def test_threshold_counts(set1):
    assert set1.K == (2, 2)
    assert [t.value for t in set1.thresholds[0]] == [F("6.4"), F("11.1")]
    assert [t.value for t in set1.thresholds[1]] == [F("1.8"), F("5.6")]


# -- admissibility ----------------------------------------------------------------------

def test_set1_admissible(set1):
    assert check_admissible(set1)


def test_theta_equal_to_production_is_inadmissible():
    # E_2 takes the value 0.2 * 6.2 = 1.24 on a rectangle; put the 2 -| 2 threshold there.
    bad = _with(SET1, "theta", 3, "1.24")
    res = check_admissible(bad)
    assert not res and res.first.name == "gamma-theta-vs-E"
    assert "1.24" in res.first.text()
    with pytest.raises(RampError, match="gamma-theta-vs-E"):
        wall_labeling_from_ramp(bad)


def test_oversized_h_is_inadmissible():
    d = copy.deepcopy(SET1)
    d["h"] = ["3", "0.35", "3", "0.3"]
    res = check_admissible(ramp_system_from_json(d))
    assert not res
    (v,) = res.violations
    assert v.level == "H0" and "x1 k=1,2" in v.where
    assert (v.lhs, v.rhs) == (F("9.4"), F("8.1"))


# -- induced wall labelings --------------------------------------------------------------

def _sample_point(sys, v):
    """A point inside the plateau rectangle D_v."""
    pt = []
    for m, k in enumerate(v):
        th = sys.thresholds[m]
        if k == 0:
            pt.append((th[0].value - th[0].h) / 2)
        elif k == len(th):
            pt.append(th[-1].value + th[-1].h + 1)
        else:
            pt.append((th[k - 1].value + th[k - 1].h + th[k].value - th[k].h) / 2)
    return pt


def _set1_E(sys, n, x):
    """E_1 = r11(x1) r12(x2) and E_2 = r21(x1) r22(x2), evaluated at a point."""
    return eval_ramp(sys.ramps[(n, 0)], x[0]) * eval_ramp(sys.ramps[(n, 1)], x[1])


def test_set1_labeling_against_pointwise_oracle(set1):
    om = wall_labeling_from_ramp(set1)
    GB = global_bounds(set1)
    for xi, mu in walls_of(om.complex):
        n = wall_direction(xi)
        k = xi.v[n]
        th = F(0) if k == 0 else GB[n] if k == set1.K[n] + 1 else set1.thresholds[n][k - 1].value
        E = _set1_E(set1, n, _sample_point(set1, mu.v))
        expect = 1 if E - set1.gamma[n] * th > 0 else -1
        assert om(xi, mu) == expect


def test_set1_labeling_is_the_running_example(set1):
    om = wall_labeling_from_ramp(set1)
    assert om == running_labeling()
    assert len(walls_of(om.complex)) == 36


def test_boundary_walls_point_inward(set1):
    om = wall_labeling_from_ramp(set1)
    cx = om.complex
    for xi, mu in walls_of(cx):
        if len(cx.top_star(xi)) == 1:
            n = wall_direction(xi)
            assert om(xi, mu) == -relative_position(xi, mu)[n]


def test_labeling_constant_over_h0(set1):
    h_small = set1.with_h(F(1, 100))
    h_mixed = set1.with_h({(0, 0): [F("0.2")], (0, 1): [F("0.1")], (1, 0): [F("2")], (1, 1): [F("0.05")]})
    for s in (h_small, h_mixed):
        assert h_membership(s, 0)
    assert wall_labeling_from_ramp(h_small) == wall_labeling_from_ramp(h_mixed) == wall_labeling_from_ramp(set1)


def test_random_ramp_labelings_satisfy_wall_properties():
    rng = random.Random(SEED + 5)
    for K in [(1,), (1, 1), (2, 1), (2, 2), (1, 1, 1), (2, 1, 1)]:
        for _ in range(3):
            sys = random_ramp_system(rng, K)
            om = wall_labeling_from_ramp(sys)
            assert om.complex.limits == tuple(k + 1 for k in K)
            assert validate(om) and is_strongly_dissipative(om)
            assert vertex_monotonicity(om) is None


# -- h-membership --------------------------------------------------------------------

def test_set1_h0_margins(set1):
    rep = h_membership(set1, 0)
    assert rep
    pairs = {(c.lhs, c.rhs) for c in rep.checks if c.name == "interleave"}
    assert pairs == {(F("6.7"), F("10.5")), (F("2.1"), F("5.25"))}


@pytest.mark.parametrize("name", ["set1", "ex2sec6", "periodic", "intro2"])
@pytest.mark.parametrize("level", [0, 1])
def test_suggested_h_passes_its_level(name, level):
    sys = ramp_fixture(name)
    h = suggest_uniform_h(sys, level)
    assert h > 0 and h_membership(sys.with_h(h), level)
    assert h_membership(sys.with_h(h / 3), level)


def test_level_three_is_level_one_in_two_dimensions(set1):
    a, b = h_membership(set1, 1), h_membership(set1, 3)
    assert [c.text() for c in a.checks] == [c.text() for c in b.checks]
    assert suggest_uniform_h(set1, 3) == suggest_uniform_h(set1, 1)


def test_level_two_has_no_uniform_bound(set1):
    with pytest.raises(RampError, match="level 2"):
        suggest_uniform_h(set1, 2)


def test_intro2_level_three_reports_every_cycle_vertex():
    sys = ramp_fixture("intro2")
    rep = h_membership(sys, 3)
    h3 = [c for c in rep.checks if c.level == "H3"]
    assert [c.where for c in h3] == ["vertex 3,2,3;0,0,0"]
    # 8 h^3 = 0.008 exceeds the bound at h = 0.1; other failures come from H0 and H1.
    assert not h3[0].ok and h3[0].lhs == F(8, 1000)
    assert any(c.level == "H0" and not c.ok for c in rep.checks)
    good = sys.with_h(suggest_uniform_h(sys, 3))
    rep = h_membership(good, 3)
    assert rep and [c.where for c in rep.checks if c.level == "H3"] == ["vertex 3,2,3;0,0,0"]


def test_membership_is_monotone_in_level():
    rng = random.Random(SEED + 6)
    for K in [(1, 1), (2, 1), (1, 1, 1)]:
        for _ in range(3):
            sys = random_ramp_system(rng, K)
            for h in (F(1, 50), F(1, 5), F(1)):
                try:
                    s = sys.with_h(h)
                except RampError:
                    continue
                got = [bool(h_membership(s, lv)) for lv in (0, 1, 2, 3)]
                assert got[1] <= got[0] and got[2] <= got[1] and got[3] <= got[1]


def test_lambda_s_violation_reported_first():
    bad = _with(SET1, "theta", 3, "1.24")
    rep = h_membership(bad, 1)
    assert not rep and rep.stage == "Lambda(S)"
    assert all(c.level == "S" for c in rep.checks)


# -- network frontend --------------------------------------------------------------------

def test_network_orientation(set1):
    assert set1.ramps[(0, 1)].nu == (F("10.7"), F("0.1"))
    sys = network_to_ramp("1 -> 2\n2 -| 1", [1, 1], ["0.5", "1"], ["3", "4"], ["1", "2"], ["0.1", "0.1"])
    assert sys.ramps[(1, 0)].nu == (F("0.5"), F(3))
    assert sys.ramps[(0, 1)].nu == (F(4), F(1))


def test_network_interaction_structure(set1):
    for n in range(2):
        f = set1.interactions[n]
        assert f.kind == "I" and f.partition == ((0,), (1,))
    x = (F(3), F(4))
    for n in range(2):
        vals = {m: eval_ramp(set1.ramps[(n, m)], x[m]) for m in range(2)}
        assert set1.interactions[n](vals) == vals[0] * vals[1]


def test_network_parse_errors():
    with pytest.raises(RampError, match="line 2, column"):
        parse_network("1 -> 2\n1 => 2\n")
    with pytest.raises(RampError, match="duplicate"):
        parse_network("1 -> 2\n1 -| 2\n")
    with pytest.raises(RampError, match="no edges"):
        parse_network("# empty\n")


def test_load_ramp_json_is_exact():
    sys = load_ramp_system('{"network": "1 -| 1", "gamma": [1], "ell": [0.1], "u": [0.3], '
                           '"theta": [0.2], "h": [0.05]}')
    assert sys.ramps[(0, 0)].nu == (F(3, 10), F(1, 10))
    with pytest.raises(RampError, match="line 1"):
        load_ramp_system("{")
    with pytest.raises(RampError, match="missing key"):
        load_ramp_system('{"gamma": [1]}')


def test_json_layouts_agree():
    sys = ramp_fixture("intro2")
    again = ramp_system_from_json(sys.to_json())
    assert again.to_json() == sys.to_json()
    assert wall_labeling_from_ramp(again) == wall_labeling_from_ramp(sys)
    assert INTRO2["gamma"] == ["1", "1", "1.2"]


# -- geometry ------------------------------------------------------------------------------

def test_cell_geometry_threshold_interval(set1):
    g = cell_geometry(set1, P("1,1;0,1"), 0)
    assert g.interval == (F("6.1"), F("6.7")) and g.length == F("0.6") and g.mid == F("6.4")


def test_cell_geometry_essential_midpoint(set1):
    g = cell_geometry(set1, P("1,1;1,1"), 0)
    assert g.interval == (F("6.7"), F("10.5"))
    assert g.mid == (g.interval[0] + g.interval[1]) / 2


def test_cell_geometry_bounds_ordered(set1):
    cx = set1.complex()
    for xi in cx.all_cells:
        for n in range(2):
            g = cell_geometry(set1, xi, n)
            assert g.lower <= g.upper
            assert g.interval[0] < g.interval[1] and g.length == g.interval[1] - g.interval[0]
