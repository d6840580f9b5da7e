import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primeweb import spiral as sp

PHI = math.radians(74.18896)


def test_log_spiral_arc_closed_form_vs_quadrature():
    s = sp.LogSpiral(PHI)
    for theta in (0.5, 2.0, 7.0):
        assert s.arc_length(theta) == pytest.approx(
            sp.arc_quadrature(s, 0.0, theta), rel=1e-8
        )


def test_log_spiral_theta_inverse():
    s = sp.LogSpiral(PHI)
    for x in (1.0, 37.0, 709.0, 1e5):
        th = s.theta_for_value(x)
        assert s.arc_length(th) == pytest.approx(x, rel=1e-12)


def test_log_spiral_point_for_value():
    s = sp.LogSpiral(PHI)
    p = s.point_for_value(37.0)
    assert p.rho == pytest.approx(s.radius(p.theta))
    x, y = p.xy()
    assert math.hypot(x, y) == pytest.approx(p.rho)


def test_moustache_limit_and_negative_branch():
    s = sp.LogSpiral(PHI)
    lim = s.moustache_limit
    assert lim == pytest.approx(-1.0 / math.cos(PHI))
    # total negative arc stays below 1/cos(phi)
    th = s.negative_moustache(lim * 0.999)
    assert th < 0
    with pytest.raises(Exception):
        s.negative_moustache(1.0)


def test_pure_spline_matches_log_spiral():
    s = sp.LogSpiral(PHI)
    ss = sp.SplineSpiral.pure(PHI, 10.0)
    for th in (0.3, 2.2, 9.7):
        assert ss.lss_eval(th) == pytest.approx(s.radius(th), rel=1e-12)
        assert ss.arc_from_zero(th) == pytest.approx(s.arc_length(th), rel=1e-10)


def test_spline_continuity_at_knots():
    ss = sp.SplineSpiral.pure(PHI, 3.0)
    ss.append_segment(0.1, 5.0)
    ss.append_segment(0.45, 6.5)
    for k in (3.0, 5.0):
        assert ss.lss_eval(k - 1e-12) == pytest.approx(ss.lss_eval(k + 1e-12), rel=1e-9)


def test_spline_arc_vs_quadrature_across_segments():
    ss = sp.SplineSpiral.pure(PHI, 3.0)
    ss.append_segment(0.2, 5.0)
    got = ss.lss_arc(1.0, 4.5)
    assert got == pytest.approx(sp.arc_quadrature(ss, 1.0, 4.5), rel=1e-8)


def test_theta_for_arc_inverse():
    ss = sp.SplineSpiral.pure(PHI, 4.0)
    ss.append_segment(0.3, 7.0)
    top = ss.total_arc()
    for x in (1.0, top / 3.0, top * 0.99):
        th = ss.theta_for_arc(x)
        assert ss.arc_from_zero(th) == pytest.approx(x, rel=1e-10)


def test_isometric_map_preserves_arc():
    ss = sp.SplineSpiral.pure(PHI, 6.0)
    for x in (2.0, ss.total_arc() / 2.0, ss.total_arc() * 0.9):
        p = ss.isometric_map(x)
        assert ss.arc_from_zero(p.theta) == pytest.approx(x, rel=1e-10)
        assert p.rho == pytest.approx(ss.lss_eval(p.theta), rel=1e-12)


def test_collinearity_oracle_vanishes_at_root():
    root = sp.triplet_root(127.0, 709.0, 5381.0)
    assert sp.PRIMARY_WINDOW[0] < root < sp.PRIMARY_WINDOW[1]
    assert sp.collinearity_residual(127.0, 709.0, 5381.0, root) < 1e-9


def test_triplet_roots_bracketed():
    roots = sp.triplet_roots(23.0, 83.0, 431.0)
    assert roots
    for r in roots:
        scale = (431.0 * r + 1.0) * (83.0 * r + 1.0)
        assert abs(sp._triplet_sum(23.0, 83.0, 431.0, r)) / scale < 1e-9


def test_survey_statistics_window():
    triplets = [(2, 3, 5), (23, 83, 431), (127, 709, 5381), (13, 41, 179)]
    stats = sp.survey_statistics(triplets)
    lo, hi = stats["hull"]
    assert sp.PRIMARY_WINDOW[0] - 1e-6 <= lo <= hi <= sp.PRIMARY_WINDOW[1] + 1e-6
    assert stats["x_bar"] == pytest.approx((lo + hi) / 2.0)
    # the head triplet has no window root and is reported skipped
    assert (2, 3, 5) in [tuple(t) for t in stats["skipped"]]


def test_survey_csv():
    rows = sp.triplet_survey([(23, 83, 431)])
    text = sp.survey_to_csv(rows)
    header = text.splitlines()[0]
    assert header.split(",")[:3] == ["p1", "p2", "p3"]
    assert "23" in text


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.2, max_value=1.4), st.floats(min_value=0.1, max_value=8.0))
def test_prop_log_spiral_arc_additive(phi, theta):
    s = sp.LogSpiral(phi)
    mid = theta / 2.0
    whole = s.arc_length(theta)
    parts = s.arc_length(mid) + (s.arc_length(theta) - s.arc_length(mid))
    assert whole == pytest.approx(parts, rel=1e-12)
    assert s.arc_length(theta) > s.arc_length(mid)
