import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primeweb import sequences as seq
from primeweb.engine import is_prime
from primeweb.filters import make_filter


@pytest.fixture(scope="module")
def pflt(engine):
    return make_filter("P", engine)


@pytest.fixture(scope="module")
def pmatrix(pflt):
    return seq.build_matrix(pflt, 12, 5, value_bound=10**7)


def test_extend_ray_first_row(pflt):
    ray = seq.extend_ray(pflt, 1, 7)
    assert ray.values == [2, 3, 5, 11, 31, 127, 709]


def test_extend_ray_rejects_member(pflt):
    with pytest.raises(ValueError):
        seq.extend_ray(pflt, 7, 3)


def test_ray_signed_listing(pflt):
    ray = seq.extend_ray(pflt, 4, 3)
    assert ray.element(2) == 17
    assert ray.element(0) == 4
    listing = ray.signed_listing()
    assert listing[0] < 0 or 4 in listing  # generator present at depth 0


def test_depth_compose(pflt):
    ray = seq.extend_ray(pflt, 1, 3)
    assert seq.depth_compose(pflt, ray, 2, 3) == seq.extend_ray(pflt, 1, 5).element(5)
    assert seq.depth_compose(pflt, ray, 0, 2) == 3


def test_matrix_corner_values(pmatrix):
    assert pmatrix.value_at(1, 1) == 2
    assert pmatrix.value_at(4, 2) == 17
    assert pmatrix.value_at(12, 3) == 919


def test_matrix_row_for_missing(pmatrix):
    with pytest.raises(KeyError):
        pmatrix.row_for(7)


def test_matrix_csv_json_round(pmatrix):
    csv_text = pmatrix.to_csv()
    assert csv_text.splitlines()[1].startswith("1,2,3,5,11")
    d = json.loads(pmatrix.to_json())
    assert d["rows"][0]["values"][0] == 2
    assert d["rows"][0]["addresses"][0] == {"generator": 1, "depth": 1, "value": 2}


@pytest.mark.parametrize("filter_id", ["P", "T1", "S", "D6n-1", "D6n+1", "H"])
def test_partition_small(engine, filter_id):
    flt = make_filter(filter_id, engine)
    rep = seq.verify_partition(flt, 20000)
    assert rep["exact"], rep["problems"][:3]


def test_partition_addresses_unique(engine):
    flt = make_filter("P", engine)
    rep = seq.verify_partition(flt, 5000)
    placed = [v for row in rep["rays"].values() for v in row]
    assert sorted(placed) == flt.members_upto(5000).tolist()


def test_interval_identity_examples(pflt, pmatrix):
    r = seq.interval_count_identity(pflt, pmatrix, (1, 4), (4, 3))
    assert r["ok"] and r["below_first_ok"]
    r2 = seq.interval_count_identity(pflt, pmatrix, (6, 2), (9, 2))
    assert r2["ok"]


def test_interval_identity_random_pairs(pflt, pmatrix):
    rng = random.Random(7)
    addrs = [(g, d) for g in [1, 4, 6, 8, 9, 10, 12] for d in (1, 2, 3, 4)]
    for _ in range(150):
        a1, a2 = rng.sample(addrs, 2)
        r = seq.interval_count_identity(pflt, pmatrix, a1, a2)
        assert r["ok"] and r["below_first_ok"], (a1, a2)


def test_row_isomorphism(pflt):
    # g_n(1) -> g_n(a0) matches direct materialization
    assert seq.row_isomorphism(pflt, 4, 3) == 59
    assert seq.row_isomorphism(pflt, 6, 2) == 41


def test_composite_segments(engine):
    segs = seq.composite_segments(engine, 30)
    first = segs[0]
    assert (first.left_ghost, first.right_ghost) == (2, 3)
    assert first.length == 0
    s4 = next(s for s in segs if s.left_ghost == 7)
    assert list(s4.members) == [8, 9, 10]


def test_clusters_union(engine):
    rep = seq.clusters(engine, 200)
    assert rep["union_ok"]
    assert rep["covered_count"] == rep["expected_count"]


def test_classify_twins_worked_examples(engine):
    twins = {t.pair: t for t in seq.classify_twins(engine, 1000)}
    assert twins[(3, 5)].kind == "special"
    assert twins[(71, 73)].kind == "u"
    assert twins[(101, 103)].kind == "u"
    assert twins[(617, 619)].kind == "b_right"
    assert twins[(617, 619)].ghost_ref == 113
    assert twins[(857, 859)].kind == "b_left"


def test_classify_twins_index_oracle(engine):
    for t in seq.classify_twins(engine, 5000):
        i1, i2 = t.indices
        assert engine.nth_prime(i1) == t.pair[0]
        p1, p2 = is_prime(i1), is_prime(i2)
        want = (
            "special" if (p1 and p2)
            else "u" if not (p1 or p2)
            else "b_right" if p1
            else "b_left"
        )
        assert t.kind == want, t


def test_multiplicative_set(pflt):
    got = seq.multiplicative_set(pflt, 1, 40)
    # powers and products of ray-1 members 2, 3, 5, 11, 31
    assert got[:8] == [2, 3, 4, 5, 6, 8, 9, 10]
    assert 22 in got and 31 in got and 7 not in got


def test_pisot_example():
    assert seq.pisot_example(5) == [3, 5, 9, 17, 33]


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=60))
def test_prop_counting_identity(m):
    # number of family members below the nth element is n - 1
    flt = make_filter("P")
    v = flt.nth(m)
    assert len(flt.members_upto(v - 1)) == m - 1
