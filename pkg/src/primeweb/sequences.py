"""Counting progressions over filtered families and their row-stacked matrices.

A ray from generator a0 iterates the nth-element map g of a family A:
a(n+1) = g(a(n)). Rays from all generators B-bar = {1} union (N \\ A)
partition A; stacking them by ascending generator gives the family matrix.
Signed depths extend each ray to an infinite cyclic group via
g_{-n}(a0) = -g_n(a0).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .engine import PrimeIndexer
from .errors import NotAMemberError, RangeError
from .filters import FilterSet


@dataclass
class Ray:
    """One progression row: values at positive depths 1..len(values)."""

    filter_id: str
    generator: int
    values: list[int]

    def element(self, depth: int) -> int:
        """Signed-depth element; negative depths mirror positive ones."""
        if depth == 0:
            return self.generator
        k = abs(depth)
        if k > len(self.values):
            raise RangeError(
                f"depth {depth} not materialized (have {len(self.values)})"
            )
        v = self.values[k - 1]
        return v if depth > 0 else -v

    def signed_listing(self) -> list[int]:
        """The materialized cyclic-group slice ..., -a2, -a1, a0, a1, a2, ..."""
        neg = [-v for v in reversed(self.values)]
        return neg + [self.generator] + list(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class MesmMatrix:
    """Rays keyed by ascending generator; rows partition the family."""

    filter_id: str
    rows: list[Ray]
    coverage_bound: int = 0
    value_bound: int | None = None

    def row_for(self, generator: int) -> Ray:
        for r in self.rows:
            if r.generator == generator:
                return r
        raise KeyError(f"no row with generator {generator}")

    def value_at(self, generator: int, depth: int) -> int:
        return self.row_for(generator).element(depth)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["generator", "values..."])
        for r in self.rows:
            w.writerow([r.generator, *r.values])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "filter_id": self.filter_id,
                "coverage_bound": self.coverage_bound,
                "value_bound": self.value_bound,
                "rows": [
                    {
                        "generator": r.generator,
                        "values": r.values,
                        "addresses": [
                            {"generator": r.generator, "depth": d + 1, "value": v}
                            for d, v in enumerate(r.values)
                        ],
                    }
                    for r in self.rows
                ],
            },
            indent=1,
        )


@dataclass
class CompositeSegment:
    """Composites strictly between consecutive primes, with ghost ends.

    Ghosts are references to the bounding primes, kept distinct from the
    composite members themselves.
    """

    index: int  # mu: segment sits between p(mu) and p(mu+1)
    left_ghost: int  # p(mu), as a reference
    right_ghost: int  # p(mu+1), as a reference
    members: range = field(default=range(0))

    @property
    def length(self) -> int:
        return len(self.members)


@dataclass
class TwinClassification:
    pair: tuple[int, int]
    kind: str  # "u", "b_left", "b_right", "special"
    indices: tuple[int, int]
    segment_index: int | None = None
    ghost_ref: int | None = None


# -- ray and matrix construction -------------------------------------------


def nth_element(flt: FilterSet, n: int) -> int:
    return flt.nth(n)


def element_index(flt: FilterSet, a: int) -> int:
    return flt.index_of(a)


def extend_ray(flt: FilterSet, a0: int, depth: int) -> Ray:
    """Materialize a(1)..a(depth) from generator a0 by iterating nth."""
    if flt.contains(a0):
        raise ValueError(f"{a0} lies in {flt.filter_id}; generators come from B-bar")
    values = []
    cur = a0
    for _ in range(depth):
        cur = flt.nth(cur)
        values.append(cur)
    return Ray(flt.filter_id, a0, values)


def depth_compose(flt: FilterSet, ray: Ray, n1: int, n2: int) -> int:
    """g_{n1}(g_{n2}(a0)) = g_{n1+n2}(a0), materializing if needed."""
    total = n1 + n2
    k = abs(total)
    while k > len(ray.values):
        prev = ray.values[-1] if ray.values else ray.generator
        ray.values.append(flt.nth(prev))
    return ray.element(total)


def build_matrix(
    flt: FilterSet,
    row_count: int,
    col_count: int,
    value_bound: int | None = None,
) -> MesmMatrix:
    """Row-stacked rays for the first row_count generators.

    Columns are filled breadth-first so each step is one batched
    order-statistic pass. A value_bound truncates rows early; truncated
    rows simply hold fewer columns.
    """
    gens = flt.generators(row_count)
    rows = {g: [] for g in gens}
    frontier = {g: g for g in gens}
    for _ in range(col_count):
        live = {g: v for g, v in frontier.items() if v is not None}
        if not live:
            break
        got = flt.nth_batch(sorted(set(live.values())))
        for g, v in live.items():
            nxt = got[v]
            if value_bound is not None and nxt > value_bound:
                frontier[g] = None
                continue
            rows[g].append(nxt)
            frontier[g] = nxt
    return MesmMatrix(
        flt.filter_id,
        [Ray(flt.filter_id, g, rows[g]) for g in gens],
        value_bound=value_bound,
    )


# -- partition and identities ----------------------------------------------


def verify_partition(flt: FilterSet, bound: int) -> dict:
    """Address every family member <= bound on exactly one ray.

    Walking v -> index_of(v) strictly decreases, so each member reaches a
    generator in B-bar in finitely many steps; the walk result is then
    cross-checked by re-running nth forward from each generator.
    """
    members = flt.members_upto(bound)
    member_list = members.tolist()
    mset = members
    def idx_of(v: int) -> int:
        pos = int(np.searchsorted(mset, v))
        return pos + 1
    def in_family(v: int) -> bool:
        pos = int(np.searchsorted(mset, v))
        return pos < len(mset) and int(mset[pos]) == v
    addresses: dict[int, tuple[int, int]] = {}
    rays: dict[int, list[int]] = {}
    for v in member_list:
        cur, depth = v, 0
        chain = []
        while True:
            i = idx_of(cur)
            depth += 1
            chain.append(cur)
            if i == 1 or not in_family(i):
                gen = i
                break
            cur = i
        addresses[v] = (gen, depth)
        rays.setdefault(gen, [])
    for v, (g, d) in addresses.items():
        row = rays[g]
        while len(row) < d:
            row.append(0)
        row[d - 1] = v
    # forward cross-check: nth re-applied from the generator walks the ray
    exact = True
    problems = []
    for g, row in sorted(rays.items()):
        cur = g
        for d, v in enumerate(row, start=1):
            if cur > len(mset):
                exact = False
                problems.append((g, d, v, "index beyond scanned members"))
                break
            cur = int(mset[cur - 1])
            if cur != v:
                exact = False
                problems.append((g, d, v, cur))
                break
    counted = sum(len(r) for r in rays.values())
    if counted != len(member_list):
        exact = False
        problems.append(("count", counted, len(member_list)))
    return {
        "filter_id": flt.filter_id,
        "bound": bound,
        "member_count": len(member_list),
        "ray_count": len(rays),
        "exact": exact,
        "addresses": addresses,
        "rays": rays,
        "problems": problems,
    }


def interval_count_identity(
    flt: FilterSet, matrix: MesmMatrix, addr1: tuple[int, int], addr2: tuple[int, int]
) -> dict:
    """Members strictly between two addressed values vs index difference.

    The count between a_{mu1 nu1} and a_{mu2 nu2} equals
    |a_{mu1 (nu1-1)} - a_{mu2 (nu2-1)}| - 1, since each value's index is
    its ray predecessor.
    """
    if addr1 == addr2:
        raise ValueError("identical addresses are degenerate for this identity")
    (g1, d1), (g2, d2) = addr1, addr2
    if d1 < 1 or d2 < 1:
        raise ValueError("depths must be >= 1")
    v1 = matrix.value_at(g1, d1)
    v2 = matrix.value_at(g2, d2)
    prev1 = matrix.value_at(g1, d1 - 1)
    prev2 = matrix.value_at(g2, d2 - 1)
    lo, hi = sorted((v1, v2))
    between = len(flt.members_in_range(lo + 1, hi))
    predicted = abs(prev1 - prev2) - 1
    # the single-address variant: members below a value = predecessor - 1
    below_v1 = len(flt.members_upto(v1 - 1))
    return {
        "values": (v1, v2),
        "between": between,
        "predicted": predicted,
        "ok": between == predicted,
        "below_first": below_v1,
        "below_first_predicted": prev1 - 1,
        "below_first_ok": below_v1 == prev1 - 1,
    }


def row_isomorphism(flt: FilterSet, a0: int, n: int) -> int:
    """Map g_n(1) to g_n(a0): strip depth down ray 1, re-apply from a0."""
    if a0 <= 1:
        raise ValueError("a0 must be a generator greater than 1")
    if n == 0:
        return a0
    base = extend_ray(flt, 1, n)
    # walk the depth back off the first ray, confirming the address ...
    cur = base.element(n)
    for _ in range(n):
        cur = flt.index_of(cur)
    if cur != 1:
        raise NotAMemberError(f"{base.element(n)} did not resolve to generator 1")
    # ... then re-apply the same depth from a0
    return extend_ray(flt, a0, n).element(n)


# -- composite segments, clusters, twins ------------------------------------


def composite_segments(engine: PrimeIndexer, bound: int) -> list[CompositeSegment]:
    """Segments m-bar_mu between consecutive primes with p(mu+1) <= bound."""
    primes = engine.primes_upto(bound)
    out = []
    for mu in range(1, len(primes)):
        lo, hi = int(primes[mu - 1]), int(primes[mu])
        out.append(
            CompositeSegment(
                index=mu, left_ghost=lo, right_ghost=hi, members=range(lo + 1, hi)
            )
        )
    return out


def clusters(engine: PrimeIndexer, bound: int) -> dict:
    """Prime clusters c_mu = p(m-bar_mu) and the completed-union check.

    Completed clusters add the ghost images p(p(mu)); their union must
    reproduce every prime p(n), 2 <= n <= last index, exactly once apart
    from the shared ghosts at segment junctions.
    """
    segs = composite_segments(engine, bound)
    top = segs[-1].right_ghost
    primes = engine.primes_upto(engine.nth_prime(top))
    def p(n: int) -> int:
        return int(primes[n - 1])
    cluster_map = {}
    for s in segs:
        cluster_map[s.index] = [p(m) for m in s.members]
    covered = []
    for s in segs:
        covered.extend(cluster_map[s.index])
        covered.append(p(s.right_ghost))  # ghost image closes the junction
    covered = sorted(set(covered + [p(segs[0].left_ghost)]))
    expected = [p(n) for n in range(2, top + 1)]
    return {
        "bound": bound,
        "clusters": cluster_map,
        "segments": segs,
        "union_ok": covered == expected,
        "covered_count": len(covered),
        "expected_count": len(expected),
    }


def classify_twins(engine: PrimeIndexer, bound: int) -> list[TwinClassification]:
    """Classify every twin pair <= bound by the primality of its indices.

    A pair is u when both indices are in B-bar (neither index is prime);
    b_right / b_left when exactly the first / second index is prime. The
    pair (3, 5) with indices (2, 3) is the unique both-prime case.
    """
    primes = engine.primes_upto(bound)
    gaps = np.diff(primes)
    pos = np.nonzero(gaps == 2)[0]  # 0-based index of t1; prime index = pos+1
    pset = primes
    def is_p(v: int) -> bool:
        j = int(np.searchsorted(pset, v))
        return j < len(pset) and int(pset[j]) == v
    out = []
    for j in pos.tolist():
        t1, t2 = int(primes[j]), int(primes[j + 1])
        i1, i2 = j + 1, j + 2
        p1, p2 = is_p(i1), is_p(i2)
        if p1 and p2:
            out.append(TwinClassification((t1, t2), "special", (i1, i2)))
            continue
        if not p1 and not p2:
            mu = int(np.searchsorted(pset, i1)) # p(mu) < i1 composite < p(mu+1)
            out.append(TwinClassification((t1, t2), "u", (i1, i2), segment_index=mu))
        elif p1:
            out.append(
                TwinClassification((t1, t2), "b_right", (i1, i2), ghost_ref=i1)
            )
        else:
            out.append(
                TwinClassification((t1, t2), "b_left", (i1, i2), ghost_ref=i2)
            )
    return out


def multiplicative_set(flt: FilterSet, m: int, bound: int) -> list[int]:
    """All products of powers of ray-m members not exceeding bound."""
    ray_primes = []
    cur = m
    while True:
        cur = flt.nth(cur)
        if cur > bound:
            break
        ray_primes.append(cur)
    out = set()
    def grow(i: int, prod: int):
        if prod > 1:
            out.add(prod)
        for j in range(i, len(ray_primes)):
            nxt = prod * ray_primes[j]
            if nxt > bound:
                break
            grow(j, nxt)
    grow(0, 1)
    return sorted(out)


def pisot_example(depth: int) -> list[int]:
    """Odd-number counting progression from a0 = 2: g(n) = 2n - 1."""
    values = []
    cur = 2
    for _ in range(depth):
        cur = 2 * cur - 1
        values.append(cur)
    return values
