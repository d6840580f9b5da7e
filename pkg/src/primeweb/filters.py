"""Filtered prime families with ordered enumeration and inverse lookup.

Each family A is a subset of the primes (or the primes themselves) given
by a deterministic condition. A FilterSet provides the nth-element map
g(n), its inverse, membership tests, and the generator base
B-bar = {1} union (N \\ A) whose elements seed the progression rows.

Enumeration streams over sieve blocks, so nth() at large indices costs
one segmented pass and no persistent cache beyond a small prefix.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import PrimeIndexer, is_prime
from .errors import CapacityError, NotAMemberError

# prefix of members kept cached; partition checks to 1e6 stay in-cache
_PREFIX_BOUND = 1 << 21
_BLOCK = 1 << 23


def _primes_array(engine: PrimeIndexer, lo: int, hi: int) -> np.ndarray:
    parts = [b.primes() for b in engine.iter_blocks(lo, hi)]
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts)


class FilterSet:
    """Ordered enumerable prime subfamily with inverse lookup."""

    filter_id = "?"

    def __init__(self, engine: PrimeIndexer | None = None):
        self.engine = engine or PrimeIndexer()
        self._prefix: np.ndarray | None = None

    # -- family-specific hooks --------------------------------------

    def contains(self, value: int) -> bool:
        raise NotImplementedError

    def members_in_range(self, lo: int, hi: int) -> np.ndarray:
        """Ascending members in [lo, hi)."""
        raise NotImplementedError

    # density model used only to size scan blocks, never for answers
    def _growth_guess(self, n: int) -> int:
        x = max(100.0, n * (math.log(n + 2) + math.log(math.log(n + 3) + 1)))
        return int(4 * x) + 1000

    # -- generic machinery --------------------------------------------

    def _prefix_members(self) -> np.ndarray:
        if self._prefix is None:
            self._prefix = self.members_in_range(1, _PREFIX_BOUND)
        return self._prefix

    def members_upto(self, bound: int) -> np.ndarray:
        if bound < _PREFIX_BOUND:
            pre = self._prefix_members()
            return pre[: int(np.searchsorted(pre, bound, side="right"))]
        parts = [self._prefix_members()]
        lo = _PREFIX_BOUND
        while lo <= bound:
            hi = min(lo + _BLOCK, bound + 1)
            parts.append(self.members_in_range(lo, hi))
            lo = hi
        return np.concatenate(parts)

    def nth(self, n: int) -> int:
        if n < 1:
            raise ValueError("index must be >= 1")
        return self.nth_batch([n])[n]

    def nth_batch(self, indices) -> dict[int, int]:
        """Order statistics for several indices in one streaming pass."""
        wanted = sorted(set(int(n) for n in indices))
        if wanted[0] < 1:
            raise ValueError("indices must be >= 1")
        out: dict[int, int] = {}
        pre = self._prefix_members()
        for n in list(wanted):
            if n <= len(pre):
                out[n] = int(pre[n - 1])
        wanted = [n for n in wanted if n not in out]
        if not wanted:
            return out
        count = len(pre)
        lo = _PREFIX_BOUND
        limit = self.engine.hard_limit
        while wanted:
            if lo > limit:
                raise CapacityError(
                    f"{self.filter_id}: enumeration passed the hard limit at index {wanted[0]}"
                )
            hi = lo + _BLOCK
            block = self.members_in_range(lo, hi)
            new = count + len(block)
            while wanted and wanted[0] <= new:
                n = wanted.pop(0)
                out[n] = int(block[n - count - 1])
            count = new
            lo = hi
        return out

    def index_of(self, value: int) -> int:
        """Inverse of nth; raises NotAMemberError off the family."""
        if not self.contains(value):
            raise NotAMemberError(f"{value} is not in {self.filter_id}")
        pre = self._prefix_members()
        if value < _PREFIX_BOUND:
            return int(np.searchsorted(pre, value, side="left")) + 1
        count = len(pre)
        lo = _PREFIX_BOUND
        while True:
            hi = lo + _BLOCK
            if value < hi:
                block = self.members_in_range(lo, value + 1)
                return count + int(np.searchsorted(block, value, side="left")) + 1
            count += len(self.members_in_range(lo, hi))
            lo = hi

    def generators(self, count: int) -> list[int]:
        """First `count` elements of B-bar = {1} union (N \\ A), ascending."""
        out = [1]
        v = 2
        while len(out) < count:
            if not self.contains(v):
                out.append(v)
            v += 1
        return out

    def generators_upto(self, bound: int) -> list[int]:
        members = set(self.members_upto(bound).tolist())
        return [1] + [v for v in range(2, bound + 1) if v not in members]


# -- concrete families ----------------------------------------------------


class PrimesFilter(FilterSet):
    """The full prime sequence; lookups delegate to the sublinear engine."""

    filter_id = "P"

    def contains(self, value: int) -> bool:
        return is_prime(value)

    def members_in_range(self, lo: int, hi: int) -> np.ndarray:
        return _primes_array(self.engine, lo, hi)

    def nth(self, n: int) -> int:
        return self.engine.nth_prime(n)

    def nth_batch(self, indices) -> dict[int, int]:
        return self.engine.nth_prime_batch(indices)

    def index_of(self, value: int) -> int:
        return self.engine.prime_index(value)


class _NeighborTwinFilter(FilterSet):
    """Families cut from the primes by the primality of p-2 / p+2."""

    # (want_lower, want_upper): required primality of p-2 and p+2; None = any
    lower: bool | None = None
    upper: bool | None = None

    def contains(self, value: int) -> bool:
        if not is_prime(value):
            return False
        lo_p = value > 2 and is_prime(value - 2)
        hi_p = is_prime(value + 2)
        if self.filter_id == "T3":
            return lo_p or hi_p
        if self.filter_id == "S":
            return not lo_p and not hi_p
        ok = True
        if self.lower is not None:
            ok &= lo_p == self.lower
        if self.upper is not None:
            ok &= hi_p == self.upper
        return ok

    def members_in_range(self, lo: int, hi: int) -> np.ndarray:
        primes = _primes_array(self.engine, max(2, lo - 2), hi + 2)
        if len(primes) == 0:
            return primes
        inside = primes[(primes >= lo) & (primes < hi)]
        # sorted-membership tests against the widened prime block; the
        # +-2 margins keep every probe inside [lo-2, hi+2)
        def has(shift):
            probe = inside + shift
            pos = np.minimum(np.searchsorted(primes, probe), len(primes) - 1)
            return primes[pos] == probe
        lo_p = has(-2) & (inside > 2)
        hi_p = has(2)
        if self.filter_id == "T3":
            keep = lo_p | hi_p
        elif self.filter_id == "S":
            keep = ~lo_p & ~hi_p
        else:
            keep = np.ones(len(inside), dtype=bool)
            if self.lower is not None:
                keep &= lo_p == self.lower
            if self.upper is not None:
                keep &= hi_p == self.upper
        return inside[keep]


class TwinFirstFilter(_NeighborTwinFilter):
    """Lower members of twin pairs: p with p+2 prime."""

    filter_id = "T1"
    upper = True


class TwinSecondFilter(_NeighborTwinFilter):
    """Upper members of twin pairs: p with p-2 prime."""

    filter_id = "T2"
    lower = True


class TwinElementsFilter(_NeighborTwinFilter):
    """All twin members: p with p-2 or p+2 prime."""

    filter_id = "T3"


class IsolatedFilter(_NeighborTwinFilter):
    """Primes with neither neighbor at distance 2 prime."""

    filter_id = "S"


class MinimalAverageTwinFilter(FilterSet):
    """Twin pairs (6q-1, 6q+1) whose average 6q has q prime.

    Members are the lower pair elements; pairs_upto exposes both.
    """

    filter_id = "T4"

    def contains(self, value: int) -> bool:
        if (value + 1) % 6:
            return False
        q = (value + 1) // 6
        return is_prime(q) and is_prime(value) and is_prime(value + 2)

    def members_in_range(self, lo: int, hi: int) -> np.ndarray:
        q_lo = max(2, (lo + 1 + 5) // 6)
        q_hi = (hi + 1 + 5) // 6
        qs = _primes_array(self.engine, q_lo, q_hi)
        vals = 6 * qs - 1
        keep = [
            i
            for i, v in enumerate(vals.tolist())
            if lo <= v < hi and is_prime(v) and is_prime(v + 2)
        ]
        return vals[keep]

    def pairs_upto(self, bound: int) -> list[tuple[int, int]]:
        return [(int(v), int(v) + 2) for v in self.members_upto(bound)]


class ResidueFilter(FilterSet):
    """Primes in a fixed residue class (Dirichlet filter alpha*n + beta)."""

    modulus = 1
    residue = 0

    def contains(self, value: int) -> bool:
        return value % self.modulus == self.residue and is_prime(value)

    def members_in_range(self, lo: int, hi: int) -> np.ndarray:
        primes = _primes_array(self.engine, lo, hi)
        return primes[primes % self.modulus == self.residue]


class D4MinusFilter(ResidueFilter):
    filter_id = "D4n-1"
    modulus, residue = 4, 3


class D4PlusFilter(ResidueFilter):
    filter_id = "D4n+1"
    modulus, residue = 4, 1


class D6MinusFilter(ResidueFilter):
    filter_id = "D6n-1"
    modulus, residue = 6, 5


class D6PlusFilter(ResidueFilter):
    filter_id = "D6n+1"
    modulus, residue = 6, 1


class _PolynomialFilter(FilterSet):
    """Primes among values of an increasing integer polynomial."""

    def _poly(self, n: int) -> int:
        raise NotImplementedError

    def _arg_range(self, lo: int, hi: int) -> range:
        raise NotImplementedError

    def members_in_range(self, lo: int, hi: int) -> np.ndarray:
        vals = []
        for n in self._arg_range(lo, hi):
            v = self._poly(n)
            if lo <= v < hi and is_prime(v):
                vals.append(v)
        return np.asarray(vals, dtype=np.int64)


class EulerPolynomialFilter(_PolynomialFilter):
    """Primes of the form n^2 + n + 41, n >= 0."""

    filter_id = "Euler"

    def contains(self, value: int) -> bool:
        if value < 41:
            return False
        # n^2 + n + 41 = v  <=>  (2n+1)^2 = 4v - 163
        d = 4 * value - 163
        r = math.isqrt(d)
        return r * r == d and r % 2 == 1 and is_prime(value)

    def _poly(self, n: int) -> int:
        return n * n + n + 41

    def _arg_range(self, lo: int, hi: int) -> range:
        start = 0 if lo <= 41 else (math.isqrt(4 * lo - 163) - 1) // 2
        stop = (math.isqrt(max(0, 4 * hi - 163)) + 1) // 2 + 2
        return range(max(0, start), stop)


class SquarePlusOneFilter(_PolynomialFilter):
    """Primes of the form n^2 + 1, n >= 1."""

    filter_id = "H"

    def contains(self, value: int) -> bool:
        if value < 2:
            return False
        r = math.isqrt(value - 1)
        return r * r == value - 1 and is_prime(value)

    def _poly(self, n: int) -> int:
        return n * n + 1

    def _arg_range(self, lo: int, hi: int) -> range:
        start = max(1, math.isqrt(max(0, lo - 1)))
        stop = math.isqrt(max(1, hi - 1)) + 2
        return range(start, stop)


FAMILIES: dict[str, type[FilterSet]] = {
    cls.filter_id: cls
    for cls in (
        PrimesFilter,
        TwinFirstFilter,
        TwinSecondFilter,
        TwinElementsFilter,
        MinimalAverageTwinFilter,
        IsolatedFilter,
        D4MinusFilter,
        D4PlusFilter,
        D6MinusFilter,
        D6PlusFilter,
        EulerPolynomialFilter,
        SquarePlusOneFilter,
    )
}


def make_filter(filter_id: str, engine: PrimeIndexer | None = None) -> FilterSet:
    try:
        cls = FAMILIES[filter_id]
    except KeyError:
        raise KeyError(f"unknown family {filter_id!r}; known: {sorted(FAMILIES)}")
    return cls(engine)
