"""Exact prime arithmetic: sieving, counting, nth prime, primality, Moebius.

The indexer combines three exact routes that cross-check each other:

* a segmented Eratosthenes sieve (numpy bitmap blocks) for enumeration
  and for counting below a configurable threshold,
* a sublinear prime-counting recursion for pi(x) far beyond sieve reach,
* an inverse-count-then-local-sieve path for the nth prime.

All answers are exact; nothing probabilistic is used inside the
supported range.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, NotAMemberError, RangeError

# Strong-pseudoprime witnesses proven sufficient below 3.3e24,
# far beyond the 2^46 default hard limit.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

DEFAULT_HARD_LIMIT = 1 << 46


def is_prime(x: int) -> bool:
    """Deterministic primality for x >= 0 (valid far beyond 2^46)."""
    if x < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if x == p:
            return True
        if x % p == 0:
            return False
    d = x - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        t = pow(a, d, x)
        if t == 1 or t == x - 1:
            continue
        for _ in range(r - 1):
            t = t * t % x
            if t == x - 1:
                break
        else:
            return False
    return True


def mobius(k: int) -> int:
    """Moebius function by trial-division factorization."""
    if k < 1:
        raise ValueError("mobius requires k >= 1")
    if k == 1:
        return 1
    nfactors = 0
    d = 2
    while d * d <= k:
        if k % d == 0:
            k //= d
            if k % d == 0:
                return 0
            nfactors += 1
        else:
            d += 1 if d == 2 else 2
    if k > 1:
        nfactors += 1
    return -1 if nfactors % 2 else 1


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as int64."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass
class SieveBlock:
    """Primality bitmap for the integer range [lo, lo + len(flags))."""

    lo: int
    flags: np.ndarray

    def primes(self) -> np.ndarray:
        return self.lo + np.flatnonzero(self.flags).astype(np.int64)


def _lucy_pi(x: int) -> int:
    """pi(x) by the sieve-of-counts recursion, O(x^{3/4}) vectorized.

    Maintains S(v) = #{n <= v : n survives sieving by primes seen so far}
    for every distinct value v of x // k; after sieving by all p <= sqrt(x),
    S(x) = pi(x).
    """
    if x < 2:
        return 0
    r = math.isqrt(x)
    small = np.arange(r + 1, dtype=np.int64) - 1  # S(i) for i <= r
    ks = np.arange(1, r + 1, dtype=np.int64)
    xk = x // ks  # value whose count large[k-1] tracks
    large = xk - 1
    for p in map(int, simple_sieve(r)):
        if small[p] == small[p - 1]:
            continue  # p already composite at this stage (cannot happen for primes)
        sp = int(small[p - 1])
        p2 = p * p
        kmax = min(r, x // p2)
        if kmax >= 1:
            y = xk[:kmax] // p  # = x // (k*p)
            # y > r  =>  k*p <= r, so the count lives in `large`
            kp = ks[:kmax] * p
            over = y > r
            contrib = np.where(over, large[np.minimum(kp, r) - 1], small[np.minimum(y, r)])
            large[:kmax] -= contrib - sp
        if p2 <= r:
            i = np.arange(p2, r + 1, dtype=np.int64)
            contrib = small[i // p] - sp  # snapshot before in-place update
            small[p2:] -= contrib
    return int(large[0])


class PrimeIndexer:
    """Shared, thread-safe provider of p(n), pi(x), primality and Moebius.

    All queries are pure after construction; the internal count memo is
    guarded by a lock so the instance can be shared across threads.
    """

    def __init__(
        self,
        hard_limit: int = DEFAULT_HARD_LIMIT,
        sieve_segment_size: int = 1 << 20,
        small_limit: int = 1 << 22,
    ):
        if sieve_segment_size < 1 << 10:
            raise ValueError("sieve_segment_size too small")
        self.hard_limit = int(hard_limit)
        self.sieve_segment_size = int(sieve_segment_size)
        self._small_limit = int(small_limit)
        self._small_primes = simple_sieve(self._small_limit)
        self._count_cache: dict[int, int] = {}
        self._lock = threading.Lock()

    # -- enumeration ---------------------------------------------------

    def _check_capacity(self, x: int) -> None:
        if x > self.hard_limit:
            raise CapacityError(f"{x} exceeds hard limit {self.hard_limit}")

    def _base_primes(self, limit: int) -> np.ndarray:
        """Primes up to limit, for striking composites in [lo, hi)."""
        if limit <= self._small_limit:
            idx = np.searchsorted(self._small_primes, limit, side="right")
            return self._small_primes[:idx]
        return simple_sieve(limit)

    def sieve_block(self, lo: int, hi: int, base: np.ndarray | None = None) -> SieveBlock:
        """Primality bitmap for [lo, hi); exact, spot-checkable by trial division."""
        self._check_capacity(hi)
        n = hi - lo
        flags = np.ones(n, dtype=bool)
        if base is None:
            base = self._base_primes(math.isqrt(max(hi - 1, 0)) + 1)
        for p in map(int, base):
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                flags[start - lo :: p] = False
        for v in range(lo, min(hi, 2)):
            flags[v - lo] = False
        # values below p^2 of the largest needed base prime survive the strike
        # loop even when composite, unless struck by a smaller prime; the loop
        # above strikes every composite with a factor <= sqrt(hi), which covers
        # every composite in the range.
        return SieveBlock(lo, flags)

    def iter_blocks(self, lo: int, hi: int):
        """Yield SieveBlocks covering [lo, hi) in order."""
        self._check_capacity(hi)
        base = self._base_primes(math.isqrt(max(hi - 1, 0)) + 1)
        step = self.sieve_segment_size
        for start in range(lo, hi, step):
            yield self.sieve_block(start, min(start + step, hi), base)

    def primes_in_range(self, lo: int, hi: int) -> list[int]:
        """Exactly the primes p with lo <= p < hi, ascending."""
        if not 0 <= lo <= hi:
            raise ValueError("need 0 <= lo <= hi")
        self._check_capacity(hi)
        out: list[int] = []
        for block in self.iter_blocks(lo, hi):
            out.extend(block.primes().tolist())
        return out

    def primes_upto(self, bound: int) -> np.ndarray:
        """All primes <= bound as one array (bound must fit in memory)."""
        self._check_capacity(bound)
        if bound < 2:
            return np.empty(0, dtype=np.int64)
        if bound <= self._small_limit:
            idx = np.searchsorted(self._small_primes, bound, side="right")
            return self._small_primes[:idx]
        chunks = [b.primes() for b in self.iter_blocks(0, bound + 1)]
        return np.concatenate(chunks)

    # -- counting ------------------------------------------------------

    def prime_pi(self, x: int) -> int:
        """#{p prime : p <= x}; sublinear above the small-sieve range."""
        if x < 0:
            raise ValueError("prime_pi needs x >= 0")
        self._check_capacity(x)
        if x <= self._small_limit:
            return int(np.searchsorted(self._small_primes, x, side="right"))
        with self._lock:
            hit = self._count_cache.get(x)
        if hit is not None:
            return hit
        val = _lucy_pi(x)
        with self._lock:
            self._count_cache[x] = val
        return val

    def prime_pi_sieve(self, x: int) -> int:
        """Independent pi(x) by direct segmented sieving (cross-check route)."""
        if x < 0:
            raise ValueError("prime_pi_sieve needs x >= 0")
        self._check_capacity(x)
        total = 0
        for block in self.iter_blocks(0, x + 1):
            total += int(np.count_nonzero(block.flags))
        return total

    # -- nth prime -----------------------------------------------------

    def nth_prime(self, n: int) -> int:
        """The nth prime (n >= 1), exact.

        Uses an analytic initial guess, a sublinear count correction and
        a final local sieve, so single queries stay fast at any index the
        hard limit allows.
        """
        if n < 1:
            raise RangeError("nth_prime needs n >= 1")
        if n <= len(self._small_primes):
            return int(self._small_primes[n - 1])
        guess = self._nth_prime_guess(n)
        self._check_capacity(guess)
        # snap the guess to an exact count, then walk a local sieve
        k = self.prime_pi(guess)
        return self._walk_to_index(guess, k, n)

    def _nth_prime_guess(self, n: int) -> int:
        # inverse of the Moebius-weighted logarithmic-integral approximation
        from scipy.optimize import brentq
        from .laws import riemann_R

        ln = math.log(n)
        lo = n * (ln + math.log(ln) - 1.2)
        hi = n * (ln + math.log(ln) + 0.3)  # Dusart-style bracket, n >= 6
        try:
            x = brentq(lambda t: riemann_R(t).value - n, lo, hi, xtol=2.0)
        except ValueError:
            x = n * (ln + math.log(ln))
        return int(x)

    def _walk_to_index(self, x: int, k: int, n: int) -> int:
        """Given pi(x) = k exactly, locate p(n) by local sieving from x."""
        window = self.sieve_segment_size
        if n > k:
            lo = x + 1
            while True:
                self._check_capacity(lo + window)
                block = self.sieve_block(lo, lo + window)
                cnt = int(np.count_nonzero(block.flags))
                if k + cnt >= n:
                    pos = np.flatnonzero(block.flags)[n - k - 1]
                    return int(lo + pos)
                k += cnt
                lo += window
        else:
            hi = x + 1
            while True:
                lo = max(hi - window, 0)
                block = self.sieve_block(lo, hi)
                cnt = int(np.count_nonzero(block.flags))
                if k - cnt < n:
                    pos = np.flatnonzero(block.flags)[n - (k - cnt) - 1]
                    return int(lo + pos)
                k -= cnt
                hi = lo
                if hi == 0:
                    raise ValueError("index walk fell off the bottom")

    def nth_prime_batch(self, indices) -> dict[int, int]:
        """p(n) for every n in `indices`, via one ascending sieve pass.

        Deterministic regardless of the order of `indices`; far cheaper than
        per-index queries when many indices share one sieve pass.
        """
        wanted = sorted(set(int(n) for n in indices))
        if not wanted:
            return {}
        if wanted[0] < 1:
            raise RangeError("indices must be >= 1")
        out: dict[int, int] = {}
        # serve what the small sieve already knows
        while wanted and wanted[0] <= len(self._small_primes):
            n = wanted.pop(0)
            out[n] = int(self._small_primes[n - 1])
        if not wanted:
            return out
        nmax = wanted[-1]
        ln = math.log(nmax)
        bound = int(nmax * (ln + math.log(ln))) + 100  # upper bound, n >= 6
        self._check_capacity(bound)
        if bound > (1 << 31):
            # one sieve pass would cost more than a few sublinear queries
            for n in wanted:
                out[n] = self.nth_prime(n)
            return out
        base = self._base_primes(math.isqrt(bound) + 1)
        step = self.sieve_segment_size
        cum = 0
        pos = 0
        lo = 0
        while pos < len(wanted) and lo <= bound:
            block = self.sieve_block(lo, min(lo + step, bound + 1), base)
            cnt = int(np.count_nonzero(block.flags))
            if pos < len(wanted) and wanted[pos] <= cum + cnt:
                hits = np.flatnonzero(block.flags)
                while pos < len(wanted) and wanted[pos] <= cum + cnt:
                    n = wanted[pos]
                    out[n] = int(lo + hits[n - cum - 1])
                    pos += 1
            cum += cnt
            lo += step
        if pos < len(wanted):  # bound estimate fell short; finish one by one
            for n in wanted[pos:]:
                out[n] = self.nth_prime(n)
        return out

    # -- inverse -------------------------------------------------------

    def prime_index(self, p: int) -> int:
        """n with p(n) = p; raises NotAMemberError when p is composite."""
        self._check_capacity(p)
        if not is_prime(p):
            raise NotAMemberError(f"{p} is not prime")
        return self.prime_pi(p)

    # -- scalar helpers ------------------------------------------------

    is_prime = staticmethod(is_prime)
    mobius = staticmethod(mobius)
