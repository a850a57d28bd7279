"""Smooth numbers, their sumsets, and membership queries.

For N >= 1 let Pi_N be the set of positive integers all of whose prime
factors are <= N (so 1 is in Pi_N).  Sigma_{d,N} is the d-fold sumset
{m_1 + ... + m_d : m_i in Pi_N} and S_{d,N} is the union of Sigma_{t,N}
over 1 <= t <= d, i.e. the numbers expressible as a sum of at most d
N-smooth numbers.  In particular S_{2,N} = Pi_N u (Pi_N + Pi_N).

The membership test is the hot path of the rigidity searches, so it is
memoized; the SieveTable gives an independent dynamic-programming route
to the same sets, used as a cross-check.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

EXACT_SUM_LIMIT = 10 ** 5  # partial sums are exact rationals up to here


class LimitExhausted(Exception):
    """Raised when a search runs out of room below its stated limit."""


# -- primes and factorization -------------------------------------------------


@lru_cache(maxsize=None)
def primes_upto(n: int) -> Tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    p = 2
    while p * p <= n:
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
        p += 1
    return tuple(i for i in range(2, n + 1) if sieve[i])


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorint(n: int) -> Dict[int, int]:
    """Prime factorization by trial division; fine for the index sizes here."""
    assert n >= 1
    out: Dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for q in (d, d + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- smoothness ---------------------------------------------------------------


def is_smooth(m: int, N: int) -> bool:
    """True iff every prime factor of m is <= N (1 is smooth)."""
    assert m >= 1
    for p in primes_upto(N):
        while m % p == 0:
            m //= p
        if m == 1:
            return True
    return m == 1


_smooth_master: Dict[int, Tuple[int, Tuple[int, ...]]] = {}


def _smooth_list(N: int, at_least: int) -> Tuple[int, ...]:
    """The cached master list of N-smooth numbers, grown to cover at_least."""
    cur = _smooth_master.get(N)
    if cur is None or cur[0] < at_least:
        limit = max(at_least, cur[0] * 2 if cur else 1)
        out = [1]
        for p in primes_upto(N):
            out = sorted(q * p ** k for q in out for k in range(_log_cap(p, limit, q) + 1))
        _smooth_master[N] = (limit, tuple(x for x in out if x <= limit))
    return _smooth_master[N][1]


def smooth_upto(N: int, limit: int) -> Tuple[int, ...]:
    """Sorted N-smooth numbers in [1, limit]."""
    from bisect import bisect_right

    lst = _smooth_list(N, limit)
    return lst[: bisect_right(lst, limit)]


def _log_cap(p: int, limit: int, q: int) -> int:
    k = 0
    v = q
    while v * p <= limit:
        v *= p
        k += 1
    return k


_in_s_memo: Dict[Tuple[int, int, int, int], bool] = {}


def reset_memo():
    _in_s_memo.clear()


def in_s(m: int, d: int, N: int) -> bool:
    """True iff m is a sum of at most d N-smooth numbers (membership in S_{d,N})."""
    assert m >= 1 and d >= 1
    return _sum_of_smooth(m, d, m, N)


def _sum_of_smooth(m: int, d: int, cap: int, N: int) -> bool:
    # is m a sum of 1..d smooth parts, each part <= cap?
    # Normalization: the largest part is >= ceil(m/d), so only those are tried.
    key = (m, d, cap, N)
    hit = _in_s_memo.get(key)
    if hit is not None:
        return hit
    from bisect import bisect_right

    smooth = _smooth_list(N, m)
    hi = bisect_right(smooth, min(cap, m))
    lo = -(-m // d)  # ceil
    ans = False
    for i in range(hi - 1, -1, -1):
        a = smooth[i]
        if a < lo:
            break
        if a == m:
            ans = True
            break
        if d >= 2 and _sum_of_smooth(m - a, d - 1, a, N):
            ans = True
            break
    _in_s_memo[key] = ans
    return ans


def in_sigma(m: int, t: int, N: int) -> bool:
    """True iff m is a sum of exactly t N-smooth numbers."""
    assert m >= 1 and t >= 1
    return _sigma_rest(m, t, m, N)


@lru_cache(maxsize=None)
def _sigma_rest(m: int, t: int, cap: int, N: int) -> bool:
    # m as exactly t smooth parts, each <= cap
    if t == 1:
        return m <= cap and is_smooth(m, N)
    if m < t:
        return False
    lo = -(-m // t)
    for a in reversed(smooth_upto(N, min(cap, m - t + 1))):
        if a < lo:
            break
        if _sigma_rest(m - a, t - 1, a, N):
            return True
    return False


def min_parts(m: int, N: int) -> int:
    """Least t with m a sum of t N-smooth numbers (at most m, via all ones)."""
    t = 1
    while not in_sigma(m, t, N):
        t += 1
    return t


class SieveTable:
    """Bitmask tables for Pi_N and Sigma_{t,N} (t <= d) up to a limit.

    Bit m of sigma[t-1] is set iff m is a sum of exactly t N-smooth numbers.
    Built once by shifted-or dynamic programming; serves as a brute-force
    oracle independent of the recursive in_s path.
    """

    def __init__(self, N: int, d: int, limit: int):
        assert N >= 1 and d >= 1 and limit >= 1
        self.N, self.d, self.limit = N, d, limit
        smooths = smooth_upto(N, limit)
        pi = 0
        for m in smooths:
            pi |= 1 << m
        self.sigma: List[int] = [pi]
        cut = (1 << (limit + 1)) - 1
        for _ in range(2, d + 1):
            prev = self.sigma[-1]
            nxt = 0
            for a in smooths:
                nxt |= (prev << a) & cut
            self.sigma.append(nxt)

    def in_pi(self, m: int) -> bool:
        return 1 <= m <= self.limit and bool(self.sigma[0] >> m & 1)

    def in_sigma(self, m: int, t: int) -> bool:
        assert 1 <= t <= self.d
        return 1 <= m <= self.limit and bool(self.sigma[t - 1] >> m & 1)

    def in_s(self, m: int, d: int = None) -> bool:
        d = self.d if d is None else d
        return any(self.in_sigma(m, t) for t in range(1, d + 1))

    def s_mask(self, d: int = None) -> int:
        d = self.d if d is None else d
        out = 0
        for t in range(d):
            out |= self.sigma[t]
        return out

    def sigma_members(self, t: int) -> List[int]:
        # scan set bits via the lowest-bit trick; never reshift the full mask
        mask = self.sigma[t - 1] >> 1
        out = []
        pos = 1
        while mask:
            tz = (mask & -mask).bit_length() - 1
            pos += tz
            out.append(pos)
            mask >>= tz + 1
            pos += 1
        return out


def primes_not_in(N: int, count: int, limit: int) -> List[int]:
    """The first `count` primes p <= limit with p not in S_{2,N}, ascending."""
    assert count >= 1
    out = []
    for p in primes_upto(limit):
        if not in_s(p, 2, N):
            out.append(p)
            if len(out) == count:
                return out
    raise LimitExhausted(
        "only %d primes outside S_{2,%d} found below %d" % (len(out), N, limit)
    )


def partial_sum_bound(d: int, N: int, limit: int) -> Tuple[Fraction, Fraction]:
    """Partial sum of 1/m over Sigma_{d,N} up to limit, and the convergence bound.

    The bound is (1/d) * (prod over primes p <= N of 1/(1 - p^(-1/d)))^d.
    The partial sum is exact up to EXACT_SUM_LIMIT and rounded upward beyond,
    while the bound is rounded downward, so `partial < bound` is conservative.
    """
    assert d >= 1 and N >= 1
    table = SieveTable(N, d, limit)
    members = table.sigma_members(d)
    head = [m for m in members if m <= EXACT_SUM_LIMIT]
    tail = 0.0
    for m in members:
        if m > EXACT_SUM_LIMIT:
            tail += 1.0 / m
    exact = _reciprocal_sum(head, 0, len(head)) if head else Fraction(0)
    # pad the float tail upward by one ulp per term
    partial = exact + Fraction(tail * (1 + 1e-12) + (1e-300 if tail else 0))
    prod = 1.0
    for p in primes_upto(N):
        prod *= 1.0 / (1.0 - p ** (-1.0 / d))
    bound = Fraction(prod ** d / d * (1 - 1e-9))
    return partial, bound


def _reciprocal_sum(ms, lo, hi) -> Fraction:
    # balanced summation keeps the gcd work near-linear in the output size
    if hi - lo == 1:
        return Fraction(1, ms[lo])
    mid = (lo + hi) // 2
    return _reciprocal_sum(ms, lo, mid) + _reciprocal_sum(ms, mid, hi)
