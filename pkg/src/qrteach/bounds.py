"""Bounds on minimal S_k tournament orders, and searches for witnesses.

Every inequality is decided in exact integer arithmetic. The probabilistic
conditions have the shape ``c * C(n,k) * (1 - 2^-k)^(n-k) < 1``; multiplying
through by ``2^(k(n-k))`` turns them into integer comparisons. Once those
integers pass ~20k bits the same comparison is made on 60-digit correctly
rounded logarithms, falling back to integers if the margin is ever tiny.
"""

import decimal
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels, sk
from .errors import BudgetExceeded, DomainError
from .qr import is_prime
from .tournament import Tournament, random_adjacency

ENUMERATION_CAP_BITS = 28  # at most 2^28 orientations, i.e. n <= 8
BOUNDS_K_MAX = 16
EXACT_BITS = 20000  # past this the comparison switches to 60-digit logs
CSV_COLUMNS = ("k", "lower", "f_upper", "F_upper", "qr_threshold")


def lower_bound(k):
    """2^(k-1) (k+2) - 1."""
    if k < 1:
        raise DomainError("k must be at least 1")
    return 2 ** (k - 1) * (k + 2) - 1


def _random_inequality(n, k, factor):
    # factor * C(n,k) * (2^k - 1)^(n-k) < 2^(k(n-k))
    if k * (n - k) <= EXACT_BITS:
        return factor * math.comb(n, k) * (2**k - 1) ** (n - k) < 2 ** (k * (n - k))
    # same comparison in log space; Decimal ln is correctly rounded, so at 60
    # digits the accumulated error is far below the margin we demand
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        D = decimal.Decimal
        value = D(factor).ln() + (n - k) * (D(2**k - 1).ln() - k * D(2).ln())
        for i in range(k):
            value += D(n - i).ln() - D(i + 1).ln()
        if abs(value) < D("1e-40"):
            return factor * math.comb(n, k) * (2**k - 1) ** (n - k) < 2 ** (k * (n - k))
        return value < 0


def _log_guess(k, factor):
    # float estimate of the threshold; only a starting point for the exact walk
    def g(n):
        return (math.log(factor) + math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                + (n - k) * math.log1p(-(2.0**-k)))

    lo, hi = k, k + 1
    while g(hi) >= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if g(mid) < 0:
            hi = mid
        else:
            lo = mid
    return hi


def _first_n(k, factor):
    # the log of the left side is concave in n and not negative at n = k, so
    # the n satisfying the inequality form a ray [N, inf); walk from the
    # estimate until N is pinned by a true at N and a false at N - 1
    n = _log_guess(k, factor)
    while not _random_inequality(n, k, factor):
        n += 1
    while n - 1 > k and _random_inequality(n - 1, k, factor):
        n -= 1
    return n


def f_upper(k):
    """Smallest n >= k with C(n,k) (1 - 2^-k)^(n-k) < 1."""
    if k < 1:
        raise DomainError("k must be at least 1")
    return _first_n(k, 1)


def F_upper(k):
    """Same scan with the extra 2^k factor for the sign patterns."""
    if k < 1:
        raise DomainError("k must be at least 1")
    return _first_n(k, 2**k)


def prob_condition(n, k):
    """2^(k+1) C(n,k+1) (1 - 2^-(k+1))^(n-k-1) < 1, decided exactly."""
    if not n > k + 1 >= 2:
        raise DomainError(f"need n > k + 1 >= 2, got n={n}, k={k}")
    return _random_inequality(n, k + 1, 2 ** (k + 1))


def qr_threshold(k):
    return k * k * 2 ** (2 * k - 2)


def qr_threshold_prime(k):
    """Smallest prime p ≡ 3 (mod 4) with p > k^2 2^(2k-2)."""
    if k < 1:
        raise DomainError("k must be at least 1")
    p = qr_threshold(k) + 1
    while not (p % 4 == 3 and is_prime(p)):
        p += 1
    return p


def tdmin_lb_random(n):
    """log n - 2 log log(2n) - 2, base-2 logs."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    inner = math.log2(2 * n)
    if inner <= 0:
        raise DomainError("log(2n) must be positive")
    return math.log2(n) - 2 * math.log2(inner) - 2


def tdmin_lb_qr(p):
    """(1/2) log p - log log p - 1, base-2 logs."""
    if p < 3:
        raise DomainError(f"need p >= 3, got {p}")
    inner = math.log2(p)
    if inner <= 0:
        raise DomainError("log p must be positive")
    return 0.5 * inner - math.log2(inner) - 1


@dataclass(frozen=True)
class BoundsRow:
    k: int
    lower: int
    f_upper: int
    F_upper: int
    qr_threshold: int

    def as_tuple(self):
        return (self.k, self.lower, self.f_upper, self.F_upper, self.qr_threshold)


def bounds_row(k):
    return BoundsRow(k, lower_bound(k), f_upper(k), F_upper(k), qr_threshold_prime(k))


def bounds_table(k_max):
    if not 1 <= k_max <= BOUNDS_K_MAX:
        raise DomainError(f"k_max must be in 1..{BOUNDS_K_MAX}")
    return [bounds_row(k) for k in range(1, k_max + 1)]


def bounds_csv(rows):
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(str(v) for v in row.as_tuple()) for row in rows]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    order: int
    witness: Optional[Tournament]
    trials_or_count: int
    exhaustive: bool
    variant: str = sk.STRONG
    k: int = 1
    m: int = 1

    def as_dict(self):
        return {
            "found": self.found,
            "order": self.order,
            "variant": self.variant,
            "k": self.k,
            "m": self.m,
            "trials_or_count": self.trials_or_count,
            "exhaustive": self.exhaustive,
            "witness_edges": self.witness.edges() if self.witness is not None else None,
        }


def _recheck(t, variant, k, m=1):
    verdict = sk.check_property(t, variant, k, m)
    if not verdict.holds:
        raise AssertionError(f"search witness failed re-verification: {verdict}")


def exhaustive_min_order(k, variant, n_max, *, symmetry_cut=None, threads=None, backend=None):
    """Enumerate every orientation of order n = k+1, k+2, ... up to n_max.

    ``symmetry_cut`` keeps only orientations where vertex 0 beats exactly
    {1..d} for some d. Every tournament is isomorphic to one of those, so the
    cut is sound. By default it is on only above order 6.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    if variant not in (sk.WEAK, sk.STRONG):
        raise ValueError(f"exhaustive search supports weak/strong, not {variant!r}")
    if math.comb(n_max, 2) > ENUMERATION_CAP_BITS:
        raise BudgetExceeded(f"n_max = {n_max} needs 2^{math.comb(n_max, 2)} orientations, cap is 2^{ENUMERATION_CAP_BITS}")
    strong = variant == sk.STRONG
    tested_total = 0
    for n in range(k + 1, n_max + 1):
        cut = n > 6 if symmetry_cut is None else symmetry_cut
        mask, tested = _enumerate(n, k, strong, cut, threads, backend)
        tested_total += tested
        if mask >= 0:
            witness = Tournament(kernels.mask_to_adjacency(n, mask))
            _recheck(witness, variant, k)
            return SearchOutcome(True, n, witness, tested_total, True, variant, k)
    return SearchOutcome(False, n_max, None, tested_total, True, variant, k)


def _enumerate(n, k, strong, cut, threads, backend):
    total = 1 << math.comb(n, 2)
    threads = max(1, threads or sk.default_threads())
    if threads == 1 or total < 1 << 16:
        return kernels.enumerate_orientations(n, k, strong, 0, total, cut, backend)
    spans = np.linspace(0, total, threads + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(
            pool.map(
                lambda s: kernels.enumerate_orientations(n, k, strong, int(s[0]), int(s[1]), cut, backend),
                zip(spans[:-1], spans[1:]),
            )
        )
    # smallest mask wins; shards are in mask order so the first hit is it
    tested = 0
    for mask, shard_tested in results:
        if mask >= 0:
            return mask, tested + shard_tested
        tested += shard_tested
    return -1, tested


def random_search(n, k, variant, m=1, trials=100, seed=0):
    """Draw up to ``trials`` random tournaments from one seeded generator.

    Returns the first draw with the requested property.
    """
    if not n > k >= 1:
        raise DomainError(f"need n > k >= 1, got n={n}, k={k}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if variant != sk.STRONG_M:
        m = 1
    rng = np.random.default_rng(seed)
    for trial in range(1, trials + 1):
        t = Tournament(random_adjacency(n, rng), _trusted=True)
        if sk.check_property(t, variant, k, m).holds:
            return SearchOutcome(True, n, t, trial, False, variant, k, m)
    return SearchOutcome(False, n, None, trials, False, variant, k, m)
