"""Weak / strong S_k and strong S_{k,m} checks by exhaustive pattern scan.

Patterns are visited in a fixed order: sorted target tuples lexicographically,
and for each tuple the sign vectors in binary counting order with +1 as 0 and
b_1 the most significant digit. Any reported failure is the first one in that
order, whatever the backend or worker count.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DuplicateTarget, PatternTooLarge, VertexOutOfRange
from .qr import QrModulus, qr_modulus

WEAK = "weak"
STRONG = "strong"
STRONG_M = "strong-with-multiplicity"
VARIANTS = (WEAK, STRONG, STRONG_M)


def default_threads():
    try:
        return max(1, int(os.environ.get("QRTEACH_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class DominationPattern:
    targets: tuple
    signs: tuple

    def __post_init__(self):
        targets = tuple(int(a) for a in self.targets)
        signs = tuple(int(b) for b in self.signs)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "signs", signs)
        if not targets:
            raise ValueError("a pattern needs at least one target")
        if len(signs) != len(targets):
            raise ValueError("targets and signs must have equal length")
        if any(b not in (1, -1) for b in signs):
            raise ValueError(f"signs must be +1 or -1, got {signs}")
        if len(set(targets)) != len(targets):
            raise DuplicateTarget(f"targets {targets} are not distinct")

    @property
    def k(self):
        return len(self.targets)

    @classmethod
    def dominated(cls, targets):
        """All-(+1) pattern: the witness must beat every target."""
        return cls(tuple(targets), (1,) * len(targets))

    def as_dict(self):
        return {"targets": list(self.targets), "signs": list(self.signs)}


@dataclass(frozen=True)
class WitnessReport:
    pattern: DominationPattern
    witnesses: tuple

    @property
    def count(self):
        return len(self.witnesses)


@dataclass(frozen=True)
class PropertyVerdict:
    holds: bool
    variant: str
    k: int
    m: int
    failing_pattern: Optional[DominationPattern]
    min_count: int
    patterns_scanned: int = 0

    def as_dict(self):
        return {
            "holds": self.holds,
            "variant": self.variant,
            "k": self.k,
            "m": self.m,
            "failing_pattern": self.failing_pattern.as_dict() if self.failing_pattern else None,
            "min_count": self.min_count,
            "patterns_scanned": self.patterns_scanned,
        }


def _check_k(t, k):
    if k < 1:
        raise ValueError("k must be at least 1")
    if k >= t.order:
        raise PatternTooLarge(f"k = {k} needs a tournament of order > k, got {t.order}")


def witnesses(t, pattern):
    """All vertices outside the targets that realise the sign pattern."""
    _check_k(t, pattern.k)
    for a in pattern.targets:
        if not 0 <= a < t.order:
            raise VertexOutOfRange(f"target {a} not in 0..{t.order - 1}")
    adj = t.adjacency
    ok = np.ones(t.order, dtype=bool)
    for a, b in zip(pattern.targets, pattern.signs):
        ok &= adj[:, a] if b == 1 else adj[a, :]
    ok[list(pattern.targets)] = False
    return WitnessReport(pattern, tuple(int(x) for x in np.flatnonzero(ok)))


def _scan(t, k, m, strong, early_exit, threads, backend):
    n = t.order
    in_bits, out_bits = t.in_bits, t.out_bits
    # first target a_1 ranges over 0..n-k
    first_hi = n - k + 1
    threads = max(1, min(threads or default_threads(), first_hi))

    def run(lo, hi):
        return kernels.scan_patterns(in_bits, out_bits, k, m, strong, lo, hi, early_exit, backend)

    if threads == 1:
        shards = [run(0, first_hi)]
    else:
        # interleaved small chunks balance the triangular workload
        bounds = np.linspace(0, first_hi, 4 * threads + 1).astype(int)
        spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(lambda s: run(*s), spans))

    # shards are in target order: the first failing shard holds the first failure;
    # with early exit, later shards were never visited by a serial scan
    min_count = n + 1
    scanned = 0
    first = None
    for failed, combo, sign, shard_min, shard_scanned in shards:
        min_count = min(min_count, shard_min)
        scanned += shard_scanned
        if failed and first is None:
            first = (combo, sign)
            if early_exit:
                break
    if first is None:
        return None, -1, min_count, scanned
    return first[0], first[1], min_count, scanned


def _verdict(t, k, m, variant, early_exit, threads, backend):
    _check_k(t, k)
    strong = variant != WEAK
    combo, sign, min_count, scanned = _scan(t, k, m, strong, early_exit, threads, backend)
    failing = None
    if combo is not None:
        failing = DominationPattern(combo, kernels.sign_code_to_signs(sign, k))
    return PropertyVerdict(
        holds=failing is None,
        variant=variant,
        k=k,
        m=m,
        failing_pattern=failing,
        min_count=min_count,
        patterns_scanned=scanned,
    )


def has_weak_sk(t, k, *, full_report=False, threads=None, backend=None):
    """Every k targets have a common dominator outside them."""
    return _verdict(t, k, 1, WEAK, not full_report, threads, backend)


def has_strong_sk(t, k, *, full_report=False, threads=None, backend=None):
    return _verdict(t, k, 1, STRONG, not full_report, threads, backend)


def has_strong_skm(t, k, m, *, full_report=False, threads=None, backend=None):
    """Every (targets, signs) pattern has at least m distinct witnesses.

    With ``full_report`` the scan never stops early, so ``min_count`` is the
    true minimum over all patterns.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    return _verdict(t, k, m, STRONG_M, not full_report, threads, backend)


def check_property(t, variant, k, m=1, **kwargs):
    if variant == WEAK:
        return has_weak_sk(t, k, **kwargs)
    if variant == STRONG:
        return has_strong_sk(t, k, **kwargs)
    if variant == STRONG_M:
        return has_strong_skm(t, k, m, **kwargs)
    raise ValueError(f"unknown variant {variant!r}")


def g_h_values(q, pattern):
    """Proof sums for the QR tournament of order p.

    g sums prod_j (1 + b_j chi(x - a_j)) over x outside the targets, h over
    every residue. Both are exact integers.
    """
    if not isinstance(q, QrModulus):
        q = qr_modulus(q)
    for a in pattern.targets:
        if not 0 <= a < q.p:
            raise VertexOutOfRange(f"target {a} is not a residue mod {q.p}")
    x = np.arange(q.p, dtype=np.int64)
    terms = np.ones(q.p, dtype=np.int64)
    for a, b in zip(pattern.targets, pattern.signs):
        terms *= 1 + b * q.chi_table[(x - a) % q.p].astype(np.int64)
    h = int(terms.sum())
    g = h - int(terms[list(pattern.targets)].sum())
    return g, h


def qr_guarantee_holds(p, k):
    """True when p > k^2 2^(2k-2), the QR strong S_k sufficient condition."""
    return p > k * k * 4 ** (k - 1)


def total_patterns(n, k, strong=True):
    return math.comb(n, k) * (2**k if strong else 1)
