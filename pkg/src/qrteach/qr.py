"""Legendre character, quadratic-residue tournaments and character sums."""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DuplicateOffset, InvalidModulus
from .tournament import Tournament

MAX_TABLE_MODULUS = 2**31 - 1

# Deterministic for every n < 3.3e24, comfortably past 64 bits.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n):
    """Deterministic Miller-Rabin."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_modulus(p):
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise InvalidModulus(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if not is_prime(p):
        raise InvalidModulus(f"{p} is not prime")
    if p % 4 != 3:
        raise InvalidModulus(f"{p} is prime but p ≡ {p % 4} (mod 4), need 3")
    return p


def legendre_chi(p, x):
    """Quadratic character of x mod p via Euler's criterion."""
    p = check_modulus(p)
    if not 0 <= x < p:
        raise ValueError(f"residue {x} not in 0..{p - 1}")
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True, eq=False)
class QrModulus:
    p: int
    chi_table: np.ndarray = field(repr=False)

    def chi(self, x):
        return int(self.chi_table[x % self.p])


@lru_cache(maxsize=32)
def qr_modulus(p):
    """Character table built by marking squares, shared read-only per modulus."""
    p = check_modulus(p)
    if p > MAX_TABLE_MODULUS:
        raise InvalidModulus(f"p = {p} exceeds the table limit {MAX_TABLE_MODULUS}")
    table = np.full(p, -1, dtype=np.int8)
    xs = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    table[(xs * xs) % p] = 1
    table[0] = 0
    table.setflags(write=False)
    return QrModulus(p, table)


def build_qr(p):
    """QR tournament of order p: x beats y iff x - y is a nonzero square."""
    q = qr_modulus(p)
    v = np.arange(q.p)
    diff = (v[:, None] - v[None, :]) % q.p
    return Tournament(q.chi_table[diff] == 1)


@dataclass(frozen=True)
class CharacterSumReport:
    p: int
    offsets: tuple
    value: int
    burgess_bound: float
    within_bound: bool


def character_sum(p, offsets):
    """Sum over x of prod_i chi(x - a_i), by direct scan of all residues."""
    q = qr_modulus(p)
    offsets = tuple(int(a) for a in offsets)
    r = len(offsets)
    if not 1 <= r < q.p:
        raise ValueError(f"need 1 <= r < p offsets, got r = {r}")
    if any(not 0 <= a < q.p for a in offsets):
        raise ValueError(f"offsets must be residues in 0..{q.p - 1}")
    if len(set(offsets)) != r:
        raise DuplicateOffset(f"offsets {offsets} are not distinct")
    x = np.arange(q.p, dtype=np.int64)
    prod = np.ones(q.p, dtype=np.int64)
    for a in offsets:
        prod *= q.chi_table[(x - a) % q.p]
    value = int(prod.sum())
    return CharacterSumReport(
        p=q.p,
        offsets=offsets,
        value=value,
        burgess_bound=(r - 1) * math.sqrt(q.p),
        within_bound=value * value <= (r - 1) ** 2 * q.p,
    )
