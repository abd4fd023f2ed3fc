"""Hot loops: the domination-pattern scan and the orientation enumerator.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy
version with identical results. ``QRTEACH_DISABLE_NUMBA=1`` in the
environment (or numba failing to import) selects the numpy path; callers
may also pass ``backend="numba"`` / ``backend="numpy"`` explicitly.

Bit layout used throughout: a tournament of order n is packed into two
``(n, W)`` uint64 arrays, ``W = ceil(n / 64)``. Bit y of ``out_bits[x]`` is
set iff x beats y; ``in_bits`` is the transpose.
"""

import itertools
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("QRTEACH_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")

DEFAULT_BACKEND = "numba" if HAVE_NUMBA and not NUMBA_DISABLED else "numpy"


def njit(*args, **kwargs):
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]):
        return args[0]
    return lambda f: f


def resolve_backend(backend=None):
    backend = backend or DEFAULT_BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    return backend


def pack_rows(adj):
    """Pack a boolean (n, n) matrix row-wise into little-endian uint64 words."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    words = max(1, (n + 63) // 64)
    padded = np.zeros((n, words * 64), dtype=bool)
    padded[:, : adj.shape[1]] = adj
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(n, words)


def sign_code_to_signs(code, k):
    """Sign codes count in binary with b_1 as the most significant bit; 0 is +1."""
    return tuple(-1 if (code >> (k - 1 - j)) & 1 else 1 for j in range(k))


def signs_to_sign_code(signs):
    code = 0
    for b in signs:
        code = (code << 1) | (1 if b == -1 else 0)
    return code


# ---------------------------------------------------------------------------
# pattern scan


@njit(cache=True, nogil=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + (
        (x >> np.uint64(2)) & np.uint64(0x3333333333333333)
    )
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, nogil=True)
def _scan_numba(in_bits, out_bits, k, m, strong, lo, hi, early_exit):
    n = in_bits.shape[0]
    words = in_bits.shape[1]
    fail_combo = np.full(k, -1, np.int64)
    fail_sign = -1
    min_count = n + 1
    scanned = 0
    if lo >= hi or lo + k > n:
        return False, fail_combo, fail_sign, min_count, scanned
    n_signs = (1 << k) if strong else 1
    idx = np.empty(k, np.int64)
    for i in range(k):
        idx[i] = lo + i
    acc = np.empty(words, np.uint64)
    while True:
        for s in range(n_signs):
            for j in range(k):
                neg = (s >> (k - 1 - j)) & 1
                a = idx[j]
                for w in range(words):
                    row = out_bits[a, w] if neg else in_bits[a, w]
                    if j == 0:
                        acc[w] = row
                    else:
                        acc[w] &= row
            c = 0
            for w in range(words):
                c += _popcount64(acc[w])
            scanned += 1
            if c < min_count:
                min_count = c
            if c < m and fail_sign < 0:
                for j in range(k):
                    fail_combo[j] = idx[j]
                fail_sign = s
                if early_exit:
                    return True, fail_combo, fail_sign, min_count, scanned
        i = k - 1
        while i >= 0 and idx[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1
        if idx[0] >= hi:
            break
    return fail_sign >= 0, fail_combo, fail_sign, min_count, scanned


def _prefixes(n, k, lo, hi):
    """Sorted (k-1)-prefixes with first element in [lo, hi), lexicographic."""
    if k == 1:
        yield ()
        return
    for a1 in range(lo, hi):
        for rest in itertools.combinations(range(a1 + 1, n), k - 2):
            yield (a1,) + rest


def _scan_numpy(in_bits, out_bits, k, m, strong, lo, hi, early_exit):
    n, words = in_bits.shape
    fail_combo = np.full(k, -1, np.int64)
    fail_sign = -1
    min_count = n + 1
    scanned = 0
    if lo >= hi or lo + k > n:
        return False, fail_combo, fail_sign, min_count, scanned
    both = np.stack([in_bits, out_bits], axis=1)  # (n, 2, W)
    n_prefix_signs = (1 << (k - 1)) if strong else 1
    ones = np.full(words, np.iinfo(np.uint64).max, dtype=np.uint64)

    for prefix in _prefixes(n, k, lo, hi):
        start = prefix[-1] + 1 if prefix else lo
        stop = n if prefix else hi
        if start >= stop:
            continue
        # prefix_acc[sp] is the candidate pool after the first k-1 constraints
        prefix_acc = np.empty((n_prefix_signs, words), dtype=np.uint64)
        for sp in range(n_prefix_signs):
            acc = ones.copy()
            for j, a in enumerate(prefix):
                neg = (sp >> (k - 2 - j)) & 1
                acc &= both[a, neg]
            prefix_acc[sp] = acc
        last = both[start:stop] if strong else both[start:stop, :1]
        inter = prefix_acc[None, :, None, :] & last[:, None, :, :]
        counts = np.bitwise_count(inter).sum(axis=-1, dtype=np.int64)
        counts = counts.reshape(stop - start, -1)  # column = sign code
        bad = counts < m
        if bad.any():
            flat = int(np.flatnonzero(bad.ravel())[0])
            if fail_sign < 0:
                row, col = divmod(flat, counts.shape[1])
                fail_combo[:] = prefix + (start + row,)
                fail_sign = col
                if early_exit:
                    seen = counts.ravel()[: flat + 1]
                    min_count = min(min_count, int(seen.min()))
                    scanned += flat + 1
                    return True, fail_combo, fail_sign, min_count, scanned
        min_count = min(min_count, int(counts.min()))
        scanned += counts.size
    return fail_sign >= 0, fail_combo, fail_sign, min_count, scanned


def scan_patterns(in_bits, out_bits, k, m, strong, lo, hi, early_exit, backend=None):
    """Scan all sorted target tuples whose first target lies in [lo, hi).

    Returns ``(failed, fail_targets, fail_sign_code, min_count, scanned)``.
    The failure reported is the first in lexicographic (targets, sign code)
    order. With ``early_exit`` the scan stops there, and ``min_count`` only
    covers the patterns up to and including it.
    """
    backend = resolve_backend(backend)
    fn = _scan_numba if backend == "numba" else _scan_numpy
    failed, combo, sign, min_count, scanned = fn(
        in_bits, out_bits, int(k), int(m), bool(strong), int(lo), int(hi), bool(early_exit)
    )
    return bool(failed), tuple(int(a) for a in combo), int(sign), int(min_count), int(scanned)


# ---------------------------------------------------------------------------
# orientation enumeration (n <= 8, adjacency rows fit in one small int)


def pair_list(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def pattern_masks(n, k, strong):
    """For every sorted k-subset A and sign code: (A as bitmask, +1 targets as bitmask)."""
    combos = list(itertools.combinations(range(n), k))
    n_signs = (1 << k) if strong else 1
    a_masks = np.zeros(len(combos), dtype=np.int64)
    p_masks = np.zeros((len(combos), n_signs), dtype=np.int64)
    for c, combo in enumerate(combos):
        a_masks[c] = sum(1 << a for a in combo)
        for s in range(n_signs):
            signs = sign_code_to_signs(s, k)
            p_masks[c, s] = sum(1 << a for a, b in zip(combo, signs) if b == 1)
    return a_masks, p_masks


@njit(cache=True, nogil=True)
def _canonical_zero_row(mask, n):
    # vertex 0 beats exactly {1..d} for some d
    r = mask & ((1 << (n - 1)) - 1)
    return (r & (r + 1)) == 0


@njit(cache=True, nogil=True)
def _enumerate_numba(n, pair_i, pair_j, a_masks, p_masks, lo, hi, symmetry_cut):
    n_pairs = pair_i.shape[0]
    out = np.zeros(n, np.int64)
    tested = 0
    for mask in range(lo, hi):
        if symmetry_cut and not _canonical_zero_row(mask, n):
            continue
        tested += 1
        for v in range(n):
            out[v] = 0
        for e in range(n_pairs):
            if (mask >> e) & 1:
                out[pair_i[e]] |= 1 << pair_j[e]
            else:
                out[pair_j[e]] |= 1 << pair_i[e]
        ok = True
        for c in range(a_masks.shape[0]):
            a = a_masks[c]
            for s in range(p_masks.shape[1]):
                p = p_masks[c, s]
                hit = False
                for x in range(n):
                    if (a >> x) & 1:
                        continue
                    if (out[x] & a) == p:
                        hit = True
                        break
                if not hit:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return mask, tested
    return -1, tested


def _enumerate_numpy(n, pair_i, pair_j, a_masks, p_masks, lo, hi, symmetry_cut, chunk=1 << 16):
    tested = 0
    verts = np.arange(n, dtype=np.int64)
    for start in range(lo, hi, chunk):
        masks = np.arange(start, min(start + chunk, hi), dtype=np.int64)
        if symmetry_cut:
            r = masks & ((1 << (n - 1)) - 1)
            masks = masks[(r & (r + 1)) == 0]
        if masks.size == 0:
            continue
        tested += masks.size
        out = np.zeros((masks.size, n), dtype=np.int64)
        for e, (i, j) in enumerate(zip(pair_i, pair_j)):
            bit = ((masks >> e) & 1).astype(bool)
            out[bit, i] |= 1 << int(j)
            out[~bit, j] |= 1 << int(i)
        alive = np.ones(masks.size, dtype=bool)
        for c in range(a_masks.shape[0]):
            a = int(a_masks[c])
            outside = ((a >> verts) & 1) == 0
            restricted = out[:, outside] & a
            for s in range(p_masks.shape[1]):
                alive &= (restricted == p_masks[c, s]).any(axis=1)
        hits = np.flatnonzero(alive)
        if hits.size:
            first = int(hits[0])
            tested -= masks.size - first - 1
            return int(masks[first]), tested
    return -1, tested


def enumerate_orientations(n, k, strong, lo=0, hi=None, symmetry_cut=False, backend=None):
    """Find the smallest orientation bitmask in [lo, hi) with the S_k property.

    Bit e of the mask orients the e-th pair (i, j), i < j, in lexicographic
    pair order: set means i beats j. Returns ``(mask or -1, masks_tested)``.
    """
    backend = resolve_backend(backend)
    pairs = pair_list(n)
    if hi is None:
        hi = 1 << len(pairs)
    pair_i = np.array([p[0] for p in pairs], dtype=np.int64)
    pair_j = np.array([p[1] for p in pairs], dtype=np.int64)
    a_masks, p_masks = pattern_masks(n, k, strong)
    fn = _enumerate_numba if backend == "numba" else _enumerate_numpy
    mask, tested = fn(n, pair_i, pair_j, a_masks, p_masks, int(lo), int(hi), bool(symmetry_cut))
    return int(mask), int(tested)


def mask_to_adjacency(n, mask):
    adj = np.zeros((n, n), dtype=bool)
    for e, (i, j) in enumerate(pair_list(n)):
        if (mask >> e) & 1:
            adj[i, j] = True
        else:
            adj[j, i] = True
    return adj
