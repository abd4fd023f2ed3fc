import itertools

import pytest
from oracles import brute_g_h, brute_property, pattern_count

from qrteach import kernels
from qrteach.errors import DuplicateTarget, PatternTooLarge, VertexOutOfRange
from qrteach.qr import build_qr, qr_modulus
from qrteach.sk import (
    DominationPattern,
    g_h_values,
    has_strong_sk,
    has_strong_skm,
    has_weak_sk,
    qr_guarantee_holds,
    witnesses,
)
from qrteach.tournament import build_tournament, random_tournament, transitive_tournament

BACKENDS = ["numba", "numpy"]


@pytest.fixture
def cycle3():
    return build_tournament(3, [(1, 0), (2, 1), (0, 2)])


def test_pattern_validation():
    with pytest.raises(DuplicateTarget):
        DominationPattern((1, 1), (1, 1))
    with pytest.raises(ValueError):
        DominationPattern((1,), (0,))
    with pytest.raises(ValueError):
        DominationPattern((), ())
    with pytest.raises(ValueError):
        DominationPattern((1, 2), (1,))


def test_witness_examples(cycle3):
    r = witnesses(cycle3, DominationPattern((0,), (1,)))
    assert r.witnesses == (1,) and r.count == 1
    r = witnesses(cycle3, DominationPattern((0,), (-1,)))
    assert r.witnesses == (2,)
    r = witnesses(build_qr(7), DominationPattern((0, 1), (1, 1)))
    assert r.witnesses == (2,)


def test_witness_errors(cycle3):
    with pytest.raises(PatternTooLarge):
        witnesses(cycle3, DominationPattern((0, 1, 2), (1, 1, 1)))
    with pytest.raises(VertexOutOfRange):
        witnesses(build_qr(7), DominationPattern((0, 9), (1, 1)))


def test_small_verdicts(cycle3):
    trans = transitive_tournament(3)
    assert has_weak_sk(cycle3, 1).holds
    v = has_weak_sk(trans, 1)
    assert not v.holds and v.failing_pattern == DominationPattern((0,), (1,))
    assert has_strong_sk(cycle3, 1).holds
    assert not has_strong_sk(trans, 1).holds
    assert has_weak_sk(build_qr(7), 2).holds
    assert has_strong_sk(build_qr(19), 2).holds


def test_multiplicity_on_cycle(cycle3):
    v = has_strong_skm(cycle3, 1, 1, full_report=True)
    assert v.holds and v.min_count == 1
    v = has_strong_skm(cycle3, 1, 2)
    assert not v.holds and v.min_count == 1
    assert v.failing_pattern is not None


def test_k_bounds(cycle3):
    with pytest.raises(PatternTooLarge):
        has_weak_sk(cycle3, 3)
    with pytest.raises(ValueError):
        has_strong_sk(cycle3, 0)
    with pytest.raises(ValueError):
        has_strong_skm(cycle3, 1, 0)


def _random_cases():
    for seed in range(40):
        n = 3 + seed % 8
        yield random_tournament(n, seed)
    yield build_qr(7)
    yield build_qr(11)


@pytest.mark.parametrize("backend", BACKENDS)
def test_against_brute_force(backend):
    for t in _random_cases():
        adj = t.adjacency.tolist()
        for k in range(1, min(4, t.order)):
            for strong, m in ((False, 1), (True, 1), (True, 2), (True, 3)):
                holds, failing, lowest = brute_property(adj, k, m, strong)
                if not strong:
                    v = has_weak_sk(t, k, full_report=True, backend=backend)
                elif m == 1:
                    v = has_strong_sk(t, k, full_report=True, backend=backend)
                else:
                    v = has_strong_skm(t, k, m, full_report=True, backend=backend)
                assert v.holds == holds
                assert v.min_count == lowest
                if failing is None:
                    assert v.failing_pattern is None
                else:
                    assert (v.failing_pattern.targets, v.failing_pattern.signs) == failing
                    assert pattern_count(adj, *failing) < m


@pytest.mark.parametrize("backend", BACKENDS)
def test_early_exit_reports_same_failure(backend):
    for t in _random_cases():
        for k in range(1, min(4, t.order)):
            full = has_strong_skm(t, k, 2, full_report=True, backend=backend)
            quick = has_strong_skm(t, k, 2, backend=backend)
            assert quick.holds == full.holds
            assert quick.failing_pattern == full.failing_pattern
            assert quick.min_count >= full.min_count


def test_backends_agree_exactly():
    for t in list(_random_cases()) + [build_qr(43)]:
        for k in range(1, min(4, t.order)):
            a = has_strong_skm(t, k, 2, backend="numba")
            b = has_strong_skm(t, k, 2, backend="numpy")
            assert a == b


@pytest.mark.parametrize("threads", [2, 3, 7])
def test_thread_count_does_not_change_verdict(threads):
    for t in list(_random_cases()) + [build_qr(31)]:
        for k in range(1, min(4, t.order)):
            for m in (1, 2, 4):
                serial = has_strong_skm(t, k, m, threads=1)
                sharded = has_strong_skm(t, k, m, threads=threads)
                assert serial == sharded
                assert has_strong_skm(t, k, m, full_report=True, threads=threads) == has_strong_skm(
                    t, k, m, full_report=True
                )


def test_sign_codes_round_trip():
    for k in range(1, 6):
        codes = [kernels.signs_to_sign_code(kernels.sign_code_to_signs(s, k)) for s in range(2**k)]
        assert codes == list(range(2**k))
        ordered = [kernels.sign_code_to_signs(s, k) for s in range(2**k)]
        # +1 sorts before -1
        keyed = [tuple(0 if b == 1 else 1 for b in signs) for signs in ordered]
        assert keyed == sorted(keyed)


def test_monotone_in_m_and_implications():
    for t in _random_cases():
        for k in range(1, min(4, t.order)):
            counts = [has_strong_skm(t, k, m).holds for m in range(1, 5)]
            # holding for m+1 implies holding for m
            assert all(a or not b for a, b in zip(counts, counts[1:]))
            assert has_strong_skm(t, k, 1).holds == has_strong_sk(t, k).holds
            if has_strong_sk(t, k).holds:
                assert has_weak_sk(t, k).holds
            if k + 1 < t.order and has_strong_sk(t, k + 1).holds:
                assert has_strong_skm(t, k, 2).holds


def test_qr_guarantee_conformance():
    for p in (3, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83):
        t = build_qr(p)
        for k in (1, 2, 3):
            if k < p and qr_guarantee_holds(p, k):
                assert has_strong_sk(t, k).holds, (p, k)


def test_g_h_examples():
    q = qr_modulus(7)
    g, h = g_h_values(q, DominationPattern((0, 1), (1, 1)))
    assert g == 4
    assert (g, h) == brute_g_h(7, (0, 1), (1, 1))
    with pytest.raises(VertexOutOfRange):
        g_h_values(q, DominationPattern((0, 7), (1, 1)))


@pytest.mark.parametrize("p", [7, 11, 19])
def test_g_h_identities_exhaustive(p):
    q = qr_modulus(p)
    t = build_qr(p)
    for k in (1, 2, 3):
        for targets in itertools.combinations(range(p), k):
            for signs in itertools.product((1, -1), repeat=k):
                pat = DominationPattern(targets, signs)
                g, h = g_h_values(q, pat)
                assert (g, h) == brute_g_h(p, targets, signs)
                count = witnesses(t, pat).count
                assert g == 2**k * count
                assert h - g in {0, 2 ** (k - 1), 2**k}
                assert (g > 0) == (count > 0)


def test_g_h_accepts_plain_modulus():
    assert g_h_values(7, DominationPattern((0, 1), (1, 1))) == brute_g_h(7, (0, 1), (1, 1))
