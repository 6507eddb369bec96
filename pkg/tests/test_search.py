from __future__ import annotations

import math

import pytest

from machinlike import known
from machinlike.errors import Exhausted, InvalidInput
from machinlike.exact import format_lambda, lehmer_measure, parse_relation, verify_exact
from machinlike.search import (
    MaskCache,
    SearchConfig,
    budgeted_score,
    choose_min_x,
    evolve_prime_sets,
    gosper_next,
    mask_indices,
    masks_of_size,
    norm_derived_prime_pool,
    subset_search,
)
from machinlike.sieve import PrimeSet, candidates_from_xs, enumerate_candidates

# ---------------------------
# Gosper's hack
# ---------------------------


@pytest.mark.parametrize("mask,nxt", [(0b0011, 0b0101), (0b0101, 0b0110), (0b0110, 0b1001)])
def test_gosper_examples(mask, nxt):
    assert gosper_next(mask) == nxt


def test_gosper_exhausted():
    with pytest.raises(Exhausted):
        gosper_next(0b1100, width=4)
    with pytest.raises(InvalidInput):
        gosper_next(0)


def test_gosper_visits_every_combination_once():
    for w in range(1, 21):
        for c in range(1, w + 1):
            masks = list(masks_of_size(w, c))
            assert len(masks) == math.comb(w, c)
            assert masks == sorted(set(masks))
            assert all(bin(m).count("1") == c and m < (1 << w) for m in masks)


def test_mask_indices():
    assert mask_indices(0b101001) == [0, 3, 5]


def test_mask_cache():
    cache = MaskCache()
    assert cache.add(0b0110) and not cache.add(0b0110)
    assert 0b0110 in cache and 0b0111 not in cache
    assert cache.covers(0b0111) and not cache.covers(0b0011)


def test_config_validation():
    with pytest.raises(InvalidInput):
        SearchConfig(min_subset_size=1)
    with pytest.raises(InvalidInput):
        SearchConfig(stale_iteration_cap=0)


# ---------------------------
# Subset search
# ---------------------------

def _search(P, max_x=10**6, **kw):
    cands = enumerate_candidates(P, max_x)
    return subset_search(cands, P, SearchConfig(**kw))


def test_machin_from_13():
    res = _search((13,))
    assert res.relations == [parse_relation(known.MACHIN)]
    assert format_lambda(lehmer_measure(res.best())) == "1.8511"


def test_example_1_classics():
    res = _search((5,))
    texts = {r.render() for r in res.relations}
    for name in ("HUTTON", "HERMANN", "EULER"):
        assert parse_relation(getattr(known, name)).render() in texts
    assert parse_relation(known.ZERO_2_3_7).canonical() in res.zero_relations


def test_gauss_from_5_13():
    res = _search((5, 13))
    assert res.best() == parse_relation(known.GAUSS)
    assert res.report.uncertified == 0
    # informational: the paper counts 42 relations for this prime set
    assert len(res.relations) >= 4


def test_stormer_from_5_13_61():
    res = _search((5, 13, 61))
    assert res.best() == parse_relation(known.STORMER)
    assert format_lambda(lehmer_measure(res.best())) == "1.5860"


def test_every_emitted_relation_certifies():
    res = _search((5, 13))
    assert all(verify_exact(r).valid for r in res.relations)
    assert all(r.k > 0 for r in res.relations)
    assert all(r.k == 0 for r in res.zero_relations)


def test_pruning_keeps_every_relation():
    pruned = _search((5, 13))
    full = _search((5, 13), prune=False)
    assert full.report.pruned == 0 and pruned.report.pruned > 0
    assert pruned.relations == full.relations


def test_subset_sizes_respected():
    res = _search((5, 13), max_subset_size=3, min_subset_size=3)
    assert res.relations and all(len(r) == 3 for r in res.relations)


def test_min_x_filter():
    res = _search((5, 13), min_x=5)
    assert all(c.x >= 5 for c in res.candidates)
    assert choose_min_x(enumerate_candidates((5, 13), 10**6)) == 0


def test_choose_min_x_caps_width():
    cands = enumerate_candidates((5, 13, 37, 24113, 76369), 302342643)
    alpha = choose_min_x(cands, width=10)
    assert len([c for c in cands if c.x >= alpha]) <= 10


def test_caps_abort_cleanly():
    res = _search((5, 13), pslq_budget=5)
    assert res.report.aborted == "pslq_budget" and res.report.pslq_calls == 5
    res = _search((5, 13, 61), stale_iteration_cap=3)
    assert res.report.aborted == "stale_iteration_cap"
    assert all(verify_exact(r).valid for r in res.relations)


def test_skip_supersets_is_a_subset_of_full_results():
    full = _search((5, 13))
    fast = _search((5, 13), skip_supersets=True)
    assert set(r.key() for r in fast.relations) <= set(r.key() for r in full.relations)
    assert fast.report.pslq_calls < full.report.pslq_calls


def test_shared_cache_suppresses_resubmission():
    cache = MaskCache()
    cands = enumerate_candidates((13,), 1000)
    first = subset_search(cands, (13,), SearchConfig(), cache)
    second = subset_search(cands, (13,), SearchConfig(), cache)
    assert first.relations and not second.relations
    assert second.report.cache_hits == 1 and second.report.pslq_calls == 0


def test_parallel_matches_serial():
    serial = _search((5, 13))
    par = _search((5, 13), jobs=2, chunk_size=8)
    assert par.relations == serial.relations


def test_two_over_search_finds_precursor():
    P = (5, 113, 229, 177553)
    cands = enumerate_candidates(P, 50_000_000, numerators=(1, 2))
    res = subset_search(cands, P, SearchConfig())
    assert parse_relation(known.RECORD6_TWO_OVER) in res.relations


def test_empty_candidates():
    res = subset_search([], (), SearchConfig())
    assert res.relations == [] and res.best() is None


# ---------------------------
# Prime-set strategies
# ---------------------------

def test_evolve_adds_5_to_13():
    score = budgeted_score(10**6)
    assert score(PrimeSet.of([13])) == pytest.approx(1.8511, abs=5e-5)
    out = evolve_prime_sets([PrimeSet.of([13])], 1, [5], score)
    assert [ps.primes for ps in out] == [(5, 13)]
    assert score(out[0]) == pytest.approx(1.7866, abs=5e-5)


def test_evolve_adds_61():
    score = budgeted_score(10**6)
    out = evolve_prime_sets([PrimeSet.of([5, 13])], 1, [61], score)
    assert [ps.primes for ps in out] == [(5, 13, 61)]
    assert score(out[0]) == pytest.approx(1.5860, abs=5e-5)


def test_evolve_wide_beam_returns_all_sorted():
    scores = {(5, 13): 2.0, (13, 17): 1.0, (13, 29): 1.0}
    out = evolve_prime_sets([PrimeSet.of([13])], 10, [29, 5, 17, 13], lambda ps: scores[ps.primes])
    assert [ps.primes for ps in out] == [(13, 17), (13, 29), (5, 13)]


def test_unscoreable_set_scores_infinity():
    assert budgeted_score(100)(PrimeSet.of([9973])) == math.inf


@pytest.mark.parametrize("limit,expected", [(4, [5]), (6, [5, 13, 17]), (2, [])])
def test_norm_derived_prime_pool(limit, expected):
    assert norm_derived_prime_pool(limit) == expected


def test_norm_derived_prime_pool_brute_force():
    expected = set()
    for x in range(1, 300):
        n = x * x + 1
        p = 2
        while n > 1:
            while n % p == 0:
                expected.add(p)
                n //= p
            p += 1
    expected.discard(2)
    assert norm_derived_prime_pool(300) == sorted(expected)
