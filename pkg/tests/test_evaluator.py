import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticerel.evaluator import (
    DOMINATED,
    CachedEvaluator,
    CriticalSet,
    CutsetOracle,
    Status,
    Via,
    cutset_oracle,
    dominated,
    evaluate_many,
    insert_critical,
    threshold_oracle,
)
from latticerel.state import SystemState


def S(*c, n=5):
    return SystemState.of(c, n)


@pytest.fixture
def sys5_oracle():
    return cutset_oracle([S(1), S(2, 3), S(3, 4), S(2, 4, 5)])


def test_cutset_oracle_examples(sys5_oracle):
    assert sys5_oracle.evaluate(S()).status is Status.NORMAL
    assert sys5_oracle.evaluate(S(1)).failed
    assert sys5_oracle.evaluate(S(2, 4, 5)).failed
    assert not sys5_oracle.evaluate(S(2, 4)).failed
    assert sys5_oracle.evaluate(S(1, 2, 3)).shed == 2.0


def test_cutset_oracle_rejects_non_antichain():
    with pytest.raises(ValueError):
        cutset_oracle([S(1), S(1, 2)])
    with pytest.raises(ValueError):
        cutset_oracle([S(1), S(1)])
    with pytest.raises(ValueError):
        cutset_oracle([])


def test_width_checked(sys5_oracle):
    with pytest.raises(ValueError):
        sys5_oracle.evaluate(SystemState.of([1], 4))


def test_threshold_oracle_examples():
    ev = threshold_oracle((10, 10, 10), 15)
    n = 3
    assert not ev.evaluate(SystemState.of([1], n)).failed
    out = ev.evaluate(SystemState.of([1, 2], n))
    assert out.failed and out.shed == 5.0
    with pytest.raises(ValueError):
        threshold_oracle((10, -1), 5)


def test_vectorised_masks_agree(sys5_oracle):
    states = np.arange(32)
    loop = np.array([sys5_oracle.evaluate_bits(int(b)).failed for b in states])
    assert (sys5_oracle.failure_mask(states) == loop).all()
    ev = threshold_oracle((10, 20, 5, 7, 9), 31)
    loop = np.array([ev.evaluate_bits(int(b)).failed for b in states])
    assert (ev.failure_mask(states) == loop).all()


def test_cache_replays(sys5_oracle):
    cache = CachedEvaluator(sys5_oracle)
    first = cache.evaluate(S(2, 3))
    again = cache.evaluate(S(2, 3))
    assert first.via is Via.SOLVER and again.via is Via.CACHE
    assert again.status is first.status and again.shed == first.shed
    assert len(cache) == 1


def test_evaluate_many_workers_agree(sys5_oracle):
    bits = list(range(32)) + [3, 5]
    a = evaluate_many(CachedEvaluator(sys5_oracle), bits, workers=1)
    b = evaluate_many(CachedEvaluator(sys5_oracle), bits, workers=4)
    assert a == b


def test_critical_set_examples():
    c = CriticalSet(5)
    c.insert(S(1))
    assert dominated(S(1, 2), c)
    assert not dominated(S(2, 3), c)
    assert not dominated(S(1), c)
    insert_critical(c, S(2, 3))
    assert c.first_below_or_equal(S(1, 2, 3)) == S(1)
    assert c.first_below_or_equal(S(2, 3)) == S(2, 3)
    assert c.dominator(S(2, 3)) is None
    assert list(c) == [S(1), S(2, 3)]
    assert c.sequence_number(S(2, 3)) == 1


def test_critical_set_rejects_bad_inserts():
    c = CriticalSet(5)
    c.insert(S(2, 3))
    with pytest.raises(ValueError):
        c.insert(S(2, 3))
    with pytest.raises(ValueError):
        c.insert(S(1, 2, 3))
    with pytest.raises(ValueError):
        c.insert(S(4))
    with pytest.raises(ValueError):
        c.insert(SystemState.of([1], 4))


def test_dominated_constant():
    assert DOMINATED.failed and DOMINATED.shed is None and DOMINATED.via is Via.DOMINANCE


@given(st.integers(2, 8).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=6))
))
def test_dominance_matches_brute_force(args):
    n, raw = args
    antichain = sorted({b for b in raw if not any(o != b and o & ~b == 0 for o in raw)},
                       key=lambda b: (b.bit_count(), b))
    c = CriticalSet(n)
    for b in antichain:
        c.insert(SystemState(b, n))
    for b in range(1 << n):
        want = any(a != b and a & ~b == 0 for a in antichain)
        assert dominated(SystemState(b, n), c) == want
    ev = CutsetOracle([SystemState(b, n) for b in antichain], n)
    for b in range(1 << n):
        assert ev.evaluate_bits(b).failed == any(a & ~b == 0 for a in antichain)
