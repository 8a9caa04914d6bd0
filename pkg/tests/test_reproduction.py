"""Reproduction of published RBTS and RTS-79 results on the bundled networks.

Component ids follow the published numbering (generators, then lines), so
reference critical states can be compared directly.
"""

from collections import Counter

import pytest

from latticerel.baselines import enumerate_assess
from latticerel.csilp import Criteria, run
from latticerel.state import SystemState
from latticerel.system import load_system

RBTS_LOLP = 0.009475169361176
RBTS_LEVEL_COUNTS = {1: 1, 2: 19, 3: 15, 4: 10, 5: 17}
RBTS_LISTED = [
    (20,), (1, 2), (1, 4), (16, 19), (4, 8, 9), (14, 15, 19), (1, 14, 15, 16),
    (13, 15, 18, 19), (3, 4, 14, 15, 16), (3, 5, 6, 10, 11),
]


@pytest.fixture(scope="module")
def rbts():
    return load_system("rbts")


@pytest.fixture(scope="module")
def rts79():
    return load_system("rts79")


def test_rbts_level2_counts(rbts):
    res = run(rbts, Criteria(max_level=2))
    se = enumerate_assess(rbts, Criteria(max_level=2))
    assert res.evaluations == 191
    assert se.evaluations == 211
    assert res.bounds.lower <= res.bounds.upper


def test_rbts_literature_ratings_single_contingency(rbts):
    res = run(rbts, Criteria(max_level=1))
    assert [c.components for c in res.critical] == [(20,)]
    assert res.records[0].evaluations_at_identification == 20


@pytest.mark.slow
def test_rbts_rating2x_complete():
    sys = load_system("rbts-rating2x")
    res = run(sys, Criteria.complete(sys.n))
    assert res.stop_reason == "complete"
    assert res.evaluations == 15335
    assert Counter(c.level for c in res.critical) == RBTS_LEVEL_COUNTS
    found = set(res.critical)
    for comps in RBTS_LISTED:
        assert SystemState.of(comps, sys.n) in found
    assert abs(res.lolp - RBTS_LOLP) / RBTS_LOLP < 1e-5


@pytest.mark.slow
def test_rbts_rating2x_level2_bounds():
    sys = load_system("rbts-rating2x")
    res = run(sys, Criteria(max_level=2))
    assert res.evaluations == 191
    assert res.bounds.lower == pytest.approx(0.00943224, rel=1e-4)
    assert res.bounds.upper == pytest.approx(0.00988488, rel=2e-3)


def test_rts79_level1(rts79):
    res = run(rts79, Criteria(max_level=1))
    assert res.evaluations == 70
    assert res.bounds.upper == pytest.approx(0.41845996, rel=1e-4)


@pytest.mark.slow
def test_rts79_level2(rts79):
    res = run(rts79, Criteria(max_level=2))
    assert res.evaluations == 2485
    assert res.bounds.lower == pytest.approx(0.05906663, rel=1e-4)
    assert res.bounds.upper == pytest.approx(0.18444269, rel=1e-4)
