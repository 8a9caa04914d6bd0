"""Random coherent test systems with pinned seeds.

Even seeds give cut-set systems, odd seeds threshold systems. Sizes run from
5 to 14 components and failure probabilities from 0.01 to 0.3.
"""

from __future__ import annotations

import numpy as np

from .system import System, cutset_system, threshold_system

MIN_N, MAX_N = 5, 14
P_RANGE = (0.01, 0.3)
CORPUS_SEEDS = range(200)


def _probs(rng: np.random.Generator, n: int) -> list[float]:
    return [round(float(x), 4) for x in rng.uniform(*P_RANGE, size=n)]


def random_antichain(rng: np.random.Generator, n: int) -> list[list[int]]:
    """A few random cut sets of size 1-4, reduced to an antichain."""
    m = int(rng.integers(1, 7))
    sets = set()
    for _ in range(m):
        size = int(rng.choice([1, 2, 2, 3, 3, 4]))
        comps = rng.choice(np.arange(1, n + 1), size=min(size, n), replace=False)
        sets.add(frozenset(int(c) for c in comps))
    minimal = [s for s in sets if not any(t < s for t in sets)]
    return sorted(sorted(s) for s in minimal)


def random_cutset_system(seed: int) -> System:
    rng = np.random.default_rng([seed, 0])
    n = int(rng.integers(MIN_N, MAX_N + 1))
    return cutset_system(f"cutsets-{seed}", random_antichain(rng, n), _probs(rng, n))


def random_threshold_system(seed: int) -> System:
    rng = np.random.default_rng([seed, 1])
    n = int(rng.integers(MIN_N, MAX_N + 1))
    caps = [int(c) for c in rng.integers(5, 51, size=n)]
    demand = round(float(rng.uniform(0.55, 0.9)) * sum(caps), 1)
    return threshold_system(f"threshold-{seed}", caps, demand, _probs(rng, n))


def corpus_system(seed: int) -> System:
    return random_cutset_system(seed) if seed % 2 == 0 else random_threshold_system(seed)


def corpus(seeds=CORPUS_SEEDS) -> list[System]:
    return [corpus_system(s) for s in seeds]
