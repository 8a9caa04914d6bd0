"""State classification: evaluators, the evaluation cache and the critical set.

An evaluator maps a system state to Normal/Failure plus the load that has
to be shed. Everything downstream assumes the system is coherent (a failure
never turns normal when more components fail). The bundled evaluators
satisfy this and the test-suite audits it, but nothing here enforces it.
"""

from __future__ import annotations

import enum
import threading
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterator, Sequence

import numpy as np

from .state import SystemState, iter_bits


class Status(enum.Enum):
    NORMAL = 0
    FAILURE = 1


class Via(enum.Enum):
    SOLVER = "solver"
    DOMINANCE = "dominance"
    CACHE = "cache"


class EvaluatorError(RuntimeError):
    """The evaluator could not classify a state."""


class BaseStateFailure(RuntimeError):
    """The intact system (no failed component) already sheds load."""


@dataclass(frozen=True, slots=True)
class EvaluationOutcome:
    status: Status
    shed: float | None
    via: Via = Via.SOLVER

    @property
    def failed(self) -> bool:
        return self.status is Status.FAILURE

    def replayed(self) -> EvaluationOutcome:
        return EvaluationOutcome(self.status, self.shed, Via.CACHE)


DOMINATED = EvaluationOutcome(Status.FAILURE, None, Via.DOMINANCE)


class Evaluator(ABC):
    """Structure function of an ``n``-component system.

    Implementations must be deterministic and safe to call from several
    threads or processes at once.
    """

    n: int

    @abstractmethod
    def evaluate_bits(self, bits: int) -> EvaluationOutcome:
        """Classify the state whose failed-component bitmask is ``bits``."""

    def evaluate(self, s: SystemState) -> EvaluationOutcome:
        if s.n != self.n:
            raise ValueError(f"state width {s.n} does not match system size {self.n}")
        return self.evaluate_bits(s.bits)

    def failure_mask(self, states: np.ndarray) -> np.ndarray:
        """Vectorised failure flags for an array of bitmasks (``n <= 62``)."""
        return np.fromiter(
            (self.evaluate_bits(int(b)).failed for b in states), dtype=bool, count=len(states)
        )


class CutsetOracle(Evaluator):
    """Coherent system defined by its minimal cut sets.

    A state fails when it contains at least one cut set. The reported shed is
    a synthetic 1.0 MW for every cut set the state covers.
    """

    def __init__(self, cutsets: Sequence[SystemState], n: int):
        masks = []
        for c in cutsets:
            if c.n != n:
                raise ValueError(f"cut set {c!r} has width {c.n}, expected {n}")
            masks.append(c.bits)
        if len(set(masks)) != len(masks):
            raise ValueError("duplicate cut sets")
        for a in masks:
            for b in masks:
                if a != b and a & ~b == 0:
                    raise ValueError(
                        f"cut sets do not form an antichain: {SystemState(a, n)!r} "
                        f"is contained in {SystemState(b, n)!r}"
                    )
        self.n = n
        self.masks = tuple(masks)

    @property
    def cutsets(self) -> list[SystemState]:
        return [SystemState(m, self.n) for m in self.masks]

    def evaluate_bits(self, bits: int) -> EvaluationOutcome:
        covered = sum(1 for m in self.masks if m & ~bits == 0)
        if covered:
            return EvaluationOutcome(Status.FAILURE, float(covered))
        return EvaluationOutcome(Status.NORMAL, 0.0)

    def failure_mask(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=np.int64)
        out = np.zeros(states.shape, dtype=bool)
        for m in self.masks:
            out |= (states & m) == m
        return out


def cutset_oracle(cutsets: Sequence[SystemState], n: int | None = None) -> CutsetOracle:
    if n is None:
        if not cutsets:
            raise ValueError("system size is required when no cut set is given")
        n = cutsets[0].n
    return CutsetOracle(cutsets, n)


class ThresholdOracle(Evaluator):
    """Single-bus capacity model: fails when surviving capacity is below demand."""

    def __init__(self, capacities: Sequence[float], demand: float):
        caps = tuple(float(c) for c in capacities)
        if not caps:
            raise ValueError("at least one component is required")
        if any(c < 0 for c in caps) or demand < 0:
            raise ValueError("capacities and demand must be non-negative")
        self.n = len(caps)
        self.capacities = caps
        self.demand = float(demand)
        self._total = sum(caps)

    def evaluate_bits(self, bits: int) -> EvaluationOutcome:
        surviving = self._total - sum(self.capacities[i] for i in iter_bits(bits))
        if surviving < self.demand:
            return EvaluationOutcome(Status.FAILURE, self.demand - surviving)
        return EvaluationOutcome(Status.NORMAL, 0.0)

    def failure_mask(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=np.int64)
        lost = np.zeros(states.shape, dtype=float)
        for i, cap in enumerate(self.capacities):
            lost += np.where((states >> i) & 1, cap, 0.0)
        return self._total - lost < self.demand


def threshold_oracle(capacities: Sequence[float], demand: float) -> ThresholdOracle:
    return ThresholdOracle(capacities, demand)


class CachedEvaluator(Evaluator):
    """Memoising wrapper; replays return the stored outcome tagged ``Via.CACHE``."""

    def __init__(self, inner: Evaluator):
        self.inner = inner
        self.n = inner.n
        self._store: dict[int, EvaluationOutcome] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._store)

    def lookup(self, bits: int) -> EvaluationOutcome | None:
        hit = self._store.get(bits)
        return None if hit is None else hit.replayed()

    def store(self, bits: int, outcome: EvaluationOutcome) -> EvaluationOutcome:
        """Insert if absent; returns the outcome now held for ``bits``."""
        with self._lock:
            return self._store.setdefault(bits, outcome)

    def evaluate_bits(self, bits: int) -> EvaluationOutcome:
        hit = self.lookup(bits)
        if hit is not None:
            return hit
        return self.store(bits, self.inner.evaluate_bits(bits))

    def failure_mask(self, states: np.ndarray) -> np.ndarray:
        return self.inner.failure_mask(states)


def _evaluate_chunk(evaluator: Evaluator, chunk: list[int]) -> list[EvaluationOutcome]:
    return [evaluator.evaluate_bits(b) for b in chunk]


def evaluate_many(
    cache: CachedEvaluator, bits: Sequence[int], workers: int = 1
) -> list[EvaluationOutcome]:
    """Evaluate states through ``cache``, optionally with worker processes.

    Results come back in input order and cache hits keep ``Via.CACHE``, so
    callers see the same outcomes whatever the worker count.
    """
    out: list[EvaluationOutcome | None] = [cache.lookup(b) for b in bits]
    todo = [i for i, o in enumerate(out) if o is None]
    if workers <= 1 or len(todo) < 2 * workers:
        for i in todo:
            out[i] = cache.store(bits[i], cache.inner.evaluate_bits(bits[i]))
        return out  # type: ignore[return-value]
    size = max(1, -(-len(todo) // (4 * workers)))
    chunks = [[bits[i] for i in todo[k:k + size]] for k in range(0, len(todo), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = pool.map(partial(_evaluate_chunk, cache.inner), chunks)
        flat = [o for chunk in results for o in chunk]
    for i, o in zip(todo, flat):
        out[i] = cache.store(bits[i], o)
    return out  # type: ignore[return-value]


class CriticalSet:
    """Critical states bucketed by level, kept in discovery order.

    Insertions must arrive level by level (all of level ``k`` before any of
    level ``k + 1``); under that discipline the members form an antichain and
    bucket scans in ascending level return the earliest-discovered witness.
    """

    def __init__(self, n: int):
        self.n = n
        self._buckets: dict[int, list[int]] = {}
        self._order: list[int] = []

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[SystemState]:
        return (SystemState(b, self.n) for b in self._order)

    def __contains__(self, s: SystemState) -> bool:
        return s.bits in self._buckets.get(s.level, ())

    def levels(self) -> dict[int, list[SystemState]]:
        return {
            k: [SystemState(b, self.n) for b in v] for k, v in sorted(self._buckets.items())
        }

    def sequence_number(self, s: SystemState) -> int:
        return self._order.index(s.bits)

    def dominator(self, s: SystemState) -> SystemState | None:
        """Earliest-discovered member strictly below ``s``, if any."""
        bits = s.bits
        k = bits.bit_count()
        for lvl in sorted(self._buckets):
            if lvl >= k:
                break
            for c in self._buckets[lvl]:
                if c & ~bits == 0:
                    return SystemState(c, self.n)
        return None

    def first_below_or_equal(self, s: SystemState) -> SystemState | None:
        if s in self:
            earlier = self.dominator(s)
            return earlier if earlier is not None else s
        return self.dominator(s)

    def dominated_bits(self, bits: int) -> bool:
        k = bits.bit_count()
        for lvl, bucket in self._buckets.items():
            if lvl < k:
                for c in bucket:
                    if c & ~bits == 0:
                        return True
        return False

    def insert(self, s: SystemState) -> CriticalSet:
        if s.n != self.n:
            raise ValueError(f"state width {s.n} does not match critical set width {self.n}")
        if s in self or self.dominated_bits(s.bits):
            raise ValueError(f"{s!r} is already covered by the critical set")
        k = s.level
        if any(lvl > k for lvl in self._buckets):
            raise ValueError(f"{s!r} inserted after a higher-level critical state")
        self._buckets.setdefault(k, []).append(s.bits)
        self._order.append(s.bits)
        return self


def dominated(s: SystemState, critical: CriticalSet) -> bool:
    """True when some critical state is a strict subset of ``s``."""
    if s.n != critical.n:
        raise ValueError(f"state width {s.n} does not match critical set width {critical.n}")
    return critical.dominated_bits(s.bits)


def insert_critical(critical: CriticalSet, s: SystemState) -> CriticalSet:
    return critical.insert(s)
