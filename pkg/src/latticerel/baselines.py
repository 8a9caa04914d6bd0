"""Reference methods: state enumeration, Monte Carlo sampling and brute force."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .csilp import Criteria, TraceRow
from .evaluator import (
    BaseStateFailure,
    CachedEvaluator,
    CutsetOracle,
    EvaluatorError,
    ThresholdOracle,
    Via,
    evaluate_many,
)
from .state import ComponentReliability, SystemState
from .system import System

MAX_ORACLE_COMPONENTS = 24
RNG_NAME = "numpy.random.PCG64"


def _state_probs(states: np.ndarray, r: ComponentReliability) -> np.ndarray:
    """Probabilities of an array of bitmasks, multiplied in component order."""
    out = np.ones(states.shape, dtype=float)
    for i, (p, q) in enumerate(zip(r.p, r.q)):
        out *= np.where((states >> i) & 1, p, q)
    return out


def _vectorised(ev) -> bool:
    return isinstance(ev, (CutsetOracle, ThresholdOracle))


# -- state enumeration -----------------------------------------------------

@dataclass
class SeResult:
    system: str
    n: int
    criteria: Criteria
    lolp_lower: float
    lolp_upper: float
    evaluations: int
    failures: int
    trace: list[TraceRow]
    stop_reason: str
    wall_time: float
    last_level: int
    error: str | None = None

    @property
    def gap(self) -> float:
        return max(0.0, self.lolp_upper - self.lolp_lower)


def enumerate_assess(system: System, criteria: Criteria, *, workers: int = 1,
                     cache: CachedEvaluator | None = None,
                     batch_size: int = 512) -> SeResult:
    """Evaluate states level by level (lexicographic within a level).

    The intact state counts as the first evaluation. Bounds are
    ``lower = P(failures seen)`` and ``upper = 1 - P(normals seen)``. The
    evaluation budget and the gap target are checked before every
    evaluation; the level limit stops the run once level ``k*`` is done.

    Raises
    ------
    BaseStateFailure
        If the intact system already fails.
    """
    n = system.n
    r = system.reliability
    cache = cache if cache is not None else CachedEvaluator(system.evaluator)
    workers = max(1, int(workers))
    t0 = time.perf_counter()
    fail_p: list[float] = []
    norm_p: list[float] = []
    lo_run = 0.0
    norm_run = 0.0
    evals = 0
    trace: list[TraceRow] = []
    reason = "complete"
    error = None
    last_level = -1

    def row() -> None:
        lower = math.fsum(fail_p)
        upper = max(1.0 - math.fsum(norm_p), lower)
        t = TraceRow(evals, lower, min(upper, 1.0), (time.perf_counter() - t0) * 1e3)
        if trace and trace[-1].evaluations == evals:
            trace[-1] = t
        else:
            trace.append(t)

    def budget_left() -> int | None:
        if criteria.max_evaluations is None:
            return None
        return criteria.max_evaluations - evals

    def stop_now() -> str | None:
        left = budget_left()
        if left is not None and left <= 0:
            return "max_evaluations"
        if criteria.min_gap is not None and (1.0 - norm_run) - lo_run <= criteria.min_gap:
            return "min_gap"
        return None

    stopped = False
    try:
        for k in range(n + 1):
            if criteria.max_level is not None and k > criteria.max_level:
                reason = "max_level"
                break
            level_iter = combinations(range(n), k)
            while True:
                size = batch_size * workers
                left = budget_left()
                if left is not None:
                    size = max(1, min(size, left))
                batch = []
                for combo in level_iter:
                    batch.append(sum(1 << i for i in combo))
                    if len(batch) >= size:
                        break
                if not batch:
                    break
                outs = evaluate_many(cache, batch, workers)
                for b, o in zip(batch, outs):
                    why = stop_now()
                    if why is not None:
                        reason, stopped = why, True
                        break
                    if o.via is Via.SOLVER:
                        evals += 1
                    p = _state_prob_bits(b, r)
                    if o.failed:
                        if b == 0:
                            raise BaseStateFailure("the intact system already fails")
                        fail_p.append(p)
                        lo_run += p
                    else:
                        norm_p.append(p)
                        norm_run += p
                if stopped:
                    break
            if stopped:
                break
            last_level = k
            row()
            why = stop_now()
            if why is not None and k < n:
                reason = why
                break
    except EvaluatorError as exc:
        reason, error = "evaluator_error", str(exc)
    row()
    lower = math.fsum(fail_p)
    upper = min(max(1.0 - math.fsum(norm_p), lower), 1.0)
    return SeResult(system.name, n, criteria, lower, upper, evals, len(fail_p), trace, reason,
                    time.perf_counter() - t0, last_level, error)


def _state_prob_bits(bits: int, r: ComponentReliability) -> float:
    out = 1.0
    for i, (p, q) in enumerate(zip(r.p, r.q)):
        out *= p if bits >> i & 1 else q
    return out


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class McsSettings:
    """Sampling settings.

    Attributes
    ----------
    seed : int
        Seed of the PCG64 generator.
    max_samples : int
        Hard cap on the number of samples.
    target_cov : float or None
        Stop at the first sample count (at least ``min_samples``) whose
        coefficient of variation is at or below this value.
    min_samples : int
        Guard against stopping on a lucky early streak.
    batch_size : int
        Samples drawn per generator call; part of the reproducibility key.
    """

    seed: int = 0
    max_samples: int = 1_000_000
    target_cov: float | None = 0.01
    min_samples: int = 100
    batch_size: int = 10_000

    def __post_init__(self) -> None:
        if self.max_samples < 1:
            raise ValueError("max_samples must be positive")
        if self.target_cov is not None and not self.target_cov > 0:
            raise ValueError("target_cov must be positive")
        if self.batch_size < 1 or self.min_samples < 1:
            raise ValueError("batch_size and min_samples must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class McsResult:
    system: str
    n: int
    settings: McsSettings
    estimate: float
    cov: float
    samples: int
    failures: int
    evaluations: int
    stop_reason: str
    wall_time: float
    history: list[tuple[int, float, float]] = field(default_factory=list)
    rng: str = RNG_NAME
    error: str | None = None

    @property
    def sigma(self) -> float:
        k = max(self.samples, 1)
        return math.sqrt(self.estimate * (1.0 - self.estimate) / k)


def coefficient_of_variation(failures: int | np.ndarray, samples: int | np.ndarray):
    """``sqrt((1 - L) / (k L))`` with ``L = failures / samples``; inf when ``L = 0``."""
    f = np.asarray(failures, dtype=float)
    k = np.asarray(samples, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sqrt(np.where(f > 0, (k - f) / (k * f), np.inf))
    return float(out) if out.ndim == 0 else out


def _classify_batch(system: System, cache: CachedEvaluator, fails: np.ndarray,
                    workers: int) -> tuple[np.ndarray, int]:
    """Failure flag per sampled row and the number of new evaluator calls."""
    n = system.n
    if n <= 62:
        weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
        packed = fails.astype(np.int64) @ weights
        uniq, inverse = np.unique(packed, return_inverse=True)
        keys = [int(u) for u in uniq]
    else:
        rows = [sum(1 << int(i) for i in np.flatnonzero(row)) for row in fails]
        keys = sorted(set(rows))
        where = {b: i for i, b in enumerate(keys)}
        inverse = np.array([where[b] for b in rows])
        uniq = None
    if _vectorised(system.evaluator) and uniq is not None:
        new = [b for b in keys if cache.lookup(b) is None]
        flags = system.evaluator.failure_mask(uniq)
        # remember vectorised verdicts so evaluation counts stay comparable
        for b, f in zip(keys, flags):
            if cache.lookup(b) is None:
                cache.store(b, system.evaluator.evaluate_bits(b))
        return flags[inverse], len(new)
    outs = evaluate_many(cache, keys, workers)
    flags = np.array([o.failed for o in outs], dtype=bool)
    return flags[inverse], sum(1 for o in outs if o.via is Via.SOLVER)


def monte_carlo_assess(system: System, settings: McsSettings, *, workers: int = 1,
                       cache: CachedEvaluator | None = None) -> McsResult:
    """Crude Monte Carlo estimate of LOLP with a sequential cov stopping rule."""
    n = system.n
    p = np.asarray(system.reliability.p)
    cache = cache if cache is not None else CachedEvaluator(system.evaluator)
    rng = np.random.Generator(np.random.PCG64(settings.seed))
    t0 = time.perf_counter()
    k = failures = evals = 0
    history: list[tuple[int, float, float]] = []
    reason = "max_samples"
    error = None
    try:
        while k < settings.max_samples:
            b = min(settings.batch_size, settings.max_samples - k)
            fails = rng.random((b, n)) < p
            flags, new = _classify_batch(system, cache, fails, workers)
            evals += new
            counts = failures + np.cumsum(flags)
            seen = k + np.arange(1, b + 1)
            stop_at = None
            if settings.target_cov is not None:
                cov = coefficient_of_variation(counts, seen)
                ok = np.flatnonzero((cov <= settings.target_cov) & (seen >= settings.min_samples))
                if ok.size:
                    stop_at = int(ok[0])
            if stop_at is not None:
                k, failures = int(seen[stop_at]), int(counts[stop_at])
                reason = "target_cov"
            else:
                k, failures = int(seen[-1]), int(counts[-1])
            history.append((k, failures / k, coefficient_of_variation(failures, k)))
            if stop_at is not None:
                break
    except EvaluatorError as exc:
        reason, error = "evaluator_error", str(exc)
    est = failures / k if k else 0.0
    cov = coefficient_of_variation(failures, k) if k else math.inf
    return McsResult(system.name, n, settings, est, cov, k, failures, evals, reason,
                     time.perf_counter() - t0, history, RNG_NAME, error)


# -- brute force -------------------------------------------------------------

@dataclass
class OracleResult:
    system: str
    n: int
    lolp_exact: float
    minimal_cut_sets: list[SystemState]
    failure_count: int
    evaluations: int
    wall_time: float


def brute_force_oracle(system: System, *, workers: int = 1,
                       max_components: int = MAX_ORACLE_COMPONENTS) -> OracleResult:
    """Evaluate all ``2**n`` states; exact LOLP and the minimal cut sets.

    A failure state is minimal when removing any one of its components makes
    it normal, which identifies the critical states of a coherent system.
    Cut sets are listed by level, then lexicographically.

    Raises
    ------
    ValueError
        If the system has more than ``max_components`` components.
    """
    n = system.n
    if n > max_components:
        raise ValueError(f"brute force refused: {n} components exceeds the limit of {max_components}")
    t0 = time.perf_counter()
    states = np.arange(1 << n, dtype=np.int64)
    if _vectorised(system.evaluator):
        mask = np.asarray(system.evaluator.failure_mask(states), dtype=bool)
    else:
        cache = CachedEvaluator(system.evaluator)
        outs = evaluate_many(cache, [int(s) for s in states], workers)
        mask = np.array([o.failed for o in outs], dtype=bool)
    probs = _state_probs(states, system.reliability)
    lolp = math.fsum(probs[mask].tolist())
    minimal = mask.copy()
    for i in range(n):
        has = ((states >> i) & 1).astype(bool)
        below = mask[states ^ (1 << i)]
        minimal &= ~(has & below)
    cuts = [SystemState(int(b), n) for b in states[minimal]]
    cuts.sort(key=SystemState.sort_key)
    return OracleResult(system.name, n, lolp, cuts, int(mask.sum()), 1 << n,
                        time.perf_counter() - t0)
