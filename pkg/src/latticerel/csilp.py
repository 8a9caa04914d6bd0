"""Critical-state identification by lattice partition (CSILP).

The state space is carved into failure lattices (every member fails), normal
cells (every member is known normal) and a frontier of 1-normal lattices
still to be analysed. Each round resolves the relative 2-level states of
every frontier lattice, which all sit on one global level, so the critical
set only changes at level boundaries and dominance checks within a level do
not depend on evaluation order.

LOLP bounds after each round:

* lower = total mass of the failure lattices,
* upper = 1 - total mass of the normal states seen by the evaluator.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .evaluator import (
    DOMINATED,
    BaseStateFailure,
    CachedEvaluator,
    CriticalSet,
    EvaluationOutcome,
    EvaluatorError,
    Via,
    evaluate_many,
)
from .partition import ColumnOrder, PartitionResult, choose_order, partition_by_level1, partition_by_level2
from .state import (
    ComponentReliability,
    Lattice,
    SystemState,
    lattice_members,
    lattice_probability,
    state_probability,
)
from .system import System


@dataclass(frozen=True)
class Criteria:
    """Stopping criteria; the run stops as soon as any one of them is met.

    ``None`` means unbounded. At least one criterion must be set.
    """

    max_evaluations: int | None = None
    min_gap: float | None = None
    max_level: int | None = None

    def __post_init__(self) -> None:
        values = (self.max_evaluations, self.min_gap, self.max_level)
        if all(v is None for v in values):
            raise ValueError("at least one stopping criterion must be finite")
        for name, v in zip(("max_evaluations", "min_gap", "max_level"), values):
            if v is not None and (v < 0 or (isinstance(v, float) and math.isnan(v))):
                raise ValueError(f"{name} must be non-negative, got {v}")

    @classmethod
    def complete(cls, n: int) -> Criteria:
        """Run until every level has been searched."""
        return cls(max_level=n)

    def as_dict(self) -> dict:
        return {
            "max_evaluations": self.max_evaluations,
            "min_gap": self.min_gap,
            "max_level": self.max_level,
        }


@dataclass(frozen=True)
class Bounds:
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(f"invalid bounds ({self.lower}, {self.upper})")

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def gap(b: Bounds) -> float:
    return max(0.0, b.upper - b.lower)


@dataclass
class TraceRow:
    evaluations: int
    lower: float
    upper: float
    elapsed_ms: float = 0.0

    @property
    def gap(self) -> float:
        return max(0.0, self.upper - self.lower)


@dataclass
class Ledger:
    """Everything the run has established so far.

    Attributes
    ----------
    failure_lattices : list of Lattice
        Cells whose minimal element fails, in creation order.
    normal_cells : list of Lattice
        Cells whose members are all known normal.
    evaluated_normals : dict
        Bitmasks of normal states seen by the evaluator (insertion ordered).
    frontier : list of Lattice
        1-normal lattices of dimension at least 2 awaiting analysis.
    outcomes : dict
        Evaluator outcome of every state evaluated in this run, by bitmask.
    evaluations : int
        Evaluator calls charged to the run (cache replays are free).
    """

    n: int
    failure_lattices: list[Lattice] = field(default_factory=list)
    failure_masses: list[float] = field(default_factory=list)
    normal_cells: list[Lattice] = field(default_factory=list)
    evaluated_normals: dict[int, float] = field(default_factory=dict)
    frontier: list[Lattice] = field(default_factory=list)
    outcomes: dict[int, EvaluationOutcome] = field(default_factory=dict)
    identified_at: dict[int, int] = field(default_factory=dict)
    trace: list[TraceRow] = field(default_factory=list)
    evaluations: int = 0
    level: int = 0

    def add_failure(self, lat: Lattice, r: ComponentReliability) -> None:
        self.failure_lattices.append(lat)
        self.failure_masses.append(lattice_probability(lat, r))

    def add_normal_state(self, bits: int, r: ComponentReliability) -> None:
        if bits not in self.evaluated_normals:
            self.evaluated_normals[bits] = state_probability(SystemState(bits, self.n), r)


def bounds(ledger: Ledger, reliability: ComponentReliability | None = None, *,
           tight_upper: bool = False) -> Bounds:
    """Lower and upper LOLP bounds implied by ``ledger``.

    With ``tight_upper`` the members of normal cells are counted as normal
    even when the evaluator never saw them.
    """
    lower = math.fsum(ledger.failure_masses)
    if tight_upper:
        if reliability is None:
            raise ValueError("tight upper bound needs the component reliabilities")
        known = dict(ledger.evaluated_normals)
        for cell in ledger.normal_cells:
            for s in cell:
                if s.bits not in known:
                    known[s.bits] = state_probability(s, reliability)
        normal = math.fsum(known.values())
    else:
        normal = math.fsum(ledger.evaluated_normals.values())
    lower = min(max(lower, 0.0), 1.0)
    upper = min(max(1.0 - normal, lower), 1.0)
    return Bounds(lower, upper)


@dataclass(frozen=True)
class CriticalRecord:
    state: SystemState
    level: int
    probability: float
    shed: float | None
    risk: float | None
    delta_lolp: float
    lolp_at_identification: float
    evaluations_at_identification: int
    failure_lattice_count: int


def attribution(ledger: Ledger, critical: CriticalSet) -> list[SystemState]:
    """Covering critical state of each failure lattice (same order as the ledger)."""
    out = []
    for lat in ledger.failure_lattices:
        c = critical.first_below_or_equal(lat.lower)
        if c is None:
            raise RuntimeError(f"failure lattice {lat!r} is not covered by any critical state")
        out.append(c)
    return out


def attribute(ledger: Ledger, critical: CriticalSet,
              reliability: ComponentReliability) -> list[CriticalRecord]:
    """Per-critical-state contribution and risk, in discovery order.

    Each failure lattice is charged to the earliest-discovered critical state
    below its minimal element. ``lolp_at_identification`` is the running
    total of those contributions up to and including the state.
    """
    masses: dict[int, list[float]] = {c.bits: [] for c in critical}
    for c, mass in zip(attribution(ledger, critical), ledger.failure_masses):
        masses[c.bits].append(mass)
    records = []
    running = []
    for c in critical:
        delta = math.fsum(masses[c.bits])
        running.append(delta)
        outcome = ledger.outcomes.get(c.bits)
        shed = outcome.shed if outcome is not None else None
        p = state_probability(c, reliability)
        records.append(CriticalRecord(
            state=c,
            level=c.level,
            probability=p,
            shed=shed,
            risk=None if shed is None else p * shed,
            delta_lolp=delta,
            lolp_at_identification=math.fsum(running),
            evaluations_at_identification=ledger.identified_at.get(c.bits, 0),
            failure_lattice_count=len(masses[c.bits]),
        ))
    return records


@dataclass
class CsilpResult:
    system: str
    n: int
    criteria: Criteria
    ledger: Ledger
    critical: CriticalSet
    bounds: Bounds
    records: list[CriticalRecord]
    stop_reason: str
    wall_time: float
    tight_upper: bool = False
    error: str | None = None

    @property
    def lolp(self) -> float:
        return self.bounds.lower

    @property
    def evaluations(self) -> int:
        return self.ledger.evaluations

    @property
    def critical_states(self) -> list[SystemState]:
        return list(self.critical)


class _Run:
    """Coordinator owning the ledger, cache and critical set of one run."""

    def __init__(self, system: System, cache: CachedEvaluator | None, workers: int,
                 tight_upper: bool):
        self.system = system
        self.n = system.n
        self.r = system.reliability
        self.cache = cache if cache is not None else CachedEvaluator(system.evaluator)
        if self.cache.n != self.n:
            raise ValueError("cache width does not match the system")
        self.workers = max(1, int(workers))
        self.tight_upper = tight_upper
        self.ledger = Ledger(self.n)
        self.critical = CriticalSet(self.n)
        self.t0 = time.perf_counter()

    # -- evaluation ----------------------------------------------------

    def evaluate(self, bits: list[int], *, charge: bool = True) -> list[EvaluationOutcome]:
        """Evaluate ``bits`` in order; returns outcomes and records them."""
        outs = evaluate_many(self.cache, bits, self.workers)
        for b, o in zip(bits, outs):
            if charge and o.via is Via.SOLVER:
                self.ledger.evaluations += 1
            self.ledger.outcomes[b] = o
            if o.failed:
                self.ledger.identified_at.setdefault(b, self.ledger.evaluations)
            else:
                self.ledger.add_normal_state(b, self.r)
        return outs

    def record_trace(self) -> None:
        b = bounds(self.ledger, self.r, tight_upper=self.tight_upper)
        row = TraceRow(self.ledger.evaluations, b.lower, b.upper,
                       (time.perf_counter() - self.t0) * 1e3)
        trace = self.ledger.trace
        if trace and trace[-1].evaluations == row.evaluations:
            trace[-1] = row
        else:
            trace.append(row)

    # -- cells ---------------------------------------------------------

    def place(self, lat: Lattice) -> None:
        """File a 1-normal lattice: frontier if it still has 2-level states."""
        if lat.dimension >= 2:
            self.ledger.frontier.append(lat)
        else:
            self.ledger.normal_cells.append(lat)

    def absorb(self, parent: Lattice, part: PartitionResult, next_frontier: list[Lattice]) -> None:
        for lat in part.failure_lattices:
            self.ledger.add_failure(lat, self.r)
        self.ledger.normal_cells.extend(part.normal_lattices)
        for lat in part.one_normal_lattices:
            if lat.lower == parent.lower:
                # remainder with no failing pair: its 2-level states are all
                # normal, so its columns are 1-normal one level further up
                order = ColumnOrder.sequential(lat.free_components)
                cols = partition_by_level1(lat, order, lat.dimension - 1, failures=0)
                for cell in cols.one_normal_lattices:
                    (next_frontier if cell.dimension >= 2 else self.ledger.normal_cells).append(cell)
            elif lat.dimension >= 2:
                next_frontier.append(lat)
            else:
                self.ledger.normal_cells.append(lat)

    # -- phases --------------------------------------------------------

    def bootstrap(self) -> None:
        n = self.n
        base = self.evaluate([0], charge=False)[0]
        if base.failed:
            raise BaseStateFailure("the intact system already fails")
        singles = [1 << i for i in range(n)]
        outs = self.evaluate(singles)
        failed = [i + 1 for i, o in enumerate(outs) if o.failed]
        for c in failed:
            self.critical.insert(SystemState.of([c], n))
        whole = Lattice.whole(n)
        if failed:
            normal = [i for i in range(1, n + 1) if i not in set(failed)]
            part = partition_by_level1(whole, ColumnOrder.sequential(failed + normal),
                                       len(failed))
            for lat in part.failure_lattices:
                self.ledger.add_failure(lat, self.r)
            for lat in part.one_normal_lattices:
                self.place(lat)
        else:
            self.place(whole)
        self.ledger.level = 1
        self.record_trace()

    def candidates(self, lattices: list[Lattice]) -> list[tuple[SystemState, int]]:
        cands = [(s, li) for li, lat in enumerate(lattices) for s in lattice_members(lat, 2)]
        cands.sort(key=lambda item: item[0].components)
        return cands

    def process_level(self) -> None:
        lattices = self.ledger.frontier
        cands = self.candidates(lattices)
        status: dict[int, EvaluationOutcome] = {}
        todo = []
        for s, _ in cands:
            if self.critical.dominated_bits(s.bits):
                status[s.bits] = DOMINATED
            else:
                todo.append(s.bits)
        # an evaluator error here leaves the frontier and critical set untouched
        for b, o in zip(todo, self.evaluate(todo)):
            status[b] = o
            if o.failed:
                self.critical.insert(SystemState(b, self.n))

        pairs: list[list[SystemState]] = [[] for _ in lattices]
        for s, li in cands:
            if status[s.bits].failed:
                pairs[li].append(s)
        next_frontier: list[Lattice] = []
        for lat, fp in zip(lattices, pairs):
            part = partition_by_level2(lat, choose_order(lat, fp), fp)
            self.absorb(lat, part, next_frontier)
        self.ledger.frontier = next_frontier
        self.ledger.level += 1
        self.record_trace()

    def stop_reason(self, criteria: Criteria) -> str | None:
        if not self.ledger.frontier:
            return "complete"
        if criteria.max_level is not None and self.ledger.level >= criteria.max_level:
            return "max_level"
        if criteria.max_evaluations is not None and self.ledger.evaluations >= criteria.max_evaluations:
            return "max_evaluations"
        if criteria.min_gap is not None:
            b = bounds(self.ledger, self.r, tight_upper=self.tight_upper)
            if gap(b) <= criteria.min_gap:
                return "min_gap"
        return None


def bootstrap(system: System, cache: CachedEvaluator | None = None) -> tuple[Ledger, CriticalSet]:
    """Evaluate the intact state and every single outage, then split the space.

    The intact state is checked but not charged to the evaluation count.

    Raises
    ------
    BaseStateFailure
        If the intact system already fails.
    """
    run_ = _Run(system, cache, 1, False)
    run_.bootstrap()
    return run_.ledger, run_.critical


def analyze_one_normal(lat: Lattice, critical: CriticalSet, cache: CachedEvaluator,
                       ledger: Ledger, reliability: ComponentReliability | None = None,
                       ) -> tuple[CriticalSet, PartitionResult]:
    """Resolve the relative 2-level states of one 1-normal lattice and split it.

    Dominated states are classified without an evaluator call; the others
    are evaluated through ``cache`` (``ledger.evaluations`` counts the calls)
    and new failures join ``critical``. The cells are returned, not filed.
    """
    if lat.dimension < 2:
        raise ValueError(f"lattice {lat!r} has dimension < 2")
    if lat.n != critical.n or lat.n != cache.n:
        raise ValueError("lattice, critical set and cache widths differ")
    r = reliability if reliability is not None else ComponentReliability.uniform(lat.n, 0.0)
    fake = System("<lattice>", "custom", cache.inner, r)
    run_ = _Run(fake, cache, 1, False)
    run_.ledger, run_.critical = ledger, critical
    fp = []
    todo = []
    for s in lattice_members(lat, 2):
        if critical.dominated_bits(s.bits):
            fp.append(s)
        else:
            todo.append(s.bits)
    for b, o in zip(todo, run_.evaluate(todo)):
        if o.failed:
            critical.insert(SystemState(b, lat.n))
            fp.append(SystemState(b, lat.n))
    fp.sort(key=SystemState.sort_key)
    return critical, partition_by_level2(lat, choose_order(lat, fp), fp)


def run(system: System, criteria: Criteria, *, workers: int = 1, tight_upper: bool = False,
        cache: CachedEvaluator | None = None) -> CsilpResult:
    """Identify critical states and bound LOLP until a criterion is met.

    Evaluator errors end the run early; the partial result carries the
    message in ``error`` and ``stop_reason == "evaluator_error"``.

    Raises
    ------
    BaseStateFailure
        If the intact system already fails.
    """
    r = _Run(system, cache, workers, tight_upper)
    error = None
    try:
        r.bootstrap()
        while (reason := r.stop_reason(criteria)) is None:
            r.process_level()
    except EvaluatorError as exc:
        error = str(exc)
        reason = "evaluator_error"
        r.record_trace()
    wall = time.perf_counter() - r.t0
    b = bounds(r.ledger, system.reliability, tight_upper=tight_upper)
    records = attribute(r.ledger, r.critical, system.reliability)
    return CsilpResult(system.name, system.n, criteria, r.ledger, r.critical, b, records,
                       reason, wall, tight_upper, error)
