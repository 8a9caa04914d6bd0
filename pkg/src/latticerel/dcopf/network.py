"""Network data for the DC load-shedding model."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..state import SystemState


@dataclass(frozen=True)
class Bus:
    id: str
    demand: float = 0.0


@dataclass(frozen=True)
class Generator:
    id: str
    bus: str
    capacity: float
    failure_prob: float = 0.0


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    capacity: float
    susceptance: float
    failure_prob: float = 0.0


@dataclass(frozen=True)
class NetworkModel:
    """Buses, generators and lines; components are generators then lines.

    Component ``k`` (1-based) is ``generators[k - 1]`` for ``k <= len(generators)``
    and ``lines[k - len(generators) - 1]`` otherwise.
    """

    buses: tuple[Bus, ...]
    generators: tuple[Generator, ...]
    lines: tuple[Line, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "lines", tuple(self.lines))
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise ValueError("bus ids must be unique")
        known = set(ids)
        for b in self.buses:
            if b.demand < 0:
                raise ValueError(f"bus {b.id}: negative demand")
        for g in self.generators:
            if g.bus not in known:
                raise ValueError(f"generator {g.id}: unknown bus {g.bus!r}")
            if g.capacity < 0:
                raise ValueError(f"generator {g.id}: negative capacity")
        for ln in self.lines:
            for end in (ln.from_bus, ln.to_bus):
                if end not in known:
                    raise ValueError(f"line {ln.id}: unknown bus {end!r}")
            if ln.from_bus == ln.to_bus:
                raise ValueError(f"line {ln.id}: both ends on bus {ln.from_bus!r}")
            if ln.capacity < 0:
                raise ValueError(f"line {ln.id}: negative capacity")
            if not ln.susceptance > 0:
                raise ValueError(f"line {ln.id}: susceptance must be positive")

    @property
    def n_components(self) -> int:
        return len(self.generators) + len(self.lines)

    @property
    def total_demand(self) -> float:
        return sum(b.demand for b in self.buses)

    @property
    def failure_probs(self) -> list[float]:
        return [g.failure_prob for g in self.generators] + [ln.failure_prob for ln in self.lines]

    def component_name(self, k: int) -> str:
        ng = len(self.generators)
        return self.generators[k - 1].id if k <= ng else self.lines[k - ng - 1].id

    def scaled(self, factor: float) -> NetworkModel:
        """Copy with every capacity and demand multiplied by ``factor``."""
        return NetworkModel(
            tuple(dataclasses.replace(b, demand=b.demand * factor) for b in self.buses),
            tuple(dataclasses.replace(g, capacity=g.capacity * factor) for g in self.generators),
            tuple(dataclasses.replace(ln, capacity=ln.capacity * factor) for ln in self.lines),
        )


def apply_state(net: NetworkModel, s: SystemState) -> NetworkModel:
    """Failed generators keep their slot with zero capacity; failed lines are dropped."""
    if s.n != net.n_components:
        raise ValueError(f"state width {s.n} does not match {net.n_components} components")
    ng = len(net.generators)
    gens = tuple(
        dataclasses.replace(g, capacity=0.0) if s.bits >> k & 1 else g
        for k, g in enumerate(net.generators)
    )
    lines = tuple(ln for k, ln in enumerate(net.lines) if not s.bits >> (ng + k) & 1)
    return NetworkModel(net.buses, gens, lines)
