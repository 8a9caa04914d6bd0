"""System states, the subset order, lattice intervals and probability arithmetic.

A system state is the set of failed components. Component ``i`` (1-based)
occupies bit ``i - 1`` of a Python integer, so subset tests, joins and meets
are single integer operations whatever the component count.

Probabilities are plain double-precision products. With ``n`` up to a few
hundred components and every ``p_i >= 1e-6`` the products stay far from the
subnormal range; smaller probabilities are accepted but may underflow to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class WidthMismatchError(ValueError):
    """Raised when states belonging to systems of different size are mixed."""


def _check_width(a: int, b: int) -> None:
    if a != b:
        raise WidthMismatchError(f"state widths differ: {a} != {b}")


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the zero-based positions of set bits in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True, slots=True)
class SystemState:
    """Set of failed components of an ``n``-component system.

    Attributes
    ----------
    bits : int
        Bit ``i - 1`` is set when component ``i`` has failed.
    n : int
        Number of components in the owning system.
    """

    bits: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a system needs at least one component")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} do not fit in width {self.n}")

    @classmethod
    def of(cls, components: Iterable[int], n: int) -> SystemState:
        """Build a state from 1-based component ids."""
        bits = 0
        for c in components:
            if not 1 <= c <= n:
                raise ValueError(f"component id {c} outside 1..{n}")
            bits |= 1 << (c - 1)
        return cls(bits, n)

    @classmethod
    def empty(cls, n: int) -> SystemState:
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> SystemState:
        return cls((1 << n) - 1, n)

    @property
    def components(self) -> tuple[int, ...]:
        """Failed component ids in ascending order."""
        return tuple(i + 1 for i in iter_bits(self.bits))

    @property
    def level(self) -> int:
        return self.bits.bit_count()

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Level first, then lexicographic order of component ids."""
        return (self.level, self.components)

    def __le__(self, other: SystemState) -> bool:
        return leq(self, other)

    def __lt__(self, other: SystemState) -> bool:
        return leq(self, other) and self.bits != other.bits

    def __ge__(self, other: SystemState) -> bool:
        return leq(other, self)

    def __gt__(self, other: SystemState) -> bool:
        return leq(other, self) and self.bits != other.bits

    def __or__(self, other: SystemState) -> SystemState:
        return join(self, other)

    def __and__(self, other: SystemState) -> SystemState:
        return meet(self, other)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.components)) + "}"


def level(s: SystemState) -> int:
    """Number of failed components in ``s``."""
    return s.bits.bit_count()


def leq(s: SystemState, t: SystemState) -> bool:
    """True when every component failed in ``s`` is also failed in ``t``."""
    _check_width(s.n, t.n)
    return s.bits & ~t.bits == 0


def join(s: SystemState, t: SystemState) -> SystemState:
    _check_width(s.n, t.n)
    return SystemState(s.bits | t.bits, s.n)


def meet(s: SystemState, t: SystemState) -> SystemState:
    _check_width(s.n, t.n)
    return SystemState(s.bits & t.bits, s.n)


def join_all(states: Iterable[SystemState], n: int) -> SystemState:
    """Least upper bound of a collection; the empty join is the empty state."""
    return reduce(join, states, SystemState.empty(n))


@dataclass(frozen=True, slots=True)
class Lattice:
    """Closed interval ``[lower, upper]`` of the state space."""

    lower: SystemState
    upper: SystemState

    def __post_init__(self) -> None:
        if not leq(self.lower, self.upper):
            raise ValueError(f"lattice bounds not ordered: {self.lower!r} > {self.upper!r}")

    @property
    def n(self) -> int:
        return self.lower.n

    @property
    def dimension(self) -> int:
        return self.upper.level - self.lower.level

    @property
    def free_bits(self) -> int:
        """Components failed at the top but operational at the bottom."""
        return self.upper.bits & ~self.lower.bits

    @property
    def free_components(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in iter_bits(self.free_bits))

    def __contains__(self, s: SystemState) -> bool:
        _check_width(s.n, self.n)
        return self.lower.bits & ~s.bits == 0 and s.bits & ~self.upper.bits == 0

    def __len__(self) -> int:
        return 1 << self.dimension

    def __iter__(self) -> Iterator[SystemState]:
        for k in range(self.dimension + 1):
            yield from lattice_members(self, k)

    def __repr__(self) -> str:
        return f"[{self.lower!r},{self.upper!r}]"

    @classmethod
    def whole(cls, n: int) -> Lattice:
        return cls(SystemState.empty(n), SystemState.full(n))


def lattice_members(lat: Lattice, k: int) -> list[SystemState]:
    """States of ``lat`` lying ``k`` levels above its minimal element.

    Members are listed in lexicographic order of the added free components.
    """
    if not 0 <= k <= lat.dimension:
        raise ValueError(f"relative level {k} outside 0..{lat.dimension}")
    free = [1 << i for i in iter_bits(lat.free_bits)]
    base = lat.lower.bits
    n = lat.n
    return [SystemState(base | sum(combo), n) for combo in combinations(free, k)]


@dataclass(frozen=True)
class ComponentReliability:
    """Per-component failure probabilities ``p`` and availabilities ``q = 1 - p``."""

    p: tuple[float, ...]
    q: tuple[float, ...]

    @classmethod
    def from_failure_probs(cls, p: Sequence[float]) -> ComponentReliability:
        p = tuple(float(x) for x in p)
        if not p:
            raise ValueError("at least one component is required")
        for i, x in enumerate(p, start=1):
            if not 0.0 <= x <= 1.0 or math.isnan(x):
                raise ValueError(f"failure probability of component {i} is {x}, not in [0, 1]")
        return cls(p, tuple(1.0 - x for x in p))

    @classmethod
    def uniform(cls, n: int, p: float) -> ComponentReliability:
        return cls.from_failure_probs([p] * n)

    @property
    def n(self) -> int:
        return len(self.p)


def _mask_product(values: tuple[float, ...], bits: int) -> float:
    out = 1.0
    for i in iter_bits(bits):
        out *= values[i]
    return out


def state_probability(s: SystemState, r: ComponentReliability) -> float:
    """Probability that exactly the components of ``s`` are failed."""
    _check_width(s.n, r.n)
    full = (1 << s.n) - 1
    return _mask_product(r.p, s.bits) * _mask_product(r.q, full & ~s.bits)


def lattice_probability(lat: Lattice, r: ComponentReliability) -> float:
    """Total probability of the states in ``lat``.

    Components below the lattice are failed, components outside its top are
    operational, and the free components sum out to one.
    """
    _check_width(lat.n, r.n)
    full = (1 << lat.n) - 1
    return _mask_product(r.p, lat.lower.bits) * _mask_product(r.q, full & ~lat.upper.bits)
