"""Splitting a lattice into failure, 1-normal and normal cells.

Notation follows the usual column picture of an ``d``-dimensional lattice
``[lo, up]`` whose free components are put in a column order
``c_1, ..., c_d``:

* ``a_i  = lo + {c_i}`` and ``a_ij = lo + {c_i, c_j}`` are the relative
  1- and 2-level states,
* ``t_i  = lo + {c_i, ..., c_d}`` and ``t_ij = a_i + {partners of c_i from
  position j on}`` are their conjugates, with ``t_(d+1) = lo`` and
  ``t_i(d+1) = a_i``.

Every column may order its own partners (the components placed after it).
That freedom is what lets each column list its failing pairs first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Collection, Iterable

from .state import Lattice, SystemState, iter_bits


@dataclass(frozen=True)
class ColumnOrder:
    """Ordering of the free components of a lattice.

    Attributes
    ----------
    columns : tuple of int
        Component ids ``c_1 .. c_d``.
    partners : tuple of tuple of int
        ``partners[i]`` orders ``columns[i + 1:]`` for column ``i``
        (0-based); the 2-level states of that column are taken in this order.
    """

    columns: tuple[int, ...]
    partners: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        if len(set(cols)) != len(cols):
            raise ValueError(f"column order repeats a component: {cols}")
        if not self.partners:
            partners = tuple(cols[i + 1:] for i in range(len(cols)))
        else:
            partners = tuple(tuple(p) for p in self.partners)
            if len(partners) != len(cols):
                raise ValueError("one partner ordering per column is required")
            for i, p in enumerate(partners):
                if sorted(p) != sorted(cols[i + 1:]):
                    raise ValueError(
                        f"partners of column {cols[i]} must permute {cols[i + 1:]}, got {p}"
                    )
        object.__setattr__(self, "partners", partners)

    @classmethod
    def sequential(cls, columns: Iterable[int]) -> ColumnOrder:
        return cls(tuple(columns))

    def __len__(self) -> int:
        return len(self.columns)


@dataclass
class PartitionResult:
    """Cells produced by one partition step."""

    failure_lattices: list[Lattice] = field(default_factory=list)
    one_normal_lattices: list[Lattice] = field(default_factory=list)
    normal_lattices: list[Lattice] = field(default_factory=list)

    def cells(self) -> list[Lattice]:
        return [*self.failure_lattices, *self.one_normal_lattices, *self.normal_lattices]


def _bit(c: int) -> int:
    return 1 << (c - 1)


def _bits_of(components: Iterable[int]) -> int:
    out = 0
    for c in components:
        out |= _bit(c)
    return out


def _check_order(lat: Lattice, order: ColumnOrder) -> None:
    if _bits_of(order.columns) != lat.free_bits or len(order) != lat.dimension:
        raise ValueError(
            f"column order {order.columns} is not a permutation of the free "
            f"components {lat.free_components} of {lat!r}"
        )


def conjugate_t(lat: Lattice, order: ColumnOrder, i: int) -> SystemState:
    """Join of the relative 1-level states ``a_i .. a_d``; ``lo`` for ``i = d + 1``."""
    _check_order(lat, order)
    d = lat.dimension
    if not 1 <= i <= d + 1:
        raise IndexError(f"conjugate index {i} outside 1..{d + 1}")
    return SystemState(lat.lower.bits | _bits_of(order.columns[i - 1:]), lat.n)


def conjugate_t2(lat: Lattice, order: ColumnOrder, i: int, j: int) -> SystemState:
    """Join of ``a_ik`` for ``k = j .. d``; equals ``a_i`` when ``j = d + 1``."""
    _check_order(lat, order)
    d = lat.dimension
    if not 1 <= i < j <= d + 1:
        raise IndexError(f"conjugate indices ({i}, {j}) violate 1 <= i < j <= {d + 1}")
    tail = order.partners[i - 1][j - i - 1:]
    bits = lat.lower.bits | _bit(order.columns[i - 1]) | _bits_of(tail)
    return SystemState(bits, lat.n)


def partition_by_level1(
    lat: Lattice, order: ColumnOrder, m: int, failures: int | None = None
) -> PartitionResult:
    """Split ``lat`` into the columns ``[a_i, t_i]`` (``i <= m``) and ``[lo, t_(m+1)]``.

    The first ``failures`` columns (default: all ``m``) are reported as failure
    lattices; the caller guarantees their ``a_i`` fail. Remaining columns and
    the tail are reported in ``one_normal_lattices``. They are 1-normal when
    the 2-level states they contain above their bottoms are known to be normal.
    """
    _check_order(lat, order)
    d = lat.dimension
    if not 1 <= m <= d:
        raise ValueError(f"m={m} outside 1..{d}")
    f = m if failures is None else failures
    if not 0 <= f <= m:
        raise ValueError(f"failures={f} outside 0..{m}")
    lo, n = lat.lower.bits, lat.n
    out = PartitionResult()
    suffix = _bits_of(order.columns)
    for idx in range(m):
        col = _bit(order.columns[idx])
        cell = Lattice(SystemState(lo | col, n), SystemState(lo | suffix, n))
        (out.failure_lattices if idx < f else out.one_normal_lattices).append(cell)
        suffix &= ~col
    out.one_normal_lattices.append(Lattice(lat.lower, SystemState(lo | suffix, n)))
    return out


def _column_failures(
    lat: Lattice, order: ColumnOrder, failure_pairs: Collection[SystemState]
) -> list[int]:
    """Number of failing partners per column; checks they lead each partner list."""
    lo = lat.lower.bits
    rel = set()
    for s in failure_pairs:
        if s.n != lat.n or s not in lat or s.level != lat.lower.level + 2:
            raise ValueError(f"{s!r} is not a relative 2-level state of {lat!r}")
        rel.add(s.bits & ~lo)
    counts = []
    seen = 0
    for idx, col in enumerate(order.columns):
        cb = _bit(col)
        flags = [(cb | _bit(p)) in rel for p in order.partners[idx]]
        k = sum(flags)
        if any(flags[k:]):
            raise ValueError(
                f"failing partners of column {col} are not contiguous from the start "
                f"of its partner order {order.partners[idx]}"
            )
        counts.append(k)
        seen += k
    if seen != len(rel):
        raise ValueError("failure pairs are not covered by the column order")
    return counts


def partition_by_level2(
    lat: Lattice, order: ColumnOrder, failure_pairs: Collection[SystemState]
) -> PartitionResult:
    """Split a 1-normal lattice by the status of its relative 2-level states.

    ``failure_pairs`` must list every failing relative 2-level state; pairs
    not listed are taken as normal. The order must put each column's failing
    partners first (see :func:`choose_order`).

    Each failing pair ``a_ij`` yields the failure lattice ``[a_ij, t_ij]`` and
    each failure-bearing column leaves the 1-normal residue
    ``[a_i, t_i(f_i+1)]``. Columns after the last failure-bearing one ``m``
    stay together in ``[lo, t_(m+1)]``. That remainder is normal when its top
    is at most two levels above ``lo`` (all such states are known normal),
    otherwise it is still only 1-normal.
    """
    if lat.dimension < 2:
        raise ValueError(f"level-2 partition needs dimension >= 2, got {lat!r}")
    _check_order(lat, order)
    counts = _column_failures(lat, order, failure_pairs)
    lo, n = lat.lower.bits, lat.n
    m = max((i + 1 for i, k in enumerate(counts) if k), default=0)
    out = PartitionResult()
    for idx in range(m):
        a_i = lo | _bit(order.columns[idx])
        partners = order.partners[idx]
        tail = _bits_of(partners)
        for p in partners[: counts[idx]]:
            out.failure_lattices.append(
                Lattice(SystemState(a_i | _bit(p), n), SystemState(a_i | tail, n))
            )
            tail &= ~_bit(p)
        out.one_normal_lattices.append(Lattice(SystemState(a_i, n), SystemState(a_i | tail, n)))
    remainder = Lattice(lat.lower, SystemState(lo | _bits_of(order.columns[m:]), n))
    if remainder.dimension <= 2:
        out.normal_lattices.append(remainder)
    else:
        out.one_normal_lattices.append(remainder)
    return out


def choose_order(lat: Lattice, failure_pairs: Collection[SystemState]) -> ColumnOrder:
    """Column order that leads with failure-bearing columns.

    Columns are picked greedily: the lowest-id unplaced component that still
    has a failing pair with an unplaced partner comes next, so every leading
    column owns at least one failing pair. Components without remaining pairs
    follow in ascending id. Within a column, failing partners come first
    (ascending id), then the rest (ascending id).
    """
    lo = lat.lower.bits
    pairs = []
    for s in failure_pairs:
        if s not in lat or s.level != lat.lower.level + 2:
            raise ValueError(f"{s!r} is not a relative 2-level state of {lat!r}")
        pairs.append(tuple(i + 1 for i in iter_bits(s.bits & ~lo)))
    remaining = set(pairs)
    free = list(lat.free_components)
    columns: list[int] = []
    placed: set[int] = set()
    while remaining:
        col = min(c for pair in remaining for c in pair)
        columns.append(col)
        placed.add(col)
        remaining = {pr for pr in remaining if col not in pr}
    columns.extend(c for c in free if c not in placed)

    fail_with: dict[int, set[int]] = {c: set() for c in free}
    for x, y in pairs:
        fail_with[x].add(y)
        fail_with[y].add(x)
    partners = []
    for idx, col in enumerate(columns):
        later = columns[idx + 1:]
        first = sorted(p for p in later if p in fail_with[col])
        rest = sorted(p for p in later if p not in fail_with[col])
        partners.append(tuple(first + rest))
    return ColumnOrder(tuple(columns), tuple(partners))

