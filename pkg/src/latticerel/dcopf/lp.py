"""Dense bounded-variable primal simplex for small equality-form LPs.

Solves ``min c.x  s.t.  A x = b,  lb <= x <= ub`` where bounds may be
infinite. Variables are shifted so every nonbasic variable sits at a finite
bound (or at zero when free); phase I drives artificial variables out, and
phase II keeps any that remain basic pinned to ``[0, 0]``.

Pricing is Dantzig's rule; after a run of degenerate pivots it switches to
Bland's smallest-index rule until progress resumes, which rules out cycling.
The basis is refactorised from scratch each iteration. Problems here have at
most a few hundred columns, so this is cheap and keeps round-off from
accumulating.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11
RESIDUAL_TOL = 1e-8
_BLAND_AFTER = 25

_LOWER, _UPPER, _FREE, _BASIC = 0, 1, 2, 3


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpError(RuntimeError):
    """Malformed input or numerical breakdown; ``diagnostics`` holds details."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float).ravel()
        a = np.asarray(self.a_eq, dtype=float)
        if a.size == 0:
            a = a.reshape(0, c.size)
        b = np.asarray(self.b_eq, dtype=float).ravel()
        lb = np.asarray(self.lb, dtype=float).ravel()
        ub = np.asarray(self.ub, dtype=float).ravel()
        n = c.size
        if a.ndim != 2 or a.shape[1] != n:
            raise LpError("constraint matrix does not match objective length",
                          a_shape=a.shape, n=n)
        if b.size != a.shape[0]:
            raise LpError("right-hand side does not match constraint rows",
                          rows=a.shape[0], rhs=b.size)
        if lb.size != n or ub.size != n:
            raise LpError("bounds do not match objective length", lb=lb.size, ub=ub.size, n=n)
        if np.any(lb > ub) or np.any(np.isnan(lb)) or np.any(np.isnan(ub)):
            raise LpError("variable bounds are inconsistent",
                          bad=np.flatnonzero(~(lb <= ub)).tolist())
        if np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise LpError("a variable bound is infinite on the wrong side")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise LpError("objective, matrix and right-hand side must be finite")
        for name, value in (("c", c), ("a_eq", a), ("b_eq", b), ("lb", lb), ("ub", ub)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a_eq.shape


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    objective: float = float("nan")
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    iterations: int = 0
    residual: float = float("nan")
    info: dict = field(default_factory=dict)


def dual_bound(lp: LinearProgram, y: np.ndarray, tol: float = OPT_TOL) -> float:
    """Lagrangian lower bound on the optimum for equality multipliers ``y``.

    Reduced costs within ``tol`` of zero are treated as zero. Returns
    ``-inf`` when ``y`` leaves a reduced cost pointing at an infinite bound.
    """
    d = lp.c - lp.a_eq.T @ y
    total = float(lp.b_eq @ y)
    for dj, lo, hi in zip(d, lp.lb, lp.ub):
        if abs(dj) <= tol:
            continue
        if dj > 0:
            if not np.isfinite(lo):
                return -np.inf
            total += dj * lo
        elif dj < 0:
            if not np.isfinite(hi):
                return -np.inf
            total += dj * hi
    return total


class _Simplex:
    """Working state shared by both phases."""

    def __init__(self, m: np.ndarray, b: np.ndarray, lo: np.ndarray, up: np.ndarray):
        self.M = m
        self.b = b
        self.lo = lo
        self.up = up
        rows, cols = m.shape
        self.x = np.zeros(cols)
        self.state = np.where(np.isfinite(lo), _LOWER, _FREE)
        self.x[self.state == _LOWER] = lo[self.state == _LOWER]
        self.basis = np.arange(cols - rows, cols)
        self.state[self.basis] = _BASIC
        self.iterations = 0

    def _refresh(self) -> np.ndarray:
        basic = self.state == _BASIC
        rhs = self.b - self.M[:, ~basic] @ self.x[~basic]
        try:
            xb = np.linalg.solve(self.M[:, self.basis], rhs)
        except np.linalg.LinAlgError as exc:
            raise LpError("basis matrix became singular", iteration=self.iterations) from exc
        self.x[self.basis] = xb
        return xb

    def run(self, cost: np.ndarray, max_iter: int, opt_tol: float) -> tuple[LpStatus, np.ndarray]:
        degenerate = 0
        cols = self.M.shape[1]
        index = np.arange(cols)
        while True:
            if self.iterations >= max_iter:
                raise LpError("iteration limit reached", iterations=self.iterations)
            B = self.M[:, self.basis]
            xb = self._refresh()
            try:
                pi = np.linalg.solve(B.T, cost[self.basis])
            except np.linalg.LinAlgError as exc:
                raise LpError("basis matrix became singular", iteration=self.iterations) from exc
            d = cost - self.M.T @ pi

            movable = self.up > self.lo
            up_ok = (self.state == _LOWER) & (d < -opt_tol) & movable
            down_ok = (self.state == _UPPER) & (d > opt_tol)
            free_ok = (self.state == _FREE) & (np.abs(d) > opt_tol)
            cand = up_ok | down_ok | free_ok
            if not cand.any():
                return LpStatus.OPTIMAL, pi
            if degenerate >= _BLAND_AFTER:
                j = int(index[cand][0])
            else:
                score = np.where(cand, np.abs(d), -1.0)
                j = int(np.argmax(score))
            sigma = 1.0 if (up_ok[j] or (free_ok[j] and d[j] < 0)) else -1.0

            alpha = np.linalg.solve(B, self.M[:, j])
            delta = sigma * alpha
            blo = self.lo[self.basis]
            bup = self.up[self.basis]
            ratios = np.full(len(self.basis), np.inf)
            hit_upper = np.zeros(len(self.basis), dtype=bool)
            dec = (delta > PIVOT_TOL) & np.isfinite(blo)
            ratios[dec] = (xb[dec] - blo[dec]) / delta[dec]
            inc = (delta < -PIVOT_TOL) & np.isfinite(bup)
            ratios[inc] = (bup[inc] - xb[inc]) / -delta[inc]
            hit_upper[inc] = True
            ratios = np.maximum(ratios, 0.0)

            span = self.up[j] - self.lo[j] if np.isfinite(self.lo[j]) else np.inf
            t_basic = ratios.min() if len(ratios) else np.inf
            if not np.isfinite(t_basic) and not np.isfinite(span):
                return LpStatus.UNBOUNDED, pi
            self.iterations += 1

            if span <= t_basic:
                # bound flip, basis unchanged
                if self.state[j] == _LOWER:
                    self.x[j], self.state[j] = self.up[j], _UPPER
                else:
                    self.x[j], self.state[j] = self.lo[j], _LOWER
                degenerate = 0
                continue

            ties = np.flatnonzero(ratios <= t_basic + 1e-12)
            if degenerate >= _BLAND_AFTER:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(delta[ties]))])
            leaving = int(self.basis[r])
            self.x[j] += sigma * t_basic
            if hit_upper[r]:
                self.x[leaving], self.state[leaving] = self.up[leaving], _UPPER
            else:
                self.x[leaving], self.state[leaving] = self.lo[leaving], _LOWER
            self.basis[r] = j
            self.state[j] = _BASIC
            degenerate = degenerate + 1 if t_basic <= 1e-12 else 0


def solve_lp(
    lp: LinearProgram,
    *,
    feas_tol: float = FEAS_TOL,
    opt_tol: float = OPT_TOL,
    max_iter: int | None = None,
) -> LpSolution:
    """Solve ``lp``; infeasible and unbounded problems are reported, not raised."""
    a, b, c = lp.a_eq, lp.b_eq, lp.c
    rows, n = a.shape
    lb, ub = lp.lb, lp.ub

    fin_l, fin_u = np.isfinite(lb), np.isfinite(ub)
    flip = ~fin_l & fin_u
    sign = np.where(flip, -1.0, 1.0)
    shift = np.where(fin_l, lb, np.where(flip, ub, 0.0))
    lo = np.where(fin_l | flip, 0.0, -np.inf)
    up = np.where(fin_l & fin_u, ub - lb, np.inf)

    a_s = a * sign
    b_s = b - a @ shift
    row_sign = np.where(b_s < 0, -1.0, 1.0)
    a_s = a_s * row_sign[:, None]
    b_s = b_s * row_sign

    full = np.hstack([a_s, np.eye(rows)])
    lo_f = np.concatenate([lo, np.zeros(rows)])
    up_f = np.concatenate([up, np.full(rows, np.inf)])
    limit = max_iter if max_iter is not None else 50 * (rows + n + 10)

    sx = _Simplex(full, b_s, lo_f, up_f)
    phase1 = np.concatenate([np.zeros(n), np.ones(rows)])
    status, _ = sx.run(phase1, limit, opt_tol)
    if status is not LpStatus.OPTIMAL:
        raise LpError("phase I reported an unbounded ray", iterations=sx.iterations)
    scale = max(1.0, float(np.abs(b_s).max(initial=0.0)))
    infeas = float(sx.x[n:].sum())
    if infeas > feas_tol * scale:
        return LpSolution(LpStatus.INFEASIBLE, iterations=sx.iterations,
                          info={"phase1_infeasibility": infeas})

    sx.up[n:] = 0.0
    nonbasic_art = (sx.state[n:] != _BASIC)
    sx.x[n:][nonbasic_art] = 0.0
    phase2 = np.concatenate([c * sign, np.zeros(rows)])
    status, pi = sx.run(phase2, limit, opt_tol)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, iterations=sx.iterations)

    y = sx.x[:n]
    x = shift + sign * y
    # clip round-off just outside the box
    slack_tol = feas_tol * scale
    if np.any(x < lb - slack_tol) or np.any(x > ub + slack_tol):
        raise LpError("solution violates variable bounds", iterations=sx.iterations,
                      worst=float(max(np.max(lb - x), np.max(x - ub))))
    x = np.clip(x, lb, ub)
    residual = float(np.abs(a @ x - b).max(initial=0.0))
    if residual > RESIDUAL_TOL * scale:
        raise LpError("equality residual above tolerance", residual=residual,
                      iterations=sx.iterations)
    duals = pi * row_sign
    return LpSolution(LpStatus.OPTIMAL, float(c @ x), x, duals, sx.iterations, residual)
