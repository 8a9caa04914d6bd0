"""Minimum load shedding under DC power-flow constraints."""

from __future__ import annotations

import numpy as np

from ..evaluator import EvaluationOutcome, Evaluator, EvaluatorError, Status
from ..state import SystemState
from .lp import LinearProgram, LpError, LpStatus, solve_lp
from .network import NetworkModel, apply_state


def build_shed_lp(net: NetworkModel) -> LinearProgram:
    """Shed-minimising DC-OPF for an already derated network.

    Variable blocks, in order: generator outputs ``g in [0, cap]``, bus angles
    (free), line flows ``|f| <= cap`` and bus curtailments ``c in [0, demand]``.
    Rows are one power balance per bus
    (``gen + curtailment + inflow - outflow = demand``) followed by one flow
    definition per line (``f - B (theta_from - theta_to) = 0``). Angles are
    not pinned to a reference bus. Every island stays feasible through
    curtailment, so no island detection is needed.
    """
    bus_index = {b.id: i for i, b in enumerate(net.buses)}
    nb, ng, nl = len(net.buses), len(net.generators), len(net.lines)
    g0, th0, f0, c0 = 0, ng, ng + nb, ng + nb + nl
    nvar = c0 + nb
    a = np.zeros((nb + nl, nvar))
    b = np.zeros(nb + nl)
    lb = np.zeros(nvar)
    ub = np.zeros(nvar)
    cost = np.zeros(nvar)

    for k, g in enumerate(net.generators):
        a[bus_index[g.bus], g0 + k] = 1.0
        ub[g0 + k] = g.capacity
    lb[th0:f0] = -np.inf
    ub[th0:f0] = np.inf
    for k, ln in enumerate(net.lines):
        i, j = bus_index[ln.from_bus], bus_index[ln.to_bus]
        a[i, f0 + k] -= 1.0
        a[j, f0 + k] += 1.0
        row = nb + k
        a[row, f0 + k] = 1.0
        a[row, th0 + i] = -ln.susceptance
        a[row, th0 + j] = ln.susceptance
        lb[f0 + k] = -ln.capacity
        ub[f0 + k] = ln.capacity
    for i, bus in enumerate(net.buses):
        a[i, c0 + i] = 1.0
        ub[c0 + i] = bus.demand
        b[i] = bus.demand
        cost[c0 + i] = 1.0
    return LinearProgram(cost, a, b, lb, ub)


def min_load_shed(net: NetworkModel, s: SystemState) -> float:
    """Least total curtailment (MW) with the components of ``s`` out of service."""
    lp = build_shed_lp(apply_state(net, s))
    try:
        sol = solve_lp(lp)
    except LpError as exc:
        raise EvaluatorError(f"LP breakdown for state {s!r}: {exc}") from exc
    if sol.status is not LpStatus.OPTIMAL:
        raise EvaluatorError(f"shed LP for state {s!r} is {sol.status.value}")
    return max(sol.objective, 0.0)


class DcopfEvaluator(Evaluator):
    """Classifies a state as failed when the minimum shed exceeds ``threshold`` MW.

    The default threshold is ``1e-6`` of the total demand, floored at 1e-9 MW.
    """

    def __init__(self, net: NetworkModel, threshold: float | None = None):
        self.net = net
        self.n = net.n_components
        if threshold is None:
            threshold = max(1e-6 * net.total_demand, 1e-9)
        self.threshold = threshold

    def evaluate_bits(self, bits: int) -> EvaluationOutcome:
        shed = min_load_shed(self.net, SystemState(bits, self.n))
        status = Status.FAILURE if shed > self.threshold else Status.NORMAL
        return EvaluationOutcome(status, shed)
