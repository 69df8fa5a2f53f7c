"""Application of the coupled integral operator to grid functions.

Each half of the coupled system maps a state w (a :class:`GridFunction`)
through

    (value)       t  ->  integral_0^1 G(t, s)      src(s, w(s), w'(s)) ds
    (derivative)  t  ->  integral_0^1 dG/dt(t, s)  src(s, w(s), w'(s)) ds

where ``src`` is a parsed expression with (t, y, yp) bound to
(s, w(s), w'(s)).  Because G and dG/dt are polynomials of degree <= 2 in s
between the seams {t, eta}, every node integral is a fixed linear combination
of the cumulative source moments

    P_k(x) = integral_0^x s^k src(...) ds,   k = 0, 1, 2,

taken at panel boundaries.  The source is therefore evaluated once per sweep
on a shared panel decomposition (all nodes, eta, and the rule's breakpoints),
and each node costs O(1) arithmetic afterwards.  Every coefficient carries a
factor t or t^2, so outputs vanish (value and derivative) exactly at t = 0,
and dG/dt(1, s) = alpha * dG/dt(eta, s) pointwise makes the three-point
derivative condition hold to rounding for any source.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .expr import Expr
from .gridfn import GridFunction, interpolate
from .kernel import ProblemParams
from .quadrature import QuadratureRule, panel_points

__all__ = ["CoupledState", "apply_T1", "apply_T2", "apply_operator"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoupledState:
    """The pair (u, v) on a shared node set."""

    u: GridFunction
    v: GridFunction

    def __post_init__(self) -> None:
        if not np.array_equal(self.u.nodes, self.v.nodes):
            raise ValueError("u and v must share the same node set")

    @property
    def nodes(self) -> np.ndarray:
        return self.u.nodes


class _MomentOperator:
    """Cumulative-moment evaluation of the kernel integrals at the nodes."""

    def __init__(self, p: ProblemParams, nodes: np.ndarray, rule: QuadratureRule):
        self.p = p
        self.nodes = nodes
        bounds = np.unique(np.concatenate([nodes, np.asarray(rule.breakpoints), [p.eta]]))
        self.s, self.w = panel_points(bounds, rule.points_per_panel)
        self.s_flat = self.s.ravel()
        self.node_pos = np.searchsorted(bounds, nodes)
        self.eta_pos = int(np.searchsorted(bounds, p.eta))

    def apply(self, src_vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Integrate the sampled source against G and dG/dt at every node."""
        p, t = self.p, self.nodes
        a, e, den = p.alpha, p.eta, p.gap
        phi = src_vals.reshape(self.s.shape)
        cums = []
        for k in range(3):
            panel = np.sum(self.w * self.s**k * phi, axis=1)
            cums.append(np.concatenate([[0.0], np.cumsum(panel)]))
        # P_k(x) at the node positions and at the seam eta / the right end
        P = [c[self.node_pos] for c in cums]
        Pe = [c[self.eta_pos] for c in cums]
        P1 = [c[-1] for c in cums]

        lo = t <= e
        t2 = t * t
        # value combination: branch polynomials of G grouped by s-interval
        A1 = t + t2 * (a - 1) / (2 * den)
        B0 = t2 / 2
        B1 = t2 * (a - 1) / (2 * den)
        C0 = t2 * a * e / (2 * den)
        C1 = t - t2 / (2 * den)
        D0 = t2 / (2 * den)
        values = np.where(
            lo,
            A1 * P[1] - 0.5 * P[2]
            + B0 * (Pe[0] - P[0]) + B1 * (Pe[1] - P[1])
            + D0 * ((P1[0] - Pe[0]) - (P1[1] - Pe[1])),
            A1 * Pe[1] - 0.5 * Pe[2]
            + C0 * (P[0] - Pe[0]) + C1 * (P[1] - Pe[1]) - 0.5 * (P[2] - Pe[2])
            + D0 * ((P1[0] - P[0]) - (P1[1] - P[1])),
        )
        # derivative combination: branch polynomials of dG/dt
        a1 = 1 + t * (a - 1) / den
        b1 = t * (a - 1) / den
        c0 = t * a * e / den
        c1 = 1 - t / den
        d0 = t / den
        derivs = np.where(
            lo,
            a1 * P[1]
            + t * (Pe[0] - P[0]) + b1 * (Pe[1] - P[1])
            + d0 * ((P1[0] - Pe[0]) - (P1[1] - Pe[1])),
            a1 * Pe[1]
            + c0 * (P[0] - Pe[0]) + c1 * (P[1] - Pe[1])
            + d0 * ((P1[0] - P[0]) - (P1[1] - P[1])),
        )
        return values, derivs


def _sample_state(g: GridFunction, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interpolate the state at quadrature points, clamped to y, yp >= 0.

    The source expressions are only defined for nonnegative state arguments;
    interpolation may overshoot below zero by a rounding-level amount, which
    is clamped (and logged) rather than passed through.
    """
    vals, ders = interpolate(g, s)
    n_neg = int(np.sum(vals < 0.0) + np.sum(ders < 0.0))
    if n_neg:
        logger.debug("clamped %d negative interpolated state samples to 0", n_neg)
    return np.maximum(vals, 0.0), np.maximum(ders, 0.0)


def apply_operator(
    p: ProblemParams,
    src: Expr,
    state: GridFunction,
    rule: QuadratureRule = QuadratureRule(),
) -> GridFunction:
    """One half of the coupled sweep: integrate src(s, state, state') against the kernel.

    Returns a grid function on the same node set whose values come from G and
    whose derivatives come from dG/dt.  Output value and derivative at t = 0
    are exactly zero.
    """
    op = _MomentOperator(p, state.nodes, rule)
    y, yp = _sample_state(state, op.s_flat)
    src_vals = src.eval_array(op.s_flat, y, yp)
    values, derivs = op.apply(src_vals)
    return GridFunction(state.nodes, values, derivs)


def apply_T1(
    p: ProblemParams, f: Expr, v: GridFunction, rule: QuadratureRule = QuadratureRule()
) -> GridFunction:
    """First component: new u from the current v through the source f."""
    return apply_operator(p, f, v, rule)


def apply_T2(
    p: ProblemParams, h: Expr, u: GridFunction, rule: QuadratureRule = QuadratureRule()
) -> GridFunction:
    """Second component: new v from the current u through the source h."""
    return apply_operator(p, h, u, rule)
