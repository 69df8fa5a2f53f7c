"""Numerical certification of the kernel bounds, cone membership, and growth.

The kernel checks sweep dense grids and grade four inequalities against their
stated envelopes with a small absolute slack for rounding:

* ``0 <= G(t,s) <= g0(s)``            on [0,1]^2
* ``G(t,s) >= k0*g0(s)``              on [eta/alpha, eta] x [0,1]
* ``0 <= dG/dt(t,s) <= g1(s)``        on [0,1]^2
* ``dG/dt(t,s) >= k1*g1(s)``          on [eta/alpha, eta] x [0,1]

These are grid sweeps, not proofs; a PASS means no violation beyond the slack
was found at the requested resolution.  The growth scan likewise only samples
ratio curves along user-chosen directions; it claims nothing about limits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .expr import EvalError, Expr, evaluate
from .gridfn import GridFunction
from .kernel import ProblemParams, g0_bound, g1_bound, green, green_dt

__all__ = [
    "KernelCheck",
    "CertificationReport",
    "certify_kernel",
    "ConeMembershipReport",
    "cone_membership",
    "GrowthScan",
    "growth_scan",
    "default_directions",
    "default_scales",
]

MIN_GRID = 11


@dataclass(frozen=True)
class KernelCheck:
    name: str
    description: str
    passed: bool
    worst_violation: float
    worst_t: float
    worst_s: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "worst_t": self.worst_t,
            "worst_s": self.worst_s,
        }


@dataclass(frozen=True)
class CertificationReport:
    grid_n: int
    slack: float
    checks: tuple[KernelCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "slack": self.slack,
            "all_passed": self.all_passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _worst(violation: np.ndarray, tg: np.ndarray, sg: np.ndarray) -> tuple[float, float, float]:
    i, j = np.unravel_index(int(np.argmax(violation)), violation.shape)
    return float(violation[i, j]), float(tg[i]), float(sg[j])


def certify_kernel(
    p: ProblemParams,
    grid_n: int = 401,
    slack: float = 1e-12,
    green_fn: Callable = green,
    green_dt_fn: Callable = green_dt,
) -> CertificationReport:
    """Grade the four kernel inequalities on grid_n x grid_n sweeps.

    ``green_fn``/``green_dt_fn`` exist so the harness itself can be exercised
    against a deliberately corrupted kernel.
    """
    if grid_n < MIN_GRID:
        raise ValueError(f"grid too coarse: grid_n must be >= {MIN_GRID}")
    sg = np.linspace(0.0, 1.0, grid_n)
    tg = np.linspace(0.0, 1.0, grid_n)
    tw = np.linspace(p.eta / p.alpha, p.eta, grid_n)
    T, S = np.meshgrid(tg, sg, indexing="ij")
    Tw, Sw = np.meshgrid(tw, sg, indexing="ij")

    checks = []
    G = green_fn(p, T, S)
    g0 = g0_bound(p, S)
    v, vt, vs = _worst(np.maximum(-G, G - g0), tg, sg)
    checks.append(KernelCheck(
        "green_envelope", "0 <= G(t,s) <= g0(s) on [0,1]^2",
        v <= slack, v, vt, vs,
    ))
    Gw = green_fn(p, Tw, Sw)
    v, vt, vs = _worst(p.k0 * g0_bound(p, Sw) - Gw, tw, sg)
    checks.append(KernelCheck(
        "green_cone_lower", "G(t,s) >= k0*g0(s) on [eta/alpha,eta]x[0,1]",
        v <= slack, v, vt, vs,
    ))
    D = green_dt_fn(p, T, S)
    g1 = g1_bound(p, S)
    v, vt, vs = _worst(np.maximum(-D, D - g1), tg, sg)
    checks.append(KernelCheck(
        "green_dt_envelope", "0 <= dG/dt(t,s) <= g1(s) on [0,1]^2",
        v <= slack, v, vt, vs,
    ))
    Dw = green_dt_fn(p, Tw, Sw)
    v, vt, vs = _worst(p.k1 * g1_bound(p, Sw) - Dw, tw, sg)
    checks.append(KernelCheck(
        "green_dt_cone_lower", "dG/dt(t,s) >= k1*g1(s) on [eta/alpha,eta]x[0,1]",
        v <= slack, v, vt, vs,
    ))
    return CertificationReport(grid_n=grid_n, slack=slack, checks=tuple(checks))


@dataclass(frozen=True)
class ConeMembershipReport:
    member: bool
    nonneg_ok: bool
    value_lower_ok: bool
    deriv_lower_ok: bool
    value_margin: float
    deriv_margin: float
    k0: float
    k1: float

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "nonneg_ok": self.nonneg_ok,
            "value_lower_ok": self.value_lower_ok,
            "deriv_lower_ok": self.deriv_lower_ok,
            "value_margin": self.value_margin,
            "deriv_margin": self.deriv_margin,
            "k0": self.k0,
            "k1": self.k1,
        }


def cone_membership(p: ProblemParams, g: GridFunction, slack: float = 1e-9) -> ConeMembershipReport:
    """Check the three cone conditions on the node data of g.

    Requires the node set to contain eta/alpha and eta, so the window
    [eta/alpha, eta] is read at exact nodes.  The conditions are
    ``g >= 0`` everywhere, ``min_window g >= k0 * max|g| - slack`` and
    ``min_window g' >= k1 * max|g'| - slack``.
    """
    nodes = g.nodes
    lo, hi = p.eta / p.alpha, p.eta
    if np.min(np.abs(nodes - lo)) > 1e-12 or np.min(np.abs(nodes - hi)) > 1e-12:
        raise ValueError("node set must contain eta/alpha and eta")
    window = (nodes >= lo - 1e-12) & (nodes <= hi + 1e-12)
    nonneg_ok = bool(np.min(g.values) >= -slack)
    value_margin = float(np.min(g.values[window]) - p.k0 * np.max(np.abs(g.values)))
    deriv_margin = float(np.min(g.derivs[window]) - p.k1 * np.max(np.abs(g.derivs)))
    value_lower_ok = value_margin >= -slack
    deriv_lower_ok = deriv_margin >= -slack
    return ConeMembershipReport(
        member=nonneg_ok and value_lower_ok and deriv_lower_ok,
        nonneg_ok=nonneg_ok,
        value_lower_ok=value_lower_ok,
        deriv_lower_ok=deriv_lower_ok,
        value_margin=value_margin,
        deriv_margin=deriv_margin,
        k0=p.k0,
        k1=p.k1,
    )


Direction = tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]


def default_directions() -> list[Direction]:
    """(phi, psi) profiles: (1,1), (1,0), (0,1), (t,1).

    The degenerate profiles keep one of the two state amplitudes pinned while
    the other grows, probing growth that depends on only one norm.
    """
    one = lambda t: np.ones_like(t)
    zero = lambda t: np.zeros_like(t)
    ident = lambda t: np.asarray(t, dtype=float)
    return [(one, one), (one, zero), (zero, one), (ident, one)]


def default_scales(lo: float = 1e-6, hi: float = 1e6, num: int = 25) -> np.ndarray:
    return np.geomspace(lo, hi, num)


@dataclass(frozen=True)
class GrowthScan:
    scales: np.ndarray
    ratios: np.ndarray

    def to_dict(self) -> dict:
        return {"scales": self.scales.tolist(), "ratios": self.ratios.tolist()}


def growth_scan(
    e: Expr,
    directions: Sequence[Direction] | None = None,
    scales: np.ndarray | None = None,
    t_samples: int = 101,
) -> GrowthScan:
    """Sample ratio(c) = max over t and directions of e(t, c*phi, c*psi)/(c*(|phi|+|psi|)).

    This is a diagnostic: it plots how the expression compares to the sum of
    its state arguments along the chosen rays.  Samples where |phi|+|psi| = 0
    cannot define a ratio and are skipped.
    """
    dirs = list(directions) if directions is not None else default_directions()
    sc = np.asarray(scales if scales is not None else default_scales(), dtype=float)
    if sc.size == 0 or np.any(sc <= 0) or np.any(np.diff(sc) <= 0):
        raise ValueError("scales must be positive and strictly increasing")
    tg = np.linspace(0.0, 1.0, t_samples)
    profiles = []
    for phi, psi in dirs:
        ph = np.broadcast_to(np.asarray(phi(tg), dtype=float), tg.shape)
        ps = np.broadcast_to(np.asarray(psi(tg), dtype=float), tg.shape)
        if np.any(ph < 0) or np.any(ps < 0) or not (ph + ps > 0).any():
            raise ValueError("directions must be nonnegative and not identically zero")
        profiles.append((ph, ps))
    ratios = np.empty_like(sc)
    for i, c in enumerate(sc):
        best = -np.inf
        for ph, ps in profiles:
            ok = ph + ps > 0.0
            denom = c * (np.abs(ph[ok]) + np.abs(ps[ok]))
            try:
                num = e.eval_array(tg[ok], c * ph[ok], c * ps[ok])
            except EvalError as err:
                t_bad = _first_faulting_t(e, tg[ok], c * ph[ok], c * ps[ok])
                raise EvalError(f"{err} at scale c={c:g}, t={t_bad:g}") from err
            best = max(best, float(np.max(num / denom)))
        ratios[i] = best
    return GrowthScan(scales=sc, ratios=ratios)


def _first_faulting_t(e: Expr, tg, ys, yps) -> float:
    for t0, y0, p0 in zip(tg, ys, yps):
        try:
            evaluate(e, t0, y0, p0)
        except EvalError:
            return float(t0)
    return float(tg[0])
