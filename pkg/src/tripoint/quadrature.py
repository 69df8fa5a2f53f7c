"""Panel-wise Gauss-Legendre quadrature for kernel integrals.

The map ``s -> G(t, s) w(s)`` is smooth except for derivative kinks at
``s = t`` and ``s = eta``, and G is polynomial of degree <= 2 in s between
those seams.  Splitting the panels at both points therefore restores spectral
accuracy of a fixed-order Gauss rule, and makes the integral exact (to
rounding) whenever w is a polynomial of modest degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernel import ProblemParams, green, green_dt

__all__ = ["QuadratureRule", "integrate_kernel", "panel_points"]

KERNELS = ("G", "dG")


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss order per panel plus a base set of panel breakpoints.

    ``breakpoints`` must cover [0, 1] (0 and 1 included); per call the
    integration routines add the kernel seams {t, eta}.
    """

    points_per_panel: int = 8
    breakpoints: tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self) -> None:
        if self.points_per_panel < 2:
            raise ValueError("points_per_panel must be >= 2")
        pts = tuple(sorted(set(float(b) for b in self.breakpoints)))
        if not pts or pts[0] != 0.0 or pts[-1] != 1.0:
            raise ValueError("breakpoints must include 0.0 and 1.0")
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise ValueError("breakpoints must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", pts)


@lru_cache(maxsize=None)
def _leggauss(q: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(q)


def panel_points(breaks: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss points and weights for the panels defined by ``breaks``.

    Returns arrays of shape (panels, q).
    """
    gx, gw = _leggauss(q)
    a = np.asarray(breaks[:-1], dtype=float)
    b = np.asarray(breaks[1:], dtype=float)
    half = (b - a)[:, None] / 2.0
    mid = (a + b)[:, None] / 2.0
    return mid + half * gx[None, :], half * gw[None, :]


def _merged_breaks(rule: QuadratureRule, extra: tuple[float, ...]) -> np.ndarray:
    pts = np.array(sorted(set(rule.breakpoints) | {float(x) for x in extra}))
    keep = np.concatenate([[True], np.diff(pts) > 1e-15])
    return pts[keep]


def integrate_kernel(
    p: ProblemParams,
    kernel: str,
    t: float,
    w,
    rule: QuadratureRule = QuadratureRule(),
) -> float:
    """Approximate ``integral_0^1 K(t, s) w(s) ds`` with seam-split panels.

    ``kernel`` selects K: "G" for the Green's function, "dG" for its
    t-derivative.  ``w`` is a callable accepting a numpy array of s values
    (a scalar return value broadcasts).  Panels split at ``s = t`` and
    ``s = eta`` in addition to the rule's own breakpoints.
    """
    if kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    breaks = _merged_breaks(rule, (t, p.eta))
    x, wts = panel_points(breaks, rule.points_per_panel)
    x_flat = x.ravel()
    kv = green(p, t, x_flat) if kernel == "G" else green_dt(p, t, x_flat)
    fv = np.asarray(w(x_flat), dtype=float)
    if fv.ndim == 0:
        fv = np.full_like(x_flat, float(fv))
    return float(np.sum(wts.ravel() * kv * fv))
