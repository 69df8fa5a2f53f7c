"""Green's kernel of the third-order three-point boundary value operator.

The linear problem

    -u'''(t) = q(t),   u(0) = u'(0) = 0,   u'(1) = alpha * u'(eta)

on [0, 1] is inverted by ``u(t) = integral_0^1 G(t, s) q(s) ds``.  This module
evaluates the kernel ``G``, its t-derivative, the comparison envelopes ``g0``
and ``g1``, and the cone constants ``k0``, ``k1`` used by the positivity
checks in :mod:`tripoint.verify`.

``G`` is piecewise polynomial in ``s`` with seams at ``s = t`` and ``s = eta``;
the four branches (in selection order) are::

    2*(1-alpha*eta) * G(t,s) = (2ts - s^2)(1-alpha*eta) + t^2 s (alpha-1),   s <= min(eta, t)
                               t^2 (1-alpha*eta) + t^2 s (alpha-1),          t <= s <= eta
                               (2ts - s^2)(1-alpha*eta) + t^2 (alpha*eta-s), eta <= s <= t
                               t^2 (1-s),                                    max(eta, t) <= s

and the t-derivative has the same branch structure with::

    (1-alpha*eta) * dG/dt(t,s) = s(1-alpha*eta) + ts(alpha-1)
                                 t(1-alpha*eta) + ts(alpha-1)
                                 s(1-alpha*eta) + t(alpha*eta - s)
                                 t(1-s)

All branches carry a factor t or t^2, so G(0, s) = dG/dt(0, s) = 0: the
left boundary conditions are built into the kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProblemParams",
    "green",
    "green_dt",
    "green_branches",
    "green_dt_branches",
    "g0_bound",
    "g1_bound",
    "cone_constants",
]

#: minimum admissible gap 1 - alpha*eta; smaller gaps amplify rounding in the
#: 1/(1-alpha*eta) prefactors beyond what the verification slacks absorb
MIN_GAP = 1e-9


@dataclass(frozen=True)
class ProblemParams:
    """Validated parameter pair (alpha, eta) with derived cone constants.

    Requires ``0 < eta < 1`` and ``1 < alpha < 1/eta`` (with margin
    ``1 - alpha*eta >= MIN_GAP``).  The derived constants are

    * ``k0 = eta^2 * min(alpha-1, 1) / (2 alpha^2 (1+alpha))``
    * ``k1 = min(alpha*eta, eta)``

    both strictly inside (0, 1).  Instances are immutable.
    """

    alpha: float
    eta: float
    k0: float = field(init=False, repr=False)
    k1: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        a, e = float(self.alpha), float(self.eta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "eta", e)
        if not np.isfinite(a) or not np.isfinite(e):
            raise ValueError("alpha and eta must be finite")
        if not 0.0 < e < 1.0:
            raise ValueError(f"eta must lie strictly inside (0, 1), got eta={e!r}")
        if a <= 1.0 or 1.0 - a * e < MIN_GAP:
            raise ValueError(
                "parameters must satisfy 1 < alpha < 1/eta "
                f"(with 1 - alpha*eta >= {MIN_GAP:g}); got alpha={a!r}, eta={e!r}, "
                f"alpha*eta={a * e!r}"
            )
        object.__setattr__(self, "k0", e * e * min(a - 1.0, 1.0) / (2.0 * a * a * (1.0 + a)))
        object.__setattr__(self, "k1", min(a * e, e))

    @property
    def gap(self) -> float:
        """The positive quantity 1 - alpha*eta."""
        return 1.0 - self.alpha * self.eta


def _check_unit(x: np.ndarray, name: str) -> None:
    if x.size and (not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")


def _prepare(t, s) -> tuple[np.ndarray, np.ndarray, bool]:
    t_arr = np.asarray(t, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    _check_unit(t_arr, "t")
    _check_unit(s_arr, "s")
    return t_arr, s_arr, (t_arr.ndim == 0 and s_arr.ndim == 0)


def green_branches(p: ProblemParams, t, s) -> np.ndarray:
    """Evaluate all four branch formulas of G at (t, s), regardless of region.

    Returns an array with a trailing axis of length 4 in branch order.  Only
    the branch whose region contains (t, s) equals G there; adjacent branches
    agree on the seams ``s = t`` and ``s = eta`` (an algebraic identity).
    """
    t_arr, s_arr, _ = _prepare(t, s)
    a, e = p.alpha, p.eta
    den = p.gap
    t_arr, s_arr = np.broadcast_arrays(t_arr, s_arr)
    b = np.stack(
        [
            (2 * t_arr * s_arr - s_arr**2) * den + t_arr**2 * s_arr * (a - 1),
            t_arr**2 * den + t_arr**2 * s_arr * (a - 1),
            (2 * t_arr * s_arr - s_arr**2) * den + t_arr**2 * (a * e - s_arr),
            t_arr**2 * (1 - s_arr),
        ],
        axis=-1,
    ) / (2 * den)
    return b


def green_dt_branches(p: ProblemParams, t, s) -> np.ndarray:
    """Branch formulas of dG/dt at (t, s); same layout as :func:`green_branches`."""
    t_arr, s_arr, _ = _prepare(t, s)
    a, e = p.alpha, p.eta
    den = p.gap
    t_arr, s_arr = np.broadcast_arrays(t_arr, s_arr)
    b = np.stack(
        [
            s_arr * den + t_arr * s_arr * (a - 1),
            t_arr * den + t_arr * s_arr * (a - 1),
            s_arr * den + t_arr * (a * e - s_arr),
            t_arr * (1 - s_arr),
        ],
        axis=-1,
    ) / den
    return b


def _select(p: ProblemParams, t: np.ndarray, s: np.ndarray, branches: np.ndarray) -> np.ndarray:
    e = p.eta
    conds = [
        s <= np.minimum(e, t),
        (t <= s) & (s <= e),
        (e <= s) & (s <= t),
        np.maximum(e, t) <= s,
    ]
    # first matching condition wins; ties at the seams are value-irrelevant
    b = np.moveaxis(branches, -1, 0)
    return np.select(conds, list(b))


def green(p: ProblemParams, t, s):
    """Green's function G(t, s) on the unit square.

    Accepts scalars or broadcastable arrays; raises ``ValueError`` if any
    argument leaves [0, 1].  Nonnegative everywhere, zero at t = 0 and on
    s = 1 for t <= s.
    """
    t_arr, s_arr, scalar = _prepare(t, s)
    t_b, s_b = np.broadcast_arrays(t_arr, s_arr)
    out = _select(p, t_b, s_b, green_branches(p, t_b, s_b))
    return float(out) if scalar else out


def green_dt(p: ProblemParams, t, s):
    """t-derivative of the Green's function on the unit square.

    Continuous across the branch seams and nonnegative; zero at t = 0 and at
    s = 1 for t <= s.  Away from the seams it matches a central finite
    difference of :func:`green` in t to rounding (G is quadratic in t per
    branch).
    """
    t_arr, s_arr, scalar = _prepare(t, s)
    t_b, s_b = np.broadcast_arrays(t_arr, s_arr)
    out = _select(p, t_b, s_b, green_dt_branches(p, t_b, s_b))
    return float(out) if scalar else out


def g0_bound(p: ProblemParams, s):
    """Envelope g0(s) = (1+alpha)/(1-alpha*eta) * s(1-s), an upper bound for G."""
    s_arr = np.asarray(s, dtype=float)
    _check_unit(s_arr, "s")
    out = (1.0 + p.alpha) / p.gap * s_arr * (1.0 - s_arr)
    return float(out) if s_arr.ndim == 0 else out


def g1_bound(p: ProblemParams, s):
    """Envelope g1(s) = (1-s)/(1-alpha*eta), an upper bound for dG/dt."""
    s_arr = np.asarray(s, dtype=float)
    _check_unit(s_arr, "s")
    out = (1.0 - s_arr) / p.gap
    return float(out) if s_arr.ndim == 0 else out


def cone_constants(p: ProblemParams) -> tuple[float, float]:
    """The pair (k0, k1) attached to the parameters; both lie in (0, 1)."""
    return p.k0, p.k1
