"""Transparency-window analysis at the ideal drive strength.

The half-maximum level is fixed at ``Re(eps_T) = 1``, half of the bare
cavity peak value 2, not half of the local maximum of the curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OmitError, SearchError
from .params import WEAK_DAMPING_RATIO, ReducedParams
from .response import dip_location, epsilon_T, ideal_beta, nonlinear_term

HALF_MAX = 1.0
SCAN_HALF_WIDTH = 1.0e3   # in units of gamma
SCAN_POINTS = 10_000
BISECT_TOL = 1.0e-4       # in units of gamma


@dataclass(frozen=True)
class DipConditions:
    xO: float
    betaO: float

    def residual(self, params: ReducedParams) -> float:
        """``|gamma/2 - i x_o + N(beta_o)|``; zero by construction."""
        return abs(0.5 * params.gamma - 1j * self.xO + nonlinear_term(params.with_beta(self.betaO)))


@dataclass(frozen=True)
class WidthReport:
    exact: float
    approx: float
    resolvedLimit: float
    numeric: float | None
    validityApprox: bool
    validityResolved: bool


def ideal_dip_conditions(params: ReducedParams) -> DipConditions:
    """Detuning and drive at which the mechanical denominator vanishes."""
    return DipConditions(dip_location(params), ideal_beta(params))


def width_exact(params: ReducedParams) -> float:
    k, g, w = params.kappa, params.gamma, params.omega_m
    a = math.sqrt(k ** 4 + 2 * g * k * (k ** 2 + k * w + 4 * w ** 2))
    b = math.sqrt(k ** 4 + 2 * g * k * (k ** 2 - k * w + 4 * w ** 2))
    return (a + b) / (2 * k) - k


def width_approx(params: ReducedParams) -> float:
    return params.gamma * (1 + 4 * params.omega_m ** 2 / params.kappa ** 2)


def width_resolved(params: ReducedParams) -> float:
    return 4 * params.gamma * params.omega_m ** 2 / params.kappa ** 2


def width_closed(params: ReducedParams, numeric: bool = False) -> WidthReport:
    """Closed-form transparency widths at ``beta = beta_o``.

    With ``numeric=True`` the bisection width of the exact curve is filled in
    as well.
    """
    k, g, w = params.kappa, params.gamma, params.omega_m
    num = width_numeric(params, ideal_beta(params)) if numeric else None
    return WidthReport(
        exact=width_exact(params),
        approx=width_approx(params),
        resolvedLimit=width_resolved(params),
        numeric=num,
        validityApprox=g * w ** 2 / k ** 3 < WEAK_DAMPING_RATIO,
        validityResolved=k / w < WEAK_DAMPING_RATIO,
    )


def half_max_roots(params: ReducedParams) -> tuple[float, float]:
    """Dip-frame detunings ``(y1, y2)`` where ``Re(eps_T)`` crosses 1.

    ``y1 > 0 > y2``; their difference is the full width without the small
    ``gamma**2 omega_m**2`` simplification.
    """
    k, g, w = params.kappa, params.gamma, params.omega_m
    eta2k = 2 * g * k * (k ** 2 + 4 * w ** 2)
    d1 = (g * w - k ** 2) ** 2 + eta2k
    d2 = (g * w + k ** 2) ** 2 + eta2k
    if d1 < 0 or d2 < 0:
        raise OmitError("negative discriminant in half-maximum roots")
    y1 = (g * w - k ** 2 + math.sqrt(d1)) / (2 * k)
    y2 = (g * w + k ** 2 - math.sqrt(d2)) / (2 * k)
    return y1, y2


def half_max_condition(y: float, params: ReducedParams) -> float:
    """Reactance of the dip-frame response; equals ``+-kappa`` at half maximum."""
    k, g, w = params.kappa, params.gamma, params.omega_m
    return g * (k ** 2 + 4 * w ** 2) / (2 * y * k) + g * w / k - y


def _bisect(f, lo, hi, tol):
    flo = f(lo)
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _walk(level, start, step):
    i = start
    while 0 <= i < len(level):
        if level[i] >= 0:
            return i
        i += step
    return None


def width_numeric(params: ReducedParams, beta: float,
                  half_width: float = SCAN_HALF_WIDTH, points: int = SCAN_POINTS,
                  tol: float = BISECT_TOL) -> float:
    """Full width of the absorption dip from a direct scan of ``Re(eps_T)``.

    The window ``x_o +- half_width*gamma`` is sampled on ``points`` grid
    points, the nearest crossings of the level 1 on either side of the dip
    are bracketed, and each is refined by bisection to ``tol*gamma``.
    Away from ``beta_o`` the same half-of-2 level is used even though the dip
    no longer reaches zero.
    """
    p = params.with_beta(beta)
    g = params.gamma
    x_o = dip_location(params)
    # centre where the mechanical denominator is real
    centre = -2.0 * beta * params.omega_m / params.sideband_denominator

    def f(x):
        return float(np.real(epsilon_T(x, p))) - HALF_MAX

    grid = np.linspace(x_o - half_width * g, x_o + half_width * g, points)
    level = np.real(epsilon_T(grid, p)) - HALF_MAX
    if f(centre) < 0 and grid[0] < centre < grid[-1]:
        left_start = int(np.searchsorted(grid, centre)) - 1
        right_start = left_start + 1
        c_x = centre
    else:
        i_min = int(np.argmin(level))
        if level[i_min] >= 0:
            raise SearchError("no transparency dip below the half-maximum level in the scan window")
        left_start, right_start, c_x = i_min, i_min, grid[i_min]
    il = _walk(level, left_start, -1)
    ir = _walk(level, right_start, +1)
    if il is None or ir is None:
        raise SearchError("half-maximum crossing not found inside the scan window")
    x_left = _bisect(f, grid[il], c_x, tol * g)
    x_right = _bisect(f, c_x, grid[ir], tol * g)
    return x_right - x_left


def slope_max_and_product(params: ReducedParams) -> tuple[float, float]:
    """Steepest dispersion slope at the dip and its product with the width."""
    k, g, w = params.kappa, params.gamma, params.omega_m
    kmax = -4 * k ** 2 / (g * (k ** 2 + 4 * w ** 2))
    return kmax, kmax * width_approx(params)
