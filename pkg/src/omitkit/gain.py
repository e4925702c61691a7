"""Optomechanically induced gain above the ideal drive strength.

For ``beta > beta_o`` the absorption turns negative near the sideband.  The
closed forms give the gain-peak location, the drive that maximises the gain
along that location, and the peak gain itself.  :func:`gain_numeric` is the
numerical counterpart driven directly by the near-resonance response.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError
from .params import ReducedParams
from .response import epsilon_T, ideal_beta

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
VALIDITY_RATIO = 1.0e2
DEFAULT_BRACKET = (1.0, 1.0e4)   # in units of beta_o


@dataclass(frozen=True)
class GainReport:
    xG: float
    betaG: float
    gMax: float
    numericBeta: float | None
    numericX: float | None
    numericG: float | None
    validity: bool


def golden_section(f, lo: float, hi: float, rtol: float = 1e-6, atol: float = 0.0,
                   max_iter: int = 500) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on ``[lo, hi]``; return ``(x*, f(x*))``."""
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if abs(b - a) <= rtol * max(abs(a), abs(b)) + atol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def gain_point(beta: float, params: ReducedParams) -> float:
    """``x_g = -2 beta omega_m / (kappa**2 + 4 omega_m**2)``."""
    return -2.0 * beta * params.omega_m / params.sideband_denominator


def absorption_at_gain_point(beta, params: ReducedParams):
    """``Re(eps_T)`` evaluated at ``x_g(beta)`` for scalar or array ``beta``."""
    beta = np.asarray(beta, dtype=float)
    out = np.empty(beta.shape)
    flat = out.reshape(-1)
    for i, b in enumerate(beta.reshape(-1)):
        flat[i] = np.real(epsilon_T(gain_point(b, params), params.with_beta(b)))
    return out[()] if out.ndim == 0 else out


def gain_closed(params: ReducedParams) -> tuple[float, float, bool]:
    """Approximate optimum drive ``beta_g``, peak gain ``G_max`` and validity flag."""
    k, g, w = params.kappa, params.gamma, params.omega_m
    beta_g = params.sideband_denominator * math.sqrt(g / w) / 2.0
    g_max = -2.0 * k ** 2 / (4.0 * w ** 2 + k * math.sqrt(g * w))
    return beta_g, g_max, k / math.sqrt(g * w) > VALIDITY_RATIO


def min_absorption_near_gain_point(beta: float, params: ReducedParams,
                                   span: float = 1.0, rtol: float = 1e-6) -> tuple[float, float]:
    """Local minimum of ``Re(eps_T)`` over ``x`` seeded at ``x_g(beta)``.

    The bracket is ``x_g +- span*w`` with ``w`` the half width of the
    mechanical denominator, ``beta kappa/D - gamma/2`` (at least ``gamma``).
    """
    p = params.with_beta(beta)
    xg = gain_point(beta, params)
    w = max(abs(beta * params.kappa / params.sideband_denominator - 0.5 * params.gamma),
            params.gamma)
    return golden_section(lambda x: float(np.real(epsilon_T(x, p))),
                          xg - span * w, xg + span * w, rtol=0.0, atol=rtol * w)


def gain_numeric(params: ReducedParams, bracket: tuple[float, float] = DEFAULT_BRACKET,
                 rtol: float = 1e-6) -> tuple[float, float, float]:
    """Numerical optimum drive, detuning and gain.

    Golden-section search over ``log(beta)`` inside ``bracket`` (multiples of
    ``beta_o``) of the absorption evaluated at ``x_g(beta)``.  Returns
    ``(beta*, x_g(beta*), Re eps_T)``.  Raises :class:`BracketError` when the
    optimum sits on the bracket edge.
    """
    beta_o = ideal_beta(params)
    lo, hi = math.log(bracket[0] * beta_o), math.log(bracket[1] * beta_o)

    def f(lb):
        return float(absorption_at_gain_point(math.exp(lb), params))

    lb, g_star = golden_section(f, lo, hi, rtol=0.0, atol=rtol)
    margin = 10 * rtol
    if lb - lo < margin or hi - lb < margin:
        raise BracketError(
            f"optimum at the bracket edge beta/beta_o = {math.exp(lb) / beta_o:.6g}; widen the bracket")
    beta_star = math.exp(lb)
    return beta_star, gain_point(beta_star, params), g_star


def gain_report(params: ReducedParams, numeric: bool = True, **kw) -> GainReport:
    beta_g, g_max, valid = gain_closed(params)
    nb = nx = ng = None
    if numeric:
        nb, nx, ng = gain_numeric(params, **kw)
    return GainReport(gain_point(beta_g, params), beta_g, g_max, nb, nx, ng, valid)
