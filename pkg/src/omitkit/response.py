"""Closed-form probe response of the driven optomechanical cavity.

Sign convention: the probe sideband oscillates as ``exp(-i delta t)``, and
the output quadrature at the probe frequency is ``eps_T = 2 kappa c_plus``.
``Re(eps_T)`` is absorption and ``Im(eps_T)`` is dispersion.

The extra ``-beta/(kappa - 2i omega_m)`` term in the mechanical
denominator is called the nonlinear term here.  It is dropped by the usual
linearisation; the same term is sometimes attributed to the counter-rotating
(non-RWA) sideband.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .params import PhysicalParams, ReducedParams


@dataclass(frozen=True)
class ProbeResponse:
    x: np.ndarray | float
    epsT: np.ndarray | complex

    @property
    def absorption(self):
        return np.real(self.epsT)

    @property
    def dispersion(self):
        return np.imag(self.epsT)


def nonlinear_term(params: ReducedParams) -> complex:
    """``N = -beta / (kappa - 2i omega_m)``."""
    return -params.beta / complex(params.kappa, -2.0 * params.omega_m)


def _epsilon_T(x, params: ReducedParams, N: complex):
    x = np.asarray(x, dtype=float)
    kappa, beta = params.kappa, params.beta
    inner = 0.5 * params.gamma - 1j * x + N
    pole = inner == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * kappa / (kappa - 1j * x + beta / np.where(pole, 1.0, inner))
    # exact pole of the mechanical subfraction: the response vanishes
    out = np.where(pole & (beta != 0), 0.0 + 0.0j, out)
    return out[()] if out.ndim == 0 else out


def epsilon_T(x, params: ReducedParams):
    """Probe response ``2k / (k - ix + beta/(gamma/2 - ix + N))``.

    Accepts scalar or array ``x``.  At the exact zero of the mechanical
    denominator the limiting value 0 is returned.
    """
    return _epsilon_T(x, params, nonlinear_term(params))


def epsilon_T_linearized(x, params: ReducedParams):
    """Same response with the nonlinear term removed (standard linearisation)."""
    return _epsilon_T(x, params, 0.0)


def probe_response(x, params: ReducedParams, linearized: bool = False) -> ProbeResponse:
    f = epsilon_T_linearized if linearized else epsilon_T
    return ProbeResponse(np.asarray(x, dtype=float), f(x, params))


def dip_location(params: ReducedParams) -> float:
    """``x_o = -gamma omega_m / kappa``."""
    return -params.gamma * params.omega_m / params.kappa


def ideal_beta(params: ReducedParams) -> float:
    """``beta_o = gamma (kappa**2 + 4 omega_m**2) / (2 kappa)``."""
    return params.gamma * params.sideband_denominator / (2.0 * params.kappa)


def x_to_y(x, params: ReducedParams):
    return np.asarray(x) - dip_location(params)


def y_to_x(y, params: ReducedParams):
    return np.asarray(y) + dip_location(params)


def _eta_xi(params: ReducedParams):
    k, g, w = params.kappa, params.gamma, params.omega_m
    eta = g * (k ** 2 + 4 * w ** 2)
    xi = 4 * (k ** 4 + g ** 2 * w ** 2 - g * k ** 3 - 4 * g * k * w ** 2)
    return eta, xi


def _dispersion_denominator(y, params: ReducedParams):
    k, g, w = params.kappa, params.gamma, params.omega_m
    eta, xi = _eta_xi(params)
    return (4 * y ** 4 * k ** 2 - 8 * y ** 3 * g * k * w + y ** 2 * xi
            + 4 * y * g * w * eta + eta ** 2)


def im_epsilon_T_closed(y, params: ReducedParams):
    """Dispersion ``Im(eps_T)`` at the ideal drive, in the dip-centred frame.

    ``params.beta`` is ignored: the expression assumes ``beta = beta_o``.
    """
    y = np.asarray(y, dtype=float)
    k, g, w = params.kappa, params.gamma, params.omega_m
    eta, _ = _eta_xi(params)
    num = 4 * y * k ** 2 * (2 * y ** 2 * k - 2 * y * g * w - eta)
    out = num / _dispersion_denominator(y, params)
    return out[()] if out.ndim == 0 else out


def dispersion_slope(y, params: ReducedParams):
    """Slope ``K = d Im(eps_T) / dy`` at the ideal drive (``beta`` ignored)."""
    y = np.asarray(y, dtype=float)
    k, g, w = params.kappa, params.gamma, params.omega_m
    eta, xi = _eta_xi(params)
    den2 = _dispersion_denominator(y, params) ** 2
    first = (4 * y ** 2 * k ** 2 * (2 * y ** 2 * k + eta)
             * (xi - 4 * y ** 2 * k ** 2 + 8 * y * g * k * w - 8 * g ** 2 * w ** 2))
    second = 4 * eta * k ** 2 * (eta + 2 * y ** 2 * k) * (eta + 4 * y * g * w - 8 * y ** 2 * k)
    out = (first - second) / den2
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SidebandSolution:
    """First-order perturbation amplitudes around the driven steady state.

    ``q`` amplitudes are in metres; ``c`` amplitudes are per unit probe
    amplitude for the sidebands.
    """

    c0: complex
    cPlus: complex
    cMinus: complex
    q0: float
    qPlus: complex
    qMinus: complex
    M: complex
    Delta: float
    delta: float

    def epsT(self, kappa: float) -> complex:
        return 2.0 * kappa * self.cPlus


@dataclass(frozen=True)
class SidebandInputs:
    """Physical-level inputs of the full sideband solution."""

    kappa: float
    gamma: float
    omega_m: float
    chi0: float
    m: float
    hbar: float
    eps_c: float

    @classmethod
    def from_physical(cls, p: PhysicalParams) -> "SidebandInputs":
        return cls(p.kappa, p.gamma, p.omegaM, p.chi0, p.m, p.hbar, p.eps_c)

    @classmethod
    def from_reduced(cls, params: ReducedParams, Delta: float,
                     eps_c: float = 1.0) -> "SidebandInputs":
        """Dimensionless inputs (``m = hbar = 1``) reproducing ``params.beta``.

        The coupling is chosen so that ``chi0**2 |c0|**2 / (2 omega_m) = beta`` at
        effective detuning ``Delta``.
        """
        G = 2.0 * params.omega_m * params.beta * (params.kappa ** 2 + Delta ** 2) / eps_c ** 2
        return cls(params.kappa, params.gamma, params.omega_m, G ** 0.5, 1.0, 1.0, eps_c)


def _require_nonzero(name, value):
    if value == 0:
        raise SingularityError(f"vanishing denominator: {name}")


def sideband_c_plus(delta: float, Delta: float, kappa: float, gamma: float,
                    omega_m: float, beta: float) -> complex:
    """Closed-form ``c_plus`` without the near-resonance simplification."""
    K = complex(kappa, -(Delta + delta))
    mech = ((delta ** 2 - omega_m ** 2) + 1j * delta * gamma) / (2j * omega_m)
    inner = mech - beta / K
    outer = complex(kappa, -(delta - Delta))
    if beta == 0:
        _require_nonzero("kappa + i(Delta - delta)", outer)
        return 1.0 / outer
    _require_nonzero("mechanical subfraction", inner)
    total = outer + beta / inner
    _require_nonzero("c_plus denominator", total)
    return 1.0 / total


def sideband_solution(delta: float, Delta: float, inputs: SidebandInputs) -> SidebandSolution:
    """All zeroth- and first-order amplitudes at probe detuning ``delta``.

    ``Delta`` is the effective cavity detuning.  ``c0`` follows from the
    coupling amplitude, and the sideband amplitudes from the closed-form
    ``c_plus`` plus the relations that link it to ``c_minus`` and ``q_plus``.
    """
    k, g, w = inputs.kappa, inputs.gamma, inputs.omega_m
    chi0, m, hbar = inputs.chi0, inputs.m, inputs.hbar
    c0 = inputs.eps_c / complex(k, Delta)
    n = abs(c0) ** 2
    q0 = chi0 * n / (m * w ** 2)
    d_plus = complex(w ** 2 - delta ** 2, -delta * g)
    _require_nonzero("omega_m**2 - i delta gamma - delta**2", d_plus)
    K = complex(k, -(Delta + delta))
    _require_nonzero("kappa - i(Delta + delta)", K)
    _require_nonzero("kappa + i(Delta + delta)", K.conjugate())
    M = -1j * n * chi0 ** 2 / (m * hbar * d_plus * K)
    beta = chi0 ** 2 * n / (2.0 * m * hbar * w)
    c_plus = sideband_c_plus(delta, Delta, k, g, w, beta)
    if c0 == 0:
        c_minus_conj = 0j
    else:
        _require_nonzero("1 - M", 1 - M)
        c_minus_conj = M / (1 - M) * c0.conjugate() * c_plus / c0
    q_plus = chi0 * (c0 * c_minus_conj + c0.conjugate() * c_plus) / (m * d_plus)
    q_minus = q_plus.conjugate()
    c_minus = 1j * c0 * q_minus * chi0 / hbar / complex(k, Delta + delta)
    return SidebandSolution(c0, c_plus, c_minus, q0, q_plus, q_minus, M, Delta, delta)


def sideband_residuals(sol: SidebandSolution, inputs: SidebandInputs) -> dict[str, float]:
    """Relative residual of each defining relation of the sideband amplitudes."""
    k, g, w = inputs.kappa, inputs.gamma, inputs.omega_m
    chi0, m, hbar = inputs.chi0, inputs.m, inputs.hbar
    c0, cp, cm, qp, qm = sol.c0, sol.cPlus, sol.cMinus, sol.qPlus, sol.qMinus
    D, d = sol.Delta, sol.delta

    def rel(lhs, rhs):
        scale = max(abs(lhs), abs(rhs))
        return 0.0 if scale == 0 else abs(lhs - rhs) / scale

    return {
        "q_plus": rel(qp, chi0 * (c0 * cm.conjugate() + c0.conjugate() * cp)
                      / (m * complex(w ** 2 - d ** 2, -d * g))),
        "q_minus": rel(qm, chi0 * (c0 * cp.conjugate() + c0.conjugate() * cm)
                       / (m * complex(w ** 2 - d ** 2, d * g))),
        "q0": rel(sol.q0, chi0 * abs(c0) ** 2 / (m * w ** 2)),
        "c0": rel(c0, inputs.eps_c / complex(k, D)),
        "c_plus": rel(cp, (1j * c0 * qp * chi0 / hbar + 1) / complex(k, D - d)),
        "c_minus": rel(cm, (1j * c0 * qm * chi0 / hbar) / complex(k, D + d)),
    }
