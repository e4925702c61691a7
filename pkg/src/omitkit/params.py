"""Parameter sets for the single-cavity optomechanical system.

Two representations are used.  :class:`PhysicalParams` carries laboratory
units and exists only at the boundary; :class:`ReducedParams` holds the four
numbers ``(kappa, gamma, omega_m, beta)`` in one shared angular-frequency
unit, which is all the closed-form response needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, DomainError, RangeError

HBAR = 1.054571817e-34
DEFAULT_Q = 1.0e4
WEAK_DAMPING_RATIO = 1.0e-2
NEAR_RESONANCE_RATIO = 1.0e-2


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


def _check_positive(**values):
    _check_finite(**values)
    for name, v in values.items():
        if v <= 0:
            raise DomainError(f"{name} must be > 0, got {v!r}")


def _check_nonnegative(**values):
    _check_finite(**values)
    for name, v in values.items():
        if v < 0:
            raise DomainError(f"{name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Cavity, resonator and drive description in SI units.

    All frequencies are angular (rad/s).  ``chi0`` is derived as
    ``hbar * omega0 / L``.
    """

    omega0: float
    omegaC: float
    omegaP: float
    L: float
    m: float
    kappa: float
    gamma: float
    omegaM: float
    powerC: float
    powerP: float = 0.0
    hbar: float = HBAR

    def __post_init__(self):
        _check_positive(omega0=self.omega0, omegaC=self.omegaC, omegaP=self.omegaP,
                        L=self.L, m=self.m, kappa=self.kappa, gamma=self.gamma,
                        omegaM=self.omegaM, hbar=self.hbar)
        _check_nonnegative(powerC=self.powerC, powerP=self.powerP)

    @property
    def chi0(self) -> float:
        return self.hbar * self.omega0 / self.L

    @property
    def eps_c(self) -> float:
        return field_amplitude(self.powerC, self.omegaC, self.kappa, self.hbar)

    @property
    def eps_p(self) -> float:
        return field_amplitude(self.powerP, self.omegaP, self.kappa, self.hbar)

    @property
    def detuning0(self) -> float:
        """Bare cavity detuning ``omega0 - omegaC``."""
        return self.omega0 - self.omegaC


@dataclass(frozen=True)
class ReducedParams:
    """Minimal parameter set ``(kappa, gamma, omega_m, beta)``.

    Every rate shares one angular-frequency unit chosen by the caller;
    ``beta`` carries that unit squared.  ``gamma = 0`` is allowed here since
    the closed forms have finite limits there.
    """

    kappa: float
    gamma: float
    omega_m: float
    beta: float = 0.0

    def __post_init__(self):
        _check_positive(kappa=self.kappa, omega_m=self.omega_m)
        _check_nonnegative(gamma=self.gamma, beta=self.beta)

    @classmethod
    def from_ratio(cls, kappa_over_omega_m: float, Q: float = DEFAULT_Q,
                   omega_m: float = 1.0, beta: float = 0.0) -> "ReducedParams":
        """Build from ``kappa/omega_m`` and the quality factor ``omega_m/gamma``."""
        _check_positive(kappa_over_omega_m=kappa_over_omega_m, Q=Q, omega_m=omega_m)
        return cls(kappa=kappa_over_omega_m * omega_m, gamma=omega_m / Q,
                   omega_m=omega_m, beta=beta)

    def with_beta(self, beta: float) -> "ReducedParams":
        return replace(self, beta=float(beta))

    @property
    def Q(self) -> float:
        return self.omega_m / self.gamma if self.gamma > 0 else math.inf

    @property
    def weak_damping(self) -> bool:
        return self.gamma <= WEAK_DAMPING_RATIO * min(self.kappa, self.omega_m)

    @property
    def sideband_denominator(self) -> float:
        """``kappa**2 + 4 omega_m**2``, recurring in every closed form."""
        return self.kappa ** 2 + 4.0 * self.omega_m ** 2


@dataclass(frozen=True)
class Detuning:
    """Probe offset from the mechanical sideband, ``x = delta - omega_m``.

    ``x_o`` is the dip location; when given, ``y = x - x_o`` is the
    dip-centred coordinate.
    """

    x: float
    x_o: float | None = None

    def __post_init__(self):
        _check_finite(x=self.x)

    @classmethod
    def from_delta(cls, delta: float, omega_m: float, x_o: float | None = None):
        return cls(delta - omega_m, x_o)

    @classmethod
    def from_y(cls, y: float, x_o: float):
        return cls(y + x_o, x_o)

    @property
    def y(self) -> float:
        if self.x_o is None:
            raise DomainError("y requires the dip location x_o")
        return self.x - self.x_o

    def near_resonant(self, omega_m: float) -> bool:
        return abs(self.x) <= NEAR_RESONANCE_RATIO * omega_m


def field_amplitude(power: float, omega: float, kappa: float, hbar: float = HBAR) -> float:
    """Drive amplitude ``sqrt(2 kappa P / (hbar omega))`` of an input beam."""
    _check_nonnegative(power=power)
    _check_positive(omega=omega, kappa=kappa, hbar=hbar)
    return math.sqrt(2.0 * kappa * power / (hbar * omega))


def beta_from_intracavity(chi0: float, n_cav: float, m: float, omega_m: float,
                          hbar: float = HBAR) -> float:
    """Effective drive strength ``chi0**2 |c0|**2 / (2 m hbar omega_m)``.

    ``n_cav`` is the intracavity amplitude squared ``|c0|**2``.
    """
    _check_nonnegative(chi0=chi0, n_cav=n_cav, m=m, omega_m=omega_m, hbar=hbar)
    if m == 0 or omega_m == 0:
        raise DomainError("mass and mechanical frequency must be nonzero")
    return chi0 ** 2 * n_cav / (2.0 * m * hbar * omega_m)


def reduce(params: PhysicalParams) -> ReducedParams:
    """Collapse a physical parameter set onto ``(kappa, gamma, omega_m, beta)``.

    The intracavity amplitude is evaluated at the working point
    ``Delta = omega_m``.
    """
    chi0, eps_c = params.chi0, params.eps_c
    factors = {
        "chi0**2": chi0 ** 2,
        "eps_c**2": eps_c ** 2,
        "2*m*omegaM*hbar": 2.0 * params.m * params.omegaM * params.hbar,
        "kappa**2+omegaM**2": params.kappa ** 2 + params.omegaM ** 2,
    }
    for name, v in factors.items():
        if not math.isfinite(v):
            raise RangeError(f"overflow in factor {name}")
        if v == 0 and name != "eps_c**2":
            raise RangeError(f"underflow in factor {name}")
    beta = (factors["chi0**2"] * factors["eps_c**2"]
            / (factors["2*m*omegaM*hbar"] * factors["kappa**2+omegaM**2"]))
    if not math.isfinite(beta):
        raise RangeError("overflow in beta")
    if beta == 0 and eps_c > 0:
        raise RangeError("underflow in beta")
    return ReducedParams(params.kappa, params.gamma, params.omegaM, beta)


@dataclass(frozen=True)
class ZerothOrder:
    c0: complex
    q0: float
    Delta: float
    residual: float
    iterations: int


def solve_photon_number(eps_c: float, kappa: float, detuning0: float, shift: float,
                        relax: float = 0.5, tol: float = 1e-12,
                        max_iter: int = 10_000) -> tuple[float, int]:
    """Damped fixed point for ``n = eps_c**2 / (kappa**2 + (detuning0 - shift*n)**2)``.

    ``shift`` is the cavity frequency pull per unit ``|c0|**2``
    (``chi0**2 / (m omega_m**2 hbar)`` in physical units).
    """
    if eps_c == 0:
        return 0.0, 0
    n = eps_c ** 2 / (kappa ** 2 + detuning0 ** 2)
    for it in range(1, max_iter + 1):
        target = eps_c ** 2 / (kappa ** 2 + (detuning0 - shift * n) ** 2)
        new = (1.0 - relax) * n + relax * target
        if abs(new - n) <= tol * abs(new):
            return new, it
        n = new
    raise ConvergenceError(
        f"photon-number fixed point did not converge in {max_iter} iterations "
        "(bistable or unstable branch?)")


def photon_number_cubic_roots(eps_c: float, kappa: float, detuning0: float,
                              shift: float) -> np.ndarray:
    """Real nonnegative roots of the steady-state cubic in ``|c0|**2``."""
    coeffs = [shift ** 2, -2.0 * shift * detuning0, kappa ** 2 + detuning0 ** 2, -eps_c ** 2]
    # every physical root obeys n <= eps_c**2/kappa**2; leading terms that are
    # negligible at that bound only add huge spurious roots that wreck the
    # companion-matrix accuracy, so drop them
    n_max = eps_c ** 2 / kappa ** 2
    size = [abs(a) * n_max ** (3 - i) for i, a in enumerate(coeffs)]
    lead = 0
    while lead < 2 and size[lead] <= 1e-17 * max(size):
        lead += 1
    roots = np.roots(np.trim_zeros(coeffs[lead:], "f"))
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots))].real
    return np.sort(real[real >= 0])


def steady_state_zeroth(params: PhysicalParams, **solver_kw) -> ZerothOrder:
    """Self-consistent probe-free steady state ``(c0, q0, Delta)``."""
    chi0, hbar, m, wm = params.chi0, params.hbar, params.m, params.omegaM
    eps_c, kappa, det0 = params.eps_c, params.kappa, params.detuning0
    shift = chi0 ** 2 / (m * wm ** 2 * hbar)
    n, iters = solve_photon_number(eps_c, kappa, det0, shift, **solver_kw)
    q0 = chi0 * n / (m * wm ** 2)
    Delta = det0 - q0 * chi0 / hbar
    c0 = eps_c / complex(kappa, Delta)
    # relative residuals of the q0 and c0 relations
    res_q = abs(q0 - chi0 * abs(c0) ** 2 / (m * wm ** 2)) / max(abs(q0), 1e-300)
    res_c = abs(c0 * complex(kappa, Delta) - eps_c) / max(eps_c, 1e-300)
    return ZerothOrder(c0, q0, Delta, max(res_q, res_c) if eps_c else 0.0, iters)
