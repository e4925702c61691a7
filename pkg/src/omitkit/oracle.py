"""Time-domain oracle for the probe response.

The mean-value equations are integrated in scaled variables
``Q = chi0 q / hbar`` and ``P = chi0 p / (m hbar)`` with coupling
``G = chi0**2 / (m hbar)``.  ``G`` is fixed from the reduced drive strength,
``G = 2 omega_m beta (kappa**2 + Delta**2) / eps_c**2``, so a run needs
nothing beyond :class:`ReducedParams`, the detunings and the probe ratio.
The cavity trace is then demodulated at ``0`` and ``-+delta`` over an
integer number of probe periods.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import DivergenceError, DomainError
from .params import ReducedParams
from .response import SidebandInputs

log = logging.getLogger(__name__)

DEFAULT_PROBE_RATIO = 1.0e-3
DEFAULT_STEPS_FACTOR = 256     # steps per 2 pi/max(omega_m, kappa, delta)
DEFAULT_SETTLE = 40.0          # in units of 1/gamma
MIN_SETTLE = 8.0
DEFAULT_DEMOD_PERIODS = 16
BLOWUP_FACTOR = 1.0e6
LEAKAGE_WARN = 1.0e-2
SETTLE_RECORDS = 1000


class SidebandLeakageWarning(UserWarning):
    """Power outside the three demodulated tones exceeds the warning level."""


@dataclass(frozen=True)
class OracleConfig:
    """One time-domain run.

    ``steps_per_period`` fixes ``dt = (2 pi/delta) / steps_per_period`` so the
    demodulation window holds an exact number of steps; by default it is the
    smallest count giving ``dt <= 2 pi / (256 max(omega_m, kappa, delta))``.
    ``settle_time`` is rounded up to whole probe periods.
    """

    reduced: ReducedParams
    Delta: float
    delta: float
    probeRatio: float = DEFAULT_PROBE_RATIO
    steps_per_period: int | None = None
    settleTime: float | None = None
    demodPeriods: int = DEFAULT_DEMOD_PERIODS
    eps_c: float = 1.0
    start: str = "steady"

    def __post_init__(self):
        r = self.reduced
        if not r.gamma > 0:
            raise DomainError("oracle runs need gamma > 0")
        if not self.delta > 0:
            raise DomainError("probe detuning delta must be > 0")
        if not 0 <= self.probeRatio <= 1e-2:
            raise DomainError("probeRatio must lie in [0, 1e-2]")
        if self.demodPeriods < 1:
            raise DomainError("demodPeriods must be >= 1")
        if self.start not in ("steady", "zero"):
            raise DomainError("start must be 'steady' or 'zero'")
        if self.eps_c < 0:
            raise DomainError("eps_c must be >= 0")
        if self.dt > 2 * math.pi / (50 * self._fastest):
            raise DomainError("dt exceeds 2 pi/(50 max(omega_m, kappa, delta))")
        if self.settle < MIN_SETTLE / r.gamma * (1 - 1e-12):
            raise DomainError("settleTime must be at least 8/gamma")

    @property
    def _fastest(self) -> float:
        r = self.reduced
        return max(r.omega_m, r.kappa, abs(self.delta))

    @property
    def period(self) -> float:
        return 2 * math.pi / self.delta

    @property
    def n_per_period(self) -> int:
        if self.steps_per_period is not None:
            return int(self.steps_per_period)
        return math.ceil(DEFAULT_STEPS_FACTOR * self._fastest / self.delta)

    @property
    def dt(self) -> float:
        return self.period / self.n_per_period

    @property
    def settle(self) -> float:
        return self.settleTime if self.settleTime is not None else DEFAULT_SETTLE / self.reduced.gamma

    @property
    def settle_periods(self) -> int:
        return math.ceil(self.settle / self.period - 1e-9)

    @property
    def demodWindow(self) -> float:
        return self.demodPeriods * self.period

    @property
    def eps_p(self) -> float:
        return self.probeRatio * self.eps_c

    @property
    def coupling(self) -> float:
        r = self.reduced
        if self.eps_c == 0:
            return 0.0
        return 2 * r.omega_m * r.beta * (r.kappa ** 2 + self.Delta ** 2) / self.eps_c ** 2

    @property
    def c0(self) -> complex:
        return self.eps_c / complex(self.reduced.kappa, self.Delta)

    @property
    def Q0(self) -> float:
        return self.coupling * abs(self.c0) ** 2 / self.reduced.omega_m ** 2

    @property
    def detuning0(self) -> float:
        """Bare detuning that makes ``Delta`` the effective one in steady state."""
        return self.Delta + self.Q0


@dataclass
class OracleTrace:
    config: OracleConfig
    t: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    c: np.ndarray
    demod_start: int
    diverged: bool
    c0: complex | None = None
    cPlus: complex | None = None
    cMinus: complex | None = None
    residual: float | None = None
    stats: dict = field(default_factory=dict)

    def demod_slice(self) -> slice:
        return slice(self.demod_start, None)

    def dump(self, path) -> None:
        """Write ``t Q P Re(c) Im(c)`` columns as plain text."""
        data = np.column_stack([self.t, self.Q, self.P, self.c.real, self.c.imag])
        np.savetxt(path, data, fmt="%.17g", header="t Q P Re_c Im_c")


def _initial_state(cfg: OracleConfig):
    if cfg.start == "zero":
        return 0.0, 0.0, 0j
    return cfg.Q0, 0.0, cfg.c0


def integrate_batch(configs, kernel=None) -> list[OracleTrace]:
    """Integrate several configs in one kernel call.

    All configs must share ``n_per_period``, ``settle_periods`` and
    ``demodPeriods`` so the step counts line up.
    """
    kernel = kernel or _kernels.rk4
    configs = list(configs)
    n = {c.n_per_period for c in configs}
    s = {c.settle_periods for c in configs}
    d = {c.demodPeriods for c in configs}
    if len(n) != 1 or len(s) != 1 or len(d) != 1:
        raise DomainError("batched configs must share step and period counts")
    n, s, d = n.pop(), s.pop(), d.pop()

    def arr(fn, dtype=np.float64):
        return np.array([fn(c) for c in configs], dtype=dtype)

    init = [_initial_state(c) for c in configs]
    Q = np.array([i[0] for i in init], dtype=np.float64)
    P = np.array([i[1] for i in init], dtype=np.float64)
    c = np.array([i[2] for i in init], dtype=np.complex128)
    dt = arr(lambda c: c.dt)
    params = (arr(lambda c: c.reduced.kappa), arr(lambda c: c.reduced.gamma),
              arr(lambda c: c.reduced.omega_m), arr(lambda c: c.coupling),
              arr(lambda c: c.eps_c), arr(lambda c: c.eps_p),
              arr(lambda c: c.detuning0), arr(lambda c: c.delta))
    scale = arr(lambda c: max(abs(c.c0), c.eps_c / c.reduced.kappa, 1e-300))
    blowup = BLOWUP_FACTOR * scale

    settle_steps = s * n
    every = max(1, settle_steps // SETTLE_RECORDS)
    t0 = np.zeros(len(configs))
    Q1, P1, c1, sQ, sP, sc, div1 = kernel(Q, P, c, t0, dt, settle_steps, *params, every, blowup)
    t1 = settle_steps * dt
    demod_steps = d * n
    Q2, P2, c2, dQ, dP, dc, div2 = kernel(Q1, P1, c1, t1, dt, demod_steps, *params, 1, blowup)

    traces = []
    n_settle_rec = sQ.shape[1]
    for b, cfg in enumerate(configs):
        t_settle = (np.arange(1, n_settle_rec + 1) * every) * dt[b]
        t_demod = t1[b] + np.arange(1, demod_steps + 1) * dt[b]
        diverged = bool(div1[b] or div2[b])
        traces.append(OracleTrace(
            config=cfg,
            t=np.concatenate([t_settle, t_demod]),
            Q=np.concatenate([sQ[b], dQ[b]]),
            P=np.concatenate([sP[b], dP[b]]),
            c=np.concatenate([sc[b], dc[b]]),
            demod_start=n_settle_rec,
            diverged=diverged,
            stats={"dt": dt[b], "steps": settle_steps + demod_steps, "backend": _kernels.BACKEND},
        ))
        if diverged:
            log.warning("trajectory diverged (config %s)", cfg)
    return traces


def integrate_mean_equations(config: OracleConfig, kernel=None) -> OracleTrace:
    """RK4 trajectory over ``settleTime + demodWindow``, with sidebands extracted."""
    trace = integrate_batch([config], kernel=kernel)[0]
    if not trace.diverged:
        extract_sidebands(trace, config.delta)
    return trace


def extract_sidebands(trace: OracleTrace, delta: float) -> tuple[complex, complex, complex]:
    """Project the demodulation window of ``c(t)`` onto ``1, exp(-+i delta t)``.

    ``c_plus`` and ``c_minus`` are returned per unit probe amplitude (zero when
    the probe is off).  The fit residual is stored on the trace relative to
    ``|c_plus eps_p|``.
    """
    if trace.diverged:
        raise DivergenceError("cannot demodulate a diverged trajectory")
    sl = trace.demod_slice()
    t, c = trace.t[sl], trace.c[sl]
    c0 = c.mean()
    a_plus = (c * np.exp(1j * delta * t)).mean()
    a_minus = (c * np.exp(-1j * delta * t)).mean()
    fit = c0 + a_plus * np.exp(-1j * delta * t) + a_minus * np.exp(1j * delta * t)
    resid = np.sqrt(np.mean(np.abs(c - fit) ** 2))
    eps_p = trace.config.eps_p
    if eps_p == 0:
        c_plus = c_minus = 0j
        rel = 0.0 if resid == 0 else math.inf
    else:
        c_plus, c_minus = a_plus / eps_p, a_minus / eps_p
        rel = resid / max(abs(a_plus), 1e-300)
        if rel > LEAKAGE_WARN:
            warnings.warn(f"sideband leakage {rel:.3g} exceeds {LEAKAGE_WARN}; "
                          "reduce probeRatio", SidebandLeakageWarning, stacklevel=2)
    trace.c0, trace.cPlus, trace.cMinus, trace.residual = complex(c0), complex(c_plus), complex(c_minus), rel
    return trace.c0, trace.cPlus, trace.cMinus


def oracle_epsilon_T(config: OracleConfig, kernel=None) -> complex:
    """``2 kappa c_plus`` from the demodulated trajectory."""
    trace = integrate_mean_equations(config, kernel=kernel)
    if trace.diverged:
        raise DivergenceError("oracle trajectory diverged")
    return 2 * config.reduced.kappa * trace.cPlus


def oracle_spectrum(reduced: ReducedParams, x, Delta: float | None = None,
                    kernel=None, **cfg_kw) -> np.ndarray:
    """Oracle ``eps_T`` at detunings ``x = delta - omega_m``; NaN where diverged."""
    Delta = reduced.omega_m if Delta is None else Delta
    x = np.atleast_1d(np.asarray(x, dtype=float))
    deltas = reduced.omega_m + x
    base = [OracleConfig(reduced, Delta, float(d), **cfg_kw) for d in deltas]
    # common step and period counts for batching
    n = max(c.n_per_period for c in base)
    s = max(c.settle_periods for c in base)
    cfgs = [replace(c, steps_per_period=n, settleTime=s * c.period) for c in base]
    out = np.full(len(cfgs), np.nan + 0j)
    for i, tr in enumerate(integrate_batch(cfgs, kernel=kernel)):
        if not tr.diverged:
            extract_sidebands(tr, tr.config.delta)
            out[i] = 2 * reduced.kappa * tr.cPlus
    return out


def sideband_linear_solve(delta: float, Delta: float, inputs: SidebandInputs) -> np.ndarray:
    """Solve the first-order sideband relations as a 4x4 complex linear system.

    Unknowns ``(c_plus, conj(c_minus), q_plus, conj(q_minus))``; the rows are
    the ``q_plus`` relation, the conjugated ``q_minus`` relation, the
    ``c_plus`` relation and the conjugated ``c_minus`` relation, with no
    elimination done by hand.
    """
    k, g, w = inputs.kappa, inputs.gamma, inputs.omega_m
    chi, m, hbar = inputs.chi0, inputs.m, inputs.hbar
    c0 = inputs.eps_c / complex(k, Delta)
    c0s = c0.conjugate()
    d_plus = complex(w ** 2 - delta ** 2, -delta * g)
    A = np.zeros((4, 4), dtype=np.complex128)
    r = np.zeros(4, dtype=np.complex128)
    # m d+ q+ = chi (c0 c-* + c0* c+)
    A[0] = [-chi * c0s, -chi * c0, m * d_plus, 0]
    # conj of: m d- q- = chi (c0 c+* + c0* c-), with d- = conj(d+)
    A[1] = [-chi * c0s, -chi * c0, 0, m * d_plus]
    # (k + i(Delta - delta)) c+ - i c0 chi/hbar q+ = 1
    A[2] = [complex(k, Delta - delta), 0, -1j * c0 * chi / hbar, 0]
    r[2] = 1.0
    # conj of: (k + i(Delta + delta)) c- - i c0 chi/hbar q- = 0
    A[3] = [0, complex(k, -(Delta + delta)), 0, 1j * c0s * chi / hbar]
    return np.linalg.solve(A, r)
