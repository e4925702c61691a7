"""Fixed-step RK4 kernels for the mean-value equations.

State per trajectory: scaled displacement ``Q``, scaled momentum ``P`` and
cavity amplitude ``c``::

    Q' = P
    P' = -omega_m**2 Q + G |c|**2 - gamma P
    c' = -(kappa + i(Delta0 - Q)) c + eps_c + eps_p exp(-i delta t)

Both kernels integrate a batch of independent trajectories with a common
step count and per-trajectory step size.  The numba kernel loops over
trajectories and steps; the numpy kernel loops over steps and vectorises over
the batch.  Set ``OMITKIT_NUMBA=0`` to force the numpy kernel.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

_WANT_NUMBA = os.environ.get("OMITKIT_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


def rk4_numpy(Q, P, c, t0, dt, nsteps, kappa, gamma, omega_m, G, eps_c, eps_p,
              detuning0, delta, record_every, blowup):
    """Vectorised RK4 over a batch.

    Every argument except ``nsteps`` and ``record_every`` is a length-``B``
    array.  Returns ``(Q, P, c, rec_Q, rec_P, rec_c, diverged)``; records are
    taken after every ``record_every``-th step (none when 0) and are NaN
    after a trajectory diverges.
    """
    Q = np.array(Q, dtype=np.float64)
    P = np.array(P, dtype=np.float64)
    c = np.array(c, dtype=np.complex128)
    B = Q.shape[0]
    nrec = nsteps // record_every if record_every > 0 else 0
    rec_Q = np.full((B, nrec), np.nan)
    rec_P = np.full((B, nrec), np.nan)
    rec_c = np.full((B, nrec), np.nan + 0j)
    diverged = np.zeros(B, dtype=np.bool_)
    loss = kappa + 1j * detuning0
    w2 = omega_m * omega_m
    h = dt
    half = 0.5 * h

    def rhs(t, q, p, a):
        dq = p
        dp = -w2 * q + G * (a.real * a.real + a.imag * a.imag) - gamma * p
        da = -(loss - 1j * q) * a + eps_c + eps_p * np.exp(-1j * delta * t)
        return dq, dp, da

    t = np.array(t0, dtype=np.float64)
    j = 0
    for step in range(nsteps):
        k1q, k1p, k1c = rhs(t, Q, P, c)
        k2q, k2p, k2c = rhs(t + half, Q + half * k1q, P + half * k1p, c + half * k1c)
        k3q, k3p, k3c = rhs(t + half, Q + half * k2q, P + half * k2p, c + half * k2c)
        k4q, k4p, k4c = rhs(t + h, Q + h * k3q, P + h * k3p, c + h * k3c)
        live = ~diverged
        Q = np.where(live, Q + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q), Q)
        P = np.where(live, P + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p), P)
        c = np.where(live, c + h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c), c)
        t = t0 + (step + 1) * h
        bad = live & ~(np.abs(c) <= blowup)
        if bad.any():
            diverged |= bad
        if record_every > 0 and (step + 1) % record_every == 0:
            ok = ~diverged
            rec_Q[ok, j] = Q[ok]
            rec_P[ok, j] = P[ok]
            rec_c[ok, j] = c[ok]
            j += 1
    return Q, P, c, rec_Q, rec_P, rec_c, diverged


if numba is not None:

    @numba.njit(cache=True)
    def _rhs_scalar(t, q, p, a, kappa, gamma, w2, G, eps_c, eps_p, det0, delta):
        dq = p
        dp = -w2 * q + G * (a.real * a.real + a.imag * a.imag) - gamma * p
        da = -(kappa + 1j * (det0 - q)) * a + eps_c + eps_p * np.exp(-1j * delta * t)
        return dq, dp, da

    @numba.njit(cache=True)
    def rk4_numba(Q, P, c, t0, dt, nsteps, kappa, gamma, omega_m, G, eps_c, eps_p,
                  detuning0, delta, record_every, blowup):
        B = Q.shape[0]
        nrec = nsteps // record_every if record_every > 0 else 0
        Qo = Q.astype(np.float64).copy()
        Po = P.astype(np.float64).copy()
        co = c.astype(np.complex128).copy()
        rec_Q = np.full((B, nrec), np.nan)
        rec_P = np.full((B, nrec), np.nan)
        rec_c = np.full((B, nrec), np.nan + 0j)
        diverged = np.zeros(B, dtype=np.bool_)
        for b in range(B):
            q, p, a = Qo[b], Po[b], co[b]
            h = dt[b]
            half = 0.5 * h
            k_, g_, w2 = kappa[b], gamma[b], omega_m[b] * omega_m[b]
            G_, ec, ep, d0, dl = G[b], eps_c[b], eps_p[b], detuning0[b], delta[b]
            lim = blowup[b]
            j = 0
            for step in range(nsteps):
                t = t0[b] + step * h
                k1q, k1p, k1c = _rhs_scalar(t, q, p, a, k_, g_, w2, G_, ec, ep, d0, dl)
                k2q, k2p, k2c = _rhs_scalar(t + half, q + half * k1q, p + half * k1p,
                                            a + half * k1c, k_, g_, w2, G_, ec, ep, d0, dl)
                k3q, k3p, k3c = _rhs_scalar(t + half, q + half * k2q, p + half * k2p,
                                            a + half * k2c, k_, g_, w2, G_, ec, ep, d0, dl)
                k4q, k4p, k4c = _rhs_scalar(t + h, q + h * k3q, p + h * k3p,
                                            a + h * k3c, k_, g_, w2, G_, ec, ep, d0, dl)
                q = q + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
                p = p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
                a = a + h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c)
                if not (abs(a) <= lim):
                    diverged[b] = True
                    break
                if record_every > 0 and (step + 1) % record_every == 0:
                    rec_Q[b, j] = q
                    rec_P[b, j] = p
                    rec_c[b, j] = a
                    j += 1
            Qo[b], Po[b], co[b] = q, p, a
        return Qo, Po, co, rec_Q, rec_P, rec_c, diverged

else:  # pragma: no cover
    rk4_numba = None


USING_NUMBA = _WANT_NUMBA and rk4_numba is not None
rk4 = rk4_numba if USING_NUMBA else rk4_numpy
BACKEND = "numba" if USING_NUMBA else "numpy"
