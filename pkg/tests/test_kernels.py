import os
import subprocess
import sys

import numpy as np
import pytest

from omitkit import _kernels

needs_numba = pytest.mark.skipif(_kernels.rk4_numba is None, reason="numba not installed")


def args(B=3, nsteps=2000, record_every=100, blowup=1e6, eps_p=1e-3, G=0.05, kappa=1.0):
    one = np.ones(B)
    return (np.linspace(0.0, 0.1, B), np.zeros(B), np.full(B, 0.5 + 0.1j), np.zeros(B),
            np.linspace(0.01, 0.02, B), nsteps, one * kappa, one * 0.01, one * 1.0, one * G,
            one * 1.0, one * eps_p, one * 1.02, np.linspace(0.99, 1.01, B), record_every,
            one * blowup)


@needs_numba
def test_backends_agree():
    a = args()
    out_nb = _kernels.rk4_numba(*a)
    out_np = _kernels.rk4_numpy(*a)
    for u, v in zip(out_nb, out_np):
        np.testing.assert_allclose(u, v, rtol=1e-13, atol=1e-15)


@needs_numba
def test_backends_agree_after_divergence():
    a = args(kappa=-0.5, blowup=2.0, nsteps=5000, record_every=1)
    nb, npy = _kernels.rk4_numba(*a), _kernels.rk4_numpy(*a)
    np.testing.assert_array_equal(nb[6], npy[6])
    np.testing.assert_array_equal(np.isnan(nb[5]), np.isnan(npy[5]))


@pytest.mark.parametrize("kernel", [_kernels.rk4_numpy] + ([_kernels.rk4_numba] if _kernels.rk4_numba else []))
def test_divergence_flag_and_nan_records(kernel):
    # negative loss makes the cavity amplitude grow without bound
    Q, P, c, rQ, rP, rc, div = kernel(*args(kappa=-0.5, blowup=2.0, nsteps=5000, record_every=1))
    assert div.all()
    assert np.isnan(rc[:, -1]).all()
    # state is frozen at the first out-of-bounds value
    assert np.all(np.abs(c) > 2.0)


@pytest.mark.parametrize("kernel", [_kernels.rk4_numpy] + ([_kernels.rk4_numba] if _kernels.rk4_numba else []))
def test_fourth_order(kernel):
    # driven damped cavity, no mechanics: error drops ~16x per halving of dt
    def run(n):
        one = np.ones(1)
        T = 5.0
        out = kernel(np.zeros(1), np.zeros(1), np.zeros(1, complex), np.zeros(1), one * T / n, n,
                     one, one * 0.1, one, one * 0.0, one, one * 0.3, one * 0.5, one * 3.0, 0, one * 1e9)
        return out[2][0]
    ref = run(20000)
    e1, e2 = abs(run(100) - ref), abs(run(200) - ref)
    assert 12 < e1 / e2 < 20


def test_records_shape():
    out = _kernels.rk4_numpy(*args(nsteps=1000, record_every=100))
    assert out[3].shape == (3, 10)
    out = _kernels.rk4_numpy(*args(nsteps=1000, record_every=0))
    assert out[3].shape == (3, 0)


@pytest.mark.parametrize("flag, backend", [("0", "numpy"), ("off", "numpy")])
def test_env_flag(flag, backend):
    env = dict(os.environ, OMITKIT_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from omitkit import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == backend


@needs_numba
def test_default_backend_is_numba():
    env = {k: v for k, v in os.environ.items() if k != "OMITKIT_NUMBA"}
    out = subprocess.run([sys.executable, "-c", "from omitkit import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
