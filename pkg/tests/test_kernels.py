import os
import subprocess
import sys

import numpy as np
import pytest

from gnfi import _accel, kernels
from gnfi.physics import mode_basis

from conftest import PI, make_cfg


def test_dft_parity(rng):
    v = rng.standard_normal((12, 8)) + 1j * rng.standard_normal((12, 8))
    a = kernels._dft_direct_numba(v)
    b = kernels._dft_direct_numpy(v)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12 * np.abs(b).max())
    np.testing.assert_allclose(b, np.fft.fft2(v) / v.size, atol=1e-13)


def test_transfer_parity():
    cfg = make_cfg(n=32, pol=(0.6, 0.8))
    b = mode_basis(cfg)
    args = (b.alpha1.ravel(), b.alpha2.ravel(), b.beta_plus.ravel(), b.beta_minus.ravel(),
            PI, 1.6 * PI, 0.6, 0.8, 1e-9 * PI, 1e-9 * PI**2)
    x = kernels._transfer_numba(*[np.ascontiguousarray(a) for a in args[:4]], *args[4:])
    y = kernels._transfer_numpy(*args)
    for p, q in zip(x[:4], y[:4]):
        np.testing.assert_allclose(p, q, rtol=1e-14, atol=1e-300)
    np.testing.assert_array_equal(x[4], y[4])


def test_transfer_guard_flags_small_divisor():
    # kappa_minus = -kappa_plus would give beta+ + beta- = 0 at n = 0; emulate directly
    out = kernels.transfer_coefficients([0.0], [0.0], [1.0], [-1.0], 1.0, 2.0, 1.0, 0.0, 1e-9, 1e-9)
    assert not out[4][0] and out[0][0] == 0


def test_backpropagate_parity(rng):
    m = 200
    d = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    c = rng.standard_normal(m) + 1j * rng.standard_normal(m) + 2
    beta = np.where(rng.uniform(size=m) < 0.5, rng.uniform(0, 3, m) + 0j, 1j * rng.uniform(0, 20, m))
    keep = rng.uniform(size=m) < 0.7
    for sign in (1.0, -1.0):
        x = kernels._backpropagate_numba(d, c, beta, 0.2 * sign, sign, keep)
        y = kernels._backpropagate_numpy(d, c, beta, 0.2 * sign, sign, keep)
        np.testing.assert_allclose(x, y, rtol=1e-14)
        assert np.all(x[~keep] == 0)


def test_env_flag_selects_numpy():
    code = "from gnfi import _accel, kernels; print(_accel.USE_NUMBA, kernels._transfer is kernels._transfer_numpy)"
    env = dict(os.environ, GNFI_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True"]


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_default_uses_numba():
    code = "from gnfi import _accel; print(_accel.USE_NUMBA)"
    env = {k: v for k, v in os.environ.items() if k != "GNFI_DISABLE_NUMBA"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "True"
