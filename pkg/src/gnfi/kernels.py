"""Per-mode numeric kernels, each in a numba and a numpy flavour.

The public names at the bottom of the module bind to whichever flavour
``gnfi._accel`` selects. Both flavours stay importable under their private
names so tests and the benchmark can compare them directly.
"""
import numpy as np

from ._accel import njit, select

__all__ = ["dft_direct", "transfer_coefficients", "backpropagate"]


# --------------------------------------------------------------------------
# direct (quadratic-cost) DFT, used as an oracle for the FFT path

@njit
def _dft_direct_numba(values):
    n1, n2 = values.shape
    two_pi = 2.0 * np.pi
    # twiddle tables with integer phase reduction keep the arguments small
    w1 = np.empty((n1, n1), dtype=np.complex128)
    for k in range(n1):
        for i in range(n1):
            w1[k, i] = np.exp(-1j * two_pi * ((k * i) % n1) / n1)
    w2 = np.empty((n2, n2), dtype=np.complex128)
    for k in range(n2):
        for j in range(n2):
            w2[k, j] = np.exp(-1j * two_pi * ((k * j) % n2) / n2)
    # sum over j first, then over i
    tmp = np.zeros((n1, n2), dtype=np.complex128)
    for i in range(n1):
        for k2 in range(n2):
            acc = 0.0 + 0.0j
            for j in range(n2):
                acc += values[i, j] * w2[k2, j]
            tmp[i, k2] = acc
    out = np.zeros((n1, n2), dtype=np.complex128)
    for k1 in range(n1):
        for k2 in range(n2):
            acc = 0.0 + 0.0j
            for i in range(n1):
                acc += w1[k1, i] * tmp[i, k2]
            out[k1, k2] = acc / (n1 * n2)
    return out


def _dft_direct_numpy(values):
    values = np.asarray(values, dtype=np.complex128)
    n1, n2 = values.shape
    i1 = np.arange(n1)
    i2 = np.arange(n2)
    w1 = np.exp(-2j * np.pi * (np.outer(i1, i1) % n1) / n1)
    w2 = np.exp(-2j * np.pi * (np.outer(i2, i2) % n2) / n2)
    # out[k1,k2] = sum_{i,j} w1[k1,i] u[i,j] w2[k2,j]
    return (w1 @ values @ w2.T) / (n1 * n2)


# --------------------------------------------------------------------------
# first-order transfer coefficients C_1n, C_2n, A^+_3n, B^-_3n

@njit
def _transfer_numba(alpha1, alpha2, beta_p, beta_m, kp, km, p1, p2, eps_d, eps_q):
    m = alpha1.size
    c1 = np.zeros(m, dtype=np.complex128)
    c2 = np.zeros(m, dtype=np.complex128)
    a3 = np.zeros(m, dtype=np.complex128)
    b3 = np.zeros(m, dtype=np.complex128)
    ok = np.zeros(m, dtype=np.bool_)
    big_k = 2j * kp * (kp - km)
    kp2 = kp * kp
    km2 = km * km
    for i in range(m):
        a2 = alpha1[i] * alpha1[i] + alpha2[i] * alpha2[i]
        d = beta_p[i] + beta_m[i]
        if a2 > kp2 and a2 > km2:
            bb = beta_p[i].imag * beta_m[i].imag
            q = (a2 * (kp2 + km2) - kp2 * km2) / (a2 + bb) + 0j
        else:
            q = a2 + beta_p[i] * beta_m[i]
        if abs(d) < eps_d or abs(q) < eps_q:
            continue
        ok[i] = True
        s = p1 * alpha1[i] + p2 * alpha2[i]
        g = big_k / d
        c1[i] = g * (alpha1[i] * s / q - p1)
        c2[i] = g * (alpha2[i] * s / q - p2)
        a3[i] = g * beta_m[i] * s / q
        b3[i] = -g * beta_p[i] * s / q
    return c1, c2, a3, b3, ok


def _transfer_numpy(alpha1, alpha2, beta_p, beta_m, kp, km, p1, p2, eps_d, eps_q):
    alpha1 = np.asarray(alpha1, dtype=np.float64)
    alpha2 = np.asarray(alpha2, dtype=np.float64)
    beta_p = np.asarray(beta_p, dtype=np.complex128)
    beta_m = np.asarray(beta_m, dtype=np.complex128)
    a2 = alpha1**2 + alpha2**2
    d = beta_p + beta_m
    both_evanescent = (a2 > kp**2) & (a2 > km**2)
    bb = beta_p.imag * beta_m.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        q_stable = (a2 * (kp**2 + km**2) - kp**2 * km**2) / (a2 + bb)
    q = np.where(both_evanescent, q_stable + 0j, a2 + beta_p * beta_m)
    ok = (np.abs(d) >= eps_d) & (np.abs(q) >= eps_q)
    d_safe = np.where(ok, d, 1.0)
    q_safe = np.where(ok, q, 1.0)
    s = p1 * alpha1 + p2 * alpha2
    g = 2j * kp * (kp - km) / d_safe
    c1 = np.where(ok, g * (alpha1 * s / q_safe - p1), 0.0)
    c2 = np.where(ok, g * (alpha2 * s / q_safe - p2), 0.0)
    a3 = np.where(ok, g * beta_m * s / q_safe, 0.0)
    b3 = np.where(ok, -g * beta_p * s / q_safe, 0.0)
    return c1, c2, a3, b3, ok


# --------------------------------------------------------------------------
# mode-wise inversion: phi_n = keep_n * E_n * exp(-i*sign*beta_n*z) / C_n

@njit
def _backpropagate_numba(data_n, coeff, beta, z, sign, keep):
    m = data_n.size
    out = np.zeros(m, dtype=np.complex128)
    for i in range(m):
        if keep[i]:
            out[i] = data_n[i] * np.exp(-1j * sign * beta[i] * z) / coeff[i]
    return out


def _backpropagate_numpy(data_n, coeff, beta, z, sign, keep):
    out = np.zeros(data_n.shape, dtype=np.complex128)
    out[keep] = data_n[keep] * np.exp(-1j * sign * beta[keep] * z) / coeff[keep]
    return out


_dft_direct = select(_dft_direct_numba, _dft_direct_numpy)
_transfer = select(_transfer_numba, _transfer_numpy)
_backpropagate = select(_backpropagate_numba, _backpropagate_numpy)


def dft_direct(values):
    """Direct double sum ``(1/N1N2) sum u_ij exp(-i alpha_n . x_ij)``, FFT ordering."""
    return _dft_direct(np.ascontiguousarray(values, dtype=np.complex128))


def transfer_coefficients(alpha1, alpha2, beta_p, beta_m, kp, km, p1, p2, eps_d, eps_q):
    """Flat arrays in, ``(C1, C2, A3, B3, ok)`` out; guarded modes have ``ok`` False."""
    return _transfer(
        np.ascontiguousarray(alpha1, dtype=np.float64),
        np.ascontiguousarray(alpha2, dtype=np.float64),
        np.ascontiguousarray(beta_p, dtype=np.complex128),
        np.ascontiguousarray(beta_m, dtype=np.complex128),
        float(kp), float(km), float(p1), float(p2), float(eps_d), float(eps_q),
    )


def backpropagate(data_n, coeff, beta, z, sign, keep):
    return _backpropagate(
        np.ascontiguousarray(data_n, dtype=np.complex128),
        np.ascontiguousarray(coeff, dtype=np.complex128),
        np.ascontiguousarray(beta, dtype=np.complex128),
        float(z), float(sign),
        np.ascontiguousarray(keep, dtype=np.bool_),
    )
