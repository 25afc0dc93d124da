"""Pure-numpy implementations of the hot kernels.

Every function here has a numba twin in ``_kernels_numba``; the two must
agree on shapes and, term for term, on the order of floating-point
operations so the env-flag switch does not move residuals.  All arrays are
C-contiguous float64 with a flattened leading batch axis ``B``.
"""

from __future__ import annotations

import numpy as np


def jet_mul_o1(av, ad1, bv, bd1):
    v = av * bv
    d1 = av[:, None] * bd1 + bv[:, None] * ad1
    return v, d1


def jet_mul_o2(av, ad1, ad2, bv, bd1, bd2):
    v = av * bv
    d1 = av[:, None] * bd1 + bv[:, None] * ad1
    d2 = (
        av[:, None, None] * bd2
        + bv[:, None, None] * ad2
        + ad1[:, :, None] * bd1[:, None, :]
        + bd1[:, :, None] * ad1[:, None, :]
    )
    return v, d1, d2


def jet_mul_o3(av, ad1, ad2, ad3, bv, bd1, bd2, bd3):
    v = av * bv
    d1 = av[:, None] * bd1 + bv[:, None] * ad1
    d2 = (
        av[:, None, None] * bd2
        + bv[:, None, None] * ad2
        + ad1[:, :, None] * bd1[:, None, :]
        + bd1[:, :, None] * ad1[:, None, :]
    )
    d3 = (
        av[:, None, None, None] * bd3
        + bv[:, None, None, None] * ad3
        + _sym3(ad2, bd1)
        + _sym3(bd2, ad1)
    )
    return v, d1, d2, d3


def _sym3(h, u):
    # h: (B,n,n) symmetric, u: (B,n) -> symmetrized rank-3 product
    return (
        h[:, :, :, None] * u[:, None, None, :]
        + h[:, :, None, :] * u[:, None, :, None]
        + h[:, None, :, :] * u[:, :, None, None]
    )


def jet_chain_o1(f1, ad1):
    return f1[:, None] * ad1


def jet_chain_o2(f1, f2, ad1, ad2):
    d1 = f1[:, None] * ad1
    d2 = f1[:, None, None] * ad2 + f2[:, None, None] * (ad1[:, :, None] * ad1[:, None, :])
    return d1, d2


def jet_chain_o3(f1, f2, f3, ad1, ad2, ad3):
    d1 = f1[:, None] * ad1
    d2 = f1[:, None, None] * ad2 + f2[:, None, None] * (ad1[:, :, None] * ad1[:, None, :])
    d3 = (
        f1[:, None, None, None] * ad3
        + f2[:, None, None, None] * _sym3(ad2, ad1)
        + f3[:, None, None, None]
        * (ad1[:, :, None, None] * ad1[:, None, :, None] * ad1[:, None, None, :])
    )
    return d1, d2, d3


def rk4_transport(a_samples, h):
    """Integrate P' = A(t) P across uniform steps.

    a_samples holds A at t_0, t_1/2, t_1, ..., t_m (shape (2m+1, n, n));
    returns the full transport matrix P(t_m) with P(t_0) = I.
    """
    m2, n, _ = a_samples.shape
    steps = (m2 - 1) // 2
    p = np.eye(n)
    for s in range(steps):
        a0 = a_samples[2 * s]
        ah = a_samples[2 * s + 1]
        a1 = a_samples[2 * s + 2]
        k1 = a0 @ p
        k2 = ah @ (p + (0.5 * h) * k1)
        k3 = ah @ (p + (0.5 * h) * k2)
        k4 = a1 @ (p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return p
