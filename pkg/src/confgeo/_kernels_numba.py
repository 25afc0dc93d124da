"""Numba-compiled twins of the kernels in ``_kernels_numpy``.

Loop nests accumulate terms in the same order as the numpy expressions so
both paths produce matching floats.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def jet_mul_o1(av, ad1, bv, bd1):
    b, n = ad1.shape
    v = np.empty(b)
    d1 = np.empty((b, n))
    for p in range(b):
        v[p] = av[p] * bv[p]
        for i in range(n):
            d1[p, i] = av[p] * bd1[p, i] + bv[p] * ad1[p, i]
    return v, d1


@njit(cache=True)
def jet_mul_o2(av, ad1, ad2, bv, bd1, bd2):
    b, n = ad1.shape
    v = np.empty(b)
    d1 = np.empty((b, n))
    d2 = np.empty((b, n, n))
    for p in range(b):
        v[p] = av[p] * bv[p]
        for i in range(n):
            d1[p, i] = av[p] * bd1[p, i] + bv[p] * ad1[p, i]
            for j in range(n):
                d2[p, i, j] = (
                    av[p] * bd2[p, i, j]
                    + bv[p] * ad2[p, i, j]
                    + ad1[p, i] * bd1[p, j]
                    + bd1[p, i] * ad1[p, j]
                )
    return v, d1, d2


@njit(cache=True)
def jet_mul_o3(av, ad1, ad2, ad3, bv, bd1, bd2, bd3):
    b, n = ad1.shape
    v = np.empty(b)
    d1 = np.empty((b, n))
    d2 = np.empty((b, n, n))
    d3 = np.empty((b, n, n, n))
    for p in range(b):
        v[p] = av[p] * bv[p]
        for i in range(n):
            d1[p, i] = av[p] * bd1[p, i] + bv[p] * ad1[p, i]
            for j in range(n):
                d2[p, i, j] = (
                    av[p] * bd2[p, i, j]
                    + bv[p] * ad2[p, i, j]
                    + ad1[p, i] * bd1[p, j]
                    + bd1[p, i] * ad1[p, j]
                )
                for k in range(n):
                    s_ab = (
                        ad2[p, i, j] * bd1[p, k]
                        + ad2[p, i, k] * bd1[p, j]
                        + ad2[p, j, k] * bd1[p, i]
                    )
                    s_ba = (
                        bd2[p, i, j] * ad1[p, k]
                        + bd2[p, i, k] * ad1[p, j]
                        + bd2[p, j, k] * ad1[p, i]
                    )
                    d3[p, i, j, k] = (
                        av[p] * bd3[p, i, j, k] + bv[p] * ad3[p, i, j, k] + s_ab + s_ba
                    )
    return v, d1, d2, d3


@njit(cache=True)
def jet_chain_o1(f1, ad1):
    b, n = ad1.shape
    d1 = np.empty((b, n))
    for p in range(b):
        for i in range(n):
            d1[p, i] = f1[p] * ad1[p, i]
    return d1


@njit(cache=True)
def jet_chain_o2(f1, f2, ad1, ad2):
    b, n = ad1.shape
    d1 = np.empty((b, n))
    d2 = np.empty((b, n, n))
    for p in range(b):
        for i in range(n):
            d1[p, i] = f1[p] * ad1[p, i]
            for j in range(n):
                d2[p, i, j] = f1[p] * ad2[p, i, j] + f2[p] * (ad1[p, i] * ad1[p, j])
    return d1, d2


@njit(cache=True)
def jet_chain_o3(f1, f2, f3, ad1, ad2, ad3):
    b, n = ad1.shape
    d1 = np.empty((b, n))
    d2 = np.empty((b, n, n))
    d3 = np.empty((b, n, n, n))
    for p in range(b):
        for i in range(n):
            d1[p, i] = f1[p] * ad1[p, i]
            for j in range(n):
                d2[p, i, j] = f1[p] * ad2[p, i, j] + f2[p] * (ad1[p, i] * ad1[p, j])
                for k in range(n):
                    sym = (
                        ad2[p, i, j] * ad1[p, k]
                        + ad2[p, i, k] * ad1[p, j]
                        + ad2[p, j, k] * ad1[p, i]
                    )
                    d3[p, i, j, k] = (
                        f1[p] * ad3[p, i, j, k]
                        + f2[p] * sym
                        + f3[p] * (ad1[p, i] * ad1[p, j] * ad1[p, k])
                    )
    return d1, d2, d3


@njit(cache=True)
def rk4_transport(a_samples, h):
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
