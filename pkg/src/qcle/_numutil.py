"""Shared numerical helpers: trapezoid calculus, discrete convolutions and
uniform-grid oscillatory sums."""

from __future__ import annotations

import numpy as np


def cumtrapz(y: np.ndarray, dt: float) -> np.ndarray:
    """Cumulative trapezoid integral starting at 0."""
    out = np.zeros_like(np.asarray(y, dtype=float))
    out[1:] = np.cumsum((y[1:] + y[:-1]) * (dt / 2.0))
    return out


def trapezoid_weights(n: int, dx: float) -> np.ndarray:
    w = np.full(n, dx)
    w[0] = w[-1] = dx / 2.0
    return w


def _next_pow2(n: int) -> int:
    return 1 << (int(n - 1).bit_length())


def linear_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear convolution with zero padding, via FFT.

    Numerically equivalent (to roundoff) to the direct summation
    sum_j a[j] b[k-j] with zeros outside the arrays; deterministic.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.size + b.size - 1
    nfft = _next_pow2(n)
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        fa = np.fft.fft(a, nfft)
        fb = np.fft.fft(b, nfft)
        return np.fft.ifft(fa * fb)[:n]
    fa = np.fft.rfft(a, nfft)
    fb = np.fft.rfft(b, nfft)
    return np.fft.irfft(fa * fb, nfft)[:n]


def volterra_conv(kernel: np.ndarray, h: np.ndarray, dt: float) -> np.ndarray:
    """Trapezoid discretization of int_0^t kernel(t-y) h(y) dy on a shared
    uniform grid."""
    n = kernel.size
    full = linear_convolve(kernel, h)[:n]
    return dt * (full - 0.5 * (kernel * h[0] + kernel[0] * h))


def phase_stepped_sum(coeffs: np.ndarray, x0: float, dx: float,
                      ys: np.ndarray, sign: int) -> np.ndarray:
    """sum_k coeffs[k] * exp(sign*1j*(x0 + k*dx)*ys), one vector op pair per k.

    The running phase is advanced multiplicatively; |step| = 1 so the drift
    over k steps is O(k*eps).
    """
    ys = np.asarray(ys, dtype=float)
    run = np.exp(sign * 1j * x0 * ys)
    step = np.exp(sign * 1j * dx * ys)
    acc = np.zeros(ys.shape, dtype=complex)
    for c in np.asarray(coeffs):
        if c != 0:
            acc += c * run
        run *= step
    return acc
