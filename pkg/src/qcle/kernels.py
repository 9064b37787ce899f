"""Closed-form linear kernels and bath correlation functions.

The damped-oscillator kernels chi_q, chi_v and their spectral counterpart
chi_tilde are evaluated on a single complex code path so that overdamped,
underdamped and critically damped regimes connect continuously. The bath
enters through the noise spectral density and the Matsubara sum for the
noise/initial-position correlation.
"""

from __future__ import annotations

import numpy as np

_SMALL_ARG = 1e-4


def _sinhc(z: np.ndarray) -> np.ndarray:
    """sinh(z)/z with a series branch near z = 0 (complex-safe)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SMALL_ARG
    zs = z[small]
    out[small] = 1.0 + zs * zs / 6.0 * (1.0 + zs * zs / 20.0)
    zb = z[~small]
    out[~small] = np.sinh(zb) / zb
    return out


def omega0(gamma: float, eta: float) -> complex:
    """Principal square root of gamma^2 - 4*eta (purely imaginary when
    underdamped)."""
    return complex(np.sqrt(complex(gamma * gamma - 4.0 * eta)))


def effective_roots(gamma: float, eta: float) -> tuple[complex, complex, complex]:
    """Characteristic roots s_+/- of s^2 + gamma*s + eta and their separation.

    Near critical damping the separation is widened to 2e-5 so that divided
    differences of the form [F(s_+) - F(s_-)]/(s_+ - s_-) remain stable; the
    induced error is O(separation^2).
    """
    w0 = omega0(gamma, eta)
    if abs(w0) < 2e-5:
        sbar = -gamma / 2.0
        return sbar + 1e-5, sbar - 1e-5, complex(2e-5)
    return (-gamma + w0) / 2.0, (-gamma - w0) / 2.0, w0


def _check_nonneg_time(t: np.ndarray):
    if np.any(t < 0):
        raise ValueError("kernel times must satisfy t >= 0")


def chi_v(t, gamma: float, eta: float):
    """Velocity kernel (2/w0) e^{-gamma t/2} sinh(w0 t/2); limit t e^{-gamma t/2}
    at critical damping. Real in every regime."""
    t = np.asarray(t, dtype=float)
    _check_nonneg_time(t)
    z = omega0(gamma, eta) * t / 2.0
    out = np.real(t * np.exp(-gamma * t / 2.0) * _sinhc(z))
    return out if out.ndim else float(out)


def chi_q(t, gamma: float, eta: float):
    """Position kernel e^{-gamma t/2} [cosh(w0 t/2) + (gamma/w0) sinh(w0 t/2)].

    Satisfies chi_q = chi_v_dot + gamma*chi_v identically.
    """
    t = np.asarray(t, dtype=float)
    _check_nonneg_time(t)
    z = omega0(gamma, eta) * t / 2.0
    out = np.real(np.exp(-gamma * t / 2.0) * (np.cosh(z) + (gamma * t / 2.0) * _sinhc(z)))
    return out if out.ndim else float(out)


def chi_v_dot(t, gamma: float, eta: float):
    """Analytic time derivative of chi_v; chi_v_dot(0) = 1."""
    t = np.asarray(t, dtype=float)
    _check_nonneg_time(t)
    z = omega0(gamma, eta) * t / 2.0
    out = np.real(np.exp(-gamma * t / 2.0) * (np.cosh(z) - (gamma * t / 2.0) * _sinhc(z)))
    return out if out.ndim else float(out)


def chi_tilde(omega, gamma: float, eta: float):
    """Harmonic susceptibility (eta - omega^2 - i*gamma*omega)^{-1}."""
    omega = np.asarray(omega, dtype=float)
    if eta == 0 and np.any(omega == 0):
        raise ValueError("chi_tilde singular at omega = 0 when eta = 0")
    out = 1.0 / (eta - omega * omega - 1j * gamma * omega)
    return out if out.ndim else complex(out)


def _x_coth_x(x: np.ndarray) -> np.ndarray:
    """x*coth(x) for real x with a series branch near 0."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x < _SMALL_ARG
    xs = x[small]
    out[small] = 1.0 + xs * xs / 3.0 - xs**4 / 45.0
    xb = x[~small]
    out[~small] = xb / np.tanh(xb)
    return out


def noise_psd(omega, gamma: float, temp: float, nu: float):
    """Noise spectral density S(w) = (2 pi gamma T / nu) w coth(pi w / nu).

    Even, non-negative, with S(0) = 2 gamma T; the classical white-noise
    strength 2 gamma T is recovered for nu -> infinity.
    """
    omega = np.asarray(omega, dtype=float)
    out = 2.0 * gamma * temp * _x_coth_x(np.pi * omega / nu)
    return out if out.ndim else float(out)


def noise_correlation(tau, gamma: float, temp: float, nu: float,
                      tau_min: float = 1e-9):
    """Regular part of the noise autocorrelation, -(gamma T/2) nu sinh^{-2}(nu tau/2).

    Diverges (non-integrably) at coincidence; covariance construction must go
    through noise_psd instead, hence the tau_min guard.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau) < tau_min):
        raise ValueError(
            f"|tau| < {tau_min}: the correlation diverges at coincidence; "
            "use noise_psd for covariance construction"
        )
    # sinh^{-2}(x) = 4 e^{-2x}/(1 - e^{-2x})^2 in overflow-safe form
    x = nu * np.abs(tau) / 2.0
    e = np.exp(-x)
    inv_sinh2 = 4.0 * e * e / (1.0 - e * e) ** 2
    out = -(gamma * temp / 2.0) * nu * inv_sinh2
    return out if out.ndim else float(out)


def xi_q0_weights(gamma: float, temp: float, nu: float, eta: float,
                  t_min: float, tol: float,
                  max_terms: int = 20_000_000) -> tuple[np.ndarray, np.ndarray]:
    """Matsubara frequencies nu_n and coefficients c_n of the noise/initial
    position correlation <xi(t) q0> = -sum_n c_n e^{-nu_n t}, truncated so the
    absolute remainder is < tol for every t >= t_min.

    c_n = 2 gamma T nu_n / (nu_n^2 + gamma nu_n + eta): the decay rates of
    chi_v have elementary symmetric functions lambda1+lambda2 = gamma and
    lambda1*lambda2 = eta, which generalizes the eta = 1 form.
    """
    if not t_min > 0:
        raise ValueError("the Matsubara sum diverges logarithmically at t = 0")
    if not tol > 0:
        raise ValueError("tol must be positive")
    q = np.exp(-nu * t_min)
    n = 0
    chunks_n = []
    chunk = 4096
    while True:
        idx = np.arange(n + 1, n + chunk + 1, dtype=float)
        nun = idx * nu
        # tail bound after N terms: sum_{m>N} c_m e^{-nu_m t}
        #   <= (2 gamma T / nu_{N+1}) e^{-nu_{N+1} t_min} / (1 - q)
        bound = 2.0 * gamma * temp / nun * np.exp(-nun * t_min) / (1.0 - q)
        keep = bound >= tol
        if not keep.any():
            # the previous chunk already satisfied the bound at its last term
            break
        last = int(np.max(np.nonzero(keep)[0])) + 1
        chunks_n.append(nun[:last])
        n += last
        if last < chunk:
            break
        if n > max_terms:
            raise RuntimeError("Matsubara truncation did not reach tol")
    if chunks_n:
        nun = np.concatenate(chunks_n)
    else:
        nun = np.array([nu])  # always keep at least one term
    cn = 2.0 * gamma * temp * nun / (nun * nun + gamma * nun + eta)
    return nun, cn


def xi_q0_corr(t: float, gamma: float, temp: float, nu: float, eta: float,
               tol: float = 1e-10) -> tuple[float, int]:
    """Noise/initial-position correlation <xi(t) q0> at a single time t > 0.

    Returns (value, n_terms) where n_terms is the Matsubara truncation order
    guaranteeing an absolute remainder below tol.
    """
    if not t > 0:
        raise ValueError("xi_q0_corr requires t > 0 (logarithmic divergence at 0)")
    nun, cn = xi_q0_weights(gamma, temp, nu, eta, t_min=t, tol=tol)
    value = -float(np.sum(cn * np.exp(-nun * t)))
    return value, int(nun.size)
