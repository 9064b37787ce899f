"""Conditional-PDF moments: mean trajectory, variance and their spectra.

The variance noise term is evaluated in the frequency domain,

    <phi_q(t)^2> = (1/pi) int_0^W S(w) |Lambda(t,w)|^2 dw,
    Lambda(t,w)  = int_0^t chi_v(s) e^{-iws} ds  (closed form),

which is the double time quadrature of the velocity-noise covariance routed
through the spectral density. For quantum nu the strict Ohmic integrand
decays only like 1/w, so the cutoff W acts as a physical UV regulator; in
the classical regime the result is cutoff-insensitive and the convergence
check below verifies that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from ._numutil import cumtrapz, phase_stepped_sum, trapezoid_weights, volterra_conv
from .djm import ConvergenceError, DjmSolution, FunctionalProblem, djm_solve
from .grids import FreqGrid, SampledSignal, Spectrum, TimeGrid
from .params import BathParams, PotentialParams


class QuadratureError(RuntimeError):
    """Estimated quadrature error exceeded the requested tolerance."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


class PlateauError(ValueError):
    """No late-time plateau detected; the caller should extend t_max."""


@dataclass(frozen=True)
class SpectralQuadrature:
    """Frequency quadrature for noise covariances: trapezoid on [0, omega_max]
    with n nodes. With check=True the result is compared against the
    half-range/half-resolution evaluations and rejected if they differ by
    more than rtol (relative to the result scale)."""

    omega_max: float = 300.0
    n: int = 6001
    rtol: float = 1e-3
    check: bool = True

    def __post_init__(self):
        if not self.omega_max > 0 or self.n < 9:
            raise ValueError("need omega_max > 0 and n >= 9")
        if not self.rtol > 0:
            raise ValueError("rtol must be positive")

    @property
    def d_omega(self) -> float:
        return self.omega_max / (self.n - 1)


def _e1(x: np.ndarray) -> np.ndarray:
    """(e^x - 1)/x, complex-safe, series branch near 0."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 + xs / 2.0 * (1.0 + xs / 3.0)
    xb = x[~small]
    out[~small] = (np.exp(xb) - 1.0) / xb
    return out


def _e1m(x: np.ndarray) -> np.ndarray:
    """(1 - e^{-x})/x, complex-safe, series branch near 0."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 - xs / 2.0 * (1.0 - xs / 3.0)
    xb = x[~small]
    out[~small] = (1.0 - np.exp(-xb)) / xb
    return out


def _chi_v_window(t: np.ndarray, omega: np.ndarray, gamma: float,
                  eta: float) -> np.ndarray:
    """Lambda(t, w) = int_0^t chi_v(s) e^{-iws} ds as an (n_t, n_w) matrix."""
    sp, sm, w0 = kernels.effective_roots(gamma, eta)
    t = t[:, None]
    g_p = t * _e1((sp - 1j * omega) * t)
    g_m = t * _e1((sm - 1j * omega) * t)
    return (g_p - g_m) / w0


def _chi_v_dot_window(t: np.ndarray, omega: np.ndarray, gamma: float,
                      eta: float) -> np.ndarray:
    """A(t, w) = int_0^t chi_v_dot(t-u) e^{-iwu} du as an (n_t, n_w) matrix."""
    sp, sm, w0 = kernels.effective_roots(gamma, eta)
    tc = t[:, None]
    phase = np.exp(-1j * omega * tc)
    a_p = sp * tc * _e1((sp + 1j * omega) * tc)
    a_m = sm * tc * _e1((sm + 1j * omega) * tc)
    return phase * (a_p - a_m) / w0


PHI_V_QUAD = SpectralQuadrature(omega_max=3000.0, n=60001, rtol=1e-3)


def phi_v_cov(z: float, y: float, bath: BathParams, potential_eta: float,
              quad: SpectralQuadrature = PHI_V_QUAD) -> float:
    """Velocity-noise covariance <phi_v(z) phi_v(y)>, symmetric in (z, y).

    Evaluated spectrally, (1/pi) int_0^W S(w) Re[A(z,w) conj(A(y,w))] dw,
    with the O(1/W) window-edge tail removed by Richardson extrapolation in
    1/W (the chi_v_dot window has a unit edge, so the integrand decays only
    like S(w)/w^2).
    """
    if z < 0 or y < 0:
        raise ValueError("phi_v_cov needs z, y >= 0")
    if z == 0 or y == 0:
        return 0.0
    w = np.linspace(0.0, quad.omega_max, quad.n)
    s_w = kernels.noise_psd(w, bath.gamma, bath.temp, bath.nu)
    az = _chi_v_dot_window(np.array([z]), w, bath.gamma, potential_eta)[0]
    ay = _chi_v_dot_window(np.array([y]), w, bath.gamma, potential_eta)[0]
    f = s_w * np.real(az * np.conj(ay)) / np.pi
    wt = trapezoid_weights(quad.n, quad.d_omega)
    total = float(np.sum(wt * f))
    k_half = (quad.n - 1) // 2
    wt_rng = trapezoid_weights(k_half + 1, quad.d_omega)
    total_halfrange = float(np.sum(wt_rng * f[: k_half + 1]))
    value = 2.0 * total - total_halfrange  # cancel the c/W tail
    if quad.check:
        half_n = (quad.n - 1) // 2 + 1
        wt_res = trapezoid_weights(half_n, 2 * quad.d_omega)
        total_halfres = float(np.sum(wt_res * f[::2]))
        est = max(0.5 * abs(value - total), abs(total - total_halfres))
        if est > quad.rtol * max(1.0, abs(value)):
            raise QuadratureError(
                "noise-covariance quadrature did not converge "
                f"(estimate {est:.3e}); for quantum nu the integrand is "
                "UV-log-sensitive: widen omega_max or adopt an explicit "
                "cutoff with check=False",
                est,
            )
    return value


def _preparation_cross_term(grid: TimeGrid, bath: BathParams, eta: float,
                            tail_tol: float) -> np.ndarray:
    """2 int_0^t chi_q(y) <phi_v(y) q0> dy with the Matsubara sum folded
    through chi_v_dot analytically per term."""
    t = grid.times
    sp, sm, w0 = kernels.effective_roots(bath.gamma, eta)
    nun, cn = kernels.xi_q0_weights(bath.gamma, bath.temp, bath.nu, eta,
                                    t_min=grid.dt, tol=tail_tol)
    p = np.zeros(grid.n)
    e_p = np.exp(sp * t)[:, None]
    e_m = np.exp(sm * t)[:, None]
    tc = t[:, None]
    for start in range(0, nun.size, 512):
        nus = nun[start:start + 512][None, :]
        cs = cn[start:start + 512][None, :]
        # (e^{sy} - e^{-nu y})/(nu + s) = e^{sy} y E1m((nu+s) y), stable when
        # a Matsubara frequency sits near a decay rate
        g_p = e_p * tc * _e1m((nus + sp) * tc)
        g_m = e_m * tc * _e1m((nus + sm) * tc)
        e_n = (sp * g_p - sm * g_m) / w0
        p += np.real(np.sum(cs * e_n, axis=1))
    # <phi_v(y) q0> = -sum_n c_n E_n(y); E_n(0) = 0 exactly
    integrand = -2.0 * kernels.chi_q(t, bath.gamma, eta) * p
    return cumtrapz(integrand, grid.dt)


def variance(grid: TimeGrid, bath: BathParams, potential: PotentialParams,
             quad: SpectralQuadrature = SpectralQuadrature(),
             include_preparation: bool = True) -> SampledSignal:
    """Conditional variance sigma^2(t) on the grid.

    sigma^2 = T chi_v^2 + <phi_q^2> + preparation cross term; it depends on
    (gamma, T, nu, eta) only. include_preparation=False drops the
    noise/initial-position cross term, matching ensembles whose noise is
    sampled independently of q0.
    """
    t = grid.times
    gamma, temp, eta = bath.gamma, bath.temp, potential.eta
    if 2.0 * np.pi / quad.d_omega < 2.0 * grid.t_max:
        raise ValueError(
            "frequency spacing too coarse for this horizon: need "
            "2*pi/d_omega >= 2*t_max; increase quad.n"
        )
    base = temp * kernels.chi_v(t, gamma, eta) ** 2

    w = np.linspace(0.0, quad.omega_max, quad.n)
    s_w = kernels.noise_psd(w, gamma, temp, bath.nu)
    wt = trapezoid_weights(quad.n, quad.d_omega)
    k_half = (quad.n - 1) // 2
    noise = np.zeros(grid.n)
    noise_halfrange = np.zeros(grid.n)
    chunk = max(1, int(4e6 // max(grid.n, 1)))
    for start in range(0, quad.n, chunk):
        sl = slice(start, min(start + chunk, quad.n))
        lam = _chi_v_window(t, w[sl], gamma, eta)
        f = (np.abs(lam) ** 2) * (s_w[sl] * wt[sl]) / np.pi
        noise += f.sum(axis=1)
        if start <= k_half:
            stop = min(sl.stop, k_half + 1)
            noise_halfrange += f[:, : stop - start].sum(axis=1)
    if quad.check:
        # correct the half-range end weight and compare against the full range
        lam_end = _chi_v_window(t, w[k_half:k_half + 1], gamma, eta)[:, 0]
        noise_halfrange -= (np.abs(lam_end) ** 2) * s_w[k_half] * (quad.d_omega / 2.0) / np.pi
        scale = max(float(np.max(np.abs(base + noise))), 1e-30)
        est = float(np.max(np.abs(noise - noise_halfrange))) / scale
        if est > quad.rtol:
            raise QuadratureError(
                "variance quadrature is cutoff-sensitive "
                f"(relative estimate {est:.3e}); quantum-nu UV log growth: "
                "widen omega_max or adopt an explicit cutoff with check=False",
                est,
            )
    sig2 = base + noise
    if include_preparation:
        sig2 = sig2 + _preparation_cross_term(grid, bath, eta, tail_tol=1e-12)
    sig2[0] = 0.0
    return SampledSignal(grid, sig2)


def estimate_plateau(signal: SampledSignal, frac: float = 0.1) -> float:
    """Mean of the trailing frac of the signal (late-time plateau estimate)."""
    k = max(2, int(round(frac * signal.grid.n)))
    return float(np.mean(signal.values[-k:]))


@dataclass(frozen=True)
class MomentSet:
    """Mean G, variance sigma^2 and the late-time equilibrium variance."""

    mean: SampledSignal
    variance: SampledSignal
    equilibrium_variance: float

    def __post_init__(self):
        v = self.variance.values
        if v[0] != 0.0:
            raise ValueError("variance must vanish at t = 0")
        if np.min(v) < -1e-10:
            raise ValueError("variance must be non-negative (beyond quadrature noise)")


def variance_spectrum(sigma2: SampledSignal, grid: FreqGrid,
                      plateau_tol: float = 1e-4) -> Spectrum:
    """Split sigma^2 into plateau + transient and transform.

    Returns the Fourier transform of the evenly-extended transient as the
    regular part plus a Dirac component (0, 2*pi*sigma2_eq). Requires the
    signal to have reached its plateau.
    """
    vals = sigma2.values
    t = sigma2.grid.times
    n = sigma2.grid.n
    sig_eq = estimate_plateau(sigma2)
    i90 = int(round(0.9 * (n - 1)))
    drift = abs(vals[-1] - vals[i90])
    scale = max(abs(sig_eq), float(np.max(np.abs(vals))), 1e-12)
    if drift > plateau_tol * scale:
        raise PlateauError(
            f"no plateau: |sigma2(t_max) - sigma2(0.9 t_max)| = {drift:.3e} "
            "exceeds tolerance; increase t_max"
        )
    transient = vals - sig_eq
    wt = trapezoid_weights(n, sigma2.grid.dt)
    # even extension: FT = 2 * int_0^tmax transient(t) cos(w t) dt
    half = np.unique(np.abs(grid.omegas))
    acc = phase_stepped_sum(transient * wt, 0.0, sigma2.grid.dt, half, +1)
    reg_half = 2.0 * np.real(acc)
    lookup = dict(zip(half.tolist(), reg_half.tolist()))
    reg = np.array([lookup[abs(om)] for om in grid.omegas], dtype=complex)
    singular = {grid.zero_index: complex(2.0 * np.pi * sig_eq)}
    return Spectrum(grid, reg, singular)


def mean_trajectory(q0: float, v0: float, potential: PotentialParams,
                    bath: BathParams, grid: TimeGrid,
                    sigma2: Optional[SampledSignal] = None,
                    tol: float = 1e-10, k_max: int = 80,
                    quad: SpectralQuadrature = SpectralQuadrature(),
                    ) -> tuple[SampledSignal, DjmSolution]:
    """Self-consistent mean G(t) with Gaussian closure <q^3> = G^3 + 3 G sigma^2.

    G = chi_q q0 + chi_v v0 - int_0^t [eps chi_v(y) + alpha chi_v(t-y) H(y)] dy
    solved by the Banach recursion on its Volterra form. Raises
    ConvergenceError when the recursion does not reach tol.
    """
    t = grid.times
    gamma, eta = bath.gamma, potential.eta
    cv = kernels.chi_v(t, gamma, eta)
    f = kernels.chi_q(t, gamma, eta) * q0 + cv * v0
    if potential.epsilon != 0.0:
        f = f - potential.epsilon * cumtrapz(cv, grid.dt)

    if potential.alpha == 0.0:
        sol = DjmSolution(terms=[f], partial_sum=f,
                          term_norms=[float(np.max(np.abs(f)))], converged=True)
        return SampledSignal(grid, f), sol

    if sigma2 is None:
        sigma2 = variance(grid, bath, potential, quad=quad)
    if sigma2.grid != grid:
        raise ValueError("sigma2 grid does not match the requested grid")
    sig = sigma2.values
    alpha = potential.alpha

    def apply_b(g: np.ndarray) -> np.ndarray:
        h = g**3 + 3.0 * g * sig
        return -alpha * volterra_conv(cv, h, grid.dt)

    sol = djm_solve(FunctionalProblem(f, apply_b), tol=tol, k_max=k_max)
    if not sol.converged:
        raise ConvergenceError(
            f"mean-trajectory recursion not converged after {sol.k - 1} "
            f"operator applications (last term norm {sol.term_norms[-1]:.3e})",
            sol.term_norms,
        )
    return SampledSignal(grid, sol.partial_sum), sol
