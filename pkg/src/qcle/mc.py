"""Monte Carlo oracle: colored-noise sampling and pathwise integration.

The noise is synthesized in the frequency domain (independent complex
Gaussian amplitudes with variance proportional to the spectral density,
Hermitian-symmetrized), giving a stationary band-limited real process whose
lag covariance matches the closed form away from coincidence. Paths are
propagated with an exponential (variation-of-constants) Heun step: the
linear (gamma, eta) flow is exact, nonlinearity and noise enter through a
trapezoidal force rule. The noise/initial-position preparation correlation
is NOT imposed: sampling it would require a joint law for (noise, q0) that
is not available, so only preparation-insensitive quantities are validated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .grids import SampledSignal, TimeGrid
from .params import BathParams, PotentialParams


@dataclass(frozen=True)
class NoiseEnsemble:
    """Stationary noise paths on a time grid, tagged with their bath."""

    grid: TimeGrid
    bath: BathParams
    values: np.ndarray  # (n_paths, n)
    seed: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2 or vals.shape[1] != self.grid.n:
            raise ValueError("noise array must be (n_paths, grid.n)")

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Ensemble:
    """Integrated position paths; excluded marks paths that blew up."""

    grid: TimeGrid
    trajectories: np.ndarray  # (n_paths, n)
    seed: int
    excluded: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        traj = np.asarray(self.trajectories, dtype=float)
        object.__setattr__(self, "trajectories", traj)
        if traj.ndim != 2 or traj.shape[1] != self.grid.n:
            raise ValueError("trajectories must be (n_paths, grid.n)")
        exc = self.excluded
        exc = np.zeros(traj.shape[0], dtype=bool) if exc is None else np.asarray(exc, bool)
        object.__setattr__(self, "excluded", exc)

    @property
    def n_paths(self) -> int:
        return self.trajectories.shape[0]

    @property
    def n_excluded(self) -> int:
        return int(np.sum(self.excluded))


@dataclass(frozen=True)
class MomentEstimate:
    mean: SampledSignal
    variance: SampledSignal
    stderr_mean: SampledSignal
    stderr_variance: SampledSignal


def zero_noise(grid: TimeGrid, bath: BathParams, n_paths: int) -> NoiseEnsemble:
    """Deterministic zero-noise ensemble (T -> 0 oracle runs)."""
    return NoiseEnsemble(grid, bath, np.zeros((n_paths, grid.n)), seed=0)


def _synthesis_length(grid: TimeGrid, nu: float) -> int:
    # pad so the periodic wrap-around of the covariance (decay rate nu) is
    # negligible at every in-grid lag
    pad = int(np.ceil(14.0 / (nu * grid.dt)))
    n_min = grid.n + pad
    nfft = 8
    while nfft < n_min:
        nfft *= 2
    return nfft


def sample_noise(grid: TimeGrid, bath: BathParams, n_paths: int,
                 seed: int) -> NoiseEnsemble:
    """Sample stationary Gaussian noise with PSD noise_psd on the grid.

    Per-path generator streams are derived from (seed, path index) so the
    result is bit-identical regardless of how paths are chunked or
    parallelized.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    nfft = _synthesis_length(grid, bath.nu)
    wk = 2.0 * np.pi * np.fft.fftfreq(nfft, d=grid.dt)
    amp = np.sqrt(kernels.noise_psd(wk, bath.gamma, bath.temp, bath.nu)
                  / (nfft * grid.dt))
    half = nfft // 2
    streams = np.random.SeedSequence(seed).spawn(n_paths)
    out = np.empty((n_paths, grid.n))
    c = np.zeros(nfft, dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for p, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        xr = rng.standard_normal(half + 1)
        xi = rng.standard_normal(half + 1)
        c[0] = amp[0] * xr[0]
        c[half] = amp[half] * xr[half]
        c[1:half] = amp[1:half] * (xr[1:half] + 1j * xi[1:half]) * inv_sqrt2
        c[half + 1:] = np.conj(c[1:half][::-1])
        out[p] = np.fft.fft(c).real[:grid.n]
    return NoiseEnsemble(grid, bath, out, seed)


def _propagator_constants(gamma: float, eta: float, h: float):
    """Exact one-step linear propagator and trapezoidal force weights.

    The homogeneous step is (q, v) -> (pqq q + pqv v, pvq q + pvv v); a force
    sampled as F_j, F_{j+1} enters as a*F_j + b*F_{j+1} through the exact
    variation-of-constants integrals of chi_v and chi_v_dot.
    """
    sp, sm, w0 = kernels.effective_roots(gamma, eta)

    def e1(s):  # int_0^h e^{su} du
        x = s * h
        if abs(x) < 1e-6:
            return h * (1.0 + x / 2.0 + x * x / 6.0)
        return (np.exp(x) - 1.0) / s

    def q1(s):  # int_0^h u e^{su} du
        x = s * h
        if abs(x) < 1e-4:
            return h * h * (0.5 + x / 3.0 + x * x / 8.0 + x**3 / 30.0)
        return (np.exp(x) * (x - 1.0) + 1.0) / (s * s)

    pqq = float(kernels.chi_q(h, gamma, eta))
    pqv = float(kernels.chi_v(h, gamma, eta))
    pvv = float(kernels.chi_v_dot(h, gamma, eta))
    pvq = -eta * pqv  # chi_q_dot = -eta chi_v
    j0 = complex((e1(sp) - e1(sm)) / w0).real
    j1 = complex((q1(sp) - q1(sm)) / w0).real
    a_q = j1 / h
    b_q = j0 - j1 / h
    a_v = pqv - j0 / h
    b_v = j0 / h
    return pqq, pqv, pvq, pvv, a_q, b_q, a_v, b_v


def integrate_qcle(noise: NoiseEnsemble, potential: PotentialParams,
                   q0, v0, blowup_guard: float = 1e8) -> Ensemble:
    """Integrate qdd = -gamma qd - eta q - alpha q^3 - eps + xi(t) per path.

    q0/v0 may be scalars or per-path arrays. The step is deterministic given
    the sampled noise path; the linear part is propagated exactly, so the
    alpha = 0 dynamics carries no time-discretization bias in the mean.
    Paths whose |q| exceeds blowup_guard are flagged and excluded.
    """
    xi = noise.values
    n_paths, n = xi.shape
    h = noise.grid.dt
    gamma = noise.bath.gamma
    eta, alpha, eps = potential.eta, potential.alpha, potential.epsilon
    pqq, pqv, pvq, pvv, a_q, b_q, a_v, b_v = _propagator_constants(gamma, eta, h)

    q = np.broadcast_to(np.asarray(q0, dtype=float), (n_paths,)).copy()
    v = np.broadcast_to(np.asarray(v0, dtype=float), (n_paths,)).copy()
    alive = np.ones(n_paths, dtype=bool)
    traj = np.empty((n_paths, n))
    traj[:, 0] = q
    ab_q = a_q + b_q
    for j in range(n - 1):
        f_j = -alpha * q**3 - eps + xi[:, j]
        q_pred = pqq * q + pqv * v + ab_q * f_j
        f_n = -alpha * q_pred**3 - eps + xi[:, j + 1]
        q_new = pqq * q + pqv * v + a_q * f_j + b_q * f_n
        v_new = pvq * q + pvv * v + a_v * f_j + b_v * f_n
        bad = ~np.isfinite(q_new) | (np.abs(q_new) > blowup_guard)
        if bad.any():
            alive &= ~bad
            q_new = np.where(alive, q_new, 0.0)
            v_new = np.where(alive, v_new, 0.0)
        q, v = q_new, v_new
        traj[:, j + 1] = q
    return Ensemble(noise.grid, traj, noise.seed, excluded=~alive)


def estimate_moments(ensemble: Ensemble) -> MomentEstimate:
    """Per-node unbiased mean/variance and their standard errors (excluded
    paths are skipped)."""
    traj = ensemble.trajectories[~ensemble.excluded]
    n = traj.shape[0]
    if n < 2:
        raise ValueError("need at least 2 non-excluded paths")
    mean = traj.mean(axis=0)
    centered = traj - mean
    var = np.sum(centered**2, axis=0) / (n - 1)
    stderr_mean = np.sqrt(var / n)
    m4 = np.mean(centered**4, axis=0)
    se_var_sq = (m4 - var**2 * (n - 3) / (n - 1)) / n
    stderr_var = np.sqrt(np.maximum(se_var_sq, 0.0))
    g = ensemble.grid
    return MomentEstimate(SampledSignal(g, mean), SampledSignal(g, var),
                          SampledSignal(g, stderr_mean), SampledSignal(g, stderr_var))


def thermal_velocities(bath: BathParams, n_paths: int, seed: int) -> np.ndarray:
    """Per-path initial velocities ~ N(0, T), drawn from a stream disjoint
    from the noise-path streams of the same seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(2**31,))
    return np.random.default_rng(ss).normal(0.0, np.sqrt(bath.temp), n_paths)


def estimate_response(potential: PotentialParams, bath: BathParams,
                      grid: TimeGrid, f0_kick: float, n_paths: int,
                      seed: int, thermal_v0: bool = False,
                      ) -> tuple[SampledSignal, SampledSignal]:
    """Impulse-response estimate by common-random-number ensembles.

    The impulse f0*delta(t) is realized as a velocity kick v0 -> v0 + f0;
    R_hat(t) = [<q>_kicked - <q>_unkicked]/f0 with both ensembles driven by
    identical noise (same seed). thermal_v0 samples the base velocity from
    N(0, T) per path (shared between the pair), which matches the
    preparation behind the conditional-variance law entering the response
    equation; nonlinear cross-checks need it. Returns (R_hat, stderr) with
    the standard error taken over per-path differences.
    """
    if f0_kick == 0:
        raise ValueError("f0_kick must be nonzero")
    noise = sample_noise(grid, bath, n_paths, seed)
    v0 = thermal_velocities(bath, n_paths, seed) if thermal_v0 else 0.0
    base = integrate_qcle(noise, potential, q0=0.0, v0=v0)
    kicked = integrate_qcle(noise, potential, q0=0.0, v0=v0 + f0_kick)
    ok = ~(base.excluded | kicked.excluded)
    diffs = (kicked.trajectories[ok] - base.trajectories[ok]) / f0_kick
    n = diffs.shape[0]
    if n < 2:
        raise ValueError("need at least 2 non-excluded path pairs")
    mean = diffs.mean(axis=0)
    stderr = diffs.std(axis=0, ddof=1) / np.sqrt(n)
    return SampledSignal(grid, mean), SampledSignal(grid, stderr)
