"""Configuration-driven command line front end.

    qcle <subcommand> --config <path> [--out <dir>] [--seed <u64>]

Subcommands: kernels, moments, response, susceptibility, mc, validate.
Exit codes: 0 ok, 1 acceptance failure (validate), 2 config error,
3 numerical non-convergence. Outputs are CSV with 17 significant digits
plus a JSON manifest echoing the configuration, tolerances, seeds and
solver diagnostics; reruns of the same config are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, kernels
from .acceptance import KNOWN_UNATTAINABLE, run_acceptance
from .djm import ConvergenceError, NonFiniteTermError
from .grids import FreqGrid, TimeGrid
from .mc import estimate_moments, estimate_response, integrate_qcle, sample_noise
from .moments import (PlateauError, QuadratureError, SpectralQuadrature,
                      mean_trajectory, variance, variance_spectrum)
from .params import BathParams, PotentialParams
from .response import ResponseProblem, StepInstabilityError, integrate_duffing, \
    ode_residual, solve_response_windowed
from .susceptibility import (EdgeToleranceError, SusceptibilityProblem,
                             response_from_susceptibility, solve_susceptibility)


class ConfigError(Exception):
    def __init__(self, messages: list[str]):
        super().__init__("\n".join(messages))
        self.messages = messages


@dataclass
class RunConfig:
    potential: PotentialParams
    bath: BathParams
    time_grid: TimeGrid
    freq_grid: Optional[FreqGrid]
    q0: float
    v0: float
    djm_tol: float
    djm_k_max: int
    response_window: float
    quad: SpectralQuadrature
    edge_tol: float
    plateau_tol: float
    dt_sub: float
    n_paths: int
    seed: int
    f0_kick: float
    thermal_v0: bool
    raw: dict = field(default_factory=dict)


def _get(section: dict, path: str, key: str, typ, errors: list[str],
         default=None, required: bool = False):
    if key not in section:
        if required:
            errors.append(f"{path}.{key}: missing required field")
        return default
    val = section[key]
    try:
        if typ is int:
            if isinstance(val, float) and not val.is_integer():
                raise ValueError
            return int(val)
        if typ is bool:
            if not isinstance(val, bool):
                raise ValueError
            return val
        return typ(val)
    except (TypeError, ValueError):
        errors.append(f"{path}.{key}: expected {typ.__name__}, got {val!r}")
        return default


def parse_config(path: Path, seed_override: Optional[int] = None) -> RunConfig:
    errors: list[str] = []
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(["no such file"])
    except json.JSONDecodeError as e:
        raise ConfigError([f"invalid JSON: {e}"])
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be an object"])

    def section(name: str, required: bool = True) -> dict:
        sec = raw.get(name)
        if sec is None:
            if required:
                errors.append(f"{name}: missing required section")
            return {}
        if not isinstance(sec, dict):
            errors.append(f"{name}: must be an object")
            return {}
        return sec

    pot_s = section("potential")
    bath_s = section("bath")
    tg_s = section("time_grid")
    fg_s = section("freq_grid", required=False)
    init_s = section("initial", required=False)
    tol_s = section("tolerances", required=False)
    mc_s = section("mc", required=False)
    integ_s = section("integrator", required=False)

    eta = _get(pot_s, "potential", "eta", float, errors, required=True)
    alpha = _get(pot_s, "potential", "alpha", float, errors, 0.0)
    epsilon = _get(pot_s, "potential", "epsilon", float, errors, 0.0)
    f0 = _get(pot_s, "potential", "f0", float, errors, 0.1)
    gamma = _get(bath_s, "bath", "gamma", float, errors, required=True)
    temp = _get(bath_s, "bath", "temp", float, errors, required=True)
    nu = _get(bath_s, "bath", "nu", float, errors, required=True)
    t_max = _get(tg_s, "time_grid", "t_max", float, errors, required=True)
    t_n = _get(tg_s, "time_grid", "n", int, errors, required=True)
    if errors:
        raise ConfigError(errors)

    potential = bath = time_grid = freq_grid = None
    try:
        potential = PotentialParams(eta=eta, alpha=alpha, epsilon=epsilon, f0=f0)
    except ValueError as e:
        errors.append(f"potential: {e}")
    try:
        bath = BathParams(gamma=gamma, temp=temp, nu=nu)
    except ValueError as e:
        errors.append(f"bath: {e}")
    try:
        time_grid = TimeGrid(t_max=t_max, n=t_n)
    except ValueError as e:
        errors.append(f"time_grid: {e}")
    if fg_s:
        om = _get(fg_s, "freq_grid", "omega_max", float, errors, required=True)
        fn = _get(fg_s, "freq_grid", "n", int, errors, required=True)
        if not errors:
            try:
                freq_grid = FreqGrid(omega_max=om, n=fn)
            except ValueError as e:
                errors.append(f"freq_grid: {e}")

    quad_kwargs = {}
    for name in ("omega_max", "n", "rtol"):
        val = _get(tol_s, "tolerances", f"quad_{name}",
                   int if name == "n" else float, errors)
        if val is not None:
            quad_kwargs[name] = val
    djm_tol = _get(tol_s, "tolerances", "djm_tol", float, errors, 1e-9)
    djm_k_max = _get(tol_s, "tolerances", "djm_k_max", int, errors, 60)
    window = _get(tol_s, "tolerances", "response_window", float, errors, 2.5)
    edge_tol = _get(tol_s, "tolerances", "edge_tol", float, errors, 1e-3)
    plateau_tol = _get(tol_s, "tolerances", "plateau_tol", float, errors, 1e-4)
    dt_sub = _get(integ_s, "integrator", "dt_sub", float, errors, 1e-3)
    n_paths = _get(mc_s, "mc", "n_paths", int, errors, 2000)
    seed = _get(mc_s, "mc", "seed", int, errors, 12345)
    f0_kick = _get(mc_s, "mc", "f0_kick", float, errors, 0.1)
    thermal_v0 = _get(mc_s, "mc", "thermal_v0", bool, errors, False)
    q0 = _get(init_s, "initial", "q0", float, errors, 0.0)
    v0 = _get(init_s, "initial", "v0", float, errors, 0.0)
    for name, val in (("djm_tol", djm_tol), ("edge_tol", edge_tol),
                      ("plateau_tol", plateau_tol), ("dt_sub", dt_sub)):
        if val is not None and not val > 0:
            errors.append(f"tolerances.{name}: must be positive")
    if errors:
        raise ConfigError(errors)
    try:
        quad = SpectralQuadrature(**quad_kwargs)
    except ValueError as e:
        raise ConfigError([f"tolerances.quad: {e}"])
    if seed_override is not None:
        seed = seed_override
    return RunConfig(potential, bath, time_grid, freq_grid, q0, v0, djm_tol,
                     djm_k_max, window, quad, edge_tol, plateau_tol, dt_sub,
                     n_paths, seed, f0_kick, thermal_v0, raw)


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([v if isinstance(v, str) else _fmt(float(v)) for v in row])


def write_manifest(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _base_manifest(cfg: RunConfig, subcommand: str) -> dict:
    return {
        "subcommand": subcommand,
        "config": cfg.raw,
        "versions": {
            "qcle": __version__,
            "numpy": np.__version__,
            "python": ".".join(map(str, sys.version_info[:3])),
        },
        "effective": {
            "seed": cfg.seed,
            "djm_tol": cfg.djm_tol,
            "djm_k_max": cfg.djm_k_max,
            "response_window": cfg.response_window,
            "quad_omega_max": cfg.quad.omega_max,
            "quad_n": cfg.quad.n,
            "quad_rtol": cfg.quad.rtol,
            "edge_tol": cfg.edge_tol,
            "plateau_tol": cfg.plateau_tol,
            "dt_sub": cfg.dt_sub,
            "n_paths": cfg.n_paths,
            "f0_kick": cfg.f0_kick,
            "thermal_v0": cfg.thermal_v0,
        },
        "diagnostics": {},
    }


def _need_freq_grid(cfg: RunConfig, sub: str) -> FreqGrid:
    if cfg.freq_grid is None:
        raise ConfigError([f"freq_grid: section required by `{sub}`"])
    return cfg.freq_grid


def cmd_kernels(cfg: RunConfig, out: Path) -> int:
    t = cfg.time_grid.times
    g, e = cfg.bath.gamma, cfg.potential.eta
    write_csv(out / "kernels_time.csv",
              ["t", "chi_q", "chi_v", "chi_v_dot"],
              [t, kernels.chi_q(t, g, e), kernels.chi_v(t, g, e),
               kernels.chi_v_dot(t, g, e)])
    fg = _need_freq_grid(cfg, "kernels")
    om = fg.omegas
    chit = kernels.chi_tilde(om, g, e)
    write_csv(out / "kernels_freq.csv",
              ["omega", "chi_tilde_re", "chi_tilde_im", "noise_psd"],
              [om, chit.real, chit.imag,
               kernels.noise_psd(om, g, cfg.bath.temp, cfg.bath.nu)])
    m = _base_manifest(cfg, "kernels")
    m["diagnostics"]["omega0"] = repr(kernels.omega0(g, e))
    write_manifest(out / "manifest.json", m)
    return 0


def cmd_moments(cfg: RunConfig, out: Path) -> int:
    m = _base_manifest(cfg, "moments")
    sig2 = variance(cfg.time_grid, cfg.bath, cfg.potential, quad=cfg.quad)
    try:
        mean, sol = mean_trajectory(cfg.q0, cfg.v0, cfg.potential, cfg.bath,
                                    cfg.time_grid, sigma2=sig2,
                                    tol=cfg.djm_tol, k_max=cfg.djm_k_max)
    except ConvergenceError as e:
        m["diagnostics"]["mean_term_norms"] = e.term_norms
        m["diagnostics"]["error"] = str(e)
        write_manifest(out / "manifest.json", m)
        return 3
    write_csv(out / "moments.csv", ["t", "mean", "variance"],
              [cfg.time_grid.times, mean.values, sig2.values])
    m["diagnostics"].update({
        "mean_term_norms": sol.term_norms,
        "mean_converged": sol.converged,
    })
    fg = _need_freq_grid(cfg, "moments")
    try:
        spec = variance_spectrum(sig2, fg, plateau_tol=cfg.plateau_tol)
    except PlateauError as e:
        m["diagnostics"]["error"] = str(e)
        write_manifest(out / "manifest.json", m)
        return 3
    write_csv(out / "variance_spectrum.csv", ["omega", "re", "im"],
              [fg.omegas, spec.values.real, spec.values.imag])
    m["diagnostics"]["sigma2_singular"] = [
        [loc, w.real, w.imag] for loc, w in spec.singular_components()]
    write_manifest(out / "manifest.json", m)
    return 0


def cmd_response(cfg: RunConfig, out: Path) -> int:
    m = _base_manifest(cfg, "response")
    sig2 = variance(cfg.time_grid, cfg.bath, cfg.potential, quad=cfg.quad)
    prob = ResponseProblem(cfg.potential, cfg.bath, sig2, cfg.time_grid)
    r_djm, sols = solve_response_windowed(prob, window=cfg.response_window,
                                          tol=cfg.djm_tol, k_max=cfg.djm_k_max)
    m["diagnostics"]["window_term_norms"] = [s.term_norms for s in sols]
    m["diagnostics"]["windows_converged"] = [s.converged for s in sols]
    if not all(s.converged for s in sols):
        m["diagnostics"]["error"] = "response recursion did not converge"
        write_manifest(out / "manifest.json", m)
        return 3
    r_ode = integrate_duffing(prob, dt_sub=cfg.dt_sub)
    write_csv(out / "response.csv", ["t", "r_recursion", "r_integrator"],
              [cfg.time_grid.times, r_djm.values, r_ode.values])
    m["diagnostics"].update({
        "ode_residual_recursion": ode_residual(r_djm, prob),
        "ode_residual_integrator": ode_residual(r_ode, prob),
        "route_disagreement": float(np.max(np.abs(r_djm.values - r_ode.values))),
    })
    write_manifest(out / "manifest.json", m)
    return 0


def cmd_susceptibility(cfg: RunConfig, out: Path) -> int:
    m = _base_manifest(cfg, "susceptibility")
    fg = _need_freq_grid(cfg, "susceptibility")
    sig2 = variance(cfg.time_grid, cfg.bath, cfg.potential, quad=cfg.quad)
    try:
        spec2 = variance_spectrum(sig2, fg, plateau_tol=cfg.plateau_tol)
    except PlateauError as e:
        m["diagnostics"]["error"] = str(e)
        write_manifest(out / "manifest.json", m)
        return 3
    prob = SusceptibilityProblem(cfg.potential, cfg.bath, spec2, fg)
    chi, sol = solve_susceptibility(prob, tol=cfg.djm_tol, k_max=cfg.djm_k_max)
    m["diagnostics"]["term_norms"] = sol.term_norms
    m["diagnostics"]["converged"] = sol.converged
    if not sol.converged:
        m["diagnostics"]["error"] = "susceptibility recursion did not converge"
        write_manifest(out / "manifest.json", m)
        return 3
    write_csv(out / "susceptibility.csv", ["omega", "re", "im"],
              [fg.omegas, chi.values.real, chi.values.imag])
    rec, imag_resid = response_from_susceptibility(chi, cfg.time_grid,
                                                   edge_tol=cfg.edge_tol)
    write_csv(out / "response_reconstructed.csv", ["t", "r"],
              [cfg.time_grid.times, rec.values])
    m["diagnostics"].update({
        "imag_residual": imag_resid,
        "chi_singular": [[loc, w.real, w.imag]
                         for loc, w in chi.singular_components()],
    })
    write_manifest(out / "manifest.json", m)
    return 0


def cmd_mc(cfg: RunConfig, out: Path) -> int:
    m = _base_manifest(cfg, "mc")
    noise = sample_noise(cfg.time_grid, cfg.bath, cfg.n_paths, cfg.seed)
    ens = integrate_qcle(noise, cfg.potential, q0=cfg.q0, v0=cfg.v0)
    est = estimate_moments(ens)
    write_csv(out / "mc_moments.csv",
              ["t", "mean", "stderr_mean", "variance", "stderr_variance"],
              [cfg.time_grid.times, est.mean.values, est.stderr_mean.values,
               est.variance.values, est.stderr_variance.values])
    r_hat, r_se = estimate_response(cfg.potential, cfg.bath, cfg.time_grid,
                                    f0_kick=cfg.f0_kick, n_paths=cfg.n_paths,
                                    seed=cfg.seed, thermal_v0=cfg.thermal_v0)
    write_csv(out / "mc_response.csv", ["t", "r_hat", "stderr"],
              [cfg.time_grid.times, r_hat.values, r_se.values])
    m["diagnostics"]["n_excluded"] = ens.n_excluded
    write_manifest(out / "manifest.json", m)
    return 0


def cmd_validate(cfg: Optional[RunConfig], out: Path,
                 criteria: Optional[list[int]]) -> int:
    results = run_acceptance(criteria)
    # no timings in the report so reruns stay byte-identical
    write_csv(out / "acceptance_report.csv",
              ["criterion", "passed", "description", "detail"],
              [[str(r.cid) for r in results],
               ["1" if r.passed else "0" for r in results],
               [r.description for r in results],
               [r.detail for r in results]])
    payload = {
        "subcommand": "validate",
        "config": cfg.raw if cfg else None,
        "versions": {"qcle": __version__, "numpy": np.__version__,
                     "python": ".".join(map(str, sys.version_info[:3]))},
        "results": [{"criterion": r.cid, "passed": r.passed,
                     "known_unattainable": r.cid in KNOWN_UNATTAINABLE,
                     "description": r.description, "detail": r.detail}
                    for r in results],
    }
    write_manifest(out / "manifest.json", payload)
    return 0 if all(r.passed for r in results) else 1


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcle",
        description="Quasiclassical Brownian motion: moments, response and "
                    "susceptibility in nonlinear harmonic potentials.")
    parser.add_argument("subcommand",
                        choices=["kernels", "moments", "response",
                                 "susceptibility", "mc", "validate"])
    parser.add_argument("--config", type=Path,
                        help="JSON run configuration (optional for validate)")
    parser.add_argument("--out", type=Path, default=Path("qcle-out"),
                        help="output directory (default: ./qcle-out)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the MC seed from the config")
    parser.add_argument("--criteria", type=str, default=None,
                        help="validate only: comma-separated criterion ids")
    args = parser.parse_args(argv)

    cfg = None
    if args.config is not None:
        try:
            cfg = parse_config(args.config, seed_override=args.seed)
        except ConfigError as e:
            for msg in e.messages:
                print(f"config error: {args.config}: {msg}", file=sys.stderr)
            return 2
    elif args.subcommand != "validate":
        print("config error: --config is required", file=sys.stderr)
        return 2

    criteria = None
    if args.criteria:
        try:
            criteria = [int(x) for x in args.criteria.split(",") if x.strip()]
        except ValueError:
            print(f"config error: bad --criteria {args.criteria!r}", file=sys.stderr)
            return 2

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.subcommand == "kernels":
            return cmd_kernels(cfg, out)
        if args.subcommand == "moments":
            return cmd_moments(cfg, out)
        if args.subcommand == "response":
            return cmd_response(cfg, out)
        if args.subcommand == "susceptibility":
            return cmd_susceptibility(cfg, out)
        if args.subcommand == "mc":
            return cmd_mc(cfg, out)
        return cmd_validate(cfg, out, criteria)
    except ConfigError as e:
        for msg in e.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    except (ConvergenceError, NonFiniteTermError, QuadratureError,
            PlateauError, EdgeToleranceError, StepInstabilityError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
