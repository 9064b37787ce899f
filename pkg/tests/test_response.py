"""Time-domain response: Volterra recursion and direct integration."""

import numpy as np
import pytest

from qcle import (BathParams, PotentialParams, ResponseProblem, SampledSignal,
                  StepInstabilityError, TimeGrid, chi_q, chi_v,
                  integrate_duffing, ode_residual, solve_response_djm,
                  variance, volterra_b, volterra_f, zero_sigma2)
from qcle.params import parabolic
from qcle.response import solve_response_windowed

BATH = BathParams(gamma=1.0, temp=1.0, nu=1e4)


def _ho_problem(t_max=10.0, n=2001):
    grid = TimeGrid(t_max, n)
    return ResponseProblem(parabolic(), BATH, zero_sigma2(grid), grid)


def test_volterra_f_cases():
    grid = TimeGrid(4.0, 401)
    f = volterra_f(grid, epsilon=0.0, f0=0.1)
    assert np.array_equal(f.values, grid.times)
    f2 = volterra_f(grid, epsilon=1.0, f0=2.0)
    assert f2.values[0] == 0.0
    idx = 200  # t = 2
    assert grid.times[idx] == pytest.approx(2.0)
    assert f2.values[idx] == pytest.approx(1.0)  # 2 - (1/4)*4
    with pytest.raises(ValueError):
        volterra_f(grid, epsilon=0.0, f0=0.0)


def test_volterra_b_polynomial_case():
    # alpha = 0, R(t) = t: B(R) = -gamma t^2/2 - eta t^3/6
    prob = _ho_problem(n=4001)
    t = prob.grid.times
    out = volterra_b(SampledSignal(prob.grid, t), prob)
    exact = -t**2 / 2.0 - t**3 / 6.0
    assert np.max(np.abs(out.values - exact)) < 2e-5  # trapezoid O(dt^2)
    zero = volterra_b(zero_sigma2(prob.grid), prob)
    assert np.array_equal(zero.values, np.zeros(prob.grid.n))


def test_ho_response_both_routes():
    prob = _ho_problem()
    exact = chi_v(prob.grid.times, 1.0, 1.0)
    r, sol = solve_response_djm(prob, tol=1e-7, k_max=80)
    assert sol.converged
    assert np.max(np.abs(r.values - exact)) < 1e-4
    r_ode = integrate_duffing(prob, dt_sub=1e-3)
    assert np.max(np.abs(r_ode.values - exact)) < 1e-6


def test_fixed_point_identity():
    prob = _ho_problem()
    r, sol = solve_response_djm(prob, tol=1e-9, k_max=80)
    recomposed = volterra_f(prob.grid, 0.0, 0.1).values \
        + volterra_b(r, prob).values
    assert np.max(np.abs(recomposed - r.values)) < 1e-7


def test_tilt_superposition():
    # alpha = 0, eps != 0: R = chi_v - (eps/f0) int_0^t chi_v,
    # with int_0^t chi_v = (1 - chi_q)/eta, so R(inf) = -eps/(f0 eta)
    grid = TimeGrid(10.0, 2001)
    pot = PotentialParams(eta=1.0, alpha=0.0, epsilon=0.05, f0=0.5)
    prob = ResponseProblem(pot, BATH, zero_sigma2(grid), grid)
    r, sol = solve_response_djm(prob, tol=1e-8, k_max=80)
    assert sol.converged
    t = grid.times
    exact = chi_v(t, 1.0, 1.0) - 0.1 * (1.0 - chi_q(t, 1.0, 1.0))
    assert np.max(np.abs(r.values - exact)) < 1e-4
    # plateau: the plain recursion hits the double-precision overshoot wall
    # beyond gamma*t ~ 15, so long horizons use the windowed continuation
    grid2 = TimeGrid(25.0, 2501)
    prob2 = ResponseProblem(pot, BATH, zero_sigma2(grid2), grid2)
    r2, sols = solve_response_windowed(prob2, window=2.5, tol=1e-9, k_max=60)
    assert all(s.converged for s in sols)
    assert r2.values[-1] == pytest.approx(-0.1, abs=1e-4)


@pytest.mark.parametrize("gamma,eta,alpha", [(1.0, 1.0, 0.0), (2.5, 0.8, 0.0),
                                             (1.0, 1.0, 0.3)])
def test_initial_conditions(gamma, eta, alpha):
    grid = TimeGrid(6.0, 6001)
    pot = PotentialParams(eta=eta, alpha=alpha, epsilon=0.0, f0=0.1)
    bath = BathParams(gamma=gamma, temp=1.0, nu=1e4)
    prob = ResponseProblem(pot, bath, zero_sigma2(grid), grid)
    r, sol = solve_response_windowed(prob, window=2.0, tol=1e-9, k_max=70)
    assert all(s.converged for s in sol)
    assert r.values[0] == 0.0
    slope = (r.values[1] - r.values[0]) / grid.dt
    assert abs(slope - 1.0) <= 10.0 * grid.dt


def test_integrate_duffing_order_four():
    grid = TimeGrid(5.0, 501)
    pot = PotentialParams(eta=1.0, alpha=0.3, epsilon=0.0, f0=0.1)
    prob = ResponseProblem(pot, BATH, zero_sigma2(grid), grid)
    coarse = integrate_duffing(prob, dt_sub=2e-3).values
    fine = integrate_duffing(prob, dt_sub=1e-3).values
    finest = integrate_duffing(prob, dt_sub=5e-4).values
    e1 = np.max(np.abs(coarse - finest))
    e2 = np.max(np.abs(fine - finest))
    assert e2 < e1 / 8.0  # halving dt_sub cuts the error ~16x


def test_integrate_duffing_guards():
    prob = _ho_problem(n=101)
    with pytest.raises(ValueError):
        integrate_duffing(prob, dt_sub=1.0)  # dt_sub > grid spacing
    # inverted potential with negligible quartic and a tiny guard blows up
    grid = TimeGrid(30.0, 301)
    pot = PotentialParams(eta=-1.0, alpha=1e-12, epsilon=0.0, f0=0.1)
    prob2 = ResponseProblem(pot, BATH, zero_sigma2(grid), grid)
    with pytest.raises(StepInstabilityError):
        integrate_duffing(prob2, dt_sub=0.1, blowup_guard=100.0)


def test_ode_residual_cases():
    prob = _ho_problem(n=10001)
    exact = SampledSignal(prob.grid, chi_v(prob.grid.times, 1.0, 1.0))
    assert ode_residual(exact, prob) < 1e-4  # discretization error only
    pot = PotentialParams(eta=1.0, alpha=0.0, epsilon=0.3, f0=0.1)
    prob2 = ResponseProblem(pot, BATH, zero_sigma2(prob.grid), prob.grid)
    zero = zero_sigma2(prob.grid)
    assert ode_residual(zero, prob2) == pytest.approx(3.0)  # |eps/f0|


def test_linear_regime_independence():
    # alpha = 0: solution independent of f0 and sigma2
    grid = TimeGrid(8.0, 801)
    base = ResponseProblem(parabolic(f0=0.1), BATH, zero_sigma2(grid), grid)
    r1, _ = solve_response_djm(base, tol=1e-9, k_max=80)
    sig = SampledSignal(grid, np.linspace(0.0, 2.0, grid.n))
    alt = ResponseProblem(parabolic(f0=7.0), BATH, sig, grid)
    r2, _ = solve_response_djm(alt, tol=1e-9, k_max=80)
    assert np.array_equal(r1.values, r2.values)


def test_scaling_law_alpha_f0():
    # with sigma2 = 0 only the product alpha f0^2 enters
    grid = TimeGrid(6.0, 601)
    p1 = PotentialParams(eta=1.0, alpha=0.4, epsilon=0.0, f0=0.1)
    p2 = PotentialParams(eta=1.0, alpha=0.1, epsilon=0.0, f0=0.2)
    r1, _ = solve_response_windowed(
        ResponseProblem(p1, BATH, zero_sigma2(grid), grid), window=2.0,
        tol=1e-10, k_max=60)
    r2, _ = solve_response_windowed(
        ResponseProblem(p2, BATH, zero_sigma2(grid), grid), window=2.0,
        tol=1e-10, k_max=60)
    assert np.max(np.abs(r1.values - r2.values)) < 1e-12


def test_windowed_matches_plain_and_integrator():
    # nonlinear problem with a physical sigma2: the windowed recursion agrees
    # with the direct integrator; on a short horizon the plain recursion
    # converges too and matches
    pot = PotentialParams(eta=1.0, alpha=0.3, epsilon=0.0, f0=0.1)
    bath = BathParams(gamma=1.0, temp=0.5, nu=1e4)
    grid = TimeGrid(12.0, 1201)
    sig2 = variance(grid, bath, pot)
    prob = ResponseProblem(pot, bath, sig2, grid)
    r_win, sols = solve_response_windowed(prob, window=2.5, tol=1e-9, k_max=60)
    assert all(s.converged for s in sols)
    r_ode = integrate_duffing(prob, dt_sub=2e-3)
    assert np.max(np.abs(r_win.values - r_ode.values)) < 1e-4

    short = TimeGrid(3.0, 301)
    sig_s = SampledSignal(short, sig2.values[:301])
    prob_s = ResponseProblem(pot, bath, sig_s, short)
    r_plain, sol = solve_response_djm(prob_s, tol=1e-10, k_max=60)
    assert sol.converged
    r_win_s, _ = solve_response_windowed(prob_s, window=1.0, tol=1e-10, k_max=60)
    assert np.max(np.abs(r_plain.values - r_win_s.values)) < 1e-9


def test_problem_grid_validation():
    grid = TimeGrid(5.0, 101)
    other = TimeGrid(5.0, 201)
    with pytest.raises(ValueError):
        ResponseProblem(parabolic(), BATH, zero_sigma2(other), grid)
