"""Acceptance gate: every criterion at its stated tolerance.

Each test prints the one-line PASS/FAIL report for its criterion. The
criteria run through qcle.acceptance, the same code path as the CLI
`validate` subcommand.

Criterion 6 is expected to fail: its first clause demands the spectral
density equal 2*gamma*T within 1e-6 relative for |omega| <= 10 at nu = 1e4,
but the density (2 pi gamma T/nu) omega coth(pi omega/nu) deviates by
(pi*omega/nu)^2/3 = 3.29e-6 at omega = 10. No implementation of the adopted
(physically correct) density can satisfy the stated bound; see the README
acceptance-status section. The test asserts the criterion exactly as stated
and is marked as a strict expected failure so the discrepancy stays visible.
"""

import pytest

from qcle.acceptance import CRITERIA

_CACHE: dict = {}


def _run(cid: int):
    res = CRITERIA[cid](_CACHE)
    status = "PASS" if res.passed else "FAIL"
    print(f"[criterion {res.cid}] {status} ({res.elapsed:.1f}s) "
          f"{res.description}: {res.detail}")
    return res


def test_criterion_1_ho_susceptibility_identity():
    res = _run(1)
    assert res.passed, res.detail


def test_criterion_2_ho_response_identity():
    res = _run(2)
    assert res.passed, res.detail


def test_criterion_3_nonlinear_route_equivalence():
    res = _run(3)
    assert res.passed, res.detail


def test_criterion_4_ode_residuals():
    res = _run(4)
    assert res.passed, res.detail


def test_criterion_5_recursion_benchmark():
    res = _run(5)
    assert res.passed, res.detail


@pytest.mark.xfail(strict=True,
                   reason="stated tolerance unattainable: (pi*10/1e4)^2/3 "
                          "= 3.29e-6 > 1e-6; see README")
def test_criterion_6_classical_limit_bath():
    res = _run(6)
    assert res.passed, res.detail


def test_criterion_7_monte_carlo_oracle():
    res = _run(7)
    assert res.passed, res.detail


def test_criterion_8_nonlinear_mc_cross_check():
    res = _run(8)
    assert res.passed, res.detail


def test_criterion_9_symmetry_causality():
    res = _run(9)
    assert res.passed, res.detail
