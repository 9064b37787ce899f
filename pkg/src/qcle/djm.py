"""Banach-operator recursion for functional equations u = f + B(u).

The recursion u0 = f, u1 = B(u0), u_{m+1} = B(u0+...+u_m) - B(u0+...+u_{m-1})
telescopes so that the partial sums satisfy S_{m+1} = f + B(S_m) exactly;
the solver iterates in that form and records the increments as terms.
Elements only need +, - and a norm: plain scalars, numpy arrays and Spectrum
objects all work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np


class NonFiniteTermError(RuntimeError):
    """The operator produced non-finite values; carries the term index."""

    def __init__(self, term_index: int):
        super().__init__(f"non-finite values in recursion term {term_index}")
        self.term_index = term_index


class ConvergenceError(RuntimeError):
    """Raised by callers that require convergence; carries the term-norm history."""

    def __init__(self, message: str, term_norms: list[float]):
        super().__init__(message)
        self.term_norms = term_norms


def default_norm(x) -> float:
    """Sup norm over grid nodes (complex modulus), also valid for scalars."""
    if hasattr(x, "sup_norm"):
        return float(x.sup_norm())
    return float(np.max(np.abs(np.asarray(x))))


@dataclass(frozen=True)
class FunctionalProblem:
    """Fixed-point problem u = f + B(u) over a normed vector space."""

    f: Any
    apply_b: Callable[[Any], Any]
    norm: Optional[Callable[[Any], float]] = None


@dataclass
class DjmSolution:
    """Recursion terms, their norms, the accumulated solution and diagnostics."""

    terms: list = field(default_factory=list)
    partial_sum: Any = None
    term_norms: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def k(self) -> int:
        """Number of terms computed (including u0)."""
        return len(self.terms)


def djm_solve(problem: FunctionalProblem, tol: float, k_max: int = 25) -> DjmSolution:
    """Run the recursion until norm(last term) < tol or k_max operator
    applications; k_max exhaustion is reported via converged=False, not an
    exception."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    norm = problem.norm if problem.norm is not None else default_norm

    f = problem.f
    n0 = norm(f)
    if not np.isfinite(n0):
        raise NonFiniteTermError(0)
    sol = DjmSolution(terms=[f], partial_sum=f, term_norms=[n0], converged=False)

    s_prev = f
    for m in range(1, k_max + 1):
        s_next = f + problem.apply_b(s_prev)
        u = s_next - s_prev
        nu_m = norm(u)
        if not np.isfinite(nu_m):
            raise NonFiniteTermError(m)
        sol.terms.append(u)
        sol.term_norms.append(nu_m)
        sol.partial_sum = s_next
        s_prev = s_next
        if nu_m < tol:
            sol.converged = True
            break
    return sol


def max_error_remainder(solution: DjmSolution) -> float:
    """Norm of the last computed recursion term (the stopping diagnostic)."""
    if not solution.term_norms:
        raise ValueError("solution has no terms")
    return solution.term_norms[-1]
