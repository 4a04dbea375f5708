"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Problems have the form::

    optimize  c @ x
    s.t.      A_eq @ x == b_eq
              A_ub @ x <= b_ub
              x >= 0

Every solve returns the primal point together with the optimal basis and
dual values, so callers can check optimality without trusting the solver.
Infeasible problems raise :class:`InfeasibleError` carrying a Farkas vector
``y`` with ``A^T y <= 0`` and ``b @ y > 0``.

With ``exact=True`` the tableau holds :class:`fractions.Fraction` entries and
all comparisons are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SolverError

PIVOT_TOL = 1e-9
MAX_ITER = 10**6


class InfeasibleError(SolverError):
    def __init__(self, message, farkas_eq=None, farkas_ub=None, trace=None):
        super().__init__(message)
        self.farkas_eq = farkas_eq
        self.farkas_ub = farkas_ub
        self.trace = trace or []


class UnboundedError(SolverError):
    def __init__(self, message, ray=None, trace=None):
        super().__init__(message)
        self.ray = ray
        self.trace = trace or []


class IterationLimitError(SolverError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


@dataclass
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c)
        n = self.c.size
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "equality")
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "inequality")

    @property
    def n_vars(self) -> int:
        return self.c.size


def _rows(A, b, n, what):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A)
    A = A.reshape(-1, n) if A.size else np.zeros((0, n))
    b = np.asarray(b).ravel()
    if A.shape[0] != b.size:
        raise ValueError(f"{what} matrix has {A.shape[0]} rows but rhs has {b.size}")
    return A, b


@dataclass
class LPSolution:
    value: float
    x: np.ndarray
    basis: list[int]
    duals_eq: np.ndarray
    duals_ub: np.ndarray
    iterations: int
    exact: bool = False
    trace: list[tuple] = field(default_factory=list)

    def certificate(self) -> dict:
        return {
            "basis": [int(k) for k in self.basis],
            "duals_eq": [float(v) for v in self.duals_eq],
            "duals_ub": [float(v) for v in self.duals_ub],
        }


def _convert(a, exact):
    if exact:
        conv = np.vectorize(lambda v: Fraction(v) if not isinstance(v, Fraction) else v, otypes=[object])
        return conv(np.asarray(a, dtype=object)) if np.size(a) else np.asarray(a, dtype=object)
    return np.asarray(a, dtype=float)


class _Tableau:
    """Constraint rows ``T[:m]`` plus objective row ``T[m]``; last column is the rhs."""

    def __init__(self, A, b, exact, tol, max_iter):
        m, n = A.shape
        self.m, self.n = m, n
        self.exact = exact
        self.tol = 0 if exact else tol
        self.max_iter = max_iter
        dtype = object if exact else float
        zero = Fraction(0) if exact else 0.0
        one = Fraction(1) if exact else 1.0
        T = np.full((m + 1, n + m + 1), zero, dtype=dtype)
        T[:m, :n] = A
        for r in range(m):
            T[r, n + r] = one
        T[:m, -1] = b
        self.T = T
        self.basis = list(range(n, n + m))
        self.iterations = 0
        self.trace: list[tuple] = []

    @property
    def art_cols(self):
        return slice(self.n, self.n + self.m)

    def set_objective(self, cost):
        """Load reduced costs for ``cost`` (length n + m) given the current basis."""
        T = self.T
        cb = np.array([cost[k] for k in self.basis], dtype=T.dtype)
        T[self.m, :-1] = cost - cb @ T[: self.m, :-1]
        T[self.m, -1] = -(cb @ T[: self.m, -1])

    def pivot(self, r, c):
        T = self.T
        T[r] = T[r] / T[r, c]
        col = T[:, c].copy()
        col[r] = 0
        T -= np.outer(col, T[r])
        self.basis[r] = c

    def run(self, allowed):
        """Minimize the loaded objective with Bland's rule over ``allowed`` columns."""
        T, m, tol = self.T, self.m, self.tol
        while True:
            entering = next((c for c in allowed if T[m, c] < -tol), None)
            if entering is None:
                return
            if self.iterations >= self.max_iter:
                raise IterationLimitError(f"iteration limit {self.max_iter} reached", self.trace[-20:])
            col = T[:m, entering]
            best = None
            for r in range(m):
                if col[r] > tol:
                    ratio = T[r, -1] / col[r]
                    if best is None or ratio < best[0] - tol or (
                        abs(ratio - best[0]) <= tol and self.basis[r] < self.basis[best[1]]
                    ):
                        best = (ratio, r)
            if best is None:
                ray = np.zeros(self.n + m, dtype=T.dtype)
                ray[entering] = 1
                for r in range(m):
                    ray[self.basis[r]] = -col[r]
                raise UnboundedError("objective is unbounded", ray, self.trace[-20:])
            leaving = self.basis[best[1]]
            self.pivot(best[1], entering)
            self.iterations += 1
            self.trace.append((self.iterations, entering, leaving, T[m, -1]))

    def primal(self):
        x = np.zeros(self.n + self.m, dtype=self.T.dtype)
        for r, k in enumerate(self.basis):
            x[k] = self.T[r, -1]
        return x

    def duals(self, cost):
        """``y = c_B B^-1`` read from the artificial columns (they started as identity)."""
        cb = np.array([cost[k] for k in self.basis], dtype=self.T.dtype)
        return cb @ self.T[: self.m, self.art_cols]


def lp_solve(problem: LinearProgram, *, exact: bool = False, tol: float = PIVOT_TOL,
             max_iter: int = MAX_ITER) -> LPSolution:
    """Solve ``problem``; raise on infeasibility, unboundedness or iteration limit."""
    n = problem.n_vars
    m_eq, m_ub = problem.b_eq.size, problem.b_ub.size
    m = m_eq + m_ub
    ns = n + m_ub  # structural + slack columns

    A = _convert(np.zeros((m, ns)), exact)
    if m_eq:
        A[:m_eq, :n] = _convert(problem.A_eq, exact)
    if m_ub:
        A[m_eq:, :n] = _convert(problem.A_ub, exact)
        for r in range(m_ub):
            A[m_eq + r, n + r] = 1
    b = _convert(np.concatenate([problem.b_eq, problem.b_ub]), exact) if m else _convert(np.zeros(0), exact)
    sign = np.where(np.asarray(b, dtype=float) < 0, -1, 1)
    A = A * sign[:, None]
    b = b * sign

    c_given = _convert(np.concatenate([problem.c, np.zeros(m_ub)]), exact)
    tab = _Tableau(A, b, exact, tol, max_iter)
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    # phase 1: drive the artificial variables to zero
    cost1 = np.concatenate([np.full(ns, zero, dtype=tab.T.dtype), np.full(m, one, dtype=tab.T.dtype)])
    tab.set_objective(cost1)
    tab.run(range(ns + m))
    infeas = -tab.T[m, -1]
    feas_tol = 0 if exact else max(tol, 1e-9 * max(1.0, float(np.max(np.abs(np.asarray(b, dtype=float)), initial=0.0))))
    if infeas > feas_tol:
        y = tab.duals(cost1) * sign
        y = np.asarray(y, dtype=float) if not exact else y
        raise InfeasibleError(
            f"constraints are infeasible (phase-1 residual {float(infeas):.3e})",
            farkas_eq=y[:m_eq], farkas_ub=y[m_eq:], trace=tab.trace[-20:],
        )

    # swap remaining zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= ns:
            for c in range(ns):
                if abs(tab.T[r, c]) > tab.tol:
                    tab.pivot(r, c)
                    break

    # phase 2 minimizes; negate for maximization
    cost2 = np.concatenate([-c_given if problem.maximize else c_given, np.full(m, zero, dtype=tab.T.dtype)])
    tab.set_objective(cost2)
    tab.run(range(ns))

    x = tab.primal()[:n]
    cost_orig = np.concatenate([c_given, np.full(m, zero, dtype=tab.T.dtype)])
    y = tab.duals(cost_orig) * sign
    value = c_given[:n] @ x if exact else float(np.asarray(problem.c, dtype=float) @ x)
    if not exact:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
    return LPSolution(
        value=value, x=x, basis=[k for k in tab.basis], duals_eq=y[:m_eq], duals_ub=y[m_eq:],
        iterations=tab.iterations, exact=exact, trace=tab.trace,
    )


def check_solution(problem: LinearProgram, sol: LPSolution) -> dict:
    """Independent residuals for a claimed optimum.

    Returns primal infeasibility, dual infeasibility, duality gap and the
    mismatch between the reported value and ``c @ x``.
    """
    c = np.asarray(problem.c, dtype=float)
    x = np.asarray(sol.x, dtype=float)
    ye = np.asarray(sol.duals_eq, dtype=float)
    yu = np.asarray(sol.duals_ub, dtype=float)
    Ae, be = np.asarray(problem.A_eq, dtype=float), np.asarray(problem.b_eq, dtype=float)
    Au, bu = np.asarray(problem.A_ub, dtype=float), np.asarray(problem.b_ub, dtype=float)
    primal = max(
        float(np.max(np.abs(Ae @ x - be), initial=0.0)),
        float(np.max(Au @ x - bu, initial=0.0)),
        float(np.max(-x, initial=0.0)),
    )
    reduced = c - Ae.T @ ye - Au.T @ yu
    sgn = -1.0 if problem.maximize else 1.0
    # minimization needs reduced >= 0 and y_ub <= 0; maximization the mirror image
    dual = max(
        float(np.max(-sgn * reduced, initial=0.0)),
        float(np.max(sgn * yu, initial=0.0)),
    )
    gap = abs(float(c @ x) - float(be @ ye + bu @ yu))
    return {
        "primal_residual": primal,
        "dual_residual": dual,
        "duality_gap": gap,
        "objective_mismatch": abs(float(sol.value) - float(c @ x)),
    }


def check_farkas(problem: LinearProgram, err: InfeasibleError) -> float:
    """Margin ``b @ y`` of a Farkas certificate, after checking ``A^T y <= 0`` and ``y_ub <= 0``.

    Returns ``-inf`` when the sign conditions are violated by more than ``1e-9``.
    """
    ye = np.asarray(err.farkas_eq, dtype=float)
    yu = np.asarray(err.farkas_ub, dtype=float)
    lhs = np.asarray(problem.A_eq, dtype=float).T @ ye + np.asarray(problem.A_ub, dtype=float).T @ yu
    if lhs.size and lhs.max() > 1e-9 or (yu.size and yu.max() > 1e-9):
        return float("-inf")
    return float(np.asarray(problem.b_eq, dtype=float) @ ye + np.asarray(problem.b_ub, dtype=float) @ yu)
