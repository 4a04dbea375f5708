"""Exact optimization over hidden-variable model classes.

The hidden variable ranges over the 16 deterministic response tables
``(a0, a1, b0, b1)``.  For local models this is complete: any local model is
a mixture of deterministic strategies.  For retro models the LP runs over the
weights ``w(lam, a, b)`` on these 16 atoms; the optimum is the optimum of
that canonical subclass.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import bell
from .bell import DETECT, PLUS_MINUS, BehaviorTable, LocalModel, Responses, RetroModel, Scenario
from .errors import ValidationError, VerificationError
from .simplex import InfeasibleError, LinearProgram, check_farkas, check_solution, lp_solve

VERIFY_TOL = 1e-8
CHSH_SIGNS = np.array([[1.0, 1.0], [1.0, -1.0]])


def deterministic_strategies(coding: str = PLUS_MINUS) -> list[tuple[float, float, float, float]]:
    """All 16 response tables ``(a0, a1, b0, b1)`` in lexicographic order, first outcome first."""
    vals = bell.outcome_values(coding).tolist()
    return list(itertools.product(vals, repeat=4))


def strategy_responses(coding: str = PLUS_MINUS) -> Responses:
    s = np.array(deterministic_strategies(coding))
    return Responses.deterministic(s[:, :2], s[:, 2:], coding)


def strategy_model(index: int, coding: str = PLUS_MINUS, scenario: Scenario | None = None) -> LocalModel:
    """Single-atom local model playing one deterministic strategy."""
    scen = scenario or Scenario(outcome_coding=coding)
    s = np.array(deterministic_strategies(coding)[index])
    return LocalModel(scen, [1.0], Responses.deterministic([s[:2]], [s[2:]], coding))


@dataclass
class EnumerationResult:
    strategies: list[tuple]
    chsh_values: list[float]
    max_abs_chsh: float
    argmax: list[int]
    ch_values: list[float]
    max_ch: float
    ch_argmax: list[int]


def enumerate_deterministic_local() -> EnumerationResult:
    """Evaluate CHSH (+1/-1 coding) and CH (1/0 coding) for every deterministic strategy."""
    strategies = deterministic_strategies(PLUS_MINUS)
    chsh = [bell.chsh_statistic(bell.behavior(strategy_model(k))) for k in range(16)]
    ch = [bell.ch_statistic(bell.behavior(strategy_model(k, DETECT))) for k in range(16)]
    best = max(abs(s) for s in chsh)
    best_ch = max(ch)
    return EnumerationResult(
        strategies=strategies,
        chsh_values=chsh,
        max_abs_chsh=best,
        argmax=[k for k, s in enumerate(chsh) if abs(s) == best],
        ch_values=ch,
        max_ch=best_ch,
        ch_argmax=[k for k, s in enumerate(ch) if s == best_ch],
    )


@dataclass
class SearchResult:
    optimum: float
    model: bell.Model
    certificate: dict
    verification_residual: float
    label: str
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "optimum": self.optimum,
            "witness_model": bell.model_to_dict(self.model),
            "certificate": self.certificate,
            "verification_residual": self.verification_residual,
            **self.extra,
        }


def _local_objective(statistic: str) -> np.ndarray:
    if statistic == "chsh":
        enum = enumerate_deterministic_local()
        return np.array(enum.chsh_values)
    if statistic == "ch":
        return np.array(enumerate_deterministic_local().ch_values)
    raise ValidationError(f"unknown statistic {statistic!r}; expected 'chsh' or 'ch'")


def _local_behavior_matrix(coding: str) -> np.ndarray:
    """Rows: behavior entries ``p[a, b, i, j]`` flattened; columns: strategies."""
    cols = [bell.behavior(strategy_model(k, coding)).p.ravel() for k in range(16)]
    return np.array(cols).T


def _no_signalling_rows(behavior_matrix: np.ndarray) -> np.ndarray:
    """Linear maps sending a behavior vector to its marginal drift across remote settings."""
    rows = []
    idx = np.arange(16).reshape(2, 2, 2, 2)  # [a, b, i, j]
    for x in range(2):
        for s in range(2):
            # alice outcome x at setting s: sum_b p(x, b, s, 0) - sum_b p(x, b, s, 1)
            r = np.zeros(16)
            r[idx[x, :, s, 0]] += 1
            r[idx[x, :, s, 1]] -= 1
            rows.append(r)
            r = np.zeros(16)
            r[idx[:, x, 0, s]] += 1
            r[idx[:, x, 1, s]] -= 1
            rows.append(r)
    return np.array(rows) @ behavior_matrix


def max_chsh_local_lp(no_signalling: bool = False, statistic: str = "chsh") -> SearchResult:
    """Maximize CHSH (or CH) over mixtures of the 16 deterministic strategies."""
    coding = DETECT if statistic == "ch" else PLUS_MINUS
    obj = _local_objective(statistic)
    A_eq = [np.ones(16)]
    b_eq = [1.0]
    if no_signalling:
        ns = _no_signalling_rows(_local_behavior_matrix(coding))
        A_eq.extend(ns)
        b_eq.extend([0.0] * len(ns))
    lp = LinearProgram(obj, np.array(A_eq), np.array(b_eq), maximize=True)
    sol = lp_solve(lp)
    residuals = check_solution(lp, sol)

    weights = np.clip(sol.x, 0.0, None)
    weights = weights / weights.sum()
    model = LocalModel(Scenario(outcome_coding=coding), weights, strategy_responses(coding))
    table = bell.behavior(model)
    recomputed = bell.chsh_statistic(table) if statistic == "chsh" else bell.ch_statistic(table)
    residual = abs(recomputed - sol.value)
    if residual > VERIFY_TOL or max(residuals.values()) > VERIFY_TOL:
        raise VerificationError(f"local LP certificate failed re-evaluation: residual {residual:.3e}, {residuals}")
    cert = sol.certificate()
    cert.update(residuals)
    return SearchResult(
        optimum=float(sol.value), model=model, certificate=cert, verification_residual=residual,
        label=f"local-{statistic}{'-ns' if no_signalling else ''}",
        extra={"support": [int(k) for k in np.flatnonzero(weights > 1e-12)]},
    )


def _retro_incidence(coding: str = PLUS_MINUS) -> np.ndarray:
    """``M[a, b, i, j, v]``: 1 when variable ``v = (lam, a', b')`` contributes to ``p(a, b | i, j)``.

    Variables are ordered ``v = 4 * lam + 2 * a' + b'`` with outcome indices.
    """
    strategies = np.array(deterministic_strategies(coding))
    vals = bell.outcome_values(coding)
    out_idx = (strategies != vals[0]).astype(int)  # index of each atom's outcome per setting
    M = np.zeros((2, 2, 2, 2, 64))
    for lam in range(16):
        for i in range(2):
            for j in range(2):
                a = out_idx[lam, i]
                b = out_idx[lam, 2 + j]
                M[a, b, i, j, 4 * lam + 2 * a + b] = 1.0
    return M


def _retro_model(x: np.ndarray, coding: str = PLUS_MINUS) -> RetroModel:
    w = np.clip(np.asarray(x, dtype=float), 0.0, None).reshape(16, 2, 2)
    return RetroModel(Scenario(outcome_coding=coding), w, strategy_responses(coding), "strict")


def max_chsh_retro_lp(no_signalling: bool = False) -> SearchResult:
    """Maximize CHSH over outcome-dependent weights on the 16 response atoms."""
    M = _retro_incidence()
    B = M.reshape(16, 64)  # behavior entries as linear functions of w
    vals = bell.outcome_values(PLUS_MINUS)
    ab = np.outer(vals, vals)
    obj = np.einsum("ab,ij,abijv->v", ab, CHSH_SIGNS, M)
    norm = M.sum(axis=(0, 1)).reshape(4, 64)
    A_eq = [norm]
    b_eq = [np.ones(4)]
    if no_signalling:
        ns = _no_signalling_rows(B)
        A_eq.append(ns)
        b_eq.append(np.zeros(len(ns)))
    lp = LinearProgram(obj, np.vstack(A_eq), np.concatenate(b_eq), maximize=True)
    sol = lp_solve(lp)
    residuals = check_solution(lp, sol)

    model = _retro_model(sol.x)
    e = np.array([[bell.expectation_retro(model, i, j) for j in range(2)] for i in range(2)])
    recomputed = float(np.sum(CHSH_SIGNS * e))
    residual = abs(recomputed - sol.value)
    table = bell.behavior(model)
    if abs(bell.chsh_statistic(table) - recomputed) > VERIFY_TOL:
        raise VerificationError("behavior table and direct retro expectations disagree")
    if residual > VERIFY_TOL or max(residuals.values()) > VERIFY_TOL:
        raise VerificationError(f"retro LP certificate failed re-evaluation: residual {residual:.3e}, {residuals}")
    if no_signalling:
        report = bell.check_no_signalling(table, VERIFY_TOL)
        if not report.passed:
            raise VerificationError(f"no-signalling witness drifts by {report.max_difference:.3e}")
    cert = sol.certificate()
    cert.update(residuals)
    return SearchResult(
        optimum=float(sol.value), model=model, certificate=cert, verification_residual=residual,
        label=f"retro-chsh{'-ns' if no_signalling else ''} (canonical 16-atom class)",
        extra={"correlators": e.tolist()},
    )


@dataclass
class FeasibilityResult:
    feasible: bool
    model: bell.Model | None
    residual: float | None
    separator: np.ndarray | None
    margin: float | None
    model_class: str

    def to_dict(self) -> dict:
        doc = {"model_class": self.model_class, "feasible": self.feasible}
        if self.feasible:
            doc["witness_model"] = bell.model_to_dict(self.model)
            doc["verification_residual"] = self.residual
        else:
            doc["separator"] = self.separator.reshape(2, 2, 2, 2).tolist()
            doc["margin"] = self.margin
        return doc


def _check_target(target: BehaviorTable) -> BehaviorTable:
    target.scenario.require_2x2()
    return target


def _feasibility(B: np.ndarray, target: BehaviorTable, build, model_class: str) -> FeasibilityResult:
    t = target.p.ravel()
    lp = LinearProgram(np.zeros(B.shape[1]), B, t)
    try:
        sol = lp_solve(lp)
    except InfeasibleError as err:
        margin = check_farkas(lp, err)
        y = np.asarray(err.farkas_eq, dtype=float)
        # y @ B <= 0 for every model in the class, y @ target = margin > 0
        if not margin >= VERIFY_TOL:
            raise VerificationError(f"infeasibility certificate margin {margin!r} below {VERIFY_TOL}") from err
        return FeasibilityResult(False, None, None, y, margin, model_class)
    model = build(sol.x)
    residual = float(np.max(np.abs(bell.behavior(model).p - target.p)))
    if residual > 1e-6:
        raise VerificationError(f"feasibility witness misses target by {residual:.3e}")
    return FeasibilityResult(True, model, residual, None, None, model_class)


def feasibility_retro(target: BehaviorTable) -> FeasibilityResult:
    """Find outcome-dependent weights on the 16 atoms reproducing ``target``."""
    target = _check_target(target)
    coding = target.scenario.outcome_coding
    B = _retro_incidence(coding).reshape(16, 64)

    def build(x):
        w = np.clip(x, 0.0, None).reshape(16, 2, 2)
        return RetroModel(target.scenario, w, strategy_responses(coding), "strict")

    return _feasibility(B, target, build, "retro")


def feasibility_local(target: BehaviorTable) -> FeasibilityResult:
    """Decide membership of ``target`` in the local polytope (mixtures of 16 strategies)."""
    target = _check_target(target)
    coding = target.scenario.outcome_coding
    B = _local_behavior_matrix(coding)

    def build(x):
        w = np.clip(x, 0.0, None)
        return LocalModel(target.scenario, w / w.sum(), strategy_responses(coding))

    return _feasibility(B, target, build, "local")
