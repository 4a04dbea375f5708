"""Hidden-variable correlation models for a two-party, two-outcome Bell test.

Two model classes are supported:

* :class:`LocalModel` -- a source density ``rho(lam)`` independent of settings
  and outcomes, with per-party response functions.  Correlations are
  ``<AB> = sum_lam rho(lam) E[a|A, lam] E[b|B, lam]``.
* :class:`RetroModel` -- a source weight ``w(lam, a, b)`` that depends on the
  outcomes each party will later obtain.  For the setting context ``(i, j)``
  the effective joint is ``q_ij(lam, a, b) = w(lam, a, b) p(a|A_i, lam)
  p(b|B_j, lam)`` with mass ``Z_ij``.

Outcomes are indexed ``0`` and ``1``.  Under the ``plus-minus-one`` coding
index 0 is ``+1`` and index 1 is ``-1``; under ``detect-zero-one`` index 0 is
``1`` (detection) and index 1 is ``0``.  Responses are always stored as the
probability of outcome index 0.

Behavior tables are arrays ``p[a, b, i, j]``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DegenerateContextError, NormalizationError, ValidationError

PLUS_MINUS = "plus-minus-one"
DETECT = "detect-zero-one"
CODINGS = (PLUS_MINUS, DETECT)

NORM_TOL = 1e-9

_OUTCOME_VALUES = {
    PLUS_MINUS: np.array([1.0, -1.0]),
    DETECT: np.array([1.0, 0.0]),
}


def outcome_values(coding: str) -> np.ndarray:
    """Numeric outcome values ``[v0, v1]`` for a coding flag."""
    try:
        return _OUTCOME_VALUES[coding].copy()
    except KeyError:
        raise ValidationError(f"unknown outcome coding {coding!r}; expected one of {CODINGS}") from None


@dataclass(frozen=True)
class Scenario:
    """Measurement settings (radians) for Alice and Bob plus the outcome coding."""

    alice_settings: tuple[float, ...] = (0.0, math.pi / 2)
    bob_settings: tuple[float, ...] = (math.pi / 4, -math.pi / 4)
    outcome_coding: str = PLUS_MINUS

    def __post_init__(self):
        object.__setattr__(self, "alice_settings", tuple(float(x) for x in self.alice_settings))
        object.__setattr__(self, "bob_settings", tuple(float(x) for x in self.bob_settings))
        if not self.alice_settings or not self.bob_settings:
            raise ValidationError("each party needs at least one setting")
        outcome_values(self.outcome_coding)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.alice_settings), len(self.bob_settings)

    @property
    def values(self) -> np.ndarray:
        return outcome_values(self.outcome_coding)

    def require_2x2(self):
        if self.shape != (2, 2):
            raise ValidationError(f"statistic needs a 2x2 setting scenario, got {self.shape}")


@dataclass(frozen=True)
class Responses:
    """Per-party response tables: probability of outcome index 0.

    ``alice[k, i]`` is ``p(a = v0 | A_i, lam_k)``; likewise for ``bob``.
    """

    alice: np.ndarray
    bob: np.ndarray

    def __post_init__(self):
        a = np.array(self.alice, dtype=float, ndmin=2)
        b = np.array(self.bob, dtype=float, ndmin=2)
        if a.ndim != 2 or b.ndim != 2:
            raise ValidationError("response tables must be two-dimensional [atom][setting]")
        if a.shape[0] != b.shape[0]:
            raise ValidationError(f"response tables disagree on atom count: {a.shape[0]} vs {b.shape[0]}")
        for name, t in (("alice", a), ("bob", b)):
            if not np.all(np.isfinite(t)) or t.min() < 0.0 or t.max() > 1.0:
                raise ValidationError(f"{name} response probabilities must lie in [0, 1]")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "alice", a)
        object.__setattr__(self, "bob", b)

    @classmethod
    def deterministic(cls, alice, bob, coding: str = PLUS_MINUS) -> "Responses":
        """Build from outcome tables holding the literal outcome values."""
        vals = outcome_values(coding)
        tables = []
        for name, t in (("alice", alice), ("bob", bob)):
            t = np.array(t, dtype=float, ndmin=2)
            ok = np.isin(t, vals)
            if not ok.all():
                raise ValidationError(f"{name} deterministic outcomes must be in {vals.tolist()} for {coding}")
            tables.append((t == vals[0]).astype(float))
        return cls(*tables)

    @property
    def n_atoms(self) -> int:
        return self.alice.shape[0]

    def outcome_probs(self, party: str, setting: int) -> np.ndarray:
        """Array ``[K, 2]`` of outcome probabilities for one party and setting."""
        p0 = (self.alice if party == "alice" else self.bob)[:, setting]
        return np.stack([p0, 1.0 - p0], axis=1)

    def is_deterministic(self) -> bool:
        return bool(np.all((self.alice == 0) | (self.alice == 1)) and np.all((self.bob == 0) | (self.bob == 1)))


def _check_responses(scenario: Scenario, responses: Responses, n_atoms: int):
    na, nb = scenario.shape
    if responses.alice.shape != (n_atoms, na) or responses.bob.shape != (n_atoms, nb):
        raise ValidationError(
            f"response shapes {responses.alice.shape}/{responses.bob.shape} do not match "
            f"{n_atoms} atoms and settings {scenario.shape}"
        )


@dataclass(frozen=True)
class LocalModel:
    """Local hidden-variable model.

    ``density`` holds one nonnegative number per atom.  With ``grid=None``
    the atoms are a finite list and ``density`` are probability masses.  With
    ``grid=m`` the atoms are the midpoints ``(k + 1/2)/m`` of the unit
    interval and ``density`` are pdf values there; integrals are midpoint
    sums with weight ``1/m``.
    """

    scenario: Scenario
    density: np.ndarray
    responses: Responses
    grid: int | None = None

    def __post_init__(self):
        rho = np.array(self.density, dtype=float).ravel()
        if not np.all(np.isfinite(rho)) or (rho.size and rho.min() < 0.0):
            raise ValidationError("density must be finite and nonnegative")
        if self.grid is not None and self.grid != rho.size:
            raise ValidationError(f"grid size {self.grid} does not match density length {rho.size}")
        rho.flags.writeable = False
        object.__setattr__(self, "density", rho)
        _check_responses(self.scenario, self.responses, rho.size)
        total = self.weights.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise NormalizationError(f"local density sums to {total!r}, expected 1 (tolerance {NORM_TOL})")

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights: probability mass carried by each atom."""
        if self.grid is None:
            return self.density
        return self.density / self.grid

    @classmethod
    def on_grid(cls, m: int, rho, alice, bob, scenario: Scenario | None = None) -> "LocalModel":
        """Discretize a model on ``[0, 1)`` with ``m`` midpoint cells.

        ``rho(lam)`` is the density; ``alice(lam, theta)`` and
        ``bob(lam, theta)`` return the probability of outcome index 0.
        """
        scenario = scenario or Scenario()
        lam = (np.arange(m) + 0.5) / m
        dens = np.array([rho(x) for x in lam], dtype=float)
        pa = np.array([[alice(x, t) for t in scenario.alice_settings] for x in lam], dtype=float)
        pb = np.array([[bob(x, t) for t in scenario.bob_settings] for x in lam], dtype=float)
        return cls(scenario, dens, Responses(pa, pb), grid=m)


@dataclass(frozen=True)
class ContextualDensity:
    """Joint weight ``sigma[k, l]`` over source atoms and backward-cone context atoms."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float, ndmin=2)
        if s.ndim != 2:
            raise ValidationError("sigma must be a [lambda][mu] table")
        if not np.all(np.isfinite(s)) or s.min() < 0.0:
            raise ValidationError("sigma must be finite and nonnegative")
        total = s.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise NormalizationError(f"contextual density sums to {total!r}, expected 1")
        s.flags.writeable = False
        object.__setattr__(self, "sigma", s)


@dataclass(frozen=True)
class RetroModel:
    """Outcome-dependent source model with weights ``weight[k, a, b]``.

    ``normalization_mode`` is ``"strict"`` (every context mass must equal 1)
    or ``"auto"`` (each context is renormalized by its mass).
    """

    scenario: Scenario
    weight: np.ndarray
    responses: Responses
    normalization_mode: str = "strict"

    def __post_init__(self):
        w = np.array(self.weight, dtype=float)
        if w.ndim != 3 or w.shape[1:] != (2, 2):
            raise ValidationError(f"retro weight must have shape [K][2][2], got {w.shape}")
        if not np.all(np.isfinite(w)) or w.min() < 0.0:
            raise ValidationError("retro weights must be finite and nonnegative")
        if self.normalization_mode not in ("strict", "auto"):
            raise ValidationError(f"normalization_mode must be 'strict' or 'auto', not {self.normalization_mode!r}")
        w.flags.writeable = False
        object.__setattr__(self, "weight", w)
        _check_responses(self.scenario, self.responses, w.shape[0])
        if self.normalization_mode == "strict":
            for i in range(self.scenario.shape[0]):
                for j in range(self.scenario.shape[1]):
                    z = context_mass(self, i, j)
                    if abs(z - 1.0) > NORM_TOL:
                        raise NormalizationError(
                            f"context ({i}, {j}) has effective mass Z={z!r}; strict mode requires 1"
                        )

    @classmethod
    def from_local(cls, model: LocalModel, mode: str = "strict") -> "RetroModel":
        """Embed a local model: outcome-independent weight ``w(lam, a, b) = rho(lam)``."""
        w = np.repeat(model.weights[:, None, None], 2, axis=1).repeat(2, axis=2)
        return cls(model.scenario, w, model.responses, mode)


Model = Union[LocalModel, RetroModel]


def effective_joint(model: RetroModel, i: int, j: int) -> np.ndarray:
    """Unnormalized ``q_ij[k, a, b]`` for setting context ``(i, j)``."""
    pa = model.responses.outcome_probs("alice", i)
    pb = model.responses.outcome_probs("bob", j)
    return model.weight * pa[:, :, None] * pb[:, None, :]


def context_mass(model: RetroModel, i: int, j: int) -> float:
    return float(effective_joint(model, i, j).sum())


def _conditional_mean(responses: Responses, values: np.ndarray, party: str, setting: int) -> np.ndarray:
    return responses.outcome_probs(party, setting) @ values


def expectation_local(model: LocalModel, i: int, j: int) -> float:
    """``<A_i B_j> = sum_lam rho(lam) E[a|A_i, lam] E[b|B_j, lam]``."""
    vals = model.scenario.values
    ea = _conditional_mean(model.responses, vals, "alice", i)
    eb = _conditional_mean(model.responses, vals, "bob", j)
    return float(np.sum(model.weights * ea * eb))


def marginalize_context(sigma: ContextualDensity) -> np.ndarray:
    """Source density ``rho(lam) = sum_mu sigma(lam, mu)``."""
    return sigma.sigma.sum(axis=1)


def expectation_contextual(sigma: ContextualDensity, scenario: Scenario, responses: Responses,
                           i: int, j: int) -> float:
    """Double sum over source and context atoms without marginalizing first."""
    if responses.n_atoms != sigma.sigma.shape[0]:
        raise ValidationError("sigma and responses disagree on the number of source atoms")
    vals = scenario.values
    ea = _conditional_mean(responses, vals, "alice", i)
    eb = _conditional_mean(responses, vals, "bob", j)
    return float(np.sum(sigma.sigma * (ea * eb)[:, None]))


def _normalized_joint(model: RetroModel, i: int, j: int) -> np.ndarray:
    q = effective_joint(model, i, j)
    z = q.sum()
    if model.normalization_mode == "strict":
        if abs(z - 1.0) > NORM_TOL:
            raise NormalizationError(f"context ({i}, {j}) has effective mass Z={z!r}; strict mode requires 1")
        return q
    if z <= 0.0:
        raise DegenerateContextError(f"context ({i}, {j}) has zero effective mass")
    return q / z


def expectation_retro(model: RetroModel, i: int, j: int) -> float:
    """``<A_i B_j>`` under the outcome-dependent source weight."""
    q = _normalized_joint(model, i, j)
    vals = model.scenario.values
    return float(np.sum(q * np.outer(vals, vals)[None, :, :]))


def expectation(model: Model, i: int, j: int) -> float:
    if isinstance(model, RetroModel):
        return expectation_retro(model, i, j)
    return expectation_local(model, i, j)


def _context_joint(model: Model, i: int, j: int) -> np.ndarray:
    """Per-atom joint ``[K, 2, 2]`` used by the behavior and Monte Carlo paths."""
    if isinstance(model, RetroModel):
        return _normalized_joint(model, i, j)
    pa = model.responses.outcome_probs("alice", i)
    pb = model.responses.outcome_probs("bob", j)
    return model.weights[:, None, None] * pa[:, :, None] * pb[:, None, :]


@dataclass(frozen=True)
class BehaviorTable:
    """Conditional outcome distribution ``p[a, b, i, j]``."""

    p: np.ndarray
    scenario: Scenario = field(default_factory=Scenario)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        na, nb = self.scenario.shape
        if p.shape != (2, 2, na, nb):
            raise ValidationError(f"behavior table must have shape (2, 2, {na}, {nb}), got {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < -NORM_TOL or p.max() > 1.0 + NORM_TOL:
            raise ValidationError("behavior entries must lie in [0, 1]")
        sums = p.sum(axis=(0, 1))
        bad = np.argwhere(np.abs(sums - 1.0) > NORM_TOL)
        if bad.size:
            i, j = bad[0]
            raise NormalizationError(f"context ({i}, {j}) sums to {sums[i, j]!r}, expected 1")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def correlator(self, i: int, j: int, values: np.ndarray | None = None) -> float:
        v = self.scenario.values if values is None else values
        return float(np.sum(self.p[:, :, i, j] * np.outer(v, v)))

    def alice_marginal(self) -> np.ndarray:
        """``[a, i, j]``: Alice's outcome distribution in each context."""
        return self.p.sum(axis=1)

    def bob_marginal(self) -> np.ndarray:
        """``[b, i, j]``: Bob's outcome distribution in each context."""
        return self.p.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "outcome_coding": self.scenario.outcome_coding,
            "settings": {"alice": list(self.scenario.alice_settings), "bob": list(self.scenario.bob_settings)},
            "p": self.p.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BehaviorTable":
        try:
            p = np.array(doc["p"], dtype=float)
            coding = doc.get("outcome_coding", PLUS_MINUS)
            settings = doc.get("settings")
            if settings is None:
                scen = Scenario(tuple(range(p.shape[2])), tuple(range(p.shape[3])), coding)
            else:
                scen = Scenario(tuple(settings["alice"]), tuple(settings["bob"]), coding)
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"malformed behavior document: {exc}") from None
        return cls(p, scen)


def behavior(model: Model) -> BehaviorTable:
    """Behavior table induced by a local or retro model."""
    na, nb = model.scenario.shape
    p = np.empty((2, 2, na, nb))
    for i in range(na):
        for j in range(nb):
            p[:, :, i, j] = _context_joint(model, i, j).sum(axis=0)
    return BehaviorTable(p, model.scenario)


def _chsh_values(table: BehaviorTable) -> np.ndarray:
    if table.scenario.outcome_coding == DETECT:
        warnings.warn("detect-zero-one outcomes mapped 1 -> +1, 0 -> -1 for CHSH", stacklevel=3)
    return outcome_values(PLUS_MINUS)


def chsh_statistic(table: BehaviorTable) -> float:
    """``S = E00 + E01 + E10 - E11``; local models satisfy ``|S| <= 2``."""
    table.scenario.require_2x2()
    v = _chsh_values(table)
    e = [[table.correlator(i, j, v) for j in range(2)] for i in range(2)]
    return e[0][0] + e[0][1] + e[1][0] - e[1][1]


def ch_statistic(table: BehaviorTable) -> float:
    """Clauser-Horne combination of detection probabilities.

    ``J = p11(0,0) + p11(0,1) + p11(1,0) - p11(1,1) - pA(0) - pB(0)`` with the
    singles ``pA(0)``, ``pB(0)`` read from context ``(0, 0)``.  ``J <= 0`` for
    every local model.
    """
    table.scenario.require_2x2()
    if table.scenario.outcome_coding != DETECT:
        raise ValidationError("CH statistic needs detect-zero-one coding")
    p11 = table.p[0, 0]
    pa = table.alice_marginal()[0, 0, 0]
    pb = table.bob_marginal()[0, 0, 0]
    return float(p11[0, 0] + p11[0, 1] + p11[1, 0] - p11[1, 1] - pa - pb)


@dataclass
class SignallingReport:
    """Maximum marginal drift across the remote party's settings.

    ``entries`` rows are ``(party, outcome_index, local_setting, max_abs_diff)``.
    ``expectation_gaps`` maps ``(party, local_setting)`` to the spread of that
    party's marginal expectation value.
    """

    tol: float
    entries: list[tuple[str, int, int, float]]
    expectation_gaps: dict[tuple[str, int], float]

    @property
    def max_difference(self) -> float:
        return max((e[3] for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_difference <= self.tol


def check_no_signalling(table: BehaviorTable, tol: float = 1e-12) -> SignallingReport:
    vals = table.scenario.values
    entries = []
    gaps = {}
    for party, marg in (("alice", table.alice_marginal()), ("bob", table.bob_marginal().transpose(0, 2, 1))):
        # marg[x, local, remote]
        for s in range(marg.shape[1]):
            for x in range(2):
                row = marg[x, s, :]
                entries.append((party, x, s, float(row.max() - row.min())))
            ev = vals @ marg[:, s, :]
            gaps[(party, s)] = float(ev.max() - ev.min())
    return SignallingReport(tol, entries, gaps)


def _context_seed(seed: int, i: int, j: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, i, j]))


def mc_estimate(model: Model, i: int, j: int, trials: int, seed: int) -> tuple[float, float]:
    """Sample ``(lam, a, b)`` from the context joint and average ``a*b``.

    Each context draws from its own stream derived from ``(seed, i, j)``.
    Returns ``(mean, standard_error)``.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    q = _context_joint(model, i, j).ravel()
    cdf = np.cumsum(q)
    if cdf[-1] <= 0.0:
        raise DegenerateContextError(f"context ({i}, {j}) has zero effective mass")
    rng = _context_seed(seed, i, j)
    idx = np.searchsorted(cdf, rng.random(trials) * cdf[-1], side="right")
    idx = np.minimum(idx, q.size - 1)
    vals = model.scenario.values
    ab = np.outer(vals, vals).ravel()
    samples = ab[idx % 4]
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, se


# --- model files -----------------------------------------------------------

def model_to_dict(model: Model) -> dict:
    scen = model.scenario
    r = model.responses
    vals = scen.values
    if r.is_deterministic():
        responses = {"deterministic": {
            "alice": np.where(r.alice == 1, vals[0], vals[1]).tolist(),
            "bob": np.where(r.bob == 1, vals[0], vals[1]).tolist(),
        }}
    else:
        responses = {"stochastic": {"alice": r.alice.tolist(), "bob": r.bob.tolist()}}
    doc = {
        "class": "retro" if isinstance(model, RetroModel) else "local",
        "outcome_coding": scen.outcome_coding,
        "settings": {"alice": list(scen.alice_settings), "bob": list(scen.bob_settings)},
        "responses": responses,
    }
    if isinstance(model, RetroModel):
        doc["lambda"] = {"type": "finite", "atoms": int(model.weight.shape[0])}
        doc["density"] = model.weight.tolist()
        doc["normalization_mode"] = model.normalization_mode
    else:
        if model.grid is None:
            doc["lambda"] = {"type": "finite", "atoms": int(model.density.size)}
        else:
            doc["lambda"] = {"type": "grid", "m": int(model.grid)}
        doc["density"] = model.density.tolist()
    return doc


def model_from_dict(doc: dict) -> Model:
    try:
        cls = doc["class"]
        coding = doc.get("outcome_coding", PLUS_MINUS)
        scen = Scenario(tuple(doc["settings"]["alice"]), tuple(doc["settings"]["bob"]), coding)
        resp = doc["responses"]
        if "deterministic" in resp:
            responses = Responses.deterministic(resp["deterministic"]["alice"], resp["deterministic"]["bob"], coding)
        elif "stochastic" in resp:
            responses = Responses(resp["stochastic"]["alice"], resp["stochastic"]["bob"])
        else:
            raise ValidationError("responses must be 'deterministic' or 'stochastic'")
        lam = doc.get("lambda", {"type": "finite"})
        density = doc["density"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed model document: missing or invalid {exc}") from None
    if cls == "local":
        grid = None
        if lam.get("type") == "grid":
            grid = int(lam["m"])
        elif lam.get("type") != "finite":
            raise ValidationError(f"unknown lambda type {lam.get('type')!r}")
        model = LocalModel(scen, density, responses, grid)
    elif cls == "retro":
        model = RetroModel(scen, density, responses, doc.get("normalization_mode", "strict"))
    else:
        raise ValidationError(f"model class must be 'local' or 'retro', not {cls!r}")
    expected = lam.get("atoms") if lam.get("type") == "finite" else lam.get("m")
    if expected is not None and int(expected) != model.responses.n_atoms:
        raise ValidationError(f"lambda declares {expected} atoms but tables hold {model.responses.n_atoms}")
    return model


def load_model(path) -> Model:
    return model_from_dict(json.loads(Path(path).read_text()))


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2))


def load_behavior(path) -> BehaviorTable:
    return BehaviorTable.from_dict(json.loads(Path(path).read_text()))
