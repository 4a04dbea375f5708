"""Exact two-qubit predictions used as the reference behavior.

Measurement along angle ``theta`` uses the observable
``cos(theta) Z + sin(theta) X`` (spin convention).  The polarization
convention doubles the angle, so that a polarizer rotated by ``pi/2`` gives
the orthogonal outcome.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import PLUS_MINUS, BehaviorTable, Scenario
from .errors import ValidationError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

CONVENTIONS = ("spin", "polarization")


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"two-qubit state must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-12:
            raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < -1e-10:
            raise ValidationError(f"density matrix is not positive semidefinite (min eigenvalue {lo!r})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_ket(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def reduced(self, party: str) -> np.ndarray:
        """Partial trace leaving one qubit (``"alice"`` is the first factor)."""
        t = self.matrix.reshape(2, 2, 2, 2)
        if party == "alice":
            return np.einsum("ajbj->ab", t)
        return np.einsum("jajb->ab", t)


def singlet_state() -> DensityMatrix:
    """``(|01> - |10>)/sqrt(2)``."""
    return DensityMatrix.from_ket([0, 1, -1, 0])


def bell_state(name: str) -> DensityMatrix:
    kets = {
        "phi+": [1, 0, 0, 1],
        "phi-": [1, 0, 0, -1],
        "psi+": [0, 1, 1, 0],
        "psi-": [0, 1, -1, 0],
    }
    try:
        return DensityMatrix.from_ket(kets[name])
    except KeyError:
        raise ValidationError(f"unknown Bell state {name!r}; choose from {sorted(kets)}") from None


@dataclass(frozen=True)
class MeasurementSetting:
    angle: float
    convention: str = "spin"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValidationError(f"convention must be one of {CONVENTIONS}")

    @property
    def _phase(self) -> float:
        return self.angle if self.convention == "spin" else 2.0 * self.angle

    def observable(self) -> np.ndarray:
        t = self._phase
        return math.cos(t) * PAULI_Z + math.sin(t) * PAULI_X

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Projectors onto the ``+1`` and ``-1`` eigenspaces."""
        o = self.observable()
        return (IDENTITY + o) / 2, (IDENTITY - o) / 2


def correlation(state: DensityMatrix, theta_a: float, theta_b: float, convention: str = "spin") -> float:
    """``Tr[rho O(theta_a) (x) O(theta_b)]``."""
    oa = MeasurementSetting(theta_a, convention).observable()
    ob = MeasurementSetting(theta_b, convention).observable()
    return float(np.trace(state.matrix @ np.kron(oa, ob)).real)


def quantum_behavior(state: DensityMatrix, alice_angles=(0.0, math.pi / 2),
                     bob_angles=(math.pi / 4, -math.pi / 4), convention: str = "spin") -> BehaviorTable:
    """Behavior ``p(a, b | i, j) = Tr[rho (Pi_a (x) Pi_b)]`` in ``+1/-1`` coding."""
    scen = Scenario(tuple(alice_angles), tuple(bob_angles), PLUS_MINUS)
    pa = [MeasurementSetting(t, convention).projectors() for t in scen.alice_settings]
    pb = [MeasurementSetting(t, convention).projectors() for t in scen.bob_settings]
    p = np.empty((2, 2) + scen.shape)
    for i, proj_a in enumerate(pa):
        for j, proj_b in enumerate(pb):
            for a in range(2):
                for b in range(2):
                    p[a, b, i, j] = np.trace(state.matrix @ np.kron(proj_a[a], proj_b[b])).real
    return BehaviorTable(p, scen)
