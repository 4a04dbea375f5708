import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellarrow import bell
from bellarrow.errors import ValidationError
from bellarrow.quantum import (
    DensityMatrix,
    MeasurementSetting,
    bell_state,
    correlation,
    quantum_behavior,
    singlet_state,
)

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_singlet_trace_and_purity():
    rho = singlet_state()
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-15)
    assert rho.purity() == pytest.approx(1.0, abs=1e-15)


def test_singlet_reduced_states_maximally_mixed():
    rho = singlet_state()
    for party in ("alice", "bob"):
        np.testing.assert_allclose(rho.reduced(party), np.eye(2) / 2, atol=1e-15)


def test_correlation_examples():
    rho = singlet_state()
    assert correlation(rho, 0.7, 0.7) == pytest.approx(-1.0, abs=1e-15)
    assert correlation(rho, 0.2, 0.2 + math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert correlation(rho, 0.0, math.pi / 4) == pytest.approx(-0.7071068, abs=1e-7)


@settings(max_examples=100)
@given(angles, angles)
def test_correlation_closed_form(ta, tb):
    assert correlation(singlet_state(), ta, tb) == pytest.approx(-math.cos(ta - tb), abs=1e-12)


@settings(max_examples=50)
@given(angles, angles, angles)
def test_rotational_invariance(ta, tb, shift):
    rho = singlet_state()
    assert correlation(rho, ta + shift, tb + shift) == pytest.approx(correlation(rho, ta, tb), abs=1e-12)


@settings(max_examples=50)
@given(angles, st.sampled_from(["spin", "polarization"]))
def test_projectors_complete_and_idempotent(theta, conv):
    plus, minus = MeasurementSetting(theta, conv).projectors()
    np.testing.assert_allclose(plus + minus, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(plus @ plus, plus, atol=1e-12)
    np.testing.assert_allclose(minus @ minus, minus, atol=1e-12)
    np.testing.assert_allclose(plus @ minus, 0, atol=1e-12)


def test_polarization_doubles_angle():
    rho = singlet_state()
    assert correlation(rho, 0.0, math.pi / 2, "polarization") == pytest.approx(1.0, abs=1e-12)
    assert correlation(rho, 0.0, math.pi / 8, "polarization") == pytest.approx(-math.cos(math.pi / 4), abs=1e-12)


def test_behavior_matches_correlation():
    rho = singlet_state()
    a, b = (0.1, 1.3), (-0.4, 2.2)
    t = quantum_behavior(rho, a, b)
    for i in range(2):
        for j in range(2):
            assert t.correlator(i, j) == pytest.approx(correlation(rho, a[i], b[j]), abs=1e-12)


def test_equal_angle_table():
    t = quantum_behavior(singlet_state(), (0.0, 0.0), (0.0, 0.0))
    np.testing.assert_allclose(t.p[:, :, 0, 0], [[0.0, 0.5], [0.5, 0.0]], atol=1e-15)


@pytest.mark.parametrize("name", ["phi+", "phi-", "psi+", "psi-"])
def test_maximally_entangled_marginals(name):
    rng = np.random.default_rng(abs(hash(name)) % 2**32)
    u = np.kron(random_unitary(rng), random_unitary(rng))
    rho = DensityMatrix(u @ bell_state(name).matrix @ u.conj().T)
    t = quantum_behavior(rho, rng.uniform(0, 6, 2), rng.uniform(0, 6, 2))
    np.testing.assert_allclose(t.alice_marginal(), 0.5, atol=1e-12)
    np.testing.assert_allclose(t.bob_marginal(), 0.5, atol=1e-12)
    assert bell.check_no_signalling(t, 1e-12).passed


def test_tsirelson_value():
    t = quantum_behavior(singlet_state(), (0.0, math.pi / 2), (math.pi / 4, -math.pi / 4))
    assert abs(bell.chsh_statistic(t)) == pytest.approx(2 * math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("matrix", [
    np.diag([1.0, 0, 0, 0]) + 1e-3 * np.triu(np.ones((4, 4)), 1),   # not Hermitian
    np.diag([0.5, 0.5, 0.5, 0.0]),                                   # trace 1.5
    np.diag([1.2, -0.2, 0.0, 0.0]),                                  # negative eigenvalue
    np.eye(3) / 3,                                                   # wrong size
])
def test_invalid_states_rejected(matrix):
    with pytest.raises(ValidationError):
        DensityMatrix(matrix)
