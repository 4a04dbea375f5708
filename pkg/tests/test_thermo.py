import math

import pytest

from bellarrow import thermo
from bellarrow.errors import ValidationError
from bellarrow.thermo import HeatStep


def test_clausius_examples():
    assert thermo.clausius_delta_s([HeatStep(300, 300)]) == 1.0
    assert thermo.clausius_delta_s([]) == 0
    assert thermo.clausius_delta_s([(-100, 500), (100, 250)]) == pytest.approx(0.2, abs=1e-15)


def test_clausius_rejects_nonpositive_temperature():
    with pytest.raises(ValidationError):
        thermo.clausius_delta_s([(1.0, 0.0)])


def test_contact_examples():
    assert thermo.contact_delta_s(0, 600, 300) == 0
    assert thermo.contact_delta_s(50, 400, 400) == 0
    assert thermo.contact_delta_s(300, 600, 300) == 0.5


def test_contact_positive_when_hot_exceeds_cold():
    assert thermo.contact_delta_s(1e-3, 301, 300) > 0


@pytest.mark.parametrize("args", [(1, 300, 600), (-1, 600, 300), (1, 600, 0)])
def test_contact_rejects_bad_input(args):
    with pytest.raises(ValidationError):
        thermo.contact_delta_s(*args)


def test_box_entropy_small():
    assert thermo.box_entropy(10, 0) == 0.0
    assert thermo.box_entropy(4, 2) == math.log(6)


@pytest.mark.parametrize("n", [61, 100, 257, 1000, 4096])
def test_box_entropy_lgamma_branch_against_big_integers(n):
    for j in (0, 1, n // 3, n // 2, n - 1, n):
        exact = math.log(math.comb(n, j))
        got = thermo.box_entropy(n, j)
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_box_entropy_near_leading_order():
    n = 1000
    exact = math.log(math.comb(n, n // 2))
    corrected = n * math.log(2) - 0.5 * math.log(math.pi * n / 2)
    assert abs(thermo.box_entropy(n, 500) - corrected) <= 0.02 * corrected
    assert exact == pytest.approx(corrected, abs=1e-3)
    assert exact < n * math.log(2)


def test_box_entropy_maximum_at_half():
    n = 40
    values = [thermo.box_entropy(n, j) for j in range(n + 1)]
    assert max(values) == values[n // 2] == thermo.max_box_entropy(n)


def test_box_entropy_range():
    with pytest.raises(ValidationError):
        thermo.box_entropy(3, 4)


def test_boltzmann_entropy():
    assert thermo.boltzmann_entropy(1) == 0.0
    assert thermo.boltzmann_entropy(6, thermo.K_B) == pytest.approx(1.380649e-23 * math.log(6), rel=1e-15)


def test_earth_rate_examples():
    assert thermo.earth_entropy_rate(7.0, 300, 300) == 0.0
    assert thermo.earth_entropy_rate(1, 5800, 300) == pytest.approx(3.1609e-3, abs=1e-7)
    assert thermo.earth_entropy_rate(2, 5800, 300) == 2 * thermo.earth_entropy_rate(1, 5800, 300)


def test_earth_rejects_nonpositive():
    with pytest.raises(ValidationError):
        thermo.earth_entropy_rate(1, 0, 300)
