import itertools
import math

import numpy as np
import pytest

from bellarrow import bell, search
from bellarrow.bell import BehaviorTable, LocalModel, Responses, RetroModel, Scenario
from bellarrow.errors import NormalizationError
from bellarrow.quantum import quantum_behavior, singlet_state


def brute_chsh(a0, a1, b0, b1):
    return a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1


def brute_ch(a0, a1, b0, b1):
    return a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1 - a0 - b0


def test_sixteen_strategies():
    res = search.enumerate_deterministic_local()
    assert len(res.strategies) == 16
    assert len(set(res.strategies)) == 16


def test_enumeration_maxima_match_brute_force():
    res = search.enumerate_deterministic_local()
    chsh = [brute_chsh(*s) for s in itertools.product([1, -1], repeat=4)]
    ch = [brute_ch(*s) for s in itertools.product([1, 0], repeat=4)]
    assert res.chsh_values == chsh
    assert res.ch_values == ch
    assert res.max_abs_chsh == 2 == max(map(abs, chsh))
    assert res.max_ch == 0 == max(ch)


def test_local_lp_optimum_and_vertex():
    res = search.max_chsh_local_lp()
    assert res.optimum == pytest.approx(2.0, abs=1e-6)
    assert len(res.extra["support"]) == 1
    assert res.verification_residual <= 1e-8


def test_local_lp_no_signalling_unchanged():
    assert search.max_chsh_local_lp(no_signalling=True).optimum == pytest.approx(2.0, abs=1e-6)


def test_local_lp_ch():
    assert search.max_chsh_local_lp(statistic="ch").optimum == pytest.approx(0.0, abs=1e-6)


def test_retro_lp_reaches_four():
    res = search.max_chsh_retro_lp()
    assert res.optimum == pytest.approx(4.0, abs=1e-6)
    m = res.model
    e = [[bell.expectation_retro(m, i, j) for j in range(2)] for i in range(2)]
    np.testing.assert_allclose(e, [[1, 1], [1, -1]], atol=1e-9)


def test_hand_witness_is_feasible_point():
    # lambda_A = (+,-,+,+) with w(+,+) = 1; lambda_B = (-,+,+,-) with w(+,+) = w(+,-) = 1
    strategies = search.deterministic_strategies()
    w = np.zeros((16, 2, 2))
    w[strategies.index((1.0, -1.0, 1.0, 1.0)), 0, 0] = 1
    lb = strategies.index((-1.0, 1.0, 1.0, -1.0))
    w[lb, 0, 0] = 1
    w[lb, 0, 1] = 1
    m = RetroModel(Scenario(), w, search.strategy_responses())
    assert bell.chsh_statistic(bell.behavior(m)) == 4.0


def test_retro_at_least_quantum_and_local():
    ns = search.max_chsh_retro_lp(no_signalling=True)
    assert ns.optimum >= 2 * math.sqrt(2) - 1e-6
    assert ns.optimum >= search.max_chsh_local_lp().optimum - 1e-9
    assert bell.check_no_signalling(bell.behavior(ns.model), 1e-8).passed


def test_local_behaviors_feasible_in_both_classes():
    rng = np.random.default_rng(4)
    for _ in range(5):
        rho = rng.random(3)
        m = LocalModel(Scenario(), rho / rho.sum(), Responses(rng.random((3, 2)), rng.random((3, 2))))
        t = bell.behavior(m)
        for fn in (search.feasibility_retro, search.feasibility_local):
            res = fn(t)
            assert res.feasible
            assert res.residual <= 1e-6


def test_singlet_verdicts_carry_certificates():
    t = quantum_behavior(singlet_state())
    retro = search.feasibility_retro(t)
    if retro.feasible:
        assert retro.residual <= 1e-6
    else:
        assert retro.margin >= 1e-8
    local = search.feasibility_local(t)
    assert not local.feasible
    # the separator is a Bell functional: <= 0 on every deterministic strategy, > 0 on the singlet
    y = local.separator
    for k in range(16):
        assert y @ bell.behavior(search.strategy_model(k)).p.ravel() <= 1e-9
    assert y @ t.p.ravel() == pytest.approx(local.margin, abs=1e-12)
    assert local.margin >= 1e-8


def test_target_with_bad_context_rejected():
    p = np.full((2, 2, 2, 2), 0.25)
    p[:, :, 1, 1] *= 0.9
    with pytest.raises(NormalizationError):
        search.feasibility_retro(BehaviorTable(p))


def test_pr_box_feasible_only_for_retro():
    p = np.zeros((2, 2, 2, 2))
    for i, j in itertools.product(range(2), repeat=2):
        if i * j:
            p[0, 1, i, j] = p[1, 0, i, j] = 0.5
        else:
            p[0, 0, i, j] = p[1, 1, i, j] = 0.5
    pr = BehaviorTable(p)
    assert bell.chsh_statistic(pr) == 4.0
    assert search.feasibility_retro(pr).feasible
    assert not search.feasibility_local(pr).feasible


def test_search_result_serializes_to_valid_model(tmp_path):
    res = search.max_chsh_retro_lp()
    doc = res.to_dict()
    back = bell.model_from_dict(doc["witness_model"])
    assert bell.chsh_statistic(bell.behavior(back)) == pytest.approx(doc["optimum"], abs=1e-8)
