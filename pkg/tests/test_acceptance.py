"""Exit criteria for the package, each at its pinned tolerance.

Run ``pytest tests/test_acceptance.py`` to get one PASS/FAIL line per
criterion in the terminal summary.
"""
import dataclasses
import io
import json
import math
import time

import numpy as np
import pytest

from bellarrow import bell, cli, search, thermo
from bellarrow import latticegas as lg
from bellarrow.bell import ContextualDensity, LocalModel, Responses, RetroModel, Scenario
from bellarrow.quantum import quantum_behavior, singlet_state

CANONICAL = dict(alice_angles=(0.0, math.pi / 2), bob_angles=(math.pi / 4, -math.pi / 4))
GAS = lg.GasConfig(width=64, height=64, hole_rows=4, particles=512, seed=7, steps=10_000,
                   reverse_at=10_000, init="symmetric")


def test_1_local_bound(report):
    start = time.perf_counter()
    enum = search.enumerate_deterministic_local()
    lp_chsh = search.max_chsh_local_lp()
    lp_ch = search.max_chsh_local_lp(statistic="ch")
    elapsed = time.perf_counter() - start
    ok = (
        abs(enum.max_abs_chsh - 2) <= 1e-6 and abs(lp_chsh.optimum - 2) <= 1e-6
        and abs(enum.max_ch) <= 1e-6 and abs(lp_ch.optimum) <= 1e-6
        and abs(enum.max_abs_chsh - lp_chsh.optimum) <= 1e-6 and abs(enum.max_ch - lp_ch.optimum) <= 1e-6
        and elapsed < 1.0
    )
    report(1, "local bound", ok,
           f"enum CHSH {enum.max_abs_chsh}, LP CHSH {lp_chsh.optimum}, enum CH {enum.max_ch}, "
           f"LP CH {lp_ch.optimum}, {elapsed:.3f} s")


def test_2_quantum_violation(report):
    start = time.perf_counter()
    table = quantum_behavior(singlet_state(), **CANONICAL)
    s = bell.chsh_statistic(table)
    ns = bell.check_no_signalling(table, 1e-12)
    elapsed = time.perf_counter() - start
    ok = abs(abs(s) - 2 * math.sqrt(2)) <= 1e-9 and ns.passed and elapsed < 1.0
    report(2, "quantum violation", ok,
           f"|S| = {abs(s):.15f} (2*sqrt2 = {2 * math.sqrt(2):.15f}), signalling {ns.max_difference:.1e}, "
           f"{elapsed:.3f} s")


def test_3_retro_separation(report):
    res = search.max_chsh_retro_lp()
    e = np.array([[bell.expectation_retro(res.model, i, j) for j in range(2)] for i in range(2)])
    ok = abs(res.optimum - 4.0) <= 1e-6 and np.max(np.abs(e - [[1, 1], [1, -1]])) <= 1e-9
    report(3, "retro separation", ok, f"optimum {res.optimum}, re-evaluated E = {e.tolist()}")


def test_4_reduction_identity(report):
    rng = np.random.default_rng(20161207)
    worst = 0.0
    for _ in range(1000):
        k = int(rng.integers(1, 12))
        rho = rng.random(k)
        rho /= rho.sum()
        resp = Responses(rng.random((k, 2)), rng.random((k, 2)))
        local = LocalModel(Scenario(), rho, resp)
        retro = RetroModel(Scenario(), np.repeat(rho, 4).reshape(k, 2, 2), resp)
        for i in range(2):
            for j in range(2):
                worst = max(worst, abs(bell.expectation_retro(retro, i, j) - bell.expectation_local(local, i, j)))
    report(4, "reduction identity", worst <= 1e-12, f"max deviation {worst:.2e} over 1000 models")


def test_5_contextual_identity(report):
    rng = np.random.default_rng(4243)
    worst = 0.0
    scen = Scenario()
    for _ in range(1000):
        k, m = int(rng.integers(1, 10)), int(rng.integers(1, 10))
        sig = rng.random((k, m))
        sig = ContextualDensity(sig / sig.sum())
        resp = Responses(rng.random((k, 2)), rng.random((k, 2)))
        local = LocalModel(scen, bell.marginalize_context(sig), resp)
        for i in range(2):
            for j in range(2):
                worst = max(worst, abs(bell.expectation_contextual(sig, scen, resp, i, j)
                                       - bell.expectation_local(local, i, j)))
    report(5, "double-sum / marginal identity", worst <= 1e-12, f"max deviation {worst:.2e} over 1000 densities")


def test_6_feasibility_verdict(report, tmp_path):
    target = tmp_path / "singlet.json"
    target.write_text(json.dumps(quantum_behavior(singlet_state(), **CANONICAL).to_dict()))
    cert = tmp_path / "certificate.json"
    start = time.perf_counter()
    code = cli.main(["feasibility", "--target", str(target), "--out", str(cert)], out=io.StringIO())
    elapsed = time.perf_counter() - start
    doc = json.loads(cert.read_text())
    table = bell.load_behavior(target)
    if doc["feasible"]:
        witness = bell.model_from_dict(doc["witness_model"])
        residual = float(np.max(np.abs(bell.behavior(witness).p - table.p)))
        verified = residual <= 1e-6
        detail = f"verdict FEASIBLE, witness residual {residual:.1e}"
    else:
        y = np.array(doc["separator"]).ravel()
        margin = float(y @ table.p.ravel())
        verified = margin >= 1e-8
        detail = f"verdict INFEASIBLE, separator margin {margin:.3e}"
    report(6, "feasibility verdict", code == 0 and verified and elapsed < 10.0, f"{detail}, {elapsed:.3f} s")


@pytest.fixture(scope="module")
def gas_runs():
    start = time.perf_counter()
    echo = lg.run_echo(GAS)
    elapsed = time.perf_counter() - start
    past = lg.run_past(GAS)
    generic = lg.run_echo(dataclasses.replace(GAS, init="uniform"))
    return echo, past, elapsed, generic.final == generic.initial


def test_7_loschmidt_echo(report, gas_runs):
    echo, past, elapsed, generic_exact = gas_runs
    T = GAS.steps
    exact = echo.final == echo.initial and generic_exact
    s0, sT, s_past = echo.entropy[0], echo.entropy[T], past.entropy[T]
    ok = exact and elapsed < 10.0 and past.j[T] == echo.j[T] and s_past == sT and sT > s0
    report(7, "Loschmidt echo", ok,
           f"echo exact {exact} (symmetric and uniform starts), symmetric run {elapsed:.2f} s; j(-T) = {past.j[T]}, j(T) = {echo.j[T]}; "
           f"S(-T) = {s_past:.6f}, S(T) = {sT:.6f} > S(0) = {s0}")


def test_8_relaxation(report, gas_runs):
    echo = gas_runs[0]
    n = GAS.particles
    frac = float(echo.j[5000:10001].mean() / n)
    plateau = float(echo.entropy[5000:10001].mean())
    bound = 0.8 * n * math.log(2)
    ok = 0.4 <= frac <= 0.6 and plateau >= bound and echo.entropy[GAS.steps] > echo.entropy[0]
    if not ok:
        print("trajectory j (every 500 steps):", echo.j[: GAS.steps + 1 : 500].tolist())
    report(8, "relaxation", ok,
           f"<j/n> over [5000, 10000] = {frac:.4f}; plateau S = {plateau:.2f} >= 0.8 n ln2 = {bound:.2f} "
           f"(max ln C(n, n/2) = {thermo.max_box_entropy(n):.2f})")


def test_9_calculators(report):
    contact = thermo.contact_delta_s(300, 600, 300)
    earth = thermo.earth_entropy_rate(1, 5800, 300)
    expected = 1 / 300 - 1 / 5800
    ok = contact == 0.5 and abs(earth - expected) <= 1e-12
    report(9, "calculators", ok, f"contact {contact!r} J/K, earth {earth!r} W/K (expected {expected!r})")


def test_10_monte_carlo(report):
    coin = LocalModel(Scenario(), [1.0], Responses([[0.5, 0.5]], [[0.5, 0.5]]))
    hits = 0
    for seed in range(100):
        mean, se = bell.mc_estimate(coin, 0, 0, 100_000, seed)
        hits += abs(mean) <= 4 * se
    report(10, "Monte Carlo", hits >= 99, f"{hits}/100 seeds within 4 standard errors of 0")
