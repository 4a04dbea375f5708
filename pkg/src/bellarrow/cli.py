"""Command-line entry point: ``bellarrow <subcommand> ...``.

Exit codes: 0 success, 1 geometry check failed, 2 invalid input, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import bell, latticegas, quantum, search, spacetime, thermo
from .errors import SolverError, ValidationError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3

MODULE_OF = {
    "chsh": "bell-core", "ch": "bell-core", "nosignal": "bell-core", "mc": "bell-core",
    "oracle": "quantum-oracle", "lp-local": "model-search", "lp-retro": "model-search",
    "feasibility": "model-search", "gas": "arrow-of-time", "entropy": "arrow-of-time",
    "geometry": "spacetime",
}


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _dump(doc, out: str | None, stream) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        stream.write(text + "\n")


def cmd_chsh(args, out):
    out.write(fmt(bell.chsh_statistic(bell.behavior(bell.load_model(args.model)))) + "\n")


def cmd_ch(args, out):
    out.write(fmt(bell.ch_statistic(bell.behavior(bell.load_model(args.model)))) + "\n")


def cmd_nosignal(args, out):
    if args.model:
        table = bell.behavior(bell.load_model(args.model))
    else:
        table = bell.load_behavior(args.behavior)
    rep = bell.check_no_signalling(table, args.tol)
    _dump({
        "passed": rep.passed,
        "tol": rep.tol,
        "max_difference": rep.max_difference,
        "entries": [{"party": p, "outcome": x, "setting": s, "max_abs_diff": d} for p, x, s, d in rep.entries],
        "expectation_gaps": [{"party": p, "setting": s, "gap": g} for (p, s), g in rep.expectation_gaps.items()],
    }, None, out)


def cmd_mc(args, out):
    mean, se = bell.mc_estimate(bell.load_model(args.model), args.i, args.j, args.trials, args.seed)
    _dump({"i": args.i, "j": args.j, "trials": args.trials, "seed": args.seed,
           "mean": mean, "standard_error": se}, None, out)


def cmd_oracle(args, out):
    state = quantum.singlet_state() if args.state == "psi-" else quantum.bell_state(args.state)
    table = quantum.quantum_behavior(state, args.alice, args.bob, args.convention)
    doc = table.to_dict()
    doc["chsh"] = bell.chsh_statistic(table)
    _dump(doc, args.out, out)
    if args.out:
        out.write(fmt(doc["chsh"]) + "\n")


def _report_search(result_doc: dict, optimum: float, path: str, out):
    Path(path).write_text(json.dumps(result_doc, indent=2) + "\n")
    out.write(fmt(optimum) + "\n")
    out.write(f"certificate: {path}\n")


def cmd_lp_local(args, out):
    res = search.max_chsh_local_lp(args.no_signalling, args.statistic)
    _report_search(res.to_dict(), res.optimum, args.out, out)


def cmd_lp_retro(args, out):
    res = search.max_chsh_retro_lp(args.no_signalling)
    _report_search(res.to_dict(), res.optimum, args.out, out)


def cmd_feasibility(args, out):
    target = bell.load_behavior(args.target)
    fn = search.feasibility_retro if args.model_class == "retro" else search.feasibility_local
    res = fn(target)
    doc = res.to_dict()
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    out.write(("feasible" if res.feasible else "infeasible") + "\n")
    if res.feasible:
        out.write(f"residual: {fmt(res.residual)}\n")
    else:
        out.write(f"margin: {fmt(res.margin)}\n")
    out.write(f"certificate: {args.out}\n")


def cmd_gas(args, out):
    cfg = latticegas.GasConfig(
        width=args.width, height=args.height, wall_col=args.wall_col, hole_rows=args.hole_rows,
        particles=args.particles, seed=args.seed, steps=args.steps, reverse_at=args.reverse_at,
        init=args.init,
    )
    if cfg.reverse_at is not None and cfg.reverse_at == cfg.steps:
        traj = latticegas.run_echo(cfg)
        exact = traj.final == traj.initial
        print(f"echo: final state {'equals' if exact else 'DIFFERS FROM'} initial state", file=sys.stderr)
    else:
        traj = latticegas.simulate(cfg)
    target = open(args.out, "w", newline="") if args.out else out
    try:
        if args.format == "json":
            json.dump([{"t": t, "j": j, "entropy_over_kB": s} for t, j, s in traj.rows()], target)
            target.write("\n")
        else:
            w = csv.writer(target, lineterminator="\n")
            w.writerow(["t", "j", "entropy_over_kB"])
            for t, j, s in traj.rows():
                w.writerow([t, j, fmt(s)])
    finally:
        if args.out:
            target.close()


def cmd_entropy(args, out):
    if args.kind == "clausius":
        value = thermo.clausius_delta_s([thermo.HeatStep(q, t) for q, t in (args.step or [])])
    elif args.kind == "contact":
        value = thermo.contact_delta_s(args.q, args.t_hot, args.t_cold)
    elif args.kind == "boltzmann":
        if args.microstates is not None:
            value = thermo.boltzmann_entropy(args.microstates)
        elif args.n is not None and args.j is not None:
            value = thermo.box_entropy(args.n, args.j)
        else:
            raise ValidationError("boltzmann needs --microstates or both --n and --j")
    else:
        value = thermo.earth_entropy_rate(args.power, args.t_in, args.t_out)
    out.write(fmt(value) + "\n")


def cmd_geometry(args, out):
    conditions = spacetime.validate_config(spacetime.ExperimentGeometry.load(args.events))
    for k, cond in enumerate(conditions, 1):
        detail = "; ".join(f"{a}-{b} s2={fmt(s2)} ({kind})" for a, b, s2, kind in cond.pairs)
        out.write(f"({k}) {'PASS' if cond.passed else 'FAIL'} {cond.name}: {detail}\n")
    return EXIT_OK if all(c.passed for c in conditions) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellarrow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (("chsh", cmd_chsh, "CHSH statistic of a model file"),
                               ("ch", cmd_ch, "CH statistic of a model file (detect coding)")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--model", required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("nosignal", help="no-signalling report for a model or behavior file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model")
    g.add_argument("--behavior")
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_nosignal)

    s = sub.add_parser("mc", help="Monte Carlo estimate of <A_i B_j>")
    s.add_argument("--model", required=True)
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("oracle", help="quantum behavior table (JSON)")
    s.add_argument("--state", default="psi-", choices=["psi-", "psi+", "phi+", "phi-"])
    s.add_argument("--alice", type=float, nargs=2, default=[0.0, 1.5707963267948966])
    s.add_argument("--bob", type=float, nargs=2, default=[0.7853981633974483, -0.7853981633974483])
    s.add_argument("--convention", default="spin", choices=quantum.CONVENTIONS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("lp-local", help="maximize CHSH/CH over local models")
    s.add_argument("--no-signalling", action="store_true")
    s.add_argument("--statistic", default="chsh", choices=["chsh", "ch"])
    s.add_argument("--out", default="lp-local-certificate.json")
    s.set_defaults(func=cmd_lp_local)

    s = sub.add_parser("lp-retro", help="maximize CHSH over the canonical retro class")
    s.add_argument("--no-signalling", action="store_true")
    s.add_argument("--out", default="lp-retro-certificate.json")
    s.set_defaults(func=cmd_lp_retro)

    s = sub.add_parser("feasibility", help="decide whether a behavior is reproducible by a model class")
    s.add_argument("--target", required=True)
    s.add_argument("--class", dest="model_class", default="retro", choices=["retro", "local"])
    s.add_argument("--out", default="feasibility-certificate.json")
    s.set_defaults(func=cmd_feasibility)

    s = sub.add_parser("gas", help="two-chamber lattice gas; CSV of t, j, entropy_over_kB")
    s.add_argument("--width", type=int, default=64)
    s.add_argument("--height", type=int, default=64)
    s.add_argument("--wall-col", type=int)
    s.add_argument("--hole-rows", type=int, default=4)
    s.add_argument("--particles", type=int, default=512)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--reverse-at", type=int)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--init", default="uniform", choices=["uniform", "symmetric"])
    s.add_argument("--format", default="csv", choices=["csv", "json"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_gas)

    s = sub.add_parser("entropy", help="entropy calculators")
    esub = s.add_subparsers(dest="kind", required=True)
    e = esub.add_parser("clausius")
    e.add_argument("--step", type=float, nargs=2, action="append", metavar=("Q", "T"))
    e = esub.add_parser("contact")
    e.add_argument("--q", type=float, required=True)
    e.add_argument("--t-hot", type=float, required=True)
    e.add_argument("--t-cold", type=float, required=True)
    e = esub.add_parser("boltzmann")
    e.add_argument("--n", type=int)
    e.add_argument("--j", type=int)
    e.add_argument("--microstates", type=int)
    e = esub.add_parser("earth")
    e.add_argument("--power", type=float, required=True)
    e.add_argument("--t-in", type=float, default=5800.0)
    e.add_argument("--t-out", type=float, default=300.0)
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("geometry", help="check a Bell-test event layout")
    s.add_argument("--events", required=True)
    s.set_defaults(func=cmd_geometry)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    module = MODULE_OF.get(args.command, args.command)
    try:
        code = args.func(args, out)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"{module}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"{module}: solver failure: {exc}", file=sys.stderr)
        trace = getattr(exc, "trace", None)
        if trace:
            print(f"{module}: last pivots {trace[-5:]}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
