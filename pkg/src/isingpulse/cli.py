"""Command-line front end.

Subcommands: geodesic (solve a step), pulse-export (resampled u(t)),
simulate (build + exact propagation), compare (duration/fidelity table),
verify (invariant suite; exit 0 iff everything passes).  All commands are
deterministic: same flags, same bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BACKEND
from .dynamics import DEFAULT_DT, integrate_step4, pulse_to_json
from .geodesic import (
    SolverError,
    export_pulse,
    first_step_problem,
    intermediate_problem,
    last_step_by_reversal,
    solve,
)
from .operators import (
    ChainSpec,
    inner_product,
    matrix_of,
    multiple_spin_order,
    single_spin,
    soliton_operator,
    transfer_basis,
)
from .sequences import (
    conventional_cascade,
    geodesic_order_sequence,
    inept_cascade,
    soliton_preparation,
    soliton_propagation_step,
    pair_encoding,
    pair_propagation_step,
)
from .simulator import compare_methods, propagate, render_comparison

STEPS = ("first", "intermediate", "last")


def _solve_step(step: str, dt: float, bracket=None):
    if step == "last":
        base = solve(first_step_problem(), f_bracket=bracket, dt=dt)
        return last_step_by_reversal(base)
    problem = first_step_problem() if step == "first" else intermediate_problem()
    return solve(problem, f_bracket=bracket, dt=dt)


def _solutions(dt: float):
    first = solve(first_step_problem(), dt=dt)
    return {
        "first": first,
        "intermediate": solve(intermediate_problem(), dt=dt),
        "last": last_step_by_reversal(first),
    }


def cmd_geodesic(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bracket = tuple(args.bracket) if args.bracket else None
    try:
        sol = _solve_step(args.step, args.dt, bracket)
    except SolverError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    chain = ChainSpec(2, args.j)
    pulse = export_pulse(sol, args.samples)
    payload = sol.to_json_dict()
    payload["pulse"] = [
        {"t": float(t), "u": float(u)} for t, u in zip(pulse.times, pulse.values)
    ]
    payload["tau_seconds"] = chain.seconds(sol.tau)
    payload["pulse_constant"] = pulse.is_constant()
    stem = out / f"geodesic_{args.step}"
    with open(f"{stem}.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    pulse.to_csv(f"{stem}.csv")
    print(f"step {args.step}: f = {sol.f:.6f} (units pi J)")
    print(f"  tau = {sol.tau:.6f} /(pi J) = {chain.seconds(sol.tau):.6e} s at J={args.j} Hz")
    print(f"  boundary miss = {sol.miss:.3e}; pulse constant: {pulse.is_constant()}")
    print(f"  wrote {stem}.json, {stem}.csv")
    return 0


def cmd_pulse_export(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        sol = _solve_step(args.step, args.dt)
    except SolverError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    pulse = export_pulse(sol, args.samples)
    path = out / f"pulse_{args.step}.csv"
    pulse.to_csv(path)
    pulse_to_json(pulse, out / f"pulse_{args.step}.json",
                  extra={"f": sol.f, "tau": sol.tau})
    print(f"wrote {path} ({args.samples} samples, duration {pulse.duration:.6f})")
    return 0


_KIND_MIN_N = {
    "conventional": 2,
    "geodesic-order": 4,
    "inept": 2,
    "soliton-prep": 5,
    "soliton-step": 5,
    "pair-encode": 7,
    "pair-step": 7,
}


def cmd_simulate(args) -> int:
    n = args.n
    kind = args.kind
    if n < _KIND_MIN_N[kind]:
        print(f"error: kind {kind} needs n >= {_KIND_MIN_N[kind]}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sols = _solutions(args.dt) if kind in ("geodesic-order", "soliton-step", "pair-step",
                                           "pair-encode") else None

    profile_basis = None
    if kind == "conventional":
        seq = conventional_cascade(n, args.j)
        runs = [(single_spin(1, "x"), multiple_spin_order(n))]
        profile_basis = transfer_basis(n)
    elif kind == "geodesic-order":
        seq = geodesic_order_sequence(n, sols, args.j)
        runs = [(single_spin(1, "x"), multiple_spin_order(n))]
        profile_basis = transfer_basis(n)
    elif kind == "inept":
        seq = inept_cascade(n, args.j)
        runs = [(single_spin(1, "x"), single_spin(n, "x"))]
    elif kind == "soliton-prep":
        seq = soliton_preparation(n, args.j)
        runs = [(single_spin(1, "x"), soliton_operator(1))]
    elif kind == "soliton-step":
        seq = soliton_propagation_step(1, sols["intermediate"], n, args.j)
        runs = [(soliton_operator(1), soliton_operator(2))]
    elif kind == "pair-encode":
        seq = pair_encoding(sols["intermediate"], n, args.j)
        runs = [
            (single_spin(1, "y"), soliton_operator(1)),
            (single_spin(1, "x"), soliton_operator(3)),
        ]
    else:  # pair-step
        seq = pair_propagation_step(1, sols["intermediate"], n, args.j)
        runs = [
            (soliton_operator(1), soliton_operator(2)),
            (soliton_operator(3), soliton_operator(4)),
        ]

    chain = ChainSpec(n, args.j)
    report = {
        "kind": kind,
        "n": n,
        "J_hz": args.j,
        "duration": seq.total_duration,
        "duration_seconds": chain.seconds(seq.total_duration),
        "transfers": [],
    }
    for initial, target in runs:
        res = propagate(seq, initial, basis=profile_basis)
        fid = res.fidelity_to(target)
        report["transfers"].append(
            {"initial": str(initial), "target": str(target), "fidelity": fid,
             "norm_drift": res.norm_drift}
        )
        print(f"{kind} n={n}: {initial}  ->  {target}")
        print(f"  fidelity = {fid:.8f}   duration = {seq.total_duration:.6f} /(pi J)"
              f" = {chain.seconds(seq.total_duration):.6e} s")
        if profile_basis is not None and res.times is not None:
            prof = out / f"simulate_{kind}_n{n}_profile.csv"
            header = "t," + ",".join(f"x{i+1}" for i in range(len(profile_basis)))
            np.savetxt(prof, np.column_stack([res.times, res.expectations]),
                       delimiter=",", header=header, comments="")
            print(f"  wrote {prof}")
            profile_basis = None  # profile once
    path = out / f"simulate_{kind}_n{n}.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
    seq.to_json(out / f"sequence_{kind}_n{n}.json")
    print(f"  wrote {path}")
    return 0


def cmd_compare(args) -> int:
    ns = list(range(args.n_min, args.n_max + 1))
    if not ns:
        print("error: empty n range", file=sys.stderr)
        return 2
    if min(ns) < 4:
        print("error: comparison needs n >= 4", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sols = _solutions(args.dt)
    reports = []
    for n in ns:
        rep = compare_methods(n, sols, args.j)
        reports.append(rep)
        print(render_comparison(rep))
        print()
    path = out / "compare.json"
    with open(path, "w") as fh:
        json.dump(reports, fh, indent=2)
    print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    """Condensed invariant suite; the full versions live in the test suite."""
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except AssertionError as err:
            checks.append((name, False, str(err)))

    def gram():
        chain = ChainSpec(6)
        basis = transfer_basis(6)
        G = np.array([[inner_product(a, b, chain) for b in basis] for a in basis])
        assert np.max(np.abs(G - np.eye(len(basis)))) < 1e-12, "Gram defect"

    def norm_conservation():
        sol = solve(intermediate_problem(), dt=args.dt)
        drift = sol.trajectory.norm_drift()
        assert drift < 1e-8, f"norm drift {drift:.2e}"

    def convergence():
        from .dynamics import integrate, step4_rhs

        x0 = np.array([1.0, 0, 0, 0])
        ref = integrate(step4_rhs, 1.084, x0, np.pi / 2, dt=1e-4 / 4).final
        e1 = np.linalg.norm(integrate(step4_rhs, 1.084, x0, np.pi / 2, dt=2e-3).final - ref)
        e2 = np.linalg.norm(integrate(step4_rhs, 1.084, x0, np.pi / 2, dt=1e-3).final - ref)
        assert e1 / e2 > 8, f"convergence order too low: ratio {e1 / e2:.1f}"

    def determinism():
        a = solve(intermediate_problem(), f_bracket=(0.8, 2.0), dt=args.dt)
        b = solve(intermediate_problem(), f_bracket=(0.9, 1.9), dt=args.dt)
        assert abs(a.f - b.f) < 1e-6 and abs(a.tau - b.tau) < 1e-6, "solver not deterministic"

    def commuting_split():
        from .simulator import verify_commuting_split

        worst = verify_commuting_split(1, ChainSpec(6), np.linspace(0, 2, 5))
        assert worst < 1e-12, f"split commutator {worst:.2e}"

    def pulse_replay():
        sol = solve(intermediate_problem(), dt=args.dt)
        s = 1 / np.sqrt(2)
        traj = integrate_step4(np.array([s, s, 0, 0]), sol.pulse, dt=args.dt)
        miss = np.linalg.norm(traj.final - np.array([0, 0, s, s]))
        assert miss < 1e-3, f"replay miss {miss:.2e}"

    check("operator basis Gram identity", gram)
    check("integrator norm conservation", norm_conservation)
    check("integrator order-4 convergence", convergence)
    check("solver determinism", determinism)
    check("commuting split of advance Hamiltonian", commuting_split)
    check("pulse replay reaches window target", pulse_replay)

    print(f"kernel backend: {BACKEND}")
    failures = 0
    for name, ok, msg in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {msg}" if msg else ""))
        failures += 0 if ok else 1
    return 1 if failures else 0


def _load_config_defaults(argv):
    """--config FILE provides defaults; explicit flags win."""
    if "--config" not in argv:
        return {}
    idx = argv.index("--config")
    with open(argv[idx + 1]) as fh:
        return json.load(fh)


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    d = defaults or {}
    parser = argparse.ArgumentParser(
        prog="isingpulse",
        description="Shaped-pulse design and exact simulation for Ising spin chains",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with flag defaults")
        p.add_argument("--j", type=float, default=d.get("j", 1.0),
                       help="coupling J in Hz for seconds conversions (default 1)")
        p.add_argument("--dt", type=float, default=d.get("dt", DEFAULT_DT),
                       help="integrator step in 1/(pi J)")
        p.add_argument("--out", default=d.get("out", "."), help="output directory")

    p = sub.add_parser("geodesic", help="solve one transfer step")
    p.add_argument("--step", choices=STEPS, required=True)
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"),
                   help="override the f search bracket")
    p.add_argument("--samples", type=int, default=d.get("samples", 1001))
    common(p)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("pulse-export", help="write a resampled pulse CSV")
    p.add_argument("--step", choices=STEPS, required=True)
    p.add_argument("--samples", type=int, default=d.get("samples", 1001))
    common(p)
    p.set_defaults(fn=cmd_pulse_export)

    p = sub.add_parser("simulate", help="build a sequence and propagate exactly")
    p.add_argument("--kind", choices=sorted(_KIND_MIN_N), required=True)
    p.add_argument("--n", type=int, required=True, help="chain length")
    common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("compare", help="duration/fidelity comparison over a range of n")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("verify", help="run the invariant suite")
    common(p)
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        defaults = _load_config_defaults(argv)
    except (OSError, json.JSONDecodeError) as err:
        print(f"error reading config: {err}", file=sys.stderr)
        return 2
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
