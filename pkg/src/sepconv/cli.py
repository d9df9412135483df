"""Batch command-line front end.

Exit codes: 0 verified / feasible, 1 refuted / infeasible / not certified,
2 input error. Reports go to stdout as JSON, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import formats
from .feasibility import Verdict, pauli_trace_obstruction, sep1_feasible, sep_witness_check, trace_monotone_check
from .kraus import build_example, verify_sep_map
from .locc import ProtocolError, SingularMeasurement, random_one_site_singular, regular_protocol_to_sep1, \
    run_protocol, singular_branch_analysis
from .stabilizer import (generate_group, graph_stabilizer_generators, graph_state, local_unitary_constraint_check,
                         pauli_symmetry_filter, zk_orthogonality_check)
from .tensor import apply_local, random_fully_entangled

ANNIHILATOR_NORM_TOL = 1e-11
LOCC_CAVEAT = ("SEP_1 infeasibility excludes finite-round LOCC built from invertible measurements only; "
               "whether every LOCC conversion lies in SEP_1 is not decided here")
EXAMPLE_TOL = 1e-10


def parse_sweep(text: str) -> list[float]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise formats.InputError(f"--a-sweep expects lo:hi:step, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise formats.InputError("--a-sweep needs step > 0 and hi >= lo")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def _a_values(args) -> list[float | None]:
    if getattr(args, "a_sweep", None):
        return parse_sweep(args.a_sweep)
    return [args.a]


def _sweep(fn, values):
    """Run ``fn`` over parameter values in parallel; output keeps input order."""
    if len(values) == 1:
        return [fn(values[0])]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(fn, values))


def _wrap(values, results):
    if len(values) == 1:
        return results[0]
    return [{"a": a, "report": r} for a, r in zip(values, results)]


def cmd_check_sep1(args):
    data = formats.load_json(args.instance)
    values = _a_values(args)

    def run(a):
        inst, _ = formats.instance_from_json(data, a)
        rep = sep1_feasible(inst, tol=args.tol)
        out = formats.feasibility_report_to_json(rep, inst.labels)
        out["caveat"] = LOCC_CAVEAT
        return out, rep.verdict is Verdict.FEASIBLE

    out = _sweep(run, values)
    return _wrap(values, [o[0] for o in out]), all(o[1] for o in out)


def cmd_check_witness(args):
    data = formats.load_json(args.instance)
    inst, ex = formats.instance_from_json(data, args.a)
    if args.witness:
        w = formats.witness_from_json(formats.load_json(args.witness))
    elif ex is not None:
        w = ex.witness()
    else:
        raise formats.InputError("--witness is required for explicit instances")
    rep = sep_witness_check(inst, w, tol=args.tol)
    return formats.feasibility_report_to_json(rep, inst.labels), rep.verdict is Verdict.FEASIBLE


def cmd_obstruction(args):
    data = formats.load_json(args.instance)
    values = _a_values(args)

    def run(a):
        inst, _ = formats.instance_from_json(data, a)
        if inst.pauli_group is None:
            raise formats.InputError("obstruction needs a Pauli symmetry group (graph or pauli_generators)")
        obs = pauli_trace_obstruction(inst.H, inst.pauli_group, inst.r, inst.G, tol=args.tol)
        report = {
            "obstruction": [[str(p), formats.complex_to_json(v)] for p, v in obs],
            "sep1_refuted": bool(obs),
            "argument": "conjugation by an abelian Pauli group fixes each group element, "
                        "so any SEP_1 witness on the group forces tr(H P) = r tr(G P)",
        }
        return report, not obs

    out = _sweep(run, values)
    return _wrap(values, [o[0] for o in out]), all(o[1] for o in out)


def cmd_trace_monotone(args):
    inst, _ = formats.instance_from_json(formats.load_json(args.instance), args.a)
    rep = trace_monotone_check(inst, tol=args.tol)
    return formats.monotone_report_to_json(rep), rep.sep_possible


def _verify_example(which, a):
    ex = build_example(which, a)
    v = verify_sep_map(ex.map, ex.psi, ex.final_state)
    report = formats.map_verdict_to_json(v)
    ann = v.annihilator_norms()
    ok = (v.deterministic and v.completeness_residual < EXAMPLE_TOL and v.output_residual < EXAMPLE_TOL
          and len(ann) == 4 and max(ann) < ANNIHILATOR_NORM_TOL)
    return {"which": which, "a": a, "verified": ok, **report}, ok


def cmd_verify_example(args):
    values = _a_values(args)
    if values == [None]:
        raise formats.InputError("verify-example needs --a or --a-sweep")
    out = _sweep(lambda a: _verify_example(args.which, a), values)
    return _wrap(values, [o[0] for o in out]), all(o[1] for o in out)


def cmd_symmetry_audit(args):
    graph = formats.graph_from_json(formats.load_json(args.graph))
    psi = graph_state(graph)
    gens = graph_stabilizer_generators(graph)
    group = generate_group(gens, n=graph.n)
    gen_resid = max((np.linalg.norm(apply_local(k.to_local_operator(), psi).amps - psi.amps) for k in gens),
                    default=0.0)
    rho = psi.projector()
    mix = sum(t.matrix() for t in group) / 2**graph.n
    rho_resid = float(np.abs(rho - mix).max())
    zk = zk_orthogonality_check(psi)
    report = {
        "n": graph.n,
        "group_size": len(group),
        "group": [str(p) for p in group],
        "generator_residual": float(gen_resid),
        "rho_vs_group_average": rho_resid,
        "zk_orthogonality": formats.orthogonality_report_to_json(zk),
    }
    ok = gen_resid < 1e-12 and rho_resid < 1e-12 and zk.passed
    if graph.n <= 5:
        syms = pauli_symmetry_filter(psi, graph.n)
        equal = set(syms) == set(group.elements)
        report["pauli_symmetries"] = len(syms)
        report["symmetries_equal_group"] = equal
        ok = ok and equal
    if graph.n == 5:
        cons = local_unitary_constraint_check(psi, gens)
        report["local_unitary_constraints"] = formats.constraint_report_to_json(cons)
        ok = ok and cons.passed
    report["passed"] = ok
    return report, ok


def cmd_locc_run(args):
    proto = formats.protocol_from_json(formats.load_json(args.protocol))
    state = formats.state_from_json(formats.load_json(args.state))
    leaves = run_protocol(proto, state)
    total = sum(l.prob for l in leaves)
    report = {"total_prob": total, "leaves": formats.leaves_to_json(leaves)}
    ok = abs(total - 1) < 1e-10
    if args.flatten:
        try:
            sep = regular_protocol_to_sep1(proto)
            report["flattened"] = {"kraus": len(sep.kraus), "labels": sep.labels,
                                   "completeness_residual": sep.completeness_residual()}
        except SingularMeasurement as exc:
            report["flattened"] = {"refused": str(exc), "path": list(exc.path), "outcome": exc.outcome,
                                   "caveat": LOCC_CAVEAT}
            ok = False
    return report, ok


def cmd_singular_branch(args):
    if args.trials:
        rng = np.random.default_rng(args.seed)
        dims = tuple(int(x) for x in args.dims.split(","))
        trials = []
        for _ in range(args.trials):
            psi = random_fully_entangled(dims, rng)
            rep = singular_branch_analysis(random_one_site_singular(dims, rng), psi)
            trials.append(rep)
        bad = [k for k, r in enumerate(trials) if not (r.branch_norm > 1e-6 and r.rank_deficient)]
        report = {"dims": list(dims), "seed": args.seed, "trials": args.trials,
                  "min_branch_norm": min(r.branch_norm for r in trials), "failures": bad}
        return report, not bad
    if not (args.op and args.state):
        raise formats.InputError("singular-branch needs --op and --state, or --trials")
    op = formats.operator_from_json(formats.load_json(args.op))
    state = formats.state_from_json(formats.load_json(args.state))
    rep = singular_branch_analysis(op, state)
    return formats.branch_report_to_json(rep), rep.consistent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=fn)
        p.add_argument("--tol", type=float, default=1e-9)
        return p

    for name, fn, help, sweep in (
        ("check-sep1", cmd_check_sep1, "decide the SEP_1 condition by linear programming", True),
        ("check-witness", cmd_check_witness, "verify a SEP witness", False),
        ("obstruction", cmd_obstruction, "Pauli-trace obstruction to SEP_1", True),
        ("trace-monotone", cmd_trace_monotone, "tr G >= tr H test for unitary stabilizers", False),
    ):
        p = add(name, fn, help)
        p.add_argument("--instance", required=True)
        p.add_argument("--a", type=float)
        if sweep:
            p.add_argument("--a-sweep")
        if name == "check-witness":
            p.add_argument("--witness")

    p = add("verify-example", cmd_verify_example, "verify the 5- or 3-qubit example map")
    p.add_argument("--which", choices=["5q", "3q"], required=True)
    p.add_argument("--a", type=float)
    p.add_argument("--a-sweep")

    p = add("symmetry-audit", cmd_symmetry_audit, "Pauli symmetries and stabilizer certification of a graph state")
    p.add_argument("--graph", required=True)

    p = add("locc-run", cmd_locc_run, "enumerate branches of a finite LOCC protocol")
    p.add_argument("--protocol", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--flatten", action="store_true")

    p = add("singular-branch", cmd_singular_branch, "branch left by a one-site-singular operator")
    p.add_argument("--op")
    p.add_argument("--state")
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--dims", default="2,2,2")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, ok = args.func(args)
    except (formats.InputError, ProtocolError, ValueError, IndexError) as exc:
        print(f"sepconv {args.command}: {exc}", file=sys.stderr)
        return 2
    print(formats.dumps(report))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
