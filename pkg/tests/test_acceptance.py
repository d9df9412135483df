"""Acceptance checks, one per criterion. Each prints a PASS/FAIL line.

The lines are printed past pytest's capture, so a plain ``pytest -v`` shows
them; the file can also be executed directly.
"""
import io
import json
import sys
import time
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pytest

from sepconv.cli import main
from sepconv.feasibility import SepWitness, Verdict, sep1_feasible, sep1_system, sep_witness_check, \
    trace_monotone_check
from sepconv.instances import annihilator_for, random_pair_instance, twirl_instance
from sepconv.kraus import build_five_qubit_example
from sepconv.locc import (LoccProtocol, LoccRound, SingularMeasurement, random_one_site_singular,
                          regular_protocol_to_sep1, run_protocol, singular_branch_analysis)
from sepconv.tensor import random_fully_entangled, random_unitary

DATA = Path(__file__).resolve().parent.parent / "data"
A_VALUES = [0.1, 0.2, 0.3, 0.4]


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line past pytest's output capture."""
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main([str(a) for a in argv])
    return code, json.loads(buf.getvalue())


def test_criterion_1_ring5_stabilizer(report):
    t0 = time.perf_counter()
    code, rep = cli("symmetry-audit", "--graph", DATA / "ring5.json")
    elapsed = time.perf_counter() - t0
    zk = rep["zk_orthogonality"]
    overlaps = list(zk["overlaps"].values())
    ok = (code == 0 and rep["pauli_symmetries"] == 32 and rep["symmetries_equal_group"]
          and len(overlaps) == 31 and max(abs(v) for v in overlaps) < 1e-12
          and rep["rho_vs_group_average"] < 1e-12 and elapsed < 5)
    report(1, ok, f"{rep['pauli_symmetries']} symmetries, max overlap {max(map(abs, overlaps)):.1e}, "
                  f"rho residual {rep['rho_vs_group_average']:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_sep1_infeasible(report):
    details, ok = [], True
    for a in A_VALUES:
        t0 = time.perf_counter()
        code, rep = cli("check-sep1", "--instance", DATA / "five_ring.json", "--a", a)
        code_o, obs = cli("obstruction", "--instance", DATA / "five_ring.json", "--a", a)
        elapsed = time.perf_counter() - t0
        # certificate checked against the system it claims to refute
        A, b = sep1_system(build_five_qubit_example(a).conversion_instance())
        y = np.array(rep["farkas"] or [0.0])
        cert = y.size == b.size and (y @ A).min() >= -1e-9 * np.abs(y).max() and y @ b < 0
        tr_a2 = dict((p, complex(*v)) for p, v in obs["obstruction"]).get("+ZXZII", 0)
        good = (code == 1 and rep["verdict"] == "Infeasible" and cert and code_o == 1
                and abs(tr_a2) > 1e-6 and elapsed < 30)
        ok &= good
        details.append(f"a={a}: {rep['verdict']}, tr(H A2)={tr_a2.real:.4f}, {elapsed:.2f}s")
    report(2, ok, "; ".join(details))
    assert ok


def _example_ok(which):
    details, ok = [], True
    for a in A_VALUES:
        code, rep = cli("verify-example", "--which", which, "--a", a)
        ann = [b["norm"] for b in rep["branches"] if b["class"] == "annihilates"]
        good = (code == 0 and rep["completeness_residual"] < 1e-10 and len(ann) == 4 and max(ann) < 1e-11
                and rep["deterministic"] and rep["output_residual"] < 1e-10)
        ok &= good
        details.append(f"a={a}: completeness {rep['completeness_residual']:.1e}, "
                       f"output {rep['output_residual']:.1e}")
    return ok, "; ".join(details)


def test_criterion_3_sep_witness_5q(report):
    ok, detail = _example_ok("5q")
    report(3, ok, detail)
    assert ok


def test_criterion_4_three_qubits(report):
    ok, detail = _example_ok("3q")
    report(4, ok, detail)
    assert ok


def _weak(rng):
    w = rng.uniform(0.2, 0.8, size=2)
    u = random_unitary(2, rng)
    return [np.diag(np.sqrt(w)) @ u, random_unitary(2, rng) @ np.diag(np.sqrt(1 - w)) @ u]


def test_criterion_5_singular_branch(report):
    rng = np.random.default_rng(5)
    dims_cycle = [(2, 2, 2), (2, 2), (3, 3), (2, 3, 3), (2, 2, 2, 2)]
    min_norm, fails = np.inf, 0
    for k in range(200):
        dims = dims_cycle[k % len(dims_cycle)]
        rep = singular_branch_analysis(random_one_site_singular(dims, rng), random_fully_entangled(dims, rng))
        min_norm = min(min_norm, rep.branch_norm)
        fails += not (rep.case == "one-singular-site" and rep.branch_norm > 1e-6 and rep.rank_deficient)

    refused = 0
    for _ in range(20):
        bad = LoccRound(int(rng.integers(3)), [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        proto = LoccProtocol((2, 2, 2), LoccRound(0, _weak(rng), children=[None, bad]))
        try:
            regular_protocol_to_sep1(proto)
        except SingularMeasurement:
            refused += 1

    worst = 0.0
    for _ in range(20):
        child = LoccRound(2, _weak(rng), [{0: random_unitary(2, rng)}, {}])
        proto = LoccProtocol((2, 2, 2), LoccRound(1, _weak(rng), [{}, {2: random_unitary(2, rng)}], [child, None]))
        psi = random_fully_entangled((2, 2, 2), rng)
        sep = regular_protocol_to_sep1(proto)
        tree = sum(l.prob * l.state.projector() for l in run_protocol(proto, psi))
        worst = max(worst, np.abs(tree - sep.apply(psi.projector())).max())
    ok = fails == 0 and refused == 20 and worst < 1e-10
    report(5, ok, f"200 trials, {fails} failures, min branch norm {min_norm:.2e}; "
                  f"refused {refused}/20; flattening residual {worst:.1e}")
    assert ok


def test_criterion_6_trace_monotone(report):
    rng = np.random.default_rng(6)
    checked, feasible, bad_weight, worst = 0, 0, 0, 0.0
    for _ in range(100):
        known = twirl_instance(rng, "ring5")
        mono = trace_monotone_check(known.inst)
        if not mono.equality_case:
            continue
        checked += 1
        n = annihilator_for(known.element)
        witnesses = [known.witness, SepWitness(known.witness.probs, known.witness.syms, (n.scaled(0.1),))]
        lp = sep1_feasible(known.inst)
        if lp.witness is not None:
            witnesses.append(lp.witness)
        for w in witnesses:
            rep = sep_witness_check(known.inst, w)
            if rep.verdict is Verdict.FEASIBLE:
                feasible += 1
                worst = max(worst, rep.annihilator_weight)
                bad_weight += rep.annihilator_weight >= 1e-10
    impossible = sum(not trace_monotone_check(random_pair_instance(rng)).sep_possible for _ in range(100))
    ok = checked == 100 and feasible >= 100 and bad_weight == 0 and impossible == 100
    report(6, ok, f"{checked} equality-case instances, {feasible} feasible witnesses, "
                  f"max annihilator weight {worst:.1e}; {impossible}/100 tr H > tr G instances SEP-impossible")
    assert ok


def test_criterion_7_lp_soundness(report):
    rng = np.random.default_rng(7)
    graphs = ["ring3", "ring4", "ring5", "line4", "star4"]
    verdicts, worst = [], 0.0
    for k in range(100):
        known = twirl_instance(rng, graphs[k % len(graphs)])
        inst = known.inst
        rep = sep1_feasible(inst)
        verdicts.append(rep.verdict)
        if rep.witness is not None:
            H, G = inst.H, inst.G
            lhs = sum(p * inst.symmetries[j].matrix().conj().T @ H @ inst.symmetries[j].matrix()
                      for p, j in zip(rep.witness.probs, rep.witness.syms))
            worst = max(worst, np.abs(lhs - inst.r * G).max())
    n_feasible = sum(v is Verdict.FEASIBLE for v in verdicts)
    n_infeasible = sum(v is Verdict.INFEASIBLE for v in verdicts)
    ok = n_feasible == 100 and n_infeasible == 0 and worst < 1e-9
    report(7, ok, f"{n_feasible}/100 Feasible, {n_infeasible} Infeasible, max re-checked residual {worst:.1e}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
