"""JSON file formats and report serialization.

Complex numbers are ``[re, im]`` pairs and matrices are lists of rows. Site and
vertex numbers in files are 1-based.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .feasibility import ConversionInstance, FeasibilityReport, MonotoneReport, SepWitness
from .kraus import ExampleInstance, MapVerdict, build_example
from .locc import BranchReport, Leaf, LoccProtocol, LoccRound
from .stabilizer import ConstraintReport, Graph, OrthogonalityReport, PauliString, generate_group, \
    graph_stabilizer_generators, graph_state
from .tensor import LocalOperator, PureState


class InputError(ValueError):
    """Malformed input file."""


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if not (isinstance(v, list) and len(v) == 2):
        raise InputError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[complex_from_json(z) for z in row] for row in rows], dtype=complex)
    except TypeError as exc:
        raise InputError(f"malformed matrix: {exc}") from exc


def state_to_json(s: PureState) -> dict:
    return {"dims": list(s.dims), "amps": [complex_to_json(z) for z in s.amps]}


def state_from_json(d: dict) -> PureState:
    try:
        return PureState(tuple(d["dims"]), [complex_from_json(z) for z in d["amps"]])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed state: {exc}") from exc


def operator_to_json(op: LocalOperator) -> dict:
    return {"factors": [matrix_to_json(f) for f in op.factors]}


def operator_from_json(d: dict) -> LocalOperator:
    try:
        return LocalOperator(tuple(matrix_from_json(f) for f in d["factors"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed operator: {exc}") from exc


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u + 1, v + 1] for u, v in sorted(g.edges)]}


def graph_from_json(d: dict) -> Graph:
    try:
        return Graph(int(d["n"]), frozenset((int(u) - 1, int(v) - 1) for u, v in d["edges"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graph: {exc}") from exc


def witness_to_json(w: SepWitness, labels=None) -> dict:
    out = {"probs": [float(p) for p in w.probs], "syms": list(w.syms)}
    if labels is not None:
        out["labels"] = [labels[k] for k in w.syms]
    out["annihilators"] = [operator_to_json(n) for n in w.annihilators]
    return out


def witness_from_json(d: dict) -> SepWitness:
    try:
        return SepWitness(d["probs"], d["syms"], tuple(operator_from_json(n) for n in d.get("annihilators", [])))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed witness: {exc}") from exc


def instance_from_json(d: dict, a: float | None = None) -> tuple[ConversionInstance, ExampleInstance | None]:
    """Either ``{"example": "5q"|"3q", "a": ...}`` or an explicit instance.

    Explicit instances give ``psi`` (a state) or ``graph``, an ``h`` and
    optionally ``g``, plus ``symmetries`` (operators) or ``pauli_generators``
    (strings). A graph without symmetry data uses its stabilizer generators.
    """
    if "example" in d:
        a = a if a is not None else d.get("a")
        if a is None:
            raise InputError("example instance needs a parameter a (file field or --a)")
        ex = build_example(d["example"], float(a))
        return ex.conversion_instance(), ex
    try:
        if "graph" in d:
            graph = graph_from_json(d["graph"])
            psi = graph_state(graph)
        else:
            graph = None
            psi = state_from_json(d["psi"])
        g = operator_from_json(d["g"]) if "g" in d else LocalOperator.identity(psi.dims)
        h = operator_from_json(d["h"])
        group = None
        if "symmetries" in d:
            syms = tuple(operator_from_json(s) for s in d["symmetries"])
            labels = None
        else:
            if "pauli_generators" in d:
                gens = [PauliString.parse(t) for t in d["pauli_generators"]]
            elif graph is not None:
                gens = graph_stabilizer_generators(graph)
            else:
                raise InputError("instance needs symmetries, pauli_generators or a graph")
            group = generate_group(gens, n=psi.n_sites)
            syms = tuple(p.to_local_operator() for p in group)
            labels = tuple(str(p) for p in group)
        inst = ConversionInstance(psi, g, h, syms, bool(d.get("symmetries_complete", False)),
                                  labels, group)
    except KeyError as exc:
        raise InputError(f"instance missing field {exc}") from exc
    return inst, None


def _round_from_json(d: dict | None, dims) -> LoccRound | None:
    if d is None:
        return None
    try:
        site = int(d["site"]) - 1
        ops = [matrix_from_json(m) for m in d["ops"]]
        corr = None
        if "corrections" in d:
            corr = [{int(s) - 1: matrix_from_json(u) for s, u in c.items()} for c in d["corrections"]]
        children = None
        if "children" in d:
            children = [_round_from_json(c, dims) for c in d["children"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed protocol node: {exc}") from exc
    if not 0 <= site < len(dims):
        raise InputError(f"site {site + 1} out of range")
    return LoccRound(site, ops, corr, children)


def protocol_from_json(d: dict) -> LoccProtocol:
    """``{"dims": [...], "root": node}``; node ``{"site", "ops", "corrections"?, "children"?}``."""
    try:
        dims = tuple(int(x) for x in d["dims"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed protocol: {exc}") from exc
    return LoccProtocol(dims, _round_from_json(d.get("root"), dims))


def _round_to_json(node: LoccRound | None):
    if node is None:
        return None
    out = {"site": node.site + 1, "ops": [matrix_to_json(p) for p in node.measurement_ops]}
    if any(node.conditional_unitaries):
        out["corrections"] = [{str(s + 1): matrix_to_json(u) for s, u in sorted(c.items())}
                              for c in node.conditional_unitaries]
    if any(c is not None for c in node.children):
        out["children"] = [_round_to_json(c) for c in node.children]
    return out


def protocol_to_json(proto: LoccProtocol) -> dict:
    return {"dims": list(proto.dims), "root": _round_to_json(proto.root)}


# reports

def feasibility_report_to_json(rep: FeasibilityReport, labels=None) -> dict:
    out = {"verdict": rep.verdict.value, "residual": float(rep.residual)}
    out["witness"] = witness_to_json(rep.witness, labels) if rep.witness is not None else None
    out["obstruction"] = ([[str(p), complex_to_json(v)] for p, v in rep.obstruction]
                          if rep.obstruction is not None else None)
    out["farkas"] = [float(v) for v in rep.farkas] if rep.farkas is not None else None
    if rep.annihilator_weight is not None:
        out["annihilator_weight"] = rep.annihilator_weight
        out["annihilator_norms"] = [float(v) for v in rep.annihilator_norms]
    out["notes"] = list(rep.notes)
    return out


def monotone_report_to_json(rep: MonotoneReport) -> dict:
    return {"verdict": rep.verdict, "trace_G": rep.trace_G, "trace_H": rep.trace_H,
            "g_scale": rep.g_scale, "h_scale": rep.h_scale,
            "sep_possible": rep.sep_possible, "equality_case": rep.equality_case}


def map_verdict_to_json(v: MapVerdict) -> dict:
    return {
        "deterministic": v.deterministic,
        "completeness_residual": v.completeness_residual,
        "output_residual": v.output_residual,
        "total_prob": v.total_prob,
        "initial_fully_entangled": v.initial_fully_entangled,
        "final_fully_entangled": v.final_fully_entangled,
        "branches": [{"label": b.label, "prob": b.prob, "norm": b.norm, "class": b.cls} for b in v.branches],
    }


def constraint_report_to_json(rep: ConstraintReport) -> dict:
    return {
        "passed": rep.passed,
        "site0_constrained": rep.site0_constrained,
        "stabilizer_terms_match": rep.stabilizer_terms_match,
        "required": {k: [t, complex_to_json(v)] for k, (t, v) in rep.required.items()},
        "coefficients": {k: {p: complex_to_json(v) for p, v in sorted(c.items())}
                         for k, c in rep.coefficients.items()},
        "note": rep.note,
    }


def orthogonality_report_to_json(rep: OrthogonalityReport) -> dict:
    return {"passed": rep.passed, "max_overlap": rep.max_overlap, "tol": rep.tol,
            "overlaps": dict(sorted(rep.overlaps.items()))}


def branch_report_to_json(rep: BranchReport) -> dict:
    return {"case": rep.case, "singular_sites": [s + 1 for s in rep.singular_sites],
            "branch_norm": rep.branch_norm, "ranks": rep.ranks,
            "rank_deficient": rep.rank_deficient, "consistent": rep.consistent}


def leaves_to_json(leaves: list[Leaf]) -> list[dict]:
    return [{"path": list(l.path), "prob": l.prob,
             "state": state_to_json(l.state) if l.state is not None else None} for l in leaves]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)
