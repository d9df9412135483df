"""Separable maps that use zero-probability projections, and a Kraus-map verifier.

Two ring-graph-state examples are built here. Both send the ring state to
``h|psi>`` with

    H = h^dagger h = (1/2 + aZ) (x) (1/2 + aX) (x) (1/2 + aZ) [(x) 1/2 (x) 1/2],

using four projections that annihilate the input plus four branches
``M5, M5 A1, M5 A3, M5 A1 A3``. No map with only invertible Kraus factors
achieves the 5-qubit conversion.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .feasibility import ConversionInstance, SepWitness
from .stabilizer import Graph, PauliGroup, generate_group, graph_state, pauli_matrix, ring_stabilizer_generators
from .tensor import LocalOperator, PureState, apply_local, hermitian_sqrt, is_fully_entangled

ANNIHILATE_TOL = 1e-10
COLLINEAR_TOL = 1e-8

_I = np.eye(2, dtype=complex)
_X = pauli_matrix("X")
_Z = pauli_matrix("Z")

# (site-0 sign of Z, site-1 sign of X, site-2 sign of Z) for Q1..Q4
_PROJECTOR_SIGNS = ((1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, -1))


@dataclass
class SepMap:
    kraus: list[LocalOperator]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"K{k + 1}" for k in range(len(self.kraus))]
        if len(self.labels) != len(self.kraus):
            raise ValueError("one label per Kraus operator")
        dims = {k.dims for k in self.kraus}
        if len(dims) > 1:
            raise ValueError(f"Kraus operators with mixed dims {dims}")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.kraus[0].dims

    def completeness_defect(self) -> np.ndarray:
        total = sum(k.gram().matrix() for k in self.kraus)
        return total - np.eye(total.shape[0])

    def completeness_residual(self) -> float:
        return float(np.abs(self.completeness_defect()).max())

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho, dtype=complex)
        for k in self.kraus:
            m = k.matrix()
            out += m @ rho @ m.conj().T
        return out

    def all_invertible(self, rel_tol: float = 1e-10) -> bool:
        return all(k.is_invertible(rel_tol) for k in self.kraus)


@dataclass
class ExampleInstance:
    which: str
    a: float
    psi: PureState
    h: LocalOperator
    H: LocalOperator
    map: SepMap
    projectors: list[LocalOperator]
    group: PauliGroup

    @property
    def final_state(self) -> PureState:
        return apply_local(self.h, self.psi).normalized()

    def conversion_instance(self) -> ConversionInstance:
        """``g = 1`` and the Pauli stabilizer as symmetry list.

        The list is complete for the 5-ring; the 3-ring has further
        non-Pauli symmetries.
        """
        syms = tuple(p.to_local_operator() for p in self.group)
        labels = tuple(self.group.label(m) for m in range(len(self.group)))
        return ConversionInstance(self.psi, LocalOperator.identity(self.psi.dims), self.h, syms,
                                  symmetries_complete=self.which == "5q", labels=labels,
                                  pauli_group=self.group)

    def witness(self) -> SepWitness:
        """Branch weights on ``1, A1, A3, A1 A3`` plus the four annihilating Kraus operators."""
        inst = self.conversion_instance()
        gpsi = inst.initial_state()
        probs, syms = [], []
        for k, op in enumerate(self.map.kraus[4:]):
            probs.append((apply_local(op, gpsi).norm() / gpsi.norm()) ** 2)
            syms.append((0, 1, 4, 5)[k])  # bitmasks of 1, A1, A3, A1*A3
        probs = np.array(probs)
        return SepWitness(probs / probs.sum(), tuple(syms), tuple(self.map.kraus[:4]))


def _check_a(a: float):
    if not 0 < a < 0.5:
        raise ValueError(f"parameter a={a} must lie strictly inside (0, 1/2)")


def _three_site_projectors() -> list[list[np.ndarray]]:
    out = []
    for sz0, sx1, sz2 in _PROJECTOR_SIGNS:
        out.append([(_I + sz0 * _Z) / 2, (_I + sx1 * _X) / 2, (_I + sz2 * _Z) / 2])
    return out


def build_projectors_5q() -> list[LocalOperator]:
    return [LocalOperator(tuple(f + [_I, _I])) for f in _three_site_projectors()]


def build_projectors_3q() -> list[LocalOperator]:
    return [LocalOperator(tuple(f)) for f in _three_site_projectors()]


def _target_gram_factors(a: float, n: int) -> list[np.ndarray]:
    return [_I / 2 + a * _Z, _I / 2 + a * _X, _I / 2 + a * _Z] + [_I / 2] * (n - 3)


def _ring_example(which: str, a: float, n: int, c_q: float, c_q4: float, c_5: float) -> ExampleInstance:
    psi = graph_state(Graph.ring(n))
    H = LocalOperator(tuple(_target_gram_factors(a, n)))
    h = LocalOperator(tuple(hermitian_sqrt(f) for f in H.factors))
    projs = build_projectors_5q() if n == 5 else build_projectors_3q()
    gens = ring_stabilizer_generators(n)
    a1, a3 = gens[0].to_local_operator(), gens[2].to_local_operator()
    kraus = [(h @ q).scaled(c_q) for q in projs[:3]] + [(h @ projs[3]).scaled(c_q4)]
    m5 = h.scaled(c_5)
    kraus += [m5, m5 @ a1, m5 @ a3, m5 @ a1 @ a3]
    labels = ["M1", "M2", "M3", "M4", "M5", "M5*A1", "M5*A3", "M5*A1*A3"]
    return ExampleInstance(which, a, psi, h, H, SepMap(kraus, labels), projs, generate_group(gens))


def build_five_qubit_example(a: float) -> ExampleInstance:
    _check_a(a)
    d = 1 / 8 + a**3
    c_q = 2 * np.sqrt(2 * a**3 / ((0.5 + a) ** 2 * (0.5 - a) * d))
    c_q4 = 2 * np.sqrt(2 * a**3 / ((0.5 - a) ** 3 * d))
    c_5 = np.sqrt(1 / d)
    return _ring_example("5q", a, 5, c_q, c_q4, c_5)


def build_three_qubit_example(a: float) -> ExampleInstance:
    _check_a(a)
    d = 1 / 8 + a**3
    c_q = np.sqrt(2 * a**3 / ((0.5 + a) ** 2 * (0.5 - a) * d))
    c_q4 = np.sqrt(2 * a**3 / ((0.5 - a) ** 3 * d))
    c_5 = 0.5 * np.sqrt(1 / d)
    return _ring_example("3q", a, 3, c_q, c_q4, c_5)


def build_example(which: str, a: float) -> ExampleInstance:
    builders = {"5q": build_five_qubit_example, "3q": build_three_qubit_example}
    if which not in builders:
        raise ValueError(f"unknown example {which!r}; choose from {sorted(builders)}")
    return builders[which](a)


@dataclass
class Branch:
    label: str
    prob: float
    norm: float
    cls: str


@dataclass
class MapVerdict:
    branches: list[Branch]
    completeness_residual: float
    total_prob: float
    output_residual: float
    initial_fully_entangled: bool
    final_fully_entangled: bool
    deterministic: bool

    @property
    def complete(self) -> bool:
        return self.completeness_residual < ANNIHILATE_TOL

    def annihilator_norms(self) -> list[float]:
        return [b.norm for b in self.branches if b.cls == "annihilates"]


def verify_sep_map(map: SepMap, initial: PureState, final: PureState,
                   tol: float = ANNIHILATE_TOL, collinear_tol: float = COLLINEAR_TOL) -> MapVerdict:
    """Sort every Kraus branch into reaches-final, annihilates or OTHER.

    The map is deterministic iff it is complete, no branch is OTHER and the
    reaching branches carry total probability 1.
    """
    for name, s in (("initial", initial), ("final", final)):
        if not s.is_normalized(1e-10):
            raise ValueError(f"{name} state is not normalized")
    branches = []
    for label, op in zip(map.labels, map.kraus):
        out = apply_local(op, initial)
        nrm = out.norm()
        if nrm <= tol:
            branches.append(Branch(label, 0.0, nrm, "annihilates"))
        elif abs(final.inner(out)) >= (1 - collinear_tol) * nrm:
            branches.append(Branch(label, nrm**2, nrm, "reaches-final"))
        else:
            branches.append(Branch(label, nrm**2, nrm, "OTHER"))
    total = sum(b.prob for b in branches if b.cls == "reaches-final")
    resid = map.completeness_residual()
    output = map.apply(initial.projector())
    out_resid = float(np.abs(output - final.projector()).max())
    det = resid < tol and all(b.cls != "OTHER" for b in branches) and abs(total - 1) < tol
    return MapVerdict(branches, resid, total, out_resid,
                      is_fully_entangled(initial), is_fully_entangled(final), det)
