"""Feasibility of pure-state conversions ``g|psi> -> h|psi>`` under SEP_1 and SEP.

SEP_1 (all Kraus factors invertible) is decided by a linear program over
probabilities on a finite symmetry list:

    sum_k p_k S_k^dagger H S_k = r G,   r = ||h psi||^2 / ||g psi||^2.

General SEP adds annihilating operators ``N_q`` with ``N_q g|psi> = 0``:

    (1/r) sum_k p_k S_k^dagger H S_k + g^dagger (sum_q N_q^dagger N_q) g = G.

Only certificate checking is offered for the second form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .simplex import phase1
from .stabilizer import PauliGroup, PauliString
from .tensor import LocalOperator, PureState, apply_local

SYMMETRY_TOL = 1e-10
ANNIHILATION_TOL = 1e-10


class Verdict(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    INCONCLUSIVE = "Inconclusive"
    REJECTED = "Rejected"


class NonUnitaryStabilizer(ValueError):
    """A symmetry in the list is not unitary."""


def _hermitian_defect(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


@dataclass(frozen=True, eq=False)
class ConversionInstance:
    """Initial ``g|psi>``, final ``h|psi>`` and a finite list of symmetries of ``psi``.

    ``symmetries_complete`` says whether the list is the whole stabilizer;
    without it an LP infeasibility only means no witness exists on this list.
    ``pauli_group``, if given, is the symmetry list as exact Pauli strings.
    """

    psi: PureState
    g: LocalOperator
    h: LocalOperator
    symmetries: tuple[LocalOperator, ...]
    symmetries_complete: bool = False
    labels: tuple[str, ...] | None = None
    pauli_group: PauliGroup | None = None

    def __post_init__(self):
        object.__setattr__(self, "symmetries", tuple(self.symmetries))
        for name, op in (("g", self.g), ("h", self.h)):
            if op.dims != self.psi.dims:
                raise ValueError(f"{name} has dims {op.dims}, state has {self.psi.dims}")
            if not op.is_invertible(1e-12):
                raise ValueError(f"{name} has a singular factor at sites {op.singular_sites(1e-12)}")
        for k, s in enumerate(self.symmetries):
            if s.dims != self.psi.dims:
                raise ValueError(f"symmetry {k} has dims {s.dims}")
            defect = np.linalg.norm(apply_local(s, self.psi).amps - self.psi.amps)
            if defect >= SYMMETRY_TOL * max(1.0, self.psi.norm()):
                raise ValueError(f"symmetry {k} moves psi by {defect:.3e}")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"S{k}" for k in range(len(self.symmetries))))

    @property
    def G(self) -> np.ndarray:
        return self.g.gram().matrix()

    @property
    def H(self) -> np.ndarray:
        return self.h.gram().matrix()

    @property
    def r(self) -> float:
        return apply_local(self.h, self.psi).norm() ** 2 / apply_local(self.g, self.psi).norm() ** 2

    def initial_state(self) -> PureState:
        return apply_local(self.g, self.psi)

    def final_state(self) -> PureState:
        return apply_local(self.h, self.psi)

    def twirled_terms(self) -> list[np.ndarray]:
        """``S_k^dagger H S_k`` for every listed symmetry."""
        H = self.H
        out = []
        for s in self.symmetries:
            m = s.matrix()
            out.append(m.conj().T @ H @ m)
        return out


@dataclass
class SepWitness:
    probs: np.ndarray
    syms: tuple[int, ...]
    annihilators: tuple[LocalOperator, ...] = ()

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size != len(self.syms):
            raise ValueError("one probability per symmetry index is required")
        if p.size and p.min() < -1e-14:
            raise ValueError(f"negative probability {p.min()}")
        if abs(p.sum() - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()}")
        self.probs = np.clip(p, 0, None)
        self.syms = tuple(int(k) for k in self.syms)
        self.annihilators = tuple(self.annihilators)
        for q, n in enumerate(self.annihilators):
            if not n.singular_sites():
                raise ValueError(f"annihilator {q} has no singular factor")


@dataclass
class FeasibilityReport:
    verdict: Verdict
    residual: float
    witness: SepWitness | None = None
    obstruction: list | None = None
    farkas: np.ndarray | None = None
    annihilator_weight: float | None = None
    annihilator_norms: list | None = None
    notes: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.verdict == Verdict.FEASIBLE


def _vectorize_hermitian(m: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix: Re of the upper triangle, Im of the strict upper triangle."""
    iu = np.triu_indices(m.shape[0])
    ius = np.triu_indices(m.shape[0], 1)
    return np.concatenate([m[iu].real, m[ius].imag])


def sep1_system(inst: ConversionInstance) -> tuple[np.ndarray, np.ndarray]:
    """Equality system ``A p = b`` for the SEP_1 condition, last row ``sum p = 1``."""
    G, r = inst.G, inst.r
    terms = inst.twirled_terms()
    for m in (G, *terms):
        if _hermitian_defect(m) > 1e-10 * max(1.0, np.abs(m).max()):
            raise ValueError("non-Hermitian Gram matrix")
    A = np.column_stack([_vectorize_hermitian(t) for t in terms])
    A = np.vstack([A, np.ones(len(terms))])
    b = np.concatenate([_vectorize_hermitian(r * G), [1.0]])
    return A, b


def sep1_residual(inst: ConversionInstance, probs: Sequence[float], syms: Sequence[int]) -> float:
    H, G, r = inst.H, inst.G, inst.r
    lhs = np.zeros_like(G)
    for p, k in zip(probs, syms):
        s = inst.symmetries[k].matrix()
        lhs += p * (s.conj().T @ H @ s)
    return float(np.abs(lhs - r * G).max())


def sep1_feasible(inst: ConversionInstance, tol: float = 1e-9) -> FeasibilityReport:
    """Decide the SEP_1 condition on the instance's symmetry list by phase-1 simplex."""
    if not inst.symmetries:
        raise ValueError("symmetry list is empty")
    A, b = sep1_system(inst)
    res = phase1(A, b, tol=tol)
    notes = []
    obstruction = None
    if inst.pauli_group is not None:
        obstruction = pauli_trace_obstruction(inst.H, inst.pauli_group, inst.r, inst.G, tol=tol)
    if res.feasible:
        keep = [k for k in range(len(res.x)) if res.x[k] > 0]
        p = res.x[keep]
        p = p / p.sum()
        w = SepWitness(p, tuple(keep))
        resid = sep1_residual(inst, w.probs, w.syms)
        verdict = Verdict.FEASIBLE if resid < tol else Verdict.INCONCLUSIVE
        if verdict is Verdict.INCONCLUSIVE:
            notes.append(f"solver point fails independent re-check (residual {resid:.3e})")
        return FeasibilityReport(verdict, resid, witness=w, obstruction=obstruction, notes=notes)
    verdict = Verdict.INFEASIBLE
    if not inst.symmetries_complete:
        verdict = Verdict.INCONCLUSIVE
        notes.append("symmetry list is a finite subset of the stabilizer; "
                     "infeasibility holds only for this subset")
    return FeasibilityReport(verdict, res.infeasibility, obstruction=obstruction,
                             farkas=res.farkas, notes=notes)


def pauli_trace_obstruction(H_global: np.ndarray, group: PauliGroup, r: float,
                            G_global: np.ndarray, tol: float = 1e-9) -> list[tuple[PauliString, complex]]:
    """Group elements ``P != 1`` with ``tr(H P) != r tr(G P)``.

    Conjugation by an abelian Pauli group fixes every group element, so
    ``tr(S^dagger H S P) = tr(H P)`` for all ``S`` in the group and the
    SEP_1 condition forces ``tr(H P) = r tr(G P)``. Any listed element is a
    certificate that no witness on this group exists.
    """
    if any(p.phase % 2 for p in group):
        raise ValueError("obstruction needs Hermitian group elements (phases +1 or -1)")
    for m in (H_global, G_global):
        if _hermitian_defect(m) > 1e-10 * max(1.0, np.abs(m).max()):
            raise ValueError("non-Hermitian input")
    out = []
    for p in group:
        if p.is_identity():
            continue
        pm = p.matrix()
        defect = complex(np.trace(H_global @ pm) - r * np.trace(G_global @ pm))
        if abs(defect) > tol:
            out.append((p, defect))
    return out


def sep_witness_check(inst: ConversionInstance, w: SepWitness, tol: float = 1e-9) -> FeasibilityReport:
    """Evaluate the SEP condition globally for a supplied witness."""
    if any(k < 0 or k >= len(inst.symmetries) for k in w.syms):
        raise IndexError(f"witness references symmetries {w.syms} of {len(inst.symmetries)}")
    G, H, r = inst.G, inst.H, inst.r
    g = inst.g.matrix()
    lhs = np.zeros_like(G)
    for p, k in zip(w.probs, w.syms):
        s = inst.symmetries[k].matrix()
        lhs += p * (s.conj().T @ H @ s) / r
    gpsi = inst.initial_state()
    ann_part = np.zeros_like(G)
    norms = []
    for n in w.annihilators:
        norms.append(apply_local(n, gpsi).norm())
        nm = n.matrix()
        ann_part += nm.conj().T @ nm
    ann_part = g.conj().T @ ann_part @ g
    lhs += ann_part
    resid = float(np.abs(lhs - G).max())
    weight = float(np.trace(ann_part).real)
    notes = []
    ok = resid < tol
    bad = [q for q, v in enumerate(norms) if v >= ANNIHILATION_TOL]
    if bad:
        ok = False
        notes.append(f"operators {bad} do not annihilate the initial state")
    verdict = Verdict.FEASIBLE if ok else Verdict.REJECTED
    return FeasibilityReport(verdict, resid, witness=w, annihilator_weight=weight,
                             annihilator_norms=norms, notes=notes)


@dataclass
class MonotoneReport:
    trace_G: float
    trace_H: float
    g_scale: float
    h_scale: float
    sep_possible: bool
    equality_case: bool

    @property
    def verdict(self) -> str:
        if not self.sep_possible:
            return "SEP impossible"
        return "equality case: SEP iff SEP_1" if self.equality_case else "inconclusive"


def trace_monotone_check(inst: ConversionInstance, tol: float = 1e-9) -> MonotoneReport:
    """Necessary condition ``tr G >= tr H`` for normalized states and unitary stabilizer."""
    for k, s in enumerate(inst.symmetries):
        if not s.is_unitary(1e-10):
            raise NonUnitaryStabilizer(f"symmetry {inst.labels[k]} is not unitary")
    g_scale = 1.0 / inst.initial_state().norm()
    h_scale = 1.0 / inst.final_state().norm()
    trG = float(np.prod([np.trace(f).real for f in inst.g.gram().factors])) * g_scale**2
    trH = float(np.prod([np.trace(f).real for f in inst.h.gram().factors])) * h_scale**2
    return MonotoneReport(trG, trH, g_scale, h_scale, trG >= trH - tol, abs(trG - trH) < tol)
