"""Finite-round LOCC protocol trees and the singular-measurement argument.

A protocol is a tree of rounds. In each round one site measures with
operators ``P_i`` and every other site applies an outcome-dependent unitary;
the Kraus operator of a leaf is the right-to-left product of the round
operators along its path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .kraus import SepMap
from .tensor import LocalOperator, PureState, apply_local, is_fully_entangled, reduced_ranks

SINGULAR_REL_TOL = 1e-10
COMPLETENESS_TOL = 1e-10


class ProtocolError(ValueError):
    pass


class SingularMeasurement(ProtocolError):
    """A round uses a non-invertible measurement operator."""

    def __init__(self, path, outcome, smin):
        self.path = tuple(path)
        self.outcome = outcome
        self.smin = smin
        super().__init__(f"round at path {self.path}: measurement operator {outcome} is singular "
                         f"(relative smallest singular value {smin:.3e})")


@dataclass
class LoccRound:
    """One measurement node; ``children[i]`` continues after outcome ``i``."""

    site: int
    measurement_ops: list[np.ndarray]
    conditional_unitaries: list[dict[int, np.ndarray]] | None = None
    children: list["LoccRound | None"] | None = None

    def __post_init__(self):
        self.measurement_ops = [np.asarray(p, dtype=complex) for p in self.measurement_ops]
        k = len(self.measurement_ops)
        if k == 0:
            raise ProtocolError("a round needs at least one measurement operator")
        if self.conditional_unitaries is None:
            self.conditional_unitaries = [{} for _ in range(k)]
        if self.children is None:
            self.children = [None] * k
        if len(self.conditional_unitaries) != k or len(self.children) != k:
            raise ProtocolError("corrections and children must have one entry per outcome")
        d = self.measurement_ops[0].shape[0]
        total = sum(p.conj().T @ p for p in self.measurement_ops)
        defect = np.abs(total - np.eye(d)).max()
        if defect > COMPLETENESS_TOL:
            raise ProtocolError(f"measurement at site {self.site} is incomplete (defect {defect:.3e})")
        for corr in self.conditional_unitaries:
            for s, u in corr.items():
                u = np.asarray(u, dtype=complex)
                if s == self.site:
                    raise ProtocolError("the measuring site cannot also receive a correction")
                if np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() > COMPLETENESS_TOL:
                    raise ProtocolError(f"correction at site {s} is not unitary")

    def round_operator(self, i: int, dims: Sequence[int]) -> LocalOperator:
        facs = [np.eye(d, dtype=complex) for d in dims]
        if self.measurement_ops[i].shape != (dims[self.site],) * 2:
            raise ProtocolError(f"measurement at site {self.site} has wrong shape")
        facs[self.site] = self.measurement_ops[i]
        for s, u in self.conditional_unitaries[i].items():
            facs[s] = np.asarray(u, dtype=complex)
        return LocalOperator(tuple(facs))


@dataclass
class LoccProtocol:
    dims: tuple[int, ...]
    root: LoccRound | None = None

    def leaves(self) -> list[tuple[tuple[int, ...], LocalOperator]]:
        """Every outcome path with its accumulated Kraus operator ``L_m ... L_1``."""
        out = []

        def walk(node, path, acc):
            if node is None:
                out.append((path, acc))
                return
            for i in range(len(node.measurement_ops)):
                walk(node.children[i], path + (i,), node.round_operator(i, self.dims) @ acc)

        walk(self.root, (), LocalOperator.identity(self.dims))
        return out

    def rounds(self):
        """Yield ``(path, node)`` for every round in depth-first order."""
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            if node is None:
                continue
            yield path, node
            for i in reversed(range(len(node.children))):
                stack.append((path + (i,), node.children[i]))


@dataclass
class Leaf:
    path: tuple[int, ...]
    prob: float
    state: PureState | None


def run_protocol(proto: LoccProtocol, initial: PureState) -> list[Leaf]:
    """Outcome paths with probabilities and renormalized branch states (None for probability 0)."""
    if tuple(proto.dims) != initial.dims:
        raise ProtocolError(f"protocol dims {proto.dims} do not match state dims {initial.dims}")
    n2 = initial.norm() ** 2
    out = []

    def walk(node, path, vec):
        if node is None:
            p = vec.norm() ** 2 / n2
            out.append(Leaf(path, p, vec.normalized() if p > 1e-15 else None))
            return
        for i in range(len(node.measurement_ops)):
            walk(node.children[i], path + (i,), apply_local(node.round_operator(i, proto.dims), vec))

    walk(proto.root, (), initial)
    return out


def regular_protocol_to_sep1(proto: LoccProtocol) -> SepMap:
    """Flatten a protocol whose measurements are all invertible into a map with invertible Kraus factors."""
    for path, node in proto.rounds():
        for i, p in enumerate(node.measurement_ops):
            s = np.linalg.svd(p, compute_uv=False)
            smin = s[-1] / s[0] if s[0] > 0 else 0.0
            if smin < SINGULAR_REL_TOL:
                raise SingularMeasurement(path, i, smin)
    leaves = proto.leaves()
    sep = SepMap([k for _, k in leaves], ["".join(str(i) for i in path) or "root" for path, _ in leaves])
    resid = sep.completeness_residual()
    if resid > COMPLETENESS_TOL:
        raise ProtocolError(f"flattened map is incomplete (residual {resid:.3e})")
    return sep


@dataclass
class BranchReport:
    case: str
    singular_sites: list[int]
    branch_norm: float
    ranks: list[int] = field(default_factory=list)
    rank_deficient: bool = False

    @property
    def consistent(self) -> bool:
        """One singular site: the branch survives and leaves the SLOCC class."""
        if self.case != "one-singular-site":
            return True
        return self.branch_norm > 0 and self.rank_deficient


def singular_branch_analysis(op: LocalOperator, state: PureState,
                             rel_tol: float = SINGULAR_REL_TOL) -> BranchReport:
    """Apply an operator to a fully entangled state and inspect the branch.

    Operators singular at zero or several sites are outside the one-site case
    and are reported as such.
    """
    if not is_fully_entangled(state):
        raise ValueError("state is not fully entangled")
    sing = op.singular_sites(rel_tol)
    out = apply_local(op, state)
    nrm = out.norm()
    if len(sing) != 1:
        case = "no-singular-site" if not sing else "multiple-singular-sites"
        ranks = reduced_ranks(out) if nrm > 0 else []
        return BranchReport(case, sing, nrm, ranks, bool(ranks) and ranks != list(state.dims))
    ranks = reduced_ranks(out) if nrm > 0 else [0] * state.n_sites
    deficient = any(r < d for r, d in zip(ranks, state.dims))
    return BranchReport("one-singular-site", sing, nrm, ranks, deficient)


def random_one_site_singular(dims: Sequence[int], rng: np.random.Generator) -> LocalOperator:
    """Random local operator whose factor at one random site has rank ``d - 1``."""
    site = int(rng.integers(len(dims)))
    facs = []
    for i, d in enumerate(dims):
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        if i == site:
            u, s, vh = np.linalg.svd(m)
            s[-1] = 0
            m = (u * s) @ vh
        facs.append(m)
    return LocalOperator(tuple(facs))
