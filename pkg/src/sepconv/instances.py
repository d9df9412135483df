"""Randomized conversion instances with known answers.

``twirl_instance`` builds ``G`` as a convex combination ``q H + (1-q) S^dagger H S``
for one stabilizer element ``S`` and keeps ``G`` a product operator by making
``H`` commute with ``S`` everywhere except one site. The known weights give a
SEP_1 witness by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feasibility import ConversionInstance, SepWitness
from .stabilizer import Graph, PauliString, generate_group, graph_stabilizer_generators, graph_state, pauli_matrix
from .tensor import LocalOperator, apply_local, hermitian_sqrt, random_local_unitary, random_unitary

GRAPHS = {
    "ring3": Graph.ring(3),
    "ring4": Graph.ring(4),
    "ring5": Graph.ring(5),
    "line4": Graph(4, frozenset({(0, 1), (1, 2), (2, 3)})),
    "star4": Graph(4, frozenset({(0, 1), (0, 2), (0, 3)})),
}


@dataclass
class KnownInstance:
    inst: ConversionInstance
    witness: SepWitness
    element: PauliString


def _random_pd(rng, d=2, floor=0.2):
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return b @ b.conj().T + floor * np.eye(d)


def _commuting_pd(rng, letter):
    """Positive definite ``alpha 1 + beta sigma`` commuting with a Pauli letter."""
    alpha = rng.uniform(0.5, 1.5)
    beta = rng.uniform(-0.8, 0.8) * alpha
    return alpha * np.eye(2) + beta * pauli_matrix(letter)


def _gram_root(mat, rng):
    """Some ``g`` with ``g^dagger g = mat``: a random unitary times the PSD root."""
    return random_unitary(mat.shape[0], rng) @ hermitian_sqrt(mat)


def twirl_instance(rng: np.random.Generator, graph: Graph | str = "ring5", rotate: bool = True) -> KnownInstance:
    """Constructed-feasible instance on a graph state, normalized so that ``r = 1``."""
    if isinstance(graph, str):
        graph = GRAPHS[graph]
    n = graph.n
    group = generate_group(graph_stabilizer_generators(graph), n=n)
    m = int(rng.integers(1, len(group)))
    el = group.elements[m]
    support = el.support()
    active = int(rng.choice(support))
    H = []
    for i in range(n):
        if i == active or el.letters[i] == "I":
            H.append(_random_pd(rng))
        else:
            H.append(_commuting_pd(rng, el.letters[i]))
    q = float(rng.uniform(0.05, 0.95))
    sig = pauli_matrix(el.letters[active])
    G = list(H)
    G[active] = q * H[active] + (1 - q) * sig @ H[active] @ sig

    psi = graph_state(graph)
    if rotate:
        U = random_local_unitary(psi.dims, rng)
    else:
        U = LocalOperator.identity(psi.dims)
    h = LocalOperator(tuple(_gram_root(x, rng) for x in H)) @ U.dagger()
    g = LocalOperator(tuple(_gram_root(x, rng) for x in G)) @ U.dagger()
    psi = apply_local(U, psi)
    # normalize both states; G and H then have equal traces
    h = h.scaled(1 / apply_local(h, psi).norm())
    g = g.scaled(1 / apply_local(g, psi).norm())
    syms = tuple(U @ p.to_local_operator() @ U.dagger() for p in group)
    labels = tuple(str(p) for p in group)
    inst = ConversionInstance(psi, g, h, syms, symmetries_complete=graph == GRAPHS["ring5"], labels=labels)
    return KnownInstance(inst, SepWitness([q, 1 - q], (0, m)), el)


def annihilator_for(el: PauliString, U: LocalOperator | None = None) -> LocalOperator:
    """Product of one-site eigenprojections of ``el``'s letters whose joint eigenvalue is wrong for the state.

    ``el`` must be a Hermitian stabilizer element; the result annihilates the
    (rotated) graph state and is singular at every site of ``el``'s support.
    """
    if el.phase % 2:
        raise ValueError("need a Hermitian stabilizer element")
    first = el.support()[0]
    facs = []
    for i, c in enumerate(el.letters):
        if c == "I":
            facs.append(np.eye(2, dtype=complex))
            continue
        s = -int(np.real(el.value)) if i == first else 1
        facs.append((np.eye(2) + s * pauli_matrix(c)) / 2)
    op = LocalOperator(tuple(facs))
    return op if U is None else U @ op @ U.dagger()


def random_pair_instance(rng: np.random.Generator, graph: Graph | str = "ring5") -> ConversionInstance:
    """Random normalized ``g``, ``h`` on a graph state, oriented so that ``tr H > tr G``."""
    if isinstance(graph, str):
        graph = GRAPHS[graph]
    psi = graph_state(graph)
    group = generate_group(graph_stabilizer_generators(graph), n=graph.n)
    syms = tuple(p.to_local_operator() for p in group)
    while True:
        g = LocalOperator(tuple(_gram_root(_random_pd(rng), rng) for _ in range(graph.n)))
        h = LocalOperator(tuple(_gram_root(_random_pd(rng), rng) for _ in range(graph.n)))
        g = g.scaled(1 / apply_local(g, psi).norm())
        h = h.scaled(1 / apply_local(h, psi).norm())
        trG = np.prod([np.trace(f).real for f in g.gram().factors])
        trH = np.prod([np.trace(f).real for f in h.gram().factors])
        if abs(trG - trH) > 1e-6 * max(trG, trH):
            break
    if trH < trG:
        g, h = h, g
    return ConversionInstance(psi, g, h, syms, symmetries_complete=graph == GRAPHS["ring5"],
                              labels=tuple(str(p) for p in group), pauli_group=group)
