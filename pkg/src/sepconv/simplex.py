"""Phase-1 simplex for ``A x = b, x >= 0``.

Entering columns follow Bland's order, passing over columns that would force
a tiny pivot; leaving rows use a Harris ratio test, with Bland's rule on
degenerate steps. The basis is refactored at every pivot.

Infeasible systems come back with a Farkas vector ``y`` satisfying
``y @ A >= 0`` and ``y @ b < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_RTOL = 1e-10
PIVOT_TOL = 1e-7
DEGENERATE_TOL = 1e-14
OPT_TOL = 1e-10
WEAK_PIVOT = 1e-5


class SimplexError(RuntimeError):
    pass


@dataclass
class Phase1Result:
    feasible: bool
    x: np.ndarray | None
    farkas: np.ndarray | None
    infeasibility: float
    iterations: int


def _leaving_row(col, xb, basis, gain, tol):
    pos = np.flatnonzero(col > PIVOT_TOL)
    if pos.size == 0:
        return None
    rhs = np.maximum(xb[pos], 0)
    ratios = rhs / col[pos]
    # Harris two-pass ratio test: among rows within the relaxed bound take the largest pivot
    bound = ((rhs + tol) / col[pos]).min()
    ok = pos[ratios <= bound]
    r = ok[np.lexsort((basis[ok], -col[ok]))[0]]
    if max(xb[r], 0) / col[r] * gain <= DEGENERATE_TOL:
        # degenerate step: Bland's leaving rule keeps the method cycle-free
        tied = pos[ratios <= ratios.min() + DEGENERATE_TOL]
        tied = tied[col[tied] >= 1e-3 * col[tied].max()]
        r = tied[np.argmin(basis[tied])]
    return r


def phase1(A: np.ndarray, b: np.ndarray, tol: float = 1e-9, max_iter: int = 100_000) -> Phase1Result:
    """Minimize the sum of artificial variables over ``A x + s = b``.

    The system is first projected onto the column space of ``A`` and its
    rows scaled to unit max-norm; the feasibility tolerance applies to the
    reduced system.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    m, n = A.shape
    if b.size != m:
        raise ValueError(f"A has {m} rows but b has {b.size} entries")

    # Restrict to the column space of A: redundant rows make degenerate
    # pivots on near-zero entries, and a component of b outside range(A)
    # is already a Farkas certificate.
    if n:
        U, sv, _ = np.linalg.svd(A, full_matrices=False)
        rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    else:
        U, rank = np.zeros((m, 0)), 0
    Q = U[:, :rank]
    b_perp = b - Q @ (Q.T @ b)
    miss = float(np.linalg.norm(b_perp))
    if miss > tol * max(1.0, float(np.linalg.norm(b))):
        return Phase1Result(False, None, -b_perp / miss, miss, 0)
    Ar, br = Q.T @ A, Q.T @ b

    scale = np.abs(Ar).max(axis=1)
    S = np.where(br < 0, -1.0, 1.0) / scale
    Ar = Ar * S[:, None]
    br = br * S
    mr = rank

    # revised simplex; the basis is small, so it is refactored every pivot.
    # Artificials start basic and never re-enter.
    full = np.hstack([Ar, np.eye(mr)])
    basis = np.arange(n, n + mr)
    it = 0
    while True:
        B = full[:, basis]
        xb = np.linalg.solve(B, br)
        y = np.linalg.solve(B.T, (basis >= n).astype(float))
        reduced = -(y @ Ar)
        reduced[basis[basis < n]] = 0
        candidates = np.flatnonzero(reduced < -OPT_TOL)
        if candidates.size == 0:
            break
        # Bland order over improving columns, skipping those whose ratio test
        # lands on a tiny pivot unless every candidate does
        choice = None
        for j in candidates:
            col = np.linalg.solve(B, Ar[:, j])
            r = _leaving_row(col, xb, basis, -reduced[j], tol)
            if r is None:
                raise SimplexError("phase-1 objective unbounded below; this cannot happen")
            if col[r] >= WEAK_PIVOT * np.abs(col).max():
                choice = (j, r)
                break
            if choice is None:
                choice = (j, r)
        j, r = choice
        basis[r] = j
        it += 1
        if it >= max_iter:
            raise SimplexError(f"no convergence after {max_iter} pivots")

    rhs = np.clip(xb, 0, None)
    w = float(rhs[basis >= n].sum())
    if w <= tol:
        x = np.zeros(n)
        mask = basis < n
        x[basis[mask]] = rhs[mask]
        return Phase1Result(True, x, None, w, it)
    # y already solves B^T y = c_B for the final basis
    return Phase1Result(False, None, -Q @ (S * y), w, it)
