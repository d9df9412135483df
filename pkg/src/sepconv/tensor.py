"""Dense complex linear algebra on small tensor-product Hilbert spaces.

Sites are numbered from 0 in the Python API. Site 0 occupies the most
significant block of a flattened index, so a global operator is
``kron(f[0], f[1], ..., f[n-1])``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

RANK_TOL = 1e-9
MAX_DIM = 2**14


class DimensionError(ValueError):
    """Operator and state dimensions do not fit together."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices, first argument most significant."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"invalid local dimensions {dims}")
        total = int(np.prod(dims))
        if total > MAX_DIM:
            raise DimensionError(f"total dimension {total} exceeds {MAX_DIM}")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != total:
            raise DimensionError(f"{amps.size} amplitudes for dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", _frozen(amps))

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "PureState":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.dims, self.amps / nrm)

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm() - 1.0) < tol

    def inner(self, other: "PureState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amps, other.amps))

    def projector(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    @classmethod
    def product(cls, vectors: Sequence[np.ndarray]) -> "PureState":
        vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
        return cls(tuple(v.size for v in vecs), reduce(np.kron, vecs))

    @classmethod
    def basis(cls, dims: Sequence[int], digits: Sequence[int]) -> "PureState":
        vecs = []
        for d, k in zip(dims, digits):
            v = np.zeros(d, dtype=complex)
            v[k] = 1
            vecs.append(v)
        return cls.product(vecs)


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """A product operator, one square matrix per site."""

    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        facs = []
        for f in self.factors:
            f = np.asarray(f, dtype=complex)
            if f.ndim != 2 or f.shape[0] != f.shape[1]:
                raise DimensionError(f"factor of shape {f.shape} is not square")
            facs.append(_frozen(f))
        if not facs:
            raise DimensionError("a local operator needs at least one factor")
        object.__setattr__(self, "factors", tuple(facs))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    @property
    def n_sites(self) -> int:
        return len(self.factors)

    def matrix(self) -> np.ndarray:
        return kron(*self.factors)

    def dagger(self) -> "LocalOperator":
        return LocalOperator(tuple(f.conj().T for f in self.factors))

    def gram(self) -> "LocalOperator":
        """Factor-wise ``op^dagger op``."""
        return LocalOperator(tuple(f.conj().T @ f for f in self.factors))

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        if not isinstance(other, LocalOperator):
            return NotImplemented
        if self.dims != other.dims:
            raise DimensionError(f"cannot compose dims {self.dims} and {other.dims}")
        return LocalOperator(tuple(a @ b for a, b in zip(self.factors, other.factors)))

    def scaled(self, c: complex) -> "LocalOperator":
        """Multiply by a scalar, absorbed into the first factor."""
        facs = list(self.factors)
        facs[0] = facs[0] * c
        return LocalOperator(tuple(facs))

    def singular_values(self) -> list[np.ndarray]:
        return [np.linalg.svd(f, compute_uv=False) for f in self.factors]

    def singular_sites(self, rel_tol: float = 1e-10) -> list[int]:
        """Sites whose factor has smallest/largest singular value below ``rel_tol``."""
        out = []
        for i, s in enumerate(self.singular_values()):
            if s[0] == 0 or s[-1] / s[0] < rel_tol:
                out.append(i)
        return out

    def is_invertible(self, rel_tol: float = 1e-10) -> bool:
        return not self.singular_sites(rel_tol)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return bool(np.abs(self.matrix_gram_defect()).max() < tol)

    def matrix_gram_defect(self) -> np.ndarray:
        m = self.matrix()
        return m.conj().T @ m - np.eye(m.shape[0])

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "LocalOperator":
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))

    @classmethod
    def at_site(cls, dims: Sequence[int], site: int, mat: np.ndarray) -> "LocalOperator":
        facs = [np.eye(d, dtype=complex) for d in dims]
        facs[site] = np.asarray(mat, dtype=complex)
        return cls(tuple(facs))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=complex)
        d = int(np.prod(self.dims))
        if ent.shape != (d, d):
            raise DimensionError(f"entries of shape {ent.shape} for dims {self.dims}")
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        object.__setattr__(self, "entries", _frozen(ent))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.abs(self.entries - self.entries.conj().T).max() < tol)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2)


def _check_dims(op: LocalOperator, state: PureState):
    if op.dims != state.dims:
        raise DimensionError(f"operator dims {op.dims} do not match state dims {state.dims}")


def apply_local(op: LocalOperator, state: PureState) -> PureState:
    """Apply ``op`` factor by factor, never forming the full Kronecker product."""
    _check_dims(op, state)
    psi = state.tensor()
    for site, f in enumerate(op.factors):
        psi = np.moveaxis(np.tensordot(f, psi, axes=([1], [site])), 0, site)
    return PureState(state.dims, psi.reshape(-1))


def apply_global(mat: np.ndarray, state: PureState) -> PureState:
    return PureState(state.dims, np.asarray(mat) @ state.amps)


def _normalize_sites(sites: Iterable[int], n: int) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(s) for s in sites)))
    if not keep:
        raise ValueError("keep_sites must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"sites {keep} out of range for {n} sites")
    return keep


def partial_trace(state: PureState, keep_sites: Iterable[int]) -> DensityMatrix:
    """Reduced density operator of ``|state><state|`` on ``keep_sites`` (kept in ascending order)."""
    keep = _normalize_sites(keep_sites, state.n_sites)
    traced = [i for i in range(state.n_sites) if i not in keep]
    psi = np.transpose(state.tensor(), keep + tuple(traced))
    dk = int(np.prod([state.dims[i] for i in keep]))
    psi = psi.reshape(dk, -1)
    return DensityMatrix(tuple(state.dims[i] for i in keep), psi @ psi.conj().T)


def reduced_ranks(state: PureState, tol: float = RANK_TOL) -> list[int]:
    """Rank of every single-site reduction, counting eigenvalues of the trace-normalized reduction above ``tol``."""
    nrm2 = state.norm() ** 2
    if nrm2 == 0:
        raise ValueError("zero state has no reduced ranks")
    ranks = []
    for i in range(state.n_sites):
        ev = partial_trace(state, [i]).eigvalsh() / nrm2
        ranks.append(int(np.sum(ev > tol)))
    return ranks


def is_fully_entangled(state: PureState, tol: float = RANK_TOL) -> bool:
    return reduced_ranks(state, tol) == list(state.dims)


def hermitian_sqrt(mat: np.ndarray) -> np.ndarray:
    """Positive semidefinite square root of a Hermitian PSD matrix."""
    mat = np.asarray(mat, dtype=complex)
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    if w.min() < -1e-12 * max(1.0, abs(w).max()):
        raise ValueError("matrix is not positive semidefinite")
    w = np.clip(w, 0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def random_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    d = int(np.prod(dims))
    amps = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(tuple(dims), amps / np.linalg.norm(amps))


def random_fully_entangled(dims: Sequence[int], rng: np.random.Generator,
                           max_tries: int = 100) -> PureState:
    """Rejection sampling from complex-Gaussian amplitudes; full rank is generic."""
    for _ in range(max_tries):
        psi = random_state(dims, rng)
        if is_fully_entangled(psi):
            return psi
    raise RuntimeError(f"no fully entangled state found for dims {dims}")


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_local_operator(dims: Sequence[int], rng: np.random.Generator) -> LocalOperator:
    return LocalOperator(tuple(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for d in dims))


def random_local_unitary(dims: Sequence[int], rng: np.random.Generator) -> LocalOperator:
    return LocalOperator(tuple(random_unitary(d, rng) for d in dims))
