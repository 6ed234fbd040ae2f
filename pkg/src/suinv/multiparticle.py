"""Operators on ``N`` particles with ``d`` levels each.

Particle 0 is the leftmost (most significant) Kronecker factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import _backend
from .errors import InconsistencyError, ParticleIndexError
from .su_basis import GeneratorBasis

DENSE_CAP = 4096
HERMITIAN_TOL = 1e-12


def max_norm(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


@dataclass(frozen=True)
class ManyBodyOperator:
    d: int
    n_particles: int
    matrix: np.ndarray = field(repr=False)
    label: str = ""
    hermitian: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        dim = self.d ** self.n_particles
        if self.n_particles < 1 or m.shape != (dim, dim):
            raise InconsistencyError(f"matrix shape {m.shape} does not match d={self.d}, N={self.n_particles}")
        if self.hermitian and max_norm(m - m.conj().T) > HERMITIAN_TOL * max(1.0, max_norm(m)):
            raise InconsistencyError(f"operator {self.label!r} labelled Hermitian is not")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.d ** self.n_particles

    def _check(self, other):
        if not isinstance(other, ManyBodyOperator):
            raise TypeError(f"expected ManyBodyOperator, got {type(other).__name__}")
        if (self.d, self.n_particles) != (other.d, other.n_particles):
            raise InconsistencyError(
                f"(d, N) mismatch: ({self.d}, {self.n_particles}) vs ({other.d}, {other.n_particles})"
            )

    def _new(self, matrix, label, hermitian=False):
        return ManyBodyOperator(self.d, self.n_particles, matrix, label, hermitian)

    def __add__(self, other):
        self._check(other)
        return self._new(self.matrix + other.matrix, f"({self.label} + {other.label})", self.hermitian and other.hermitian)

    def __sub__(self, other):
        self._check(other)
        return self._new(self.matrix - other.matrix, f"({self.label} - {other.label})", self.hermitian and other.hermitian)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        herm = self.hermitian and np.imag(scalar) == 0
        return self._new(scalar * self.matrix, f"{scalar:g}*{self.label}", herm)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return self._new(self.matrix @ other.matrix, f"{self.label}@{other.label}")

    def dagger(self):
        return self._new(self.matrix.conj().T, f"{self.label}^dag", self.hermitian)


@dataclass(frozen=True)
class CollectiveErrorSet:
    d: int
    n_particles: int
    operators: tuple

    def __len__(self):
        return len(self.operators)

    def __getitem__(self, j) -> ManyBodyOperator:
        return self.operators[j]

    @property
    def dim(self) -> int:
        return self.d ** self.n_particles

    def matrices(self) -> np.ndarray:
        return np.stack([op.matrix for op in self.operators])


def embed(op, particle: int, n_particles: int, label: str | None = None) -> ManyBodyOperator:
    """``I^{⊗particle} ⊗ op ⊗ I^{⊗(N - particle - 1)}``."""
    op = np.asarray(op, dtype=np.complex128)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise InconsistencyError("op must be a square matrix")
    if not 0 <= particle < n_particles:
        raise ParticleIndexError(f"particle {particle} out of range for N={n_particles}")
    d = op.shape[0]
    left = np.eye(d ** particle)
    right = np.eye(d ** (n_particles - particle - 1))
    mat = np.kron(np.kron(left, op), right)
    herm = max_norm(op - op.conj().T) <= HERMITIAN_TOL
    return ManyBodyOperator(d, n_particles, mat, label or f"op^({particle})", herm)


def collective_set(basis: GeneratorBasis, n_particles: int) -> CollectiveErrorSet:
    """``S_j = sum_a l_j^(a)`` for every generator."""
    if n_particles < 1:
        raise InconsistencyError("n_particles must be ≥ 1")
    d = basis.d
    ops = []
    for j in range(basis.size):
        # a single-site kernel call per particle keeps the Kronecker ordering in one place
        mat = sum(
            _backend.site_operator([basis.generators[j : j + 1]], [[0]], [1.0], [a], d, n_particles)
            for a in range(n_particles)
        )
        ops.append(ManyBodyOperator(d, n_particles, mat, f"S_{j}", hermitian=True))
    return CollectiveErrorSet(d, n_particles, tuple(ops))


def commutator(a: ManyBodyOperator, b: ManyBodyOperator) -> ManyBodyOperator:
    a._check(b)
    return ManyBodyOperator(a.d, a.n_particles, a.matrix @ b.matrix - b.matrix @ a.matrix, f"[{a.label}, {b.label}]")


class CommutationCheck(NamedTuple):
    commutes: bool
    residual: float
    per_generator: tuple


def commutation_residuals(h, cset: CollectiveErrorSet) -> list[float]:
    m = h.matrix if isinstance(h, ManyBodyOperator) else np.asarray(h)
    if isinstance(h, ManyBodyOperator) and (h.d, h.n_particles) != (cset.d, cset.n_particles):
        raise InconsistencyError("operator and collective set disagree on (d, N)")
    if m.shape != (cset.dim, cset.dim):
        raise InconsistencyError(f"operator shape {m.shape} vs collective dimension {cset.dim}")
    return [max_norm(m @ s.matrix - s.matrix @ m) for s in cset.operators]


def commutes_with_all(h: ManyBodyOperator, cset: CollectiveErrorSet, tol: float = 1e-10) -> CommutationCheck:
    """Whether ``max_j ||[H, S_j]||_max <= tol``, with the attained residual."""
    res = commutation_residuals(h, cset)
    worst = max(res)
    return CommutationCheck(worst <= tol, worst, tuple(res))


def collective_generator(cset: CollectiveErrorSet, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    if len(v) != len(cset):
        raise InconsistencyError(f"expected {len(cset)} coefficients, got {len(v)}")
    return np.tensordot(v, cset.matrices(), axes=1)


def expm_structured(a: np.ndarray) -> np.ndarray:
    """Matrix exponential; spectral for (anti-)Hermitian input, Pade otherwise."""
    scale = max(1.0, max_norm(a))
    if max_norm(a + a.conj().T) <= HERMITIAN_TOL * scale:
        w, v = np.linalg.eigh(1j * a)
        return (v * np.exp(-1j * w)) @ v.conj().T
    if max_norm(a - a.conj().T) <= HERMITIAN_TOL * scale:
        w, v = np.linalg.eigh(a)
        return (v * np.exp(w)) @ v.conj().T
    return scipy.linalg.expm(a)


def collective_unitary(cset: CollectiveErrorSet, v) -> ManyBodyOperator:
    """``D(v) = exp(sum_j v_j S_j)``."""
    a = collective_generator(cset, v)
    return ManyBodyOperator(cset.d, cset.n_particles, expm_structured(a), "D(v)")


def span_residual(target, spanning, rcond: float = 1e-10):
    """Least-squares fit of ``target`` onto span of ``spanning`` matrices.

    Returns ``(coefficients, residual)`` with the residual in max-norm.
    """
    t = np.asarray(target).ravel()
    if len(spanning) == 0:
        return np.zeros(0, dtype=np.complex128), max_norm(t)
    basis = np.stack([np.asarray(s).ravel() for s in spanning], axis=1)
    coeff = np.linalg.pinv(basis, rcond=rcond) @ t
    return coeff, max_norm(t - basis @ coeff)
