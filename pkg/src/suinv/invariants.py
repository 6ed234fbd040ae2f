"""Casimir operators and the multi-particle invariants of collective motion.

Every invariant is built with unit coefficient on its defining contraction
(``normalization = "unit-contraction"``); e.g. ``J2 = sum_j S_j S_j`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

import numpy as np

from . import _backend
from .errors import InsufficientParticlesError, InvalidOrderError, ParticleIndexError
from .multiparticle import (
    CollectiveErrorSet,
    ManyBodyOperator,
    collective_set,
    commutation_residuals,
    embed,
    max_norm,
    span_residual,
)
from .su_basis import GeneratorBasis, StructureTensors

NORMALIZATION = "unit-contraction"
KINDS = ("C2", "C3", "Cn", "J2", "J3", "I2", "I3", "I4")


@dataclass(frozen=True)
class InvariantOperator:
    kind: str
    particles: tuple
    operator: ManyBodyOperator
    order: int
    normalization: str = NORMALIZATION

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix

    @property
    def label(self) -> str:
        return self.operator.label


# single-particle Casimirs --------------------------------------------------


def casimir_c2(basis: GeneratorBasis) -> np.ndarray:
    L = basis.generators
    return np.einsum("iab,ibc->ac", L, L)


def casimir_c3(basis: GeneratorBasis, tensors: StructureTensors) -> np.ndarray:
    return casimir_cn(basis, tensors, 3)


def d_chain(tensors: StructureTensors, order: int) -> np.ndarray:
    """Rank-``order`` tensor ``d_{i1 i2 k1} d_{k1 i3 k2} ... d_{k_{order-3} i_{order-1} i_order}``."""
    dd = tensors.d_sym.dense
    chain = dd
    for _ in range(order - 3):
        chain = np.tensordot(chain, dd, axes=([-1], [0]))
    return chain


def casimir_cn(basis: GeneratorBasis, tensors: StructureTensors, n: int) -> np.ndarray:
    """Degree-``n`` Casimir from a chain of ``n - 2`` d-tensors.

    Consecutive d-tensors share one contracted index; the remaining ``n`` open
    indices carry generators in order. ``n = 2`` gives ``sum_i l_i l_i`` and
    ``n = 3`` gives ``sum d_ijk l_i l_j l_k``.
    """
    if n < 2:
        raise InvalidOrderError("Casimir order must be ≥ 2")
    if n == 2:
        return casimir_c2(basis)
    L = basis.generators
    acc = np.tensordot(d_chain(tensors, n), L, axes=([-1], [0]))
    for _ in range(n - 1):
        acc = np.einsum("iab,...ibc->...ac", L, acc)
    return acc


# collective Casimirs -------------------------------------------------------


def _invariant(kind, particles, matrix, d, n_particles, order, label, hermitian=True):
    op = ManyBodyOperator(d, n_particles, matrix, f"{label} [{NORMALIZATION}]", hermitian)
    return InvariantOperator(kind, tuple(particles), op, order)


def collective_j2(cset: CollectiveErrorSet) -> InvariantOperator:
    mats = cset.matrices()
    j2 = np.einsum("jab,jbc->ac", mats, mats)
    j2 = 0.5 * (j2 + j2.conj().T)
    return _invariant("J2", range(cset.n_particles), j2, cset.d, cset.n_particles, 2, "J2")


def j3_coupling(tensors: StructureTensors) -> np.ndarray:
    """``g_jln = sum_ikm f_ijk f_klm f_mni``, the coefficient of ``S_j S_l S_n`` in ``J3``."""
    f = tensors.f.dense
    return np.einsum("ijk,klm,mni->jln", f, f, f, optimize=True)


def collective_j3(cset: CollectiveErrorSet, tensors: StructureTensors) -> InvariantOperator:
    """``J3 = sum f_ijk f_klm f_mni S_j S_l S_n``.

    ``g`` is antisymmetric, so ``J3`` is anti-Hermitian (it is ``i`` times a
    multiple of ``J2``); it is returned without a Hermitian label.
    """
    g = j3_coupling(tensors)
    mats = cset.matrices()
    inner = np.tensordot(g, mats, axes=([2], [0]))  # (j, l, a, b)
    mid = np.einsum("lab,jlbc->jac", mats, inner)
    j3 = np.einsum("jab,jbc->ac", mats, mid)
    return _invariant("J3", range(cset.n_particles), j3, cset.d, cset.n_particles, 3, "J3", hermitian=False)


# multi-particle invariants -------------------------------------------------


def _check_particles(particles, n_particles):
    if len(set(particles)) != len(particles):
        raise ParticleIndexError(f"particle indices must be distinct, got {tuple(particles)}")
    for p in particles:
        if not 0 <= p < n_particles:
            raise ParticleIndexError(f"particle {p} out of range for N={n_particles}")


def coupled_operator(basis: GeneratorBasis, coefficients, particles, n_particles) -> np.ndarray:
    """``sum c_{i1..ik} l_{i1}^(p1) ... l_{ik}^(pk)`` for a dense coefficient tensor."""
    c = np.asarray(coefficients)
    idx = np.argwhere(np.abs(c) > 0)
    vals = c[tuple(idx.T)]
    stacks = [basis.generators] * len(particles)
    return _backend.site_operator(stacks, idx, vals, particles, basis.d, n_particles)


def invariant_i2(basis: GeneratorBasis, alpha: int, beta: int, n_particles: int) -> InvariantOperator:
    """``I2^(a,b) = sum_i l_i^(a) l_i^(b)``."""
    _check_particles((alpha, beta), n_particles)
    mat = coupled_operator(basis, np.eye(basis.size), (alpha, beta), n_particles)
    return _invariant("I2", (alpha, beta), mat, basis.d, n_particles, 2, f"I2^({alpha},{beta})")


def _three_body(kind, tensor, basis, particles, n_particles):
    if n_particles < 3:
        raise InsufficientParticlesError(f"{kind} needs at least 3 particles")
    _check_particles(particles, n_particles)
    mat = coupled_operator(basis, tensor, particles, n_particles)
    return mat


def invariant_i3(tensors: StructureTensors, basis: GeneratorBasis, alpha, beta, gamma, n_particles) -> InvariantOperator:
    """``I3 = sum f_ijk l_i^(a) l_j^(b) l_k^(c)``."""
    particles = (alpha, beta, gamma)
    mat = _three_body("I3", tensors.f.dense, basis, particles, n_particles)
    # f is real antisymmetric and the factors commute, so no anti-Hermitian part may survive
    if max_norm(mat - mat.conj().T) / 2 > 1e-12 * max(1.0, max_norm(mat)):
        raise ArithmeticError("I3 contraction is not Hermitian")
    return _invariant("I3", particles, mat, basis.d, n_particles, 3, f"I3^({alpha},{beta},{gamma})")


def invariant_i4(tensors: StructureTensors, basis: GeneratorBasis, alpha, beta, gamma, n_particles) -> InvariantOperator:
    """``I4 = sum d_ijk l_i^(a) l_j^(b) l_k^(c)``."""
    particles = (alpha, beta, gamma)
    mat = _three_body("I4", tensors.d_sym.dense, basis, particles, n_particles)
    return _invariant("I4", particles, mat, basis.d, n_particles, 3, f"I4^({alpha},{beta},{gamma})")


def single_particle_casimirs(basis: GeneratorBasis, n_particles: int) -> list[ManyBodyOperator]:
    c2 = casimir_c2(basis)
    return [embed(c2, a, n_particles, f"C2^({a})") for a in range(n_particles)]


def j2_decomposition_residual(basis: GeneratorBasis, n_particles: int, cset=None) -> float:
    """``|| J2 - sum_a C2^(a) - 2 sum_{a<b} I2^(a,b) ||_max``."""
    cset = cset or collective_set(basis, n_particles)
    rhs = sum(c.matrix for c in single_particle_casimirs(basis, n_particles))
    for a, b in combinations(range(n_particles), 2):
        rhs = rhs + 2 * invariant_i2(basis, a, b, n_particles).matrix
    return max_norm(collective_j2(cset).matrix - rhs)


# J3 expansion by particle-index class ----------------------------------------


@dataclass(frozen=True)
class ClassFit:
    name: str
    operator: np.ndarray
    coefficients: tuple
    residual: float
    term_residual: float
    commutation_residual: float
    term_coefficients: dict


@dataclass(frozen=True)
class J3Report:
    d: int
    n_particles: int
    classes: dict
    expansion_residual: float

    @property
    def max_residual(self) -> float:
        return max(max(c.residual, c.term_residual) for c in self.classes.values())


def _j3_term(basis, g, assignment, n_particles):
    """``sum g_jln l_j^(p0) l_l^(p1) l_n^(p2)`` for one particle assignment."""
    L = basis.generators
    sites = sorted(set(assignment))
    if len(sites) == 1:
        local = np.einsum("jln,jab,lbc,ncd->ad", g, L, L, L, optimize=True)
        return embed(local, sites[0], n_particles).matrix
    if len(sites) == 2:
        # the repeated particle's two generators multiply in their original order
        rep = max(sites, key=assignment.count)
        lone = min(sites, key=assignment.count)
        pos = [i for i, p in enumerate(assignment) if p == rep]
        other = [i for i in range(3) if i not in pos][0]
        letters = "jln"
        spec = f"jln,{letters[pos[0]]}ab,{letters[pos[1]]}bc->{letters[other]}ac"
        stack = np.einsum(spec, g, L, L, optimize=True)
        idx = np.array([[m, m] for m in range(basis.size)])
        return _backend.site_operator([stack, L], idx, np.ones(basis.size), [rep, lone], basis.d, n_particles)
    return coupled_operator(basis, g, assignment, n_particles)


def verify_j3_decomposition(basis: GeneratorBasis, tensors: StructureTensors, n_particles: int, cset=None, rcond=1e-10) -> J3Report:
    """Split ``J3`` by how many particle indices coincide and fit each class.

    * ``same``: all three on one particle; fitted onto ``{C2^(a)}``.
    * ``two_same``: fitted onto ``{I2^(a,b)} ∪ {I}``.
    * ``all_different``: fitted onto ``{I3^(a,b,c)}``.

    ``term_residual`` is the worst fit of an individual assignment onto the
    invariant built from the same particles; ``residual`` fits the class sum.
    """
    if n_particles < 3:
        raise InsufficientParticlesError("J3 decomposition needs N ≥ 3")
    cset = cset or collective_set(basis, n_particles)
    g = j3_coupling(tensors)
    dim = basis.d ** n_particles
    eye = np.eye(dim)
    casimirs = [c.matrix for c in single_particle_casimirs(basis, n_particles)]
    pairs = list(combinations(range(n_particles), 2))
    i2 = {p: invariant_i2(basis, *p, n_particles).matrix for p in pairs}
    triples = list(combinations(range(n_particles), 3))
    i3 = {t: invariant_i3(tensors, basis, *t, n_particles).matrix for t in triples}

    sums = {"same": np.zeros((dim, dim), complex), "two_same": np.zeros((dim, dim), complex),
            "all_different": np.zeros((dim, dim), complex)}
    term_res = {k: 0.0 for k in sums}
    term_coeff = {k: {} for k in sums}
    for assignment in product(range(n_particles), repeat=3):
        term = _j3_term(basis, g, list(assignment), n_particles)
        distinct = len(set(assignment))
        if distinct == 1:
            key, spanning = "same", [casimirs[assignment[0]]]
        elif distinct == 2:
            key, spanning = "two_same", [i2[tuple(sorted(set(assignment)))], eye]
        else:
            key, spanning = "all_different", [invariant_i3(tensors, basis, *assignment, n_particles).matrix]
        sums[key] += term
        coeff, res = span_residual(term, spanning, rcond)
        term_res[key] = max(term_res[key], res)
        term_coeff[key][assignment] = tuple(complex(c) for c in coeff)

    spans = {
        "same": casimirs,
        "two_same": [i2[p] for p in pairs] + [eye],
        "all_different": [i3[t] for t in triples],
    }
    classes = {}
    for key, op in sums.items():
        coeff, res = span_residual(op, spans[key], rcond)
        comm = max(commutation_residuals(op, cset))
        classes[key] = ClassFit(key, op, tuple(complex(c) for c in coeff), res, term_res[key], comm, term_coeff[key])
    j3 = collective_j3(cset, tensors).matrix
    expansion = max_norm(j3 - sum(sums.values()))
    return J3Report(basis.d, n_particles, classes, expansion)


# algebra dimensions ----------------------------------------------------------


def commutant_basis(ops, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as ``(k, D, D)``) of all ``X`` with ``[X, A] = 0`` for every ``A``."""
    mats = [np.asarray(getattr(o, "matrix", o)) for o in ops]
    dim = mats[0].shape[0]
    eye = np.eye(dim)
    gram = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for a in mats:
        # row-major vec: vec(XA - AX) = (I ⊗ A^T - A ⊗ I) vec(X)
        lmap = np.kron(eye, a.T) - np.kron(a, eye)
        gram += lmap.conj().T @ lmap
    w, v = np.linalg.eigh(gram)
    scale = max(1.0, float(w[-1]) if len(w) else 1.0)
    null = v[:, w <= tol * scale]
    return null.T.reshape(-1, dim, dim)


def commutant_dimension(ops, tol: float = 1e-9) -> int:
    return len(commutant_basis(ops, tol))


def algebra_span_dimension(generators, degree: int = 2, include_identity: bool = True, tol: float = 1e-9) -> int:
    """Dimension of the span of products of ``generators`` up to ``degree`` factors."""
    mats = [np.asarray(getattr(g, "matrix", g)) for g in generators]
    dim = mats[0].shape[0]
    words = [np.eye(dim)] if include_identity else []
    layer = [np.eye(dim)]
    for _ in range(degree):
        layer = [w @ m for w in layer for m in mats]
        words.extend(layer)
    stack = np.stack([w.ravel() for w in words])
    s = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class CompletenessProbe:
    d: int
    n_particles: int
    commutant_dim: int
    generated_dim: int

    @property
    def complete(self) -> bool:
        return self.commutant_dim == self.generated_dim


def three_particle_invariants(basis: GeneratorBasis, tensors: StructureTensors, n_particles: int = 3):
    ops = [invariant_i2(basis, a, b, n_particles) for a, b in combinations(range(n_particles), 2)]
    for t in combinations(range(n_particles), 3):
        ops.append(invariant_i3(tensors, basis, *t, n_particles))
        ops.append(invariant_i4(tensors, basis, *t, n_particles))
    return ops


def completeness_probe(basis: GeneratorBasis, tensors: StructureTensors, n_particles: int = 3, degree: int = 2) -> CompletenessProbe:
    """Compare the commutant of ``{S_j}`` with the algebra spanned by the invariants."""
    cset = collective_set(basis, n_particles)
    comm = commutant_dimension(cset.operators)
    gen = algebra_span_dimension(three_particle_invariants(basis, tensors, n_particles), degree)
    return CompletenessProbe(basis.d, n_particles, comm, gen)


def commutation_table(invariants) -> np.ndarray:
    """Pairwise ``||[A, B]||_max`` between invariants."""
    n = len(invariants)
    table = np.zeros((n, n))
    for i, j in permutations(range(n), 2):
        a, b = invariants[i].matrix, invariants[j].matrix
        table[i, j] = max_norm(a @ b - b @ a)
    return table
