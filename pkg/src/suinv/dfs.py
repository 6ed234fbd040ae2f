"""Noiseless-subsystem structure of ``N`` qudits under collective errors.

``decompose`` splits the Hilbert space into isotypic blocks of the collective
algebra. Each block carries a basis ordered so that, in block coordinates,
every ``S_j`` acts as ``A_j ⊗ I_m`` (irrep factor first, multiplicity factor
second). Operators commuting with all ``S_j`` therefore act as ``I_n ⊗ h``:
the multiplicity factor is the protected qudit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegeneracyError, InconsistencyError, ParticleIndexError
from .invariants import collective_j2, commutant_dimension, invariant_i2, invariant_i3
from .multiparticle import (
    CollectiveErrorSet,
    ManyBodyOperator,
    commutation_residuals,
    expm_structured,
    max_norm,
    span_residual,
)
from .su_basis import GeneratorBasis, StructureTensors

CLUSTER_TOL = 1e-8
COMMUTANT_CHECK_MAX = 32


@dataclass(frozen=True)
class DfsBlock:
    block_id: int
    irrep_dim: int
    multiplicity: int
    basis: np.ndarray = field(repr=False)
    casimir_value: float
    weights: np.ndarray = field(repr=False)
    cubic_value: float | None = None
    j_label: float | None = None
    m_labels: tuple | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.irrep_dim * self.multiplicity

    def project(self, op) -> np.ndarray:
        m = getattr(op, "matrix", op)
        return self.basis.conj().T @ m @ self.basis

    def _split(self, op):
        n, m = self.irrep_dim, self.multiplicity
        return self.project(op).reshape(n, m, n, m)

    def irrep_factor_residual(self, op) -> float:
        """Distance of the block action from ``A ⊗ I_m`` (how ``S_j`` must act)."""
        t = self._split(op)
        a = np.einsum("imjm->ij", t) / self.multiplicity
        return max_norm(t - np.einsum("ij,mn->imjn", a, np.eye(self.multiplicity)))

    def multiplicity_factor_residual(self, op) -> float:
        """Distance of the block action from ``I_n ⊗ h`` (how invariants must act)."""
        t = self._split(op)
        h = np.einsum("iman->mn", t) / self.irrep_dim
        return max_norm(t - np.einsum("ij,mn->imjn", np.eye(self.irrep_dim), h))

    def multiplicity_action(self, op) -> np.ndarray:
        """The ``m x m`` operator ``h`` an invariant induces on the protected factor."""
        return np.einsum("iman->mn", self._split(op)) / self.irrep_dim


@dataclass(frozen=True)
class DfsDecomposition:
    d: int
    n_particles: int
    blocks: tuple
    seed: int = 0

    @property
    def dim(self) -> int:
        return self.d ** self.n_particles

    def assembled_basis(self) -> np.ndarray:
        return np.concatenate([b.basis for b in self.blocks], axis=1)

    def noiseless_blocks(self):
        return [b for b in self.blocks if b.multiplicity >= 2]

    def validate(self, cset: CollectiveErrorSet) -> dict:
        """Residuals for orthonormality, block-diagonality and dimension accounting."""
        u = self.assembled_basis()
        offsets = np.cumsum([0] + [b.dim for b in self.blocks])
        mask = np.ones((u.shape[1], u.shape[1]), bool)
        for lo, hi in zip(offsets[:-1], offsets[1:]):
            mask[lo:hi, lo:hi] = False
        off_block = 0.0
        irrep = 0.0
        for s in cset.operators:
            off_block = max(off_block, max_norm((u.conj().T @ s.matrix @ u)[mask]))
            irrep = max(irrep, max(b.irrep_factor_residual(s) for b in self.blocks))
        return {
            "dimension_sum": int(sum(b.dim for b in self.blocks)),
            "orthonormality": max_norm(u.conj().T @ u - np.eye(u.shape[1])),
            "off_block": off_block,
            "irrep_factorization": irrep,
        }


def _cluster(values, tol, what):
    """Group sorted eigenvalues; gaps within (tol, 10 tol] are refused."""
    values = np.asarray(values)
    scale = max(1.0, float(np.abs(values).max()))
    gaps = np.diff(values)
    ambiguous = (gaps > tol * scale) & (gaps <= 10 * tol * scale)
    if ambiguous.any():
        raise DegeneracyError(
            f"ambiguous eigenvalue gap while clustering {what}",
            {"quantity": what, "gaps": gaps[ambiguous].tolist(), "merge_threshold": tol * scale,
             "split_threshold": 10 * tol * scale},
        )
    cuts = np.flatnonzero(gaps > tol * scale) + 1
    return [g for g in np.split(np.arange(len(values)), cuts)]


def _permute_rows(q, axes, d, n_particles):
    shape = [d] * n_particles + [q.shape[1]]
    return q.reshape(shape).transpose(list(axes) + [n_particles]).reshape(q.shape)


def _three_cycle_sum(q, d, n_particles):
    """Sum over all particle 3-cycles of the permuted columns of ``q``."""
    out = np.zeros_like(q)
    for a, b, c in combinations(range(n_particles), 3):
        for cyc in ((b, c, a), (c, a, b)):
            axes = list(range(n_particles))
            axes[a], axes[b], axes[c] = cyc
            out += _permute_rows(q, axes, d, n_particles)
    return out


def _leading_phase(v, rel=1e-10):
    i = int(np.flatnonzero(np.abs(v) > rel * np.abs(v).max())[0])
    return np.conj(v[i]) / abs(v[i])


def _factorize(q, mats, cartan, cluster_tol):
    """Tensor-adapted basis of one isotypic block spanned by the columns of ``q``."""
    k = q.shape[1]
    hq = q.conj().T @ cartan @ q
    wh, vh = np.linalg.eigh(0.5 * (hq + hq.conj().T))
    top = _cluster(wh, cluster_tol, "highest weight")[-1]
    m = len(top)
    seeds = q @ vh[:, top]

    # grow the irrep from the highest-weight space; each element is a D x m slab
    # whose columns are the same irrep vector in each copy
    slabs = [seeds]
    noise = 1e-7 * max(1.0, max(max_norm(s) for s in mats))
    i = 0
    while i < len(slabs):
        for s in mats:
            y = s @ slabs[i]
            for _ in range(2):
                for b in slabs:
                    y = y - b * (np.vdot(b, y) / m)
            nrm = np.sqrt(np.vdot(y, y).real / m)
            if nrm > noise:
                slabs.append(y / nrm)
                if len(slabs) * m > k:
                    raise DegeneracyError("block is not isotypic", {"block_dim": k, "multiplicity": m})
        i += 1
    n = len(slabs)
    if n * m != k:
        raise DegeneracyError(
            "block mixes inequivalent irreducible components",
            {"block_dim": k, "irrep_dim": n, "multiplicity": m},
        )

    stack = np.stack(slabs)  # (n, D, m)
    ah = np.einsum("adm,de,bem->ab", stack.conj(), cartan, stack) / m
    wa, va = np.linalg.eigh(0.5 * (ah + ah.conj().T))
    order = np.argsort(-wa, kind="stable")
    wa, va = wa[order], va[:, order]
    stack = np.einsum("ba,bdm->adm", va, stack)

    for a in range(n):
        stack[a] *= _leading_phase(stack[a][:, 0])
    for mu in range(m):
        stack[:, :, mu] *= _leading_phase(stack[0][:, mu])
    basis = stack.transpose(1, 0, 2).reshape(q.shape[0], n * m)
    return basis, n, m, wa


def _cartan(cset, seed):
    d = cset.d
    diag = list(range(d * (d - 1), d * d - 1))
    if d == 2:
        weights = np.ones(1)
    else:
        weights = np.random.default_rng(seed).uniform(0.5, 1.5, size=len(diag))
    return sum(w * cset[j].matrix for w, j in zip(weights, diag))


def decompose(cset: CollectiveErrorSet, tol: float = 1e-10, cluster_tol: float = CLUSTER_TOL, seed: int = 0) -> DfsDecomposition:
    """Isotypic decomposition of the collective algebra generated by ``cset``.

    Blocks are found from the eigenspaces of ``J2``; for ``d >= 3`` each is
    refined by the particle 3-cycle class sum, which separates irreducible
    components sharing a ``J2`` value. Within a block the multiplicity is the
    degeneracy of the top eigenvalue of a generic Cartan element, and the
    irrep is grown from that highest-weight space. For ``d = 2`` the block
    labels are ``(j, m)`` with ``J2 = 4 j (j + 1)`` and ``S_z = 2 m``.

    ``tol`` bounds the post-construction checks; ``cluster_tol`` is the
    relative eigenvalue-merging threshold.
    """
    d, n_particles = cset.d, cset.n_particles
    mats = [s.matrix for s in cset.operators]
    j2 = collective_j2(cset).matrix
    w, v = np.linalg.eigh(j2)

    spaces = []
    for group in _cluster(w, cluster_tol, "J2"):
        q = v[:, group]
        c2 = float(w[group].mean())
        if d >= 3 and n_particles >= 3:
            kq = q.conj().T @ _three_cycle_sum(q, d, n_particles)
            wk, vk = np.linalg.eigh(0.5 * (kq + kq.conj().T))
            for sub in _cluster(wk, cluster_tol, "3-cycle class sum"):
                spaces.append((q @ vk[:, sub], c2, float(wk[sub].mean())))
        else:
            spaces.append((q, c2, None))

    cartan = _cartan(cset, seed)
    blocks = []
    for q, c2, cubic in sorted(spaces, key=lambda s: (-s[1], -(s[2] or 0.0))):
        basis, n, m, weights = _factorize(q, mats, cartan, cluster_tol)
        if n * m <= COMMUTANT_CHECK_MAX:
            restricted = [basis.conj().T @ s @ basis for s in mats]
            cd = commutant_dimension(restricted)
            if cd != m * m:
                raise DegeneracyError(
                    "commutant dimension disagrees with multiplicity",
                    {"commutant_dim": cd, "multiplicity": m, "irrep_dim": n},
                )
        j_label = m_labels = None
        if d == 2:
            j_label = round(np.sqrt(1.0 + c2) - 1.0) / 2.0
            m_labels = tuple(float(round(x) / 2.0) for x in np.repeat(weights, m))
        blocks.append(DfsBlock(len(blocks), n, m, basis, c2, weights, cubic, j_label, m_labels))

    decomp = DfsDecomposition(d, n_particles, tuple(blocks), seed)
    checks = decomp.validate(cset)
    if checks["dimension_sum"] != cset.dim or max(checks["orthonormality"], checks["off_block"], checks["irrep_factorization"]) > tol:
        raise DegeneracyError("decomposition failed its consistency checks", checks)
    return decomp


# three-qudit logical operators -------------------------------------------------


@dataclass(frozen=True)
class ClosureReport:
    pairs: tuple
    coefficients: dict
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


@dataclass(frozen=True)
class LogicalOperators:
    x_bar: ManyBodyOperator
    y_bar: ManyBodyOperator
    z_bar: ManyBodyOperator
    d: int

    def as_dict(self):
        return {"X": self.x_bar, "Y": self.y_bar, "Z": self.z_bar}

    def closure(self, rcond: float = 1e-10) -> ClosureReport:
        """Fit each commutator onto ``span{X, Y, Z, I}``, cyclically."""
        ops = self.as_dict()
        eye = np.eye(self.x_bar.dim)
        span = [ops["X"].matrix, ops["Y"].matrix, ops["Z"].matrix, eye]
        pairs = (("X", "Y"), ("Y", "Z"), ("Z", "X"))
        coeffs, res = {}, {}
        for a, b in pairs:
            c = ops[a].matrix @ ops[b].matrix - ops[b].matrix @ ops[a].matrix
            coeff, r = span_residual(c, span, rcond)
            coeffs[a + b] = tuple(complex(x) for x in coeff)
            res[a + b] = r
        return ClosureReport(pairs, coeffs, res)


def logical_paulis(basis: GeneratorBasis, tensors: StructureTensors) -> LogicalOperators:
    """Encoded Pauli operators on three qudits (particles 0, 1, 2).

    ``X = (I2^(1,2) - I2^(0,2)) / (2 sqrt 3)``, ``Y = I3^(0,1,2) / (2 sqrt 3)``,
    ``Z = (I2^(1,2) + I2^(0,2) - 2 I2^(0,1)) / 6``.
    """
    def i2(a, b):
        return invariant_i2(basis, a, b, 3).matrix

    s3 = 2.0 * np.sqrt(3.0)
    i3 = invariant_i3(tensors, basis, 0, 1, 2, 3).matrix
    d = basis.d
    x = ManyBodyOperator(d, 3, (i2(1, 2) - i2(0, 2)) / s3, "Xbar", hermitian=True)
    y = ManyBodyOperator(d, 3, i3 / s3, "Ybar", hermitian=True)
    z = ManyBodyOperator(d, 3, (i2(1, 2) + i2(0, 2) - 2 * i2(0, 1)) / 6.0, "Zbar", hermitian=True)
    return LogicalOperators(x, y, z, d)


# exchange gate ------------------------------------------------------------------


def exchange_gate(basis: GeneratorBasis, alpha: int, beta: int, n_particles: int) -> ManyBodyOperator:
    """``U = exp(-i (pi/4) I2^(alpha,beta))``."""
    if alpha == beta:
        raise ParticleIndexError("exchange gate needs two distinct particles")
    i2 = invariant_i2(basis, alpha, beta, n_particles).matrix
    u = expm_structured(-1j * (np.pi / 4) * i2)
    return ManyBodyOperator(basis.d, n_particles, u, f"exp(-i pi/4 I2^({alpha},{beta}))")


def expected_exchange_phase(d: int) -> complex:
    return -1j * np.exp(1j * np.pi / (2 * d))


@dataclass(frozen=True)
class ExchangeEntry:
    p: int
    q: int
    amplitude: complex
    expected: complex
    error: float
    off_column: float


def exchange_phase_table(u: ManyBodyOperator, alpha: int, beta: int) -> list[ExchangeEntry]:
    """``<qp|U|pq>`` for every level pair on ``(alpha, beta)``, spectators in level 0."""
    d, n = u.d, u.n_particles
    stride = [d ** (n - 1 - k) for k in range(n)]
    expected = expected_exchange_phase(d)
    rows = []
    for p in range(d):
        for q in range(d):
            src = p * stride[alpha] + q * stride[beta]
            dst = q * stride[alpha] + p * stride[beta]
            col = u.matrix[:, src]
            amp = complex(col[dst])
            rest = np.delete(col, dst)
            rows.append(ExchangeEntry(p, q, amp, expected, abs(amp - expected), max_norm(rest)))
    return rows


# compatibility ----------------------------------------------------------------


@dataclass(frozen=True)
class BlockAction:
    block_id: int
    leakage_out: float
    multiplicity_factor_residual: float
    scalar_residual: float


@dataclass(frozen=True)
class CompatibilityReport:
    commutation_residual: float
    compatible: bool
    max_leakage: float
    leakage: dict
    blocks: tuple


def compatibility_check(h, decomp: DfsDecomposition, cset: CollectiveErrorSet, tol: float = 1e-10) -> CompatibilityReport:
    """Commutation with the collective set and leakage between DFS blocks."""
    m = h.matrix if isinstance(h, ManyBodyOperator) else np.asarray(h)
    if (decomp.d, decomp.n_particles) != (cset.d, cset.n_particles) or m.shape != (cset.dim, cset.dim):
        raise InconsistencyError("operator, decomposition and collective set must share (d, N)")
    comm = max(commutation_residuals(m, cset))
    leakage = {}
    for a in decomp.blocks:
        for b in decomp.blocks:
            if a.block_id != b.block_id:
                inner = a.basis.conj().T @ m @ b.basis
                leakage[(a.block_id, b.block_id)] = max_norm(a.basis @ inner @ b.basis.conj().T)
    actions = []
    for blk in decomp.blocks:
        proj = blk.basis @ blk.basis.conj().T
        out = max_norm((np.eye(cset.dim) - proj) @ m @ blk.basis)
        local = blk.project(m)
        scalar = max_norm(local - np.trace(local) / blk.dim * np.eye(blk.dim))
        actions.append(BlockAction(blk.block_id, out, blk.multiplicity_factor_residual(m), scalar))
    return CompatibilityReport(
        comm, comm <= tol, max(leakage.values(), default=0.0), leakage, tuple(actions)
    )
