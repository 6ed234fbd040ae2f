"""Generalized Gell-Mann basis of su(d) and its structure constants.

Generators are normalized as ``Tr(l_i l_j) = 2 delta_ij`` and multiply as

    l_i l_j = (2/d) delta_ij + (i f_ijk + d_ijk) l_k

with ``f`` totally antisymmetric and ``d`` totally symmetric. All indices
are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations

import numpy as np

from . import _backend
from .errors import InconsistencyError, InvalidDimensionError

ORDERING_TAG = "sym-pairs/antisym-pairs/diagonals"
SPARSITY_THRESHOLD = 1e-12
DEFAULT_TOL = 1e-10

IDENTITY_NAMES = (
    "normalization",
    "product_relation",
    "jacobi",
    "jacobi_like",
    "d_trace_zero",
    "df_orthogonal",
    "ff_contraction",
    "dd_contraction",
    "ff_product",
    "ddf_chain",
    "ddd_chain",
)


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GeneratorBasis:
    """The ``d**2 - 1`` Hermitian traceless generators, stacked as ``(n, d, d)``."""

    d: int
    generators: np.ndarray = field(repr=False)
    ordering_tag: str = ORDERING_TAG

    def __post_init__(self):
        object.__setattr__(self, "generators", _readonly(np.asarray(self.generators, dtype=np.complex128)))
        if self.generators.shape != (self.d * self.d - 1, self.d, self.d):
            raise InconsistencyError(f"expected {self.d * self.d - 1} generators of size {self.d}x{self.d}")

    @property
    def size(self) -> int:
        return self.d * self.d - 1

    def __len__(self):
        return self.size

    def __getitem__(self, i):
        return self.generators[i]

    def su2_triple(self) -> tuple[int, int, int]:
        """Indices of the Pauli-like triple acting on levels 0 and 1.

        These are the generators usually labelled 1, 2, 3 in the Gell-Mann
        numbering; for ``d == 2`` they are simply ``(0, 1, 2)``.
        """
        n_pairs = self.d * (self.d - 1) // 2
        return 0, n_pairs, 2 * n_pairs

    def diagonal_indices(self) -> list[int]:
        start = self.d * (self.d - 1)
        return list(range(start, self.size))


def build_basis(d: int) -> GeneratorBasis:
    """Canonical generalized Gell-Mann basis.

    Order: symmetric ``E_pq + E_qp`` for ``p < q`` (lexicographic), then
    antisymmetric ``-i(E_pq - E_qp)`` in the same order, then the diagonal
    generators ``sqrt(2/(m(m+1))) diag(1,...,1,-m,0,...,0)`` for ``m = 1..d-1``.
    """
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimensionError("d must be ≥ 2")
    d = int(d)
    pairs = [(p, q) for p in range(d) for q in range(p + 1, d)]
    gens = np.zeros((d * d - 1, d, d), dtype=np.complex128)
    k = 0
    for p, q in pairs:
        gens[k, p, q] = gens[k, q, p] = 1.0
        k += 1
    for p, q in pairs:
        gens[k, p, q] = -1j
        gens[k, q, p] = 1j
        k += 1
    for m in range(1, d):
        diag = np.zeros(d)
        diag[:m] = 1.0
        diag[m] = -m
        gens[k] = np.diag(diag * np.sqrt(2.0 / (m * (m + 1))))
        k += 1
    return GeneratorBasis(d, gens)


@dataclass(frozen=True)
class SparseTensor3:
    """Totally (anti)symmetric 3-tensor stored by canonical representatives.

    ``index`` holds sorted triples (strictly increasing for the antisymmetric
    case); every other entry follows from the symmetry, so the dense view is
    exactly (anti)symmetric.
    """

    size: int
    symmetry: str
    index: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.symmetry not in ("antisymmetric", "symmetric"):
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        object.__setattr__(self, "index", _readonly(np.asarray(self.index, dtype=np.int64).reshape(-1, 3)))
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=np.float64)))

    @property
    def nnz(self) -> int:
        return len(self.values)

    def entries(self, full=False):
        """Sorted ``(i, j, k, value)`` tuples, canonical or all nonzero."""
        if not full:
            return [(int(i), int(j), int(k), float(v)) for (i, j, k), v in zip(self.index, self.values)]
        out = {}
        for (i, j, k), v in zip(self.index, self.values):
            for perm in set(permutations((0, 1, 2))):
                key = tuple(int((i, j, k)[p]) for p in perm)
                out[key] = float(v) * _perm_sign(perm) if self.symmetry == "antisymmetric" else float(v)
        return [(*key, out[key]) for key in sorted(out)]

    @cached_property
    def dense(self) -> np.ndarray:
        t = np.zeros((self.size,) * 3)
        for i, j, k, v in self.entries(full=True):
            t[i, j, k] = v
        t.setflags(write=False)
        return t


def _perm_sign(perm):
    sign = 1
    p = list(perm)
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class StructureTensors:
    d: int
    f: SparseTensor3
    d_sym: SparseTensor3


def compute_structure_tensors(basis: GeneratorBasis, threshold: float = SPARSITY_THRESHOLD) -> StructureTensors:
    """``f_ijk = Im Tr(l_i l_j l_k) / 2`` and ``d_ijk = Re Tr(l_i l_j l_k) / 2``."""
    traces = _backend.triple_traces(basis.generators)
    n = basis.size
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    f_all = traces.imag / 2.0
    d_all = traces.real / 2.0

    strict = (i < j) & (j < k) & (np.abs(f_all) > threshold)
    loose = (i <= j) & (j <= k) & (np.abs(d_all) > threshold)
    f = SparseTensor3(n, "antisymmetric", np.argwhere(strict), f_all[strict])
    d_sym = SparseTensor3(n, "symmetric", np.argwhere(loose), d_all[loose])
    return StructureTensors(basis.d, f, d_sym)


@dataclass(frozen=True)
class IdentityReport:
    identity_name: str
    max_residual: float
    passed: bool
    d: int


def _identity_residuals(tensors: StructureTensors, basis: GeneratorBasis) -> dict[str, float]:
    d = basis.d
    n = basis.size
    L = basis.generators
    f = tensors.f.dense
    dd = tensors.d_sym.dense
    eye = np.eye(n)
    ein = lambda spec, *ops: np.einsum(spec, *ops, optimize=True)  # noqa: E731

    res = {}
    gram = ein("iab,jba->ij", L, L)
    res["normalization"] = max(np.abs(gram - 2 * eye).max(), np.abs(ein("iaa->i", L)).max())

    prod = ein("iab,jbc->ijac", L, L)
    recon = (2.0 / d) * ein("ij,ac->ijac", eye, np.eye(d)) + ein("ijk,kac->ijac", 1j * f + dd, L)
    res["product_relation"] = np.abs(prod - recon).max()

    res["jacobi"] = np.abs(
        ein("ilm,jkl->ijkm", f, f) + ein("jlm,kil->ijkm", f, f) + ein("klm,ijl->ijkm", f, f)
    ).max()
    res["jacobi_like"] = np.abs(
        ein("ilm,jkl->ijkm", f, dd) + ein("jlm,kil->ijkm", f, dd) + ein("klm,ijl->ijkm", f, dd)
    ).max()
    res["d_trace_zero"] = np.abs(ein("iik->k", dd)).max()
    res["df_orthogonal"] = np.abs(ein("ijk,ljk->il", dd, f)).max()
    res["ff_contraction"] = np.abs(ein("ijk,ljk->il", f, f) - d * eye).max()
    res["dd_contraction"] = np.abs(ein("ijk,ljk->il", dd, dd) - (d * d - 4) / d * eye).max()
    deltas = ein("ik,jl->ijkl", eye, eye) - ein("il,jk->ijkl", eye, eye)
    res["ff_product"] = np.abs(
        ein("ijm,klm->ijkl", f, f) - (2.0 / d) * deltas - (ein("ikm,jlm->ijkl", dd, dd) - ein("jkm,ilm->ijkl", dd, dd))
    ).max()
    res["ddf_chain"] = np.abs(ein("piq,qjr,rkp->ijk", dd, dd, f) - (d * d - 4) / (2 * d) * f).max()
    res["ddd_chain"] = np.abs(ein("piq,qjr,rkp->ijk", dd, dd, dd) - (d * d - 12) / (2 * d) * dd).max()
    return {k: float(v) for k, v in res.items()}


def verify_identities(tensors: StructureTensors, basis: GeneratorBasis, tol: float = DEFAULT_TOL) -> list[IdentityReport]:
    """Evaluate every algebraic identity of the basis; one report per identity."""
    if tensors.d != basis.d or tensors.f.size != basis.size:
        raise InconsistencyError(f"tensors are for d={tensors.d}, basis for d={basis.d}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    residuals = _identity_residuals(tensors, basis)
    return [IdentityReport(name, residuals[name], residuals[name] <= tol, basis.d) for name in IDENTITY_NAMES]


def reconstruct_products(tensors: StructureTensors, basis: GeneratorBasis) -> np.ndarray:
    """``l_i l_j`` rebuilt from the structure constants, shape ``(n, n, d, d)``."""
    n, d = basis.size, basis.d
    coeff = 1j * tensors.f.dense + tensors.d_sym.dense
    out = np.einsum("ijk,kab->ijab", coeff, basis.generators)
    out += (2.0 / d) * np.einsum("ij,ab->ijab", np.eye(n), np.eye(d))
    return out


def f_from_commutators(basis: GeneratorBasis) -> np.ndarray:
    """Dense ``f`` obtained by projecting ``[l_i, l_j] = 2i f_ijk l_k`` onto the basis."""
    L = basis.generators
    comm = np.einsum("iab,jbc->ijac", L, L) - np.einsum("jab,ibc->ijac", L, L)
    # Tr(l_k [l_i, l_j]) = 4i f_ijk
    return (np.einsum("ijab,kba->ijk", comm, L) / 4j).real
