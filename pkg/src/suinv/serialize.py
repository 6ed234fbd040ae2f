"""JSON-ready dictionaries for every exported object (indices are 0-based)."""

from __future__ import annotations

import numpy as np

from .multiparticle import ManyBodyOperator
from .su_basis import GeneratorBasis, StructureTensors


def _f(x) -> float:
    x = float(x)
    return 0.0 if x == 0 else x


def _mat(m):
    m = np.asarray(m)
    return [[_f(x) for x in row] for row in m.real], [[_f(x) for x in row] for row in m.imag]


def complex_pair(z):
    return [_f(np.real(z)), _f(np.imag(z))]


def basis_to_dict(basis: GeneratorBasis) -> dict:
    gens = []
    for i, g in enumerate(basis.generators):
        re, im = _mat(g)
        gens.append({"index": i, "re": re, "im": im})
    return {"d": basis.d, "ordering": basis.ordering_tag, "indexing": "0-based", "generators": gens}


def tensor_to_dict(tensors: StructureTensors, which: str = "f", full: bool = False) -> dict:
    t = {"f": tensors.f, "d": tensors.d_sym}[which]
    return {
        "d": tensors.d,
        "tensor": which,
        "symmetry": t.symmetry,
        "canonical": not full,
        "entries": [[i, j, k, _f(v)] for i, j, k, v in t.entries(full=full)],
    }


def operator_to_dict(op: ManyBodyOperator) -> dict:
    re, im = _mat(op.matrix)
    return {"d": op.d, "n": op.n_particles, "label": op.label, "re": re, "im": im}


def operator_from_dict(data: dict) -> ManyBodyOperator:
    mat = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return ManyBodyOperator(int(data["d"]), int(data["n"]), mat, data.get("label", ""))


def invariant_to_dict(inv, centrality_residual: float) -> dict:
    m = inv.matrix
    if inv.operator.hermitian:
        spectrum = np.linalg.eigvalsh(m)
        spectrum = [_f(x) for x in spectrum]
    else:
        ev = np.linalg.eigvals(m)
        ev = ev[np.lexsort((ev.real, ev.imag))]
        spectrum = [complex_pair(z) for z in ev]
    out = {
        "kind": inv.kind,
        "particles": list(inv.particles),
        "d": inv.operator.d,
        "n": inv.operator.n_particles,
        "normalization": inv.normalization,
        "spectrum": spectrum,
        "centrality_residual": _f(centrality_residual),
    }
    if inv.kind == "J2":
        # sum f_ijk f_kli S_j S_l = -d * J2, the other common normalization
        out["ff_contraction_scale"] = -inv.operator.d
    return out


def decomposition_to_dict(decomp, include_basis: bool = True) -> dict:
    blocks = []
    for b in decomp.blocks:
        entry = {
            "id": b.block_id,
            "irrep_dim": b.irrep_dim,
            "multiplicity": b.multiplicity,
            "casimir_value": _f(b.casimir_value),
        }
        if b.cubic_value is not None:
            entry["three_cycle_value"] = _f(b.cubic_value)
        if b.j_label is not None:
            entry["j_label"] = b.j_label
            entry["m_labels"] = list(b.m_labels)
        if include_basis:
            # one entry per basis vector (column), ordered (irrep index, multiplicity index)
            entry["basis"] = [[complex_pair(z) for z in col] for col in b.basis.T]
        blocks.append(entry)
    return {"d": decomp.d, "n": decomp.n_particles, "seed": decomp.seed, "blocks": blocks}
