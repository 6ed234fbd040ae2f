from math import comb

import numpy as np
import pytest

from suinv.dfs import (
    _cluster,
    compatibility_check,
    decompose,
    exchange_gate,
    exchange_phase_table,
    expected_exchange_phase,
    logical_paulis,
)
from suinv.errors import DegeneracyError, InconsistencyError, ParticleIndexError
from suinv.invariants import collective_j2
from suinv.multiparticle import embed, span_residual

from conftest import PAULI, basis_for, cset_for, tensors_for


def qubit_multiplicities(n):
    """Angular-momentum addition: multiplicity of total spin j among n spin-1/2."""
    out = {}
    j = n / 2
    while j >= 0:
        k = int(round(n / 2 - j))
        out[j] = comb(n, k) - (comb(n, k - 1) if k >= 1 else 0)
        j -= 1
    return out


def test_multiplicity_oracle_sanity():
    assert qubit_multiplicities(3) == {1.5: 1, 0.5: 2}
    for n in range(1, 9):
        assert sum((2 * j + 1) * m for j, m in qubit_multiplicities(n).items()) == 2 ** n


def test_two_qubits_singlet_triplet():
    dec = decompose(cset_for(2, 2))
    assert [(b.irrep_dim, b.multiplicity) for b in dec.blocks] == [(3, 1), (1, 1)]
    singlet = dec.blocks[1].basis[:, 0]
    expected = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert abs(abs(np.vdot(expected, singlet)) - 1) <= 1e-12


def test_three_qubits_noiseless_qubit():
    dec = decompose(cset_for(2, 3))
    assert [(b.irrep_dim, b.multiplicity, b.j_label) for b in dec.blocks] == [(4, 1, 1.5), (2, 2, 0.5)]
    assert [b.multiplicity for b in dec.noiseless_blocks()] == [2]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_qubit_multiplicities_and_labels(n):
    cs = cset_for(2, n)
    dec = decompose(cs)
    got = {b.j_label: b.multiplicity for b in dec.blocks}
    assert got == qubit_multiplicities(n)
    assert sum(b.irrep_dim * b.multiplicity for b in dec.blocks) == 2 ** n
    sz = cs[2].matrix
    for b in dec.blocks:
        assert b.irrep_dim == int(2 * b.j_label + 1)
        assert b.casimir_value == pytest.approx(4 * b.j_label * (b.j_label + 1), abs=1e-9)
        for col, m in zip(b.basis.T, b.m_labels):
            assert np.abs(sz @ col - 2 * m * col).max() <= 1e-10
    checks = dec.validate(cs)
    assert checks["orthonormality"] <= 1e-10
    assert checks["off_block"] <= 1e-10
    assert checks["irrep_factorization"] <= 1e-10


@pytest.mark.parametrize("d,n,expected", [
    (3, 2, [(6, 1), (3, 1)]),
    (3, 3, [(10, 1), (8, 2), (1, 1)]),
    (3, 4, [(15, 1), (15, 3), (6, 2), (3, 3)]),
    (4, 3, [(20, 1), (20, 2), (4, 1)]),
])
def test_qudit_block_structure(d, n, expected):
    """Dimensions of SU(d) irreps in (C^d)^n against the hook-length oracle."""
    cs = cset_for(d, n)
    dec = decompose(cs)
    assert sorted((b.irrep_dim, b.multiplicity) for b in dec.blocks) == sorted(expected)
    checks = dec.validate(cs)
    assert checks["dimension_sum"] == d ** n
    assert max(checks["orthonormality"], checks["off_block"], checks["irrep_factorization"]) <= 1e-10


def test_j2_acts_as_scalar_on_blocks():
    cs = cset_for(3, 3)
    dec = decompose(cs)
    j2 = collective_j2(cs)
    rep = compatibility_check(j2.operator, dec, cs)
    assert rep.compatible and rep.max_leakage <= 1e-10
    assert max(a.scalar_residual for a in rep.blocks) <= 1e-10


def test_decomposition_deterministic():
    a = decompose(cset_for(3, 3), seed=4)
    b = decompose(cset_for(3, 3), seed=4)
    for x, y in zip(a.blocks, b.blocks):
        np.testing.assert_array_equal(x.basis, y.basis)


def test_phase_convention():
    dec = decompose(cset_for(2, 4))
    for b in dec.blocks:
        t = b.basis.reshape(-1, b.irrep_dim, b.multiplicity)
        for vec in list(t[:, :, 0].T) + list(t[:, 0, :].T):
            lead = vec[np.flatnonzero(np.abs(vec) > 1e-10 * np.abs(vec).max())[0]]
            assert abs(lead.imag) <= 1e-12 and lead.real > 0


def test_cluster_ambiguity_raises():
    with pytest.raises(DegeneracyError) as err:
        _cluster(np.array([0.0, 5e-8, 3.0]), 1e-8, "probe")
    assert err.value.diagnostics["quantity"] == "probe"
    assert [len(g) for g in _cluster(np.array([0.0, 1e-12, 3.0]), 1e-8, "probe")] == [2, 1]


@pytest.mark.parametrize("d", [2, 3])
def test_logical_operators(d):
    logical = logical_paulis(basis_for(d), tensors_for(d))
    cs = cset_for(d, 3)
    dec = decompose(cs)
    closure = logical.closure()
    assert closure.max_residual <= 1e-8
    # fitted closure constants, frozen: [X, Y] = 2i Z cyclically
    for key, coeff in closure.coefficients.items():
        target = {"XY": 2, "YZ": 0, "ZX": 1}[key]
        expect = np.zeros(4, complex)
        expect[target] = 2j
        np.testing.assert_allclose(coeff, expect, atol=1e-10)
    for op in logical.as_dict().values():
        rep = compatibility_check(op, dec, cs)
        assert rep.commutation_residual <= 1e-10 and rep.max_leakage <= 1e-10
        assert max(a.multiplicity_factor_residual for a in rep.blocks) <= 1e-8


def test_logical_qubit_is_pauli_algebra():
    logical = logical_paulis(basis_for(2), tensors_for(2))
    (block,) = decompose(cset_for(2, 3)).noiseless_blocks()
    hs = [block.multiplicity_action(op) for op in logical.as_dict().values()]
    for h in hs:
        np.testing.assert_allclose(h @ h, np.eye(2), atol=1e-12)
        assert abs(np.trace(h)) <= 1e-12
    np.testing.assert_allclose(hs[0] @ hs[1], 1j * hs[2], atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_exchange_gate_phases(d):
    u = exchange_gate(basis_for(d), 0, 1, 2)
    expected = -1j * np.exp(1j * np.pi / (2 * d))
    assert expected_exchange_phase(d) == pytest.approx(expected)
    table = exchange_phase_table(u, 0, 1)
    assert len(table) == d * d
    for e in table:
        # the p = q case follows the same phase: measured, not assumed
        assert e.error <= 1e-10 and e.off_column <= 1e-10


def test_exchange_gate_on_spectators():
    u = exchange_gate(basis_for(3), 2, 0, 3)
    for e in exchange_phase_table(u, 2, 0):
        assert e.error <= 1e-10 and e.off_column <= 1e-10
    with pytest.raises(ParticleIndexError):
        exchange_gate(basis_for(3), 1, 1, 3)


def test_exchange_matches_direct_swap_d2():
    u = exchange_gate(basis_for(2), 0, 1, 2).matrix
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(u, -1j * np.exp(1j * np.pi / 4) * swap, atol=1e-12)


def test_compatibility_of_local_operator():
    cs = cset_for(2, 3)
    dec = decompose(cs)
    rep = compatibility_check(embed(PAULI[0], 0, 3), dec, cs)
    assert not rep.compatible and rep.commutation_residual > 0.1
    assert rep.max_leakage > 0.1


def test_compatibility_shape_mismatch():
    with pytest.raises(InconsistencyError):
        compatibility_check(np.eye(4), decompose(cset_for(2, 3)), cset_for(2, 3))


def test_block_irrep_action_matches_spin():
    cs = cset_for(2, 3)
    (block,) = decompose(cs).noiseless_blocks()
    for s in cs.operators:
        assert block.irrep_factor_residual(s) <= 1e-12
        a = block.project(s).reshape(2, 2, 2, 2)[:, 0, :, 0]
        _, res = span_residual(a, list(PAULI))
        assert res <= 1e-12
