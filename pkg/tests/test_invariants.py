import itertools

import numpy as np
import pytest

from suinv.errors import InsufficientParticlesError, InvalidOrderError, ParticleIndexError
from suinv.invariants import (
    casimir_c2,
    casimir_c3,
    casimir_cn,
    collective_j2,
    collective_j3,
    commutation_table,
    completeness_probe,
    invariant_i2,
    invariant_i3,
    invariant_i4,
    j2_decomposition_residual,
    three_particle_invariants,
    verify_j3_decomposition,
)
from suinv.multiparticle import commutation_residuals, span_residual

from conftest import PAULI, basis_for, cset_for, tensors_for

SWAP = np.eye(4)[[0, 2, 1, 3]]


def kron_all(*ops):
    out = np.eye(1)
    for o in ops:
        out = np.kron(out, o)
    return out


@pytest.mark.parametrize("d,expected", [(2, 3.0), (3, 16 / 3)])
def test_c2_value(d, expected):
    brute = sum(g @ g for g in basis_for(d).generators)
    np.testing.assert_allclose(casimir_c2(basis_for(d)), expected * np.eye(d), atol=1e-14)
    np.testing.assert_allclose(brute, expected * np.eye(d), atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_c2_general_value_and_centrality(d):
    c2 = casimir_c2(basis_for(d))
    np.testing.assert_allclose(c2, 2 * (d * d - 1) / d * np.eye(d), atol=1e-13)
    for g in basis_for(d).generators:
        assert np.abs(c2 @ g - g @ c2).max() <= 1e-12


def test_c3_d2_vanishes():
    assert np.abs(casimir_c3(basis_for(2), tensors_for(2))).max() == 0


def test_c3_d3_brute_force():
    L = basis_for(3).generators
    dd = tensors_for(3).d_sym.dense
    brute = np.zeros((3, 3), complex)
    for i, j, k in itertools.product(range(8), repeat=3):
        if dd[i, j, k]:
            brute += dd[i, j, k] * L[i] @ L[j] @ L[k]
    c3 = casimir_c3(basis_for(3), tensors_for(3))
    np.testing.assert_allclose(c3, brute, atol=1e-13)
    # brute-force value, frozen
    np.testing.assert_allclose(c3, 80 / 9 * np.eye(3), atol=1e-13)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_c3_centrality(d):
    c3 = casimir_c3(basis_for(d), tensors_for(d))
    for g in basis_for(d).generators:
        assert np.abs(c3 @ g - g @ c3).max() <= 1e-10


def test_cn_degenerate_orders():
    b, t = basis_for(3), tensors_for(3)
    np.testing.assert_array_equal(casimir_cn(b, t, 3), casimir_c3(b, t))
    np.testing.assert_array_equal(casimir_cn(b, t, 2), casimir_c2(b))
    with pytest.raises(InvalidOrderError):
        casimir_cn(b, t, 1)


def test_c4_d3_brute_force():
    L = basis_for(3).generators
    dd = tensors_for(3).d_sym.dense
    brute = np.zeros((3, 3), complex)
    for i1, i2, i3, i4 in itertools.product(range(8), repeat=4):
        c = sum(dd[i1, i2, k] * dd[k, i3, i4] for k in range(8))
        if c:
            brute += c * L[i1] @ L[i2] @ L[i3] @ L[i4]
    c4 = casimir_cn(basis_for(3), tensors_for(3), 4)
    np.testing.assert_allclose(c4, brute, atol=1e-12)
    np.testing.assert_allclose(c4, 400 / 27 * np.eye(3), atol=1e-12)


@pytest.mark.parametrize("d,n", [(3, 5), (4, 4), (4, 5), (5, 4)])
def test_cn_centrality(d, n):
    c = casimir_cn(basis_for(d), tensors_for(d), n)
    for g in basis_for(d).generators:
        assert np.abs(c @ g - g @ c).max() <= 1e-10


def test_j2_examples():
    np.testing.assert_allclose(collective_j2(cset_for(2, 1)).matrix, 3 * np.eye(2), atol=1e-15)
    j2 = collective_j2(cset_for(2, 2))
    brute = sum((np.kron(p, np.eye(2)) + np.kron(np.eye(2), p)) @ (np.kron(p, np.eye(2)) + np.kron(np.eye(2), p)) for p in PAULI)
    np.testing.assert_allclose(j2.matrix, brute, atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(j2.matrix), [0, 8, 8, 8], atol=1e-12)
    assert j2.kind == "J2" and j2.normalization == "unit-contraction"


def test_i2_qubit_pair_is_swap():
    i2 = invariant_i2(basis_for(2), 0, 1, 2)
    np.testing.assert_allclose(i2.matrix, 2 * SWAP - np.eye(4), atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(i2.matrix), [-3, 1, 1, 1], atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_i2_is_swap_shifted(d):
    """sum_i l_i ⊗ l_i = 2 SWAP - (2/d) I, the completeness relation of the basis."""
    swap = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    np.testing.assert_allclose(invariant_i2(basis_for(d), 0, 1, 2).matrix, 2 * swap - 2 / d * np.eye(d * d), atol=1e-14)


def test_i2_errors():
    with pytest.raises(ParticleIndexError):
        invariant_i2(basis_for(2), 1, 1, 3)
    with pytest.raises(ParticleIndexError):
        invariant_i2(basis_for(2), 0, 3, 3)


@pytest.mark.parametrize("d,n", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_i2_centrality_and_j2_decomposition(d, n):
    cs = cset_for(d, n)
    for a, b in itertools.combinations(range(n), 2):
        assert max(commutation_residuals(invariant_i2(basis_for(d), a, b, n).operator, cs)) <= 1e-10
    assert j2_decomposition_residual(basis_for(d), n, cs) <= 1e-12


def test_i3_qubits_brute_force():
    eps_sum = np.zeros((8, 8), complex)
    for (i, j, k) in itertools.permutations(range(3)):
        sign = 1 if (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] else -1
        eps_sum += sign * kron_all(PAULI[i], PAULI[j], PAULI[k])
    i3 = invariant_i3(tensors_for(2), basis_for(2), 0, 1, 2, 3)
    np.testing.assert_allclose(i3.matrix, eps_sum, atol=1e-14)
    assert np.abs(i3.matrix - i3.matrix.conj().T).max() <= 1e-12
    assert max(commutation_residuals(i3.operator, cset_for(2, 3))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_i3_particle_antisymmetry(d):
    b, t = basis_for(d), tensors_for(d)
    a = invariant_i3(t, b, 0, 1, 2, 3).matrix
    np.testing.assert_allclose(invariant_i3(t, b, 1, 0, 2, 3).matrix, -a, atol=1e-14)
    np.testing.assert_allclose(invariant_i3(t, b, 0, 2, 1, 3).matrix, -a, atol=1e-14)
    np.testing.assert_allclose(invariant_i3(t, b, 1, 2, 0, 3).matrix, a, atol=1e-14)


def test_i4_qubits_vanish():
    assert np.abs(invariant_i4(tensors_for(2), basis_for(2), 0, 1, 2, 3).matrix).max() == 0


def test_i4_qutrits():
    b, t = basis_for(3), tensors_for(3)
    i4 = invariant_i4(t, b, 0, 1, 2, 3)
    assert i4.matrix.shape == (27, 27)
    assert np.abs(i4.matrix - i4.matrix.conj().T).max() <= 1e-12
    assert max(commutation_residuals(i4.operator, cset_for(3, 3))) <= 1e-10
    for perm in itertools.permutations(range(3)):
        np.testing.assert_allclose(invariant_i4(t, b, *perm, 3).matrix, i4.matrix, atol=1e-14)


def test_three_body_errors():
    b, t = basis_for(3), tensors_for(3)
    with pytest.raises(ParticleIndexError):
        invariant_i3(t, b, 0, 0, 1, 3)
    with pytest.raises(ParticleIndexError):
        invariant_i4(t, b, 0, 1, 1, 3)
    with pytest.raises(InsufficientParticlesError):
        invariant_i3(t, b, 0, 1, 2, 2)


def test_three_body_backend_independent(backend):
    b, t = basis_for(3), tensors_for(3)
    i3 = invariant_i3(t, b, 2, 0, 3, 4).matrix
    i4 = invariant_i4(t, b, 1, 3, 0, 4).matrix
    # oracle: explicit Kronecker sums
    def explicit(tensor, parts):
        out = np.zeros((81, 81), complex)
        for i, j, k in zip(*np.nonzero(tensor)):
            ops = [np.eye(3)] * 4
            for p, g in zip(parts, (i, j, k)):
                ops[p] = b.generators[g]
            out += tensor[i, j, k] * kron_all(*ops)
        return out
    np.testing.assert_allclose(i3, explicit(t.f.dense, (2, 0, 3)), atol=1e-12)
    np.testing.assert_allclose(i4, explicit(t.d_sym.dense, (1, 3, 0)), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_j3_decomposition(d):
    rep = verify_j3_decomposition(basis_for(d), tensors_for(d), 3)
    assert rep.expansion_residual <= 1e-10
    for cls in rep.classes.values():
        assert cls.residual <= 1e-8 and cls.term_residual <= 1e-8
        assert cls.commutation_residual <= 1e-10
    # every single all-different term is a nonzero multiple of I3 built on the same particles
    coeffs = rep.classes["all_different"].term_coefficients
    assert len(coeffs) == 6 and all(abs(c[0]) > 1 for c in coeffs.values())


def test_j3_is_multiple_of_j2():
    # fixture from brute-force expansion: J3 = -i (d^2 / 2) J2
    for d, n in [(2, 2), (2, 3), (3, 3)]:
        cs = cset_for(d, n)
        coeff, res = span_residual(collective_j3(cs, tensors_for(d)).matrix, [collective_j2(cs).matrix])
        assert res <= 1e-10
        assert coeff[0] == pytest.approx(-0.5j * d * d)


def test_j3_decomposition_needs_three():
    with pytest.raises(InsufficientParticlesError):
        verify_j3_decomposition(basis_for(2), tensors_for(2), 2)


@pytest.mark.parametrize("d,expected", [(2, 5), (3, 6)])
def test_completeness_probe(d, expected):
    probe = completeness_probe(basis_for(d), tensors_for(d))
    assert probe.commutant_dim == probe.generated_dim == expected
    assert probe.complete


def test_commutation_table_not_all_commuting():
    invs = three_particle_invariants(basis_for(3), tensors_for(3))
    table = commutation_table(invs)
    assert table.max() > 1.0
    cs = cset_for(3, 3)
    assert max(max(commutation_residuals(i.operator, cs)) for i in invs) <= 1e-10


@pytest.mark.parametrize("d,n", [(2, 2), (3, 2), (3, 3)])
def test_j2_ff_contraction_normalization(d, n):
    cs = cset_for(d, n)
    f = tensors_for(d).f.dense
    mats = cs.matrices()
    ff = np.einsum("ijk,kli,jab,lbc->ac", f, f, mats, mats)
    # f_kli = -f_lki, so the contraction picks up a sign against sum f f = d delta
    np.testing.assert_allclose(ff, -d * collective_j2(cs).matrix, atol=1e-10)
