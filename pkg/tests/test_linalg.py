import numpy as np
import pytest

from chanrob import linalg as la


def rand_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


def rand_state(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


MAX_ENT_2 = np.zeros((4, 4), dtype=complex)
for _i in range(2):
    for _j in range(2):
        MAX_ENT_2[_i * 2 + _i, _j * 2 + _j] = 0.5


def test_kron_identity():
    assert np.allclose(la.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_xx_corner():
    k = la.kron(la.PAULI_X, la.PAULI_X)
    assert k[0, 3] == 1


def test_pauli_sum_is_swap():
    s = 0.5 * sum(la.kron(p, p) for p in la.PAULIS)
    # SWAP|ij> = |ji> checked entrywise
    assert np.allclose(s, la.swap(2), atol=1e-15)


def test_swap_action():
    s = la.swap(2)
    v = np.kron([1, 0], [0, 1.0])  # |01>
    assert np.allclose(s @ v, np.kron([0, 1.0], [1, 0]))  # |10>


def test_partial_trace_max_entangled():
    red = la.partial_trace(MAX_ENT_2, (2, 2), side="first")
    assert np.allclose(red, np.eye(2) / 2, atol=1e-14)


def test_partial_trace_product():
    rng = np.random.default_rng(1)
    rho = rand_state(rng, 2)
    tau = rand_hermitian(rng, 2)
    m = la.kron(rho, tau)
    assert np.allclose(la.partial_trace(m, (2, 2), side="second"), rho * np.trace(tau))
    assert np.allclose(la.partial_trace(m, (2, 2), side="first"), tau * np.trace(rho))


def test_partial_trace_swap():
    # direct 4x4 arithmetic: Tr_first(SWAP/2) entry (k,l) = sum_i (SWAP/2)[(i,k),(i,l)]
    s = la.swap(2) / 2
    expect = np.zeros((2, 2), dtype=complex)
    for k in range(2):
        for l in range(2):
            expect[k, l] = sum(s[i * 2 + k, i * 2 + l] for i in range(2))
    got = la.partial_trace(s, (2, 2), side="first")
    assert np.allclose(got, expect)
    assert np.allclose(got, np.eye(2) / 2)


def test_partial_transpose_involution():
    rng = np.random.default_rng(2)
    m = rand_hermitian(rng, 6)
    for side in ("first", "second"):
        back = la.partial_transpose(la.partial_transpose(m, (2, 3), side), (2, 3), side)
        assert np.allclose(back, m, atol=1e-15)


def test_partial_transpose_max_entangled_is_swap():
    # 4x4 arithmetic oracle: PT_first permutes entries [(i,k),(j,l)] -> [(j,k),(i,l)]
    pt = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    pt[j * 2 + k, i * 2 + l] = MAX_ENT_2[i * 2 + k, j * 2 + l]
    assert np.allclose(la.partial_transpose(MAX_ENT_2, (2, 2), "first"), pt)
    assert np.allclose(pt, la.swap(2) / 2)


def test_partial_transpose_max_entangled_eigs():
    w, _ = la.eig_hermitian(la.partial_transpose(MAX_ENT_2, (2, 2), "first"))
    assert np.allclose(sorted(w), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_ops_trace_preserved_and_hermitian():
    rng = np.random.default_rng(3)
    m = rand_hermitian(rng, 4)
    pt = la.partial_transpose(m, (2, 2), "second")
    assert abs(np.trace(pt) - np.trace(m)) < 1e-13
    assert np.abs(pt - pt.conj().T).max() < 1e-13
    red = la.partial_trace(m, (2, 2), "first")
    assert abs(np.trace(red) - np.trace(m)) < 1e-13


def test_partial_transpose_commutes_with_trace_on_other_side():
    # transposing one factor then tracing it out leaves the untouched factor
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = rand_hermitian(rng, 4)
        a = la.partial_trace(la.partial_transpose(m, (2, 2), "first"), (2, 2), "first")
        assert np.allclose(a, la.partial_trace(m, (2, 2), "first"), atol=1e-12)
        c = la.partial_trace(la.partial_transpose(m, (2, 2), "second"), (2, 2), "second")
        assert np.allclose(c, la.partial_trace(m, (2, 2), "second"), atol=1e-12)


def test_eig_identity_and_pauli():
    w, _ = la.eig_hermitian(np.eye(2))
    assert np.allclose(w, [1, 1])
    w, _ = la.eig_hermitian(la.PAULI_X)
    assert np.allclose(w, [1, -1])


def test_eig_swap_characteristic_polynomial():
    # det(SWAP/2 - t) = (1/2 - t)^3 (-1/2 - t): roots 1/2 (x3), -1/2
    w, _ = la.eig_hermitian(la.swap(2) / 2)
    assert np.allclose(w, [0.5, 0.5, 0.5, -0.5], atol=1e-12)
    t = 0.37
    char = np.linalg.det(la.swap(2) / 2 - t * np.eye(4))
    assert abs(char - (0.5 - t) ** 3 * (-0.5 - t)) < 1e-12


def test_eig_reconstruction_random():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        m = rand_hermitian(rng, 4)
        w, v = la.eig_hermitian(m)
        assert np.linalg.norm((v * w) @ v.conj().T - m) < 1e-9
        assert np.linalg.norm(v.conj().T @ v - np.eye(4)) < 1e-10
        for k in range(4):
            assert np.linalg.norm(m @ v[:, k] - w[k] * v[:, k]) <= 1e-10 * max(1.0, np.linalg.norm(m))


def test_trace_norm_values():
    rng = np.random.default_rng(6)
    rho = rand_state(rng, 3)
    assert abs(la.trace_norm(rho) - 1) < 1e-12
    assert abs(la.trace_norm(la.swap(2) / 2) - 2) < 1e-12
    assert la.trace_norm(np.zeros((2, 2))) == 0


def test_trace_norm_triangle_inequality():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = rand_hermitian(rng, 4)
        b = rand_hermitian(rng, 4)
        assert la.trace_norm(a + b) <= la.trace_norm(a) + la.trace_norm(b) + 1e-10


def test_fidelity_self_and_orthogonal():
    rng = np.random.default_rng(8)
    rho = rand_state(rng, 2)
    assert abs(la.fidelity(rho, rho) - 1) < 1e-10
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    assert la.fidelity(p0, p1) < 1e-12


def test_fidelity_pure_vs_mixed_closed_form():
    # F(|0><0|, 1/2) = <0| 1/2 |0> = 1/2
    p0 = np.diag([1.0, 0.0]).astype(complex)
    assert abs(la.fidelity(p0, np.eye(2) / 2) - 0.5) < 1e-12


def test_fidelity_symmetric_and_subnormalized():
    rng = np.random.default_rng(9)
    a, b = rand_state(rng, 2), rand_state(rng, 2)
    assert abs(la.fidelity(a, b) - la.fidelity(b, a)) < 1e-10
    assert abs(la.fidelity(0.5 * a, 0.5 * a) - 0.25) < 1e-10


def test_fidelity_rejects_indefinite():
    with pytest.raises(la.LinalgError):
        la.fidelity(la.PAULI_Z, np.eye(2))


def test_hermitian_validation():
    with pytest.raises(la.LinalgError):
        la.hermitian(np.array([[0, 1], [0, 0]], dtype=complex))
    m = la.hermitian(np.eye(2) + 1e-14 * np.array([[0, 1], [0, 0]]))
    assert np.abs(m - m.conj().T).max() == 0


def test_dimension_mismatch_raises():
    with pytest.raises(la.LinalgError):
        la.partial_trace(np.eye(5), (2, 2))
    with pytest.raises(la.LinalgError):
        la.partial_transpose(np.eye(6), (2, 2))
