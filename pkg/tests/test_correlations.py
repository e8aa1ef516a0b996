import numpy as np
import pytest

from chanrob import channels as ch
from chanrob import correlations as co
from chanrob import linalg as la


PAULIS3 = ch.pauli_measurements()


def test_spatial_assemblage_product_state():
    rng = np.random.default_rng(0)
    rho = ch.random_state(rng).matrix
    tau = ch.random_state(rng).matrix
    state = ch.DensityOperator(la.kron(rho, tau))
    asm = co.spatial_assemblage(state, PAULIS3)
    for x in range(3):
        for a in range(2):
            w = np.trace(rho @ PAULIS3.effect(x, a)).real
            assert np.abs(asm.member(x, a) - w * tau).max() < 1e-10


def test_spatial_assemblage_max_entangled_transpose_rule():
    asm = co.spatial_assemblage(ch.max_entangled(2), PAULIS3)
    for x in range(3):
        for a in range(2):
            expect = PAULIS3.effect(x, a).T / 2
            assert np.abs(asm.member(x, a) - expect).max() < 1e-12


def test_spatial_assemblage_isotropic_closed_form():
    v = 0.6
    asm = co.spatial_assemblage(ch.isotropic_state(v), PAULIS3)
    for x in range(3):
        for a in range(2):
            # 4x4 arithmetic oracle: v * proj^T/2 + (1-v) * (I/2 Tr proj)/2... =
            expect = v * PAULIS3.effect(x, a).T / 2 + (1 - v) * np.eye(2) / 4
            assert np.abs(asm.member(x, a) - expect).max() < 1e-12


def test_temporal_assemblage_identity_channel():
    pdo = ch.pdo_of_channel(ch.identity_channel(2))
    asm = co.temporal_assemblage(pdo, PAULIS3)
    for x in range(3):
        for a in range(2):
            assert np.abs(asm.member(x, a) - PAULIS3.effect(x, a) / 2).max() < 1e-12


def test_temporal_assemblage_depolarizing_pattern():
    v = 0.45
    pdo = ch.pdo_of_channel(ch.depolarizing(v))
    asm = co.temporal_assemblage(pdo, PAULIS3)
    for x, op in enumerate((la.PAULI_X, la.PAULI_Y, la.PAULI_Z)):
        for a, sign in enumerate((1, -1)):
            expect = (np.eye(2) + v * sign * op) / 4
            assert np.abs(asm.member(x, a) - expect).max() < 1e-12


def test_temporal_assemblage_v0_single_hidden_state():
    pdo = ch.pdo_of_channel(ch.depolarizing(0.0))
    asm = co.temporal_assemblage(pdo, PAULIS3)
    for x in range(3):
        for a in range(2):
            assert np.abs(asm.member(x, a) - np.eye(2) / 4).max() < 1e-12


def test_temporal_route_equality_random_channels():
    rng = np.random.default_rng(1)
    for _ in range(100):
        e = ch.random_channel(rng)
        pdo = ch.pdo_of_channel(e)
        via_pdo = co.temporal_assemblage(pdo, PAULIS3)
        direct = co.temporal_assemblage_of_channel(e, PAULIS3)
        for x in range(3):
            for a in range(2):
                assert np.abs(via_pdo.member(x, a) - direct.member(x, a)).max() < 1e-10


def test_assemblage_no_signaling_by_construction():
    rng = np.random.default_rng(2)
    for _ in range(50):
        e = ch.random_channel(rng)
        asm = co.temporal_assemblage(ch.pdo_of_channel(e), PAULIS3)
        assert asm.no_signaling_violation() < 1e-8
        assert not asm.flags


def test_assemblage_flags_signaling_but_keeps_object():
    eye = np.eye(2, dtype=complex) / 4
    bad = [[eye, eye], [eye + 0.01 * la.PAULI_Z, eye - 0.005 * la.PAULI_Z]]
    asm = co.Assemblage(bad)
    assert any("no-signaling" in f for f in asm.flags)
    with pytest.raises(co.CorrelationError):
        co.Assemblage(bad, strict=True)


def test_channel_steering_identity():
    pdo = ch.pdo_of_channel(ch.identity_channel(2))
    asm = co.channel_steering_assemblage(pdo, PAULIS3)
    # SWAP algebra oracle: Tr_second[(1 ⊗ M)(SWAP/2)] = M/2
    s = la.swap(2) / 2
    for y in range(3):
        for b in range(2):
            oracle = la.partial_trace(la.kron(np.eye(2), PAULIS3.effect(y, b)) @ s, (2, 2), "second")
            assert np.abs(asm.member(y, b) - oracle).max() < 1e-12
            assert np.abs(asm.member(y, b) - PAULIS3.effect(y, b) / 2).max() < 1e-12


def test_channel_steering_depolarizing_dual_arithmetic():
    v = 0.37
    pdo = ch.pdo_of_channel(ch.depolarizing(v))
    asm = co.channel_steering_assemblage(pdo, PAULIS3)
    for y in range(3):
        for b in range(2):
            m = PAULIS3.effect(y, b)
            expect = (v * m + (1 - v) * np.trace(m).real * np.eye(2) / 2) / 2
            assert np.abs(asm.member(y, b) - expect).max() < 1e-10


def test_channel_steering_v0_trivial():
    pdo = ch.pdo_of_channel(ch.depolarizing(0.0))
    asm = co.channel_steering_assemblage(pdo, PAULIS3)
    for y in range(3):
        for b in range(2):
            assert np.abs(asm.member(y, b) - np.eye(2) / 4).max() < 1e-12


def test_channel_steering_matches_dual_map_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        e = ch.random_channel(rng)
        asm = co.channel_steering_assemblage(ch.pdo_of_channel(e), PAULIS3)
        for y in range(3):
            for b in range(2):
                expect = e.dual_apply(PAULIS3.effect(y, b)) / 2
                assert np.abs(asm.member(y, b) - expect).max() < 1e-10


def test_correlation_identity_z_then_z():
    pdo = ch.pdo_of_channel(ch.identity_channel(2))
    z = ch.MeasurementCollection((PAULIS3.povms[2],))
    t = co.correlation_from_pdo(pdo, z, z)
    assert abs(t.probs[0, 0, 0, 0] - 0.5) < 1e-12
    assert abs(t.probs[0, 0, 1, 1] - 0.5) < 1e-12
    assert t.probs[0, 0, 0, 1] < 1e-12


def test_correlation_chsh_correlators_and_linearity():
    t0, t1 = ch.chsh_temporal_settings()
    for v in np.linspace(0, 1, 21):
        pdo = ch.pdo_of_channel(ch.depolarizing(v))
        table = co.correlation_from_pdo(pdo, t0, t1)
        for x in range(2):
            for y in range(2):
                expect = v / np.sqrt(2) * (1 if (x, y) != (1, 1) else -1)
                assert abs(table.correlator(x, y) - expect) < 1e-10
        b = co.chsh_value(table)
        assert abs(b - v * 2 * np.sqrt(2)) < 1e-9


def test_chsh_quantum_bound_and_local_crossing():
    t0, t1 = ch.chsh_temporal_settings()
    table = co.correlation_from_pdo(ch.pdo_of_channel(ch.depolarizing(1.0)), t0, t1)
    assert abs(co.chsh_value(table) - 2 * np.sqrt(2)) < 1e-9
    table = co.correlation_from_pdo(ch.pdo_of_channel(ch.depolarizing(1 / np.sqrt(2))), t0, t1)
    assert abs(co.chsh_value(table) - 2.0) < 1e-9
    table = co.correlation_from_pdo(ch.pdo_of_channel(ch.depolarizing(0.0)), t0, t1)
    assert abs(co.chsh_value(table)) < 1e-12
    assert np.abs(table.probs - 0.25).max() < 1e-12


def test_correlation_consistency_with_assemblage():
    rng = np.random.default_rng(4)
    t0, t1 = ch.chsh_temporal_settings()
    for _ in range(20):
        e = ch.random_channel(rng)
        pdo = ch.pdo_of_channel(e)
        table = co.correlation_from_pdo(pdo, t0, t1)
        asm = co.temporal_assemblage(pdo, t0)
        for x in range(2):
            for y in range(2):
                for a in range(2):
                    for b in range(2):
                        alt = np.trace(t1.effect(y, b) @ asm.member(x, a)).real
                        assert abs(table.probs[x, y, a, b] - alt) < 1e-12


def test_correlation_marginal_x_independent_unital():
    rng = np.random.default_rng(5)
    t0, t1 = ch.chsh_temporal_settings()
    for _ in range(20):
        e = ch.random_unitary_channel(rng)
        table = co.correlation_from_pdo(ch.pdo_of_channel(e), t0, t1)
        marg = table.probs.sum(axis=2)  # p(b|x,y)
        assert np.abs(marg[0] - marg[1]).max() < 1e-9


def test_chsh_wrong_arity():
    pdo = ch.pdo_of_channel(ch.identity_channel(2))
    t = co.correlation_from_pdo(pdo, PAULIS3, PAULIS3)
    with pytest.raises(co.CorrelationError):
        co.chsh_value(t)


def test_enumerate_deterministic_counts():
    assert len(co.enumerate_deterministic(3, 2)) == 8
    assert len(co.enumerate_deterministic(2, 2)) == 4
    da, db = co.enumerate_deterministic(2, 2, parties=2)
    assert len(da) * len(db) == 16
    strategies = co.enumerate_deterministic(3, 2)
    assert len(set(strategies.assignments)) == 8  # duplicate-free
    with pytest.raises(co.CorrelationError):
        co.enumerate_deterministic(21, 2)


def test_semi_quantum_product_povm_identity_channel():
    z = PAULIS3.povms[2]
    joint = ch.POVM(tuple(la.kron(e1, e2) for e1 in z.effects for e2 in z.effects))
    states = [ch.DensityOperator(e) for e in z.effects]
    p = co.semi_quantum_probs(ch.identity_channel(2), joint, states, states)
    # deterministic: input |0> and reference |0> -> outcome (0,0) certain
    assert abs(p[0, 0, 0] - 1.0) < 1e-12
    assert abs(p[3, 1, 1] - 1.0) < 1e-12


def test_semi_quantum_two_routes_agree():
    rng = np.random.default_rng(6)
    # SWAP-test-style joint measurement: projectors on symmetric/antisymmetric
    sym = (np.eye(4) + la.swap(2)) / 2
    anti = (np.eye(4) - la.swap(2)) / 2
    joint = ch.POVM((sym, anti))
    paulis = ch.pauli_measurements()
    states = [ch.DensityOperator(paulis.effect(x, a)) for x in range(3) for a in range(2)]
    for v in (0.0, 0.5, 1.0):
        e = ch.depolarizing(v)
        p_direct = co.semi_quantum_probs(e, joint, states, states)
        p_pdo = co.semi_quantum_probs_via_pdo(e, joint, states, states)
        assert np.abs(p_direct - p_pdo).max() < 1e-10
    for _ in range(10):
        e = ch.random_channel(rng)
        p_direct = co.semi_quantum_probs(e, joint, states, states)
        p_pdo = co.semi_quantum_probs_via_pdo(e, joint, states, states)
        assert np.abs(p_direct - p_pdo).max() < 1e-10


def test_semi_quantum_constant_channel_x_independent():
    sym = (np.eye(4) + la.swap(2)) / 2
    joint = ch.POVM((sym, np.eye(4) - sym))
    paulis = ch.pauli_measurements()
    states = [ch.DensityOperator(paulis.effect(x, a)) for x in range(3) for a in range(2)]
    p = co.semi_quantum_probs(ch.depolarizing(0.0), joint, states, states)
    assert np.abs(p - p[:, :1, :]).max() < 1e-12


def test_frame_rank_completeness_proxy():
    paulis = ch.pauli_measurements()
    effects = [paulis.effect(x, a) for x in range(3) for a in range(2)]
    assert co.frame_rank(effects) == 4
    assert co.frame_rank(effects[:2]) < 4


def test_correlation_csv_roundtrip():
    t0, t1 = ch.chsh_temporal_settings()
    table = co.correlation_from_pdo(ch.pdo_of_channel(ch.depolarizing(0.8)), t0, t1)
    text = table.to_csv()
    assert text.splitlines()[0] == "x,y,a,b,p"
    back = co.CorrelationTable.from_csv(text)
    assert np.abs(back.probs - table.probs).max() < 1e-16
