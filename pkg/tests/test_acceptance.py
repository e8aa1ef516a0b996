"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured numbers after the assertions hold (run with -s to see them)."""
import time

import numpy as np

from chanrob import channels as ch
from chanrob import correlations as co
from chanrob import tomosim as ts
from chanrob.measures import (
    channel_negativity,
    classify_depolarizing,
    jm_feasibility,
    lhs_membership,
    monotone_harness,
    non_macrorealism_robustness,
    non_sb_robustness,
    quantum_memory_robustness,
    steering_robustness,
    temporal_negativity,
)

PAULIS = ch.pauli_measurements()


def _report(criterion, detail):
    print(f"ACCEPTANCE {criterion}: PASS - {detail}")


def _ts_value(v):
    pdo = ch.pdo_of_channel(ch.depolarizing(v))
    return steering_robustness(co.temporal_assemblage(pdo, PAULIS)).value


def _mr_value(v):
    t0, t1 = ch.chsh_temporal_settings()
    pdo = ch.pdo_of_channel(ch.depolarizing(v))
    return non_macrorealism_robustness(co.correlation_from_pdo(pdo, t0, t1)).value


def _bisect(predicate, lo, hi, width=5e-4):
    """Smallest v in (lo, hi] with predicate(v) true, to within ``width``."""
    assert not predicate(lo) and predicate(hi)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_criterion_1_eb_threshold():
    worst_time = 0.0
    for v in (0.0, 0.1, 0.2, 0.3, 1.0 / 3.0):
        start = time.perf_counter()
        value = quantum_memory_robustness(ch.depolarizing(v)).value
        worst_time = max(worst_time, time.perf_counter() - start)
        assert value <= 1e-6, f"R_QM({v}) = {value}"
    start = time.perf_counter()
    above = quantum_memory_robustness(ch.depolarizing(0.35)).value
    worst_time = max(worst_time, time.perf_counter() - start)
    assert above > 1e-4
    assert worst_time < 1.0
    _report(1, f"R_QM vanishes up to 1/3, R_QM(0.35) = {above:.6f}, worst point {worst_time * 1e3:.0f} ms")


def test_criterion_2_temporal_steering_threshold():
    start = time.perf_counter()
    at_057 = _ts_value(0.57)
    at_0585 = _ts_value(0.585)
    assert at_057 <= 1e-6, f"R_TS(0.57) = {at_057}"
    assert at_0585 > 1e-4, f"R_TS(0.585) = {at_0585}"
    root = _bisect(lambda v: _ts_value(v) > 1e-6, 0.5, 0.65)
    elapsed = time.perf_counter() - start
    assert abs(root - 1.0 / np.sqrt(3.0)) <= 2e-3, f"vanishing point {root}"
    assert elapsed < 5.0
    _report(2, f"R_TS(0.585) = {at_0585:.6f}, vanishing point {root:.6f} ≈ 1/sqrt(3), {elapsed:.1f} s")


def test_criterion_3_macrorealism_threshold():
    start = time.perf_counter()
    at_070 = _mr_value(0.70)
    at_0715 = _mr_value(0.715)
    assert at_070 <= 1e-6, f"R_nMR(0.70) = {at_070}"
    assert at_0715 > 1e-4, f"R_nMR(0.715) = {at_0715}"
    root = _bisect(lambda v: _mr_value(v) > 1e-6, 0.65, 0.75)
    assert abs(root - 1.0 / np.sqrt(2.0)) <= 2e-3, f"vanishing point {root}"
    t0, t1 = ch.chsh_temporal_settings()
    b = co.chsh_value(co.correlation_from_pdo(ch.pdo_of_channel(ch.depolarizing(1.0)), t0, t1))
    assert abs(b - 2.0 * np.sqrt(2.0)) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(3, f"vanishing point {root:.6f} ≈ 1/sqrt(2), CHSH(v=1) = {b:.12f}, {elapsed:.2f} s")


def test_criterion_4_pdo_pt_identity():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        worst = max(worst, ch.pdo_pt_check(ch.random_channel(rng)))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-10, f"worst PT distance {worst}"
    assert elapsed < 1.0
    _report(4, f"worst ||PT(P) - J||_F = {worst:.2e} over 100 random channels, {elapsed:.2f} s")


def test_criterion_5_negativity_chain():
    start = time.perf_counter()
    for v in np.linspace(0, 1, 21):
        f = temporal_negativity(ch.pdo_of_channel(ch.depolarizing(float(v))))
        assert abs(f - max(0.0, (3 * v - 1) / 4)) <= 1e-9
    rng = np.random.default_rng(7)
    worst_gap = -np.inf
    for _ in range(100):
        e = ch.random_channel(rng)
        f = temporal_negativity(ch.pdo_of_channel(e))
        n = channel_negativity(e).value
        worst_gap = max(worst_gap, f - n)
        assert f <= n + 1e-7
    for v in (0.0, 0.2, 0.5, 0.9, 1.0):
        n = channel_negativity(ch.depolarizing(v)).value
        f = temporal_negativity(ch.pdo_of_channel(ch.depolarizing(v)))
        assert abs(n - f) <= 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _report(5, f"f matches (3v-1)+/4 on 21 points; max f-N = {worst_gap:.2e} <= 0; f = N for depolarizing; {elapsed:.1f} s")


def test_criterion_6_hierarchy_coherence():
    for v in np.linspace(0, 1, 101):
        classify_depolarizing(float(v)).check_chain()
    rows = {
        0.30: {"EB": "broken", "SB": "broken", "NLB": "broken", "CHSH-NLB": "broken"},
        0.40: {"EB": "not-broken", "SB": "broken", "NLB": "broken", "CHSH-NLB": "broken"},
        0.72: {"EB": "not-broken", "SB": "not-broken", "NLB": "not-broken", "CHSH-NLB": "not-broken"},
    }
    for v, expect in rows.items():
        verdict = classify_depolarizing(v)
        got = {k: verdict[k] for k in expect}
        assert got == expect, f"v = {v}: {got}"
    _report(6, "chain order holds on the 101-point grid; example rows at 0.30/0.40/0.72 match")


def test_criterion_7_sb_ib_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(321)
    agreements = 0
    for _ in range(100):
        e = ch.random_channel(rng)
        assemblage = co.canonical_assemblage(e, PAULIS)
        membership = lhs_membership(assemblage)[0]
        effects = [[e.dual_apply(PAULIS.effect(y, b)) for b in range(2)] for y in range(3)]
        jm = jm_feasibility(effects)
        assert membership == jm, "steering and incompatibility verdicts disagree"
        agreements += 1
    elapsed = time.perf_counter() - start
    assert agreements == 100
    assert elapsed < 60.0
    _report(7, f"LHS-membership and joint-measurability verdicts agree on 100/100 channels, {elapsed:.1f} s")


def test_criterion_8_monotone_axioms():
    details = []
    for measure in ("memory", "temporal-steering", "macrorealism", "negativity"):
        report = monotone_harness(measure, instances=200, seed=11)
        assert report.ok, f"{measure}: {report.violations[:3]}"
        details.append(f"{measure} 200/200")
    _report(8, "; ".join(details))


def test_criterion_9_tomography_pipeline():
    start = time.perf_counter()
    # noiseless reconstruction
    for v in (0.5, 0.8, 1.0):
        counts = 1e6 * ts.ideal_probabilities(v)
        est = ts.mle_process(counts)
        dist = np.linalg.norm(est.choi_matrix - ch.depolarizing(v).choi_matrix)
        assert dist < 1e-5, f"v = {v}: Choi distance {dist}"
    # Poisson Monte-Carlo at N = 1e5
    cfg = ts.ExperimentConfig(v=0.8, counts_per_combo=1e5, seed=2718, trials=100)
    mc = ts.monte_carlo_errors(cfg)
    noiseless = quantum_memory_robustness(ch.depolarizing(0.8)).value
    dev = abs(mc.measures["R_QM"] - noiseless)
    assert dev <= 3 * mc.error_bars["R_QM"], f"deviation {dev} vs error bar {mc.error_bars['R_QM']}"
    assert mc.failed_trials == 0
    # no-signaling projection on perturbed assemblages
    asm = co.temporal_assemblage(ch.pdo_of_channel(ch.depolarizing(0.7)), PAULIS)
    rng = np.random.default_rng(5)
    raw = [
        [asm.member(x, a) + 1e-3 * np.diag(rng.normal(size=2)) for a in range(2)]
        for x in range(3)
    ]
    _, min_fid = ts.project_no_signaling(raw)
    assert min_fid >= 0.999
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    _report(
        9,
        f"noiseless Choi < 1e-5; MC R_QM = {mc.measures['R_QM']:.4f} ± {mc.error_bars['R_QM']:.4f} "
        f"vs noiseless {noiseless:.4f}; projection min fidelity {min_fid:.5f}; {elapsed:.0f} s",
    )


def test_criterion_10_scope_statements():
    # real-hardware runs have process purity < 1 that no clean model here
    # reproduces; the instrument-noise knob mimics it qualitatively
    noisy = ts.reconstruct(1e6 * ts.ideal_probabilities(1.0, instrument_noise=0.9))
    assert noisy.purity < 0.95
    # The all-measurement suprema (non-SB / non-NLB) are finitely sampled and
    # flagged as lower bounds, never claimed exact.
    res = non_sb_robustness(ch.depolarizing(0.9), [PAULIS])
    assert res.status == "lower-bound"
    _report(
        10,
        "stated explicitly: hardware-grade purity degradation is only mimicked by the "
        "instrument-noise knob; all-measurement suprema are reported as lower bounds",
    )
