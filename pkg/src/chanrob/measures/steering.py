"""Steering, channel-steering and incompatibility measures.

The local-hidden-state test and the robustness of (temporal) steerability are
semidefinite programs over deterministic-response hidden variables; joint
measurability gets its own, independently formulated SDP so the theorem-level
equivalences can be tested between genuinely different programs.
"""
from __future__ import annotations

import numpy as np

from .. import linalg as la
from ..channels import MeasurementCollection, QuantumChannel, identity_channel
from ..conic import ConicProgram
from ..correlations import Assemblage, canonical_assemblage, enumerate_deterministic
from ._solve import solve_verified
from .result import MeasureError, RobustnessResult

MEMBERSHIP_CAP = 4096
ZERO_MEMBER_TOL = 1e-12


def _strategies_for(assemblage: Assemblage):
    count = assemblage.n_outcomes**assemblage.n_inputs
    if count > MEMBERSHIP_CAP:
        raise MeasureError(f"{count} hidden variables exceed the {MEMBERSHIP_CAP} cap")
    return enumerate_deterministic(assemblage.n_inputs, assemblage.n_outcomes)


def _is_trivial(assemblage: Assemblage) -> bool:
    """Single input, or identical rows (all inputs share one POVM image):
    such an assemblage always admits a hidden-state model."""
    if assemblage.n_inputs == 1:
        return True
    first = assemblage.members[0]
    for row in assemblage.members[1:]:
        if any(np.abs(m - f).max() > 1e-12 for m, f in zip(row, first)):
            return False
    return True


def lhs_membership(assemblage: Assemblage):
    """Exact feasibility of sigma(a|x) = sum_l D(a|x,l) w_l with w_l >= 0.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is a
    steering-inequality certificate: Hermitian F_{a|x} with
    sum_{a,x} <F_{a|x}, sigma(a|x)> = violation > 0 while every deterministic
    strategy satisfies sum_{a,x} D(a|x,l) F_{a|x} <= 0.
    """
    if _is_trivial(assemblage):
        return True, None
    strategies = _strategies_for(assemblage)
    d = assemblage.dim
    p = ConicProgram()
    for lam in range(len(strategies)):
        p.psd_block(f"w{lam}", d)
    refs = {}
    for x in range(assemblage.n_inputs):
        for a in range(assemblage.n_outcomes):
            terms = [(f"w{lam}", 1.0) for lam in range(len(strategies)) if strategies.response(lam, x) == a]
            refs[(x, a)] = p.add_matrix_equality(terms, assemblage.member(x, a))
    p.minimize({})
    sol = solve_verified(p, "hidden-state membership")
    if sol.status == "optimal":
        return True, None
    if sol.status != "infeasible":
        raise MeasureError(f"membership solve failed: {sol.status}")
    coeffs = {key: sol.dual_matrix(ref) for key, ref in refs.items()}
    violation = sum(
        np.trace(coeffs[(x, a)] @ assemblage.member(x, a)).real
        for x in range(assemblage.n_inputs)
        for a in range(assemblage.n_outcomes)
    )
    bound = max(
        la.eig_hermitian(
            sum(coeffs[(x, strategies.response(lam, x))] for x in range(assemblage.n_inputs))
        )[0][0]
        for lam in range(len(strategies))
    )
    if violation - max(bound, 0.0) < 1e-8:
        raise MeasureError("infeasibility certificate failed independent validation")
    witness = {
        "kind": "steering-inequality",
        "coefficients": coeffs,
        "violation": float(violation),
        "lhs_bound": float(bound),
    }
    return False, witness


def steering_robustness(assemblage: Assemblage) -> RobustnessResult:
    """Generalized robustness of steering: min sum_l Tr(w_l) - 1 subject to
    sum_l D(a|x,l) w_l >= sigma(a|x)."""
    if _is_trivial(assemblage):
        return RobustnessResult(0.0, status="exact", certificate=None, gap=0.0)
    strategies = _strategies_for(assemblage)
    d = assemblage.dim
    keep = [
        (x, a)
        for x in range(assemblage.n_inputs)
        for a in range(assemblage.n_outcomes)
        if np.abs(assemblage.member(x, a)).max() > ZERO_MEMBER_TOL
    ]
    p = ConicProgram()
    for lam in range(len(strategies)):
        p.psd_block(f"w{lam}", d)
    for key in keep:
        p.psd_block(f"slack{key}", d)
    refs = {}
    for x, a in keep:
        terms = [(f"w{lam}", 1.0) for lam in range(len(strategies)) if strategies.response(lam, x) == a]
        terms.append((f"slack{(x, a)}", -1.0))
        refs[(x, a)] = p.add_matrix_equality(terms, assemblage.member(x, a))
    eye = np.eye(d, dtype=complex)
    p.minimize({f"w{lam}": eye for lam in range(len(strategies))}, constant=-1.0)
    sol = solve_verified(p, "steering robustness")
    if sol.status != "optimal":
        raise MeasureError(f"steering robustness solve failed: {sol.status}")
    coeffs = {key: sol.dual_matrix(ref) for key, ref in refs.items()}
    reproduced = sum(np.trace(f @ assemblage.member(x, a)).real for (x, a), f in coeffs.items()) - 1.0
    certificate = {
        "kind": "steering-inequality",
        "coefficients": coeffs,
        "reproduced_value": float(reproduced),
    }
    return RobustnessResult(sol.objective, status="exact", certificate=certificate, gap=sol.gap)


def steering_robustness_dual(assemblage: Assemblage) -> float:
    """Independent dual formulation: maximize sum <F, sigma> - 1 over F >= 0
    with sum_x F_{response(l,x)|x} <= 1 for every strategy l.  Agrees with the
    primal within solver accuracy; used as an oracle."""
    if _is_trivial(assemblage):
        return 0.0
    strategies = _strategies_for(assemblage)
    d = assemblage.dim
    p = ConicProgram()
    for x in range(assemblage.n_inputs):
        for a in range(assemblage.n_outcomes):
            p.psd_block(f"F{(x, a)}", d)
    for lam in range(len(strategies)):
        p.psd_block(f"slack{lam}", d)
    for lam in range(len(strategies)):
        terms = [(f"F{(x, strategies.response(lam, x))}", 1.0) for x in range(assemblage.n_inputs)]
        terms.append((f"slack{lam}", 1.0))
        p.add_matrix_equality(terms, np.eye(d, dtype=complex))
    p.minimize(
        {
            f"F{(x, a)}": -assemblage.member(x, a)
            for x in range(assemblage.n_inputs)
            for a in range(assemblage.n_outcomes)
        },
        constant=1.0,
    )
    sol = solve_verified(p, "steering dual")
    if sol.status != "optimal":
        raise MeasureError(f"steering dual solve failed: {sol.status}")
    return -sol.objective


def jm_feasibility(effects: list[list[np.ndarray]]):
    """Joint measurability of {N_{b|y}}: exists a parent POVM {G_l} with
    N_{b|y} = sum_l D(b|y,l) G_l.  Independent of the steering route.

    Redundant rows (the last outcome of every input beyond the first) are
    implied by normalization and omitted.
    """
    n_y = len(effects)
    n_b = len(effects[0])
    d = effects[0][0].shape[0]
    strategies = enumerate_deterministic(n_y, n_b)
    p = ConicProgram()
    for lam in range(len(strategies)):
        p.psd_block(f"G{lam}", d)
    for y in range(n_y):
        outcomes = range(n_b) if y == 0 else range(n_b - 1)
        for b in outcomes:
            terms = [(f"G{lam}", 1.0) for lam in range(len(strategies)) if strategies.response(lam, y) == b]
            p.add_matrix_equality(terms, effects[y][b])
    p.minimize({})
    sol = solve_verified(p, "joint measurability")
    if sol.status == "optimal":
        return True
    if sol.status == "infeasible":
        return False
    raise MeasureError(f"joint-measurability solve failed: {sol.status}")


def jm_robustness(effects: list[list[np.ndarray]]) -> RobustnessResult:
    """Generalized incompatibility robustness: min t with
    sum_l D(b|y,l) G_l >= N_{b|y}, G_l >= 0, sum_l G_l = (1+t) 1."""
    n_y = len(effects)
    n_b = len(effects[0])
    d = effects[0][0].shape[0]
    strategies = enumerate_deterministic(n_y, n_b)
    eye = np.eye(d, dtype=complex)
    p = ConicProgram()
    for lam in range(len(strategies)):
        p.psd_block(f"G{lam}", d)
    p.psd_block("t", 1)
    for y in range(n_y):
        for b in range(n_b):
            p.psd_block(f"slack{(y, b)}", d)
    for y in range(n_y):
        for b in range(n_b):
            terms = [(f"G{lam}", 1.0) for lam in range(len(strategies)) if strategies.response(lam, y) == b]
            terms.append((f"slack{(y, b)}", -1.0))
            p.add_matrix_equality(terms, effects[y][b])
    parent_sum = [(f"G{lam}", 1.0) for lam in range(len(strategies))]
    parent_sum.append(("t", -eye))
    p.add_matrix_equality(parent_sum, eye)
    p.minimize({"t": 1.0})
    sol = solve_verified(p, "incompatibility robustness")
    if sol.status != "optimal":
        raise MeasureError(f"incompatibility robustness solve failed: {sol.status}")
    return RobustnessResult(sol.objective, status="exact", gap=sol.gap)


def incompatibility_robustness(
    measurements: MeasurementCollection, channel: QuantumChannel | None = None
) -> RobustnessResult:
    """Robustness of channel steering for fixed settings: the steering
    robustness of the canonical max-entangled assemblage
    {[E†(M_{b|y})]^T / d}; with the identity channel this is the
    incompatibility robustness of the measurement family itself."""
    chan = channel or identity_channel(measurements.dim)
    assemblage = canonical_assemblage(chan, measurements)
    return steering_robustness(assemblage)


def non_sb_robustness(channel: QuantumChannel, family: list[MeasurementCollection]) -> RobustnessResult:
    """Lower bound on the robustness of the non-steerability-breaking channel:
    the maximum of :func:`incompatibility_robustness` over a finite family of
    measurement collections (the defining supremum ranges over all
    measurements and is not finitely computable)."""
    if not family:
        raise MeasureError("measurement family is empty")
    best = None
    for coll in family:
        res = incompatibility_robustness(coll, channel)
        if best is None or res.value > best.value:
            best = res
    return RobustnessResult(best.value, status="lower-bound", certificate=best.certificate, gap=best.gap)
