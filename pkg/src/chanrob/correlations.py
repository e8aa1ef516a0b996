"""Correlation objects built from channels and measurements: spatial and
temporal assemblages, channel-steering assemblages, two-time probability
tables, CHSH values, semi-quantum game statistics, and deterministic-strategy
enumeration.

Outcomes are labeled a, b ∈ {+1, -1} and stored at indices {0, 1}.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .channels import (
    ChannelError,
    DensityOperator,
    MeasurementCollection,
    POVM,
    PseudoDensityOperator,
    QuantumChannel,
)

MEMBER_PSD_ATOL = 1e-9
NO_SIGNALING_ATOL = 1e-8


class CorrelationError(ValueError):
    pass


@dataclass
class Assemblage:
    """Indexed family of subnormalized positive operators sigma(a|x).

    ``members[x][a]`` is a d x d Hermitian operator.  Validity means each
    member is PSD, per-input traces sum to one, and the a-summed marginal is
    input-independent (no-signaling).  Violations beyond tolerance are flagged
    in ``flags`` rather than rejected (tomography output can signal slightly);
    pass ``strict=True`` to raise instead.
    """

    members: list
    strict: bool = False
    flags: list = field(default_factory=list)

    def __post_init__(self):
        self.members = [[la.hermitian(m, atol=1e-8) for m in row] for row in self.members]
        n_out = len(self.members[0])
        if any(len(row) != n_out for row in self.members):
            raise CorrelationError("ragged assemblage")
        for x, row in enumerate(self.members):
            for a, m in enumerate(row):
                w = la.min_eigenvalue(m)
                if w < -MEMBER_PSD_ATOL:
                    self.flags.append(f"member ({x},{a}) not PSD: min eig {w:.2e}")
            tr = sum(np.trace(m).real for m in row)
            if abs(tr - 1.0) > 1e-8:
                self.flags.append(f"input {x}: member traces sum to {tr}, not 1")
        viol = self.no_signaling_violation()
        if viol > NO_SIGNALING_ATOL:
            self.flags.append(f"no-signaling violation {viol:.2e}")
        if self.strict and self.flags:
            raise CorrelationError("; ".join(self.flags))

    @property
    def n_inputs(self) -> int:
        return len(self.members)

    @property
    def n_outcomes(self) -> int:
        return len(self.members[0])

    @property
    def dim(self) -> int:
        return self.members[0][0].shape[0]

    def member(self, x: int, a: int) -> np.ndarray:
        return self.members[x][a]

    def marginal(self, x: int = 0) -> np.ndarray:
        return sum(self.members[x])

    def no_signaling_violation(self) -> float:
        ref = self.marginal(0)
        worst = 0.0
        for x in range(1, self.n_inputs):
            worst = max(worst, float(np.abs(self.marginal(x) - ref).max()))
        return worst


@dataclass
class CorrelationTable:
    """p(a, b | x, y) stored as an array of shape (nx, ny, na, nb)."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 4:
            raise CorrelationError("probability table must be 4-dimensional (x, y, a, b)")
        if p.min() < -1e-9:
            raise CorrelationError(f"negative probability {p.min():.2e}")
        sums = p.sum(axis=(2, 3))
        if np.abs(sums - 1.0).max() > 1e-9:
            raise CorrelationError("probabilities do not sum to 1 per setting")
        self.probs = np.clip(p, 0.0, None)

    @property
    def shape(self):
        return self.probs.shape

    def correlator(self, x: int, y: int) -> float:
        """E(x, y) = p(a=b) - p(a≠b) under the ±1 labeling (index 0 ↦ +1)."""
        p = self.probs[x, y]
        return float(p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0])

    def to_csv(self) -> str:
        """Columns x,y,a,b,p; rows lexicographic; 17 significant digits."""
        buf = io.StringIO()
        buf.write("x,y,a,b,p\n")
        nx, ny, na, nb = self.probs.shape
        for x in range(nx):
            for y in range(ny):
                for a in range(na):
                    for b in range(nb):
                        buf.write(f"{x},{y},{a},{b},{self.probs[x, y, a, b]:.17g}\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "CorrelationTable":
        rows = [line.split(",") for line in text.strip().splitlines()[1:]]
        xs, ys, az, bs = (max(int(r[i]) for r in rows) + 1 for i in range(4))
        p = np.zeros((xs, ys, az, bs))
        for r in rows:
            p[int(r[0]), int(r[1]), int(r[2]), int(r[3])] = float(r[4])
        return CorrelationTable(p)


@dataclass(frozen=True)
class DeterministicStrategies:
    """Exhaustive deterministic assignments; single-party ``assignments[l][x]``
    is the outcome for input x under hidden variable l.  For two parties the
    product strategies are pairs of single-party assignments."""

    n_inputs: int
    n_outcomes: int
    assignments: tuple
    parties: int = 1

    def __len__(self):
        return len(self.assignments)

    def response(self, lam: int, x: int) -> int:
        return self.assignments[lam][x]


def enumerate_deterministic(n_inputs: int, n_outcomes: int, parties: int = 1, n_inputs_b: int | None = None, n_outcomes_b: int | None = None):
    """All deterministic strategies; product strategies for two parties.

    Returns a :class:`DeterministicStrategies` for one party, or a pair of
    them for two (the product set is their Cartesian pairing).
    """
    if parties not in (1, 2):
        raise CorrelationError("parties must be 1 or 2")
    count = n_outcomes**n_inputs
    if parties == 2:
        nb_i = n_inputs_b or n_inputs
        nb_o = n_outcomes_b or n_outcomes
        count *= nb_o**nb_i
    if count > 10**6:
        raise CorrelationError(f"{count} strategies exceed the 1e6 enumeration cap")

    def single(ni, no):
        out = []
        for code in range(no**ni):
            out.append(tuple((code // no**x) % no for x in range(ni)))
        return DeterministicStrategies(ni, no, tuple(out))

    first = single(n_inputs, n_outcomes)
    if parties == 1:
        return first
    second = single(n_inputs_b or n_inputs, n_outcomes_b or n_outcomes)
    return first, second


# ---------------------------------------------------------------------------
# assemblages


def spatial_assemblage(state: DensityOperator, measurements: MeasurementCollection) -> Assemblage:
    """sigma(a|x) = Tr_A[(M_{a|x} ⊗ 1) rho] for a bipartite state on d ⊗ d."""
    d = measurements.dim
    if state.dim != d * d:
        raise CorrelationError(f"state dimension {state.dim} != {d}*{d}")
    members = []
    for x in range(measurements.n_inputs):
        row = []
        for a in range(measurements.n_outcomes):
            lifted = la.kron(measurements.effect(x, a), np.eye(d))
            row.append(la.partial_trace(lifted @ state.matrix, (d, d), side="first"))
        members.append(row)
    return Assemblage(members)


def temporal_assemblage(pdo: PseudoDensityOperator, measurements: MeasurementCollection) -> Assemblage:
    """sigma(a|x) = Tr_first[(M_{a|x} ⊗ 1) P]; cross-checked against the
    closed form E(M_{a|x})/d encoded in the PDO structure."""
    d = pdo.dim
    if measurements.dim != d:
        raise CorrelationError("measurement dimension does not match the PDO")
    members = []
    for x in range(measurements.n_inputs):
        row = []
        for a in range(measurements.n_outcomes):
            lifted = la.kron(measurements.effect(x, a), np.eye(d))
            m = la.partial_trace(lifted @ pdo.matrix, (d, d), side="first")
            herm_dev = np.abs(m - m.conj().T).max()
            if herm_dev > 1e-8:
                raise CorrelationError(f"non-Hermitian assemblage member (dev {herm_dev:.2e}): invalid PDO")
            row.append(0.5 * (m + m.conj().T))
        members.append(row)
    return Assemblage(members)


def temporal_assemblage_of_channel(channel: QuantumChannel, measurements: MeasurementCollection) -> Assemblage:
    """Direct route sigma(a|x) = E(M_{a|x})/d; must agree with
    :func:`temporal_assemblage` of the channel's PDO to 1e-10."""
    d = channel.d_in
    members = [
        [channel.apply(measurements.effect(x, a)) / d for a in range(measurements.n_outcomes)]
        for x in range(measurements.n_inputs)
    ]
    return Assemblage(members)


def channel_steering_assemblage(pdo: PseudoDensityOperator, measurements: MeasurementCollection) -> Assemblage:
    """Members Tr_second[(1 ⊗ M_{b|y}) P] = E†(M_{b|y})/d: the states steered
    at t0 by uncharacterized measurements at t1."""
    d = pdo.dim
    if measurements.dim != d:
        raise CorrelationError("measurement dimension does not match the PDO")
    members = []
    for y in range(measurements.n_inputs):
        row = []
        for b in range(measurements.n_outcomes):
            lifted = la.kron(np.eye(d), measurements.effect(y, b))
            m = la.partial_trace(lifted @ pdo.matrix, (d, d), side="second")
            herm_dev = np.abs(m - m.conj().T).max()
            if herm_dev > 1e-8:
                raise CorrelationError(f"non-Hermitian assemblage member (dev {herm_dev:.2e}): invalid PDO")
            row.append(0.5 * (m + m.conj().T))
        members.append(row)
    return Assemblage(members)


def canonical_assemblage(channel: QuantumChannel, measurements: MeasurementCollection) -> Assemblage:
    """Max-entangled-state assemblage {[E†(M_{b|y})]^T / d}, the bridge
    between channel steering and joint measurability."""
    d = channel.d_in
    members = [
        [channel.dual_apply(measurements.effect(y, b)).T / d for b in range(measurements.n_outcomes)]
        for y in range(measurements.n_inputs)
    ]
    return Assemblage(members)


# ---------------------------------------------------------------------------
# two-time correlations


def correlation_from_pdo(pdo: PseudoDensityOperator, m0: MeasurementCollection, m1: MeasurementCollection) -> CorrelationTable:
    """p(a,b|x,y) = Tr[(M_{a|x} ⊗ M_{b|y}) P]."""
    d = pdo.dim
    p = np.empty((m0.n_inputs, m1.n_inputs, m0.n_outcomes, m1.n_outcomes))
    for x in range(m0.n_inputs):
        for y in range(m1.n_inputs):
            for a in range(m0.n_outcomes):
                for b in range(m1.n_outcomes):
                    op = la.kron(m0.effect(x, a), m1.effect(y, b))
                    val = np.trace(op @ pdo.matrix)
                    if val.real < -1e-9:
                        raise CorrelationError(
                            f"negative probability {val.real:.2e} at (x={x},y={y},a={a},b={b})"
                        )
                    p[x, y, a, b] = max(val.real, 0.0)
    return CorrelationTable(p)


def chsh_value(table: CorrelationTable) -> float:
    """B = E(1,1) + E(2,1) + E(1,2) - E(2,2); local bound 2."""
    nx, ny, na, nb = table.shape
    if (nx, ny, na, nb) != (2, 2, 2, 2):
        raise CorrelationError(f"CHSH needs a 2x2x2x2 table, got {(nx, ny, na, nb)}")
    e = table.correlator
    return e(0, 0) + e(1, 0) + e(0, 1) - e(1, 1)


def max_chsh_violation(table: CorrelationTable) -> float:
    """Max |CHSH| over the eight sign placements (the nontrivial facets of the
    2-input/2-outcome local polytope, alongside positivity)."""
    e = np.array([[table.correlator(x, y) for y in range(2)] for x in range(2)])
    best = 0.0
    for sx in range(2):
        for sy in range(2):
            for neg in range(4):
                signs = np.ones((2, 2))
                signs[neg // 2, neg % 2] = -1.0
                ee = e.copy()
                if sx:
                    ee[1, :] *= -1
                if sy:
                    ee[:, 1] *= -1
                best = max(best, abs(float((signs * ee).sum())))
    return best


def semi_quantum_probs(
    channel: QuantumChannel,
    joint: POVM,
    input_states: list[DensityOperator],
    reference_states: list[DensityOperator],
) -> np.ndarray:
    """Semi-quantum game statistics p(b|x,y) = Tr[B_b (sigma_y ⊗ E(sigma_x))].

    The joint POVM acts on (trusted reference ⊗ channel output).  The result
    is cross-checked against the PDO route: measure {sigma_x, 1 - sigma_x} at
    t0, renormalize the conditional state at t1, then apply the effective
    POVM M_b^(y) = Tr_first[B_b (sigma_y ⊗ 1)].
    """
    d = channel.d_out
    if joint.dim != d * d:
        raise ChannelError("joint POVM must act on reference ⊗ output")
    n_b = len(joint)
    n_x, n_y = len(input_states), len(reference_states)
    p = np.empty((n_b, n_x, n_y))
    for x, sx in enumerate(input_states):
        out = channel.apply(sx.matrix)
        for y, sy in enumerate(reference_states):
            lifted = la.kron(sy.matrix, out)
            for b, eff in enumerate(joint.effects):
                val = np.trace(eff @ lifted).real
                p[b, x, y] = val
    if p.min() < -1e-9:
        raise ChannelError(f"invalid joint POVM: negative probability {p.min():.2e}")
    return np.clip(p, 0.0, None)


def semi_quantum_probs_via_pdo(
    channel: QuantumChannel,
    joint: POVM,
    input_states: list[DensityOperator],
    reference_states: list[DensityOperator],
) -> np.ndarray:
    """PDO route for :func:`semi_quantum_probs` (states-as-effects at t0)."""
    from .channels import pdo_of_channel

    d = channel.d_out
    pdo = pdo_of_channel(channel)
    n_b = len(joint)
    p = np.empty((n_b, len(input_states), len(reference_states)))
    for x, sx in enumerate(input_states):
        eff_t0 = POVM((sx.matrix, np.eye(d) - sx.matrix))
        coll = MeasurementCollection((eff_t0,))
        assem = temporal_assemblage(pdo, coll)
        member = assem.member(0, 0)
        state_t1 = member / np.trace(member).real
        for y, sy in enumerate(reference_states):
            for b, eff in enumerate(joint.effects):
                m_b = la.partial_trace(eff @ la.kron(sy.matrix, np.eye(d)), (d, d), side="first")
                p[b, x, y] = np.trace(m_b @ state_t1).real
    return np.clip(p, 0.0, None)


def frame_rank(operators: list[np.ndarray]) -> int:
    """Rank of the operator frame spanned by a family, a completeness proxy
    for semi-quantum input sets (rank d² means tomographically complete)."""
    rows = [np.asarray(op).reshape(-1) for op in operators]
    return int(np.linalg.matrix_rank(np.array(rows), tol=1e-10))
