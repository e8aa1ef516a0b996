"""States, measurements, quantum channels and their representations.

Channels are CPTP maps held as Kraus operators and/or a Choi matrix.  The
Choi convention is input-copy-first:  J = (1 ⊗ E)|Φ><Φ|  with |Φ> the
maximally entangled state, normalized to unit trace, so trace preservation
reads Tr_out(J) = 1_in / d_in and the channel acts as
E(X) = d · Tr_first[(X^T ⊗ 1) J].

The two-time pseudo-density operator of a qubit channel is
P_E = (1 ⊗ E)(SWAP/2); its partial transpose on the first factor equals the
Choi state, which is checked as a hard invariant by :func:`pdo_pt_check`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la

TRACE_ATOL = 1e-9
CHOI_TP_ATOL = 1e-8
KRAUS_COMPLETE_ATOL = 1e-9


class ChannelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# states and measurements


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = la.hermitian(self.matrix, atol=1e-10)
        if not la.is_psd(m):
            raise ChannelError(f"density operator not PSD (min eig {la.min_eigenvalue(m):.2e})")
        if abs(np.trace(m).real - 1.0) > TRACE_ATOL:
            raise ChannelError(f"density operator trace {np.trace(m).real} != 1")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class POVM:
    effects: tuple
    labels: tuple = None

    def __post_init__(self):
        effects = tuple(la.hermitian(e, atol=1e-10) for e in self.effects)
        d = effects[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in effects:
            if not la.is_psd(e):
                raise ChannelError(f"POVM effect not PSD (min eig {la.min_eigenvalue(e):.2e})")
            total += e
        if np.abs(total - np.eye(d)).max() > TRACE_ATOL:
            raise ChannelError("POVM effects do not sum to identity")
        object.__setattr__(self, "effects", effects)
        labels = self.labels or tuple(range(len(effects)))
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)


@dataclass(frozen=True)
class MeasurementCollection:
    """Per input x a POVM {M_{a|x}} over a shared outcome alphabet."""

    povms: tuple
    input_labels: tuple = None

    def __post_init__(self):
        povms = tuple(self.povms)
        n_out = len(povms[0])
        if any(len(p) != n_out for p in povms):
            raise ChannelError("all inputs must share one outcome alphabet")
        object.__setattr__(self, "povms", povms)
        labels = self.input_labels or tuple(range(len(povms)))
        object.__setattr__(self, "input_labels", tuple(labels))

    @property
    def n_inputs(self) -> int:
        return len(self.povms)

    @property
    def n_outcomes(self) -> int:
        return len(self.povms[0])

    @property
    def dim(self) -> int:
        return self.povms[0].dim

    def effect(self, x: int, a: int) -> np.ndarray:
        return self.povms[x].effects[a]


# ---------------------------------------------------------------------------
# channels


def _choi_from_kraus(kraus: list[np.ndarray], d_in: int, d_out: int) -> np.ndarray:
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in kraus:
        vec = np.zeros(d_in * d_out, dtype=complex)
        for i in range(d_in):
            vec[i * d_out : (i + 1) * d_out] = k[:, i]
        vec /= np.sqrt(d_in)
        j += np.outer(vec, vec.conj())
    return j


def _kraus_from_choi(choi: np.ndarray, d_in: int, d_out: int, tol: float = 1e-10) -> list[np.ndarray]:
    w, v = la.eig_hermitian(choi)
    ops = []
    for lam, vec in zip(w, v.T):
        if lam < tol:
            continue
        k = np.sqrt(lam * d_in) * vec.reshape(d_in, d_out).T
        ops.append(k)
    return ops


@dataclass
class QuantumChannel:
    """CPTP map; at least one of ``kraus`` / ``choi`` must be given."""

    d_in: int
    d_out: int
    kraus: list = None
    choi: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kraus is None and self.choi is None:
            raise ChannelError("need Kraus operators or a Choi matrix")
        if self.kraus is not None:
            self.kraus = [np.asarray(k, dtype=complex) for k in self.kraus]
            for k in self.kraus:
                if k.shape != (self.d_out, self.d_in):
                    raise ChannelError(f"Kraus operator shape {k.shape} != {(self.d_out, self.d_in)}")
            comp = sum(k.conj().T @ k for k in self.kraus)
            if np.abs(comp - np.eye(self.d_in)).max() > KRAUS_COMPLETE_ATOL:
                raise ChannelError("Kraus operators not complete (sum K†K != 1)")
        if self.choi is not None:
            self.choi = la.hermitian(self.choi, atol=1e-9)
            if not la.is_psd(self.choi, atol=1e-8):
                raise ChannelError("Choi matrix not PSD")
            marg = la.partial_trace(self.choi, (self.d_in, self.d_out), side="second")
            if np.abs(marg * self.d_in - np.eye(self.d_in)).max() > CHOI_TP_ATOL:
                raise ChannelError("Choi matrix not trace-preserving")
        if self.kraus is not None and self.choi is not None:
            rebuilt = _choi_from_kraus(self.kraus, self.d_in, self.d_out)
            if np.linalg.norm(rebuilt - self.choi) > 1e-8:
                raise ChannelError("Kraus and Choi representations disagree")

    # -- representations --------------------------------------------------

    @property
    def choi_matrix(self) -> np.ndarray:
        if self.choi is None:
            self.choi = _choi_from_kraus(self.kraus, self.d_in, self.d_out)
        return self.choi

    @property
    def kraus_operators(self) -> list:
        if self.kraus is None:
            self.kraus = _kraus_from_choi(self.choi, self.d_in, self.d_out)
        return self.kraus

    # -- action ------------------------------------------------------------

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.d_in, self.d_in):
            raise ChannelError(f"input has dimension {rho.shape}, channel expects {self.d_in}")
        if self.kraus is not None:
            return sum(k @ rho @ k.conj().T for k in self.kraus)
        j = self.choi_matrix
        lifted = la.kron(rho.T, np.eye(self.d_out))
        return self.d_in * la.partial_trace(lifted @ j, (self.d_in, self.d_out), side="first")

    def dual_apply(self, m: np.ndarray) -> np.ndarray:
        """Heisenberg-picture dual E†: Tr[E(ρ) M] = Tr[ρ E†(M)]; unital."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.d_out, self.d_out):
            raise ChannelError(f"operator has dimension {m.shape}, channel output is {self.d_out}")
        if self.kraus is not None:
            return sum(k.conj().T @ m @ k for k in self.kraus)
        j = self.choi_matrix
        lifted = la.kron(np.eye(self.d_in), m)
        return self.d_in * la.partial_trace(j @ lifted, (self.d_in, self.d_out), side="second").T

    def compose(self, other: "QuantumChannel") -> "QuantumChannel":
        """self ∘ other (apply ``other`` first)."""
        if other.d_out != self.d_in:
            raise ChannelError("dimension mismatch in composition")
        kraus = [a @ b for a in self.kraus_operators for b in other.kraus_operators]
        return QuantumChannel(other.d_in, self.d_out, kraus=kraus)

    def is_unital(self, atol: float = 1e-10) -> bool:
        return bool(np.abs(self.apply(np.eye(self.d_in, dtype=complex)) - np.eye(self.d_out)).max() <= atol)


@dataclass(frozen=True)
class PseudoDensityOperator:
    """Two-time operator on C^d ⊗ C^d: Hermitian, unit trace, possibly
    non-PSD."""

    matrix: np.ndarray

    def __post_init__(self):
        m = la.hermitian(self.matrix, atol=1e-9)
        if abs(np.trace(m).real - 1.0) > TRACE_ATOL:
            raise ChannelError(f"PDO trace {np.trace(m).real} != 1")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        """Local dimension d (the matrix lives on d² coordinates)."""
        return int(round(np.sqrt(self.matrix.shape[0])))


# ---------------------------------------------------------------------------
# channel <-> two-time representations


def choi_state(channel: QuantumChannel) -> DensityOperator:
    return DensityOperator(channel.choi_matrix)


def pdo_of_channel(channel: QuantumChannel) -> PseudoDensityOperator:
    """P_E = (1 ⊗ E)(SWAP/d) for a qubit channel."""
    if channel.d_in != 2 or channel.d_out != 2:
        raise ChannelError("pseudo-density operators are implemented for qubit channels")
    d = 2
    s = la.swap(d) / d
    out = np.zeros((d * d, d * d), dtype=complex)
    # (1 ⊗ E) acts on the second factor of each |i><j| ⊗ B_ij slice
    t = s.reshape(d, d, d, d)
    for i in range(d):
        for j in range(d):
            out += la.kron(_unit(d, i, j), channel.apply(np.ascontiguousarray(t[i, :, j, :])))
    return PseudoDensityOperator(out)


def _unit(d, i, j):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return m


def pdo_pt_check(channel: QuantumChannel) -> float:
    """Frobenius distance between the partial transpose of P_E (first factor)
    and the CJ state; contract: <= 1e-10 for every channel."""
    p = pdo_of_channel(channel).matrix
    pt = la.partial_transpose(p, (2, 2), side="first")
    return la.frobenius_distance(pt, channel.choi_matrix)


# ---------------------------------------------------------------------------
# the depolarizing family and friends


def depolarizing(v: float) -> QuantumChannel:
    """E(ρ) = v ρ + (1 - v) Tr(ρ) 1/2 on a qubit; accepts 0 <= v <= 1."""
    if not 0.0 <= v <= 1.0:
        raise ChannelError(f"mixing parameter v = {v} outside [0, 1]")
    return kraus_depolarizing((3.0 * v + 1.0) / 4.0)


def kraus_depolarizing(p: float) -> QuantumChannel:
    """Pauli-Kraus form: ρ ↦ p ρ + (1-p)/3 (XρX + YρY + ZρZ)."""
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"Kraus weight p = {p} outside [0, 1]")
    weights = [p, (1 - p) / 3.0, (1 - p) / 3.0, (1 - p) / 3.0]
    kraus = [np.sqrt(w) * op for w, op in zip(weights, la.PAULIS) if w > 0]
    return QuantumChannel(2, 2, kraus=kraus)


def identity_channel(d: int = 2) -> QuantumChannel:
    return QuantumChannel(d, d, kraus=[np.eye(d, dtype=complex)])


def measure_prepare_channel(povm: POVM, states: list[DensityOperator]) -> QuantumChannel:
    """E(ρ) = Σ_j Tr[ρ M_j] σ_j, the measure-and-prepare form every
    entanglement-breaking channel takes; its Choi matrix is separable."""
    if len(states) != len(povm):
        raise ChannelError(f"{len(povm)} POVM outcomes but {len(states)} prepared states")
    d_in = povm.dim
    d_out = states[0].dim
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for m, st in zip(povm.effects, states):
        j += la.kron(m.T, st.matrix) / d_in
    return QuantumChannel(d_in, d_out, choi=j)


# ---------------------------------------------------------------------------
# fixed catalog


def pauli_measurements() -> MeasurementCollection:
    """Projective dichotomic {X, Y, Z} measurements."""
    povms = []
    for op in (la.PAULI_X, la.PAULI_Y, la.PAULI_Z):
        w, vecs = la.eig_hermitian(op)
        plus = np.outer(vecs[:, 0], vecs[:, 0].conj())
        minus = np.outer(vecs[:, 1], vecs[:, 1].conj())
        povms.append(POVM((plus, minus), labels=(+1, -1)))
    return MeasurementCollection(tuple(povms), input_labels=("X", "Y", "Z"))


def chsh_temporal_settings() -> tuple[MeasurementCollection, MeasurementCollection]:
    """t0 observables {X, Z}; t1 observables {(X+Z)/√2, (X−Z)/√2}.

    The diagonal observables are normalized by √2 (not the printed /2) so
    their eigenprojectors are valid dichotomic effects and the local bound 2
    is reached exactly at v = 1/√2.
    """
    def dichotomic(op):
        w, vecs = la.eig_hermitian(op)
        plus = np.outer(vecs[:, 0], vecs[:, 0].conj())
        minus = np.outer(vecs[:, 1], vecs[:, 1].conj())
        return POVM((plus, minus), labels=(+1, -1))

    t0 = MeasurementCollection((dichotomic(la.PAULI_X), dichotomic(la.PAULI_Z)), input_labels=("X", "Z"))
    diag_plus = (la.PAULI_X + la.PAULI_Z) / np.sqrt(2.0)
    diag_minus = (la.PAULI_X - la.PAULI_Z) / np.sqrt(2.0)
    t1 = MeasurementCollection((dichotomic(diag_plus), dichotomic(diag_minus)), input_labels=("D+", "D-"))
    return t0, t1


def max_entangled(d: int) -> DensityOperator:
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1.0 / np.sqrt(d)
    return DensityOperator(np.outer(v, v.conj()))


def isotropic_state(v: float) -> DensityOperator:
    if not 0.0 <= v <= 1.0:
        raise ChannelError(f"visibility v = {v} outside [0, 1]")
    phi = max_entangled(2).matrix
    return DensityOperator(v * phi + (1 - v) * np.eye(4) / 4.0)


# ---------------------------------------------------------------------------
# random instances (test harness material, seeded by callers)


def random_channel(rng: np.random.Generator, d: int = 2, n_kraus: int | None = None) -> QuantumChannel:
    """Haar-ish random channel via a Ginibre isometry (Stinespring)."""
    k = n_kraus or int(rng.integers(1, d * d + 1))
    g = rng.normal(size=(d * k, d)) + 1j * rng.normal(size=(d * k, d))
    q, _ = np.linalg.qr(g)
    kraus = [q[i * d : (i + 1) * d, :] for i in range(k)]
    return QuantumChannel(d, d, kraus=kraus)


def random_unitary_channel(rng: np.random.Generator, d: int = 2) -> QuantumChannel:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return QuantumChannel(d, d, kraus=[q])


def random_state(rng: np.random.Generator, d: int = 2) -> DensityOperator:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)


# ---------------------------------------------------------------------------
# channel spec JSON


def channel_to_json(channel: QuantumChannel) -> str:
    per_op = [
        [[[float(z.real), float(z.imag)] for z in row] for row in k]
        for k in channel.kraus_operators
    ]
    return json.dumps({"kind": "kraus", "ops": per_op})


def channel_from_json(text: str) -> QuantumChannel:
    """Parse a channel spec document.

    Supported kinds: {"kind": "depolarizing", "v": 0.8},
    {"kind": "kraus", "ops": [[[ [re,im], ... ], ...], ...]} and
    {"kind": "measure_prepare", "povm": [...], "states": [...]} with matrices
    as nested [re, im] pairs.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"invalid channel spec JSON: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ChannelError("channel spec must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "depolarizing":
        if "v" not in doc:
            raise ChannelError("depolarizing spec needs field 'v'")
        return depolarizing(float(doc["v"]))
    if kind == "kraus":
        ops = doc.get("ops")
        if not ops:
            raise ChannelError("kraus spec needs a nonempty 'ops' list")
        kraus = [_complex_matrix(o, f"ops[{i}]") for i, o in enumerate(ops)]
        d_out, d_in = kraus[0].shape
        return QuantumChannel(d_in, d_out, kraus=kraus)
    if kind == "measure_prepare":
        if "povm" not in doc or "states" not in doc:
            raise ChannelError("measure_prepare spec needs 'povm' and 'states'")
        effects = [_complex_matrix(e, f"povm[{i}]") for i, e in enumerate(doc["povm"])]
        states = [DensityOperator(_complex_matrix(s, f"states[{i}]")) for i, s in enumerate(doc["states"])]
        return measure_prepare_channel(POVM(tuple(effects)), states)
    raise ChannelError(f"unknown channel kind {kind!r}")


def _complex_matrix(rows, where: str) -> np.ndarray:
    try:
        arr = np.array([[complex(entry[0], entry[1]) for entry in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise ChannelError(f"field {where}: entries must be [re, im] pairs") from exc
    return arr
