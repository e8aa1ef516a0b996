"""Property harness for the resource-monotone axioms: each measure must be
non-increasing under its free operations and convex under channel mixing.

Free-operation classes are measure-specific (the strongest classes for which
monotonicity is a theorem):

- memory robustness: arbitrary pre/post channel composition D2 ∘ E ∘ D1;
- temporal negativity f: arbitrary post-composition, unital pre-composition
  (the diamond-norm negativity handles general instruments, f does not);
- temporal steering robustness (fixed settings): member-wise channels applied
  at t1 (post-processing);
- non-macrorealism robustness: local stochastic post-processing of outcomes.

Convexity instances mix random channels and compare against the mixture of
measure values.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channels import (
    QuantumChannel,
    chsh_temporal_settings,
    pauli_measurements,
    pdo_of_channel,
    random_channel,
    random_unitary_channel,
)
from ..correlations import Assemblage, CorrelationTable, correlation_from_pdo, temporal_assemblage
from .memory import quantum_memory_robustness
from .macrorealism import non_macrorealism_robustness
from .negativity import temporal_negativity
from .result import MeasureError
from .steering import steering_robustness

TOLERANCE = 1e-6

MEASURES = ("memory", "temporal-steering", "macrorealism", "negativity")


@dataclass
class MonotoneReport:
    measure: str
    instances: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _mix_channels(channels, weights) -> QuantumChannel:
    d = channels[0].d_in
    kraus = []
    for w, e in zip(weights, channels):
        kraus.extend([np.sqrt(w) * k for k in e.kraus_operators])
    return QuantumChannel(d, channels[0].d_out, kraus=kraus)


def _random_unital(rng) -> QuantumChannel:
    """Random mixture of unitaries (always unital)."""
    k = int(rng.integers(1, 4))
    parts = [random_unitary_channel(rng) for _ in range(k)]
    w = rng.dirichlet(np.ones(k))
    return _mix_channels(parts, w)


def _measure_value(measure: str, channel: QuantumChannel, settings) -> float:
    if measure == "memory":
        return quantum_memory_robustness(channel).value
    if measure == "negativity":
        return temporal_negativity(pdo_of_channel(channel))
    if measure == "temporal-steering":
        return steering_robustness(temporal_assemblage(pdo_of_channel(channel), settings)).value
    if measure == "macrorealism":
        t0, t1 = settings
        table = correlation_from_pdo(pdo_of_channel(channel), t0, t1)
        return non_macrorealism_robustness(table).value
    raise MeasureError(f"unknown measure {measure!r}")


def _post_process_assemblage(assemblage: Assemblage, channel: QuantumChannel) -> Assemblage:
    return Assemblage([[channel.apply(m) for m in row] for row in assemblage.members])


def _post_process_table(table: CorrelationTable, rng) -> CorrelationTable:
    """Local stochastic relabelings p(a'|a), p(b'|b)."""
    nx, ny, na, nb = table.shape
    pa = rng.dirichlet(np.ones(na), size=na)  # pa[a, a'] = p(a'|a)
    pb = rng.dirichlet(np.ones(nb), size=nb)
    q = np.einsum("xyab,ac,bd->xycd", table.probs, pa, pb)
    return CorrelationTable(q)


def monotone_harness(measure: str, instances: int = 200, seed: int = 7) -> MonotoneReport:
    """Run ``instances`` random free-operation and convexity checks; any
    violation beyond 1e-6 is recorded with the offending instance."""
    if measure not in MEASURES:
        raise MeasureError(f"measure must be one of {MEASURES}")
    rng = np.random.default_rng(seed)
    report = MonotoneReport(measure=measure, instances=instances)
    paulis = pauli_measurements()
    chsh = chsh_temporal_settings()
    settings = paulis if measure == "temporal-steering" else chsh if measure == "macrorealism" else None

    for idx in range(instances):
        base = random_channel(rng)
        kind = ("processing", "convexity")[idx % 2]
        try:
            if kind == "convexity":
                other = random_channel(rng)
                w = float(rng.uniform(0.05, 0.95))
                mixed = _mix_channels([base, other], [w, 1 - w])
                lhs = _measure_value(measure, mixed, settings)
                rhs = w * _measure_value(measure, base, settings) + (1 - w) * _measure_value(measure, other, settings)
                if lhs > rhs + TOLERANCE:
                    report.violations.append(
                        {"instance": idx, "kind": kind, "lhs": lhs, "rhs": rhs, "weight": w,
                         "channels": [base.kraus_operators, other.kraus_operators]}
                    )
                continue

            before = _measure_value(measure, base, settings)
            if measure == "memory":
                post, pre = random_channel(rng), random_channel(rng)
                after = _measure_value(measure, post.compose(base).compose(pre), settings)
            elif measure == "negativity":
                post, pre = random_channel(rng), _random_unital(rng)
                after = _measure_value(measure, post.compose(base).compose(pre), settings)
            elif measure == "temporal-steering":
                post = random_channel(rng)
                asm = temporal_assemblage(pdo_of_channel(base), settings)
                after = steering_robustness(_post_process_assemblage(asm, post)).value
                before = steering_robustness(asm).value
            else:  # macrorealism: stochastic outcome post-processing
                t0, t1 = settings
                table = correlation_from_pdo(pdo_of_channel(base), t0, t1)
                before = non_macrorealism_robustness(table).value
                after = non_macrorealism_robustness(_post_process_table(table, rng)).value
            if after > before + TOLERANCE:
                report.violations.append(
                    {"instance": idx, "kind": kind, "before": before, "after": after,
                     "channel": base.kraus_operators}
                )
        except MeasureError as exc:
            report.violations.append({"instance": idx, "kind": kind, "error": str(exc)})
    return report
