"""Breaking-property classifier for the qubit depolarizing family.

Threshold catalog (mixing parameter v):

- entanglement-breaking      iff v <= 1/3                       (exact)
- steerability-breaking      if  v <= 5/12; not broken v > 1/2  (else unknown)
- nonlocality-breaking       if  v <= 0.525; not broken v > 0.696 (else unknown)
- CHSH-nonlocality-breaking  iff v <= 1/sqrt(2)                 (exact)

The four properties nest: EB ⊂ SB ⊂ NLB ⊂ CHSH-NLB, so "broken" must
propagate rightward and "not broken" leftward; the verdict constructor
enforces that coherence.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channels import chsh_temporal_settings, depolarizing, pauli_measurements, pdo_of_channel
from ..correlations import chsh_value, correlation_from_pdo
from .memory import quantum_memory_robustness
from .result import MeasureError
from .steering import incompatibility_robustness

EB_THRESHOLD = 1.0 / 3.0
SB_BROKEN_BELOW = 5.0 / 12.0
SB_NOT_BROKEN_ABOVE = 0.5
NLB_BROKEN_BELOW = 0.525
NLB_NOT_BROKEN_ABOVE = 0.696
CHSH_THRESHOLD = 1.0 / np.sqrt(2.0)

PROPERTY_CHAIN = ("EB", "SB", "NLB", "CHSH-NLB")


@dataclass
class HierarchyVerdict:
    verdicts: dict
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        for prop in PROPERTY_CHAIN:
            if self.verdicts.get(prop) not in ("broken", "not-broken", "unknown"):
                raise MeasureError(f"verdict for {prop} missing or invalid")
        self.check_chain()

    def check_chain(self):
        """EB broken ⇒ SB broken ⇒ NLB broken ⇒ CHSH-NLB broken."""
        for earlier, later in zip(PROPERTY_CHAIN, PROPERTY_CHAIN[1:]):
            if self.verdicts[earlier] == "broken" and self.verdicts[later] == "not-broken":
                raise MeasureError(f"hierarchy violation: {earlier} broken but {later} not-broken")

    def __getitem__(self, prop):
        return self.verdicts[prop]


def _propagate(verdicts: dict) -> dict:
    # broken propagates along the chain, not-broken propagates backwards
    out = dict(verdicts)
    for i, prop in enumerate(PROPERTY_CHAIN):
        if out[prop] == "broken":
            for later in PROPERTY_CHAIN[i + 1 :]:
                if out[later] == "unknown":
                    out[later] = "broken"
    for i in range(len(PROPERTY_CHAIN) - 1, -1, -1):
        if out[PROPERTY_CHAIN[i]] == "not-broken":
            for earlier in PROPERTY_CHAIN[:i]:
                if out[earlier] == "unknown":
                    out[earlier] = "not-broken"
    return out


def classify_depolarizing(v: float, computational: bool = False) -> HierarchyVerdict:
    """Classify depolarizing(v) against the four breaking properties.

    Threshold mode reads the catalog above.  Computational mode replaces
    threshold-derived "not-broken" verdicts by explicit witnesses: a positive
    memory robustness, a positive 3-Pauli steering robustness (only resolves
    v > 1/sqrt(3)), and a CHSH value above 2.
    """
    if not 0.0 <= v <= 1.0:
        raise MeasureError(f"v = {v} outside [0, 1]")
    verdicts = {}
    evidence = {}

    verdicts["EB"] = "broken" if v <= EB_THRESHOLD else "not-broken"
    evidence["EB"] = f"threshold: EB iff v <= 1/3 (v = {v:g})"

    if v <= SB_BROKEN_BELOW:
        verdicts["SB"] = "broken"
        evidence["SB"] = "threshold: unsteerable for any POVM at v <= 5/12"
    elif v > SB_NOT_BROKEN_ABOVE:
        verdicts["SB"] = "not-broken"
        evidence["SB"] = "threshold: projectively steerable isotropic state at v > 1/2"
    else:
        verdicts["SB"] = "unknown"
        evidence["SB"] = "threshold gap 5/12 < v <= 1/2"

    if v <= NLB_BROKEN_BELOW:
        verdicts["NLB"] = "broken"
        evidence["NLB"] = "threshold: local model for all qubit measurements at v <= 0.525"
    elif v > NLB_NOT_BROKEN_ABOVE:
        verdicts["NLB"] = "not-broken"
        evidence["NLB"] = "threshold: isotropic state violates a Bell inequality at v > 0.696"
    else:
        verdicts["NLB"] = "unknown"
        evidence["NLB"] = "threshold gap 0.525 < v <= 0.696"

    verdicts["CHSH-NLB"] = "broken" if v <= CHSH_THRESHOLD else "not-broken"
    evidence["CHSH-NLB"] = f"threshold: CHSH-NLB iff v <= 1/sqrt(2) (v = {v:g})"

    if computational:
        channel = depolarizing(v)
        rqm = quantum_memory_robustness(channel).value
        evidence["EB"] = f"memory robustness = {rqm:.6f}"
        verdicts["EB"] = "broken" if rqm <= 1e-7 else "not-broken"

        rts = incompatibility_robustness(pauli_measurements(), channel).value
        if rts > 1e-7:
            verdicts["SB"] = "not-broken"
            evidence["SB"] = f"3-Pauli steering robustness = {rts:.6f} > 0"
        elif verdicts["SB"] == "not-broken":
            # keep the threshold verdict; the 3-Pauli witness cannot see
            # 1/2 < v <= 1/sqrt(3)
            evidence["SB"] += f" (3-Pauli robustness = {rts:.2e} inconclusive)"

        t0, t1 = chsh_temporal_settings()
        b = chsh_value(correlation_from_pdo(pdo_of_channel(channel), t0, t1))
        evidence["CHSH-NLB"] = f"CHSH value = {b:.6f}"
        verdicts["CHSH-NLB"] = "not-broken" if b > 2.0 + 1e-9 else "broken"

    return HierarchyVerdict(_propagate(verdicts), evidence)
