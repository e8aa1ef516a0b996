"""Common result type for robustness evaluations."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np


class MeasureError(RuntimeError):
    """Solver failure or invalid measure input."""


@dataclass
class RobustnessResult:
    """Value of a robustness measure with its certificate.

    ``status`` is ``"exact"`` when the optimization computes the measure
    itself, ``"lower-bound"`` when a finite family or relaxation cannot
    exhaust the defining supremum, ``"upper-bound"`` for restricted noise.
    ``certificate`` carries the dual functional (steering-inequality or Bell
    coefficients) plus ``reproduced_value``, its direct evaluation against the
    raw input, which must match ``value`` within 1e-6.
    """

    value: float
    status: str = "exact"
    certificate: dict | None = None
    gap: float = 0.0

    def __post_init__(self):
        if self.value < -1e-9:
            raise MeasureError(f"robustness value {self.value} below -1e-9")
        self.value = max(0.0, float(self.value))

    def to_json(self, measure: str, inputs_digest: str | None = None) -> str:
        doc = {
            "measure": measure,
            "inputs_digest": inputs_digest,
            "value": self.value,
            "status": self.status,
            "gap": self.gap,
            "certificate": _plain(self.certificate),
        }
        return json.dumps(doc)


def digest_arrays(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=complex)).tobytes())
    return h.hexdigest()[:16]


def _plain(obj):
    if obj is None:
        return None
    if isinstance(obj, dict):
        return {
            (k if isinstance(k, str) else ",".join(map(str, k)) if isinstance(k, tuple) else str(k)): _plain(v)
            for k, v in obj.items()
        }
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
