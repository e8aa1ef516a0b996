"""Robustness of quantum memory: minimal channel noise rendering the mixture
entanglement-breaking.

At qubit dimensions entanglement-breaking is exactly the positivity of the
partial transpose of the Choi state, so the measure is one SDP:

    min t   s.t.  Y >= 0,  Tr_out(Y) = t 1/d,  (J + Y)^{T_first} >= 0,

where Y = t * (Choi of an arbitrary channel).  Above 2x2 the PPT relaxation
only lower-bounds the measure.
"""
from __future__ import annotations

import numpy as np

from .. import linalg as la
from ..channels import QuantumChannel
from ..conic import ConicProgram
from ._solve import solve_verified
from .result import MeasureError, RobustnessResult


def quantum_memory_robustness(channel: QuantumChannel) -> RobustnessResult:
    d_in, d_out = channel.d_in, channel.d_out
    j = channel.choi_matrix
    n = d_in * d_out
    j_pt = la.partial_transpose(j, (d_in, d_out), side="first")

    p = ConicProgram()
    p.psd_block("Y", n)
    p.psd_block("t", 1)
    p.psd_block("Z", n)
    ref_tp = p.add_matrix_equality(
        [("Y", lambda h: la.partial_trace(h, (d_in, d_out), side="second")), ("t", -np.eye(d_in, dtype=complex) / d_in)],
        np.zeros((d_in, d_in)),
    )
    ref_ppt = p.add_matrix_equality(
        [("Z", 1.0), ("Y", lambda h: -la.partial_transpose(h, (d_in, d_out), side="first"))],
        j_pt,
    )
    p.minimize({"t": 1.0})
    sol = solve_verified(p, "quantum memory")
    if sol.status != "optimal":
        raise MeasureError(f"quantum memory solve failed: {sol.status}")

    xi = sol.dual_matrix(ref_ppt)
    y_tp = sol.dual_matrix(ref_tp)
    reproduced = float(np.trace(j_pt @ xi).real)
    certificate = {
        "kind": "memory-witness",
        "ppt_dual": xi,
        "tp_dual": y_tp,
        "reproduced_value": reproduced,
    }
    status = "exact" if (d_in, d_out) == (2, 2) else "lower-bound"
    return RobustnessResult(sol.objective, status=status, certificate=certificate, gap=sol.gap)
