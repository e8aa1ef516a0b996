"""Negativity quantities of the two-time operator.

``temporal_negativity`` is the closed form f = (||P_E||_1 - 1)/2.  The
channel negativity N = (||E∘T||_dia - 1)/2 is computed from the diamond-norm
SDP on the Choi matrix of E∘T, which is exactly P_E; f <= N always, with
equality for the depolarizing family.
"""
from __future__ import annotations

import numpy as np

from .. import linalg as la
from ..channels import PseudoDensityOperator, QuantumChannel, pdo_of_channel
from ..conic import ConicProgram
from ._solve import solve_verified
from .result import MeasureError, RobustnessResult


def temporal_negativity(pdo: PseudoDensityOperator) -> float:
    """f = (||P||_1 - 1) / 2; zero exactly when the PDO is PSD."""
    return max(0.0, (la.trace_norm(pdo.matrix) - 1.0) / 2.0)


def diamond_norm_hermitian(j_unnormalized: np.ndarray, dims: tuple[int, int]) -> float:
    """Diamond norm of a Hermitian-preserving map given its unnormalized Choi
    matrix (input factor first):

        min ||Tr_out(Y)||_inf   s.t.   Y >= J,  Y >= -J.
    """
    d_in, d_out = dims
    n = d_in * d_out
    j = la.hermitian(j_unnormalized, atol=1e-9)
    p = ConicProgram()
    p.psd_block("Y", n)
    p.psd_block("t", 1)
    p.psd_block("Zp", n)
    p.psd_block("Zm", n)
    p.psd_block("W", d_in)
    p.add_matrix_equality([("Y", 1.0), ("Zp", -1.0)], j)
    p.add_matrix_equality([("Y", 1.0), ("Zm", -1.0)], -j)
    p.add_matrix_equality(
        [("t", np.eye(d_in, dtype=complex)), ("Y", lambda h: -la.partial_trace(h, (d_in, d_out), side="second")), ("W", -1.0)],
        np.zeros((d_in, d_in)),
    )
    p.minimize({"t": 1.0})
    sol = solve_verified(p, "diamond norm")
    if sol.status != "optimal":
        raise MeasureError(f"diamond norm solve failed: {sol.status}")
    return sol.objective


def channel_negativity(channel: QuantumChannel) -> RobustnessResult:
    """N = (||E∘T||_dia - 1)/2, with ||E∘T||_dia from the SDP on d·P_E."""
    if channel.d_in != 2 or channel.d_out != 2:
        raise MeasureError("channel negativity is implemented for qubit channels")
    pdo = pdo_of_channel(channel)
    d = 2
    dn = diamond_norm_hermitian(d * pdo.matrix, (d, d))
    value = (dn - 1.0) / 2.0
    f = temporal_negativity(pdo)
    if value < f - 1e-7:
        raise MeasureError(f"diamond-norm bound violated: N = {value} < f = {f}")
    return RobustnessResult(value, status="exact", certificate={"kind": "diamond-norm", "norm": dn, "f_lower_bound": f}, gap=0.0)
