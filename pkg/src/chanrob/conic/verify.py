"""Independent audit of a solver answer from its raw values."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ConicError, ConicProgram, Solution, smat

__all__ = ["verify_solution", "VerificationReport"]

FLAG_TOL = 1e-7


@dataclass
class VerificationReport:
    equality_residual: float
    dual_residual: float
    min_block_eigenvalue: float
    min_dual_eigenvalue: float
    duality_gap: float
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_solution(program: ConicProgram, solution: Solution, tol: float = FLAG_TOL) -> VerificationReport:
    """Recompute residuals, block eigenvalues and the duality gap of an
    ``optimal`` solution directly from its raw vectors; anything above ``tol``
    is flagged.  Report only; never raises on violations."""
    if solution.status != "optimal":
        raise ConicError(f"can only verify optimal solutions, got status {solution.status!r}")
    a, b, c, segments = program.data()
    x, y, s = solution.x, solution.y, solution.s

    eq_res = float(np.abs(a @ x - b).max()) if b.size else 0.0
    dual_res = float(np.abs(c - a.T @ y - s).max())

    def min_eig(vec):
        worst = np.inf
        for off, d in segments:
            blk = smat(vec[off : off + d * d], d)
            worst = min(worst, float(np.linalg.eigvalsh(blk)[0]))
        return worst

    min_x = min_eig(x)
    min_s = min_eig(s)
    gap = float(c @ x - b @ y)

    report = VerificationReport(
        equality_residual=eq_res,
        dual_residual=dual_res,
        min_block_eigenvalue=min_x,
        min_dual_eigenvalue=min_s,
        duality_gap=gap,
    )
    if eq_res > tol:
        report.violations.append(f"equality residual {eq_res:.3e} > {tol:.1e}")
    if dual_res > tol:
        report.violations.append(f"dual residual {dual_res:.3e} > {tol:.1e}")
    if min_x < -tol:
        report.violations.append(f"primal block eigenvalue {min_x:.3e} < -{tol:.1e}")
    if min_s < -tol:
        report.violations.append(f"dual block eigenvalue {min_s:.3e} < -{tol:.1e}")
    if abs(gap) > tol * (1.0 + abs(c @ x) + abs(b @ y)):
        report.violations.append(f"duality gap {gap:.3e} beyond tolerance")
    return report
