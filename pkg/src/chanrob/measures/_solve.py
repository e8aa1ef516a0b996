"""Shared solve wrapper: every optimal answer feeding a measure is re-audited
from its raw values before being trusted."""
from __future__ import annotations

from ..conic import ConicProgram, Solution, solve as conic_solve, verify_solution
from .result import MeasureError

AUDIT_TOL = 1e-7


def solve_verified(program: ConicProgram, what: str) -> Solution:
    sol = conic_solve(program)
    if sol.status == "optimal":
        report = verify_solution(program, sol, tol=AUDIT_TOL)
        if not report.ok:
            raise MeasureError(f"{what}: solver audit failed: {'; '.join(report.violations)}")
    return sol
