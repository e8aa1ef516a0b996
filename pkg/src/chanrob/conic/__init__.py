"""Small dense SDP/LP: problem model, interior-point solver, audits."""
from .model import ConicError, ConicProgram, ConstraintRef, Solution, smat, svec
from .solver import SolverOptions, solve
from .verify import VerificationReport, verify_solution

__all__ = [
    "ConicError",
    "ConicProgram",
    "ConstraintRef",
    "Solution",
    "SolverOptions",
    "VerificationReport",
    "smat",
    "svec",
    "solve",
    "verify_solution",
]
