"""Adapter seam: solve a :class:`ConicProgram` with an external conic solver.

Used as an independent oracle in the test suite; requires ``cvxpy``.
"""
from __future__ import annotations

import numpy as np

from .model import ConicProgram, Solution, svec

__all__ = ["solve_with_cvxpy"]


def solve_with_cvxpy(program: ConicProgram, solver: str | None = None) -> Solution:
    import cvxpy as cp

    a, b, c, segments = program.data()
    n = program.num_coords

    variables = []
    coord_exprs = []
    for off, d in segments:
        if d == 1:
            v = cp.Variable(nonneg=True)
            variables.append(v)
            coord_exprs.append(cp.reshape(v, (1,), order="C"))
            continue
        v = cp.Variable((d, d), hermitian=True)
        variables.append(v)
        parts = [cp.real(v[i, i]) for i in range(d)]
        exprs = [cp.hstack(parts)]
        iu, ju = np.triu_indices(d, 1)
        for i, j in zip(iu, ju):
            exprs.append(cp.hstack([np.sqrt(2.0) * cp.real(v[i, j]), np.sqrt(2.0) * cp.imag(v[i, j])]))
        coord_exprs.append(cp.hstack(exprs))
    xvec = cp.hstack(coord_exprs)

    constraints = [v >> 0 for v, (off, d) in zip(variables, segments) if d > 1]
    if b.size:
        constraints.append(a @ xvec == b)
    problem = cp.Problem(cp.Minimize(c @ xvec), constraints)
    if solver is None and "CLARABEL" in cp.installed_solvers():
        solver = "CLARABEL"  # interior-point accuracy beats the first-order default
    kwargs = {"solver": solver} if solver is not None else {}
    problem.solve(**kwargs)

    if problem.status not in ("optimal", "optimal_inaccurate"):
        return Solution(
            status="infeasible" if "infeasible" in problem.status else "numerical-failure",
            objective=float("nan"),
            x=np.zeros(n),
            y=np.zeros(a.shape[0]),
            s=np.zeros(n),
            gap=float("nan"),
            iterations=0,
            primal_residual=float("nan"),
            dual_residual=float("nan"),
            program=program,
        )

    x = np.zeros(n)
    for v, (off, d) in zip(variables, segments):
        if d == 1:
            x[off] = float(v.value)
        else:
            x[off : off + d * d] = svec(np.asarray(v.value))
    y = np.zeros(a.shape[0])
    if b.size:
        yv = np.asarray(constraints[-1].dual_value, dtype=float).ravel()
        # cvxpy's equality duals satisfy c - Aᵀ(-y) ... sign convention: pick
        # the sign that gives b·y <= c·x (weak duality)
        y = -yv if float(b @ (-yv)) <= float(c @ x) + 1e-6 else yv
    return Solution(
        status="optimal",
        objective=float(problem.value) + program.objective_constant,
        x=x,
        y=y,
        s=c - a.T @ y,
        gap=float("nan"),
        iterations=0,
        primal_residual=float(np.abs(a @ x - b).max()) if b.size else 0.0,
        dual_residual=0.0,
        program=program,
    )
