"""Robustness of non-macrorealism: distance of a two-time correlation table
from the hidden-variable polytope, as a linear program over product
deterministic strategies.

    min sum_l w_l - 1   s.t.   sum_l w_l D_l(a,b|x,y) >= p(a,b|x,y),  w >= 0.

The noise distribution implied at the optimum is an arbitrary normalized
conditional distribution; ``no_signaling_noise=True`` restricts it to the
no-signaling set.
"""
from __future__ import annotations

import numpy as np

from ..conic import ConicProgram
from ._solve import solve_verified
from ..correlations import CorrelationTable, enumerate_deterministic
from .result import MeasureError, RobustnessResult


def _product_strategies(table: CorrelationTable):
    nx, ny, na, nb = table.shape
    da, db = enumerate_deterministic(nx, na, parties=2, n_inputs_b=ny, n_outcomes_b=nb)
    return da, db


def lhv_membership(table: CorrelationTable, tol: float = 1e-9) -> bool:
    return non_macrorealism_robustness(table).value <= tol


def non_macrorealism_robustness(table: CorrelationTable, no_signaling_noise: bool = False) -> RobustnessResult:
    nx, ny, na, nb = table.shape
    da, db = _product_strategies(table)
    n_l = len(da) * len(db)

    p = ConicProgram()
    for lam in range(n_l):
        p.psd_block(f"w{lam}", 1)
    for x in range(nx):
        for y in range(ny):
            for a in range(na):
                for b in range(nb):
                    p.psd_block(f"s{(x, y, a, b)}", 1)

    def strat(lam):
        la_, lb = divmod(lam, len(db))
        return la_, lb

    refs = {}
    for x in range(nx):
        for y in range(ny):
            for a in range(na):
                for b in range(nb):
                    terms = {}
                    for lam in range(n_l):
                        ia, ib = strat(lam)
                        if da.response(ia, x) == a and db.response(ib, y) == b:
                            terms[f"w{lam}"] = 1.0
                    terms[f"s{(x, y, a, b)}"] = -1.0
                    refs[(x, y, a, b)] = p.add_equality(terms, table.probs[x, y, a, b])

    if no_signaling_noise:
        # noise marginals sum_b s(a,b|x,y) must not depend on y, and
        # sum_a s(a,b|x,y) not on x
        for x in range(nx):
            for a in range(na):
                for y in range(1, ny):
                    terms = {}
                    for b in range(nb):
                        terms[f"s{(x, 0, a, b)}"] = terms.get(f"s{(x, 0, a, b)}", 0.0) + 1.0
                        terms[f"s{(x, y, a, b)}"] = terms.get(f"s{(x, y, a, b)}", 0.0) - 1.0
                    p.add_equality(terms, 0.0)
        for y in range(ny):
            for b in range(nb):
                for x in range(1, nx):
                    terms = {}
                    for a in range(na):
                        terms[f"s{(0, y, a, b)}"] = terms.get(f"s{(0, y, a, b)}", 0.0) + 1.0
                        terms[f"s{(x, y, a, b)}"] = terms.get(f"s{(x, y, a, b)}", 0.0) - 1.0
                    p.add_equality(terms, 0.0)

    p.minimize({f"w{lam}": 1.0 for lam in range(n_l)}, constant=-1.0)
    sol = solve_verified(p, "macrorealism")
    if sol.status != "optimal":
        raise MeasureError(f"macrorealism solve failed: {sol.status}")

    beta = np.zeros((nx, ny, na, nb))
    for key, ref in refs.items():
        beta[key] = sol.dual_scalar(ref)
    reproduced = float((beta * table.probs).sum() - 1.0)
    certificate = {
        "kind": "temporal-bell-functional",
        "coefficients": beta,
        "reproduced_value": reproduced,
    }
    # restricting the noise class can only increase the optimum, so the
    # no-signaling variant upper-bounds the default measure
    status = "upper-bound" if no_signaling_noise else "exact"
    return RobustnessResult(sol.objective, status=status, certificate=certificate, gap=sol.gap)
