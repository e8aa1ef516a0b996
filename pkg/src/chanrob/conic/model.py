"""Problem model for small dense semidefinite/linear programs.

A :class:`ConicProgram` consists of Hermitian PSD-constrained variable blocks
(dimension-1 blocks double as nonnegative scalars), optional free scalars,
real-linear equality constraints, and a real-linear objective (sense: min).
Inequalities are expressed by the caller as explicit PSD slack blocks.

Each d x d Hermitian block is parametrized by d² real coordinates through an
isometric "svec" embedding (diagonal entries, then √2·Re / √2·Im of each
upper-triangular entry), so that Tr(A B) = svec(A)·svec(B) and the PSD cone
is self-dual in coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "svec",
    "smat",
    "svec_dim",
    "ConicProgram",
    "Solution",
    "ConicError",
]


class ConicError(ValueError):
    """Malformed program or unusable solution."""


def svec_dim(d: int) -> int:
    return d * d


@lru_cache(maxsize=64)
def _triu(d: int):
    iu, ju = np.triu_indices(d, 1)
    return iu, ju


def svec(m: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    iu, ju = _triu(d)
    out = np.empty(d * d)
    out[:d] = m.diagonal().real
    off = m[iu, ju]
    out[d::2] = np.sqrt(2.0) * off.real
    out[d + 1 :: 2] = np.sqrt(2.0) * off.imag
    return out


def smat(x: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    x = np.asarray(x, dtype=float)
    m = np.zeros((d, d), dtype=complex)
    np.fill_diagonal(m, x[:d])
    iu, ju = _triu(d)
    off = (x[d::2] + 1j * x[d + 1 :: 2]) / np.sqrt(2.0)
    m[iu, ju] = off
    m[ju, iu] = off.conj()
    return m


@dataclass(frozen=True)
class _Block:
    label: str
    dim: int
    offset: int  # start of svec coordinates in the concatenated vector


@dataclass(frozen=True)
class _FreeScalar:
    label: str
    pos_block: str
    neg_block: str


@dataclass(frozen=True)
class ConstraintRef:
    """Handle to a contiguous group of scalar equalities (one matrix equality
    expands to dim² of them); used to read dual multipliers back."""

    start: int
    count: int
    dim: int  # 0 for scalar constraints


class ConicProgram:
    """Builder and container for one conic problem instance (sense: min)."""

    def __init__(self):
        self._blocks: list[_Block] = []
        self._by_label: dict[str, _Block] = {}
        self._free: dict[str, _FreeScalar] = {}
        self._rows: list[np.ndarray] = []
        self._rhs: list[float] = []
        self._c: np.ndarray | None = None
        self._c_parts: dict[str, np.ndarray] = {}
        self.objective_constant = 0.0

    # -- variables ---------------------------------------------------------

    def psd_block(self, label: str, dim: int) -> str:
        if label in self._by_label or label in self._free:
            raise ConicError(f"duplicate block label {label!r}")
        if dim < 1:
            raise ConicError("block dimension must be >= 1")
        if self._rows or self._c is not None:
            raise ConicError("declare all blocks before adding constraints/objective")
        self._blocks.append(_Block(label, dim, self.num_coords))
        self._by_label[label] = self._blocks[-1]
        return label

    def free_scalar(self, label: str) -> str:
        """A sign-unconstrained scalar, realized as the difference of two
        nonnegative (1x1 PSD) blocks."""
        pos = self.psd_block(f"{label}.pos", 1)
        neg = self.psd_block(f"{label}.neg", 1)
        self._free[label] = _FreeScalar(label, pos, neg)
        return label

    @property
    def num_coords(self) -> int:
        return sum(b.dim * b.dim for b in self._blocks)

    @property
    def num_constraints(self) -> int:
        return len(self._rows)

    @property
    def block_dims(self) -> list[tuple[str, int]]:
        return [(b.label, b.dim) for b in self._blocks]

    def _coeff_row(self, terms: dict) -> np.ndarray:
        row = np.zeros(self.num_coords)
        for label, coeff in terms.items():
            if label in self._free:
                fs = self._free[label]
                row[self._by_label[fs.pos_block].offset] += float(coeff)
                row[self._by_label[fs.neg_block].offset] -= float(coeff)
                continue
            blk = self._by_label.get(label)
            if blk is None:
                raise ConicError(f"unknown block {label!r}")
            cm = np.asarray(coeff, dtype=complex)
            if cm.ndim == 0:
                if blk.dim != 1:
                    raise ConicError(f"scalar coefficient for matrix block {label!r}")
                cm = cm.reshape(1, 1)
            if cm.shape != (blk.dim, blk.dim):
                raise ConicError(
                    f"coefficient for {label!r} must be {blk.dim}x{blk.dim}, got {cm.shape}"
                )
            row[blk.offset : blk.offset + blk.dim * blk.dim] += svec(0.5 * (cm + cm.conj().T))
        return row

    # -- constraints and objective ------------------------------------------

    def add_equality(self, terms: dict, rhs: float) -> ConstraintRef:
        """Scalar equality  Σ_b ⟨C_b, X_b⟩ = rhs  (C Hermitian, rhs real)."""
        ref = ConstraintRef(len(self._rows), 1, 0)
        self._rows.append(self._coeff_row(terms))
        self._rhs.append(float(rhs))
        return ref

    def add_matrix_equality(self, terms: list[tuple[str, object]], rhs: np.ndarray) -> ConstraintRef:
        """Matrix equality  Σ_b L_b(X_b) = RHS  with Hermitian RHS.

        ``terms`` is a list of ``(block_label, map)`` where ``map`` is either a
        Hermitian-to-Hermitian linear callable, a scalar multiplier, or a
        constant Hermitian matrix (for 1x1 blocks: t ↦ t·M).  The equality is
        expanded into dim(RHS)² scalar rows in svec coordinates.
        """
        rhs = np.asarray(rhs, dtype=complex)
        dout = rhs.shape[0]
        nout = dout * dout
        start = len(self._rows)
        rows = np.zeros((nout, self.num_coords))
        for label, mp in terms:
            blk = self._by_label.get(label)
            if blk is None:
                raise ConicError(f"unknown block {label!r}")
            cols = self._map_columns(blk, mp, dout)
            rows[:, blk.offset : blk.offset + blk.dim * blk.dim] += cols
        rb = svec(0.5 * (rhs + rhs.conj().T))
        for r in range(nout):
            self._rows.append(rows[r])
            self._rhs.append(rb[r])
        return ConstraintRef(start, nout, dout)

    def _map_columns(self, blk: _Block, mp, dout: int) -> np.ndarray:
        """svec matrix (dout² x dim²) of the linear map applied to ``blk``."""
        n_in = blk.dim * blk.dim
        cols = np.zeros((dout * dout, n_in))
        if callable(mp):
            fn = mp
        else:
            arr = np.asarray(mp, dtype=complex)
            if arr.ndim == 0:
                fn = lambda h, a=complex(arr): a * h  # noqa: E731
            elif blk.dim == 1:
                if arr.shape != (dout, dout):
                    raise ConicError("constant-matrix map has wrong output shape")
                fn = lambda h, a=arr: h[0, 0] * a  # noqa: E731
            else:
                raise ConicError("matrix blocks need a callable or scalar map")
        for k in range(n_in):
            e = np.zeros(n_in)
            e[k] = 1.0
            out = np.asarray(fn(smat(e, blk.dim)), dtype=complex)
            if out.shape != (dout, dout):
                raise ConicError(
                    f"map for block {blk.label!r} returned shape {out.shape}, expected {(dout, dout)}"
                )
            cols[:, k] = svec(0.5 * (out + out.conj().T))
        return cols

    def minimize(self, terms: dict, constant: float = 0.0) -> None:
        self._c = self._coeff_row(terms)
        self._c_parts = dict(terms)
        self.objective_constant = float(constant)

    # -- assembled data -----------------------------------------------------

    def data(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[tuple[int, int]]]:
        """Return (A, b, c, cone) with rows of A the equality functionals and
        ``cone`` the list of (offset, dim) PSD segments."""
        if not self._blocks:
            raise ConicError("program has no variables")
        n = self.num_coords
        a = np.vstack(self._rows) if self._rows else np.zeros((0, n))
        b = np.asarray(self._rhs)
        c = self._c if self._c is not None else np.zeros(n)
        cone = [(blk.offset, blk.dim) for blk in self._blocks]
        return a, b, c, cone

    def block_slice(self, label: str) -> tuple[slice, int]:
        blk = self._by_label[label]
        return slice(blk.offset, blk.offset + blk.dim * blk.dim), blk.dim

    def dump_json(self) -> str:
        """Debug dump (blocks, constraint triplets, objective) for offline
        cross-checking."""
        a, b, c, _ = self.data()
        doc = {
            "blocks": [{"label": l, "dim": d} for l, d in self.block_dims],
            "free_scalars": sorted(self._free),
            "constraints": [
                {
                    "row": [[int(j), float(a[i, j])] for j in np.nonzero(a[i])[0]],
                    "rhs": float(b[i]),
                }
                for i in range(a.shape[0])
            ],
            "objective": {
                "linear": [[int(j), float(c[j])] for j in np.nonzero(c)[0]],
                "constant": self.objective_constant,
            },
        }
        return json.dumps(doc)


@dataclass
class Solution:
    """Primal-dual answer for one :class:`ConicProgram`.

    ``status`` is one of ``"optimal"``, ``"infeasible"`` (with a dual ray in
    ``y``), or ``"numerical-failure"``; unbounded programs additionally report
    ``"dual-infeasible"`` with the primal ray in ``x``.  ``objective``
    includes the program's constant term.  ``gap`` is the absolute
    complementarity gap of the scaled primal-dual pair.
    """

    status: str
    objective: float
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    gap: float
    iterations: int
    primal_residual: float
    dual_residual: float
    program: ConicProgram = field(repr=False)

    def block(self, label: str) -> np.ndarray:
        sl, d = self.program.block_slice(label)
        return smat(self.x[sl], d)

    def scalar(self, label: str) -> float:
        if label in self.program._free:
            fs = self.program._free[label]
            return self.block(fs.pos_block)[0, 0].real - self.block(fs.neg_block)[0, 0].real
        return self.block(label)[0, 0].real

    def dual_matrix(self, ref: ConstraintRef) -> np.ndarray:
        if ref.dim == 0:
            raise ConicError("scalar constraint: use dual_scalar")
        return smat(self.y[ref.start : ref.start + ref.count], ref.dim)

    def dual_scalar(self, ref: ConstraintRef) -> float:
        return float(self.y[ref.start])

    @property
    def dual_objective(self) -> float:
        _, b, _, _ = self.program.data()
        return float(b @ self.y) + self.program.objective_constant
