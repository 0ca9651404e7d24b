"""Two-phase revised simplex for small dense LPs in standard form.

    minimize c @ x  subject to  A @ x == b,  x >= 0

Pricing starts with Dantzig's rule (most negative reduced cost). After
``BLAND_AFTER`` consecutive degenerate pivots the phase switches to Bland's rule
(lowest index enters, lowest basic index leaves on ties) for good, which rules
out cycling. The basis matrix is refactored from scratch every iteration; row
counts here stay in the low hundreds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverStall

PIVOT_TOL = 1e-11
COST_TOL = 1e-11
FEAS_TOL = 1e-10
BLAND_AFTER = 50
_CHUNK = 1 << 16
_DENSE_LIMIT = 1 << 24  # entries; larger inputs stay in their own dtype and are priced in chunks


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float
    iterations: int
    farkas: np.ndarray | None = None
    """For infeasible problems: y with y @ A <= 0 columnwise and y @ b > 0."""
    infeasibility: float = 0.0


class _Problem:
    """Standard-form data plus identity artificial columns appended after the n structurals."""

    def __init__(self, A: np.ndarray, b: np.ndarray):
        self.A = A.astype(float) if A.size <= _DENSE_LIMIT else A
        self.rows, self.n = A.shape
        self.b = b

    def column(self, j: int) -> np.ndarray:
        if j < self.n:
            return np.asarray(self.A[:, j], dtype=float)
        e = np.zeros(self.rows)
        e[j - self.n] = 1.0
        return e

    def basis_matrix(self, basis: list[int]) -> np.ndarray:
        return np.column_stack([self.column(j) for j in basis])

    def priced(self, y: np.ndarray) -> np.ndarray:
        """y @ A for the structural columns, chunked so int8 inputs never materialize as float."""
        if self.A.dtype == float:
            return y @ self.A
        out = np.empty(self.n)
        for start in range(0, self.n, _CHUNK):
            block = np.asarray(self.A[:, start:start + _CHUNK], dtype=float)
            out[start:start + _CHUNK] = y @ block
        return out


def _iterate(prob: _Problem, basis: list[int], cost: np.ndarray, allow_artificial: bool,
             max_iter: int, used: int) -> tuple[str, int]:
    n = prob.n
    it = used
    degenerate_run = 0
    bland = False
    while True:
        if it >= max_iter:
            raise SolverStall(f"simplex exceeded {max_iter} iterations")
        B = prob.basis_matrix(basis)
        y = np.linalg.solve(B.T, cost[basis])
        reduced = cost[:n] - prob.priced(y)
        if allow_artificial:
            reduced = np.concatenate([reduced, cost[n:] - y])
        in_basis = np.zeros(reduced.size, dtype=bool)
        in_basis[[j for j in basis if j < reduced.size]] = True
        candidates = np.flatnonzero((reduced < -COST_TOL) & ~in_basis)
        if candidates.size == 0:
            return "optimal", it
        enter = int(candidates[0]) if bland else int(candidates[np.argmin(reduced[candidates])])
        x_b = np.linalg.solve(B, prob.b)
        u = np.linalg.solve(B, prob.column(enter))
        positive = np.flatnonzero(u > PIVOT_TOL)
        if positive.size == 0:
            return "unbounded", it
        ratios = np.maximum(x_b[positive], 0.0) / u[positive]
        best = ratios.min()
        tied = positive[ratios <= best + 1e-14]
        leave = min(tied, key=lambda i: basis[i])
        basis[leave] = enter
        it += 1
        degenerate_run = degenerate_run + 1 if best <= 1e-14 else 0
        bland = bland or degenerate_run >= BLAND_AFTER


def solve(c, A, b, max_iter: int = 20_000) -> LPResult:
    A = np.asarray(A)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    rows, n = A.shape
    signs = np.where(b < 0, -1, 1)
    A_signed = A * signs.astype(A.dtype)[:, None]
    prob = _Problem(A_signed, b * signs)

    # phase 1: minimize the sum of artificials
    basis = list(range(n, n + rows))
    cost1 = np.concatenate([np.zeros(n), np.ones(rows)])
    _, it = _iterate(prob, basis, cost1, allow_artificial=True, max_iter=max_iter, used=0)
    B = prob.basis_matrix(basis)
    x_b = np.linalg.solve(B, prob.b)
    infeas = float(sum(x_b[i] for i, j in enumerate(basis) if j >= n))
    if infeas > FEAS_TOL:
        y = np.linalg.solve(B.T, cost1[basis])
        return LPResult("infeasible", None, float("nan"), it, farkas=y * signs, infeasibility=infeas)

    # pivot zero-level artificials out where a structural column can replace them;
    # those left over sit on redundant rows and never move again
    for pos, j in enumerate(list(basis)):
        if j < n:
            continue
        B_inv_row = np.linalg.solve(prob.basis_matrix(basis).T, np.eye(rows)[pos])
        row = prob.priced(B_inv_row)
        row[[k for k in basis if k < n]] = 0.0
        nz = np.flatnonzero(np.abs(row) > 1e-9)
        if nz.size:
            basis[pos] = int(nz[0])

    cost2 = np.concatenate([c, np.zeros(rows)])
    status, it = _iterate(prob, basis, cost2, allow_artificial=False, max_iter=max_iter, used=it)
    B = prob.basis_matrix(basis)
    x_b = np.linalg.solve(B, prob.b)
    x = np.zeros(n)
    for i, j in enumerate(basis):
        if j < n:
            x[j] = max(x_b[i], 0.0) + 0.0
    if status == "unbounded":
        return LPResult("unbounded", x, float("-inf"), it)
    return LPResult("optimal", x, float(c @ x), it)
