"""Small self-contained numerical kernel: dense LP solver, bisection, entropy.

The LP solver is a dense two-phase simplex with Bland's rule.  Every problem
in this package is tiny (at most a few hundred rows), so determinism and
simplicity win over sparse machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass
class LinearProgram:
    """min c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x free or x >= lb.

    objective may be None for a pure feasibility problem.  ``lower_bounds``
    is either None (all variables free) or a vector where finite entries are
    lower bounds and -inf marks a free variable.
    """

    n_vars: int
    objective: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lower_bounds: np.ndarray | None = None

    def validate(self) -> None:
        def chk(a, b, name):
            if a is None:
                return
            a = np.asarray(a, dtype=float)
            if a.ndim != 2 or a.shape[1] != self.n_vars:
                raise ValueError(f"{name} must be 2-d with {self.n_vars} columns")
            if b is None or len(np.atleast_1d(b)) != a.shape[0]:
                raise ValueError(f"{name} rhs length mismatch")
            if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
                raise ValueError(f"{name} contains non-finite entries")

        chk(self.a_eq, self.b_eq, "a_eq")
        chk(self.a_ub, self.b_ub, "a_ub")
        if self.objective is not None:
            c = np.asarray(self.objective, dtype=float)
            if c.shape != (self.n_vars,):
                raise ValueError("objective dimension mismatch")
            if not np.all(np.isfinite(c)):
                raise ValueError("objective contains non-finite entries")


@dataclass
class LpResult:
    status: str  # "optimal" | "feasible" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    value: float | None = None


def _bland_simplex(tab: np.ndarray, basis: list[int], ncols: int, tol: float) -> str:
    """Run simplex pivots on tableau ``tab`` (objective in the last row,
    rhs in the last column).  Bland's smallest-index rule on entering and
    leaving variables, so no cycling."""
    m = tab.shape[0] - 1
    max_iter = 50 * (m + ncols) + 1000
    for _ in range(max_iter):
        red = tab[-1, :ncols]
        enter = -1
        for j in range(ncols):
            if red[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        col = tab[:m, enter]
        rhs = tab[:m, -1]
        best_ratio = math.inf
        for i in range(m):
            if col[i] > tol:
                r = rhs[i] / col[i]
                if r < best_ratio:
                    best_ratio = r
        if not math.isfinite(best_ratio):
            return "unbounded"
        # among exact ratio ties, leave by smallest basis index (Bland)
        eps = 1e-12 * (1.0 + abs(best_ratio))
        best = None
        for i in range(m):
            if col[i] > tol and rhs[i] / col[i] <= best_ratio + eps:
                if best is None or basis[i] < basis[best]:
                    best = i
        piv = tab[best, enter]
        tab[best, :] /= piv
        colvals = tab[:, enter].copy()
        colvals[best] = 0.0
        tab -= np.outer(colvals, tab[best, :])
        tab[:, enter] = 0.0
        tab[best, enter] = 1.0
        basis[best] = enter
    raise RuntimeError("simplex iteration limit exceeded")


def solve_lp(p: LinearProgram, tol_lp: float = DEFAULT_TOL) -> LpResult:
    """Two-phase dense simplex.  Free variables are split into differences
    of nonnegatives; finite lower bounds are shifted to zero."""
    if tol_lp <= 0:
        raise ValueError("tol_lp must be positive")
    p.validate()
    n = p.n_vars

    lb = np.full(n, -math.inf) if p.lower_bounds is None else np.asarray(
        p.lower_bounds, dtype=float
    )
    free = ~np.isfinite(lb)
    shift = np.where(free, 0.0, lb)

    # columns: one per bounded var, two (plus/minus) per free var
    col_of = np.zeros(n, dtype=int)
    ncols = 0
    for j in range(n):
        col_of[j] = ncols
        ncols += 2 if free[j] else 1

    def expand(amat: np.ndarray) -> np.ndarray:
        out = np.zeros((amat.shape[0], ncols))
        for j in range(n):
            out[:, col_of[j]] = amat[:, j]
            if free[j]:
                out[:, col_of[j] + 1] = -amat[:, j]
        return out

    rows = []
    rhs = []
    n_slack = 0
    if p.a_eq is not None:
        a = np.asarray(p.a_eq, dtype=float)
        b = np.asarray(p.b_eq, dtype=float) - a @ shift
        rows.append((expand(a), b, None))
    if p.a_ub is not None:
        a = np.asarray(p.a_ub, dtype=float)
        b = np.asarray(p.b_ub, dtype=float) - a @ shift
        rows.append((expand(a), b, "slack"))
        n_slack = a.shape[0]

    m = sum(r[0].shape[0] for r in rows)
    total = ncols + n_slack
    amat = np.zeros((m, total))
    bvec = np.zeros(m)
    at = 0
    s_at = ncols
    for a, b, kind in rows:
        k = a.shape[0]
        amat[at : at + k, :ncols] = a
        bvec[at : at + k] = b
        if kind == "slack":
            for i in range(k):
                amat[at + i, s_at + i] = 1.0
        at += k

    neg = bvec < 0
    amat[neg] *= -1.0
    bvec[neg] *= -1.0

    # phase 1: slack columns with +1 sign and nonnegative rhs can start in
    # the basis; only the remaining rows get artificial variables
    slack_col = np.full(m, -1, dtype=int)
    at = 0
    for a, b, kind in rows:
        k = a.shape[0]
        if kind == "slack":
            for i in range(k):
                if not neg[at + i]:
                    slack_col[at + i] = s_at + i
        at += k
    need_art = [i for i in range(m) if slack_col[i] < 0]
    n_art = len(need_art)

    tab = np.zeros((m + 1, total + n_art + 1))
    tab[:m, :total] = amat
    tab[:m, -1] = bvec
    basis = [0] * m
    for i in range(m):
        if slack_col[i] >= 0:
            basis[i] = int(slack_col[i])
    for idx, i in enumerate(need_art):
        tab[i, total + idx] = 1.0
        basis[i] = total + idx
    tab[-1, total : total + n_art] = 1.0
    for i in need_art:
        tab[-1, :] -= tab[i, :]
    st = _bland_simplex(tab, basis, total + n_art, tol_lp)
    if st != "optimal" or -tab[-1, -1] > tol_lp:
        return LpResult("infeasible")

    # drive remaining artificials out of the basis, then drop their columns
    for i in range(m):
        if basis[i] >= total:
            row = tab[i, :total]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > tol_lp:
                piv = tab[i, j]
                tab[i, :] /= piv
                colvals = tab[:, j].copy()
                colvals[i] = 0.0
                tab -= np.outer(colvals, tab[i, :])
                tab[:, j] = 0.0
                tab[i, j] = 1.0
                basis[i] = j
    keep = [i for i in range(m) if basis[i] < total]
    tab2 = np.zeros((len(keep) + 1, total + 1))
    tab2[: len(keep), :total] = tab[keep, :total]
    tab2[: len(keep), -1] = tab[keep, -1]
    basis2 = [basis[i] for i in keep]

    if p.objective is not None:
        cfull = np.zeros(total)
        cexp = np.zeros(ncols)
        c = np.asarray(p.objective, dtype=float)
        for j in range(n):
            cexp[col_of[j]] = c[j]
            if free[j]:
                cexp[col_of[j] + 1] = -c[j]
        cfull[:ncols] = cexp
        tab2[-1, :total] = cfull
        for i, bj in enumerate(basis2):
            if abs(cfull[bj]) > 0:
                tab2[-1, :] -= cfull[bj] * tab2[i, :]
        st = _bland_simplex(tab2, basis2, total, tol_lp)
        if st == "unbounded":
            return LpResult("unbounded")

    xfull = np.zeros(total)
    for i, bj in enumerate(basis2):
        xfull[bj] = tab2[i, -1]
    x = np.empty(n)
    for j in range(n):
        if free[j]:
            x[j] = xfull[col_of[j]] - xfull[col_of[j] + 1]
        else:
            x[j] = xfull[col_of[j]] + shift[j]
    if p.objective is not None:
        val = float(np.asarray(p.objective, dtype=float) @ x)
        return LpResult("optimal", x=x, value=val)
    return LpResult("feasible", x=x)


def bisect(f, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Locate a sign change of ``f`` on [lo, hi] to within ``tol``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisect requires opposite signs at the endpoints")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shannon_entropy(p, base: float | None = None, tol: float = 1e-7) -> float:
    """-sum p log p with 0 log 0 = 0.  Natural log unless ``base`` given.

    Small negative entries (>= -tol) are clipped to zero and the vector is
    renormalized; anything worse is rejected.
    """
    q = np.asarray(p, dtype=float)
    if np.any(q < -tol):
        raise ValueError("negative probability beyond tolerance")
    q = np.clip(q, 0.0, None)
    s = q.sum()
    if not math.isfinite(s) or abs(s - 1.0) > max(tol, 1e-6):
        raise ValueError("probabilities do not sum to 1")
    q = q / s
    nz = q[q > 0]
    h = float(-(nz * np.log(nz)).sum())
    if base is not None:
        h /= math.log(base)
    return h
