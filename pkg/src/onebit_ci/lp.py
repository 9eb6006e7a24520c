"""Box-constrained max-min linear programming.

Solves   maximize_v  min_l  rows[l] . v + offset[l]   s.t.  lower <= v <= upper

via the epigraph form (introduce t, constraints t <= rows[l].v + offset[l])
and a dense primal simplex with bounded variables. A simplex vertex keeps the
saturation structure of the optimum sharp: every nonbasic box variable sits
exactly on a bound, which is what the downstream fix-and-branch refinement
relies on. Pivoting is Dantzig by default and switches to Bland's rule after
a stall of degenerate steps, so the solve always terminates.
"""

from dataclasses import dataclass

import numpy as np

SATURATION_RTOL = 1e-6
FEASIBILITY_TOL = 1e-10
OPTIMALITY_TOL = 1e-9
_PIVOT_TOL = 1e-11
_DEGENERATE_STEP = 1e-11
_STALL_LIMIT = 50
_REFACTOR_EVERY = 100


class LpNumericalError(RuntimeError):
    """The simplex failed to converge or lost feasibility beyond repair."""


@dataclass(frozen=True)
class BoxedMaxMinLp:
    """Max-min objective rows plus elementwise box bounds on the variables."""

    rows: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        r, n = rows.shape
        if r < 1 or n < 1:
            raise ValueError(f"need at least one row and one variable, got shape {rows.shape}")
        if lower.shape != (n,) or upper.shape != (n,):
            raise ValueError("bound vectors must match the number of columns")
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("rows and bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_vars(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class RelaxedSolution:
    """Optimum of a boxed max-min LP with its saturation partition.

    ``saturated`` holds the indices lying on a box bound (within the relative
    saturation tolerance), ``interior`` the strict complement. ``t`` is the
    attained min-scaling objective.
    """

    v: np.ndarray
    t: float
    saturated: np.ndarray
    interior: np.ndarray


def _classify_saturation(v, lower, upper):
    scale = np.maximum(np.abs(lower), np.abs(upper))
    gap = np.minimum(upper - v, v - lower)
    sat = gap <= SATURATION_RTOL * scale
    idx = np.arange(v.size)
    return idx[sat], idx[~sat]


def _solve_epigraph(rows, lower, upper, offsets):
    """Core simplex. Returns (v, t, iterations).

    Variable layout: [0, n) box variables, n the epigraph variable, then one
    slack per row. The epigraph variable is free, enters the initial basis
    and, having no bound to block on, never leaves it.
    """
    r_rows, n = rows.shape
    n_tot = n + 1 + r_rows
    lo = np.concatenate([lower, [-np.inf], np.zeros(r_rows)])
    hi = np.concatenate([upper, [np.inf], np.full(r_rows, np.inf)])

    # Start with every box variable on the bound favoured by the column sum,
    # then make the worst row tight: a basic feasible point with no phase 1.
    col_pref = rows.sum(axis=0) >= 0.0
    z = np.empty(n_tot)
    z[:n] = np.where(col_pref, upper, lower)
    vals = rows @ z[:n] + offsets
    l_star = int(np.argmin(vals))
    z[n] = vals[l_star]
    z[n + 1:] = vals - vals[l_star]

    at_upper = np.zeros(n_tot, dtype=bool)
    at_upper[:n] = col_pref
    in_basis = np.zeros(n_tot, dtype=bool)
    basis = np.empty(r_rows, dtype=np.int64)
    basis[0] = n
    k = 1
    for l in range(r_rows):
        if l != l_star:
            basis[k] = n + 1 + l
            k += 1
    in_basis[basis] = True

    fixed_range = hi - lo <= 0.0  # pinned variables can never enter

    def column(j):
        if j < n:
            return rows[:, j]
        if j == n:
            return -np.ones(r_rows)
        col = np.zeros(r_rows)
        col[j - n - 1] = -1.0
        return col

    def basis_matrix():
        b_mat = np.empty((r_rows, r_rows))
        for i, j in enumerate(basis):
            b_mat[:, i] = column(j)
        return b_mat

    def refresh_basic_values(b_inv):
        z_masked = z.copy()
        z_masked[basis] = 0.0
        rhs = -offsets - (rows @ z_masked[:n] - z_masked[n] - z_masked[n + 1:])
        z[basis] = b_inv @ rhs

    b_inv = np.linalg.inv(basis_matrix())
    c_b = np.zeros(r_rows)

    stall = 0
    bland = False
    pivots_since_refactor = 0
    max_iter = 2000 + 40 * n_tot

    for it in range(max_iter):
        c_b[:] = 0.0
        c_b[basis == n] = -1.0
        lam = b_inv.T @ c_b

        red = np.empty(n_tot)
        red[:n] = -(rows.T @ lam)
        red[n] = -1.0 + lam.sum()
        red[n + 1:] = lam

        nonbasic = ~in_basis & ~fixed_range
        elig = nonbasic & (
            (~at_upper & (red < -OPTIMALITY_TOL)) | (at_upper & (red > OPTIMALITY_TOL))
        )
        if not elig.any():
            refresh_basic_values(np.linalg.inv(basis_matrix()))
            v = np.clip(z[:n], lower, upper)
            return v, float(z[n]), it

        if bland:
            j = int(np.argmax(elig))
        else:
            viol = np.where(elig, np.abs(red), -1.0)
            j = int(np.argmax(viol))

        sigma = -1.0 if at_upper[j] else 1.0
        d = b_inv @ column(j)
        w = sigma * d

        z_b = z[basis]
        lo_b = lo[basis]
        hi_b = hi[basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            down = np.where(w > _PIVOT_TOL, (z_b - lo_b) / w, np.inf)
            up = np.where(w < -_PIVOT_TOL, (hi_b - z_b) / (-w), np.inf)
        limit = np.minimum(down, up)
        limit_min = limit.min() if r_rows else np.inf
        step_own = hi[j] - lo[j]
        step = min(step_own, limit_min)
        if not np.isfinite(step):
            raise LpNumericalError("unbounded direction in a boxed problem (inconsistent input)")
        step = max(step, 0.0)

        degenerate = step <= _DEGENERATE_STEP
        if step_own <= limit_min:
            # Bound flip: the entering variable crosses to its other bound.
            z[basis] = z_b - sigma * step_own * d
            z[j] = hi[j] if sigma > 0 else lo[j]
            at_upper[j] = not at_upper[j]
        else:
            ties = limit <= step * (1.0 + 1e-12) + 1e-15
            tie_idx = np.flatnonzero(ties)
            i_out = int(tie_idx[np.argmax(np.abs(w[tie_idx]))])
            k_out = int(basis[i_out])
            pivot = d[i_out]
            if abs(pivot) < _PIVOT_TOL:
                b_inv = np.linalg.inv(basis_matrix())
                d = b_inv @ column(j)
                pivot = d[i_out]
                if abs(pivot) < _PIVOT_TOL:
                    raise LpNumericalError(
                        f"pivot {pivot:.3g} below tolerance after refactorization (iteration {it})"
                    )
            z[basis] = z_b - sigma * step * d
            z[j] = (lo[j] if sigma > 0 else hi[j]) + sigma * step
            z[k_out] = lo[k_out] if w[i_out] > 0 else hi[k_out]
            at_upper[k_out] = w[i_out] < 0
            in_basis[k_out] = False
            in_basis[j] = True
            basis[i_out] = j

            factor = -d / pivot
            factor[i_out] = 1.0 / pivot - 1.0
            b_inv += np.outer(factor, b_inv[i_out])

            pivots_since_refactor += 1
            if pivots_since_refactor >= _REFACTOR_EVERY:
                b_inv = np.linalg.inv(basis_matrix())
                refresh_basic_values(b_inv)
                pivots_since_refactor = 0

        if degenerate:
            stall += 1
            if stall >= _STALL_LIMIT:
                bland = True
        else:
            stall = 0
            bland = False

    raise LpNumericalError(
        f"no convergence after {max_iter} iterations (rows={r_rows}, vars={n}, stall={stall})"
    )


def _finish(problem, v, t):
    achieved = float(np.min(problem.rows @ v))
    if abs(achieved - t) > 1e-8:
        raise LpNumericalError(
            f"objective mismatch after solve: basic t={t!r}, achieved min={achieved!r}"
        )
    sat, interior = _classify_saturation(v, problem.lower, problem.upper)
    return RelaxedSolution(v=v, t=achieved, saturated=sat, interior=interior)


def solve_maxmin(problem: BoxedMaxMinLp) -> RelaxedSolution:
    """Globally solve the boxed max-min LP.

    The returned point is a simplex vertex; ties between optima resolve by
    the deterministic pivot order, so repeated solves of the same problem are
    bit-identical.
    """
    v, t, _ = _solve_epigraph(problem.rows, problem.lower, problem.upper, np.zeros(problem.n_rows))
    return _finish(problem, v, t)


def solve_restricted(problem: BoxedMaxMinLp, fixed: dict[int, float]) -> RelaxedSolution:
    """Solve the LP with some coordinates pinned to a box bound.

    Each fixed coordinate must sit on its own lower or upper bound. The free
    part is solved as a reduced LP with the fixed contribution folded into a
    per-row offset; the returned solution is re-expanded to full length.
    """
    n = problem.n_vars
    fixed_idx = np.fromiter(sorted(fixed), dtype=np.int64, count=len(fixed))
    if fixed_idx.size:
        if fixed_idx[0] < 0 or fixed_idx[-1] >= n:
            raise ValueError("fixed index out of range")
        vals = np.array([float(fixed[int(i)]) for i in fixed_idx])
        on_lower = np.abs(vals - problem.lower[fixed_idx]) <= 1e-12
        on_upper = np.abs(vals - problem.upper[fixed_idx]) <= 1e-12
        if not np.all(on_lower | on_upper):
            bad = int(fixed_idx[np.argmin(on_lower | on_upper)])
            raise ValueError(f"fixed value for coordinate {bad} is not a box bound")
        vals = np.where(on_upper, problem.upper[fixed_idx], problem.lower[fixed_idx])
    else:
        vals = np.zeros(0)

    free = np.setdiff1d(np.arange(n), fixed_idx, assume_unique=True)
    v = np.empty(n)
    v[fixed_idx] = vals
    offsets = problem.rows[:, fixed_idx] @ vals

    if free.size == 0:
        t = float(np.min(offsets))
        sat, interior = _classify_saturation(v, problem.lower, problem.upper)
        return RelaxedSolution(v=v, t=t, saturated=sat, interior=interior)

    v_free, t, _ = _solve_epigraph(
        problem.rows[:, free], problem.lower[free], problem.upper[free], offsets
    )
    v[free] = v_free
    return _finish(problem, v, t)
