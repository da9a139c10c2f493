"""Dense primal-dual interior-point solver for small block-diagonal SDPs.

Standard form handled here:

    maximize    c . f  +  sum_b <C_b, X_b>
    subject to  sum_b <A_jb, X_b>  +  d_j . f  =  b_j     (j = 1..m)
                X_b  PSD,   f free

Blocks are either dense symmetric matrices or diagonal (stored as
vectors).  The search direction is the XZ (HKM) direction with a
Mehrotra predictor-corrector; the Schur complement is formed explicitly
per block and solved by Cholesky with diagonal regularization on
breakdown.  Free variables are eliminated through a second small
positive-definite system.

Preprocessing removes rank-deficient equality rows (with a warning) and
pins free variables that appear in no constraint.  Runs are
deterministic: identical inputs produce bit-identical iterates.

One solve call is single-threaded; independent solves on distinct
problems may run concurrently.  Per-iteration diagnostics go to the
``reachcert.sdp`` logger at DEBUG level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

logger = logging.getLogger("reachcert.sdp")


class SdpError(RuntimeError):
    pass


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class BlockSpec:
    size: int
    diag: bool = False
    name: str = ""


@dataclass
class SdpProblem:
    """Immutable problem data; see the module docstring for semantics.

    Per block b, ``block_rows[b]`` lists the constraint indices with a
    nonzero coefficient matrix on that block and ``block_data[b]`` stacks
    those matrices: shape (k, s, s) for dense blocks, (k, s) for diagonal
    blocks.
    """

    blocks: tuple[BlockSpec, ...]
    block_rows: list[np.ndarray]
    block_data: list[np.ndarray]
    d_free: np.ndarray  # (m, q)
    rhs: np.ndarray  # (m,)
    obj_free: np.ndarray  # (q,)
    obj_blocks: list[np.ndarray | None]
    free_names: tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return int(self.rhs.shape[0])

    @property
    def n_free(self) -> int:
        return int(self.obj_free.shape[0])

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_objective(self, b: int) -> np.ndarray:
        spec = self.blocks[b]
        c = self.obj_blocks[b]
        if c is not None:
            return c
        return np.zeros(spec.size) if spec.diag else np.zeros((spec.size, spec.size))


class SdpBuilder:
    """Incremental assembly of an :class:`SdpProblem`."""

    def __init__(self):
        self._specs: list[BlockSpec] = []
        self._entries: list[list[tuple[int, int, int, float]]] = []
        self._obj_blocks: list[np.ndarray | None] = []
        self._free_names: list[str] = []
        self._obj_free: list[float] = []
        self._rhs: list[float] = []
        self._free_entries: list[tuple[int, int, float]] = []

    def add_block(self, size: int, diag: bool = False, name: str = "") -> int:
        if size < 1:
            raise SdpError("block size must be >= 1")
        self._specs.append(BlockSpec(size, diag, name))
        self._entries.append([])
        self._obj_blocks.append(None)
        return len(self._specs) - 1

    def add_free(self, name: str = "", objective: float = 0.0) -> int:
        self._free_names.append(name)
        self._obj_free.append(float(objective))
        return len(self._free_names) - 1

    def new_row(self, rhs: float) -> int:
        self._rhs.append(float(rhs))
        return len(self._rhs) - 1

    def add_block_entry(self, row: int, block: int, i: int, j: int, value: float):
        """Add ``value`` at unordered position (i, j): the stored matrix gets
        A[i,j] += value and, for i != j, A[j,i] += value."""
        if value != 0.0:
            self._entries[block].append((row, i, j, float(value)))

    def add_free_entry(self, row: int, var: int, value: float):
        if value != 0.0:
            self._free_entries.append((row, var, float(value)))

    def set_obj_free(self, var: int, value: float):
        self._obj_free[var] = float(value)

    def set_obj_block(self, block: int, mat: np.ndarray):
        spec = self._specs[block]
        arr = np.asarray(mat, dtype=float)
        want = (spec.size,) if spec.diag else (spec.size, spec.size)
        if arr.shape != want:
            raise SdpError(f"objective shape {arr.shape} != {want}")
        self._obj_blocks[block] = arr

    def build(self) -> SdpProblem:
        m = len(self._rhs)
        q = len(self._free_names)
        block_rows: list[np.ndarray] = []
        block_data: list[np.ndarray] = []
        for spec, entries in zip(self._specs, self._entries):
            rows = sorted({r for r, *_ in entries})
            index = {r: k for k, r in enumerate(rows)}
            if spec.diag:
                data = np.zeros((len(rows), spec.size))
                for r, i, j, v in entries:
                    if i != j:
                        raise SdpError("off-diagonal entry in diagonal block")
                    data[index[r], i] += v
            else:
                data = np.zeros((len(rows), spec.size, spec.size))
                for r, i, j, v in entries:
                    data[index[r], i, j] += v
                    if i != j:
                        data[index[r], j, i] += v
            block_rows.append(np.asarray(rows, dtype=np.intp))
            block_data.append(data)
        d_free = np.zeros((m, q))
        for r, var, v in self._free_entries:
            d_free[r, var] += v
        return SdpProblem(
            blocks=tuple(self._specs),
            block_rows=block_rows,
            block_data=block_data,
            d_free=d_free,
            rhs=np.asarray(self._rhs, dtype=float),
            obj_free=np.asarray(self._obj_free, dtype=float),
            obj_blocks=list(self._obj_blocks),
            free_names=tuple(self._free_names),
        )


@dataclass
class SolverConfig:
    gap_tol: float = 1e-8
    eig_tol: float = 1e-9
    max_iter: int = 200
    step_fraction: float = 0.98
    feas_tol: float = 1e-7
    divergence_tol: float = 1e14

    def __post_init__(self):
        if not (0 < self.step_fraction < 1):
            raise SdpError("step_fraction must lie in (0, 1)")
        for name in ("gap_tol", "eig_tol", "feas_tol"):
            if getattr(self, name) <= 0:
                raise SdpError(f"{name} must be positive")


@dataclass
class SdpSolution:
    status: SolveStatus
    objective: float
    dual_objective: float
    blocks: list[np.ndarray]
    free: np.ndarray
    y: np.ndarray
    iterations: int
    gap: float
    primal_residual: float
    dual_residual: float
    history: list[dict] = field(default_factory=list)
    pinned_free: tuple[int, ...] = ()
    dropped_rows: tuple[int, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


# -- block helpers -----------------------------------------------------------


def _identity_like(spec: BlockSpec, scale: float) -> np.ndarray:
    if spec.diag:
        return np.full(spec.size, scale)
    return np.eye(spec.size) * scale


def _inner(spec: BlockSpec, a: np.ndarray, b: np.ndarray) -> float:
    if spec.diag:
        return float(a @ b)
    return float(np.tensordot(a, b))


def _apply_rows(prob: SdpProblem, xs: list[np.ndarray]) -> np.ndarray:
    """A(X): vector of <A_jb, X_b> sums."""
    out = np.zeros(prob.m)
    for b, spec in enumerate(prob.blocks):
        rows = prob.block_rows[b]
        if rows.size == 0:
            continue
        data = prob.block_data[b]
        if spec.diag:
            out[rows] += data @ xs[b]
        else:
            out[rows] += np.tensordot(data, xs[b], axes=([1, 2], [0, 1]))
    return out


def _adjoint(prob: SdpProblem, y: np.ndarray, b: int) -> np.ndarray:
    """(A^T y)_b = sum_j y_j A_jb."""
    spec = prob.blocks[b]
    rows = prob.block_rows[b]
    if rows.size == 0:
        return _identity_like(spec, 0.0)
    data = prob.block_data[b]
    if spec.diag:
        return y[rows] @ data
    return np.tensordot(y[rows], data, axes=(0, 0))


def _max_step(spec: BlockSpec, x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with x + alpha*dx still PSD (inf if unconstrained)."""
    if spec.diag:
        neg = dx < 0
        if not np.any(neg):
            return np.inf
        return float(np.min(-x[neg] / dx[neg]))
    try:
        chol = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    w = solve_triangular(chol, dx, lower=True)
    w = solve_triangular(chol, w.T, lower=True)
    lam = np.linalg.eigvalsh((w + w.T) / 2.0)
    lam_min = lam[0]
    if lam_min >= 0:
        return np.inf
    return float(-1.0 / lam_min)


def _pivoted_independent_rows(gram: np.ndarray, tol: float) -> list[int]:
    """Indices of a maximal independent row set via pivoted Cholesky."""
    m = gram.shape[0]
    d = gram.diagonal().astype(float).copy()
    threshold = tol * max(float(d.max(initial=0.0)), 1.0)
    ell = np.zeros((m, m))
    selected: list[int] = []
    for k in range(m):
        j = int(np.argmax(d))
        if d[j] <= threshold:
            break
        col = gram[:, j] - ell[:, :k] @ ell[j, :k]
        col = col / np.sqrt(d[j])
        ell[:, k] = col
        d = d - col**2
        d[j] = 0.0
        selected.append(j)
    return sorted(selected)


def _row_gram(prob: SdpProblem) -> np.ndarray:
    gram = prob.d_free @ prob.d_free.T
    for b, spec in enumerate(prob.blocks):
        rows = prob.block_rows[b]
        if rows.size == 0:
            continue
        data = prob.block_data[b]
        if spec.diag:
            sub = data @ data.T
        else:
            sub = np.tensordot(data, data, axes=([1, 2], [1, 2]))
        gram[np.ix_(rows, rows)] += sub
    return gram


def _restrict_problem(
    prob: SdpProblem, keep_rows: np.ndarray, keep_free: np.ndarray,
    row_scale: np.ndarray,
) -> tuple[SdpProblem, np.ndarray]:
    """Copy with dropped rows/free vars removed, rows rescaled, and free
    columns equilibrated; returns the column scale for unscaling."""
    row_map = -np.ones(prob.m, dtype=np.intp)
    row_map[keep_rows] = np.arange(keep_rows.size)
    new_rows = []
    new_data = []
    for b, spec in enumerate(prob.blocks):
        rows = prob.block_rows[b]
        mask = row_map[rows] >= 0
        rows_kept = row_map[rows[mask]]
        data = prob.block_data[b][mask].copy()
        if data.shape[0]:
            shape = (-1, 1) if spec.diag else (-1, 1, 1)
            data *= row_scale[keep_rows][rows_kept].reshape(shape)
        order = np.argsort(rows_kept)
        new_rows.append(rows_kept[order])
        new_data.append(data[order])
    scale = row_scale[keep_rows]
    d_free = prob.d_free[np.ix_(keep_rows, keep_free)] * scale[:, None]
    col_scale = np.abs(d_free).max(axis=0)
    col_scale[col_scale == 0.0] = 1.0
    restricted = SdpProblem(
        blocks=prob.blocks,
        block_rows=new_rows,
        block_data=new_data,
        d_free=d_free / col_scale[None, :],
        rhs=prob.rhs[keep_rows] * scale,
        obj_free=prob.obj_free[keep_free] / col_scale,
        obj_blocks=prob.obj_blocks,
        free_names=tuple(prob.free_names[i] for i in keep_free)
        if prob.free_names
        else (),
    )
    return restricted, col_scale


class _SchurSolver:
    """Factorization of the reduced KKT system for one iteration.

    Two interchangeable routes: Cholesky of the explicitly formed Schur
    complement M (cheap), or QR of the Gram square root B with M = B B^T
    (twice the cost, works at the square root of M's condition number;
    used near convergence where M alone loses all accurate digits).
    """

    def __init__(self, d_free: np.ndarray, m_rows: int):
        self.d_free = d_free
        self.m_rows = m_rows
        self._mul = None
        self._mul_hi = None  # extended-precision matvec for refinement
        self.f_chol = None
        self._r_factor = None
        self.m_chol = None
        self._d_hi = d_free.astype(np.longdouble)

    def factor_cholesky(self, m_mat: np.ndarray):
        self._mul = lambda v: m_mat @ v
        m_hi = m_mat.astype(np.longdouble)
        self._mul_hi = lambda v: m_hi @ v
        reg = 0.0
        base = max(np.trace(m_mat) / max(m_mat.shape[0], 1), 1.0)
        for attempt in range(6):
            try:
                self.m_chol = cho_factor(
                    m_mat + reg * np.eye(m_mat.shape[0]), lower=True
                )
                break
            except np.linalg.LinAlgError:
                reg = base * 1e-12 * (100.0**attempt) if reg == 0.0 else reg * 100.0
        else:
            raise SdpError("Schur complement factorization failed")
        self._m_solve = lambda h: cho_solve(self.m_chol, h)
        self._factor_free()

    def factor_qr(self, b_mat: np.ndarray):
        # M = B B^T; economy QR of B^T gives M = R^T R
        self._mul = lambda v: b_mat @ (b_mat.T @ v)
        b_hi = b_mat.astype(np.longdouble)
        self._mul_hi = lambda v: b_hi @ (b_hi.T @ v)
        from scipy.linalg import qr

        r = qr(b_mat.T, mode="r")[0][: self.m_rows, :]
        diag = np.abs(np.diag(r))
        floor = max(diag.max(initial=0.0), 1.0) * 1e-14
        if np.any(diag < floor):
            # rank drop: fall back to a regularized Cholesky of M
            self.factor_cholesky(b_mat @ b_mat.T)
            return
        self._r_factor = r

        def m_solve(h: np.ndarray) -> np.ndarray:
            w = solve_triangular(r, h, trans="T", lower=False)
            return solve_triangular(r, w, lower=False)

        self._m_solve = m_solve
        self._factor_free()

    def _factor_free(self):
        if self.d_free.shape[1] == 0:
            self.f_chol = None
            return
        tilde = self._m_solve(self.d_free)
        gram = self.d_free.T @ tilde
        reg_f = 0.0
        base_f = max(np.trace(gram) / max(gram.shape[0], 1), 1.0)
        for attempt in range(6):
            try:
                self.f_chol = cho_factor(
                    gram + reg_f * np.eye(gram.shape[0]), lower=True
                )
                break
            except np.linalg.LinAlgError:
                reg_f = (
                    base_f * 1e-12 * (100.0**attempt) if reg_f == 0.0
                    else reg_f * 100.0
                )
        else:
            raise SdpError("free-variable system factorization failed")

    def _solve_once(self, h1: np.ndarray, h2: np.ndarray):
        if self.f_chol is None:
            return self._m_solve(h1), np.zeros(0)
        w = self.d_free.T @ self._m_solve(h1)
        df = cho_solve(self.f_chol, h2 - w)
        dy = self._m_solve(h1 + self.d_free @ df)
        return dy, df

    def solve(self, h1: np.ndarray, h2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Solve  M dy - D df = h1,  D^T dy = h2.

        Mixed-precision iterative refinement: the factorization stays in
        float64, residuals are evaluated in extended precision, which
        recovers full double accuracy while cond(M) stays below ~1/eps.
        """
        dy, df = self._solve_once(h1, h2)
        dy_hi = dy.astype(np.longdouble)
        df_hi = df.astype(np.longdouble)
        h1_hi = h1.astype(np.longdouble)
        h2_hi = h2.astype(np.longdouble)
        scale = max(np.abs(h1).max(initial=0.0), np.abs(h2).max(initial=0.0), 1.0)
        prev = np.inf
        for _ in range(6):
            res1 = h1_hi - (self._mul_hi(dy_hi) - self._d_hi @ df_hi)
            res2 = h2_hi - self._d_hi.T @ dy_hi
            err = max(
                float(np.abs(res1).max(initial=0.0)),
                float(np.abs(res2).max(initial=0.0)),
            )
            if err <= 1e-16 * scale or err >= 0.5 * prev:
                break
            prev = err
            cy, cf = self._solve_once(
                res1.astype(np.float64), res2.astype(np.float64)
            )
            dy_hi = dy_hi + cy
            df_hi = df_hi + cf
        return dy_hi.astype(np.float64), df_hi.astype(np.float64)


def solve(prob: SdpProblem, config: SolverConfig | None = None) -> SdpSolution:
    """Solve the SDP; see module docstring for the form and guarantees.

    On OPTIMAL the scaled infinity-norm feasibility residuals are at most
    ``config.feas_tol`` and the relative duality gap at most
    ``config.gap_tol``.
    """
    cfg = config or SolverConfig()

    if prob.m == 0:
        return _solve_unconstrained(prob)

    # Free variables that appear nowhere must be pinned; with a nonzero
    # objective weight they certify an unbounded ray.
    col_norm = (
        np.abs(prob.d_free).max(axis=0) if prob.n_free else np.zeros(0)
    )
    pinned = np.where(col_norm == 0.0)[0]
    if pinned.size and np.any(prob.obj_free[pinned] != 0.0):
        return _trivial_solution(prob, SolveStatus.INFEASIBLE)
    keep_free = np.where(col_norm != 0.0)[0]

    gram = _row_gram(prob)
    row_norm = np.sqrt(np.maximum(gram.diagonal(), 0.0))
    zero_rows = np.where(row_norm <= 1e-300)[0]
    if zero_rows.size and np.any(np.abs(prob.rhs[zero_rows]) > 1e-12):
        return _trivial_solution(prob, SolveStatus.INFEASIBLE)
    row_scale = np.where(row_norm > 1e-300, 1.0 / np.maximum(row_norm, 1e-300), 0.0)
    scaled_gram = gram * row_scale[:, None] * row_scale[None, :]
    independent = _pivoted_independent_rows(scaled_gram, tol=1e-20)
    keep_rows = np.asarray(sorted(set(independent) - set(zero_rows.tolist())),
                           dtype=np.intp)
    dropped = tuple(sorted(set(range(prob.m)) - set(keep_rows.tolist())))
    if dropped:
        logger.warning(
            "dropping %d dependent/empty equality row(s): %s",
            len(dropped), dropped[:10],
        )

    work, col_scale = _restrict_problem(prob, keep_rows, keep_free, row_scale)
    sol = _solve_core(work, cfg)

    free = np.zeros(prob.n_free)
    free[keep_free] = sol.free / col_scale
    y = np.zeros(prob.m)
    y[keep_rows] = sol.y * row_scale[keep_rows]
    return SdpSolution(
        status=sol.status,
        objective=sol.objective,
        dual_objective=sol.dual_objective,
        blocks=sol.blocks,
        free=free,
        y=y,
        iterations=sol.iterations,
        gap=sol.gap,
        primal_residual=sol.primal_residual,
        dual_residual=sol.dual_residual,
        history=sol.history,
        pinned_free=tuple(int(i) for i in pinned),
        dropped_rows=dropped,
    )


def _trivial_solution(prob: SdpProblem, status: SolveStatus) -> SdpSolution:
    return SdpSolution(
        status=status,
        objective=0.0,
        dual_objective=0.0,
        blocks=[_identity_like(s, 0.0) for s in prob.blocks],
        free=np.zeros(prob.n_free),
        y=np.zeros(prob.m),
        iterations=0,
        gap=np.inf,
        primal_residual=np.inf,
        dual_residual=np.inf,
    )


def _solve_unconstrained(prob: SdpProblem) -> SdpSolution:
    bounded = not np.any(prob.obj_free != 0.0)
    for b, spec in enumerate(prob.blocks):
        c = prob.block_objective(b)
        lam_max = c.max(initial=0.0) if spec.diag else (
            np.linalg.eigvalsh(c)[-1] if spec.size else 0.0
        )
        bounded = bounded and lam_max <= 0.0
    sol = _trivial_solution(
        prob, SolveStatus.OPTIMAL if bounded else SolveStatus.INFEASIBLE
    )
    if bounded:
        sol.gap = 0.0
        sol.primal_residual = 0.0
        sol.dual_residual = 0.0
    return sol


def _solve_core(prob: SdpProblem, cfg: SolverConfig) -> SdpSolution:
    m = prob.m
    q = prob.n_free
    specs = prob.blocks
    nu = sum(s.size for s in specs)
    if nu == 0:
        # equalities over free variables only: solve least squares
        return _solve_linear_only(prob)

    b_vec = prob.rhs
    c_free = prob.obj_free
    c_blocks = [prob.block_objective(b) for b in range(len(specs))]
    c_norm = max(
        [np.abs(cb).max(initial=0.0) for cb in c_blocks]
        + [np.abs(c_free).max(initial=0.0), 1.0]
    )
    b_norm = max(np.abs(b_vec).max(initial=0.0), 1.0)
    width = sum(s.size if s.diag else s.size**2 for s in specs)

    tau_p = max(10.0, np.sqrt(b_norm))
    tau_d = max(10.0, np.sqrt(c_norm))
    xs = [_identity_like(s, tau_p) for s in specs]
    zs = [_identity_like(s, tau_d) for s in specs]
    f = np.zeros(q)
    y = np.zeros(m)

    history: list[dict] = []
    status = SolveStatus.MAX_ITER
    iteration = 0
    use_qr = False
    best = None  # (merit, xs, zs, f, y, metrics tuple)

    def residuals(xs_, zs_, f_, y_):
        r_p = b_vec - _apply_rows(prob, xs_) - prob.d_free @ f_
        r_d = [
            _adjoint(prob, y_, b) - c_blocks[b] - zs_[b] for b in range(len(specs))
        ]
        r_c = c_free - prob.d_free.T @ y_
        return r_p, r_d, r_c

    def metrics(xs_, zs_, f_, y_, r_p, r_d, r_c):
        pobj = float(c_free @ f_) + sum(
            _inner(s, cb, x) for s, cb, x in zip(specs, c_blocks, xs_)
        )
        dobj = float(b_vec @ y_)
        mu = sum(_inner(s, x, z) for s, x, z in zip(specs, xs_, zs_)) / nu
        pres = float(np.abs(r_p).max(initial=0.0)) / (1.0 + b_norm)
        dres = max(
            max((np.abs(rd).max(initial=0.0) for rd in r_d), default=0.0),
            np.abs(r_c).max(initial=0.0),
        ) / (1.0 + c_norm)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        return pobj, dobj, mu, pres, dres, gap

    for iteration in range(1, cfg.max_iter + 1):
        r_p, r_d, r_c = residuals(xs, zs, f, y)
        pobj, dobj, mu, pres, dres, gap = metrics(xs, zs, f, y, r_p, r_d, r_c)
        merit = max(pres, dres, gap)
        if best is None or merit < best[0]:
            best = (
                merit,
                [x.copy() for x in xs],
                [z.copy() for z in zs],
                f.copy(),
                y.copy(),
                (pobj, dobj, mu, pres, dres, gap),
            )
        history.append(
            {"iter": iteration - 1, "mu": mu, "gap": gap, "pres": pres,
             "dres": dres, "pobj": pobj, "dobj": dobj}
        )
        logger.debug(
            "iter %3d  mu=%9.3e  gap=%9.3e  pres=%9.3e  dres=%9.3e%s",
            iteration - 1, mu, gap, pres, dres, "  [qr]" if use_qr else "",
        )
        if pres <= cfg.feas_tol and dres <= cfg.feas_tol and gap <= cfg.gap_tol:
            status = SolveStatus.OPTIMAL
            break
        size = max(
            [np.abs(x).max(initial=0.0) for x in xs]
            + [np.abs(z).max(initial=0.0) for z in zs]
            + [np.abs(y).max(initial=0.0), np.abs(f).max(initial=0.0)]
        )
        if not np.isfinite(size):
            status = SolveStatus.NUMERICAL_FAILURE
            break
        if size > cfg.divergence_tol:
            status = SolveStatus.INFEASIBLE
            break
        if not use_qr and mu < 1e-5 * tau_p * tau_d:
            use_qr = True

        # per-block factors: X = Lx Lx^T, Z = Lz Lz^T, Z^-1 = Lzi^T Lzi
        try:
            lxs, lzis, zinvs = [], [], []
            for spec, xb, zb in zip(specs, xs, zs):
                if spec.diag:
                    lxs.append(np.sqrt(xb))
                    lzis.append(1.0 / np.sqrt(zb))
                    zinvs.append(1.0 / zb)
                else:
                    lx = np.linalg.cholesky(xb)
                    lz = np.linalg.cholesky(zb)
                    lzi = solve_triangular(lz, np.eye(spec.size), lower=True)
                    lxs.append(lx)
                    lzis.append(lzi)
                    zinvs.append(lzi.T @ lzi)
        except np.linalg.LinAlgError:
            status = SolveStatus.NUMERICAL_FAILURE
            break

        kkt = _SchurSolver(prob.d_free, m)
        try:
            if use_qr:
                b_mat = np.zeros((m, width))
                col = 0
                for bidx, spec in enumerate(specs):
                    rows = prob.block_rows[bidx]
                    w = spec.size if spec.diag else spec.size**2
                    if rows.size:
                        data = prob.block_data[bidx]
                        if spec.diag:
                            p_stack = data * (lxs[bidx] * lzis[bidx])
                        else:
                            p_stack = (
                                lzis[bidx][None] @ data @ lxs[bidx][None]
                            ).reshape(rows.size, -1)
                        b_mat[rows, col : col + w] = p_stack
                    col += w
                kkt.factor_qr(b_mat)
            else:
                m_mat = np.zeros((m, m))
                for bidx, spec in enumerate(specs):
                    rows = prob.block_rows[bidx]
                    if rows.size == 0:
                        continue
                    data = prob.block_data[bidx]
                    if spec.diag:
                        wvec = xs[bidx] * zinvs[bidx]
                        sub = (data * wvec) @ data.T
                    else:
                        t = xs[bidx] @ data @ zinvs[bidx]
                        sub = np.einsum("kij,lji->kl", data, t, optimize=True)
                    m_mat[np.ix_(rows, rows)] += sub
                kkt.factor_cholesky((m_mat + m_mat.T) / 2.0)
        except SdpError:
            status = SolveStatus.NUMERICAL_FAILURE
            break

        def direction(sigma_mu: float, thetas: list[np.ndarray] | None):
            """HKM direction for complementarity target sigma_mu*I."""
            s_blocks = []
            for bidx, spec in enumerate(specs):
                if spec.diag:
                    th = thetas[bidx] if thetas else 0.0
                    s_blocks.append(
                        (sigma_mu - xs[bidx] * zs[bidx] - th) * zinvs[bidx]
                    )
                else:
                    rhs_mat = sigma_mu * np.eye(spec.size) - xs[bidx] @ zs[bidx]
                    if thetas:
                        rhs_mat = rhs_mat - thetas[bidx]
                    s_blocks.append(rhs_mat @ zinvs[bidx])
            # h1 = A(S - X Rd Z^{-1}) - r_p
            corr = []
            for bidx, spec in enumerate(specs):
                if spec.diag:
                    corr.append(s_blocks[bidx] - xs[bidx] * r_d[bidx] * zinvs[bidx])
                else:
                    corr.append(s_blocks[bidx] - xs[bidx] @ r_d[bidx] @ zinvs[bidx])
            h1 = _apply_rows_like(prob, corr) - r_p
            dy, df = kkt.solve(h1, r_c)
            dzs = []
            dxs = []
            for bidx, spec in enumerate(specs):
                dz = _adjoint(prob, dy, bidx) + r_d[bidx]
                if spec.diag:
                    dx = s_blocks[bidx] - xs[bidx] * dz * zinvs[bidx]
                else:
                    dx = s_blocks[bidx] - xs[bidx] @ dz @ zinvs[bidx]
                    dx = (dx + dx.T) / 2.0
                dzs.append(dz)
                dxs.append(dx)
            return dxs, dzs, dy, df

        # predictor
        dxs_a, dzs_a, _, _ = direction(0.0, None)
        ap = min(1.0, *(
            _max_step(s, x, dx) for s, x, dx in zip(specs, xs, dxs_a)
        ))
        ad = min(1.0, *(
            _max_step(s, z, dz) for s, z, dz in zip(specs, zs, dzs_a)
        ))
        mu_aff = sum(
            _inner(s, xs[b] + ap * dxs_a[b], zs[b] + ad * dzs_a[b])
            for b, s in enumerate(specs)
        ) / nu
        sigma = min(1.0, max(0.0, (max(mu_aff, 0.0) / mu) ** 3))

        # corrector
        thetas = []
        for bidx, spec in enumerate(specs):
            if spec.diag:
                thetas.append(dxs_a[bidx] * dzs_a[bidx])
            else:
                thetas.append(dxs_a[bidx] @ dzs_a[bidx])
        dxs, dzs, dy, df = direction(sigma * mu, thetas)

        ap = min(1.0, cfg.step_fraction * min(
            *(_max_step(s, x, dx) for s, x, dx in zip(specs, xs, dxs)), np.inf
        ))
        ad = min(1.0, cfg.step_fraction * min(
            *(_max_step(s, z, dz) for s, z, dz in zip(specs, zs, dzs)), np.inf
        ))
        if ap < 1e-10 and ad < 1e-10:
            status = SolveStatus.NUMERICAL_FAILURE
            break

        # step with rejection: a direction corrupted by ill-conditioning
        # shows up as a feasibility blow-up, not as slow progress
        accepted = False
        switched = False
        for attempt in range(6):
            cand_xs = [
                (xs[b] + ap * dxs[b]) if specs[b].diag
                else (xs[b] + ap * dxs[b] + (xs[b] + ap * dxs[b]).T) / 2.0
                for b in range(len(specs))
            ]
            cand_zs = [
                (zs[b] + ad * dzs[b]) if specs[b].diag
                else (zs[b] + ad * dzs[b] + (zs[b] + ad * dzs[b]).T) / 2.0
                for b in range(len(specs))
            ]
            cand_f = f + ap * df
            cand_y = y + ad * dy
            c_rp, c_rd, c_rc = residuals(cand_xs, cand_zs, cand_f, cand_y)
            _, _, _, c_pres, c_dres, _ = metrics(
                cand_xs, cand_zs, cand_f, cand_y, c_rp, c_rd, c_rc
            )
            worst_old = max(pres, dres)
            worst_new = max(c_pres, c_dres)
            if worst_new <= max(10.0 * worst_old, 0.5 * cfg.feas_tol):
                accepted = True
                break
            if not use_qr:
                # retry the whole iteration on the accurate path
                use_qr = True
                switched = True
                break
            ap *= 0.25
            ad *= 0.25
        if switched and not accepted:
            continue
        if not accepted:
            status = SolveStatus.NUMERICAL_FAILURE
            break
        xs, zs, f, y = cand_xs, cand_zs, cand_f, cand_y

    r_p, r_d, r_c = residuals(xs, zs, f, y)
    pobj, dobj, mu, pres, dres, gap = metrics(xs, zs, f, y, r_p, r_d, r_c)
    if best is not None and max(pres, dres, gap) > best[0]:
        _, xs, zs, f, y, (pobj, dobj, mu, pres, dres, gap) = best
    if status is not SolveStatus.OPTIMAL and (
        pres <= cfg.feas_tol and dres <= cfg.feas_tol and gap <= cfg.gap_tol
    ):
        status = SolveStatus.OPTIMAL

    return SdpSolution(
        status=status,
        objective=pobj,
        dual_objective=dobj,
        blocks=xs,
        free=f,
        y=y,
        iterations=iteration,
        gap=gap,
        primal_residual=pres,
        dual_residual=dres,
        history=history,
    )


def _apply_rows_like(prob: SdpProblem, mats: list[np.ndarray]) -> np.ndarray:
    """A(.) applied to arbitrary (possibly nonsymmetric) block values."""
    out = np.zeros(prob.m)
    for b, spec in enumerate(prob.blocks):
        rows = prob.block_rows[b]
        if rows.size == 0:
            continue
        data = prob.block_data[b]
        if spec.diag:
            out[rows] += data @ mats[b]
        else:
            out[rows] += np.tensordot(data, mats[b], axes=([1, 2], [0, 1]))
    return out


def _solve_linear_only(prob: SdpProblem) -> SdpSolution:
    """No PSD blocks: plain linear equality system over free variables."""
    sol_f, *_ = np.linalg.lstsq(prob.d_free, prob.rhs, rcond=None)
    feasible = np.allclose(prob.d_free @ sol_f, prob.rhs, atol=1e-9)
    # objective over the affine solution set is constant only if c lies in
    # the row space; anything else is unbounded
    ybar, *_ = np.linalg.lstsq(prob.d_free.T, prob.obj_free, rcond=None)
    bounded = np.allclose(prob.d_free.T @ ybar, prob.obj_free, atol=1e-9)
    status = (
        SolveStatus.OPTIMAL if feasible and bounded else SolveStatus.INFEASIBLE
    )
    obj = float(prob.obj_free @ sol_f)
    return SdpSolution(
        status=status,
        objective=obj,
        dual_objective=float(prob.rhs @ ybar),
        blocks=[],
        free=sol_f,
        y=ybar,
        iterations=0,
        gap=0.0 if status is SolveStatus.OPTIMAL else np.inf,
        primal_residual=0.0,
        dual_residual=0.0,
    )


def min_block_eigenvalues(
    blocks: Sequence[np.ndarray], specs: Sequence[BlockSpec]
) -> list[float]:
    out = []
    for spec, x in zip(specs, blocks):
        if spec.diag:
            out.append(float(np.min(x)) if x.size else 0.0)
        else:
            out.append(float(np.linalg.eigvalsh(x)[0]) if x.size else 0.0)
    return out
