"""Dense two-phase simplex for box-constrained equality-form LPs.

This is the hot kernel of the package: every emptiness, containment,
support, and leaf query dispatches here from branch-and-bound, so the
pivot loops are compiled with numba when available.  Setting the
environment variable ``HYBZONO_DISABLE_NUMBA=1`` (or running without
numba installed) selects the pure-NumPy path instead; both paths share
one source of truth, so results agree.  ``benchmarks/bench_simplex.py``
compares the two.

The algorithm is the bounded-variable primal simplex on a dense tableau
with Bland's anti-cycling rule: nonbasic variables sit at a finite lower
or upper bound, the ratio test allows bound flips, and both entering and
leaving selections break ties by smallest variable index, which makes
every solve deterministic.
"""

import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInputError, SolverError

__all__ = ["LpProblem", "LpResult", "lp_solve", "tighten_box",
           "FEAS_TOL", "PIVOT_TOL", "NUMBA_ENABLED"]

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
_MAX_ITER_BASE = 2000

_disabled = os.environ.get("HYBZONO_DISABLE_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on")
if not _disabled:
    try:
        from numba import njit as _njit
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

# status codes returned by the kernel
_OPTIMAL = 0
_INFEASIBLE = 1
_STALLED = 2
_UNBOUNDED = 3

# bound to the compiled or plain pivot loop below; _simplex_impl resolves it
# as a module global at (numba) compile time
_pivot_loop = None


def _pivot_loop_impl(T, xB, basis, vstat, red, LO, HI, feas_tol, pivot_tol, max_iter):
    """Primal simplex pivots until optimal/stalled.  Returns (status, iters).

    vstat: 0 nonbasic-at-lower, 1 nonbasic-at-upper, 2 basic.
    Mutates T, xB, basis, vstat, red in place.
    """
    m, N = T.shape
    nit = 0
    while nit < max_iter:
        # Bland: smallest-index eligible entering variable; fixed columns never enter.
        enter = -1
        for j in range(N):
            vs = vstat[j]
            if vs == 2:
                continue
            if HI[j] - LO[j] <= 0.0:
                continue
            rj = red[j]
            if vs == 0 and rj < -feas_tol:
                enter = j
                break
            if vs == 1 and rj > feas_tol:
                enter = j
                break
        if enter < 0:
            return _OPTIMAL, nit
        s = 1.0 if vstat[enter] == 0 else -1.0

        # ratio test with bound flip; leaving ties broken by variable index
        t_best = HI[enter] - LO[enter]
        leave = -1
        leave_to = 0
        for i in range(m):
            di = s * T[i, enter]
            bi = basis[i]
            if di > pivot_tol:
                t = (xB[i] - LO[bi]) / di
                to = 0
            elif di < -pivot_tol:
                hb = HI[bi]
                if hb == np.inf:
                    continue
                t = (hb - xB[i]) / (-di)
                to = 1
            else:
                continue
            if t < 0.0:
                t = 0.0
            if t < t_best - 1e-12:
                t_best = t
                leave = i
                leave_to = to
            elif t <= t_best + 1e-12 and leave >= 0 and bi < basis[leave]:
                leave = i
                leave_to = to
        if t_best == np.inf:
            return _UNBOUNDED, nit

        if leave < 0:
            # bound flip: entering variable crosses to its other bound
            if t_best > 0.0:
                xB -= (s * t_best) * T[:, enter]
            vstat[enter] = 1 - vstat[enter]
        else:
            lv = basis[leave]
            enter_val = (LO[enter] if s > 0.0 else HI[enter]) + s * t_best
            if t_best > 0.0:
                xB -= (s * t_best) * T[:, enter]
            piv = T[leave, enter]
            T[leave, :] /= piv
            for i in range(m):
                if i != leave:
                    f = T[i, enter]
                    if f != 0.0:
                        T[i, :] -= f * T[leave, :]
            rf = red[enter]
            if rf != 0.0:
                red -= rf * T[leave, :]
            vstat[lv] = leave_to
            vstat[enter] = 2
            basis[leave] = enter
            xB[leave] = enter_val
        nit += 1
    return _STALLED, nit


def _simplex_impl(A, b, c, lo, hi, feas_tol, pivot_tol, max_iter):
    """Two-phase bounded-variable simplex.  Returns (status, x, iters)."""
    m, n = A.shape
    N = n + m
    LO = np.empty(N)
    HI = np.empty(N)
    LO[:n] = lo
    HI[:n] = hi
    LO[n:] = 0.0
    HI[n:] = np.inf

    # start with structurals at their lower bound, artificials absorbing b
    x0 = lo.copy()
    r0 = b - A @ x0
    sigma = np.where(r0 >= 0.0, 1.0, -1.0)
    T = np.zeros((m, N))
    T[:, :n] = sigma.reshape(m, 1) * A
    for i in range(m):
        T[i, n + i] = 1.0
    xB = np.abs(r0)
    basis = np.arange(n, N)
    vstat = np.zeros(N, dtype=np.int64)
    for i in range(m):
        vstat[n + i] = 2

    # phase 1: minimize sum of artificials (cost 1 on every basic artificial)
    red = -T.sum(axis=0)
    red[n:] += 1.0
    status, it1 = _pivot_loop(T, xB, basis, vstat, red, LO, HI,
                              feas_tol, pivot_tol, max_iter)
    if status != _OPTIMAL:
        return status, x0, it1
    infeas = 0.0
    for i in range(m):
        if basis[i] >= n:
            infeas += xB[i]
    bscale = 1.0
    for i in range(m):
        ab = abs(b[i])
        if ab > bscale:
            bscale = ab
    if infeas > feas_tol * bscale * 10.0:
        return _INFEASIBLE, x0, it1

    # phase 2: original costs, artificials pinned to zero
    HI[n:] = 0.0
    cext = np.zeros(N)
    cext[:n] = c
    red = cext.copy()
    for i in range(m):
        cb = cext[basis[i]]
        if cb != 0.0:
            red -= cb * T[i, :]
    status, it2 = _pivot_loop(T, xB, basis, vstat, red, LO, HI,
                              feas_tol, pivot_tol, max_iter)
    if status != _OPTIMAL:
        return status, x0, it1 + it2

    x = np.empty(n)
    for j in range(n):
        x[j] = LO[j] if vstat[j] == 0 else (HI[j] if vstat[j] == 1 else 0.0)
    for i in range(m):
        bi = basis[i]
        if bi < n:
            x[bi] = xB[i]
    return _OPTIMAL, x, it1 + it2


def _tighten_impl(A, b, lo, hi, passes, feas_tol):
    """Interval propagation over rows of A x = b; shrinks [lo, hi] soundly.

    Returns (feasible, lo, hi).  Never cuts a feasible point: inferred
    bounds are widened by a small guard before intersecting.
    """
    lo = lo.copy()
    hi = hi.copy()
    m = A.shape[0]
    guard = 1e-12
    for _ in range(passes):
        for i in range(m):
            a = A[i, :]
            al = a * lo
            ah = a * hi
            cmin = np.minimum(al, ah)
            cmax = np.maximum(al, ah)
            rmin = cmin.sum()
            rmax = cmax.sum()
            tol = feas_tol * (1.0 + abs(b[i]))
            if rmin > b[i] + tol or rmax < b[i] - tol:
                return False, lo, hi
            for j in range(a.size):
                aj = a[j]
                if aj > 1e-12 or aj < -1e-12:
                    omin = rmin - cmin[j]
                    omax = rmax - cmax[j]
                    v1 = (b[i] - omax) / aj
                    v2 = (b[i] - omin) / aj
                    if aj > 0.0:
                        nlo, nhi = v1, v2
                    else:
                        nlo, nhi = v2, v1
                    nlo -= guard + tol
                    nhi += guard + tol
                    if nlo > lo[j]:
                        lo[j] = nlo
                    if nhi < hi[j]:
                        hi[j] = nhi
                    if lo[j] > hi[j] + tol:
                        return False, lo, hi
    return True, lo, hi


if NUMBA_ENABLED:
    _pivot_loop = _njit(cache=True)(_pivot_loop_impl)
    _simplex = _njit(cache=True)(_simplex_impl)
    _tighten = _njit(cache=True)(_tighten_impl)
else:
    _pivot_loop = _pivot_loop_impl
    _simplex = _simplex_impl
    _tighten = _tighten_impl


@dataclass(frozen=True)
class LpProblem:
    """min c @ x subject to A x = b and lo <= x <= hi (finite bounds)."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.c, dtype=np.float64).reshape(-1)
        A = np.ascontiguousarray(self.A, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64).reshape(-1)
        lo = np.ascontiguousarray(self.lo, dtype=np.float64).reshape(-1)
        hi = np.ascontiguousarray(self.hi, dtype=np.float64).reshape(-1)
        n = c.size
        if A.ndim != 2 or A.shape != (b.size, n):
            raise DimensionError(
                f"A must be {b.size}x{n}, got {getattr(A, 'shape', None)}")
        if lo.size != n or hi.size != n:
            raise DimensionError("bound vectors must match objective length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidInputError("all variable bounds must be finite")
        if np.any(lo > hi):
            raise InvalidInputError("lo > hi for some variable")
        for name, arr in (("c", c), ("A", A), ("b", b)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains non-finite entries")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def nvar(self):
        return self.c.size


@dataclass(frozen=True)
class LpResult:
    """Outcome of an LP solve: 'optimal' (value, point valid) or 'infeasible'."""

    status: str
    value: float
    point: np.ndarray


def lp_solve(problem):
    """Solve an LpProblem deterministically.

    Returns an LpResult with status 'optimal' or 'infeasible'.  A numerically
    stalled solve (iteration cap) raises SolverError rather than returning a
    wrong answer.
    """
    m, n = problem.A.shape
    max_iter = _MAX_ITER_BASE + 50 * (m + n)
    status, x, _ = _simplex(problem.A, problem.b, problem.c, problem.lo,
                            problem.hi, FEAS_TOL, PIVOT_TOL, max_iter)
    if status == _OPTIMAL:
        value = float(problem.c @ x) if n else 0.0
        return LpResult("optimal", value, x)
    if status == _INFEASIBLE:
        return LpResult("infeasible", np.nan, np.full(n, np.nan))
    raise SolverError(f"simplex stalled (status={status}, size {m}x{n})")


def tighten_box(A, b, lo, hi, passes=2, feas_tol=FEAS_TOL):
    """Sound interval tightening of box bounds under A x = b.

    Returns (feasible, lo, hi); feasible=False certifies emptiness of the
    box-constrained system.  The returned box never excludes a feasible point.
    """
    if A.shape[0] == 0:
        return True, lo.copy(), hi.copy()
    return _tighten(A, b, lo, hi, passes, feas_tol)
