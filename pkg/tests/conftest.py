"""Shared helpers: independent oracles and random instance generators."""

import numpy as np
import pytest

from hybzono.sets import HybridZonotope


def sample_factors(Z, rng, n):
    """Factor draws (xc, xb) of an unconstrained set; members by construction."""
    assert Z.nc == 0, "factor sampling without rejection needs nc == 0"
    xc = rng.uniform(-1.0, 1.0, (n, Z.ng))
    xb = np.where(rng.random((n, Z.nb)) < 0.5, -1.0, 1.0)
    return xc, xb


def sample_points(Z, rng, n):
    """Points of an unconstrained hybrid zonotope."""
    xc, xb = sample_factors(Z, rng, n)
    return xc @ Z.Gc.T + xb @ Z.Gb.T + Z.c


def random_hybzono(rng, n=2, ng=4, nb=3, nc=2, force_nonempty=None):
    """Random instance; half the time constraints pass through a valid point."""
    Gc = rng.normal(size=(n, ng))
    Gb = rng.normal(size=(n, nb))
    c = rng.normal(size=n)
    Ac = rng.normal(size=(nc, ng))
    Ab = rng.normal(size=(nc, nb))
    if force_nonempty is None:
        force_nonempty = rng.random() < 0.5
    if nc == 0:
        b = np.zeros(0)
    elif force_nonempty:
        xc = rng.uniform(-1, 1, ng)
        xb = np.where(rng.random(nb) < 0.5, -1.0, 1.0)
        b = Ac @ xc + Ab @ xb
    else:
        b = rng.normal(size=nc)
    return HybridZonotope(Gc, Gb, c, Ac, Ab, b)


def enumerate_assignments(nb):
    """All 2^nb binary assignments in lexicographic order (-1 before +1)."""
    if nb == 0:
        return [np.zeros(0)]
    out = []
    for mask in range(2 ** nb):
        xb = np.empty(nb)
        for i in range(nb):
            xb[i] = 1.0 if (mask >> (nb - 1 - i)) & 1 else -1.0
        out.append(xb)
    return out


def leaf_lp(Z, xb):
    """LpProblem of the leaf with binaries fixed to xb, zero objective."""
    from hybzono.simplex import LpProblem

    A = np.hstack([Z.Ac, Z.Ab])
    lo = -np.ones(Z.ng + Z.nb)
    hi = np.ones(Z.ng + Z.nb)
    lo[Z.ng:] = xb
    hi[Z.ng:] = xb
    return LpProblem(np.zeros(Z.ng + Z.nb), A, Z.b, lo, hi)


def brute_force_is_empty(Z):
    """Exhaustive 2^nb emptiness oracle using one LP per assignment."""
    from hybzono.simplex import lp_solve

    for xb in enumerate_assignments(Z.nb):
        if lp_solve(leaf_lp(Z, xb)).status == "optimal":
            return False
    return True


def brute_force_support(Z, d):
    """Exhaustive 2^nb support oracle (None if empty)."""
    from hybzono.simplex import LpProblem, lp_solve

    d = np.asarray(d, dtype=np.float64)
    w = np.concatenate([d @ Z.Gc, d @ Z.Gb])
    A = np.hstack([Z.Ac, Z.Ab])
    best = None
    for xb in enumerate_assignments(Z.nb):
        lo = -np.ones(Z.ng + Z.nb)
        hi = np.ones(Z.ng + Z.nb)
        lo[Z.ng:] = xb
        hi[Z.ng:] = xb
        res = lp_solve(LpProblem(-w, A, Z.b, lo, hi))
        if res.status == "optimal":
            val = -res.value
            if best is None or val > best:
                best = val
    return None if best is None else best + float(d @ Z.c)


def brute_force_leaf_count(Z):
    from hybzono.simplex import lp_solve

    count = 0
    for xb in enumerate_assignments(Z.nb):
        if lp_solve(leaf_lp(Z, xb)).status == "optimal":
            count += 1
    return count


def point_in_triangle(p, tri, slack=0.0):
    """Barycentric membership of p in triangle tri (3x2), with slack margin."""
    a, b, c = np.asarray(tri, dtype=np.float64)
    T = np.column_stack([b - a, c - a])
    det = np.linalg.det(T)
    if abs(det) < 1e-14:
        return False
    lam = np.linalg.solve(T, np.asarray(p, dtype=np.float64) - a)
    l1, l2 = lam
    l0 = 1.0 - l1 - l2
    return min(l0, l1, l2) >= -slack


def convex_hull_2d(points):
    """Andrew's monotone chain; returns hull vertices CCW."""
    pts = sorted(set(map(tuple, np.round(np.asarray(points, float), 12))))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def merge_intervals(intervals, tol=1e-9):
    """Union of closed intervals as a sorted, merged list of (lo, hi)."""
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1] + tol:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def interval_union_hausdorff(u1, u2):
    """Hausdorff distance between two unions of 1-D intervals."""
    def dist_point_union(x, u):
        best = np.inf
        for lo, hi in u:
            if lo <= x <= hi:
                return 0.0
            best = min(best, abs(x - lo), abs(x - hi))
        return best

    def directed(ua, ub):
        worst = 0.0
        for lo, hi in ua:
            # farthest point of [lo,hi] from ub is at an endpoint or at a gap
            candidates = [lo, hi]
            for blo, bhi in ub:
                for edge in (blo, bhi):
                    if lo < edge < hi:
                        candidates.append(edge)
            # also midpoints of gaps inside [lo,hi]
            for i in range(len(ub) - 1):
                mid = (ub[i][1] + ub[i + 1][0]) / 2.0
                if lo < mid < hi:
                    candidates.append(mid)
            for x in candidates:
                worst = max(worst, dist_point_union(x, ub))
        return worst

    if not u1 and not u2:
        return 0.0
    if not u1 or not u2:
        return np.inf
    return max(directed(u1, u2), directed(u2, u1))


def leaves_as_intervals(Z, cap=25):
    """1-D set as a merged union of leaf intervals (via exact supports)."""
    from hybzono import solver

    assert Z.n == 1
    ivs = []
    for leaf in solver.enumerate_leaves(Z, cap=cap):
        lo, hi = solver.bounds(leaf.set)
        ivs.append((lo[0], hi[0]))
    return merge_intervals(ivs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
