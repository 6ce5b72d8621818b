"""Mixed-integer feasibility and support queries on hybrid zonotopes.

Every query reduces to branch-and-bound over the binary factors with a
dense LP at each node: the binaries are relaxed to [-1, 1], infeasible
relaxations prune whole subtrees, and branching fixes the most fractional
binary (ties to the smallest index, -1 explored first).  Interval
propagation over the equality rows rejects most nodes before an LP is
even assembled.  All searches are sequential and deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (DimensionError, EmptySetError, InvalidInputError,
                     LeafCapError)
from .sets import (HybridZonotope, generalized_intersection, interval_box,
                   linear_map, minkowski_sum)
from .simplex import LpProblem, LpResult, lp_solve, tighten_box, FEAS_TOL

__all__ = [
    "LeafSet", "is_empty", "find_point", "contains_point",
    "containment_witness", "support", "bounds", "enumerate_leaves",
    "leaf_polygon_2d", "count_regions", "DEFAULT_LEAF_CAP",
]

DEFAULT_LEAF_CAP = 25
_INT_TOL = 1e-9
_PRUNE_TOL = 1e-9


def _node_bounds(Z, fix):
    """Factor-box bounds with binaries fixed per `fix` (0 = free, else +-1)."""
    nv = Z.ng + Z.nb
    lo = -np.ones(nv)
    hi = np.ones(nv)
    for i in range(Z.nb):
        v = fix[i]
        if v != 0:
            lo[Z.ng + i] = v
            hi[Z.ng + i] = v
    return lo, hi


def _branch_var(fix, xb):
    """Most fractional free binary (smallest index on ties)."""
    best = -1
    best_frac = -1.0
    for i in range(fix.size):
        if fix[i] != 0:
            continue
        frac = 1.0 - abs(xb[i])
        if frac > best_frac + 1e-15:
            best_frac = frac
            best = i
    return best


def _children(fix, i):
    """Child nodes fixing binary i; pushed so that -1 is explored first."""
    plus = fix.copy()
    plus[i] = 1
    minus = fix.copy()
    minus[i] = -1
    return plus, minus


def find_point(Z):
    """A feasible factor assignment (xc, xb) of Z, or None if Z is empty."""
    ng, nb = Z.ng, Z.nb
    if Z.nc == 0:
        return np.zeros(ng), np.ones(nb)
    A = np.hstack([Z.Ac, Z.Ab])
    b = Z.b
    zero_c = np.zeros(ng + nb)
    stack = [np.zeros(nb, dtype=np.int64)]
    while stack:
        fix = stack.pop()
        lo, hi = _node_bounds(Z, fix)
        ok, lo, hi = tighten_box(A, b, lo, hi)
        if not ok:
            continue
        res = lp_solve(LpProblem(zero_c, A, b, lo, hi))
        if res.status != "optimal":
            continue
        xb = res.point[ng:]
        j = _branch_var(fix, xb)
        if j < 0 or 1.0 - abs(xb[j]) <= _INT_TOL:
            if j < 0:
                # all binaries fixed: the node LP is the exact leaf problem
                return res.point[:ng], res.point[ng:]
            # relaxed point is already integral; verify with binaries pinned
            leaf_fix = fix.copy()
            for i in range(nb):
                if leaf_fix[i] == 0:
                    leaf_fix[i] = 1 if xb[i] >= 0 else -1
            llo, lhi = _node_bounds(Z, leaf_fix)
            ok2, llo, lhi = tighten_box(A, b, llo, lhi)
            if ok2:
                leaf = lp_solve(LpProblem(zero_c, A, b, llo, lhi))
                if leaf.status == "optimal":
                    return leaf.point[:ng], leaf.point[ng:]
            # rounding failed: keep searching below this node
        plus, minus = _children(fix, j)
        stack.append(plus)
        stack.append(minus)
    return None


def is_empty(Z):
    """True iff no factor assignment satisfies the constraints of Z."""
    return find_point(Z) is None


def contains_point(Z, x, tol=1e-6):
    """Membership of x in Z up to an inf-norm tolerance.

    Decided as nonemptiness of Z intersected with the box [x - tol, x + tol].
    """
    return containment_witness(Z, x, tol) is not None


def containment_witness(Z, x, tol=1e-6):
    """Factors (xc, xb) of Z placing a point within tol of x, else None."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != Z.n:
        raise DimensionError(f"point has dimension {x.size}, set has {Z.n}")
    box = interval_box(x - tol, x + tol)
    W = generalized_intersection(Z, np.eye(Z.n), box)
    pt = find_point(W)
    if pt is None:
        return None
    xc, xb = pt
    return xc[:Z.ng], xb[:Z.nb]


def support(Z, d):
    """Support value max{d @ z | z in Z}, exact to solver tolerance.

    Raises EmptySetError if Z is empty.
    """
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    if d.size != Z.n:
        raise DimensionError(f"direction has dimension {d.size}, set has {Z.n}")
    ng, nb = Z.ng, Z.nb
    base = float(d @ Z.c)
    w = np.concatenate([d @ Z.Gc, d @ Z.Gb])
    if Z.nc == 0:
        return base + float(np.abs(w).sum())
    A = np.hstack([Z.Ac, Z.Ab])
    b = Z.b
    cmin = -w  # maximize w @ xi
    best = -np.inf
    found = False
    stack = [np.zeros(nb, dtype=np.int64)]
    while stack:
        fix = stack.pop()
        lo, hi = _node_bounds(Z, fix)
        ok, lo, hi = tighten_box(A, b, lo, hi)
        if not ok:
            continue
        res = lp_solve(LpProblem(cmin, A, b, lo, hi))
        if res.status != "optimal":
            continue
        relax = -res.value
        if found and relax <= best + _PRUNE_TOL:
            continue
        xb = res.point[ng:]
        j = _branch_var(fix, xb)
        if j < 0 or 1.0 - abs(xb[j]) <= _INT_TOL:
            if j < 0:
                cand = relax
            else:
                leaf_fix = fix.copy()
                for i in range(nb):
                    if leaf_fix[i] == 0:
                        leaf_fix[i] = 1 if xb[i] >= 0 else -1
                llo, lhi = _node_bounds(Z, leaf_fix)
                cand = None
                ok2, llo, lhi = tighten_box(A, b, llo, lhi)
                if ok2:
                    leaf = lp_solve(LpProblem(cmin, A, b, llo, lhi))
                    if leaf.status == "optimal":
                        cand = -leaf.value
            if cand is not None:
                if not found or cand > best:
                    best = cand
                    found = True
                if relax - cand <= _PRUNE_TOL:
                    continue
        plus, minus = _children(fix, j)
        stack.append(plus)
        stack.append(minus)
    if not found:
        raise EmptySetError("support of an empty set is undefined")
    return base + best


def bounds(Z):
    """Axis-aligned bounds (lo, hi) from 2n support queries."""
    n = Z.n
    lo = np.empty(n)
    hi = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hi[i] = support(Z, e)
        lo[i] = -support(Z, -e)
    return lo, hi


@dataclass(frozen=True)
class LeafSet:
    """One nonempty leaf: binary assignment + its constrained-zonotope view."""

    assignment: np.ndarray  # (nb,) entries in {-1.0, +1.0}
    set: HybridZonotope     # nb = 0 view with the assignment folded in


def _make_leaf(Z, fix):
    xb = fix.astype(np.float64)
    c = Z.c + Z.Gb @ xb if Z.nb else Z.c.copy()
    b = Z.b - Z.Ab @ xb if Z.nb else Z.b.copy()
    n = Z.n
    view = HybridZonotope(Z.Gc, np.zeros((n, 0)), c,
                          Z.Ac, np.zeros((Z.nc, 0)), b)
    return LeafSet(assignment=xb, set=view)


def enumerate_leaves(Z, cap=DEFAULT_LEAF_CAP):
    """All nonempty leaves of Z, in lexicographic order (-1 before +1).

    Exhaustive depth-first search fixing binaries in index order; a subtree
    is pruned as soon as its relaxation is infeasible.  Raises LeafCapError
    when nb exceeds the cap.
    """
    nb = Z.nb
    if nb > cap:
        raise LeafCapError(f"set has {nb} binary factors, cap is {cap}")
    A = np.hstack([Z.Ac, Z.Ab])
    b = Z.b
    zero_c = np.zeros(Z.ng + nb)
    out = []
    stack = [(0, np.zeros(nb, dtype=np.int64))]
    while stack:
        depth, fix = stack.pop()
        if Z.nc > 0:
            lo, hi = _node_bounds(Z, fix)
            ok, lo, hi = tighten_box(A, b, lo, hi)
            if not ok:
                continue
            res = lp_solve(LpProblem(zero_c, A, b, lo, hi))
            if res.status != "optimal":
                continue
        if depth == nb:
            out.append(_make_leaf(Z, fix))
            continue
        plus = fix.copy()
        plus[depth] = 1
        minus = fix.copy()
        minus[depth] = -1
        stack.append((depth + 1, plus))
        stack.append((depth + 1, minus))
    return out


def leaf_polygon_2d(leaf, angular_resolution=1.0):
    """Outer polygon of a 2-D leaf from support hyperplanes.

    Samples the support function every `angular_resolution` degrees and
    intersects the resulting halfplanes, so the polygon is a guaranteed
    superset of the leaf.  Returns an (k, 2) vertex array.
    """
    Z = leaf.set if isinstance(leaf, LeafSet) else leaf
    if Z.n != 2:
        raise DimensionError("leaf polygons are only defined in 2-D")
    if not 0.0 < float(angular_resolution) <= 120.0:
        raise InvalidInputError("angular resolution must be in (0, 120] degrees")
    if is_empty(Z):
        raise EmptySetError("cannot outline an empty leaf")
    lo, hi = bounds(Z)
    pad = max(1.0, float(np.max(hi - lo)))
    poly = [np.array([lo[0] - pad, lo[1] - pad]),
            np.array([hi[0] + pad, lo[1] - pad]),
            np.array([hi[0] + pad, hi[1] + pad]),
            np.array([lo[0] - pad, hi[1] + pad])]
    angles = np.arange(0.0, 360.0, float(angular_resolution))
    for theta in angles:
        rad = np.deg2rad(theta)
        d = np.array([np.cos(rad), np.sin(rad)])
        h = support(Z, d)
        poly = _clip_halfplane(poly, d, h)
        if not poly:
            break
    return np.array(poly) if poly else np.zeros((0, 2))


def _clip_halfplane(poly, d, h):
    out = []
    k = len(poly)
    for i in range(k):
        a = poly[i]
        bpt = poly[(i + 1) % k]
        da = float(d @ a) - h
        db = float(d @ bpt) - h
        a_in = da <= 1e-12
        b_in = db <= 1e-12
        if a_in:
            out.append(a)
        if a_in != b_in:
            t = da / (da - db)
            out.append(a + t * (bpt - a))
    return out


def count_regions(Z, gap_tol=1e-6, cap=DEFAULT_LEAF_CAP):
    """Number of connected groups of leaves (leaves closer than gap_tol merge).

    Returns (num_regions, leaves).  Leaf pairs whose exact axis-aligned
    bounds are separated are disjoint without further work; the remaining
    pairs are decided exactly by whether their difference set contains the
    origin within gap_tol.
    """
    leaves = enumerate_leaves(Z, cap=cap)
    k = len(leaves)
    if k == 0:
        return 0, leaves
    boxes = [bounds(leaf.set) for leaf in leaves]
    parent = list(range(k))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            ri, rj = root(i), root(j)
            if ri == rj:
                continue
            (ilo, ihi), (jlo, jhi) = boxes[i], boxes[j]
            if np.any(ilo > jhi + gap_tol) or np.any(jlo > ihi + gap_tol):
                continue
            diff = minkowski_sum(leaves[i].set,
                                 linear_map(-np.eye(Z.n), leaves[j].set))
            if contains_point(diff, np.zeros(Z.n), tol=gap_tol):
                parent[rj] = ri
    regions = len({root(i) for i in range(k)})
    return regions, leaves
