"""Hybrid zonotope representation and its closed set operations.

A hybrid zonotope is the set of points ``Gc @ xc + Gb @ xb + c`` where the
continuous factors satisfy ``xc in [-1, 1]^ng``, the binary factors satisfy
``xb in {-1, 1}^nb``, and both are coupled by the linear equality constraints
``Ac @ xc + Ab @ xb = b``.  Fixing the binary factors to one of the 2^nb
assignments yields a constrained zonotope (a "leaf"); the full set is the
union of all nonempty leaves, which makes the representation closed under the
operations in this module while still describing nonconvex and disjoint sets.
"""

import json

import numpy as np

from .errors import DimensionError, InvalidInputError

__all__ = [
    "HybridZonotope",
    "VPolyUnion",
    "point_set",
    "interval_box",
    "zonotope",
    "linear_map",
    "minkowski_sum",
    "generalized_intersection",
    "cartesian_product",
    "halfspace_intersection",
    "sos_to_hybzono",
    "interval_hull",
]


def _matrix(M, rows, cols, name):
    """Coerce to a float64 matrix of the given shape, allowing empties."""
    A = np.asarray(M, dtype=np.float64)
    if A.size == 0:
        A = A.reshape(rows if rows is not None else 0, cols if cols is not None else 0)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be a matrix, got ndim={A.ndim}")
    if rows is not None and A.shape[0] != rows:
        raise DimensionError(f"{name} must have {rows} rows, got {A.shape[0]}")
    if cols is not None and A.shape[1] != cols:
        raise DimensionError(f"{name} must have {cols} columns, got {A.shape[1]}")
    return A


def _vector(v, size, name):
    a = np.asarray(v, dtype=np.float64).reshape(-1)
    if size is not None and a.size != size:
        raise DimensionError(f"{name} must have length {size}, got {a.size}")
    return a


class HybridZonotope:
    """Immutable hybrid zonotope ``<Gc, Gb, c, Ac, Ab, b>``.

    Shapes: ``Gc`` is n-by-ng, ``Gb`` is n-by-nb, ``c`` is length n,
    ``Ac`` is nc-by-ng, ``Ab`` is nc-by-nb, ``b`` is length nc.  Zero-sized
    blocks are legal: nb = nc = 0 gives a zonotope, nb = 0 a constrained
    zonotope.  All arrays are copied and frozen on construction.
    """

    __slots__ = ("Gc", "Gb", "c", "Ac", "Ab", "b")

    def __init__(self, Gc, Gb, c, Ac, Ab, b):
        c = _vector(c, None, "c")
        n = c.size
        Gc = _matrix(Gc, n, None, "Gc")
        ng = Gc.shape[1]
        Gb = _matrix(Gb, n, None, "Gb")
        nb = Gb.shape[1]
        b = _vector(b, None, "b")
        nc = b.size
        Ac = _matrix(Ac, nc, ng, "Ac")
        Ab = _matrix(Ab, nc, nb, "Ab")
        for name, arr in (("Gc", Gc), ("Gb", Gb), ("c", c), ("Ac", Ac), ("Ab", Ab), ("b", b)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains non-finite entries")
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return self.c.size

    @property
    def ng(self):
        return self.Gc.shape[1]

    @property
    def nb(self):
        return self.Gb.shape[1]

    @property
    def nc(self):
        return self.b.size

    def counts(self):
        """Representation sizes as a tuple (ng, nb, nc)."""
        return (self.ng, self.nb, self.nc)

    def point(self, xc, xb=None):
        """Map a factor assignment to the corresponding point (no feasibility check)."""
        xc = _vector(xc, self.ng, "xc")
        p = self.Gc @ xc + self.c
        if self.nb:
            if xb is None:
                raise DimensionError("set has binary factors; xb is required")
            p = p + self.Gb @ _vector(xb, self.nb, "xb")
        return p

    def residual(self, xc, xb=None):
        """Max-norm violation of the equality constraints at a factor assignment."""
        if self.nc == 0:
            return 0.0
        xc = _vector(xc, self.ng, "xc")
        r = self.Ac @ xc - self.b
        if self.nb:
            r = r + self.Ab @ _vector(xb, self.nb, "xb")
        return float(np.max(np.abs(r)))

    def __repr__(self):
        return (f"HybridZonotope(n={self.n}, ng={self.ng}, "
                f"nb={self.nb}, nc={self.nc})")

    # serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "n": self.n, "ng": self.ng, "nb": self.nb, "nc": self.nc,
            "Gc": self.Gc.tolist(), "Gb": self.Gb.tolist(),
            "c": self.c.tolist(),
            "Ac": self.Ac.tolist(), "Ab": self.Ab.tolist(),
            "b": self.b.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        try:
            n, ng, nb, nc = int(d["n"]), int(d["ng"]), int(d["nb"]), int(d["nc"])
            Gc = np.asarray(d["Gc"], dtype=np.float64).reshape(n, ng)
            Gb = np.asarray(d["Gb"], dtype=np.float64).reshape(n, nb)
            c = np.asarray(d["c"], dtype=np.float64).reshape(n)
            Ac = np.asarray(d["Ac"], dtype=np.float64).reshape(nc, ng)
            Ab = np.asarray(d["Ab"], dtype=np.float64).reshape(nc, nb)
            b = np.asarray(d["b"], dtype=np.float64).reshape(nc)
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidInputError(f"malformed hybrid zonotope data: {err}") from err
        return cls(Gc, Gb, c, Ac, Ab, b)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"invalid JSON: {err}") from err
        return cls.from_dict(d)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


class VPolyUnion:
    """Union of N vertex-represented polytopes sharing a vertex pool.

    ``V`` is the n-by-nv vertex matrix; ``M`` is the nv-by-N binary incidence
    matrix whose column i selects the vertices of polytope i.  Every column
    must select at least one vertex.
    """

    __slots__ = ("V", "M")

    def __init__(self, V, M):
        V = np.asarray(V, dtype=np.float64)
        if V.ndim != 2 or V.shape[1] < 1:
            raise InvalidInputError("V must be an n-by-nv matrix with nv >= 1")
        M = np.asarray(M)
        if M.ndim != 2 or M.shape[0] != V.shape[1] or M.shape[1] < 1:
            raise InvalidInputError("M must be nv-by-N with N >= 1")
        if not np.all((M == 0) | (M == 1)):
            raise InvalidInputError("M entries must be 0 or 1")
        if np.any(M.sum(axis=0) == 0):
            raise InvalidInputError("every incidence column must select a vertex")
        M = np.ascontiguousarray(M.astype(np.float64))
        V = np.ascontiguousarray(V)
        V.setflags(write=False)
        M.setflags(write=False)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "M", M)

    @property
    def n(self):
        return self.V.shape[0]

    @property
    def nv(self):
        return self.V.shape[1]

    @property
    def num_polys(self):
        return self.M.shape[1]

    def __repr__(self):
        return f"VPolyUnion(n={self.n}, nv={self.nv}, N={self.num_polys})"


# constructors ------------------------------------------------------------

def point_set(p):
    """Singleton set {p}."""
    p = _vector(p, None, "p")
    n = p.size
    z = np.zeros((n, 0))
    return HybridZonotope(z, z, p, np.zeros((0, 0)), np.zeros((0, 0)), np.zeros(0))


def interval_box(lo, hi):
    """Axis-aligned box [lo, hi] as an unconstrained zonotope."""
    lo = _vector(lo, None, "lo")
    hi = _vector(hi, lo.size, "hi")
    if np.any(lo > hi):
        raise InvalidInputError("interval_box requires lo <= hi elementwise")
    G = np.diag((hi - lo) / 2.0)
    return zonotope(G, (hi + lo) / 2.0)


def zonotope(G, c):
    """Zonotope <G, c> (no binaries, no constraints)."""
    c = _vector(c, None, "c")
    G = _matrix(G, c.size, None, "G")
    n = c.size
    return HybridZonotope(G, np.zeros((n, 0)), c,
                          np.zeros((0, G.shape[1])), np.zeros((0, 0)), np.zeros(0))


# operations --------------------------------------------------------------

def linear_map(R, Z):
    """Image {R z | z in Z}; scales the generators and center, keeps constraints."""
    R = np.atleast_2d(np.asarray(R, dtype=np.float64))
    if R.shape[1] != Z.n:
        raise DimensionError(f"R has {R.shape[1]} columns but Z has dimension {Z.n}")
    return HybridZonotope(R @ Z.Gc, R @ Z.Gb, R @ Z.c, Z.Ac, Z.Ab, Z.b)


def minkowski_sum(Z, W):
    """Minkowski sum {z + w | z in Z, w in W}."""
    if Z.n != W.n:
        raise DimensionError(f"dimension mismatch: {Z.n} vs {W.n}")
    Gc = np.hstack([Z.Gc, W.Gc])
    Gb = np.hstack([Z.Gb, W.Gb])
    Ac = _blkdiag(Z.Ac, W.Ac)
    Ab = _blkdiag(Z.Ab, W.Ab)
    return HybridZonotope(Gc, Gb, Z.c + W.c, Ac, Ab, np.concatenate([Z.b, W.b]))


def generalized_intersection(Z, R, Y):
    """Intersection {z in Z | R z in Y}.

    The result keeps Z's generators, gains Y's as constrained-away columns,
    and couples the two with m new equality rows (m = dim of Y).  Emptiness
    of the result is *not* checked here.
    """
    R = np.atleast_2d(np.asarray(R, dtype=np.float64))
    m = R.shape[0]
    if R.shape[1] != Z.n:
        raise DimensionError(f"R has {R.shape[1]} columns but Z has dimension {Z.n}")
    if m != Y.n:
        raise DimensionError(f"R has {m} rows but Y has dimension {Y.n}")
    n = Z.n
    Gc = np.hstack([Z.Gc, np.zeros((n, Y.ng))])
    Gb = np.hstack([Z.Gb, np.zeros((n, Y.nb))])
    Ac = np.vstack([
        np.hstack([Z.Ac, np.zeros((Z.nc, Y.ng))]),
        np.hstack([np.zeros((Y.nc, Z.ng)), Y.Ac]),
        np.hstack([R @ Z.Gc, -Y.Gc]),
    ])
    Ab = np.vstack([
        np.hstack([Z.Ab, np.zeros((Z.nc, Y.nb))]),
        np.hstack([np.zeros((Y.nc, Z.nb)), Y.Ab]),
        np.hstack([R @ Z.Gb, -Y.Gb]),
    ])
    b = np.concatenate([Z.b, Y.b, Y.c - R @ Z.c])
    return HybridZonotope(Gc, Gb, Z.c, Ac, Ab, b)


def cartesian_product(Z, Y):
    """Cartesian product Z x Y; block-diagonal in every block."""
    Gc = _blkdiag(Z.Gc, Y.Gc)
    Gb = _blkdiag(Z.Gb, Y.Gb)
    Ac = _blkdiag(Z.Ac, Y.Ac)
    Ab = _blkdiag(Z.Ab, Y.Ab)
    c = np.concatenate([Z.c, Y.c])
    b = np.concatenate([Z.b, Y.b])
    return HybridZonotope(Gc, Gb, c, Ac, Ab, b)


def halfspace_intersection(Z, R, h_max):
    """Intersection of Z with the polyhedron {x | R x <= h_max}.

    Each inequality row gets one continuous slack generator sized from the
    interval range of the row over the factor hypercube, so the encoding is
    exact: points of Z violating a row cannot satisfy the new equality, and
    an unconditionally violated row yields a certifiably empty set.
    """
    R = np.atleast_2d(np.asarray(R, dtype=np.float64))
    m = R.shape[0]
    if R.shape[1] != Z.n:
        raise DimensionError(f"R has {R.shape[1]} columns but Z has dimension {Z.n}")
    h_max = _vector(h_max, m, "h_max")
    wc = R @ Z.Gc
    wb = R @ Z.Gb
    rad = np.abs(wc).sum(axis=1) + np.abs(wb).sum(axis=1)
    f = h_max - R @ Z.c
    hi_eff = np.minimum(f, rad)
    lo_eff = np.minimum(f, -rad)
    d = (hi_eff - lo_eff) / 2.0
    mid = (hi_eff + lo_eff) / 2.0
    n = Z.n
    Gc = np.hstack([Z.Gc, np.zeros((n, m))])
    Ac = np.vstack([
        np.hstack([Z.Ac, np.zeros((Z.nc, m))]),
        np.hstack([wc, np.diag(d)]),
    ])
    Ab = np.vstack([Z.Ab, wb])
    b = np.concatenate([Z.b, mid])
    return HybridZonotope(Gc, Z.Gb, Z.c, Ac, Ab, b)


def sos_to_hybzono(S):
    """Convert a union of V-rep polytopes to a hybrid zonotope.

    Builds the simplex-weight set over (vertex weights, polytope selector),
    restricts the weights to the selected polytope's vertices through a
    halfspace intersection, and maps through the vertex matrix.  The result
    has exactly ng = 2 nv, nb = N, nc = nv + 2.
    """
    if not isinstance(S, VPolyUnion):
        S = VPolyUnion(S.V, S.M)
    nv, N = S.nv, S.num_polys
    half = 0.5
    Gc = half * np.vstack([np.eye(nv), np.zeros((N, nv))])
    Gb = half * np.vstack([np.zeros((nv, N)), np.eye(N)])
    c = half * np.ones(nv + N)
    Ac = half * np.vstack([np.ones((1, nv)), np.zeros((1, nv))])
    Ab = half * np.vstack([np.zeros((1, N)), np.ones((1, N))])
    b = half * np.array([2.0 - nv, 2.0 - N])
    Q = HybridZonotope(Gc, Gb, c, Ac, Ab, b)
    R = np.hstack([np.eye(nv), -S.M])
    D = halfspace_intersection(Q, R, np.zeros(nv))
    return linear_map(np.hstack([S.V, np.zeros((S.n, N))]), D)


def interval_hull(Z):
    """Outer axis-aligned bounds (lo, hi) ignoring the equality constraints."""
    rad = np.abs(Z.Gc).sum(axis=1) + np.abs(Z.Gb).sum(axis=1)
    return Z.c - rad, Z.c + rad


def _blkdiag(A, B):
    out = np.zeros((A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]))
    out[:A.shape[0], :A.shape[1]] = A
    out[A.shape[0]:, A.shape[1]:] = B
    return out
