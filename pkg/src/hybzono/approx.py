"""Over-approximating input-output sets for nonlinear unary/binary functions.

Three construction routes produce a sound set of (input, output) pairs:

* uniform piecewise-linear interpolation on a breakpoint grid (1-D segments
  or 2-D triangles on a fixed cell diagonal),
* the same with interior breakpoints placed by a seeded coordinate-descent
  search that never does worse than the uniform spacing, and
* exact conversion of a trained ReLU network's graph, neuron by neuron.

Each route is inflated by a rigorous bound on the maximum approximation
error so that the true graph is contained; the bound is only marked
certified when the target function carries a Lipschitz constant.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, TrainingError
from .functions import FunctionHandle
from .sets import (HybridZonotope, VPolyUnion, cartesian_product,
                   generalized_intersection, interval_box, linear_map,
                   minkowski_sum, point_set, sos_to_hybzono, zonotope)

__all__ = [
    "SOSApprox", "ReluNetwork", "IOSet",
    "build_m1", "optimize_breakpoints", "max_error_bound",
    "sos_to_ioset", "relu_to_ioset", "train_relu", "build_m3",
    "save_relu", "load_relu", "save_sos", "load_sos",
    "save_ioset", "load_ioset", "sos_eval", "affine_graph_ioset",
]

_DENSE_GRID_1D = 10000
_DENSE_GRID_2D = 512  # per axis; 1e4 per axis is intractable in 2-D


# ---------------------------------------------------------------------------
# piecewise-linear (SOS-style) approximations


@dataclass(frozen=True)
class SOSApprox:
    """Piecewise-linear interpolant of a scalar function plus an error bound.

    ``axes`` holds the breakpoint coordinates per input dimension (one array
    for 1-D, two for a 2-D grid); ``values`` the function values at the
    breakpoints; ``union`` the vertex/incidence form of the interpolant's
    graph; ``eps`` a bound on the max interpolation error, ``certified``
    whether that bound is backed by a Lipschitz constant.
    """

    dim: int
    axes: tuple
    values: np.ndarray
    union: VPolyUnion
    eps: float
    certified: bool

    @property
    def domain_lo(self):
        return np.array([float(a[0]) for a in self.axes])

    @property
    def domain_hi(self):
        return np.array([float(a[-1]) for a in self.axes])


def sos_eval(s, X):
    """Evaluate the interpolant of an SOSApprox at points X (m, dim)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if s.dim == 1 else X.reshape(1, -1)
    if s.dim == 1:
        return np.interp(X[:, 0], s.axes[0], s.values)
    gx, gy = s.axes
    F = s.values
    ix = np.clip(np.searchsorted(gx, X[:, 0], side="right") - 1, 0, gx.size - 2)
    iy = np.clip(np.searchsorted(gy, X[:, 1], side="right") - 1, 0, gy.size - 2)
    u = (X[:, 0] - gx[ix]) / (gx[ix + 1] - gx[ix])
    v = (X[:, 1] - gy[iy]) / (gy[iy + 1] - gy[iy])
    f00 = F[ix, iy]
    f10 = F[ix + 1, iy]
    f01 = F[ix, iy + 1]
    f11 = F[ix + 1, iy + 1]
    lower = f00 + u * (f10 - f00) + v * (f11 - f10)   # triangle below diagonal
    upper = f00 + v * (f01 - f00) + u * (f11 - f01)   # triangle above diagonal
    return np.where(u >= v, lower, upper)


def _segments_union(x, y):
    nv = x.size
    V = np.vstack([x, y])
    M = np.zeros((nv, nv - 1))
    for s in range(nv - 1):
        M[s, s] = 1
        M[s + 1, s] = 1
    return VPolyUnion(V, M)


def _grid_union(gx, gy, F):
    nx, ny = gx.size, gy.size
    xs, ys = np.meshgrid(gx, gy, indexing="ij")
    V = np.vstack([xs.ravel(), ys.ravel(), F.ravel()])

    def k(i, j):
        return i * ny + j

    ncell = (nx - 1) * (ny - 1)
    M = np.zeros((nx * ny, 2 * ncell))
    col = 0
    for i in range(nx - 1):
        for j in range(ny - 1):
            for vtx in (k(i, j), k(i + 1, j), k(i + 1, j + 1)):
                M[vtx, col] = 1
            for vtx in (k(i, j), k(i + 1, j + 1), k(i, j + 1)):
                M[vtx, col + 1] = 1
            col += 2
    return VPolyUnion(V, M)


def _domain_arrays(domain, dim):
    lo, hi = domain
    lo = np.asarray(lo, dtype=np.float64).reshape(-1)
    hi = np.asarray(hi, dtype=np.float64).reshape(-1)
    if lo.size == 1 and dim > 1:
        lo = np.full(dim, lo[0])
    if hi.size == 1 and dim > 1:
        hi = np.full(dim, hi[0])
    if lo.size != dim or hi.size != dim:
        raise InvalidInputError(f"domain must have {dim} bounds per side")
    if np.any(lo >= hi):
        raise InvalidInputError("domain must have positive width")
    return lo, hi


def build_m1(f, domain, n_break):
    """Uniformly spaced piecewise-linear approximation of f over a box domain.

    1-D: `n_break` breakpoints and n_break - 1 segments.  2-D: an
    n-by-n (or (nx, ny)) grid whose cells are split into two triangles along
    the lower-left to upper-right diagonal.  The error bound comes from
    max_error_bound and is certified iff f has a Lipschitz constant.
    """
    lo, hi = _domain_arrays(domain, f.arity)
    if f.arity == 1:
        n_break = int(n_break)
        if n_break < 2:
            raise InvalidInputError("need at least 2 breakpoints")
        x = np.linspace(lo[0], hi[0], n_break)
        y = f(x.reshape(-1, 1))
        _check_finite(y)
        s = SOSApprox(1, (x,), y, _segments_union(x, y), 0.0, False)
    else:
        if np.isscalar(n_break):
            counts = (int(n_break), int(n_break))
        else:
            counts = (int(n_break[0]), int(n_break[1]))
        if min(counts) < 2:
            raise InvalidInputError("need at least 2 breakpoints per axis")
        gx = np.linspace(lo[0], hi[0], counts[0])
        gy = np.linspace(lo[1], hi[1], counts[1])
        xs, ys = np.meshgrid(gx, gy, indexing="ij")
        F = f(np.column_stack([xs.ravel(), ys.ravel()])).reshape(counts)
        _check_finite(F)
        s = SOSApprox(2, (gx, gy), F, _grid_union(gx, gy, F), 0.0, False)
    eps = max_error_bound(f, s)
    return SOSApprox(s.dim, s.axes, s.values, s.union, eps,
                     f.lipschitz is not None)


def max_error_bound(f, approx, domain=None, grid_per_axis=None):
    """Upper bound on sup |psi - f| over the domain, by dense-grid sampling.

    `approx` may be an SOSApprox, a ReluNetwork, or a callable on (m, d)
    points.  When f carries a Lipschitz constant L the grid maximum is padded
    by L*h/2 (h = grid spacing, cell diagonal in 2-D); without one the value
    is a sample maximum only and callers must flag it uncertified.
    """
    if isinstance(approx, SOSApprox):
        psi = lambda X: sos_eval(approx, X)
        lo, hi = approx.domain_lo, approx.domain_hi
        dim = approx.dim
    else:
        if domain is None:
            raise InvalidInputError("domain required unless approx is an SOSApprox")
        dim = f.arity
        lo, hi = _domain_arrays(domain, dim)
        psi = approx.eval if isinstance(approx, ReluNetwork) else approx
    if grid_per_axis is None:
        grid_per_axis = _DENSE_GRID_1D if dim == 1 else _DENSE_GRID_2D
    if dim == 1:
        xs = np.linspace(lo[0], hi[0], grid_per_axis).reshape(-1, 1)
        h = (hi[0] - lo[0]) / (grid_per_axis - 1)
    else:
        gx = np.linspace(lo[0], hi[0], grid_per_axis)
        gy = np.linspace(lo[1], hi[1], grid_per_axis)
        xs2, ys2 = np.meshgrid(gx, gy, indexing="ij")
        xs = np.column_stack([xs2.ravel(), ys2.ravel()])
        h = float(np.hypot(gx[1] - gx[0], gy[1] - gy[0]))
    err = float(np.max(np.abs(np.asarray(psi(xs)).reshape(-1) - f(xs))))
    if f.lipschitz is not None:
        err += f.lipschitz * h / 2.0
    return err


def optimize_breakpoints(f, domain, n_break, restarts=20, seed=0,
                         grid_per_axis=None, sweeps=20):
    """Place interior breakpoints to shrink the maximum interpolation error.

    Endpoints stay at the domain edges.  Coordinate descent with a
    golden-section line search runs from the uniform spacing plus `restarts`
    random interior seeds; only improvements are accepted, so the result
    never exceeds the uniform error on the same evaluation grid.
    """
    if f.arity != 1:
        raise InvalidInputError("breakpoint optimization is 1-D only")
    n_break = int(n_break)
    if n_break < 3:
        raise InvalidInputError("need at least 3 breakpoints to optimize")
    lo, hi = _domain_arrays(domain, 1)
    a, bnd = float(lo[0]), float(hi[0])
    if grid_per_axis is None:
        grid_per_axis = _DENSE_GRID_1D
    xs = np.linspace(a, bnd, grid_per_axis)
    fx = f(xs.reshape(-1, 1))
    _check_finite(fx)

    def objective(interior):
        pts = np.concatenate([[a], interior, [bnd]])
        vals = f(pts.reshape(-1, 1))
        return float(np.max(np.abs(np.interp(xs, pts, vals) - fx)))

    def descend(interior):
        cur = interior.copy()
        best_val = objective(cur)
        gap = 1e-9 * (bnd - a)
        for _ in range(sweeps):
            improved = False
            for i in range(cur.size):
                left = a if i == 0 else cur[i - 1]
                right = bnd if i == cur.size - 1 else cur[i + 1]
                lo_i, hi_i = left + gap, right - gap
                if hi_i <= lo_i:
                    continue

                def line(t):
                    trial = cur.copy()
                    trial[i] = t
                    return objective(trial)

                t_star, v_star = _golden_section(line, lo_i, hi_i)
                if v_star < best_val - 1e-15:
                    cur[i] = t_star
                    best_val = v_star
                    improved = True
            if not improved:
                break
        return cur, best_val

    uniform = np.linspace(a, bnd, n_break)[1:-1]
    rng = np.random.default_rng(seed)
    candidates = [uniform]
    for _ in range(restarts - 1):
        candidates.append(np.sort(rng.uniform(a, bnd, n_break - 2)))
    best_pts, best_val = uniform, objective(uniform)
    for cand in candidates:
        pts, val = descend(cand)
        if val < best_val - 1e-15:
            best_pts, best_val = pts, val
    x = np.concatenate([[a], np.sort(best_pts), [bnd]])
    y = f(x.reshape(-1, 1))
    s = SOSApprox(1, (x,), y, _segments_union(x, y), 0.0, False)
    eps = max_error_bound(f, s, grid_per_axis=grid_per_axis)
    return SOSApprox(1, (x,), y, s.union, eps, f.lipschitz is not None)


def _golden_section(fun, lo, hi, iters=60):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if hi - lo < 1e-12:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = fun(x2)
    if f1 <= f2:
        return x1, f1
    return x2, f2


def _check_finite(arr):
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("function evaluation produced non-finite values")


# ---------------------------------------------------------------------------
# input-output sets


@dataclass(frozen=True)
class IOSet:
    """Set of stacked (input, output) pairs of a map over a domain.

    ``set`` lives in R^(n_in + n_out) with inputs first; ``domain`` is the
    descriptor of covered inputs.  ``eps`` records the output inflation baked
    into the set and ``certified`` whether that inflation soundly bounds the
    approximation error of the intended function.
    """

    set: HybridZonotope
    n_in: int
    n_out: int
    domain: HybridZonotope
    eps: float = 0.0
    certified: bool = True

    def __post_init__(self):
        if self.set.n != self.n_in + self.n_out:
            raise InvalidInputError("set dimension must equal n_in + n_out")
        if self.domain.n != self.n_in:
            raise InvalidInputError("domain dimension must equal n_in")


def sos_to_ioset(s):
    """Graph of the interpolant, inflated by [-eps, eps] on the output axis."""
    Z = sos_to_hybzono(s.union)
    if s.eps > 0.0:
        Z = _inflate_output(Z, s.dim, s.eps)
    dom = interval_box(s.domain_lo, s.domain_hi)
    return IOSet(set=Z, n_in=s.dim, n_out=1, domain=dom,
                 eps=float(s.eps), certified=bool(s.certified))


def _inflate_output(Z, n_in, eps):
    n = Z.n
    cols = np.zeros((n, n - n_in))
    for k in range(n - n_in):
        cols[n_in + k, k] = eps
    return minkowski_sum(Z, zonotope(cols, np.zeros(n)))


def affine_graph_ioset(W, t, domain_box):
    """Exact input-output set {(p, W p + t) | p in the given box}."""
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    lo, hi = domain_box
    dom = interval_box(lo, hi)
    n_in = dom.n
    if W.shape[1] != n_in or W.shape[0] != t.size:
        raise InvalidInputError("affine map dimensions do not match the domain")
    R = np.vstack([np.eye(n_in), W])
    Z = linear_map(R, dom)
    shift = np.concatenate([np.zeros(n_in), t])
    Z = HybridZonotope(Z.Gc, Z.Gb, Z.c + shift, Z.Ac, Z.Ab, Z.b)
    return IOSet(set=Z, n_in=n_in, n_out=t.size, domain=dom)


# ---------------------------------------------------------------------------
# ReLU networks


class ReluNetwork:
    """Fully connected network: hidden layers ReLU, output layer affine."""

    __slots__ = ("layers",)

    def __init__(self, layers):
        layers = tuple((np.ascontiguousarray(W, dtype=np.float64),
                        np.ascontiguousarray(b, dtype=np.float64).reshape(-1))
                       for W, b in layers)
        if len(layers) < 2:
            raise InvalidInputError("need at least one hidden layer")
        for i, (W, b) in enumerate(layers):
            if W.ndim != 2 or W.shape[0] != b.size:
                raise InvalidInputError(f"layer {i}: weight/bias shapes disagree")
            if i > 0 and W.shape[1] != layers[i - 1][0].shape[0]:
                raise InvalidInputError(f"layer {i}: input width does not chain")
        self.layers = layers

    @property
    def n_in(self):
        return self.layers[0][0].shape[1]

    @property
    def n_out(self):
        return self.layers[-1][0].shape[0]

    def eval(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, self.n_in)
        h = X
        for W, b in self.layers[:-1]:
            h = np.maximum(h @ W.T + b, 0.0)
        W, b = self.layers[-1]
        out = h @ W.T + b
        return out[:, 0] if self.n_out == 1 else out

    def preactivation_bounds(self, lo, hi):
        """Per-hidden-layer interval bounds propagated from the input box."""
        lo = np.asarray(lo, dtype=np.float64).reshape(-1)
        hi = np.asarray(hi, dtype=np.float64).reshape(-1)
        out = []
        cur_lo, cur_hi = lo, hi
        for W, b in self.layers[:-1]:
            mid = (cur_lo + cur_hi) / 2.0
            rad = (cur_hi - cur_lo) / 2.0
            amid = W @ mid + b
            arad = np.abs(W) @ rad
            l, u = amid - arad, amid + arad
            out.append((l, u))
            cur_lo, cur_hi = np.maximum(l, 0.0), np.maximum(u, 0.0)
        return out

    def to_dict(self):
        return {"layers": [{"W": W.tolist(), "b": b.tolist()}
                           for W, b in self.layers]}

    @classmethod
    def from_dict(cls, d):
        try:
            layers = [(np.asarray(item["W"], dtype=np.float64),
                       np.asarray(item["b"], dtype=np.float64))
                      for item in d["layers"]]
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidInputError(f"malformed network data: {err}") from err
        return cls(layers)


def save_relu(net, path):
    with open(path, "w") as fh:
        json.dump(net.to_dict(), fh, sort_keys=True)


def load_relu(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"invalid JSON: {err}") from err
    return ReluNetwork.from_dict(d)


def train_relu(f, domain, layout, seed, iters=2000, lr=1e-2, grid_points=None):
    """Fit a ReLU network to f by full-batch gradient descent on MSE.

    Deterministic for a fixed seed: weights start uniform in [-0.5, 0.5]
    from a seeded generator and the gradient loop is pure numpy.  Raises
    TrainingError if the loss goes non-finite.  No accuracy is guaranteed;
    soundness comes from the downstream error inflation.
    """
    layout = [int(w) for w in layout]
    if not layout:
        raise InvalidInputError("layout must list at least one hidden width")
    lo, hi = _domain_arrays(domain, f.arity)
    if grid_points is None:
        grid_points = 1000 if f.arity == 1 else 32
    if f.arity == 1:
        X = np.linspace(lo[0], hi[0], grid_points).reshape(-1, 1)
    else:
        gx = np.linspace(lo[0], hi[0], grid_points)
        gy = np.linspace(lo[1], hi[1], grid_points)
        xs, ys = np.meshgrid(gx, gy, indexing="ij")
        X = np.column_stack([xs.ravel(), ys.ravel()])
    y = f(X)

    rng = np.random.default_rng(seed)
    sizes = [f.arity] + layout + [1]
    Ws = [rng.uniform(-0.5, 0.5, (sizes[i + 1], sizes[i]))
          for i in range(len(sizes) - 1)]
    bs = [rng.uniform(-0.5, 0.5, sizes[i + 1]) for i in range(len(sizes) - 1)]
    m = X.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(iters):
            acts = [X]
            h = X
            pres = []
            for k in range(len(Ws) - 1):
                a = h @ Ws[k].T + bs[k]
                pres.append(a)
                h = np.maximum(a, 0.0)
                acts.append(h)
            out = h @ Ws[-1].T + bs[-1]
            resid = out[:, 0] - y
            loss = float(np.mean(resid ** 2))
            if not np.isfinite(loss):
                raise TrainingError("training diverged (non-finite loss)")
            grad = (2.0 / m) * resid.reshape(-1, 1)
            gWs = [None] * len(Ws)
            gbs = [None] * len(bs)
            delta = grad
            gWs[-1] = delta.T @ acts[-1]
            gbs[-1] = delta.sum(axis=0)
            for k in range(len(Ws) - 2, -1, -1):
                delta = (delta @ Ws[k + 1]) * (pres[k] > 0.0)
                gWs[k] = delta.T @ acts[k]
                gbs[k] = delta.sum(axis=0)
            for k in range(len(Ws)):
                Ws[k] = Ws[k] - lr * gWs[k]
                bs[k] = bs[k] - lr * gbs[k]
    return ReluNetwork(list(zip(Ws, bs)))


# ---------------------------------------------------------------------------
# exact ReLU graph conversion


def _relu_neuron_graph(l, u):
    """Graph of max(0, a) for a in [l, u] as a set over (a, y).

    Sign-stable neurons need no binary factor; an unstable neuron is the
    union of its two segments with one binary selecting the active side.
    """
    mid = (l + u) / 2.0
    rad = (u - l) / 2.0
    if l >= 0.0:
        return zonotope(np.array([[rad], [rad]]), np.array([mid, mid]))
    if u <= 0.0:
        return zonotope(np.array([[rad], [0.0]]), np.array([mid, 0.0]))
    Gc = np.array([[l / 2.0, u / 2.0, 0.0, 0.0],
                   [0.0, u / 2.0, 0.0, 0.0]])
    Gb = np.zeros((2, 1))
    c = np.array([(l + u) / 2.0, u / 2.0])
    Ac = np.array([[0.0, 1.0, 1.0, 0.0],
                   [1.0, 0.0, 0.0, 1.0]])
    Ab = np.array([[-1.0], [1.0]])
    b = np.array([-1.0, -1.0])
    return HybridZonotope(Gc, Gb, c, Ac, Ab, b)


def relu_to_ioset(net, domain):
    """Exact input-output set of a ReLU network over a box domain.

    Composes per-neuron graph sets through Cartesian products and couples
    them to the running state with one generalized intersection per layer;
    pre-activation intervals come from layer-by-layer interval arithmetic.
    """
    lo, hi = _domain_arrays(domain, net.n_in)
    n_in = net.n_in
    dom = interval_box(lo, hi)
    # running set over (p, h) with h the activations of the current layer
    Z = linear_map(np.vstack([np.eye(n_in), np.eye(n_in)]), dom)
    width = n_in
    layer_bounds = net.preactivation_bounds(lo, hi)
    for (W, bvec), (lb, ub) in zip(net.layers[:-1], layer_bounds):
        w = W.shape[0]
        R = _relu_neuron_graph(float(lb[0]), float(ub[0]))
        for jn in range(1, w):
            R = cartesian_product(R, _relu_neuron_graph(float(lb[jn]),
                                                        float(ub[jn])))
        # reorder interleaved (a_j, y_j) pairs into (a block, y block)
        P = np.zeros((2 * w, 2 * w))
        for jn in range(w):
            P[jn, 2 * jn] = 1.0
            P[w + jn, 2 * jn + 1] = 1.0
        R = linear_map(P, R)
        big = cartesian_product(Z, R)
        # couple: a = W h + bvec
        C = np.zeros((w, n_in + width + 2 * w))
        C[:, n_in:n_in + width] = -W
        C[:, n_in + width:n_in + width + w] = np.eye(w)
        big = generalized_intersection(big, C, point_set(bvec))
        keep = np.zeros((n_in + w, n_in + width + 2 * w))
        keep[:n_in, :n_in] = np.eye(n_in)
        keep[n_in:, n_in + width + w:] = np.eye(w)
        Z = linear_map(keep, big)
        width = w
    W, bvec = net.layers[-1]
    out = W.shape[0]
    R = np.zeros((n_in + out, n_in + width))
    R[:n_in, :n_in] = np.eye(n_in)
    R[n_in:, n_in:] = W
    Z = linear_map(R, Z)
    shift = np.concatenate([np.zeros(n_in), bvec])
    Z = HybridZonotope(Z.Gc, Z.Gb, Z.c + shift, Z.Ac, Z.Ab, Z.b)
    return IOSet(set=Z, n_in=n_in, n_out=out, domain=dom)


def build_m3(f, domain, layout, seed, iters=2000, lr=1e-2,
             grid_per_axis=None, net=None):
    """Train (or reuse) a network, convert its graph, and inflate vs f.

    Returns (IOSet, ReluNetwork, eps).  The inflation eps bounds the
    network-vs-function error via max_error_bound; certification follows
    f's Lipschitz constant.
    """
    if net is None:
        net = train_relu(f, domain, layout, seed, iters=iters, lr=lr)
    io = relu_to_ioset(net, domain)
    eps = max_error_bound(f, net, domain=domain, grid_per_axis=grid_per_axis)
    Z = _inflate_output(io.set, io.n_in, eps) if eps > 0 else io.set
    out = IOSet(set=Z, n_in=io.n_in, n_out=io.n_out, domain=io.domain,
                eps=float(eps), certified=f.lipschitz is not None)
    return out, net, eps


# ---------------------------------------------------------------------------
# file formats


def save_sos(s, path):
    d = {
        "dim": s.dim,
        "breakpoints": [a.tolist() for a in s.axes],
        "values": s.values.tolist(),
        "V": s.union.V.tolist(),
        "M": s.union.M.astype(int).tolist(),
        "eps": s.eps,
        "certified": s.certified,
    }
    with open(path, "w") as fh:
        json.dump(d, fh, sort_keys=True)


def load_sos(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"invalid JSON: {err}") from err
    try:
        dim = int(d["dim"])
        axes = tuple(np.asarray(a, dtype=np.float64) for a in d["breakpoints"])
        values = np.asarray(d["values"], dtype=np.float64)
        union = VPolyUnion(np.asarray(d["V"], dtype=np.float64),
                           np.asarray(d["M"]))
        return SOSApprox(dim, axes, values, union, float(d["eps"]),
                         bool(d["certified"]))
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidInputError(f"malformed SOS data: {err}") from err


def save_ioset(io, path):
    d = {
        "np": io.n_in,
        "nq": io.n_out,
        "eps": io.eps,
        "certified": io.certified,
        "set": io.set.to_dict(),
        "domain": io.domain.to_dict(),
    }
    with open(path, "w") as fh:
        json.dump(d, fh, sort_keys=True)


def load_ioset(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"invalid JSON: {err}") from err
    try:
        return IOSet(set=HybridZonotope.from_dict(d["set"]),
                     n_in=int(d["np"]), n_out=int(d["nq"]),
                     domain=HybridZonotope.from_dict(d["domain"]),
                     eps=float(d["eps"]), certified=bool(d["certified"]))
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidInputError(f"malformed input-output set data: {err}") from err
