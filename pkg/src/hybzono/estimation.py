"""Set-valued state estimation over hybrid zonotopes.

The estimator alternates a dynamic update (successor set of the current
estimate) with a measurement update (intersection with the set of states
consistent with the latest output).  Both updates go through input-output
sets: the successor set is the output set of the dynamics' graph, and the
measurement-consistent set is the input set (preimage) of the measurement
map's graph, inflated by the noise set.  Because every step uses closed
operations, the truth-containment guarantee survives any sound
over-approximation of those graphs.
"""

import json
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionError, InconsistencyError, InvalidInputError,
                     UncertifiedError)
from .approx import IOSet, load_ioset
from .functions import builtin_handle
from .sets import (HybridZonotope, cartesian_product, generalized_intersection,
                   interval_box, linear_map, minkowski_sum, point_set)
from . import solver

__all__ = [
    "PlantModel", "MeasurementModel", "StepRecord", "EstimatorState",
    "output_set", "input_set", "measurement_consistent_set",
    "dynamic_update", "measurement_update", "run_estimator", "load_scenario",
]


@dataclass(frozen=True)
class PlantModel:
    """Discrete-time plant: affine (A, B) or the graph of the dynamics.

    For kind 'affine' the update is A x + B u; for kind 'ioset' the update
    maps the estimate (stacked with the input set, if any) through the
    dynamics' input-output set.
    """

    kind: str
    n_x: int
    n_u: int = 0
    A: np.ndarray = None
    B: np.ndarray = None
    phi: IOSet = None

    @classmethod
    def affine(cls, A, B=None):
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        if A.shape[0] != A.shape[1]:
            raise DimensionError("A must be square")
        n_x = A.shape[0]
        if B is None:
            B = np.zeros((n_x, 0))
        B = np.atleast_2d(np.asarray(B, dtype=np.float64))
        if B.shape[0] != n_x:
            raise DimensionError("B must have as many rows as A")
        return cls(kind="affine", n_x=n_x, n_u=B.shape[1], A=A, B=B)

    @classmethod
    def from_ioset(cls, phi, n_u=0):
        n_x = phi.n_out
        if phi.n_in != n_x + n_u:
            raise DimensionError(
                f"dynamics graph has {phi.n_in} inputs, expected {n_x + n_u}")
        return cls(kind="ioset", n_x=n_x, n_u=n_u, phi=phi)


@dataclass(frozen=True)
class MeasurementModel:
    """Measurement map's input-output set plus the additive noise set.

    `noise` defaults to the exact-measurement case {0}.  `true_fn` is the
    actual measurement map (a callable on (m, n_x) points), used only to
    synthesize measurements when simulating the true system.
    """

    phi: IOSet
    noise: HybridZonotope = None
    true_fn: callable = None

    def noise_set(self):
        if self.noise is None:
            return point_set(np.zeros(self.phi.n_out))
        return self.noise


@dataclass
class StepRecord:
    k: int
    prior: HybridZonotope
    posterior: HybridZonotope
    y: np.ndarray
    true_state: np.ndarray
    bounds_lo: np.ndarray = None
    bounds_hi: np.ndarray = None
    region_count: int = None
    t_update: float = 0.0
    t_bounds: float = 0.0
    t_regions: float = 0.0


@dataclass
class EstimatorState:
    """Current estimate, step counter, and the per-step log of the run."""

    estimate: HybridZonotope
    k: int = 0
    log: list = field(default_factory=list)

    @property
    def total_update_time(self):
        return sum(r.t_update for r in self.log)

    @property
    def total_bounds_time(self):
        return sum(r.t_bounds for r in self.log)


# ---------------------------------------------------------------------------
# input-output set identities


def output_set(phi, P, check_domain=True):
    """Set of outputs of phi over the input set P.

    Implements [0 I] (Phi intersected with P on the input coordinates).
    Requires P inside the domain descriptor; for box domains this is checked
    exactly via support bounds and violations only warn, since the identity
    stays sound whenever the graph set covers the true map on P.
    """
    if P.n != phi.n_in:
        raise DimensionError(f"input set has dimension {P.n}, expected {phi.n_in}")
    if check_domain:
        _warn_if_outside_domain(phi, P)
    R_in = np.hstack([np.eye(phi.n_in), np.zeros((phi.n_in, phi.n_out))])
    inter = generalized_intersection(phi.set, R_in, P)
    R_out = np.hstack([np.zeros((phi.n_out, phi.n_in)), np.eye(phi.n_out)])
    return linear_map(R_out, inter)


def input_set(phi, Q):
    """Set of inputs within the domain whose outputs land in Q (the preimage).

    Implements [I 0] (Phi intersected with Q on the output coordinates).
    An empty result is legal: no inputs are consistent with Q.
    """
    if Q.n != phi.n_out:
        raise DimensionError(f"output set has dimension {Q.n}, expected {phi.n_out}")
    R_out = np.hstack([np.zeros((phi.n_out, phi.n_in)), np.eye(phi.n_out)])
    inter = generalized_intersection(phi.set, R_out, Q)
    R_in = np.hstack([np.eye(phi.n_in), np.zeros((phi.n_in, phi.n_out))])
    return linear_map(R_in, inter)


def _box_geometry(Z):
    """(lo, hi) if Z is an axis-aligned box without constraints, else None."""
    if Z.nb != 0 or Z.nc != 0:
        return None
    nz = Z.Gc != 0.0
    if np.any(nz.sum(axis=0) > 1):
        return None
    rad = np.abs(Z.Gc).sum(axis=1)
    return Z.c - rad, Z.c + rad


def _warn_if_outside_domain(phi, P):
    box = _box_geometry(phi.domain)
    if box is None:
        return
    lo, hi = box
    try:
        p_lo, p_hi = solver.bounds(P)
    except Exception:
        return
    slack = 1e-7
    if np.any(p_lo < lo - slack) or np.any(p_hi > hi + slack):
        warnings.warn("input set exceeds the approximation's domain; the "
                      "output set is only valid on the covered part",
                      RuntimeWarning)


def measurement_consistent_set(m, y):
    """States whose modeled output, inflated by the noise set, matches y."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != m.phi.n_out:
        raise DimensionError(f"measurement has dimension {y.size}, "
                             f"expected {m.phi.n_out}")
    noise = m.noise_set()
    target = minkowski_sum(point_set(y),
                           linear_map(-np.eye(noise.n), noise))
    return input_set(m.phi, target)


def dynamic_update(plant, est, u=None):
    """One-step successor set of the estimate under the plant model."""
    if plant.kind == "affine":
        out = linear_map(plant.A, est)
        if plant.n_u:
            if u is None:
                raise InvalidInputError("plant expects an input")
            U = u if isinstance(u, HybridZonotope) else point_set(u)
            out = minkowski_sum(out, linear_map(plant.B, U))
        return out
    if plant.n_u:
        if u is None:
            raise InvalidInputError("plant expects an input")
        U = u if isinstance(u, HybridZonotope) else point_set(u)
        stacked = cartesian_product(est, U)
    else:
        stacked = est
    return output_set(plant.phi, stacked)


def measurement_update(prior, consistent, step=None):
    """Intersect the prior with the measurement-consistent set.

    Raises InconsistencyError when the posterior is empty: the plant model
    and the measurement contradict each other.
    """
    if prior.n != consistent.n:
        raise DimensionError("prior/consistent dimension mismatch")
    post = generalized_intersection(prior, np.eye(prior.n), consistent)
    if solver.is_empty(post):
        at = "" if step is None else f" at step {step}"
        raise InconsistencyError(
            f"posterior is empty{at}: measurement contradicts the model",
            step=step)
    return post


def _simulate_measurement(m, x, rng):
    if m.true_fn is None:
        raise InvalidInputError("measurement model needs true_fn to simulate")
    y = np.asarray(m.true_fn(np.asarray(x, dtype=np.float64).reshape(1, -1)),
                   dtype=np.float64).reshape(-1)
    return y + _sample_noise(m, rng)


def _sample_noise(m, rng):
    if m.noise is None:
        return np.zeros(m.phi.n_out)
    Z = m.noise
    xc = rng.uniform(-1.0, 1.0, Z.ng)
    xb = np.where(rng.random(Z.nb) < 0.5, -1.0, 1.0)
    if Z.nc == 0:
        return Z.point(xc, xb)
    pt = solver.find_point(Z)
    if pt is None:
        raise InvalidInputError("noise set is empty")
    return Z.point(pt[0], pt[1])


def _simulate_dynamics(plant, x, u):
    if plant.kind == "affine":
        nxt = plant.A @ x
        if plant.n_u:
            nxt = nxt + plant.B @ np.asarray(u, dtype=np.float64).reshape(-1)
        return nxt
    raise InvalidInputError(
        "simulating the true system requires an affine plant or an explicit "
        "state trajectory")


def run_estimator(plant, meas, X0, inputs, true_x0, *, tol=1e-6,
                  leaf_cap=solver.DEFAULT_LEAF_CAP, count_regions=False,
                  compute_bounds=True, allow_uncertified=False,
                  noise_rng=None, true_states=None):
    """Run the full estimate/measure recursion against a simulated truth.

    Per step: simulate the true state, synthesize the measurement, intersect
    the prior with the measurement-consistent set, then push the posterior
    through the dynamics.  Containment of the true state in every posterior
    is asserted (it is the guarantee the construction provides); violation
    raises InconsistencyError.  Region counting runs as a separate pass so
    update timing stays comparable.
    """
    if not meas.phi.certified and not allow_uncertified:
        raise UncertifiedError(
            "measurement approximation has an uncertified error bound; pass "
            "allow_uncertified=True to accept it")
    if plant.kind == "ioset" and not plant.phi.certified and not allow_uncertified:
        raise UncertifiedError(
            "dynamics approximation has an uncertified error bound; pass "
            "allow_uncertified=True to accept it")
    true_x0 = np.asarray(true_x0, dtype=np.float64).reshape(-1)
    if true_x0.size != plant.n_x:
        raise DimensionError("true_x0 dimension mismatch")
    if noise_rng is None:
        noise_rng = np.random.default_rng(0)
    inputs = [None if u is None else np.asarray(u, dtype=np.float64).reshape(-1)
              for u in inputs]

    # truth trajectory
    if true_states is None:
        xs = [true_x0]
        for u in inputs:
            xs.append(_simulate_dynamics(plant, xs[-1], u))
    else:
        xs = [np.asarray(x, dtype=np.float64).reshape(-1) for x in true_states]
        if len(xs) != len(inputs) + 1:
            raise InvalidInputError("need len(inputs)+1 true states")

    state = EstimatorState(estimate=X0, k=0)
    prior = X0
    for k in range(len(xs)):
        t0 = time.perf_counter()
        if k > 0:
            prior = dynamic_update(plant, state.estimate, inputs[k - 1])
        y = _simulate_measurement(meas, xs[k], noise_rng)
        consistent = measurement_consistent_set(meas, y)
        post = measurement_update(prior, consistent, step=k)
        if not solver.contains_point(post, xs[k], tol=tol):
            raise InconsistencyError(
                f"true state escaped the posterior at step {k}; the "
                "approximation is not a sound over-approximation", step=k)
        t_update = time.perf_counter() - t0
        rec = StepRecord(k=k, prior=prior, posterior=post, y=y,
                         true_state=xs[k], t_update=t_update)
        if compute_bounds:
            t0 = time.perf_counter()
            rec.bounds_lo, rec.bounds_hi = solver.bounds(post)
            rec.t_bounds = time.perf_counter() - t0
        state.estimate = post
        state.k = k
        state.log.append(rec)
    if count_regions:
        for rec in state.log:
            t0 = time.perf_counter()
            rec.region_count, _ = solver.count_regions(rec.posterior,
                                                       cap=leaf_cap)
            rec.t_regions = time.perf_counter() - t0
    return state


# ---------------------------------------------------------------------------
# scenario files


def load_scenario(path, base_dir=None):
    """Parse a scenario JSON file into model objects plus run options.

    Schema: plant (kind affine: A, B | kind ioset: file ref + input_dim),
    measurement (ioset file ref, function name for simulation, optional
    noise box), x0_box, true_x0, inputs (one row per step, null for
    autonomous steps), and optional horizon / true_states (required for
    ioset plants, which cannot be simulated) / tol / leaf_cap /
    count_regions / allow_uncertified overrides.
    """
    import os

    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"invalid scenario JSON: {err}") from err
    base = base_dir if base_dir is not None else os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    try:
        pd = d["plant"]
        if pd["kind"] == "affine":
            plant = PlantModel.affine(pd["A"], pd.get("B"))
        elif pd["kind"] == "ioset":
            plant = PlantModel.from_ioset(load_ioset(resolve(pd["ioset"])),
                                          n_u=int(pd.get("input_dim", 0)))
        else:
            raise InvalidInputError(f"unknown plant kind '{pd['kind']}'")
        md = d["measurement"]
        phi = load_ioset(resolve(md["ioset"]))
        noise = None
        if "noise" in md and md["noise"] is not None:
            noise = interval_box(md["noise"]["lo"], md["noise"]["hi"])
        fn = md.get("function")
        true_fn = _named_function(fn) if fn else None
        meas = MeasurementModel(phi=phi, noise=noise, true_fn=true_fn)
        X0 = interval_box(d["x0_box"]["lo"], d["x0_box"]["hi"])
        true_x0 = np.asarray(d["true_x0"], dtype=np.float64)
        inputs = [None if u is None else np.asarray(u, dtype=np.float64)
                  for u in d.get("inputs", [])]
        horizon = d.get("horizon")
        if horizon is not None:
            inputs = inputs[:int(horizon)]
        true_states = d.get("true_states")
        if true_states is not None:
            true_states = [np.asarray(x, dtype=np.float64) for x in true_states]
        options = {
            "tol": float(d.get("tol", 1e-6)),
            "leaf_cap": int(d.get("leaf_cap", solver.DEFAULT_LEAF_CAP)),
            "count_regions": bool(d.get("count_regions", False)),
            "allow_uncertified": bool(d.get("allow_uncertified", False)),
            "true_states": true_states,
        }
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidInputError(f"malformed scenario: {err}") from err
    return plant, meas, X0, inputs, true_x0, options


def _named_function(name):
    """A callable mapping (m, n_x) points to measurements, for simulation."""
    if name.startswith("net:"):
        from .approx import load_relu
        net = load_relu(name[4:])
        return net.eval
    if name == "identity2":
        return lambda X: np.asarray(X, dtype=np.float64)
    return builtin_handle(name)
