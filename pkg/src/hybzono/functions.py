"""Scalar-valued nonlinear function handles used by the approximation builders.

Evaluators take an (m, arity) array of points and return an (m,) array.
A handle may carry a Lipschitz constant valid on its intended domain; the
error-bound machinery only certifies an approximation when one is present.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["FunctionHandle", "inverse_handle", "square_handle",
           "sources_handle", "SOURCE_LOCATIONS", "builtin_handle"]

# emitter locations for the four-source signal-strength map
SOURCE_LOCATIONS = np.array([
    [1.0, 3.0],
    [-2.0, 2.0],
    [3.0, 0.0],
    [-1.0, -4.0],
])


@dataclass(frozen=True)
class FunctionHandle:
    """A total scalar map on its domain, with optional Lipschitz constant."""

    arity: int
    fn: callable
    lipschitz: float = None
    name: str = "f"

    def __call__(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if self.arity == 1 else X.reshape(1, -1)
        if X.shape[1] != self.arity:
            raise ValueError(f"expected points of arity {self.arity}, "
                             f"got shape {X.shape}")
        out = np.asarray(self.fn(X), dtype=np.float64).reshape(-1)
        if out.size != X.shape[0]:
            raise ValueError("evaluator returned wrong number of values")
        return out


def inverse_handle():
    """y = 1/x; Lipschitz constant 1 is valid on [1, 10] and beyond."""
    return FunctionHandle(arity=1, fn=lambda X: 1.0 / X[:, 0],
                          lipschitz=1.0, name="inv")


def square_handle(lipschitz=None):
    """y = x^2; pass a Lipschitz constant matching the domain of use."""
    return FunctionHandle(arity=1, fn=lambda X: X[:, 0] ** 2,
                          lipschitz=lipschitz, name="square")


def _sources_eval(X):
    out = np.zeros(X.shape[0])
    for s in SOURCE_LOCATIONS:
        d2 = (X[:, 0] - s[0]) ** 2 + (X[:, 1] - s[1]) ** 2
        out += 1.0 / (d2 + 1.0)
    return out


def sources_handle():
    """Summed signal strength of four emitters, 1/(dist^2 + 1) each.

    The gradient magnitude of a single term peaks at 9/(8*sqrt(3)) < 0.65,
    so 2.6 is a valid Euclidean Lipschitz constant for the sum anywhere.
    """
    return FunctionHandle(arity=2, fn=_sources_eval, lipschitz=2.6,
                          name="sources")


def builtin_handle(name):
    table = {
        "inv": inverse_handle,
        "square": lambda: square_handle(lipschitz=None),
        "sources": sources_handle,
    }
    if name not in table:
        raise KeyError(f"unknown builtin function '{name}'")
    return table[name]()
