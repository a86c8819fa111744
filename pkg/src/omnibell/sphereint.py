"""Sphere integrals behind the omnidirectional Bell bound, checked numerically.

Three identities are exposed as computations:

* the overlap of a tensor correlation function with itself,
  ``(E, E) = (4 pi / 3)^N sum T^2``;
* the projection of a +-1 response function onto the span of
  ``sqrt(3 / 4 pi) (sin t cos p, sin t sin p, cos t)``, whose length is at
  most ``2 pi sqrt(3 / 4 pi) = sqrt(3 pi)``;
* the overlap of a deterministic local model with a tensor correlation
  function, bounded by ``(2 pi)^N T_max``.

Integrals over a party's sphere are quadrature sums over nodes in
``(cos theta, phi)``.  Products over parties separate, so nothing here
ever needs a 2N-dimensional grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .maximize import max_component
from .qcore import Direction
from .tensorlab import CorrelationTensor

__all__ = [
    "BASIS_NORM",
    "PROJECTION_BOUND",
    "QuadratureRule",
    "ResponseFunction",
    "ProjectionResult",
    "sphere_quadrature",
    "midpoint_grid",
    "basis_gram",
    "inner_product_EE",
    "project_response",
    "project_response_mc",
    "response_moments",
    "lhv_correlation",
    "verify_lhv_bound",
    "sign_of_dot",
    "constant_response",
    "two_caps",
    "random_sign_of_dot",
    "random_two_caps",
]

BASIS_NORM = math.sqrt(3 / (4 * math.pi))
PROJECTION_BOUND = 2 * math.pi * BASIS_NORM  # == sqrt(3 pi)
DENSE_GRID = (400, 800)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integrals ``int dOmega`` over the unit sphere."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        for name in ("theta", "phi", "weights"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.theta.shape == self.phi.shape == self.weights.shape):
            raise ValueError("theta, phi and weights must have equal length")

    def __len__(self):
        return self.weights.shape[0]

    @cached_property
    def cartesian(self) -> np.ndarray:
        """Node unit vectors, shape ``(M, 3)``."""
        st = np.sin(self.theta)
        c = np.column_stack([st * np.cos(self.phi), st * np.sin(self.phi),
                             np.cos(self.theta)])
        c.setflags(write=False)
        return c

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _product_rule(u, wu, phi, wphi, degree):
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    ww = np.outer(wu, wphi)
    return QuadratureRule(np.arccos(np.clip(uu, -1, 1)), pp, ww, degree)


def sphere_quadrature(polynomial_degree: int) -> QuadratureRule:
    """Product Gauss rule exact for polynomials of the given total degree
    in the Cartesian components.

    Gauss-Legendre in ``cos theta`` with ``ceil((d + 1) / 2)`` nodes times
    the equispaced rule in ``phi`` with ``d + 1`` nodes.
    """
    d = int(polynomial_degree)
    if d < 0:
        raise ValueError("polynomial degree must be non-negative")
    n_u = max(1, math.ceil((d + 1) / 2))
    n_phi = d + 1
    u, wu = np.polynomial.legendre.leggauss(n_u)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    return _product_rule(u, wu, phi, np.full(n_phi, 2 * np.pi / n_phi), d)


@lru_cache(maxsize=8)
def midpoint_grid(n_theta: int = DENSE_GRID[0], n_phi: int = DENSE_GRID[1]) -> QuadratureRule:
    """Midpoint rule in ``cos theta`` and ``phi``; for discontinuous integrands.

    The cell edges include ``cos theta = 0`` when ``n_theta`` is even, so
    responses split at the equator are integrated without boundary error.
    """
    du = 2.0 / n_theta
    u = -1 + du * (np.arange(n_theta) + 0.5)
    dphi = 2 * np.pi / n_phi
    phi = dphi * (np.arange(n_phi) + 0.5)
    return _product_rule(u, np.full(n_theta, du), phi, np.full(n_phi, dphi), 1)


def basis_gram(quadrature: QuadratureRule) -> np.ndarray:
    """Gram matrix of the three normalized linear basis functions."""
    b = BASIS_NORM * quadrature.cartesian
    return np.einsum("m,mi,mj->ij", quadrature.weights, b, b)


def inner_product_EE(tensor: CorrelationTensor, quadrature: QuadratureRule | None = None) -> float:
    """``int dOmega_1 ... dOmega_N E^2`` by product quadrature.

    E is multilinear in the per-party unit vectors, so the degree-2 rule
    (the default) integrates E^2 exactly.  E is evaluated at every node
    tuple of the product grid, ``M^N`` values for ``M`` nodes per sphere.
    """
    q = quadrature or sphere_quadrature(2)
    c = q.cartesian
    values = tensor.values
    # evaluate E on the full product grid, one party at a time
    for axis in range(tensor.num_parties):
        values = np.moveaxis(np.tensordot(values, c, axes=([axis], [1])), -1, axis)
    sq = values**2
    for _ in range(tensor.num_parties):
        sq = sq @ q.weights
    return float(sq)


@dataclass(frozen=True)
class ResponseFunction:
    """Deterministic +-1 outcome for every measurement direction.

    ``func`` maps an ``(..., 3)`` array of unit vectors to an array of
    +-1 values; ``descriptor`` identifies the function.
    """

    func: Callable[[np.ndarray], np.ndarray]
    descriptor: dict = field(default_factory=dict)

    def values(self, vectors) -> np.ndarray:
        out = np.asarray(self.func(np.asarray(vectors, dtype=float)))
        if not np.all((out == 1) | (out == -1)):
            raise ValueError("response function produced a value other than +-1")
        return out

    def __call__(self, direction: Direction) -> int:
        return int(self.values(direction.vector[None, :])[0])


def _sign(x):
    # ties at exactly 0 go to +1 so the output stays in {-1, +1}
    return np.where(x >= 0, 1, -1)


def sign_of_dot(axis) -> ResponseFunction:
    """``sign(axis . n)``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    return ResponseFunction(lambda v: _sign(v @ a),
                            {"kind": "sign_of_dot", "axis": a.tolist()})


def constant_response(value: int = 1) -> ResponseFunction:
    if value not in (1, -1):
        raise ValueError("constant response must be +1 or -1")
    return ResponseFunction(lambda v: np.full(v.shape[:-1], value),
                            {"kind": "constant", "value": value})


def two_caps(axis1, half_angle1, axis2, half_angle2) -> ResponseFunction:
    """+1 inside either of two spherical caps, -1 elsewhere."""
    a1 = np.asarray(axis1, dtype=float) / np.linalg.norm(axis1)
    a2 = np.asarray(axis2, dtype=float) / np.linalg.norm(axis2)
    c1, c2 = math.cos(half_angle1), math.cos(half_angle2)

    def f(v):
        return np.where((v @ a1 >= c1) | (v @ a2 >= c2), 1, -1)

    return ResponseFunction(f, {"kind": "two_caps", "axes": [a1.tolist(), a2.tolist()],
                                "half_angles": [half_angle1, half_angle2]})


def _random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_sign_of_dot(rng) -> ResponseFunction:
    return sign_of_dot(_random_unit(rng))


def random_two_caps(rng) -> ResponseFunction:
    return two_caps(_random_unit(rng), rng.uniform(0, np.pi),
                    _random_unit(rng), rng.uniform(0, np.pi))


@dataclass(frozen=True)
class ProjectionResult:
    norm: float
    beta: float
    gamma: float
    components: tuple = ()


def response_moments(response: ResponseFunction, quadrature: QuadratureRule) -> np.ndarray:
    """``int dOmega I(n) n``: the response against the three Cartesian components."""
    c = quadrature.cartesian
    vals = response.values(c).astype(float)
    return (quadrature.weights * vals) @ c


def project_response(response: ResponseFunction,
                     quadrature: QuadratureRule | None = None) -> ProjectionResult:
    """Length and direction angles of a response's projection onto the
    linear functions on the sphere.

    The three projections are ``norm * (sin b cos g, sin b sin g, cos b)``.
    Defaults to the dense midpoint grid, since responses are discontinuous.
    """
    q = quadrature or midpoint_grid()
    p = BASIS_NORM * response_moments(response, q)
    norm = float(np.linalg.norm(p))
    if norm == 0.0:
        return ProjectionResult(0.0, 0.0, 0.0, tuple(p))
    beta = float(np.arccos(np.clip(p[2] / norm, -1.0, 1.0)))
    if math.hypot(p[0], p[1]) <= 1e-12 * norm:
        gamma = 0.0  # projection along the pole; azimuth undefined
    else:
        gamma = float(np.arctan2(p[1], p[0]) % (2 * np.pi))
    return ProjectionResult(norm, beta, gamma, tuple(float(x) for x in p))


def project_response_mc(response: ResponseFunction, samples: int = 10**6, seed: int = 0):
    """Monte Carlo estimate of the three projections.

    Returns ``(projections, standard_errors)``, each of shape ``(3,)``.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((samples, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = 4 * np.pi * BASIS_NORM * response.values(v)[:, None] * v
    return f.mean(axis=0), f.std(axis=0, ddof=1) / math.sqrt(samples)


def lhv_correlation(responses: Sequence[ResponseFunction],
                    directions: Sequence[Direction]) -> int:
    """Product of the parties' predetermined outcomes for one hidden state."""
    if len(responses) != len(directions):
        raise ValueError("need one direction per response")
    out = 1
    for r, d in zip(responses, directions):
        out *= r(d)
    return out


def verify_lhv_bound(responses: Sequence[ResponseFunction], tensor: CorrelationTensor,
                     quadrature: QuadratureRule | None = None, *, tmax: float | None = None,
                     seed: int = 0):
    """Overlap of one deterministic local model with the tensor's correlations.

    Returns ``(lhs, rhs)`` with ``lhs = int prod_j I_j(n_j) E(n_1..n_N)``
    and ``rhs = (2 pi)^N T_max``.  The integrand separates, so ``lhs`` is
    the tensor contracted with each party's response moments.  Pass
    ``tmax`` to reuse a known maximal correlation.
    """
    n = tensor.num_parties
    if len(responses) != n:
        raise ValueError(f"need {n} responses for a {n}-party tensor, got {len(responses)}")
    q = quadrature or midpoint_grid()
    lhs = tensor.values
    for r in reversed(responses):
        lhs = lhs @ response_moments(r, q)
    if tmax is None:
        tmax = max_component(tensor, seed=seed).value
    return float(lhs), (2 * math.pi) ** n * float(tmax)
