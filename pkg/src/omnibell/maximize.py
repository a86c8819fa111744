"""Optimizers for the maximal correlation and the best measurement planes.

``max_component`` finds the largest value of the multilinear form
``T . (v1 x ... x vN)`` over unit vectors with higher-order power
iteration.  ``best_plane`` finds the local planes maximizing the sum of
squared in-plane entries by exact coordinate ascent on the plane
normals.  All restarts run side by side as one batch, so a result is a
deterministic function of the tensor and the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qcore import Direction
from .tensorlab import (CorrelationTensor, LocalFrame, component, restrict_to_plane,
                        rotate)

__all__ = [
    "DEFAULT_RESTARTS",
    "DEFAULT_MAX_ITERS",
    "DEFAULT_TOL",
    "MonotonicityError",
    "MaxComponentResult",
    "PlaneOptResult",
    "power_iteration",
    "max_component",
    "best_plane",
]

DEFAULT_RESTARTS = 64
DEFAULT_MAX_ITERS = 500
DEFAULT_TOL = 1e-10
# allowed per-sweep decrease caused purely by rounding
_MONOTONE_SLACK = 1e-12


class MonotonicityError(RuntimeError):
    """An ascent sweep decreased the objective."""


@dataclass(frozen=True)
class MaxComponentResult:
    value: float
    directions: list
    restarts_used: int
    converged: bool
    iterations: int = 0
    seed: int | None = None
    vectors: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "directions": [[d.theta, d.phi] for d in self.directions],
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "iterations": self.iterations,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class PlaneOptResult:
    frame: LocalFrame
    restricted_sum: float
    in_plane_tmax: float
    restarts_used: int
    converged: bool = True
    iterations: int = 0
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "frame": self.frame.to_dict(),
            "restricted_sum": self.restricted_sum,
            "in_plane_tmax": self.in_plane_tmax,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "iterations": self.iterations,
            "seed": self.seed,
        }


def _normalize_rows(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _contract_except(values, vecs, skip):
    """Batched contraction of ``values`` with every party's vector except ``skip``.

    ``vecs`` is a list of ``(R, d)`` arrays; returns shape ``(R, d)``.
    """
    n = values.ndim
    r = vecs[0].shape[0]
    out = np.broadcast_to(values, (r,) + values.shape)
    # peel parties after `skip` off the back, then parties before it off the front
    for k in range(n - 1, skip, -1):
        out = np.einsum("r...k,rk->r...", out, vecs[k])
    for k in range(skip):
        out = np.einsum("rk...,rk->r...", out, vecs[k])
    return out


def _objective(values, vecs):
    g = _contract_except(values, vecs, values.ndim - 1)
    return np.einsum("rk,rk->r", g, vecs[-1])


def power_iteration(values, starts, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL,
                    history=None):
    """Run alternating power sweeps from a batch of starting points.

    Parameters
    ----------
    values : ndarray, shape (d,)*N
        Real tensor.
    starts : list of ndarray
        One ``(R, d)`` array per party of unit starting vectors.
    max_iters : int
        Maximal number of full sweeps.
    tol : float
        A run stops once a sweep raises its objective by less than ``tol``.
    history : list, optional
        If given, the per-sweep objective arrays are appended to it.

    Returns
    -------
    vecs : list of ndarray
        Final vectors per party, each ``(R, d)``.
    objective : ndarray, shape (R,)
    converged : ndarray of bool, shape (R,)
    sweeps : int
        Number of sweeps performed.
    """
    values = np.asarray(values, dtype=float)
    n = values.ndim
    vecs = [np.array(s, dtype=float) for s in starts]
    obj = _objective(values, vecs)
    if history is not None:
        history.append(obj.copy())
    converged = np.zeros(obj.shape, dtype=bool)
    sweeps = 0
    scale = max(1.0, float(np.max(np.abs(values))))
    for sweeps in range(1, max_iters + 1):
        active = ~converged
        for j in range(n):
            g = _contract_except(values, vecs, j)
            if not np.all(np.isfinite(g)):
                raise FloatingPointError("NaN/inf in tensor contraction")
            norm = np.linalg.norm(g, axis=1)
            # a zero contraction leaves the objective at 0 for any vector; keep it
            update = active & (norm > 0)
            vecs[j][update] = g[update] / norm[update, None]
        new = _objective(values, vecs)
        if np.any(new < obj - _MONOTONE_SLACK * scale):
            worst = float(np.max(obj - new))
            raise MonotonicityError(f"power sweep decreased the objective by {worst:.3e}")
        if history is not None:
            history.append(new.copy())
        converged |= (new - obj) < tol
        obj = new
        if converged.all():
            break
    return vecs, obj, converged, sweeps


def _canonical_starts(values, count):
    """Axis tuples of the ``count`` largest-|T| entries, sign-fixed to be positive."""
    flat = values.reshape(-1)
    nz = np.flatnonzero(flat)
    order = nz[np.argsort(-np.abs(flat[nz]), kind="stable")][:count]
    n, d = values.ndim, values.shape[0]
    starts = [np.zeros((len(order), d)) for _ in range(n)]
    for row, flat_idx in enumerate(order):
        idx = np.unravel_index(flat_idx, values.shape)
        for j in range(n):
            starts[j][row, idx[j]] = 1.0
        if flat[flat_idx] < 0:
            starts[0][row] *= -1.0
    return starts


def _random_starts(rng, restarts, n, d):
    return [_normalize_rows(rng.standard_normal((restarts, d))) for _ in range(n)]


def _best_of_runs(values, restarts, max_iters, tol, rng, history=None):
    n, d = values.ndim, values.shape[0]
    starts = _random_starts(rng, restarts, n, d)
    canon = _canonical_starts(values, restarts)
    if canon[0].shape[0]:
        starts = [np.vstack([s, c]) for s, c in zip(starts, canon)]
    vecs, obj, conv, sweeps = power_iteration(values, starts, max_iters, tol, history)
    best = int(np.argmax(obj))
    return [v[best] for v in vecs], float(obj[best]), bool(conv[best]), sweeps, len(obj)


def max_component(tensor: CorrelationTensor, restarts: int = DEFAULT_RESTARTS,
                  max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL,
                  seed: int = 0, history: list | None = None) -> MaxComponentResult:
    """Largest correlation over all product settings.

    Runs power iteration from ``restarts`` random unit-vector tuples plus
    up to ``restarts`` axis-aligned tuples seeded at the largest-|T|
    entries, and keeps the best run (lowest start index wins ties).
    The signed component is maximized; since flipping one party's
    vector negates it, this equals the maximum of its absolute value.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    values = tensor.values
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("tensor contains NaN or inf")
    rng = np.random.default_rng(seed)
    vecs, _, conv, sweeps, used = _best_of_runs(values, restarts, max_iters, tol, rng, history)
    directions = [Direction.from_vector(v) if np.linalg.norm(v) > 0 else Direction(0.0, 0.0)
                  for v in vecs]
    value = component(tensor, directions)
    return MaxComponentResult(value=value, directions=directions, restarts_used=used,
                              converged=conv, iterations=sweeps, seed=seed,
                              vectors=[np.array(v) for v in vecs])


def _plane_objective(values, normals):
    # ||T x_1 P_1 ... x_N P_N||^2 with P_j = Id - a_j a_j^T
    out = np.broadcast_to(values, (normals[0].shape[0],) + values.shape)
    for k, a in enumerate(normals):
        proj = np.eye(3)[None] - np.einsum("ri,rj->rij", a, a)
        out = np.moveaxis(np.einsum("r...i,rij->r...j", np.moveaxis(out, k + 1, -1), proj),
                          -1, k + 1)
    return np.sum(out.reshape(out.shape[0], -1) ** 2, axis=1)


def _plane_sweeps(values, normals, max_iters, tol):
    n = values.ndim
    normals = [np.array(a) for a in normals]
    r = normals[0].shape[0]
    obj = _plane_objective(values, normals)
    converged = np.zeros(r, dtype=bool)
    scale = max(1.0, float(np.sum(values**2)))
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        for j in range(n):
            # G = T projected on every party but j; objective = tr(P_j M), M = G_(j) G_(j)^T
            g = np.broadcast_to(values, (r,) + values.shape)
            for k in range(n):
                if k == j:
                    continue
                proj = np.eye(3)[None] - np.einsum("ri,rj->rij", normals[k], normals[k])
                g = np.moveaxis(np.einsum("r...i,rij->r...j", np.moveaxis(g, k + 1, -1), proj),
                                -1, k + 1)
            gj = np.moveaxis(g, j + 1, 1).reshape(r, 3, -1)
            m = np.einsum("rik,rjk->rij", gj, gj)
            if not np.all(np.isfinite(m)):
                raise FloatingPointError("NaN/inf in plane optimization")
            _, vecs = np.linalg.eigh(m)
            # the best normal is the eigenvector of the smallest eigenvalue; keep the
            # current one when it is already optimal to avoid flapping between ties
            cand = vecs[:, :, 0]
            cur = normals[j]
            cur_val = np.einsum("ri,rij,rj->r", cur, m, cur)
            cand_val = np.einsum("ri,rij,rj->r", cand, m, cand)
            take = (cand_val < cur_val - 1e-15 * scale) & ~converged
            normals[j][take] = cand[take]
        new = _plane_objective(values, normals)
        if np.any(new < obj - _MONOTONE_SLACK * scale):
            raise MonotonicityError("plane sweep decreased the objective")
        converged |= (new - obj) < tol
        obj = new
        if converged.all():
            break
    return normals, obj, converged, sweeps


def best_plane(tensor: CorrelationTensor, restarts: int = DEFAULT_RESTARTS,
               max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL,
               seed: int = 0) -> PlaneOptResult:
    """Local measurement planes maximizing the in-plane squared-entry sum.

    Only each party's plane normal matters, so the search runs over
    normals: with all other parties fixed, the optimal normal is the
    eigenvector of a 3x3 matrix with the smallest eigenvalue.  Starts are
    the three common coordinate planes (normals all x, all y, all z) plus
    ``restarts`` random normal tuples.  The all-z start is the identity
    frame, so the result never falls below the unrotated sum.

    The in-plane maximal correlation of the winning frame is then found
    by power iteration on the x-y block of the rotated tensor.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    values = tensor.values
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("tensor contains NaN or inf")
    n = tensor.num_parties
    rng = np.random.default_rng(seed)
    fixed = np.eye(3)[[2, 0, 1]]
    starts = [np.vstack([fixed, _normalize_rows(rng.standard_normal((restarts, 3)))])
              for _ in range(n)]
    normals, obj, conv, sweeps = _plane_sweeps(values, starts, max_iters, tol)
    best = int(np.argmax(obj))
    frame = LocalFrame.from_plane_normals([a[best] for a in normals])
    rotated = rotate(tensor, frame)
    restricted = restrict_to_plane(rotated)

    block = rotated.values[(slice(0, 2),) * n]
    if np.any(block):
        _, tmax, _, _, _ = _best_of_runs(block, restarts, max_iters, tol, rng)
    else:
        tmax = 0.0
    return PlaneOptResult(frame=frame, restricted_sum=restricted, in_plane_tmax=tmax,
                          restarts_used=len(obj), converged=bool(conv[best]),
                          iterations=sweeps, seed=seed)
