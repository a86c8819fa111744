"""Local-realism conditions on correlation tensors and their noise thresholds.

Three conditions are evaluated:

``two_setting``
    ``max sum_{i in {x,y}^N} T^2 <= 1``.  A *sufficient* condition for a
    local realistic model of two-setting experiments, so "violated" here
    means only that this particular model construction is unavailable.
``plane``
    ``max sum_{i in {x,y}^N} T^2 <= (4/pi)^N T_max(plane)``, necessary for
    rotationally invariant models of settings in local planes.  The
    exponent is written for general N.
``full_sphere``
    ``sum_{i} T^2 <= (3/2)^N T_max``, necessary for rotationally
    invariant models over the whole Bloch sphere.

``T_max`` is the optimizer's maximal correlation by default
(``tmax_mode="optimized"``).  ``tmax_mode="frame_entries"`` instead uses
the largest |entry| of the tensor in the evaluated frame, which is what
one gets by reading ``T_max`` off the canonical components only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .maximize import (DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, DEFAULT_TOL, best_plane,
                       max_component)
from .tensorlab import CorrelationTensor, LocalFrame, correlation_tensor, rotate

__all__ = [
    "CRITERIA",
    "VIOLATION_MARGIN",
    "CriterionReport",
    "ThresholdResult",
    "ThresholdError",
    "check_two_setting",
    "check_plane",
    "check_full_sphere",
    "check",
    "check_all",
    "threshold",
]

CRITERIA = ("two_setting", "plane", "full_sphere")
TMAX_MODES = ("optimized", "frame_entries")
VIOLATION_MARGIN = 1e-9
BRACKET_WIDTH = 1e-6


class ThresholdError(ValueError):
    """The criterion does not switch cleanly from satisfied to violated."""


@dataclass(frozen=True)
class CriterionReport:
    criterion_id: str
    lhs: float
    rhs: float
    violated: bool
    frame_or_directions: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "criterion_id": self.criterion_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violated": self.violated,
            "frame_or_directions": self.frame_or_directions,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class ThresholdResult:
    criterion_id: str
    critical_f: float
    bracket: tuple
    method: str
    flag: str | None = None
    seed: int | None = None
    tmax_mode: str = "optimized"

    def to_dict(self) -> dict:
        return {
            "criterion_id": self.criterion_id,
            "critical_f": self.critical_f,
            "bracket": list(self.bracket),
            "method": self.method,
            "flag": self.flag,
            "seed": self.seed,
            "tmax_mode": self.tmax_mode,
        }


def _report(cid, lhs, rhs, found, diag):
    return CriterionReport(criterion_id=cid, lhs=float(lhs), rhs=float(rhs),
                           violated=bool(lhs > rhs + VIOLATION_MARGIN),
                           frame_or_directions=found, diagnostics=diag)


def _check_mode(tmax_mode):
    if tmax_mode not in TMAX_MODES:
        raise ValueError(f"tmax_mode must be one of {TMAX_MODES}, got {tmax_mode!r}")


def check_two_setting(tensor: CorrelationTensor, *, restarts=DEFAULT_RESTARTS,
                      max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, seed=0,
                      plane=None) -> CriterionReport:
    """Two-setting sufficient condition; ``violated`` means the sum exceeds 1."""
    plane = plane or best_plane(tensor, restarts, max_iters, tol, seed)
    return _report("two_setting", plane.restricted_sum, 1.0,
                   {"frame": plane.frame.to_dict()},
                   {"restarts_used": plane.restarts_used, "iterations": plane.iterations,
                    "converged": plane.converged, "seed": seed})


def check_plane(tensor: CorrelationTensor, *, restarts=DEFAULT_RESTARTS,
                max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, seed=0,
                tmax_mode="optimized", plane=None) -> CriterionReport:
    _check_mode(tmax_mode)
    n = tensor.num_parties
    plane = plane or best_plane(tensor, restarts, max_iters, tol, seed)
    if tmax_mode == "optimized":
        tmax = plane.in_plane_tmax
    else:
        block = rotate(tensor, plane.frame).values[(slice(0, 2),) * n]
        tmax = float(np.max(np.abs(block)))
    rhs = (4 / math.pi) ** n * tmax
    # reported alongside so a gap between in-plane and unrestricted maxima is visible
    full = max_component(tensor, restarts, max_iters, tol, seed).value
    return _report("plane", plane.restricted_sum, rhs,
                   {"frame": plane.frame.to_dict()},
                   {"restarts_used": plane.restarts_used, "iterations": plane.iterations,
                    "converged": plane.converged, "in_plane_tmax": tmax,
                    "unrestricted_tmax": full,
                    "tmax_differs": bool(abs(full - plane.in_plane_tmax) > 1e-6),
                    "tmax_mode": tmax_mode, "seed": seed})


def check_full_sphere(tensor: CorrelationTensor, *, restarts=DEFAULT_RESTARTS,
                      max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, seed=0,
                      tmax_mode="optimized") -> CriterionReport:
    """Full-sphere condition.

    The left-hand side is the plain Frobenius norm squared, which does
    not depend on the local frames, so the maximization over frames is
    trivial.
    """
    _check_mode(tmax_mode)
    n = tensor.num_parties
    lhs = tensor.frobenius_sq()
    if tmax_mode == "optimized":
        res = max_component(tensor, restarts, max_iters, tol, seed)
        tmax = res.value
        found = {"directions": [[d.theta, d.phi] for d in res.directions]}
        diag = {"restarts_used": res.restarts_used, "iterations": res.iterations,
                "converged": res.converged}
    else:
        tmax = tensor.max_abs()
        found = {"index": [int(i) + 1 for i in
                           np.unravel_index(np.argmax(np.abs(tensor.values)),
                                            tensor.values.shape)]}
        diag = {}
    diag.update({"t_max": tmax, "tmax_mode": tmax_mode, "seed": seed})
    return _report("full_sphere", lhs, (1.5) ** n * tmax, found, diag)


def check(tensor: CorrelationTensor, criterion_id: str, **opts) -> CriterionReport:
    if criterion_id == "two_setting":
        opts.pop("tmax_mode", None)
        return check_two_setting(tensor, **opts)
    if criterion_id == "plane":
        return check_plane(tensor, **opts)
    if criterion_id == "full_sphere":
        opts.pop("plane", None)
        return check_full_sphere(tensor, **opts)
    raise ValueError(f"unknown criterion {criterion_id!r}; expected one of {CRITERIA}")


def check_all(tensor: CorrelationTensor, **opts) -> list[CriterionReport]:
    """The three reports in the order two_setting, plane, full_sphere.

    The plane search is shared between the first two.
    """
    plane_opts = {k: opts[k] for k in ("restarts", "max_iters", "tol", "seed") if k in opts}
    plane = best_plane(tensor, **plane_opts)
    return [check(tensor, cid, plane=plane, **opts) for cid in CRITERIA]


def _is_linear_family(family, tol=1e-12):
    t_half = correlation_tensor(family(0.5)).values
    t_one = correlation_tensor(family(1.0)).values
    return bool(np.max(np.abs(t_half - 0.5 * t_one)) <= tol), t_one


def _closed_form(criterion_id, lhs1, rhs1):
    """Crossing of ``f^2 lhs1`` with ``rhs1`` (two_setting) or ``f rhs1`` (others)."""
    if lhs1 <= 0:
        return None
    if criterion_id == "two_setting":
        return math.sqrt(rhs1 / lhs1)
    return rhs1 / lhs1


def threshold(state_family: Callable[[float], object], criterion_id: str, *,
              restarts=DEFAULT_RESTARTS, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL,
              seed=0, tmax_mode="optimized", samples=11) -> ThresholdResult:
    """Critical visibility above which ``criterion_id`` is violated.

    Parameters
    ----------
    state_family : callable
        Maps ``f in [0, 1]`` to a DensityMatrix.
    criterion_id : {'two_setting', 'plane', 'full_sphere'}

    Notes
    -----
    The verdict is sampled on ``samples`` equally spaced points of
    [0, 1] and must switch at most once, from satisfied to violated.
    If the family's tensor is linear in ``f``, the left side scales as
    ``f^2`` and the right side as ``f`` (or stays 1), and the crossing
    is solved in closed form, then confirmed by evaluating the criterion
    on both sides of the returned bracket.  Otherwise the sampled
    crossing is bisected to a bracket of width ``1e-6``.
    """
    if criterion_id not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion_id!r}; expected one of {CRITERIA}")
    _check_mode(tmax_mode)
    opts = dict(restarts=restarts, max_iters=max_iters, tol=tol, seed=seed,
                tmax_mode=tmax_mode)

    def verdict(f):
        return check(correlation_tensor(state_family(f)), criterion_id, **opts)

    grid = np.linspace(0.0, 1.0, samples)
    flags = [verdict(float(f)).violated for f in grid]
    switches = sum(a != b for a, b in zip(flags, flags[1:]))
    if switches > 1 or (switches == 1 and flags[0]):
        raise ThresholdError(f"{criterion_id} verdict is not monotone in f: {flags}")
    common = dict(criterion_id=criterion_id, seed=seed, tmax_mode=tmax_mode)
    if not any(flags):
        return ThresholdResult(critical_f=1.0, bracket=(1.0, 1.0), method="sampling",
                               flag="never_violated", **common)
    if all(flags):
        return ThresholdResult(critical_f=0.0, bracket=(0.0, 0.0), method="sampling",
                               flag="always_violated", **common)

    linear, t_one = _is_linear_family(state_family)
    if linear:
        rep = check(CorrelationTensor(t_one), criterion_id, **opts)
        f_star = _closed_form(criterion_id, rep.lhs, rep.rhs)
        if f_star is not None and 0.0 < f_star < 1.0:
            half = 0.45 * BRACKET_WIDTH  # stays under the width after rounding
            lo, hi = f_star - half, f_star + half
            if not verdict(lo).violated and verdict(hi).violated:
                return ThresholdResult(critical_f=f_star, bracket=(lo, hi),
                                       method="closed_form", **common)

    k = flags.index(True)
    lo, hi = float(grid[k - 1]), float(grid[k])
    while hi - lo > BRACKET_WIDTH:
        mid = 0.5 * (lo + hi)
        if verdict(mid).violated:
            hi = mid
        else:
            lo = mid
    return ThresholdResult(critical_f=0.5 * (lo + hi), bracket=(lo, hi),
                           method="bisection", **common)
