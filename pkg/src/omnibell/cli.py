"""Command-line driver.

Usage::

    omnibell tensor    --state ghz_mixture --f 0.9
    omnibell criteria  --state ghz_mixture --f 0.45 --format json
    omnibell threshold --state ghz_mixture --criterion plane
    omnibell verify    --state ghz --n 3

Exit codes: 0 success, 1 failed verification or threshold search,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .criteria import CRITERIA, TMAX_MODES, ThresholdError, check_all, threshold
from .maximize import DEFAULT_RESTARTS, DEFAULT_TOL, max_component
from .qcore import build_ghz, ghz_noise_mixture, ghz_with_noise
from .sphereint import (PROJECTION_BOUND, basis_gram, inner_product_EE, midpoint_grid,
                        project_response, project_response_mc, random_sign_of_dot,
                        random_two_caps, sign_of_dot, sphere_quadrature, verify_lhv_bound)
from .tensorlab import correlation_tensor, nonzero_components

STATE_FAMILIES = ("ghz_mixture", "ghz", "ghz_noisy")

EE_TOLERANCE = 1e-7
PROJECTION_TOLERANCE = 1e-3
LHV_TOLERANCE = 1e-6
GRAM_TOLERANCE = 1e-10


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    tolerance: float = DEFAULT_TOL
    output_format: str = "text"
    state: str = "ghz_mixture"
    f: float | None = None
    n: int | None = None
    flip_last: bool = False
    criterion: str | None = None
    tmax_mode: str = "optimized"
    threads: int | None = None

    def state_params(self) -> dict:
        params = {"family": self.state, "n": self.num_qubits()}
        if self.state != "ghz":
            params["f"] = self.visibility()
        if self.state != "ghz_mixture":
            params["flip_last"] = self.flip_last
        return params

    def num_qubits(self) -> int:
        if self.n is not None:
            return self.n
        return 6 if self.state == "ghz_mixture" else 2

    def visibility(self) -> float:
        return 1.0 if self.f is None else self.f


def _validate(cfg: RunConfig):
    if cfg.state not in STATE_FAMILIES:
        raise UsageError(f"unknown state family {cfg.state!r}; choose from {STATE_FAMILIES}")
    if cfg.f is not None and not (0.0 <= cfg.f <= 1.0):
        raise UsageError(f"--f must lie in [0, 1], got {cfg.f}")
    if cfg.state == "ghz" and cfg.f is not None:
        raise UsageError("--f does not apply to the pure ghz family; use ghz_noisy")
    n = cfg.num_qubits()
    if not (2 <= n <= 10):
        raise UsageError(f"--n must lie in [2, 10], got {n}")
    if cfg.state == "ghz_mixture" and cfg.flip_last:
        raise UsageError("--flip-last does not apply to ghz_mixture")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if cfg.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    if not cfg.tolerance > 0:
        raise UsageError("--tol must be positive")


def build_state(cfg: RunConfig):
    n = cfg.num_qubits()
    if cfg.state == "ghz_mixture":
        return ghz_noise_mixture(cfg.visibility(), n)
    if cfg.state == "ghz":
        return build_ghz(n, cfg.flip_last).density()
    return ghz_with_noise(cfg.visibility(), n, cfg.flip_last)


def state_family(cfg: RunConfig):
    """The state as a function of the visibility, other parameters fixed."""
    n = cfg.num_qubits()
    if cfg.state == "ghz_mixture":
        return lambda f: ghz_noise_mixture(f, n)
    return lambda f: ghz_with_noise(f, n, cfg.flip_last)


def _opt_kwargs(cfg):
    return dict(restarts=cfg.restarts, tol=cfg.tolerance, seed=cfg.seed)


def cmd_tensor(cfg: RunConfig) -> tuple[dict, int]:
    """Print the correlation tensor and its summary."""
    tensor = correlation_tensor(build_state(cfg))
    summary = {
        "nonzero_count": tensor.nonzero_count(),
        "frobenius_sq": tensor.frobenius_sq(),
        "max_abs_entry": tensor.max_abs(),
    }
    nonzero = [{"index": list(idx), "value": val} for idx, val in nonzero_components(tensor)]
    return {"summary": summary, "tensor": tensor.to_dict(), "nonzero": nonzero}, 0


def cmd_criteria(cfg: RunConfig) -> tuple[dict, int]:
    """Evaluate the three local-realism conditions."""
    tensor = correlation_tensor(build_state(cfg))
    reports = check_all(tensor, tmax_mode=cfg.tmax_mode, **_opt_kwargs(cfg))
    return {"reports": [r.to_dict() for r in reports]}, 0


def cmd_threshold(cfg: RunConfig) -> tuple[dict, int]:
    """Find the critical visibility for each condition."""
    if cfg.state == "ghz":
        raise UsageError("threshold needs a family with a visibility parameter "
                         "(ghz_mixture or ghz_noisy)")
    ids = [cfg.criterion] if cfg.criterion else list(CRITERIA)
    results = []
    for cid in ids:
        try:
            res = threshold(state_family(cfg), cid, tmax_mode=cfg.tmax_mode,
                            **_opt_kwargs(cfg))
        except ThresholdError as exc:
            return {"error": str(exc), "criterion_id": cid}, 1
        results.append(res.to_dict())
    return {"thresholds": results}, 0


def _check(name, measured, expected, passed, **extra):
    return {"check": name, "measured": measured, "expected": expected,
            "passed": bool(passed), **extra}


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    """Run the numerical checks of the sphere identities."""
    rng = np.random.default_rng(cfg.seed)
    tensor = correlation_tensor(build_state(cfg))
    n = tensor.num_parties
    checks = []

    ee = inner_product_EE(tensor)
    target = (4 * math.pi / 3) ** n * tensor.frobenius_sq()
    resid = abs(ee - target) / (1 + abs(target))
    checks.append(_check("ee_identity", ee, target, resid < EE_TOLERANCE, residual=resid))

    gram = basis_gram(sphere_quadrature(2))
    gerr = float(np.max(np.abs(gram - np.eye(3))))
    checks.append(_check("basis_orthonormality", gerr, 0.0, gerr < GRAM_TOLERANCE))

    grid = midpoint_grid()
    sat = project_response(sign_of_dot([0, 0, 1]), grid).norm
    checks.append(_check("projection_saturation", sat, PROJECTION_BOUND,
                         abs(sat - PROJECTION_BOUND) < PROJECTION_TOLERANCE))

    dot_norms = [project_response(random_sign_of_dot(rng), grid).norm for _ in range(200)]
    checks.append(_check("projection_bound_sign_of_dot", max(dot_norms), PROJECTION_BOUND,
                         max(dot_norms) <= PROJECTION_BOUND + PROJECTION_TOLERANCE,
                         samples=len(dot_norms)))
    cap_norms = [project_response(random_two_caps(rng), grid).norm for _ in range(50)]
    checks.append(_check("projection_bound_two_caps", max(cap_norms), PROJECTION_BOUND,
                         max(cap_norms) <= PROJECTION_BOUND + PROJECTION_TOLERANCE,
                         samples=len(cap_norms)))

    mc, se = project_response_mc(sign_of_dot([0, 0, 1]), seed=cfg.seed)
    quad = np.array(project_response(sign_of_dot([0, 0, 1]), grid).components)
    dev = float(np.max(np.abs(mc - quad) / se))
    checks.append(_check("monte_carlo_crosscheck", dev, 3.0, dev <= 3.0,
                         unit="standard errors"))

    tmax = max_component(tensor, **_opt_kwargs(cfg)).value
    worst = -math.inf
    for _ in range(100):
        responses = [random_sign_of_dot(rng) for _ in range(n)]
        lhs, rhs = verify_lhv_bound(responses, tensor, grid, tmax=tmax)
        worst = max(worst, lhs - rhs)
    checks.append(_check("lhv_bound", worst, 0.0, worst <= LHV_TOLERANCE,
                         t_max=tmax, samples=100, note="measured is max(lhs - rhs)"))

    ok = all(c["passed"] for c in checks)
    return {"checks": checks, "all_passed": ok}, 0 if ok else 1


COMMANDS = {
    "tensor": cmd_tensor,
    "criteria": cmd_criteria,
    "threshold": cmd_threshold,
    "verify": cmd_verify,
}


def _format_text(command, result) -> str:
    lines = []
    if command == "tensor":
        s = result["summary"]
        lines.append(f"nonzero components: {s['nonzero_count']}")
        lines.append(f"sum of squares:     {s['frobenius_sq']:.10g}")
        lines.append(f"max |entry|:        {s['max_abs_entry']:.10g}")
        for item in result["nonzero"][:200]:
            idx = "".join(str(i) for i in item["index"])
            lines.append(f"  T_{idx} = {item['value']:+.10g}")
    elif command == "criteria":
        for r in result["reports"]:
            verdict = "VIOLATED" if r["violated"] else "satisfied"
            lines.append(f"{r['criterion_id']:<12} lhs={r['lhs']:.10g}  "
                         f"rhs={r['rhs']:.10g}  {verdict}")
    elif command == "threshold":
        if "error" in result:
            lines.append(f"{result['criterion_id']}: {result['error']}")
        for r in result.get("thresholds", []):
            flag = f"  [{r['flag']}]" if r["flag"] else ""
            lines.append(f"{r['criterion_id']:<12} critical f = {r['critical_f']:.6f}  "
                         f"({r['method']}, bracket {r['bracket'][0]:.7f}..{r['bracket'][1]:.7f})"
                         f"{flag}")
    elif command == "verify":
        for c in result["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            lines.append(f"[{mark}] {c['check']:<30} measured={c['measured']:.10g}  "
                         f"expected={c['expected']:.10g}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omnibell",
                                     description="Multiqubit Bell-criterion toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", default="ghz_mixture",
                        help=f"state family: {', '.join(STATE_FAMILIES)}")
    common.add_argument("--f", type=float, default=None, help="visibility in [0, 1]")
    common.add_argument("--n", type=int, default=None, help="number of qubits")
    common.add_argument("--flip-last", action="store_true",
                        help="flip the last qubit of the GHZ state")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--threads", type=int, default=None,
                        help="accepted for compatibility; restarts are already vectorized")
    common.add_argument("--criterion", choices=CRITERIA, default=None)
    common.add_argument("--tmax", choices=TMAX_MODES, default="optimized",
                        help="how T_max is obtained (default: optimized over all settings)")
    common.add_argument("--no-timing", action="store_true",
                        help="omit duration_s so JSON output is byte-reproducible")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=func.__doc__)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(seed=args.seed, restarts=args.restarts, tolerance=args.tol,
                    output_format=args.format, state=args.state, f=args.f, n=args.n,
                    flip_last=args.flip_last, criterion=args.criterion,
                    tmax_mode=args.tmax, threads=args.threads)
    start = time.perf_counter()
    try:
        _validate(cfg)
        result, code = COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"omnibell: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output_format == "json":
        payload = {"tool": "omnibell", "version": __version__, "command": args.command,
                   "seed": cfg.seed, "config": {**asdict(cfg), "state_params": cfg.state_params()},
                   "result": result}
        if not args.no_timing:
            payload["duration_s"] = time.perf_counter() - start
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(_format_text(args.command, result))
        if not args.no_timing:
            print(f"({time.perf_counter() - start:.2f} s)")
    return code


if __name__ == "__main__":
    sys.exit(main())
