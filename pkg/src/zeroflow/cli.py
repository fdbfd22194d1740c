"""Command-line front end: solve, flow, verify, rate, and bench.

Exit codes: 0 success, 1 usage or malformed input, 2 numerical failure,
3 verification rejected (not an equilibrium).  Numbers are serialized with
17 significant digits so results round-trip exactly; identical arguments
and seeds produce byte-identical output apart from the manifest timestamp.
The ZEROFLOW_LOG environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .equilibrium import Configuration, newton_solve, residual, verify_theorem1
from .errors import ZeroflowError
from .flow import (
    FlowOptions,
    InitStrategy,
    TerminationReason,
    convergence_options,
    default_init,
    estimate_rate,
    integrate,
    recommended_stride,
)
from .operator_core import (
    ClassicalFamily,
    Domain,
    EquationSpec,
    FamilyTag,
    eigenvalue,
    eigenvalue_gap,
    make_classical,
)
from .spectral import oracle_zeros

log = logging.getLogger("zeroflow")

_USAGE_EXIT = 1
_NUMERIC_EXIT = 2
_NOT_EQUILIBRIUM_EXIT = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run bit-for-bit with the same build."""

    spec: dict
    n: int
    method: str
    options: dict
    seed: int | None
    version: str
    timestamp: str

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for
    # numerical failures and uses 1 for usage problems
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_USAGE_EXIT)


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--family",
        choices=[t.value for t in FamilyTag],
        help="classical family (alternative to raw --p/--q)",
    )
    p.add_argument("--alpha", type=float, help="Jacobi/Laguerre parameter")
    p.add_argument("--beta", type=float, help="Jacobi parameter")
    p.add_argument("--p", help="p coefficients, ascending: p0,p1,p2")
    p.add_argument("--q", help="q coefficients, ascending: q0,q1")
    p.add_argument("--domain", help="open interval lo,hi ('-inf'/'inf' allowed)")


def _parse_floats(text: str, count_max: int, what: str) -> list[float]:
    parts = [s.strip() for s in text.split(",")]
    if not 1 <= len(parts) <= count_max:
        raise ValueError(f"{what} takes 1..{count_max} comma-separated numbers")
    return [float(s) for s in parts]


def _default_domain(p2: float, p1: float, p0: float) -> Domain:
    """Widest interval on which p > 0; raises if that is ambiguous."""
    if p2 == 0.0 and p1 == 0.0:
        if p0 > 0:
            return Domain(-math.inf, math.inf)
        raise ValueError("p is a nonpositive constant; pass --domain explicitly")
    if p2 == 0.0:
        r = -p0 / p1
        return Domain(r, math.inf) if p1 > 0 else Domain(-math.inf, r)
    disc = p1 * p1 - 4.0 * p2 * p0
    if disc <= 0.0:
        if p2 > 0:
            return Domain(-math.inf, math.inf)
        raise ValueError("p < 0 everywhere; pass --domain explicitly")
    s = math.sqrt(disc)
    r1, r2 = sorted(((-p1 - s) / (2 * p2), (-p1 + s) / (2 * p2)))
    if p2 < 0:
        return Domain(r1, r2)
    raise ValueError(
        "p > 0 on two unbounded intervals; pass --domain explicitly"
    )


def _build_spec(args) -> tuple[EquationSpec, dict]:
    if args.family and (args.p or args.q):
        raise ValueError("give either --family or raw --p/--q, not both")
    if args.family:
        if args.domain:
            raise ValueError("--domain cannot override a classical family")
        tag = FamilyTag(args.family)
        if tag is FamilyTag.JACOBI:
            if args.alpha is None or args.beta is None:
                raise ValueError("jacobi requires --alpha and --beta")
            fam = ClassicalFamily.jacobi(args.alpha, args.beta)
        elif tag is FamilyTag.LAGUERRE:
            fam = ClassicalFamily.laguerre(
                0.0 if args.alpha is None else args.alpha
            )
        else:
            if args.alpha is not None or args.beta is not None:
                raise ValueError(f"{tag.value} takes no parameters")
            fam = ClassicalFamily(tag)
        desc: dict = {"family": tag.value}
        if fam.alpha is not None:
            desc["alpha"] = fam.alpha
        if fam.beta is not None:
            desc["beta"] = fam.beta
        return make_classical(fam), desc
    if not args.p or not args.q:
        raise ValueError("need --family, or both --p and --q")
    pc = _parse_floats(args.p, 3, "--p") + [0.0, 0.0]
    qc = _parse_floats(args.q, 2, "--q") + [0.0]
    p0, p1, p2 = pc[0], pc[1], pc[2]
    q0, q1 = qc[0], qc[1]
    if args.domain:
        ends = _parse_floats(args.domain, 2, "--domain")
        if len(ends) != 2:
            raise ValueError("--domain takes exactly two numbers: lo,hi")
        dom = Domain(ends[0], ends[1])
    else:
        dom = _default_domain(p2, p1, p0)
    spec = EquationSpec(p2, p1, p0, q1, q0, dom)
    desc = {
        "p": [p0, p1, p2],
        "q": [q0, q1],
        "domain": [dom.lower, dom.upper],
    }
    return spec, desc


def _manifest(spec_desc, n, method, options, seed) -> RunManifest:
    return RunManifest(
        spec=spec_desc,
        n=n,
        method=method,
        options=options,
        seed=seed,
        version=__version__,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solve_json(zeros, lam, rnorm, manifest) -> str:
    payload = {
        "zeros": [float(z) for z in zeros],
        "lambda": float(lam),
        "residual_norm": float(rnorm),
        "manifest": manifest.to_dict(),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cmd_solve(args) -> int:
    spec, desc = _build_spec(args)
    n = args.n
    seed = args.seed
    opts_desc = {"tol": args.tol, "t_max": args.t_max, "init": args.init}
    if args.method == "spectral":
        config = oracle_zeros(spec, n)
    elif args.method == "newton":
        start = default_init(spec, n, args.init, seed)
        config = newton_solve(spec, start, tol=args.tol, max_iter=args.max_iter)
    else:
        start = default_init(spec, n, args.init, seed)
        traj = integrate(spec, start, convergence_options(n, args.t_max, args.tol))
        if traj.terminated_by is not TerminationReason.CONVERGED:
            log.error("flow terminated by %s", traj.terminated_by.value)
            return _NUMERIC_EXIT
        config = traj.final.config
    rnorm = float(np.max(np.abs(residual(spec, config))))
    manifest = _manifest(desc, n, args.method, opts_desc, seed)
    _emit(
        _solve_json(config.points, eigenvalue(spec, n), rnorm, manifest),
        args.output,
    )
    return 0


def cmd_flow(args) -> int:
    spec, desc = _build_spec(args)
    n = args.n
    start = default_init(spec, n, args.init, args.seed)
    stride = args.stride if args.stride else recommended_stride(n)
    opts = dataclasses.replace(
        convergence_options(n, args.t_max, args.tol), snapshot_stride=stride
    )
    traj = integrate(spec, start, opts)
    lines = ["t," + ",".join(f"x{i}" for i in range(1, n + 1))]
    for snap in traj.snapshots:
        lines.append(
            ",".join([_fmt(snap.t)] + [_fmt(x) for x in snap.config.points])
        )
    _emit("\n".join(lines) + "\n", args.output)
    if traj.terminated_by.is_error:
        log.error("flow terminated by %s", traj.terminated_by.value)
        return _NUMERIC_EXIT
    return 0


def cmd_verify(args) -> int:
    spec, _ = _build_spec(args)
    try:
        with open(args.points_file, encoding="utf-8") as fh:
            pts = [float(line) for line in fh if line.strip()]
        config = Configuration(tuple(pts))
    except (OSError, ValueError) as exc:
        print(f"malformed points file: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    report = verify_theorem1(spec, config, tol=args.tol)
    print(f"n               : {config.n}")
    print(f"lambda          : {_fmt(report.lambda_recovered)}")
    print(f"residual_norm   : {_fmt(report.residual_norm)}")
    print(f"operator_defect : {_fmt(report.operator_defect)}")
    print(f"equilibrium     : {report.is_equilibrium} (tol {args.tol:g})")
    return 0 if report.is_equilibrium else _NOT_EQUILIBRIUM_EXIT


def cmd_rate(args) -> int:
    spec, desc = _build_spec(args)
    n = args.n
    gap = eigenvalue_gap(spec, n)
    if gap <= 0:
        log.error("nonpositive eigenvalue gap; no rate claim for this spec")
        return _NUMERIC_EXIT
    t_max = args.t_max if args.t_max else min(200.0, max(5.0, 40.0 / gap))
    start = default_init(spec, n, args.init, args.seed)
    opts = FlowOptions(
        t_max=t_max,
        residual_tol=args.tol,
        snapshot_stride=1,
        rel_tol=1e-11,
        abs_tol=1e-13,
    )
    traj = integrate(spec, start, opts)
    if traj.terminated_by is not TerminationReason.CONVERGED:
        log.error("flow terminated by %s", traj.terminated_by.value)
        return _NUMERIC_EXIT
    report = estimate_rate(traj, oracle_zeros(spec, n))
    manifest = _manifest(
        desc, n, "rate", {"t_max": t_max, "tol": args.tol, "init": args.init},
        args.seed,
    )
    payload = {
        "sigma_hat": report.sigma_hat,
        "theoretical_gap": report.theoretical_gap,
        "fit_window": list(report.fit_window),
        "fit_quality": report.fit_quality,
        "manifest": manifest.to_dict(),
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def cmd_bench(args) -> int:
    spec, _ = _build_spec(args)
    n_list = [int(s) for s in args.n_list.split(",")]
    methods = [s.strip() for s in args.methods.split(",")]
    rows = ["n,method,wall_time_seconds,final_residual,agreement_vs_spectral"]
    for n in n_list:
        reference = oracle_zeros(spec, n).as_array()
        for method in methods:
            t0 = time.perf_counter()
            config = None
            try:
                if method == "spectral":
                    oracle_zeros.cache_clear()
                    config = oracle_zeros(spec, n)
                elif method == "newton":
                    config = newton_solve(
                        spec, default_init(spec, n), tol=1e-10, max_iter=200
                    )
                elif method == "flow":
                    gap = max(eigenvalue_gap(spec, n), 1e-6)
                    opts = convergence_options(n, 10.0 + 50.0 / gap, 1e-9)
                    traj = integrate(spec, default_init(spec, n), opts)
                    if traj.terminated_by is TerminationReason.CONVERGED:
                        config = traj.final.config
                else:
                    raise ValueError(f"unknown method {method!r}")
            except ZeroflowError as exc:
                log.warning("bench %s n=%d failed: %s", method, n, exc)
            wall = time.perf_counter() - t0
            if config is None:
                rows.append(f"{n},{method},{_fmt(wall)},nan,nan")
                continue
            rnorm = float(np.max(np.abs(residual(spec, config))))
            agree = float(np.max(np.abs(config.as_array() - reference)))
            rows.append(
                f"{n},{method},{_fmt(wall)},{_fmt(rnorm)},{_fmt(agree)}"
            )
    _emit("\n".join(rows) + "\n", args.output)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="zeroflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="compute eigenpolynomial zeros")
    _add_spec_args(ps)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument(
        "--method", choices=["flow", "newton", "spectral"], default="spectral"
    )
    ps.add_argument("--tol", type=float, default=1e-10)
    ps.add_argument("--t-max", type=float, default=80.0, dest="t_max")
    ps.add_argument("--max-iter", type=int, default=200, dest="max_iter")
    ps.add_argument(
        "--init",
        choices=[s.value for s in InitStrategy],
        default=InitStrategy.EQUISPACED.value,
    )
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--output", default=None)
    ps.set_defaults(func=cmd_solve)

    pf = sub.add_parser("flow", help="emit a CSV particle trajectory")
    _add_spec_args(pf)
    pf.add_argument("--n", type=int, required=True)
    pf.add_argument("--t-max", type=float, required=True, dest="t_max")
    pf.add_argument("--tol", type=float, default=1e-9)
    pf.add_argument(
        "--init",
        choices=[s.value for s in InitStrategy],
        default=InitStrategy.EQUISPACED.value,
    )
    pf.add_argument("--seed", type=int, default=None)
    pf.add_argument("--stride", type=int, default=None)
    pf.add_argument("--output", default=None)
    pf.set_defaults(func=cmd_flow)

    pv = sub.add_parser("verify", help="check a points file for equilibrium")
    _add_spec_args(pv)
    pv.add_argument("points_file", help="one coordinate per line, increasing")
    pv.add_argument("--tol", type=float, default=1e-9)
    pv.set_defaults(func=cmd_verify)

    pr = sub.add_parser("rate", help="fit the exponential convergence rate")
    _add_spec_args(pr)
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--t-max", type=float, default=None, dest="t_max")
    pr.add_argument("--tol", type=float, default=1e-10)
    pr.add_argument(
        "--init",
        choices=[s.value for s in InitStrategy],
        default=InitStrategy.SEEDED.value,
    )
    pr.add_argument("--seed", type=int, default=1)
    pr.add_argument("--output", default=None)
    pr.set_defaults(func=cmd_rate)

    pb = sub.add_parser("bench", help="wall-time and accuracy table")
    _add_spec_args(pb)
    pb.add_argument("--n-list", default="10,20,50", dest="n_list")
    pb.add_argument("--methods", default="flow,newton,spectral")
    pb.add_argument("--output", default=None)
    pb.set_defaults(func=cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("ZEROFLOW_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, ZeroflowError) as exc:
        kind = (
            _NUMERIC_EXIT if isinstance(exc, ZeroflowError) else _USAGE_EXIT
        )
        print(f"error: {exc}", file=sys.stderr)
        return kind


if __name__ == "__main__":
    sys.exit(main())
