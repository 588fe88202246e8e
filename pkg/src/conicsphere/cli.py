"""Command-line surface.

Exit codes: 0 success, 1 verification or integration failure, 2 usage error.
Scalars and reports are JSON on stdout; series go to CSV files.  All reals
are printed with 17 significant digits so identical flags give byte-identical
output.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import divisor, levelset, radial, verification
from ._fmt import json_text
from .report import generate_report

__all__ = ["main"]

USAGE_ERROR = 2
CHECK_FAILURE = 1


def _parse_betas(text: str, parser: argparse.ArgumentParser) -> tuple:
    if text is None or not text.strip():
        parser.error("--betas must be a non-empty comma-separated list")
    try:
        betas = tuple(float(v) for v in text.split(","))
    except ValueError:
        parser.error(f"malformed --betas list: {text!r}")
    for b in betas:
        if not -1.0 < b < 0.0:
            parser.error(f"cone order {b} outside (-1, 0)")
    return betas


def _emit(payload: dict) -> None:
    sys.stdout.write(json_text(payload) + "\n")


def _cmd_classify(args, parser) -> int:
    betas = _parse_betas(args.betas, parser)
    if args.eps < 0:
        parser.error("--eps must be non-negative")
    d = divisor.ConicDivisor(betas, includes_infinity=args.infinity)
    c = divisor.classify(d, eps=args.eps)
    _emit({
        "kind": c.kind,
        "witness_index": c.witness_index,
        "lhs": c.lhs,
        "rhs": c.rhs,
        "gbc_total": divisor.gbc_total(d),
    })
    return 0


def _cmd_football(args, parser) -> int:
    if args.sphere and args.beta is not None:
        parser.error("--sphere and --beta are mutually exclusive")
    if not args.sphere:
        if args.beta is None:
            parser.error("one of --beta or --sphere is required")
        if not -1.0 < args.beta < 0.0:
            parser.error(f"cone order {args.beta} outside (-1, 0); "
                         "use --sphere for the smooth case")
    if args.tmax <= 0 or args.tol <= 0:
        parser.error("--tmax and --tol must be positive")

    try:
        if args.sphere:
            p = radial.sphere_profile(t_max=args.tmax)
        else:
            p = radial.football_profile(args.beta, t_max=args.tmax, tol=args.tol)
    except radial.IntegrationError as exc:
        _emit({
            "error": str(exc),
            "t_last": exc.t_last,
            "h_last": exc.h_last,
            "dh_last": exc.dh_last,
        })
        return CHECK_FAILURE

    radial.write_profile_csv(args.out, p)
    asym = radial.measured_asymptotics(p)

    # curvature spot check at deterministic radii in the resolvable window
    from .conformal import sigma_k_curvature
    u = radial.reconstruct_factor(p)
    rng = np.random.default_rng(20)
    t_lo, t_hi = p.resolvable_window(1e-8)
    resid = 0.0
    for _ in range(10):
        x = np.zeros(4)
        x[0] = float(np.exp(rng.uniform(t_lo, t_hi)))
        resid = max(resid, abs(sigma_k_curvature(u, x, 2) - 1.5))

    _emit({
        "csv": str(args.out),
        "beta": p.beta,
        "t_max": p.t_max,
        "slope_minus": asym.slope_minus,
        "slope_plus": asym.slope_plus,
        "beta_zero": asym.beta_zero,
        "beta_infinity": asym.beta_infinity,
        "mean_curvature_ratio": asym.mean_curvature_ratio,
        "first_integral_drift": p.first_integral_drift(),
        "sigma2_residual": resid,
    })
    return 0


def _cmd_levelset(args, parser) -> int:
    try:
        p = radial.read_profile_csv(args.profile)
    except FileNotFoundError:
        parser.error(f"profile CSV not found: {args.profile}")
    except radial.ProfileCsvError as exc:
        parser.error(f"cannot parse profile CSV: {exc}")

    grid = levelset.default_grid(p, n=args.grid_points)
    summaries = [levelset.summary_at(p, float(t)) for t in grid]
    levelset.write_summary_csv(args.out, summaries)
    rep = levelset.relation_report(p, grid)
    _emit({
        "csv": str(args.out),
        "rows": len(summaries),
        "beta": p.beta,
        "max_abs_CA": rep.max_abs_CA,
        "max_abs_AD": rep.max_abs_AD,
        "min_M_slope": rep.min_M_slope,
        "M_spread": rep.M_spread,
        "limit_errors": rep.limit_errors,
    })
    return 0


def _cmd_verify(args, parser) -> int:
    if args.samples < 10 ** 4:
        parser.error("--samples must be at least 1e4")
    results = verification.run_suite(args.suite, seed=args.seed, n_samples=args.samples)
    sys.stdout.write(json_text([r.as_dict() for r in results]) + "\n")
    return 0 if all(r.passed for r in results) else CHECK_FAILURE


def _cmd_report(args, parser) -> int:
    betas = _parse_betas(args.betas, parser)
    manifest = generate_report(args.outdir, betas=betas, t_max=args.tmax, tol=args.tol)
    _emit(manifest)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conicsphere",
        description="Curvature computations for conic 4-spheres: divisor "
                    "classification, radial profiles, level-set identities, "
                    "and the verification gate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="classify a conic divisor")
    p_cls.add_argument("--betas", required=True,
                       help="comma-separated cone orders in (-1, 0)")
    p_cls.add_argument("--eps", type=float, default=1e-9,
                       help="tolerance band for criticality (default 1e-9)")
    p_cls.add_argument("--infinity", action="store_true",
                       help="mark the last entry as the point at infinity")

    p_fb = sub.add_parser("football", help="integrate a radial profile")
    p_fb.add_argument("--beta", type=float, default=None,
                      help="cone order in (-1, 0)")
    p_fb.add_argument("--sphere", action="store_true",
                      help="produce the round-sphere profile instead")
    p_fb.add_argument("--tmax", type=float, default=15.0)
    p_fb.add_argument("--tol", type=float, default=1e-10)
    p_fb.add_argument("--out", default="profile.csv")

    p_ls = sub.add_parser("levelset", help="level-set summary of a profile CSV")
    p_ls.add_argument("--profile", required=True)
    p_ls.add_argument("--out", default="summary.csv")
    p_ls.add_argument("--grid-points", type=int, default=400)

    p_vf = sub.add_parser("verify", help="run a verification suite")
    p_vf.add_argument("--suite", default="all",
                      choices=["all", "symfunc", "conformal", "divisor",
                               "radial", "levelset"])
    p_vf.add_argument("--seed", type=int, default=verification.MC_SEED)
    p_vf.add_argument("--samples", type=int, default=verification.MC_SAMPLES)

    p_rp = sub.add_parser("report", help="write CSV series and figures")
    p_rp.add_argument("--outdir", required=True)
    p_rp.add_argument("--betas", default="-0.2,-0.5,-0.8")
    p_rp.add_argument("--tmax", type=float, default=15.0)
    p_rp.add_argument("--tol", type=float, default=1e-10)

    return parser


def _merge_negative_values(argv):
    # argparse reads "-0.5,-0.5" as an option string; glue values onto the
    # cone-order flags so negative lists survive tokenisation
    merged = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--betas", "--beta") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            merged.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            merged.append(tok)
            i += 1
    return merged


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_negative_values(list(argv)))
    handlers = {
        "classify": _cmd_classify,
        "football": _cmd_football,
        "levelset": _cmd_levelset,
        "verify": _cmd_verify,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args, parser)
    except ValueError as exc:
        parser.exit(USAGE_ERROR, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
