"""Command-line front end.

Subcommands: solve (spectrum -> archive), tables (paired-solve comparison
CSV), counting (counting-function profiles and exponent estimates),
periodicity (identity verification plus gluing checks).  Exit codes:
0 success, 2 configuration error, 3 solver failure, 4 cap error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .archive import (
    config_digest,
    dump_archive,
    request_payload,
    table_payload,
    write_archive,
)
from .counting import (
    cauchy_gap,
    counting_function,
    dimension_analytic,
    estimate_D,
    log_period,
    profile_mismatch_fraction,
    sigma_profile,
)
from .errors import (
    CantorBeamError,
    CapError,
    ConfigError,
    DomainError,
    ResourceError,
    SolverError,
)
from .gluing import (
    boundary_defect,
    cubic_pair_configs,
    glue_cubic,
    glue_quadratic,
    glued_residual,
    quadratic_pair_configs,
    verify_identity,
)
from .goldens import golden_for
from .measure import make_weight
from .shooting import BVPConfig, SolverOptions, spectrum

TABLE_ACCURACY = 1e-3  # demonstrated relative accuracy of the default grid


def _add_weight_args(p: argparse.ArgumentParser):
    p.add_argument("--kappa", type=int, default=2, help="number of affine copies (>= 2)")
    p.add_argument("--a", default="1/3", help="copy scale as an exact rational, e.g. 1/3")


def _add_solver_args(p: argparse.ArgumentParser):
    p.add_argument("--grid-gen", type=int, default=10, help="cell generation of the grid")
    p.add_argument("--substeps", type=int, default=4, help="steps per elementary interval")
    p.add_argument("--tol", type=float, default=1e-8, help="relative bisection tolerance")
    p.add_argument("--scan-ratio", type=float, default=1.15, help="geometric scan ratio")
    p.add_argument("--lambda-min", type=float, default=1e-3, help="scan start")


def _weight(args):
    try:
        a = Fraction(args.a)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse --a {args.a!r} as a rational") from exc
    return make_weight(args.kappa, a)


def _options(args, tol: float | None = None) -> SolverOptions:
    return SolverOptions(
        generation=args.grid_gen,
        substeps=args.substeps,
        tol=args.tol if tol is None else tol,
        scan_ratio=args.scan_ratio,
        lambda_min=args.lambda_min,
    )


def _print_table(table):
    print("    n  lambda                 zeros  det_residual  rayleigh_gap")
    for p in table.pairs:
        print(
            f"  {p.index:3d}  {p.lam!r:<22} {p.zero_count:5d}  "
            f"{p.det_residual:.3e}     {p.rayleigh_gap:.3e}"
        )


def cmd_solve(args) -> int:
    w = _weight(args)
    cfg = BVPConfig(args.alpha, args.beta)
    opts = _options(args)
    if args.n_max is not None and args.lambda_max is not None:
        raise ConfigError("give only one of --n-max / --lambda-max")
    n_max = args.n_max if args.n_max is not None or args.lambda_max is not None else 4
    table = spectrum(cfg, w, n_max=n_max, lambda_max=args.lambda_max, options=opts)
    request = request_payload(w, cfg, opts, n_max, args.lambda_max)
    out = args.out or f"spectrum_{config_digest(request)[:12]}.json"
    write_archive(out, table, n_max=n_max, lambda_max=args.lambda_max)
    _print_table(table)
    print(f"archive: {out}")
    return 0


def _pair_tables(args, mode: str):
    w = _weight(args)
    small_cfg, big_cfg = (
        quadratic_pair_configs(w) if mode == "quadratic" else cubic_pair_configs(w)
    )
    opts = _options(args)
    n_max = args.n_max
    big_n = w.kappa * n_max if mode == "quadratic" else w.kappa * (n_max + 1) - 1
    small = spectrum(small_cfg, w, n_max=n_max, options=opts)
    big = spectrum(big_cfg, w, n_max=big_n, options=opts)
    return w, small, big


def cmd_tables(args) -> int:
    mode = args.mode
    w, small, big = _pair_tables(args, mode)
    report = verify_identity(big, small, mode, tolerance=args.tolerance)
    lines = ["n,mu,scaled_mu,lambda_mapped,deviation"]
    for r in report.rows:
        lines.append(f"{r.n},{r.mu!r},{r.scaled_mu!r},{r.big_lambda!r},{r.deviation!r}")
    out = args.out or f"tables_{mode}.csv"
    Path(out).write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(report.rows)} rows, max deviation {report.max_deviation:.3e})")

    golden = golden_for(small.config.alpha, small.config.beta)
    if golden is not None:
        for p in small.pairs:
            ref = golden.get(p.index)
            if ref is None:
                continue
            value, unc = ref
            ok = abs(p.lam - value) <= unc + TABLE_ACCURACY * value
            print(
                f"  n={p.index}: mu={p.lam:.6g} benchmark={value:g}+-{unc:g} "
                f"{'ok' if ok else 'MISMATCH'}"
            )
            if not ok:
                raise SolverError(
                    f"benchmark mismatch at n={p.index}: {p.lam!r} vs {value}+-{unc}"
                )
    if not report.ok:
        raise SolverError(
            f"identity deviation {report.max_deviation:.3e} exceeds {report.tolerance:g}"
        )
    return 0


def cmd_counting(args) -> int:
    w = _weight(args)
    cfg = BVPConfig(args.alpha, args.beta)
    nu = log_period(w)
    cap = args.lambda_max
    if cap is None:
        cap = math.exp((args.k_max + 1) * nu) * 1.02
    needed = math.exp((args.k_max + 1) * nu)
    if needed > cap * (1.0 + 1e-12):
        raise CapError(
            f"profiles up to k={args.k_max} need --lambda-max >= {needed:g}"
        )
    opts = _options(args)
    table = spectrum(cfg, w, lambda_max=cap, options=opts)

    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    lines = ["lambda,count"]
    for p in table.pairs:
        lines.append(f"{p.lam!r},{counting_function(table, p.lam)}")
    (outdir / "counting.csv").write_text("\n".join(lines) + "\n")

    profiles = [
        sigma_profile(table, k, samples=args.samples) for k in range(args.k_max + 1)
    ]
    for prof in profiles:
        s = prof.s_values()
        lines = ["t,sigma,s"]
        for i in range(len(prof.t)):
            lines.append(f"{prof.t[i]!r},{prof.sigma[i]!r},{s[i]!r}")
        (outdir / f"sigma_{prof.k}.csv").write_text("\n".join(lines) + "\n")

    gaps = {}
    fractions = {}
    for k in range(args.k_max):
        gaps[str(k)] = cauchy_gap(profiles[k], profiles[k + 1])
        fractions[str(k)] = profile_mismatch_fraction(profiles[k], profiles[k + 1])
    summary = {
        "nu": nu,
        "D_analytic": dimension_analytic(w),
        "lambda_cap": table.lambda_cap,
        "eigenvalues": len(table.pairs),
        "cauchy_gaps": gaps,
        "profile_mismatch_fractions": fractions,
        "digest": config_digest(
            request_payload(w, cfg, opts, None, cap)
        ),
    }
    try:
        emp, ana = estimate_D(table, t0=args.t0)
        summary["D_empirical"] = emp
    except SolverError as exc:
        summary["D_empirical_error"] = str(exc)
    (outdir / "summary.json").write_text(dump_archive(summary))
    print(f"wrote {outdir}/counting.csv, sigma_0..{args.k_max}.csv, summary.json")
    return 0


def cmd_periodicity(args) -> int:
    mode = args.mode
    w, small, big = _pair_tables(args, mode)
    report = verify_identity(big, small, mode, tolerance=args.tolerance)
    glue = glue_quadratic if mode == "quadratic" else glue_cubic
    big_cfg = big.config
    rows = []
    all_ok = report.ok
    for r in report.rows:
        src = small.pair(r.n)
        entry = {
            "n": r.n,
            "mu": r.mu,
            "scaled_mu": r.scaled_mu,
            "big_index": r.big_index,
            "big_lambda": r.big_lambda,
            "deviation": r.deviation,
        }
        if mode == "cubic" or r.n > 0:
            g = glue(w, src)
            predicted = (
                w.kappa * r.n if mode == "quadratic" else w.kappa * (r.n + 1) - 1
            )
            entry["glue"] = {
                "zeros": g.zero_count,
                "predicted_zeros": predicted,
                "junction_defect": g.junction_defect,
                "boundary_defect": boundary_defect(big_cfg, g),
                "equation_residual": glued_residual(w, g),
            }
            ok = (
                g.zero_count == predicted
                and entry["glue"]["boundary_defect"] <= 1e-6
                and entry["glue"]["equation_residual"] <= 1e-4
            )
            entry["glue"]["ok"] = ok
            all_ok = all_ok and ok
        rows.append(entry)
    payload = {
        "mode": mode,
        "scale": report.scale,
        "tolerance": report.tolerance,
        "max_deviation": report.max_deviation,
        "rows": rows,
        "ok": all_ok,
    }
    out = args.out or f"periodicity_{mode}.json"
    Path(out).write_text(dump_archive(payload))
    print(f"wrote {out} (max deviation {report.max_deviation:.3e}, ok={all_ok})")
    if not all_ok:
        raise SolverError("periodicity verification failed; see report")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cantorbeam",
        description="Spectral solver for fourth-order problems with "
        "Cantor-type self-similar mass",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one boundary configuration")
    _add_weight_args(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--lambda-max", type=float, default=None)
    _add_solver_args(p)
    p.add_argument("--out", default=None, help="archive path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tables", help="paired-solve comparison table (CSV)")
    _add_weight_args(p)
    p.add_argument("--mode", choices=("quadratic", "cubic"), required=True)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--tolerance", type=float, default=1e-3)
    _add_solver_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("counting", help="counting-function profiles and exponents")
    _add_weight_args(p)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--lambda-max", type=float, default=None)
    p.add_argument("--k-max", type=int, default=1)
    p.add_argument("--samples", type=int, default=257)
    p.add_argument("--t0", type=float, default=None)
    _add_solver_args(p)
    p.add_argument("--out-dir", default="counting_out")
    p.set_defaults(func=cmd_counting)

    p = sub.add_parser("periodicity", help="identity verification plus gluing checks")
    _add_weight_args(p)
    p.add_argument("--mode", choices=("quadratic", "cubic"), required=True)
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--tolerance", type=float, default=1e-3)
    _add_solver_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_periodicity)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except (ConfigError, DomainError, ResourceError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapError as exc:
        print(f"cap error: {exc}", file=sys.stderr)
        return 4
    except (SolverError, CantorBeamError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
