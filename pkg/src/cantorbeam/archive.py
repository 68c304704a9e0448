"""Spectrum archives: deterministic JSON persistence and re-certification.

Archives are content-addressed by a digest over the mathematical fields of
the run configuration (weight, boundary, solver knobs, caps), so repeated
runs of the same configuration produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

from .errors import CertificationError, ConfigError
from .measure import WeightParams, make_weight
from .ode import build_grid
from .shooting import (
    BVPConfig,
    Eigenpair,
    SolverOptions,
    SpectrumTable,
    _examine_root,
    rayleigh_quotient,
)

FORMAT_VERSION = 1


def _solver_payload(opts: SolverOptions) -> dict:
    return asdict(opts)


def request_payload(
    w: WeightParams,
    cfg: BVPConfig,
    opts: SolverOptions,
    n_max: int | None,
    lambda_max: float | None,
) -> dict:
    return {
        "weight": {"kappa": w.kappa, "a": str(w.a_exact)},
        "boundary": {"alpha": cfg.alpha, "beta": cfg.beta},
        "solver": _solver_payload(opts),
        "n_max": n_max,
        "lambda_max": lambda_max,
    }


def config_digest(request: dict) -> str:
    blob = json.dumps(request, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def table_payload(
    table: SpectrumTable,
    n_max: int | None = None,
    lambda_max: float | None = None,
) -> dict:
    w = table.weight
    cfg = table.config
    request = request_payload(w, cfg, table.options, n_max, lambda_max)
    return {
        "format_version": FORMAT_VERSION,
        "digest": config_digest(request),
        "weight": {
            "kappa": w.kappa,
            "a": w.a,
            "b": w.b,
            "a_exact": str(w.a_exact),
            "b_exact": str(w.b_exact),
        },
        "boundary": {"alpha": cfg.alpha, "beta": cfg.beta},
        "solver": {
            **_solver_payload(table.options),
            "lambda_cap": table.lambda_cap,
            "scan_ratio_used": table.scan_ratio_used,
            "n_max": n_max,
            "lambda_max": lambda_max,
        },
        "eigenvalues": [
            {
                "n": p.index,
                "lambda": p.lam,
                "zeros": p.zero_count,
                "det_residual": p.det_residual,
                "rayleigh_gap": p.rayleigh_gap,
            }
            for p in table.pairs
        ],
    }


def dump_archive(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_archive(
    path: str | Path,
    table: SpectrumTable,
    n_max: int | None = None,
    lambda_max: float | None = None,
) -> dict:
    payload = table_payload(table, n_max=n_max, lambda_max=lambda_max)
    Path(path).write_text(dump_archive(payload))
    return payload


def load_archive(path: str | Path) -> SpectrumTable:
    """Load an archive as a SpectrumTable (without eigenfunction samples)."""
    payload = json.loads(Path(path).read_text())
    if payload.get("format_version") != FORMAT_VERSION:
        raise ConfigError(f"unsupported archive format: {payload.get('format_version')}")
    w = make_weight(payload["weight"]["kappa"], Fraction(payload["weight"]["a_exact"]))
    cfg = BVPConfig(payload["boundary"]["alpha"], payload["boundary"]["beta"])
    sp = dict(payload["solver"])
    lambda_cap = sp.pop("lambda_cap")
    scan_ratio_used = sp.pop("scan_ratio_used")
    sp.pop("n_max", None)
    sp.pop("lambda_max", None)
    opts = SolverOptions(**sp)
    pairs = [
        Eigenpair(
            index=e["n"],
            lam=e["lambda"],
            trajectory=None,
            zero_count=e["zeros"],
            det_residual=e["det_residual"],
            rayleigh_gap=e["rayleigh_gap"],
            config=cfg,
            weight=w,
        )
        for e in payload["eigenvalues"]
    ]
    return SpectrumTable(
        config=cfg,
        weight=w,
        pairs=pairs,
        options=opts,
        lambda_cap=lambda_cap,
        scan_ratio_used=scan_ratio_used,
    )


def recertify(table: SpectrumTable) -> SpectrumTable:
    """Re-extract every eigenfunction at the stored eigenvalues and verify
    the oscillation counts; returns a table with fresh trajectories."""
    w = table.weight
    cfg = table.config
    opts = table.options
    grid = build_grid(w, opts.generation, opts.substeps, opts.max_nodes)
    fresh: list[Eigenpair] = []
    for p in table.pairs:
        if p.lam == 0.0 and cfg.alpha == 0.0 and p.index == 0:
            from .shooting import _zero_mode_pair

            fresh.append(_zero_mode_pair(cfg, w, grid, opts))
            continue
        ep = _examine_root(cfg, w, grid, p.lam, opts)
        if ep.zero_count != p.index:
            raise CertificationError(
                f"re-certification failed at n={p.index}, lam={p.lam!r}: "
                f"counted {ep.zero_count} zeros"
            )
        ep.index = p.index
        rq = rayleigh_quotient(cfg, w, ep.trajectory)
        ep.rayleigh_gap = abs(rq - p.lam) / max(abs(p.lam), 1e-300)
        fresh.append(ep)
    return SpectrumTable(
        config=cfg,
        weight=w,
        pairs=fresh,
        options=opts,
        lambda_cap=table.lambda_cap,
        scan_ratio_used=table.scan_ratio_used,
    )
