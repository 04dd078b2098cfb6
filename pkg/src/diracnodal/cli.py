"""Command-line interface.

Subcommands: ``forward`` generates nodal data files from a problem
description, ``invert`` reconstructs from a nodal data file, ``verify`` runs
the forward-then-inverse roundtrip against a known description, and
``asympt`` tabulates expansion residuals.  Exit codes: 0 success, 2 bad
configuration or input file, 3 forward-stage failure, 4 inverse-stage
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import asymptotics, forward, inverse
from .errors import (
    AuxInconsistent,
    ConfigError,
    DegenerateDenominator,
    DiracNodalError,
    InsufficientData,
    IntegrationOverflow,
    MultipleRootsAmbiguous,
    NegativeMassSquare,
    NodeCountMismatch,
    NoRootInWindow,
    NoStableShift,
    SideMismatch,
    ThetaOutOfRange,
)
from .model import PI, ProblemConfig, jump_constants, validate_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FORWARD = 3
EXIT_INVERSE = 4

_FORWARD_ERRORS = (IntegrationOverflow, NoRootInWindow, MultipleRootsAmbiguous,
                   NodeCountMismatch)
_INVERSE_ERRORS = (InsufficientData, SideMismatch, AuxInconsistent, NoStableShift,
                   DegenerateDenominator, ThetaOutOfRange, NegativeMassSquare)

NODAL_FILE_VERSION = 1


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(raw)


def write_nodal_file(path: str, ds: inverse.NodalDataset,
                     config: ProblemConfig | None = None) -> None:
    body = []
    for n in ds.sorted_n():
        e = ds.entries[n]
        body.append({
            "n": n,
            "mu_n": None if e.mu_n is None else float(e.mu_n),
            "nodes": [float(v) for v in e.nodes],
        })
    doc = {
        "header": {
            "version": NODAL_FILE_VERSION,
            "provenance": ds.provenance,
            "config": config.to_json() if config is not None else "external",
        },
        "body": body,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_nodal_file(path: str):
    """Load a nodal data file; returns (dataset, header dict)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read nodal file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"nodal file {path} is not valid JSON: {exc}") from exc
    try:
        header = doc["header"]
        if header["version"] != NODAL_FILE_VERSION:
            raise ConfigError(f"unsupported nodal file version {header['version']}")
        rows = [(row["n"], row["nodes"], row.get("mu_n")) for row in doc["body"]]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"nodal file {path} is malformed: {exc}") from exc
    provenance = header.get("provenance", "external")
    try:
        ds = inverse.make_dataset(rows, provenance=provenance)
    except (ValueError, DiracNodalError) as exc:
        raise ConfigError(f"nodal file {path} failed validation: {exc}") from exc
    return ds, header


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=1)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_n_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad index list {text!r}: {exc}") from exc


def _loglog_slope(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = ys > 0.0
    if int(keep.sum()) < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs[keep]), np.log(ys[keep]), 1)[0])


def _envelope_slope(mus, vals, bins: int = 12) -> float:
    """Log-log slope of the per-bin maxima; robust to oscillatory zeros."""
    mus = np.asarray(mus, dtype=float)
    vals = np.asarray(vals, dtype=float)
    edges = np.geomspace(mus[0], mus[-1] * (1.0 + 1e-12), bins + 1)
    cx, cy = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (mus >= a) & (mus < b)
        if np.any(sel):
            cx.append(math.sqrt(a * b))
            cy.append(float(np.max(vals[sel])))
    return _loglog_slope(cx, cy)


def cmd_forward(args) -> int:
    config = load_config(args.config)
    if args.n:
        ns = _parse_n_list(args.n)
    else:
        ns = [n for n in range(args.n_min, args.n_max + 1)
              if not (args.even and n % 2)]
    if not ns:
        raise ConfigError("no indices requested")
    ds = inverse.dataset_from_forward(config, ns)
    write_nodal_file(args.out, ds, config)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "mu_n", "j", "x"])
            for n in ds.sorted_n():
                e = ds.entries[n]
                for j, x in zip(range(1, n + 1), e.nodes):
                    writer.writerow([n, f"{e.mu_n:.14g}", j, f"{x:.14g}"])
    print(f"wrote {len(ns)} nodal sets to {args.out}")
    return EXIT_OK


def cmd_invert(args) -> int:
    ds, header = read_nodal_file(args.nodes)
    grid = None
    if args.grid_size != 64:
        d = inverse.EXCLUSION
        grid = np.concatenate([
            np.linspace(d, PI / 2 - d, args.grid_size),
            np.linspace(PI / 2 + d, PI - d, args.grid_size),
        ]).tolist()
    res = inverse.reconstruct(ds, grid=grid, mode=args.mode)
    doc = {
        "source": args.nodes,
        "source_header": {k: header.get(k) for k in ("provenance", "config")},
        "mode": res.mode,
        "theta_hat": res.theta_hat,
        "c_hat": res.c_hat,
        "m_hat": res.m_hat,
        "v_hat": res.v_hat,
        "diagnostics": res.diagnostics,
    }
    _emit(doc, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "v_hat"])
            for x, v in res.v_hat:
                writer.writerow([f"{x:.14g}", f"{v:.14g}"])
    return EXIT_OK


def cmd_verify(args) -> int:
    config = load_config(args.config)
    ns = [n for n in range(args.n_min, args.n_max + 1) if n % 2 == 0]
    ds = inverse.dataset_from_forward(config, ns)
    res = inverse.reconstruct(ds, mode=args.mode)
    jc = jump_constants(config)
    v_err = max(abs(v - float(config.V(x))) for x, v in res.v_hat)
    errors = {
        "theta": abs(res.theta_hat - config.theta),
        "c": abs(res.c_hat - jc.c_even),
        "v_sup": v_err,
        "m": abs(res.m_hat - config.mass),
    }
    thresholds = {"theta": 1e-2, "c": 1e-2, "v_sup": 5e-2, "m": 1e-1}
    adjud = inverse.second_order_adjudication(config, ds, args.n_max)
    doc = {
        "config": config.to_json(),
        "mode": res.mode,
        "n_range": [ns[0], ns[-1]],
        "estimates": {"theta_hat": res.theta_hat, "c_hat": res.c_hat,
                      "m_hat": res.m_hat},
        "errors": errors,
        "thresholds": thresholds,
        "within_thresholds": all(errors[k] <= thresholds[k] for k in thresholds),
        "second_order": {k: adjud[k] for k in ("slope", "candidates", "best")},
        "second_order_convention_used": "consistent",
        "convention_matches_best": adjud["best"] == "consistent",
    }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_asympt(args) -> int:
    config = load_config(args.config)
    ns = _parse_n_list(args.n)
    if not ns or min(ns) < 1:
        raise ConfigError("asympt needs positive indices")
    pairs = {n: forward.eigenvalue_near(config, n) for n in sorted(set(ns))}
    eig_rows = []
    for n in sorted(pairs):
        mu0 = asymptotics.mu_zero(config, n)
        eig_rows.append({"n": n, "mu_zero": mu0, "mu": pairs[n],
                         "abs_err": abs(pairs[n] - mu0)})
    node_rows = {"paper": [], "consistent": []}
    for n in sorted(pairs):
        sets = forward.nodal_set(config, n, mu=pairs[n])
        for mode in ("paper", "consistent"):
            pred = np.array([asymptotics.node_asymptotic(config, n, j, mode)
                             for j in range(1, n + 1)])
            node_rows[mode].append({"n": n,
                                    "max_err": float(np.max(np.abs(pred - sets.nodes)))})
    mus = np.arange(args.mu_lo, args.mu_hi + 1e-9, args.mu_step)
    exact = forward.delta_batch(config, mus)
    approx = asymptotics.delta_asymptotic(config, mus)
    scaled = np.abs(mus * (exact - approx))
    doc = {
        "config": config.to_json(),
        "eigenvalues": eig_rows,
        "eigenvalue_slope": _loglog_slope([r["n"] for r in eig_rows],
                                          [r["abs_err"] for r in eig_rows]),
        "node_residuals": node_rows,
        "node_residual_slopes": {
            mode: _loglog_slope([r["n"] for r in rows],
                                [r["max_err"] for r in rows])
            for mode, rows in node_rows.items()
        },
        "delta_residual": {
            "mu_lo": float(mus[0]),
            "mu_hi": float(mus[-1]),
            "count": int(mus.size),
            "scaled_max": float(np.max(scaled)),
            "envelope_slope": _envelope_slope(mus, scaled),
        },
    }
    _emit(doc, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mu", "scaled_residual"])
            for m, v in zip(mus, scaled):
                writer.writerow([f"{m:.14g}", f"{v:.14g}"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nodal",
        description="Forward and inverse nodal computations for a first-order "
                    "system with an interior jump",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="generate a nodal data file")
    p.add_argument("--config", required=True)
    p.add_argument("--n", help="comma-separated indices, overrides the range flags")
    p.add_argument("--n-min", type=int, default=8)
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--even", action="store_true", help="even indices only")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write a flat CSV of the nodes")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("invert", help="reconstruct from a nodal data file")
    p.add_argument("--nodes", required=True)
    p.add_argument("--mode", choices=list(asymptotics.MODES), default="consistent")
    p.add_argument("--grid-size", type=int, default=64,
                   help="reporting points per half-interval")
    p.add_argument("--out")
    p.add_argument("--csv", help="also write the recovered potential as CSV")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("verify", help="forward-then-invert roundtrip against a known config")
    p.add_argument("--config", required=True)
    p.add_argument("--n-min", type=int, default=8)
    p.add_argument("--n-max", type=int, default=128)
    p.add_argument("--mode", choices=list(asymptotics.MODES), default="consistent")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("asympt", help="tabulate expansion residuals")
    p.add_argument("--config", required=True)
    p.add_argument("--n", required=True, help="comma-separated indices")
    p.add_argument("--mu-lo", type=float, default=20.0)
    p.add_argument("--mu-hi", type=float, default=200.0)
    p.add_argument("--mu-step", type=float, default=0.7)
    p.add_argument("--out")
    p.add_argument("--csv", help="also write the scaled residual table as CSV")
    p.set_defaults(func=cmd_asympt)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _FORWARD_ERRORS as exc:
        print(f"forward stage failed: {exc}", file=sys.stderr)
        return EXIT_FORWARD
    except _INVERSE_ERRORS as exc:
        print(f"inverse stage failed: {exc}", file=sys.stderr)
        return EXIT_INVERSE


if __name__ == "__main__":
    sys.exit(main())
