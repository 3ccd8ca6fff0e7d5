"""Command-line entry point.

Subcommands:
  sweep <config>    run the radius sweep, write sweep.csv / summary.json
  verify <config>   run the identity suites, write verify.json
  embed <config>    embed one coordinate sphere, dump its profile CSV
  report <summary>  pretty-print a summary.json written by sweep

Exit codes: 0 all asserted checks passed, 2 identity or sweep failure,
3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .embed_h3 import dump_profile_csv, embed_surface
from .quasilocal import enclosing_radii
from .sphere_geometry import QuadratureGrid, coordinate_sphere
from .sweep import (
    ConfigError,
    SweepConfig,
    run_sweep,
    verify_identities,
    write_outputs,
)

__all__ = ["main"]


def _load_config(path: str) -> SweepConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON: %s" % (path, exc)) from None
    return SweepConfig.from_dict(data)


def _fmt_vec(comps) -> str:
    return "(" + ", ".join("%+.6e" % c for c in comps) + ")"


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    record = run_sweep(cfg)
    paths = write_outputs(record, cfg)
    print("family: %s" % record.family_label)
    for rec in record.records:
        if rec.error is not None:
            print("  eps=%-10.6g FAILED: %s" % (rec.eps, rec.error))
            continue
        res = rec.result
        print("  eps=%-10.6g m_BY=%s [%s]  |m_hat-m_BY|=%.3e"
              % (rec.eps, _fmt_vec(res.m_by.as_array()), res.tag_by.value,
                 float(np.max(np.abs(res.m_hat.as_array() - res.m_by.as_array())))))
    print("fitted limits (from eps = %s):"
          % ", ".join("%g" % e for e in record.fit_eps))
    for name, vec in record.limits.items():
        tag = record.tags[name]
        print("  %-8s %s [%s] cone max %.3e (tags %s)"
              % (name, _fmt_vec(vec.as_array()), tag["classify"].value,
                 tag["cone_max"], "agree" if tag["agree"] else "DISAGREE"))
    print("reference mass vector: %s" % _fmt_vec(record.wang.as_array()))
    print("wrote %s and %s" % (paths["csv"], paths["summary"]))
    ok = all(r.error is None for r in record.records)
    ok = ok and all(t["agree"] for t in record.tags.values())
    return 0 if ok else 2


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    report = verify_identities(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "verify.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    print("family: %s" % report["family"])
    for name, entry in report["entries"].items():
        status = "PASS" if entry.get("passed") else "FAIL"
        detail = entry.get("residual", entry.get("order",
                           entry.get("exponent", entry.get("factor", ""))))
        if isinstance(detail, float):
            detail = "%.3e" % detail
        note = entry.get("error", entry.get("note", ""))
        print("  %s  %-26s %-12s %s" % (status, name, detail, note))
    print("wrote %s" % path)
    return 0 if report["passed"] else 2


def _cmd_embed(args) -> int:
    cfg = _load_config(args.config)
    eps = args.eps if args.eps is not None else cfg.eps_list[0]
    if not 0.0 < eps <= cfg.family.rho_max:
        raise ConfigError("eps %g outside the collar range (0, %g]"
                          % (eps, cfg.family.rho_max))
    grid = QuadratureGrid(cfg.n_theta, cfg.n_phi)
    surf = coordinate_sphere(cfg.family, float(eps), grid)
    emb = embed_surface(surf, branch=cfg.branch)
    r1, r2 = enclosing_radii(emb)
    print("family: %s  eps=%g" % (cfg.family_label, eps))
    print("  area              %.12g" % surf.area)
    print("  radii             [%.12g, %.12g]" % (r1, r2))
    print("  H0 range          [%.12g, %.12g]"
          % (float(np.min(emb.H0)), float(np.max(emb.H0))))
    print("  isometry residual %.3e" % emb.isometry_residual)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / ("profile_eps_%g.csv" % eps)
    if emb.profile is not None:
        dump_profile_csv(emb.profile, path)
    else:
        # closed-form geodesic sphere: reconstruct the meridian columns
        R = math.asinh(math.sqrt(float(np.mean(surf.E))))
        th = grid.theta
        rows = np.column_stack([
            th,
            math.sinh(R) * np.sin(th),
            math.sinh(R) * np.cos(th),
            np.full_like(th, math.cosh(R)),
            np.full_like(th, 2.0 * math.cosh(R) / math.sinh(R)),
        ])
        np.savetxt(path, rows, delimiter=",", header="theta,f,u,w,H0", comments="")
    print("wrote %s" % path)
    return 0


def _cmd_report(args) -> int:
    try:
        with open(args.record) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read record %s: %s" % (args.record, exc)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError("record %s is not valid JSON: %s" % (args.record, exc)) from None
    if not isinstance(data, dict) or "records" not in data:
        raise ConfigError("%s does not look like a sweep summary" % args.record)
    print("family: %s" % data.get("family", "?"))
    print("radii: %s" % ", ".join("%g" % e for e in data.get("epsilons", [])))
    for rec in data["records"]:
        if rec.get("error"):
            print("  eps=%-10.6g FAILED: %s" % (rec["epsilon"], rec["error"]))
        elif "m_by" in rec:
            print("  eps=%-10.6g m_BY=%s [%s]"
                  % (rec["epsilon"], _fmt_vec(rec["m_by"]), rec.get("tag_by", "?")))
    limits = data.get("limits", {})
    tags = data.get("tags", {})
    fits = data.get("fits", {})
    for name, comps in limits.items():
        tag = tags.get(name, {})
        t_fit = fits.get(name, {}).get("t", {})
        print("  limit %-8s %s [%s] t-order %s"
              % (name, _fmt_vec(comps), tag.get("classify", "?"),
                 t_fit.get("order", "?")))
    if "wang_reference" in data:
        print("  reference mass vector: %s" % _fmt_vec(data["wang_reference"]))
    gap = fits.get("hat_by_gap", {})
    if gap:
        print("  |m_hat - m_BY| decay order %s (monotone: %s)"
              % (gap.get("order", "?"), data.get("gap_monotone", "?")))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ahmass",
        description="Quasi-local mass sweeps over coordinate spheres of "
                    "asymptotically hyperbolic collar metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run the radius sweep and write reports")
    p.add_argument("config", help="JSON config file")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="run the identity suites")
    p.add_argument("config", help="JSON config file")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("embed", help="embed one coordinate sphere")
    p.add_argument("config", help="JSON config file")
    p.add_argument("--eps", type=float, default=None,
                   help="collar radius (default: largest configured)")
    p.set_defaults(fn=_cmd_embed)

    p = sub.add_parser("report", help="pretty-print a summary.json")
    p.add_argument("record", help="summary.json written by sweep")
    p.set_defaults(fn=_cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
