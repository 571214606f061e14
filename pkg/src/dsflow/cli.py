"""Command-line front end.

Exit codes: 0 success, 1 configuration or input error, 2 flow aborted,
3 a requested check failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import schemas
from .ambient import slice_phi, slice_psi
from .errors import ConfigError, DsflowError
from .flow import FlowConfig, run
from .surface.field import make_surface, validate_field
from .verify import default_checks, format_table, identify_limit, needs_fields, needs_trajectory, run_checks

EXIT_OK, EXIT_CONFIG, EXIT_ABORTED, EXIT_CHECK = 0, 1, 2, 3
RUNSPEC_VERSION = 1

log = logging.getLogger("dsflow")


# -- run specification ------------------------------------------------------------

def load_runspec(path, grid: int | None = None, seed: int | None = None) -> dict:
    try:
        spec = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    schemas.validate(spec, "runspec")
    surf = spec["surface"]
    if grid is not None:
        g = surf.setdefault("grid", {})
        if g.get("kind", "axisymmetric") == "latlong":
            g["N_theta"], g["N_phi"] = grid, 2 * grid
        else:
            g["N"] = grid
    if seed is not None:
        surf["seed"] = seed
    return spec


def _dimension(spec: dict) -> int:
    if "ambient" in spec:
        return spec["ambient"]["n"]
    if spec["surface"]["kind"] == "field":
        return spec["surface"]["field"]["n"]
    raise ConfigError("run specification needs ambient.n")


def _flow_config(spec: dict, store_fields: bool = False) -> FlowConfig:
    if "flow" not in spec:
        raise ConfigError("run specification has no flow section")
    cfg = dict(spec["flow"])
    cfg["store_fields"] = cfg.get("store_fields", False) or store_fields
    if "enforce" in cfg:
        cfg["enforce"] = tuple(cfg["enforce"])
    return FlowConfig(**cfg)


def _surface(spec: dict, require=("spacelike",), k=None):
    n = _dimension(spec)
    field = make_surface(spec["surface"], n=n, k=k, require=require)
    if field.n != n:
        raise ConfigError(f"surface dimension {field.n} does not match ambient n = {n}")
    return field


def _outputs(spec: dict, out: str | None) -> tuple[Path, str]:
    o = spec.get("output", {})
    d = Path(out if out is not None else o.get("dir", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d, o.get("prefix", "run")


def _dump(doc, path: Path, schema: str) -> None:
    text = json.dumps(doc, indent=1, allow_nan=True)
    schemas.validate(json.loads(text), schema)
    path.write_text(text + "\n")


def _gnuplot_script(csv_name: str, columns: list) -> str:
    lines = ["set datafile separator ','", "set key autotitle columnhead", "set xlabel 't'",
             "set terminal pngcairo size 900,600", f"set output '{Path(csv_name).stem}.png'"]
    cols = [i + 1 for i, c in enumerate(columns) if c[:2] in ("A_", "B_")]
    plots = ", ".join(f"'{csv_name}' using 1:{c} with lines" for c in cols)
    return "\n".join(lines + [f"plot {plots}", ""])


def _workers() -> int | None:
    raw = os.environ.get("DSFLOW_THREADS")
    if not raw:
        return None
    try:
        w = int(raw)
    except ValueError as exc:
        raise ConfigError(f"DSFLOW_THREADS must be an integer, got {raw!r}") from exc
    if w < 1:
        raise ConfigError("DSFLOW_THREADS must be >= 1")
    return w


# -- subcommands ------------------------------------------------------------------

def slice_table_rows(n: int, s_values):
    header = ["s"] + [f"phi_{k}" for k in range(-1, n + 1)] + [f"psi_{l}" for l in range(1, n + 1)]
    rows = []
    for s in s_values:
        try:
            s = float(s)
            if not (math.isfinite(s) and s >= 0):
                raise ValueError("s must be finite and nonnegative")
            vals = [slice_phi(k, s, n) for k in range(-1, n + 1)]
            vals += [slice_psi(l, s, n) for l in range(1, n + 1)]
            rows.append([f"{s:.16e}"] + [f"{float(v):.16e}" for v in vals])
        except (ValueError, DsflowError) as exc:
            rows.append([str(s)] + [f"error: {exc}"] + [""] * (len(header) - 2))
    return header, rows


def cmd_slice_table(args) -> int:
    if args.n < 2:
        raise ConfigError("n must be >= 2")
    header, rows = slice_table_rows(args.n, args.s)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        fh = open(d / "slice_table.csv", "w", newline="")
    else:
        fh = sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _run_flow(spec: dict, store_fields: bool = False):
    cfg = _flow_config(spec, store_fields)
    field = _surface(spec, require=cfg.required_hypotheses, k=cfg.k)
    return field, run(cfg, field)


def cmd_flow(args) -> int:
    spec = load_runspec(args.config, args.grid, args.seed)
    _, traj = _run_flow(spec)
    d, prefix = _outputs(spec, args.out)
    traj.write_csv(d / f"{prefix}.csv")
    _dump(traj.to_dict(), d / f"{prefix}.json", "trajectory")
    if spec.get("output", {}).get("gnuplot"):
        (d / f"{prefix}.gp").write_text(_gnuplot_script(f"{prefix}.csv", traj.csv_header()))
    last = traj.reports[-1]
    print(f"termination: {traj.termination}{' (' + traj.reason + ')' if traj.reason else ''}")
    print(f"steps: {traj.steps}  t: {last.t:.6g}  osc_r: {last.osc_r:.3e}")
    if traj.r_infinity is not None:
        print(f"r_infinity: {traj.r_infinity:.12g}")
    if not traj.metadata["proven_regime"]:
        print(f"note: {traj.metadata['note']}")
    return EXIT_ABORTED if traj.termination == "aborted" else EXIT_OK


def cmd_verify(args) -> int:
    spec = load_runspec(args.config, args.grid, args.seed)
    checks = spec.get("checks")
    traj = None
    if checks is None:
        cfg = _flow_config(spec)
        checks = default_checks(cfg.flow_kind, cfg.k, _dimension(spec))
    if any(needs_trajectory(c) for c in checks):
        field, traj = _run_flow(spec, store_fields=any(needs_fields(c) for c in checks))
    else:
        field = _surface(spec)
    results = run_checks(checks, traj, field, workers=_workers())
    print(format_table(results))
    failed = [r for r in results if r.status == "fail"]
    report = {
        "version": RUNSPEC_VERSION,
        "all_passed": not failed,
        "termination": traj.termination if traj is not None else None,
        "limit": identify_limit(traj) if traj is not None else None,
        "results": [r.to_dict() for r in results],
    }
    d, prefix = _outputs(spec, args.out)
    _dump(report, d / f"{prefix}_checks.json", "check_report")
    if traj is not None and traj.termination == "aborted":
        print(f"flow aborted: {traj.reason}", file=sys.stderr)
        return EXIT_ABORTED
    return EXIT_CHECK if failed else EXIT_OK


def cmd_surface_validate(args) -> int:
    spec = load_runspec(args.config, args.grid, args.seed)
    require, k = ("spacelike",), None
    if "flow" in spec:
        cfg = _flow_config(spec)
        require, k = cfg.required_hypotheses, cfg.k
    field = _surface(spec)
    mon = validate_field(field, k, require)
    print(json.dumps({"valid": True, "required": list(require), "monitors": mon}, indent=1))
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        _dump(field.to_dict(), d / "field.json", "radial_field")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dsflow", description="Curvature flows of spacelike graphs in de Sitter space.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="run specification (JSON)")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        sp.add_argument("--grid", type=int, help="grid resolution N (overrides surface.grid)")
        sp.add_argument("--seed", type=int, help="seed for random surfaces (overrides surface.seed)")

    st = sub.add_parser("slice-table", help="tabulate slice quermassintegrals and weighted integrals")
    st.add_argument("--n", type=int, default=2)
    st.add_argument("--s", nargs="+", required=True, help="slice heights")
    st.add_argument("--out", help="write slice_table.csv here instead of stdout")
    st.set_defaults(func=cmd_slice_table)

    fl = sub.add_parser("flow", help="run a flow and write the trajectory")
    common(fl)
    fl.set_defaults(func=cmd_flow)

    ve = sub.add_parser("verify", help="run checks and write a JSON report")
    common(ve)
    ve.set_defaults(func=cmd_verify)

    su = sub.add_parser("surface", help="surface utilities")
    su_sub = su.add_subparsers(dest="surface_command", required=True)
    va = su_sub.add_parser("validate", help="check a surface against the flow hypotheses")
    common(va)
    va.set_defaults(func=cmd_surface_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DsflowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
