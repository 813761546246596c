"""Command-line front end.

Subcommands ``poles``, ``survival``, ``compare-delta`` and ``sweep`` each
write CSV files plus a flat ``key = value`` manifest into ``--out``.
Exit status is 0 on success, 2 for configuration or usage errors and 3
for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, units
from .config import ConfigError, SimulationConfig, load_config
from .drive import DriveRangeError, DriveSpec
from .evolution import fit_decay_rate, mu_for_rotation, survival
from .poles import CatalogError, PoleCatalog, PoleSearchError, build_catalog, norm_scan, write_catalog_csv
from .precision import as_tier
from .specfun import RangeError, SeriesOverflowError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEP_AXES = {
    "mu": "drive coupling mu (fm^-2)",
    "omega": "harmonic drive frequency (fm^-1)",
    "gamma": "barrier height (fm^-1)",
    "width": "barrier width d - x0 (fm)",
    "delta": "packet width Delta (fm)",
}
SURVIVAL_COLUMNS = ("t_fm", "t_seconds", "S", "S_unperturbed")
COMPARE_COLUMNS = ("t_fm", "t_seconds", "S_square", "S_square_unperturbed", "S_delta", "S_delta_unperturbed")
SWEEP_COLUMNS = (
    "axis", "value", "status", "decay_time_fm", "decay_time_s", "pole_decay_time_fm",
    "re_k1", "im_k1", "mu", "message",
)


class UsageError(ValueError):
    """Bad command-line arguments."""


def _num(v) -> str:
    return format(float(v), ".17g")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def config_items(cfg: SimulationConfig) -> list:
    """The resolved configuration as flat ``(key, value)`` pairs."""
    b, p, d, t = cfg.barrier, cfg.packet, cfg.drive, cfg.times
    items = [
        ("barrier.kind", b.kind),
        ("barrier.mass_invfm", _num(b.mass)),
        ("barrier.x0_fm", _num(b.x0)),
    ]
    if b.gamma is not None:
        items.append(("barrier.gamma_invfm", _num(b.gamma)))
    if b.d is not None:
        items.append(("barrier.d_fm", _num(b.d)))
    if b.nu is not None:
        items.append(("barrier.nu", _num(b.nu)))
    items += [
        ("packet.width_fm", _num(p.width)),
        ("packet.normalization", p.normalization),
        ("drive.shape", d.shape),
        ("drive.mu_invfm2", _num(d.mu)),
    ]
    if d.omega is not None:
        items.append(("drive.omega_invfm", _num(d.omega)))
    if d.shape == "tabulated":
        items.append(("drive.table_points", str(len(d.times))))
    if cfg.max_rotation is not None:
        items.append(("drive.max_rotation", _num(cfg.max_rotation)))
    items += [
        ("run.t_start", _num(t.start)),
        ("run.t_stop", _num(t.stop)),
        ("run.t_count", str(t.count)),
        ("run.t_unit", t.unit),
        ("run.t_spacing", t.spacing),
        ("run.poles_even", str(cfg.poles_even)),
        ("run.poles_odd", str(cfg.poles_odd)),
        ("run.quadrature_order", str(cfg.quadrature_order)),
        ("run.precision", cfg.precision.value),
        ("run.fit_window_tau", f"{_num(cfg.fit_window[0])}, {_num(cfg.fit_window[1])}"),
        ("run.workers", str(cfg.workers)),
    ]
    return items


def write_manifest(out: Path, command: str, cfg: SimulationConfig, outputs, extra, started: float, argv) -> Path:
    path = out / f"{command}_manifest.txt"
    lines = [
        ("command", command),
        ("artifact_version", __version__),
        ("argv", " ".join(argv)),
        ("precision_tier", cfg.precision.value),
        ("wall_clock_seconds", f"{time.perf_counter() - started:.3f}"),
    ]
    lines += [("output", str(o)) for o in outputs]
    lines += config_items(cfg)
    lines += list(extra)
    path.write_text("".join(f"{k} = {v}\n" for k, v in lines))
    return path


def _resolved_config(args) -> SimulationConfig:
    cfg = load_config(Path(args.config))
    changes = {}
    if args.precision:
        changes["precision"] = as_tier(args.precision)
    if args.poles is not None:
        if args.poles < 1:
            raise UsageError("--poles must be >= 1")
        changes["poles_even"] = changes["poles_odd"] = args.poles
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        changes["workers"] = args.workers
    return cfg.with_(**changes) if changes else cfg


def _catalog(cfg: SimulationConfig) -> PoleCatalog:
    return build_catalog(cfg, workers=cfg.workers)


def _dominant_tau(catalog: PoleCatalog) -> float:
    return float(catalog.even[0].decay_time)


def _drive_for(cfg: SimulationConfig, catalog: PoleCatalog, t_max: float) -> DriveSpec:
    """The configured drive, with ``mu`` fixed by ``max_rotation`` when requested."""
    if cfg.max_rotation is None:
        return cfg.drive
    return cfg.drive.with_mu(mu_for_rotation(catalog, cfg.drive, t_max, cfg.max_rotation))


def _pole_extra(catalog: PoleCatalog, prefix="") -> list:
    r = catalog.even[0]
    return [
        (f"{prefix}poles_even", str(len(catalog.even))),
        (f"{prefix}poles_odd", str(len(catalog.odd))),
        (f"{prefix}pole1_re_k", _num(r.k.real)),
        (f"{prefix}pole1_im_k", _num(r.k.imag)),
        (f"{prefix}pole1_decay_time_fm", _num(r.decay_time)),
        (f"{prefix}max_pole_residual", _num(catalog.metadata["max_residual"])),
    ]


def cmd_poles(args, cfg: SimulationConfig, out: Path):
    catalog = _catalog(cfg)
    cat_path = out / "poles.csv"
    write_catalog_csv(catalog, cat_path)

    k_top = max(float(r.k.real) for r in catalog)
    grid = np.linspace(args.scan_min, args.scan_max or 1.1 * k_top, args.scan_count)
    # catalog points keep full precision: the dips are narrower than a double ulp
    exact = {float(r.k.real): r.k.real for r in catalog}
    ks = sorted(set(float(v) for v in grid if float(v) not in exact) | set(exact), key=float)
    ks = [exact.get(k, k) for k in ks]
    rows = []
    for k, inv_e, inv_o in norm_scan(cfg.barrier, ks, cfg.precision):
        rows.append((_num(k), _num(inv_e), _num(inv_o), _num(inv_e * inv_o)))
    scan_path = out / "norm_scan.csv"
    _write_csv(scan_path, ("k", "inv_n_e", "inv_n_o", "inv_product"), rows)
    return [cat_path, scan_path], _pole_extra(catalog)


def _survival_pair(cfg: SimulationConfig, catalog: PoleCatalog, times, drive: DriveSpec):
    unpert = survival(times, catalog, DriveSpec.off(), cfg.packet, cfg.quadrature_order)
    if drive.active:
        pert = survival(times, catalog, drive, cfg.packet, cfg.quadrature_order)
    else:
        pert = unpert
    return pert, unpert


def cmd_survival(args, cfg: SimulationConfig, out: Path):
    catalog = _catalog(cfg)
    tau = _dominant_tau(catalog)
    times = cfg.times.resolve(tau)
    drive = _drive_for(cfg, catalog, float(times[-1]))
    pert, unpert = _survival_pair(cfg, catalog, times, drive)
    rows = [
        (_num(t), _num(ts), _num(s), _num(s0))
        for t, ts, s, s0 in zip(times, units.fm_to_seconds(times), pert.values, unpert.values)
    ]
    path = out / "survival.csv"
    _write_csv(path, SURVIVAL_COLUMNS, rows)
    extra = _pole_extra(catalog) + [
        ("mu_used_invfm2", _num(drive.mu if drive.active else 0.0)),
        ("truncation_defect", _num(unpert.truncation_defect)),
        ("renormalization", _num(unpert.renormalization)),
    ]
    return [path], extra


def cmd_compare_delta(args, cfg: SimulationConfig, out: Path):
    if cfg.barrier.kind != "square":
        raise ConfigError("compare-delta needs a square barrier config")
    if args.nu is not None and not args.nu > 0:
        raise UsageError("--nu must be > 0")
    square_cfg = cfg
    delta_cfg = cfg.with_(barrier=cfg.barrier.equivalent_delta(args.nu))
    sq_cat = _catalog(square_cfg)
    de_cat = _catalog(delta_cfg)
    # one shared grid; tau units refer to the square barrier
    times = cfg.times.resolve(_dominant_tau(sq_cat))
    drive = _drive_for(cfg, sq_cat, float(times[-1]))
    sq, sq0 = _survival_pair(square_cfg, sq_cat, times, drive)
    de, de0 = _survival_pair(delta_cfg, de_cat, times, drive)
    rows = [
        tuple(_num(v) for v in row)
        for row in zip(times, units.fm_to_seconds(times), sq.values, sq0.values, de.values, de0.values)
    ]
    path = out / "compare_delta.csv"
    _write_csv(path, COMPARE_COLUMNS, rows)
    extra = (
        [("delta.nu", _num(delta_cfg.barrier.nu)), ("delta.nu_source", "override" if args.nu else "gamma*(d-x0)")]
        + _pole_extra(sq_cat, "square.")
        + _pole_extra(de_cat, "delta.")
        + [("mu_used_invfm2", _num(drive.mu if drive.active else 0.0))]
    )
    return [path], extra


def sweep_point_config(cfg: SimulationConfig, axis: str, value: float) -> SimulationConfig:
    """``cfg`` with the sweep ``axis`` set to ``value``."""
    b = cfg.barrier
    if axis == "mu":
        if cfg.drive.shape == "none":
            raise ConfigError("sweep over mu needs a drive shape")
        return cfg.with_(drive=cfg.drive.with_mu(value), max_rotation=None)
    if axis == "omega":
        if cfg.drive.shape != "harmonic":
            raise ConfigError("sweep over omega needs a harmonic drive")
        return cfg.with_(drive=DriveSpec.harmonic(cfg.drive.mu, value))
    if axis == "gamma":
        if b.kind != "square":
            raise ConfigError("sweep over gamma needs a square barrier")
        return cfg.with_(barrier=replace(b, gamma=value))
    if axis == "width":
        if b.kind != "square":
            raise ConfigError("sweep over barrier width needs a square barrier")
        return cfg.with_(barrier=replace(b, d=b.x0 + value))
    if axis == "delta":
        return cfg.with_(packet=replace(cfg.packet, width=value))
    raise ConfigError(f"unknown sweep axis {axis!r}")


def run_sweep_point(task):
    """One sweep row; failures become rows with ``status = error``."""
    cfg, axis, value = task
    blank = ("",) * 7
    try:
        point = sweep_point_config(cfg, axis, value)
        catalog = build_catalog(point, workers=1)
        tau = _dominant_tau(catalog)
        times = point.times.resolve(tau)
        drive = _drive_for(point, catalog, float(times[-1]))
        series = survival(times, catalog, drive, point.packet, point.quadrature_order)
        w0, w1 = point.fit_window
        rate = fit_decay_rate(series, w0 * tau, w1 * tau)
        decay = 1.0 / rate if rate > 0 else math.inf
        k1 = catalog.even[0].k
        return (axis, _num(value), "ok", _num(decay), _num(units.fm_to_seconds(decay)), _num(tau),
                _num(k1.real), _num(k1.imag), _num(drive.mu if drive.active else 0.0), "")
    except (ConfigError, ValueError, ArithmeticError) as exc:
        msg = " ".join(str(exc).split())
        return (axis, _num(value), "error") + blank + (msg,)


def _sweep_values(args) -> list:
    if args.values:
        try:
            vals = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--values must be comma-separated numbers, got {args.values!r}") from None
    elif args.range:
        start, stop, count = args.range
        count = int(count)
        if count < 1:
            raise UsageError("--range count must be >= 1")
        if args.log:
            if not (start > 0 and stop > 0):
                raise UsageError("--log needs positive range bounds")
            vals = list(np.geomspace(start, stop, count))
        else:
            vals = list(np.linspace(start, stop, count))
    else:
        raise UsageError("sweep needs --values or --range")
    if not vals:
        raise UsageError("sweep has no points")
    if not all(math.isfinite(v) for v in vals):
        raise UsageError("sweep values must be finite")
    return [float(v) for v in vals]


def cmd_sweep(args, cfg: SimulationConfig, out: Path):
    values = _sweep_values(args)
    tasks = [(cfg, args.axis, v) for v in values]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(run_sweep_point, tasks))
    else:
        rows = [run_sweep_point(t) for t in tasks]
    path = out / "sweep.csv"
    _write_csv(path, SWEEP_COLUMNS, rows)
    failed = sum(1 for r in rows if r[2] != "ok")
    extra = [
        ("sweep.axis", args.axis),
        ("sweep.axis_meaning", SWEEP_AXES[args.axis]),
        ("sweep.points", str(len(rows))),
        ("sweep.failed_points", str(failed)),
    ]
    return [path], extra


COMMANDS = {
    "poles": cmd_poles,
    "survival": cmd_survival,
    "compare-delta": cmd_compare_delta,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="configuration file")
    common.add_argument("--out", default=".", metavar="DIR", help="output directory (created if missing)")
    common.add_argument("--precision", choices=("standard", "extended"), help="override the precision tier")
    common.add_argument("--poles", type=int, metavar="N", help="poles per parity sector")
    common.add_argument("--workers", type=int, metavar="N", help="worker processes")

    parser = argparse.ArgumentParser(
        prog="assisted-tunneling",
        description="Resonance poles and survival probability of a driven double barrier.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poles", parents=[common], help="pole catalog and 1/n scan")
    p.add_argument("--scan-min", type=float, default=0.01, help="scan start in fm^-1 (default 0.01)")
    p.add_argument("--scan-max", type=float, help="scan end in fm^-1 (default 1.1 x highest pole)")
    p.add_argument("--scan-count", type=int, default=2001, help="scan points (default 2001)")

    sub.add_parser("survival", parents=[common], help="survival probability with and without drive")

    p = sub.add_parser("compare-delta", parents=[common], help="square barrier against its delta limit")
    p.add_argument("--nu", type=float, help="delta strength (default gamma * (d - x0))")

    p = sub.add_parser("sweep", parents=[common], help="decay time across a parameter range")
    p.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES), help="swept parameter")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--values", help="comma-separated values in natural units")
    g.add_argument("--range", nargs=3, type=float, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--log", action="store_true", help="geometric spacing for --range")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        cfg = _resolved_config(args)
        if args.command == "poles" and (args.scan_count < 2 or args.scan_min <= 0):
            raise UsageError("--scan-count must be >= 2 and --scan-min > 0")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        outputs, extra = COMMANDS[args.command](args, cfg, out)
        manifest = write_manifest(out, args.command, cfg, outputs, extra, started, argv)
    except (ConfigError, UsageError, DriveRangeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CatalogError as exc:
        print(f"numeric failure: pole refinement failed for {len(exc.failures)} seed(s)", file=sys.stderr)
        for f in exc.failures:
            print(f"  {f}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PoleSearchError, SeriesOverflowError, RangeError, ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for o in outputs:
        print(o)
    print(manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
