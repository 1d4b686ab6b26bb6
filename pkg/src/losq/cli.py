"""Command-line interface: rate sweeps, figure reproduction, config checks."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments, figures, plotsvg

log = logging.getLogger("losq")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="worker threads for independent grid points (default 1)")
    p.add_argument("--seed", type=int, default=None, metavar="U64",
                   help="override the experiment seed")
    p.add_argument("-v", "--verbose", action="store_true", help="per-point logging")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="losq",
        description="Achievable rates of LOS MIMO links with 1-bit I/Q receivers "
                    "and spatial oversampling.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a configured SNR/S sweep to CSV")
    p_sweep.add_argument("--config", required=True, type=Path)
    p_sweep.add_argument("--out", required=True, type=Path, help="output CSV path")
    p_sweep.add_argument("--plot", type=Path, default=None,
                         help="also draw an SVG from the CSV rows")
    _add_common(p_sweep)

    p_fig = sub.add_parser("figure", help="reproduce a published figure and "
                                          "report deviations")
    p_fig.add_argument("--id", required=True, choices=figures.FIGURE_IDS)
    p_fig.add_argument("--out", required=True, type=Path, help="output directory")
    p_fig.add_argument("--tolerance", type=float, default=None, metavar="BPCU",
                       help="override the default tolerance for exact curves")
    p_fig.add_argument("--samples", type=int,
                       default=experiments.DEFAULT_MC_UNQUANTIZED_SAMPLES,
                       help="Monte-Carlo samples for reference curves")
    _add_common(p_fig)

    p_check = sub.add_parser("check", help="validate a config without running it")
    p_check.add_argument("--config", required=True, type=Path)
    return ap


def _cmd_sweep(args) -> int:
    cfg = experiments.validate_config(experiments.load_config(args.config))
    if args.seed is not None:
        cfg = experiments.replace(cfg, seed=args.seed)
    for flag in cfg.flags:
        log.info("config note: %s", flag)
    rows = experiments.run_sweep(cfg, threads=args.threads)
    experiments.emit_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.plot is not None:
        plotsvg.plot_rows(rows, args.plot, title=cfg.name)
        print(f"wrote plot to {args.plot}")
    return 0


def _cmd_figure(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = figures.reproduce_figure(
        args.id,
        seed=args.seed if args.seed is not None else 0,
        samples=args.samples,
        tolerance=args.tolerance,
    )
    csv_path = out_dir / f"{args.id}.csv"
    dev_path = out_dir / f"{args.id}_deviation.csv"
    svg_path = out_dir / f"{args.id}.svg"
    experiments.emit_csv(report.rows, csv_path)
    figures.emit_deviation_csv(report.deviations, dev_path)
    plotsvg.plot_rows(report.rows, svg_path, title=args.id)
    print(f"wrote {csv_path}, {dev_path}, {svg_path}")
    bad = report.out_of_tolerance
    print(f"{len(report.deviations) - len(bad)}/{len(report.deviations)} reference "
          f"points within tolerance")
    for d in bad:
        print(f"  out of tolerance: {d.curve} S={d.s:g} snr={d.snr_db:g} dB "
              f"ours={d.ours:.6f} ref={d.paper:.6f} delta={d.delta:+.4f}")
    return 0


def _cmd_check(args) -> int:
    cfg = experiments.validate_config(experiments.load_config(args.config))
    ms = ", ".join(f"S={s:g} (M={arr.count})" for s, arr in cfg.rx_arrays)
    engine = cfg.engine.value if cfg.engine else "auto"
    print(f"config ok: {cfg.name}")
    print(f"  tx: {cfg.tx.kind.value} N={cfg.n_tx} aperture={cfg.tx.aperture_1d:g} m")
    print(f"  rx: {ms}")
    print(f"  link: R={cfg.distance_m:g} m, lambda={cfg.wavelength_m:g} m")
    print(f"  input: {cfg.constellation.name} ({cfg.constellation.size}^{cfg.n_tx} vectors)")
    print(f"  engine: {engine}, samples={cfg.samples}, seed={cfg.seed}")
    print(f"  sweep: {len(cfg.snr_grid_db)} SNR points x {len(cfg.rx_arrays)} arrays")
    for flag in cfg.flags:
        print(f"  note: {flag}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "figure":
            return _cmd_figure(args)
        if args.command == "check":
            return _cmd_check(args)
    except (experiments.ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
