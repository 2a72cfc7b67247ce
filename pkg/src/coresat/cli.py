"""Command-line front end.

Subcommands mirror the pipeline stages: ``run`` executes everything, while
``ingest``/``stats``/``dtw``/``segment``/``report`` run one stage against the
persisted artifacts of the previous one.  ``config --example`` prints a
commented configuration template.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, CoresatError
from .pipeline import (
    EXAMPLE_CONFIG,
    PipelineConfig,
    RbfSettings,
    run,
    stage_dtw,
    stage_ingest,
    stage_report,
    stage_segment,
    stage_stats,
    write_manifest,
)

STAGE_COMMANDS = {
    "ingest": stage_ingest,
    "stats": stage_stats,
    "dtw": stage_dtw,
    "segment": stage_segment,
    "report": stage_report,
}


def _add_config_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config file; flags below override its fields")
    p.add_argument("--data-dir", help="directory of per-asset price CSVs")
    p.add_argument("--fx-file", help="FX rate CSV (date, rate)")
    p.add_argument("--output-dir", help="artifact directory")
    p.add_argument("--start", help="window start date (ISO)")
    p.add_argument("--end", help="window end date (ISO)")
    p.add_argument("--anchor", help="weekly anchor weekday (default sunday)")
    p.add_argument("--max-gap", type=int, help="longest LOCF-fillable gap in weeks (default 4)")
    p.add_argument("--metrics", help="comma-separated metric list")
    p.add_argument("--no-standardize", action="store_true", help="disable pooled z-scoring before DTW")
    p.add_argument("--rbf-spacing", type=float, help="frame center spacing R (default N/6)")
    p.add_argument("--rbf-residual", type=float, help="kernel residual p at distance R (default 0.5)")
    p.add_argument("--reg-alpha", type=float, help="Tikhonov regularization weight (default 0)")
    p.add_argument("--no-constant-term", action="store_true", help="drop the constant basis term")
    p.add_argument("--kink-mode", choices=["upper", "lower"], help="which ECDF kink to search")
    p.add_argument("--kink-window", nargs=2, type=float, metavar=("LO", "HI"), help="kink probability window")
    p.add_argument(
        "--p", action="append", default=[], metavar="METRIC=VALUE",
        help="fixed quantile fraction for a metric, overrides kink detection (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coresat",
        description="Segment an asset universe into a statistically homogeneous core and a satellite.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the full pipeline and write the manifest")
    _add_config_options(p_run)

    for name, help_text in [
        ("ingest", "parse, convert, resample and gap-fill the price panel"),
        ("stats", "compute yearly (mean, std, alpha) sample vectors"),
        ("dtw", "compute DTW distance matrices"),
        ("segment", "seriate, model, threshold and delimit per-metric cores"),
        ("report", "intersect per-metric cores into the final labeling"),
    ]:
        p_stage = sub.add_parser(name, help=help_text)
        _add_config_options(p_stage)
        if name == "dtw":
            p_stage.add_argument("--metric", help="compute a single metric only")

    p_cfg = sub.add_parser("config", help="configuration helpers")
    p_cfg.add_argument("--example", action="store_true", help="print a commented example config")
    return parser


def _parse_fixed_p(pairs: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--p expects METRIC=VALUE, got '{pair}'")
        metric, _, value = pair.partition("=")
        try:
            out[metric.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--p {pair}: {exc}") from exc
    return out


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    if args.config:
        base = PipelineConfig.from_yaml(args.config)
        raw = base.to_dict()
    else:
        raw = None

    def pick(flag, cfg_value):
        return flag if flag is not None else cfg_value

    if raw is None:
        missing = [n for n, v in [("--data-dir", args.data_dir), ("--output-dir", args.output_dir),
                                  ("--start", args.start), ("--end", args.end)] if not v]
        if missing:
            raise ConfigError(f"without --config these flags are required: {', '.join(missing)}")
        base_rbf = RbfSettings()
        cfg = PipelineConfig(
            data_dir=args.data_dir,
            output_dir=args.output_dir,
            date_start=_date(args.start),
            date_end=_date(args.end),
            fx_file=args.fx_file,
            weekly_anchor=pick(args.anchor, "sunday"),
            max_gap=pick(args.max_gap, 4),
            metrics=tuple(args.metrics.split(",")) if args.metrics else ("manhattan", "euclidean", "sqeuclidean"),
            standardize=not args.no_standardize,
            rbf=RbfSettings(
                frame_spacing=pick(args.rbf_spacing, base_rbf.frame_spacing),
                residual_p=pick(args.rbf_residual, base_rbf.residual_p),
                reg_alpha=pick(args.reg_alpha, base_rbf.reg_alpha),
                constant_term=not args.no_constant_term,
            ),
            kink_mode=pick(args.kink_mode, "upper"),
            kink_window=tuple(args.kink_window) if args.kink_window else None,
            fixed_p=_parse_fixed_p(args.p),
        )
        return cfg

    cfg = PipelineConfig(
        data_dir=pick(args.data_dir, base.data_dir),
        output_dir=pick(args.output_dir, base.output_dir),
        date_start=_date(args.start) if args.start else base.date_start,
        date_end=_date(args.end) if args.end else base.date_end,
        fx_file=pick(args.fx_file, base.fx_file),
        weekly_anchor=pick(args.anchor, base.weekly_anchor),
        max_gap=pick(args.max_gap, base.max_gap),
        metrics=tuple(args.metrics.split(",")) if args.metrics else base.metrics,
        standardize=False if args.no_standardize else base.standardize,
        rbf=RbfSettings(
            frame_spacing=pick(args.rbf_spacing, base.rbf.frame_spacing),
            residual_p=pick(args.rbf_residual, base.rbf.residual_p),
            reg_alpha=pick(args.reg_alpha, base.rbf.reg_alpha),
            constant_term=False if args.no_constant_term else base.rbf.constant_term,
        ),
        kink_mode=pick(args.kink_mode, base.kink_mode),
        kink_window=tuple(args.kink_window) if args.kink_window else base.kink_window,
        fixed_p={**base.fixed_p, **_parse_fixed_p(args.p)},
    )
    return cfg


def _date(text: str):
    import datetime as dt

    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise ConfigError(f"bad date '{text}': {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "config":
        if args.example:
            print(EXAMPLE_CONFIG, end="")
            return 0
        parser.error("config: nothing to do (try --example)")

    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            result = run(cfg)
            print(
                f"core: {len(result.intersection_core)} assets, "
                f"satellite: {len(result.satellite)} (report in {cfg.output_dir})"
            )
        elif args.command == "dtw":
            stage_dtw(cfg, only_metric=getattr(args, "metric", None))
        else:
            out = STAGE_COMMANDS[args.command](cfg)
            if args.command == "report":
                write_manifest(cfg, stage_timings=[])
                print(
                    f"core: {len(out.intersection_core)} assets, "
                    f"satellite: {len(out.satellite)} (report in {cfg.output_dir})"
                )
    except CoresatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
