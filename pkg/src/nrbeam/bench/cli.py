"""Command-line entry point: ``nrbeam <verb> [options]``.

Exit codes: 0 success, 1 configuration error, 2 data/format error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from ..detect.search import NoCellFound
from ..learn.models import KINDS, DetectorModel, ModelFormatError, train_model
from .capture import capture_dataset
from .config import ConfigError, ExperimentConfig, dump_config, load_config
from .dataset_io import DatasetFormatError, read_dataset, write_dataset
from .ingest import DETECTION_COLUMNS, process_capture
from .iq import IqFormatError, ingest_iq
from .report import render_report
from .selector_sim import run_selector_envs, run_selector_sim, write_selector_reports
from .sweep import run_sweep

log = logging.getLogger("nrbeam")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # Usage errors are configuration errors, not argparse's default exit 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _names(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _add_config_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="JSON experiment config; flags below override it")
    g.add_argument("--seed", type=int)
    g.add_argument("--pci", type=int)
    g.add_argument("--mode", dest="scenario_mode", help="channel mode (awgn_only, beam_signature, ...)")
    g.add_argument("--taps", dest="scenario_taps", type=int)
    g.add_argument("--scenario-seed", dest="scenario_seed", type=int)
    g.add_argument("--timing", choices=("genie", "search"))
    g.add_argument("--labeling", choices=("truth", "crc"))
    g.add_argument("--raw", dest="normalized", action="store_const", const=False,
                   help="train on unnormalized features")
    g.add_argument("--power-scales", type=_floats, help="comma-separated received power scales")
    g.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                   help="override any config field, e.g. --set 'hyperparams={\"svc\":{\"C\":10}}'")


def _resolve(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    names = ("seed", "pci", "scenario_mode", "scenario_taps", "scenario_seed", "timing", "labeling",
             "normalized", "power_scales", "sweep", "training_sizes", "trials_per_point", "models",
             "selector_feedback", "selector_model", "selector_steps", "selector_training_size")
    kw = {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}
    cfg = cfg.with_overrides(**kw)
    if args.set:
        d = cfg.to_dict()
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects KEY=JSON, got {item!r}")
            try:
                d[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                d[key.strip()] = value
        cfg = ExperimentConfig.from_dict(d)
    return cfg


def cmd_capture(args) -> int:
    cfg = _resolve(args)
    ds = capture_dataset(cfg, args.snr, args.count, first_trial=args.first_trial)
    write_dataset(ds, args.out)
    dump_config(cfg, str(args.out) + ".config.json")
    print(f"wrote {len(ds)} vectors ({int(ds.labeled.sum())} labeled) to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _resolve(args)
    ds = read_dataset(args.dataset)
    keep = ds.labeled
    if not keep.any():
        raise DatasetFormatError(f"{args.dataset}: no labeled vectors")
    model = train_model(args.model, ds.X[keep], ds.y[keep], ds.lmax, normalized=cfg.normalized,
                        seed=cfg.seed, hyperparams=cfg.hyperparams,
                        provenance={"dataset": str(args.dataset), "digest": ds.digest(), "snr_db": ds.snr_db})
    model.save(args.out)
    dump_config(cfg, str(args.out) + ".config.json")
    print(f"trained {args.model} on {int(keep.sum())} vectors -> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _resolve(args)
    result = run_sweep(cfg, args.out)
    print(render_report(Path(args.out) / "summary.csv"))
    log.info("wall clock: %s", result.timings)
    return EXIT_OK


def cmd_selector_sim(args) -> int:
    cfg = _resolve(args)
    if args.model:
        model = DetectorModel.load(args.model)
        if args.test_snr is None:
            raise ConfigError("--test-snr is required with --model")
        runs = [run_selector_sim(cfg, args.test_snr, model, model.provenance.get("snr_db"))]
        write_selector_reports(cfg, runs, Path(args.out))
    elif args.untrained:
        if args.test_snr is None:
            raise ConfigError("--test-snr is required with --untrained")
        runs = [run_selector_sim(cfg, args.test_snr, None)]
        write_selector_reports(cfg, runs, Path(args.out))
    else:
        run_selector_envs(cfg, args.out)
    print(render_report(Path(args.out) / "selector_summary.json"))
    return EXIT_OK


def cmd_ingest(args) -> int:
    cfg = _resolve(args)
    buf = ingest_iq(args.path, sample_rate=args.sample_rate, center_freq=args.center_freq)
    try:
        ds, rows = process_capture(buf, cfg.frame, max_ssbs=args.max_ssbs)
    except NoCellFound as exc:
        raise DatasetFormatError(str(exc)) from exc
    out = Path(args.out)
    write_dataset(ds, out)
    with open(str(out) + ".detections.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DETECTION_COLUMNS)
        w.writerows(rows)
    dump_config(cfg, str(out) + ".config.json")
    print(f"{len(rows)} SSBs found, {int(ds.labeled.sum())} CRC-verified; dataset -> {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    print(render_report(args.path))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nrbeam", description="SSB beam index detection toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("capture", help="simulate SSBs and write a feature dataset")
    _add_config_args(p)
    p.add_argument("--snr", type=float, required=True, help="per-DMRS-RE SNR in dB")
    p.add_argument("--count", type=int, default=800)
    p.add_argument("--first-trial", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_capture)

    p = sub.add_parser("train", help="train a detector on a dataset file")
    _add_config_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", choices=KINDS, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="fail probability over SNR points and training sizes")
    _add_config_args(p)
    p.add_argument("--snrs", dest="sweep", type=_floats)
    p.add_argument("--training-sizes", type=_ints)
    p.add_argument("--trials", dest="trials_per_point", type=int)
    p.add_argument("--models", type=_names)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selector-sim", help="selector time series over a stream of SSBs")
    _add_config_args(p)
    p.add_argument("--model", help="pretrained model file (otherwise one is trained per environment)")
    p.add_argument("--untrained", action="store_true", help="run without any learner")
    p.add_argument("--test-snr", type=float)
    p.add_argument("--feedback", dest="selector_feedback", choices=("truth", "crc"))
    p.add_argument("--learner", dest="selector_model", choices=KINDS)
    p.add_argument("--steps", dest="selector_steps", type=int)
    p.add_argument("--training-size", dest="selector_training_size", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_selector_sim)

    p = sub.add_parser("ingest", help="find SSBs in a recorded IQ file and extract features")
    _add_config_args(p)
    p.add_argument("path")
    p.add_argument("--sample-rate", type=float)
    p.add_argument("--center-freq", type=float)
    p.add_argument("--max-ssbs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("report", help="print tables from a sweep or selector output")
    p.add_argument("path")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetFormatError, IqFormatError, ModelFormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - top-level boundary
        log.debug("runtime failure", exc_info=True)
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
