"""Command-line front end: generate / train / sweep / scatter.

Configs are JSON with strict key checking (an unknown key is an error naming
that key), and every physical quantity carries its unit in the key name.
All output files start with a `# softeq <version> seed=<seed>` header line and
contain nothing time-dependent, so identical invocations produce identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .channel import (ChannelConfig, default_nonlinear_profile, empirical_snr_db,
                      generate_frames, noiseless_response, read_frames_csv,
                      write_frames_csv)
from .constellation import make_ask
from .framing import windowize
from .metrics import write_scatter_csv
from .mlp import forward, load
from .trainer import (VARIANTS, ExperimentConfig, TrainingParams, sweep,
                      train, write_run_result, write_sweep_csv)

_TOP_KEYS = {"m", "tap_count", "variant", "run_seed", "n_frames", "frame_len",
             "channel", "training", "out_dir", "data", "sweep"}
_CHANNEL_KEYS = {"isi_taps", "nl_a2", "nl_a3", "snr_db", "seed"}
_TRAINING_KEYS = {"learning_rate", "beta1", "beta2", "epsilon", "batch_size", "epochs"}
_SWEEP_KEYS = {"a3_axis", "variants"}


class ConfigError(Exception):
    pass


def _check_keys(section: dict, allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r} in {where}")


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    _check_keys(raw, _TOP_KEYS, "top level")
    if "channel" in raw:
        if not isinstance(raw["channel"], dict):
            raise ConfigError("config key 'channel' must be an object")
        _check_keys(raw["channel"], _CHANNEL_KEYS, "'channel'")
    if "training" in raw:
        if not isinstance(raw["training"], dict):
            raise ConfigError("config key 'training' must be an object")
        _check_keys(raw["training"], _TRAINING_KEYS, "'training'")
    if "sweep" in raw:
        if not isinstance(raw["sweep"], dict):
            raise ConfigError("config key 'sweep' must be an object")
        _check_keys(raw["sweep"], _SWEEP_KEYS, "'sweep'")
    return raw


def _channel_from(cfg: dict, seed_override: int | None) -> ChannelConfig:
    section = dict(cfg.get("channel", {}))
    ref = default_nonlinear_profile()
    ch = ChannelConfig(
        isi_taps=tuple(section.get("isi_taps", ref.isi_taps)),
        nl_a2=section.get("nl_a2", ref.nl_a2),
        nl_a3=section.get("nl_a3", ref.nl_a3),
        snr_db=section.get("snr_db", ref.snr_db),
        seed=section.get("seed", 0),
    )
    if seed_override is not None and "seed" not in section:
        # dedicated channel seed in the config wins over the master seed
        ch = ChannelConfig(ch.isi_taps, ch.nl_a2, ch.nl_a3, ch.snr_db, seed_override)
    return ch


def _experiment_from(cfg: dict, seed_override: int | None) -> ExperimentConfig:
    training = TrainingParams(**cfg.get("training", {}))
    run_seed = cfg.get("run_seed", 0)
    if seed_override is not None:
        run_seed = seed_override
    return ExperimentConfig(
        m=cfg.get("m", 3),
        channel=_channel_from(cfg, seed_override),
        tap_count=cfg.get("tap_count", 17),
        variant=cfg.get("variant", "eq_msex"),
        run_seed=run_seed,
        n_frames=cfg.get("n_frames", 2),
        frame_len=cfg.get("frame_len", 200_000),
        training=training,
    )


def _say(quiet: bool, msg: str) -> None:
    if not quiet:
        print(msg, flush=True)


def cmd_generate(args) -> int:
    cfg = load_config(args.config)
    m = int(cfg.get("m", 3))
    n_frames = int(cfg.get("n_frames", 2))
    frame_len = int(cfg.get("frame_len", 200_000))
    ch = _channel_from(cfg, args.seed)
    c = make_ask(m)
    frames = generate_frames(c, ch, n_frames, frame_len)
    out = args.out or os.path.join(cfg.get("out_dir", "."), "frames.csv")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    write_frames_csv(out, frames, __version__, ch.seed)
    z = np.concatenate([noiseless_response(f.tx_symbols, ch) for f in frames])
    rx = np.concatenate([f.rx_samples for f in frames])
    _say(args.quiet, f"wrote {out}: frames={n_frames} frame_len={frame_len} "
                     f"empirical_snr_db={empirical_snr_db(z, rx):.3f}")
    return 0


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    exp = _experiment_from(cfg, args.seed)
    c = make_ask(exp.m)
    if "data" in cfg:
        if not os.path.exists(cfg["data"]):
            raise ConfigError(f"data file not found: {cfg['data']}")
        frames = read_frames_csv(cfg["data"], exp.m)
    else:
        frames = generate_frames(c, exp.channel, exp.n_frames, exp.frame_len)
    result = train(exp, frames)
    out_dir = args.out or cfg.get("out_dir", "results")
    write_run_result(result, out_dir, __version__)
    reps = result.eval_reports
    mean = lambda vals: float(np.mean(vals))
    air_vals = [r.air_symbolwise for r in reps if r.air_symbolwise is not None]
    air_txt = f"{mean(air_vals):.4f}" if air_vals else "na"
    _say(args.quiet,
         f"variant={exp.variant} ber={mean([r.ber for r in reps]):.6f} "
         f"air={air_txt} gmi={mean([r.gmi_bitwise for r in reps]):.4f} "
         f"best_epoch={result.best_epoch} out={out_dir}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    section = cfg.get("sweep")
    if not section or "a3_axis" not in section:
        raise ConfigError("sweep command needs config key 'sweep' with 'a3_axis'")
    a3_axis = [float(v) for v in section["a3_axis"]]
    variants = list(section.get("variants", VARIANTS))
    base = _experiment_from(cfg, args.seed)
    out_dir = args.out or cfg.get("out_dir", "results")
    os.makedirs(out_dir, exist_ok=True)
    cells = sweep(base, a3_axis, variants, threads=args.threads)
    for k, cell in enumerate(cells):
        if cell.result is not None:
            sub = os.path.join(out_dir, f"a3_{cell.a3}_{cell.variant}")
            write_run_result(cell.result, sub, __version__)
            reps = cell.result.eval_reports
            _say(args.quiet,
                 f"[{k + 1}/{len(cells)}] a3={cell.a3} variant={cell.variant} "
                 f"ber={float(np.mean([r.ber for r in reps])):.6f} "
                 f"gmi={float(np.mean([r.gmi_bitwise for r in reps])):.4f}")
        else:
            _say(args.quiet, f"[{k + 1}/{len(cells)}] a3={cell.a3} "
                             f"variant={cell.variant} FAILED: {cell.error}")
    csv_path = os.path.join(out_dir, "sweep.csv")
    write_sweep_csv(cells, csv_path, __version__, base.run_seed)
    _say(args.quiet, f"wrote {csv_path}")
    return 0 if any(cell.result is not None for cell in cells) else 1


def cmd_scatter(args) -> int:
    net, extra = load(args.checkpoint)
    if net.output_activation != "linear" or net.layer_sizes[-1] != 1:
        print(f"error: checkpoint {args.checkpoint} is a joint per-bit network; "
              f"it has no equalized signal to scatter", file=sys.stderr)
        return 1
    m = int(extra.get("m", 3))
    frames = read_frames_csv(args.data, m)
    frame = frames[1] if len(frames) > 1 else frames[0]
    t = net.layer_sizes[0]
    if frame.rx_samples.shape[0] < t:
        print(f"error: frame length {frame.rx_samples.shape[0]} shorter than "
              f"the checkpoint's {t}-tap input window", file=sys.stderr)
        return 1
    ds = windowize(frame, t)
    out, _ = forward(net, ds.inputs)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    seed = args.seed if args.seed is not None else 0
    eq_path = os.path.join(out_dir, "scatter_equalized.csv")
    raw_path = os.path.join(out_dir, "scatter_raw.csv")
    write_scatter_csv(eq_path, ds.target_symbols, out[:, 0], __version__, seed)
    write_scatter_csv(raw_path, ds.target_symbols, ds.inputs[:, ds.center],
                      __version__, seed)
    _say(args.quiet, f"wrote {eq_path} and {raw_path} ({len(ds)} symbols)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softeq",
        description="Train and score neural-network equalizers for nonlinear "
                    "ISI channels with soft-decision demapping.")
    parser.add_argument("--version", action="version", version=f"softeq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output file or directory")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel sweep workers (default 1)")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p_gen = sub.add_parser("generate", help="simulate frames and write them as CSV")
    common(p_gen)
    p_gen.set_defaults(func=cmd_generate)

    p_train = sub.add_parser("train", help="train one variant and write its results")
    common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_sweep = sub.add_parser("sweep", help="train every (a3, variant) cell and aggregate")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_scat = sub.add_parser(
        "scatter", help="equalize stored frames with a checkpoint and dump scatter CSVs")
    p_scat.add_argument("--checkpoint", required=True, help="model checkpoint file")
    p_scat.add_argument("--data", required=True, help="frames CSV (from generate)")
    common(p_scat, needs_config=False)
    p_scat.set_defaults(func=cmd_scatter)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FloatingPointError as exc:
        print(f"error: training diverged ({exc})", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
