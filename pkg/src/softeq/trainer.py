"""Experiment orchestration: build, train, evaluate, and sweep equalizers.

Five variants are supported. eq_mse / eq_msex / linear produce an equalized
amplitude and are scored through the Gaussian demapper; joint1 / joint2 emit
per-bit probabilities directly and are scored on BER and bitwise GMI only,
since they expose no equalized signal.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import demapper as demapper_mod
from . import losses as losses_mod
from . import metrics as metrics_mod
from . import mlp as mlp_mod
from .channel import ChannelConfig, SymbolFrame, generate_frames
from .constellation import Constellation, bit_prior, entropy, make_ask, point_indices
from .framing import split_protocol, windowize

VARIANTS = ("eq_mse", "eq_msex", "joint1", "joint2", "linear")
HIDDEN_SIZES = (32, 26)
JOINT2_EXTRA_HIDDEN = 16


@dataclass(frozen=True)
class TrainingParams:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 256
    # 300 leaves headroom for the plain-MSE equalizer, the slowest of the
    # variants to converge; at 200 its residual convergence deficit still
    # shows up as a BER offset against the entropy-regularized one.
    epochs: int = 300

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError("invalid training hyperparameters")


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    channel: ChannelConfig
    tap_count: int
    variant: str
    run_seed: int
    n_frames: int = 2
    frame_len: int = 200_000
    training: TrainingParams = field(default_factory=TrainingParams)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if int(self.m) < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if int(self.tap_count) < 1 or int(self.tap_count) % 2 == 0:
            raise ValueError(f"tap_count must be odd and >= 1, got {self.tap_count}")
        if int(self.n_frames) < 2:
            raise ValueError(f"n_frames must be >= 2, got {self.n_frames}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "tap_count", int(self.tap_count))
        object.__setattr__(self, "run_seed", int(self.run_seed))
        object.__setattr__(self, "n_frames", int(self.n_frames))
        object.__setattr__(self, "frame_len", int(self.frame_len))


@dataclass
class RunResult:
    config: ExperimentConfig
    model: mlp_mod.Mlp
    loss_trace: list[float]            # per-epoch mean training loss
    eval_objective_trace: list[float]  # per-epoch objective on pooled eval data
    best_epoch: int
    eval_reports: list[metrics_mod.EvalReport]
    wall_seconds: float
    # Provenance instrumentation: frame_id -> examples consumed by gradient
    # updates. Evaluation frames must never appear here.
    training_read_counts: dict[int, int] = field(default_factory=dict)
    checkpoint_path: str | None = None
    # (reference symbols, equalized outputs) on the first evaluation frame;
    # None for joint variants, which expose no equalized amplitude
    eval_scatter: tuple[np.ndarray, np.ndarray] | None = None


def _derived_seeds(run_seed: int) -> tuple[int, int]:
    s = np.random.SeedSequence(run_seed).generate_state(2, dtype=np.uint64)
    return int(s[0]), int(s[1])


def build_variant(cfg: ExperimentConfig) -> mlp_mod.Mlp:
    """Network for the variant: equalizers end in 1 linear unit, joint nets in
    m sigmoid units, the linear baseline is a single affine tap filter."""
    init_seed, _ = _derived_seeds(cfg.run_seed)
    t = cfg.tap_count
    if cfg.variant in ("eq_mse", "eq_msex"):
        return mlp_mod.init([t, *HIDDEN_SIZES, 1], "linear", init_seed)
    if cfg.variant == "joint1":
        return mlp_mod.init([t, *HIDDEN_SIZES, cfg.m], "sigmoid", init_seed)
    if cfg.variant == "joint2":
        return mlp_mod.init([t, *HIDDEN_SIZES, JOINT2_EXTRA_HIDDEN, cfg.m], "sigmoid", init_seed)
    if cfg.variant == "linear":
        return mlp_mod.init([t, 1], "linear", init_seed)
    raise ValueError(f"unknown variant {cfg.variant!r}")


def _is_joint(variant: str) -> bool:
    return variant.startswith("joint")


def _train_batch_loss(variant: str, outputs: np.ndarray, symbols: np.ndarray,
                      bits: np.ndarray, params) -> losses_mod.LossReport:
    if variant in ("eq_mse", "linear"):
        return losses_mod.mse_loss(outputs[:, 0], symbols)
    if variant == "eq_msex":
        return losses_mod.msex_loss(outputs[:, 0], symbols, params)
    return losses_mod.bce_loss(outputs, bits)


def train(cfg: ExperimentConfig, frames: list[SymbolFrame]) -> RunResult:
    """Train on the first frame, track the objective on the rest, keep the
    best-objective epoch's parameters. Deterministic under cfg.run_seed."""
    t_start = time.perf_counter()
    c = make_ask(cfg.m)
    train_frame, eval_frames = split_protocol(frames)
    train_ds = windowize(train_frame, cfg.tap_count)
    eval_ds = [windowize(f, cfg.tap_count) for f in eval_frames]
    eval_inputs = np.concatenate([d.inputs for d in eval_ds])
    eval_symbols = np.concatenate([d.target_symbols for d in eval_ds])
    eval_bits = np.concatenate([d.target_bits for d in eval_ds])

    net = build_variant(cfg)
    opt = mlp_mod.init_optimizer(net, cfg.training.learning_rate, cfg.training.beta1,
                                 cfg.training.beta2, cfg.training.epsilon)
    _, shuffle_seed = _derived_seeds(cfg.run_seed)
    shuffle_rng = np.random.default_rng(shuffle_seed)

    joint = _is_joint(cfg.variant)
    n_train = len(train_ds)
    reads: dict[int, int] = {train_ds.frame_id: 0}

    # entropy-regularized variant: sigma2 starts from the raw center-tap
    # samples and is refreshed from the equalized training outputs once per
    # epoch, held constant within the epoch
    sigma2 = None
    if cfg.variant == "eq_msex":
        sigma2 = demapper_mod.estimate_sigma2(
            train_ds.inputs[:, train_ds.center], train_ds.target_symbols)

    loss_trace: list[float] = []
    eval_trace: list[float] = []
    best_objective = np.inf
    best_epoch = -1
    best_net = net.copy()

    for epoch in range(cfg.training.epochs):
        order = shuffle_rng.permutation(n_train)
        params = demapper_mod.DemapperParams(c, sigma2) if sigma2 is not None else None
        epoch_loss = 0.0
        try:
            for lo in range(0, n_train, cfg.training.batch_size):
                sel = order[lo:lo + cfg.training.batch_size]
                out, cache = mlp_mod.forward(net, train_ds.inputs[sel])
                report = _train_batch_loss(cfg.variant, out,
                                           train_ds.target_symbols[sel],
                                           train_ds.target_bits[sel], params)
                grad_out = report.output_gradients
                if grad_out.ndim == 1:
                    grad_out = grad_out[:, None]
                grads = mlp_mod.backward(net, cache, grad_out,
                                         grad_wrt_preactivation=joint)
                mlp_mod.step(net, grads, opt)
                reads[train_ds.frame_id] += sel.size
                epoch_loss += report.value * sel.size
        except FloatingPointError as exc:
            raise FloatingPointError(f"epoch {epoch}: {exc}") from exc
        loss_trace.append(epoch_loss / n_train)

        if cfg.variant == "eq_msex":
            train_out, _ = mlp_mod.forward(net, train_ds.inputs)
            sigma2 = demapper_mod.estimate_sigma2(train_out[:, 0], train_ds.target_symbols)

        objective = _eval_objective(cfg.variant, net, c, eval_inputs, eval_symbols, eval_bits)
        eval_trace.append(objective)
        if objective < best_objective:
            best_objective = objective
            best_epoch = epoch
            best_net = net.copy()

    reports = evaluate(best_net, cfg.variant, eval_frames, c)
    eval_scatter = None
    if not joint:
        first = eval_ds[0]
        out, _ = mlp_mod.forward(best_net, first.inputs)
        eval_scatter = (first.target_symbols.copy(), out[:, 0])
    return RunResult(
        config=cfg, model=best_net, loss_trace=loss_trace,
        eval_objective_trace=eval_trace, best_epoch=best_epoch,
        eval_reports=reports, wall_seconds=time.perf_counter() - t_start,
        training_read_counts=reads, eval_scatter=eval_scatter,
    )


def _eval_objective(variant: str, net: mlp_mod.Mlp, c: Constellation,
                    inputs: np.ndarray, symbols: np.ndarray, bits: np.ndarray) -> float:
    """Checkpoint-selection objective on evaluation data, lower is better.

    eq_mse / linear use their own squared-error cost; joint nets use their BCE.
    The entropy-regularized variant is selected on the demapper cross-entropy
    (data-aided sigma2): its own cost compares incoherently across epochs
    because the sigma2 weight moves with the outputs - a degenerate equalizer
    inflates sigma2 and drives the regularizer term to -inf - while the
    cross-entropy is the very quantity that cost minimizes at fixed sigma2 and
    is bounded.
    """
    out, _ = mlp_mod.forward(net, inputs)
    if variant in ("eq_mse", "linear"):
        return losses_mod.mse_loss(out[:, 0], symbols).value
    if variant == "eq_msex":
        s2 = demapper_mod.estimate_sigma2(out[:, 0], symbols)
        params = demapper_mod.DemapperParams(c, s2)
        return losses_mod.proxy_ce_loss(out[:, 0], symbols, params).value
    return losses_mod.bce_loss(out, bits).value


def evaluate(model: mlp_mod.Mlp, variant: str, eval_frames: list[SymbolFrame],
             c: Constellation) -> list[metrics_mod.EvalReport]:
    """Score a trained model on each evaluation frame independently."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    t = model.layer_sizes[0]
    bit1_priors = np.array([bit_prior(c, i) for i in range(c.m)])
    hx = entropy(c)
    reports = []
    for frame in eval_frames:
        ds = windowize(frame, t)
        out, _ = mlp_mod.forward(model, ds.inputs)
        n = len(ds)
        if _is_joint(variant):
            if out.shape[1] != c.m:
                raise ValueError(
                    f"model emits {out.shape[1]} outputs, constellation has {c.m} bit levels")
            p1 = np.clip(out, losses_mod.BCE_PROB_CLAMP, 1.0 - losses_mod.BCE_PROB_CLAMP)
            llrs = np.log(1.0 - p1) - np.log(p1)
            reports.append(metrics_mod.EvalReport(
                ber=metrics_mod.ber(llrs, ds.target_bits),
                gmi_bitwise=metrics_mod.gmi_bitwise(p1, ds.target_bits, bit1_priors),
                n_symbols=n, n_bits=n * c.m, frame_id=frame.frame_id,
            ))
            continue
        if out.shape[1] != 1:
            raise ValueError(f"equalizer model must emit 1 output, got {out.shape[1]}")
        y = out[:, 0]
        sigma2 = demapper_mod.estimate_sigma2(y, ds.target_symbols)
        params = demapper_mod.DemapperParams(c, sigma2)
        logpost = demapper_mod.log_symbol_posterior(params, y)
        idx = point_indices(c, ds.target_symbols)
        ce_nats = float(np.mean(-logpost[np.arange(n), idx]))
        soft = demapper_mod.bit_posteriors_and_llrs(params, y)
        p1 = soft.bit1_posteriors()
        reports.append(metrics_mod.EvalReport(
            ber=metrics_mod.ber(soft.bit_llrs, ds.target_bits),
            gmi_bitwise=metrics_mod.gmi_bitwise(p1, ds.target_bits, bit1_priors),
            n_symbols=n, n_bits=n * c.m,
            air_symbolwise=metrics_mod.air_symbolwise(ce_nats, hx),
            ce_nats=ce_nats, sigma2_used=sigma2,
            scatter=metrics_mod.scatter_stats(y, ds.target_symbols, c),
            frame_id=frame.frame_id,
        ))
    return reports


# Sweep ----------------------------------------------------------------------

@dataclass
class SweepCell:
    a3: float
    variant: str
    config: ExperimentConfig
    result: RunResult | None
    error: str | None


def cell_seeds(base_seed: int, point_idx: int) -> tuple[int, int]:
    """(channel_seed, run_seed) per sweep grid point, derived splittably.

    Deliberately a function of the grid point only: every variant at one
    nonlinearity point trains on the same channel realization with the same
    init and batch order, so cross-variant comparisons isolate the cost
    function rather than seed luck.
    """
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(point_idx,))
    s = ss.generate_state(2, dtype=np.uint64)
    return int(s[0]), int(s[1])


def _run_cell(args: tuple[ExperimentConfig, float, str]) -> SweepCell:
    cfg, a3, variant = args
    try:
        frames = generate_frames(make_ask(cfg.m), cfg.channel, cfg.n_frames, cfg.frame_len)
        result = train(cfg, frames)
        return SweepCell(a3=a3, variant=variant, config=cfg, result=result, error=None)
    except Exception as exc:
        return SweepCell(a3=a3, variant=variant, config=cfg, result=None,
                         error=f"{type(exc).__name__}: {exc}")


def sweep(base: ExperimentConfig, a3_axis, variants=VARIANTS, threads: int = 1) -> list[SweepCell]:
    """Train/evaluate every (a3, variant) cell independently.

    Cell order in the returned list is a3-major and deterministic regardless
    of threads. A failing cell is recorded with its error message; the sweep
    continues.
    """
    a3_axis = list(a3_axis)
    variants = list(variants)
    if not a3_axis or not variants:
        raise ValueError("sweep axes must be non-empty")
    jobs = []
    for i, a3 in enumerate(a3_axis):
        channel_seed, run_seed = cell_seeds(base.run_seed, i)
        for variant in variants:
            ch = replace(base.channel, nl_a3=float(a3), seed=channel_seed)
            cfg = replace(base, channel=ch, variant=variant, run_seed=run_seed)
            jobs.append((cfg, float(a3), variant))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_cell, jobs))
    return [_run_cell(job) for job in jobs]


# Result persistence ---------------------------------------------------------

def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["channel"]["isi_taps"] = list(d["channel"]["isi_taps"])
    return d


def write_run_result(result: RunResult, out_dir, version: str) -> str:
    """Persist one run: config echo, checkpoint, loss trace, reports, scatter.

    Nothing written here depends on wall-clock, so reruns with the same seed
    produce byte-identical files. Returns the checkpoint path.
    """
    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    seed = cfg.run_seed

    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump({"softeq_version": version, "config": _config_dict(cfg),
                   "best_epoch": result.best_epoch},
                  fh, sort_keys=True, indent=2)
        fh.write("\n")

    ckpt_path = os.path.join(out_dir, "checkpoint.bin")
    mlp_mod.save(result.model, ckpt_path,
                 extra={"variant": cfg.variant, "m": cfg.m, "best_epoch": result.best_epoch})
    result.checkpoint_path = ckpt_path

    with open(os.path.join(out_dir, "loss_trace.csv"), "w", newline="") as fh:
        fh.write(f"# softeq {version} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "eval_objective"])
        for e, (tr, ev) in enumerate(zip(result.loss_trace, result.eval_objective_trace)):
            writer.writerow([e, repr(tr), repr(ev)])

    with open(os.path.join(out_dir, "eval_reports.csv"), "w", newline="") as fh:
        fh.write(f"# softeq {version} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(metrics_mod.EVAL_CSV_FIELDS)
        for rep in result.eval_reports:
            writer.writerow(metrics_mod.eval_report_csv_row(rep))

    for rep in result.eval_reports:
        kv_path = os.path.join(out_dir, f"eval_frame_{rep.frame_id}.txt")
        with open(kv_path, "w") as fh:
            fh.write(f"# softeq {version} seed={seed}\n")
            fh.write(metrics_mod.eval_report_kv_text(rep))

    if result.eval_scatter is not None:
        ref, eq = result.eval_scatter
        metrics_mod.write_scatter_csv(os.path.join(out_dir, "scatter.csv"),
                                      ref, eq, version, seed)
    return ckpt_path


SWEEP_CSV_FIELDS = ("variant", "a3", "status", "ber", "air_symbolwise",
                    "gmi_bitwise", "sigma2")


def write_sweep_csv(cells: list[SweepCell], path, version: str, seed: int) -> None:
    """One row per cell; metrics averaged over that cell's evaluation frames."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# softeq {version} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_FIELDS)
        for cell in cells:
            if cell.result is None:
                writer.writerow([cell.variant, repr(cell.a3),
                                 f"error: {cell.error}", "na", "na", "na", "na"])
                continue
            reps = cell.result.eval_reports
            def agg(vals):
                vals = [v for v in vals if v is not None]
                return repr(float(np.mean(vals))) if vals else "na"
            writer.writerow([
                cell.variant, repr(cell.a3), "ok",
                agg([r.ber for r in reps]),
                agg([r.air_symbolwise for r in reps]),
                agg([r.gmi_bitwise for r in reps]),
                agg([r.sigma2_used for r in reps]),
            ])
