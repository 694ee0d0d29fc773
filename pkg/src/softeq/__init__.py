"""Neural-network equalization with soft demapping and information-rate metrics."""

from .channel import (ChannelConfig, SymbolFrame, default_nonlinear_profile,
                      empirical_snr_db, generate_frames, noiseless_response)
from .constellation import (Constellation, bit_prior, bit_subset, entropy,
                            make_ask, point_indices)
from .demapper import (DemapperParams, SoftOutput, bit_posteriors_and_llrs,
                       estimate_sigma2, likelihood, log_marginal,
                       log_symbol_posterior, marginal, symbol_posterior)
from .framing import TapLineDataset, split_protocol, windowize
from .losses import LossReport, bce_loss, mse_loss, msex_loss, proxy_ce_loss
from .metrics import (EvalReport, ScatterStats, air_symbolwise, ber,
                      gmi_bitwise, scatter_stats)
from .mlp import Mlp, OptimizerState, backward, forward, init, init_optimizer, load, save, step
from .trainer import (ExperimentConfig, RunResult, SweepCell, TrainingParams,
                      build_variant, evaluate, sweep, train, write_run_result,
                      write_sweep_csv)

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig", "SymbolFrame", "default_nonlinear_profile",
    "empirical_snr_db", "generate_frames", "noiseless_response",
    "Constellation", "bit_prior", "bit_subset", "entropy", "make_ask",
    "point_indices",
    "DemapperParams", "SoftOutput", "bit_posteriors_and_llrs",
    "estimate_sigma2", "likelihood", "log_marginal", "log_symbol_posterior",
    "marginal", "symbol_posterior",
    "TapLineDataset", "split_protocol", "windowize",
    "LossReport", "bce_loss", "mse_loss", "msex_loss", "proxy_ce_loss",
    "EvalReport", "ScatterStats", "air_symbolwise", "ber", "gmi_bitwise",
    "scatter_stats",
    "Mlp", "OptimizerState", "backward", "forward", "init", "init_optimizer",
    "load", "save", "step",
    "ExperimentConfig", "RunResult", "SweepCell", "TrainingParams",
    "build_variant", "evaluate", "sweep", "train", "write_run_result",
    "write_sweep_csv",
    "__version__",
]
