"""Miniature cost-function comparison over the nonlinearity axis.

Reduced to 40k symbols per frame and 120 epochs so the whole grid runs in
about 90 seconds.  Two of the headline effects already show up at this
scale: the MSE- and MSE-X-trained equalizers track each other in BER, and
both pull far ahead of the linear tap filter once the cubic term matters.

The third effect, the bitwise-rate gap, does not: the MSE net only
develops its overconfident output clustering (and pays for it in GMI)
deep into full-scale training, a couple hundred thousand optimizer steps
in.  To see that one, run the shipped defaults, either

    softeq sweep --config <cfg> --out results/    (see README)

or the acceptance tests, which retrain the committed reference sweep and
assert the gap.

Run:  python3 demos/05_small_sweep.py
"""
import numpy as np

from softeq import ExperimentConfig, TrainingParams, default_nonlinear_profile, sweep
from softeq.channel import DEFAULT_A3_GRID

base = ExperimentConfig(
    m=3,
    channel=default_nonlinear_profile(),
    tap_count=17,
    variant="eq_mse",
    run_seed=1,
    n_frames=2,
    frame_len=40_000,
    training=TrainingParams(epochs=120),
)
cells = sweep(base, list(DEFAULT_A3_GRID), ["linear", "eq_mse", "eq_msex"])

print(f"{'a3':>6}  {'variant':<8} {'ber':>8} {'gmi':>7}")
for cell in cells:
    if cell.result is None:
        print(f"{cell.a3:>6}  {cell.variant:<8} failed: {cell.error}")
        continue
    reps = cell.result.eval_reports
    ber = float(np.mean([r.ber for r in reps]))
    gmi = float(np.mean([r.gmi_bitwise for r in reps]))
    print(f"{cell.a3:>6}  {cell.variant:<8} {ber:8.5f} {gmi:7.4f}")

print("\nNote the two NN costs agree in BER while the linear filter falls")
print("behind as a3 grows; the GMI gap between them needs full-scale")
print("training to form (see module docstring).")
