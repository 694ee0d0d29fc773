"""Simulate the nonlinear ISI channel and look at the unequalized signal.

The reference channel convolves the symbol stream with a short FIR,
applies a cubic memoryless distortion, then adds white Gaussian noise
calibrated to the configured SNR.  The conditional scatter statistics
show how badly the constellation is smeared before any equalization.

Run:  python3 demos/02_channel_and_raw_scatter.py
"""
import numpy as np

from softeq import (default_nonlinear_profile, empirical_snr_db, generate_frames,
                    make_ask, noiseless_response, scatter_stats, windowize)

c = make_ask(3)
cfg = default_nonlinear_profile()          # committed reference constants
frames = generate_frames(c, cfg, n_frames=2, frame_len=50_000)
frame = frames[0]

z = noiseless_response(frame.tx_symbols, cfg)
print(f"channel: taps={cfg.isi_taps} a2={cfg.nl_a2} a3={cfg.nl_a3} "
      f"snr_db={cfg.snr_db}")
print(f"empirical SNR of this frame: {empirical_snr_db(z, frame.rx_samples):.3f} dB")

ds = windowize(frame, 17)
stats = scatter_stats(ds.inputs[:, ds.center], ds.target_symbols, c)
print("\nper-point statistics of the raw center tap:")
print("   tx point      mean      var    count")
for k in range(c.points.size):
    print(f"  {c.points[k]:+.4f}  {stats.mean[k]:+.4f}  {stats.var[k]:.4f}"
          f"  {stats.count[k]:7d}")

# The conditional variance dwarfs the AWGN-only level; that gap is what
# the equalizers in the other demos are asked to close.
lin = 10.0 ** (cfg.snr_db / 10.0)
print(f"\nAWGN-only variance at this SNR would be ~{np.mean(z**2) / lin:.4f}")
print(f"observed mean conditional variance: {np.mean(stats.var):.4f}")
