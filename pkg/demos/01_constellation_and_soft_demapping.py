"""Walk through the 8-ASK alphabet and the Gaussian soft demapper.

Run:  python3 demos/01_constellation_and_soft_demapping.py
"""
import numpy as np

from softeq import (DemapperParams, bit_posteriors_and_llrs, entropy, make_ask,
                    symbol_posterior)

c = make_ask(3)

print("8-ASK, unit average power, Gray labels (MSB first):")
for k in range(c.points.size):
    bits = "".join(str(b) for b in c.labels[k])
    print(f"  point {c.points[k]:+.4f}  label {bits}  prior {c.prior[k]:.4f}")
print(f"mean power = {np.sum(c.prior * c.points**2):.12f}")
print(f"source entropy H(X) = {entropy(c):.4f} bits")

# One noisy observation, right between two points: the posterior should
# split its mass between them and the LSB should be the least certain bit.
params = DemapperParams(c, sigma2=0.05)
y = np.array([0.5 * (c.points[4] + c.points[5])])
post = symbol_posterior(params, y)
out = bit_posteriors_and_llrs(params, y)
print(f"\nobservation y = {y[0]:+.4f} (midway between two points)")
print("symbol posterior:", np.array2string(post[0], precision=3))
print("bit LLRs        :", np.array2string(out.bit_llrs[0], precision=3))

# BPSK sanity: with two equiprobable points +-1 the LLR has the closed
# form 2y/sigma2, a classic check for any soft demapper.
bpsk_params = DemapperParams(make_ask(1), sigma2=0.05)
ys = np.linspace(-1.5, 1.5, 5)
llr = bit_posteriors_and_llrs(bpsk_params, ys).bit_llrs[:, 0]
print("\nBPSK LLR vs closed form 2y/s2:")
for yv, lv in zip(ys, llr):
    print(f"  y={yv:+.3f}  llr={lv:+.4f}  2y/s2={2 * yv / 0.05:+.4f}")
