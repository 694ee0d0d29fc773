"""Dissect the entropy-regularized squared error and its relatives.

Three facts are shown numerically on one batch:

1. msex = mse_term - entropy_term, and at sigma2 = 0 it IS the plain MSE,
   bit for bit.
2. msex and the proxy cross-entropy differ by an affine map at fixed
   sigma2, so they rank candidate outputs identically.
3. The msex gradient pulls outputs toward the posterior mean E[X|y], not
   toward the transmitted point: the two costs disagree exactly where the
   posterior is multimodal.

Run:  python3 demos/04_cost_function_anatomy.py
"""
import numpy as np

from softeq import (DemapperParams, make_ask, mse_loss, msex_loss,
                    proxy_ce_loss, symbol_posterior)

rng = np.random.default_rng(0)
c = make_ask(3)
x = rng.choice(c.points, size=200, p=c.prior)
y = x + rng.normal(0.0, 0.3, size=200)

# fact 1: degeneration at zero noise power
plain = mse_loss(y, x)
degenerate = msex_loss(y, x, DemapperParams(c, sigma2=0.0))
print(f"mse={plain.value!r}")
print(f"msex(s2=0)={degenerate.value!r}  identical={plain.value == degenerate.value}")
print(f"gradients identical: {np.array_equal(plain.output_gradients, degenerate.output_gradients)}")

# fact 2: affine relation to the proxy cross-entropy
s2 = 0.09
params = DemapperParams(c, sigma2=s2)
mx = msex_loss(y, x, params)
ce = proxy_ce_loss(y, x, params)
predicted = mx.value / (2 * s2) + 0.5 * np.log(2 * np.pi * s2) \
    - np.sum(c.prior * np.log(c.prior))
print(f"\nmsex={mx.value:.6f}  components={ {k: round(v, 6) for k, v in mx.components.items()} }")
print(f"proxy ce={ce.value:.6f}  affine map of msex={predicted:.6f}")

# fact 3: where the pull differs
post = symbol_posterior(params, y)
posterior_mean = post @ c.points
i = int(np.argmax(np.abs(posterior_mean - x)))   # most multimodal sample
print(f"\nsample {i}: tx={x[i]:+.4f} y={y[i]:+.4f} E[X|y]={posterior_mean[i]:+.4f}")
print(f"  mse gradient  {plain.output_gradients[i]:+.6f} (toward tx)")
print(f"  msex gradient {mx.output_gradients[i]:+.6f} (toward posterior mean)")
