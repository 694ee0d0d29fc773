import math
from types import SimpleNamespace

import numpy as np
import pytest

from softeq.constellation import bit_subset, make_ask
from softeq.demapper import (DemapperParams, bit_posteriors_and_llrs,
                             estimate_sigma2, likelihood, log_marginal,
                             marginal, symbol_posterior, write_llr_csv)


def single_point_alphabet():
    # degenerate one-point alphabet for closed-form checks; bypasses the
    # unit-power requirement of the public constructor on purpose
    return SimpleNamespace(points=np.array([0.0]), prior=np.array([1.0]),
                           labels=np.array([[0]], dtype=np.uint8), m=1)


def test_likelihood_normalizing_constant():
    params = DemapperParams(make_ask(1), 1.0 / (2.0 * np.pi))
    assert likelihood(params, 0.5, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_likelihood_one_sigma_point():
    s2 = 0.3
    params = DemapperParams(make_ask(1), s2)
    expected = math.exp(-0.5) / math.sqrt(2 * math.pi * s2)
    assert likelihood(params, 1.0 + math.sqrt(s2), 1.0) == pytest.approx(expected, rel=1e-12)


def test_likelihood_symmetric_in_y_and_x():
    params = DemapperParams(make_ask(2), 0.2)
    assert likelihood(params, 0.3, -0.9) == pytest.approx(likelihood(params, -0.9, 0.3), rel=1e-15)


def test_marginal_single_point_is_gaussian():
    s2 = 0.4
    params = DemapperParams(single_point_alphabet(), s2)
    y = 0.7
    expected = math.exp(-y * y / (2 * s2)) / math.sqrt(2 * math.pi * s2)
    assert marginal(params, y) == pytest.approx(expected, rel=1e-12)


def test_marginal_bpsk_at_origin():
    s2 = 0.25
    params = DemapperParams(make_ask(1), s2)
    expected = math.exp(-1.0 / (2 * s2)) / math.sqrt(2 * math.pi * s2)
    assert marginal(params, 0.0) == pytest.approx(expected, rel=1e-12)


def test_marginal_integrates_to_one():
    from scipy import integrate
    c = make_ask(3)
    s2 = 0.1
    params = DemapperParams(c, s2)
    lo = -20 * math.sqrt(s2) - np.max(np.abs(c.points))
    total, _ = integrate.quad(lambda y: marginal(params, y), lo, -lo, limit=200)
    assert abs(total - 1.0) < 1e-6


def test_posterior_concentrates_at_tiny_sigma():
    c = make_ask(3)
    params = DemapperParams(c, 1e-6)
    post = symbol_posterior(params, float(c.points[5]))
    assert post[5] >= 1.0 - 1e-9


def test_posterior_bpsk_closed_form():
    s2 = 0.3
    params = DemapperParams(make_ask(1), s2)
    for y in (-1.7, -0.2, 0.0, 0.4, 2.5):
        post = symbol_posterior(params, y)
        assert post[1] == pytest.approx(1.0 / (1.0 + math.exp(-2 * y / s2)), rel=1e-12)


def test_posterior_symmetry_between_equidistant_points():
    params = DemapperParams(make_ask(1), 0.2)
    post = symbol_posterior(params, 0.0)
    assert abs(post[0] - post[1]) < 1e-12


def test_posterior_normalization_random_draws():
    rng = np.random.default_rng(0)
    c = make_ask(3)
    for _ in range(100):
        s2 = float(rng.uniform(0.01, 2.0))
        y = rng.normal(scale=3.0, size=100)
        post = symbol_posterior(DemapperParams(c, s2), y)
        np.testing.assert_allclose(post.sum(axis=1), 1.0, rtol=0, atol=1e-12)


def test_bit_posteriors_partition():
    rng = np.random.default_rng(1)
    params = DemapperParams(make_ask(3), 0.15)
    soft = bit_posteriors_and_llrs(params, rng.normal(size=50))
    p1 = soft.bit1_posteriors()
    p0 = 1.0 / (1.0 + np.exp(-soft.bit_llrs))
    np.testing.assert_allclose(p0 + p1, 1.0, rtol=0, atol=1e-12)


def test_bpsk_llr_closed_form():
    s2 = 0.21
    params = DemapperParams(make_ask(1), s2)
    soft = bit_posteriors_and_llrs(params, 0.0)
    assert soft.bit_llrs[0] == pytest.approx(0.0, abs=1e-12)
    ys = np.array([-2.0, -0.3, 0.17, 1.4])
    soft = bit_posteriors_and_llrs(params, ys)
    np.testing.assert_allclose(soft.bit_llrs[:, 0], 2.0 * ys / s2, rtol=0, atol=1e-9)


def test_bit_posteriors_match_bruteforce_subsets():
    rng = np.random.default_rng(2)
    c = make_ask(3)
    params = DemapperParams(c, 0.09)
    ys = rng.normal(size=20)
    soft = bit_posteriors_and_llrs(params, ys)
    post = symbol_posterior(params, ys)
    for i in range(c.m):
        brute1 = post[:, bit_subset(c, i, 1)].sum(axis=1)
        np.testing.assert_allclose(soft.bit1_posteriors()[:, i], brute1,
                                   rtol=0, atol=1e-12)


def test_llrs_finite_for_extreme_inputs():
    params = DemapperParams(make_ask(3), 0.05)
    soft = bit_posteriors_and_llrs(params, np.array([-1e3, 1e3, 1e6]))
    assert np.all(np.isfinite(soft.bit_llrs))


def test_posterior_scale_covariance():
    c = make_ask(3)
    scale = 3.7
    scaled = SimpleNamespace(points=c.points * scale, prior=c.prior,
                             labels=c.labels, m=c.m)
    rng = np.random.default_rng(3)
    ys = rng.normal(size=30)
    base = symbol_posterior(DemapperParams(c, 0.12), ys)
    cov = symbol_posterior(DemapperParams(scaled, 0.12 * scale ** 2), ys * scale)
    np.testing.assert_allclose(base, cov, rtol=0, atol=1e-9)


def test_probability_ops_require_positive_sigma2():
    params = DemapperParams(make_ask(1), 0.0)  # admitted for the cost-function limit
    with pytest.raises(ValueError):
        marginal(params, 0.1)
    with pytest.raises(ValueError):
        symbol_posterior(params, 0.1)
    with pytest.raises(ValueError):
        DemapperParams(make_ask(1), -0.1)
    with pytest.raises(ValueError):
        DemapperParams(make_ask(1), np.nan)


def test_estimate_sigma2_floor_and_offset():
    x = np.linspace(-1, 1, 100)
    assert estimate_sigma2(x, x) == 1e-12
    assert estimate_sigma2(x + 0.2, x) == pytest.approx(0.04, rel=1e-12)


def test_estimate_sigma2_monte_carlo():
    rng = np.random.default_rng(4)
    x = rng.choice([-1.0, 1.0], size=1_000_000)
    y = x + rng.normal(scale=0.2, size=x.size)
    assert 0.039 <= estimate_sigma2(y, x) <= 0.041


def test_estimate_sigma2_validation():
    with pytest.raises(ValueError):
        estimate_sigma2(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        estimate_sigma2(np.zeros(1), np.zeros(1))
    with pytest.raises(ValueError):
        estimate_sigma2(np.zeros(0), np.zeros(0))


def test_llr_csv_dump(tmp_path):
    rng = np.random.default_rng(5)
    params = DemapperParams(make_ask(3), 0.2)
    soft = bit_posteriors_and_llrs(params, rng.normal(size=10))
    path = tmp_path / "llrs.csv"
    write_llr_csv(path, soft.bit_llrs, "0.1.0", seed=5)
    lines = path.read_text().splitlines()
    assert lines[0] == "# softeq 0.1.0 seed=5"
    assert lines[1] == "sample_index,bit_index,llr"
    assert len(lines) == 2 + 10 * 3
    # floats round-trip through repr
    sample, bit, llr = lines[2].split(",")
    assert float(llr) == soft.bit_llrs[int(sample), int(bit)]
