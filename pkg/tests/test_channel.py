import numpy as np
import pytest

from softeq.channel import (ChannelConfig, default_nonlinear_profile,
                            empirical_snr_db, generate_frames,
                            noiseless_response, read_frames_csv,
                            write_frames_csv)
from softeq.constellation import make_ask


def identity_config(snr_db=np.inf, seed=0):
    return ChannelConfig(isi_taps=(1.0,), nl_a2=0.0, nl_a3=0.0,
                         snr_db=snr_db, seed=seed)


def test_identity_channel_noiseless_passthrough():
    c = make_ask(3)
    frames = generate_frames(c, identity_config(), 2, 500)
    for fr in frames:
        np.testing.assert_array_equal(fr.rx_samples, fr.tx_symbols)


def test_symbols_are_constellation_members():
    c = make_ask(2)
    frames = generate_frames(c, identity_config(seed=3), 2, 300)
    assert set(np.unique(frames[0].tx_symbols)) <= set(c.points)
    # labels consistent with the drawn points
    for fr in frames:
        idx = np.searchsorted(c.points, fr.tx_symbols)
        np.testing.assert_array_equal(fr.tx_bits, c.labels[idx])


def test_same_seed_is_bit_identical():
    c = make_ask(3)
    cfg = default_nonlinear_profile(a3=0.1, seed=42)
    a = generate_frames(c, cfg, 3, 400)
    b = generate_frames(c, cfg, 3, 400)
    for fa, fb in zip(a, b):
        np.testing.assert_array_equal(fa.rx_samples, fb.rx_samples)
        np.testing.assert_array_equal(fa.tx_symbols, fb.tx_symbols)


def test_different_seeds_differ():
    c = make_ask(3)
    a = generate_frames(c, identity_config(snr_db=20, seed=1), 2, 400)
    b = generate_frames(c, identity_config(snr_db=20, seed=2), 2, 400)
    assert not np.array_equal(a[0].rx_samples, b[0].rx_samples)


def test_configured_snr_within_tenth_db():
    c = make_ask(3)
    frames = generate_frames(c, identity_config(snr_db=10.0, seed=7), 2, 500_000)
    tx = np.concatenate([f.tx_symbols for f in frames])
    rx = np.concatenate([f.rx_samples for f in frames])
    assert abs(empirical_snr_db(tx, rx) - 10.0) < 0.1


def test_noise_is_gaussian_with_configured_variance():
    # identity channel: configured sigma^2 equals mean(tx^2) / 10^(snr/10)
    from scipy import stats
    c = make_ask(3)
    cfg = identity_config(snr_db=15.0, seed=5)
    frames = generate_frames(c, cfg, 2, 50_000)
    tx = np.concatenate([f.tx_symbols for f in frames])
    noise = np.concatenate([f.rx_samples for f in frames]) - tx
    sigma_cfg = np.sqrt(np.mean(tx ** 2) / 10 ** 1.5)
    _, pvalue = stats.kstest(noise / sigma_cfg, "norm")
    assert pvalue > 0.01


def test_noise_is_white():
    c = make_ask(3)
    cfg = ChannelConfig(isi_taps=(0.9, 0.3, -0.1), nl_a2=0.0, nl_a3=0.1,
                        snr_db=12.0, seed=9)
    frames = generate_frames(c, cfg, 2, 500_000)
    n_all = []
    for fr in frames:
        z = noiseless_response(fr.tx_symbols, cfg)
        n_all.append(fr.rx_samples - z)
    n = np.concatenate(n_all)
    n = n - n.mean()
    denom = float(np.dot(n, n))
    for lag in range(1, 11):
        rho = float(np.dot(n[:-lag], n[lag:])) / denom
        assert abs(rho) < 3.0 / np.sqrt(n.size)


def test_isi_and_cubic_shapes():
    cfg = ChannelConfig(isi_taps=(1.0, 0.5), nl_a2=0.0, nl_a3=0.0,
                        snr_db=np.inf, seed=0)
    x = np.array([1.0, 1.0, 1.0, 1.0])
    np.testing.assert_allclose(noiseless_response(x, cfg), [1.0, 1.5, 1.5, 1.5])
    cfg3 = ChannelConfig(isi_taps=(1.0,), nl_a2=0.2, nl_a3=0.1, snr_db=np.inf, seed=0)
    x = np.array([2.0, -1.0])
    np.testing.assert_allclose(noiseless_response(x, cfg3),
                               [2.0 + 0.2 * 4 + 0.1 * 8, -1.0 + 0.2 - 0.1])


def test_nonlinear_profile_defaults():
    cfg = default_nonlinear_profile()
    assert cfg.isi_taps[0] != 0.0
    assert default_nonlinear_profile(a3=0.07).nl_a3 == 0.07
    assert default_nonlinear_profile(seed=5).seed == 5


def test_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(isi_taps=(), nl_a2=0.0, nl_a3=0.0, snr_db=10, seed=0)
    with pytest.raises(ValueError):
        ChannelConfig(isi_taps=(0.0, 1.0), nl_a2=0.0, nl_a3=0.0, snr_db=10, seed=0)
    with pytest.raises(ValueError):
        ChannelConfig(isi_taps=(1.0,), nl_a2=0.0, nl_a3=0.0, snr_db=np.nan, seed=0)
    with pytest.raises(ValueError):
        ChannelConfig(isi_taps=(1.0,), nl_a2=0.0, nl_a3=0.0, snr_db=-np.inf, seed=0)
    with pytest.raises(ValueError):
        ChannelConfig(isi_taps=(1.0,), nl_a2=np.inf, nl_a3=0.0, snr_db=10, seed=0)


def test_generate_frames_preconditions():
    c = make_ask(2)
    cfg = identity_config()
    with pytest.raises(ValueError):
        generate_frames(c, cfg, 1, 100)   # need train + eval
    cfg3 = ChannelConfig(isi_taps=(1.0, 0.2, 0.1), nl_a2=0.0, nl_a3=0.0,
                         snr_db=np.inf, seed=0)
    with pytest.raises(ValueError):
        generate_frames(c, cfg3, 2, 29)   # < 10x tap count


def test_empirical_snr_validation():
    with pytest.raises(ValueError):
        empirical_snr_db(np.zeros(3), np.zeros(4))
    assert empirical_snr_db(np.ones(4), np.ones(4)) == np.inf


def test_csv_roundtrip_bit_exact(tmp_path):
    c = make_ask(3)
    frames = generate_frames(c, default_nonlinear_profile(a3=0.12, seed=21), 2, 200)
    path = tmp_path / "frames.csv"
    write_frames_csv(path, frames, "0.1.0", 21)
    back = read_frames_csv(path, m=3)
    assert len(back) == 2
    for orig, rt in zip(frames, back):
        assert rt.frame_id == orig.frame_id
        np.testing.assert_array_equal(rt.tx_symbols, orig.tx_symbols)
        np.testing.assert_array_equal(rt.tx_bits, orig.tx_bits)
        np.testing.assert_array_equal(rt.rx_samples, orig.rx_samples)
    first = path.read_text().splitlines()[0]
    assert first.startswith("# softeq 0.1.0 seed=21")


def test_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_frames_csv(path, m=2)
