import numpy as np
import pytest

from nlsr import (
    ConfigurationError,
    hs_norm,
    l2_norm,
    make_grid,
    rough_data,
    smooth_data,
    to_physical,
    zero_mode,
)

# independent oracle: sqrt(int_0^2pi cos^2(x)/(2+sin x)^2 dx) by adaptive
# quadrature (scipy.integrate.quad, abserr < 1e-12)
RAW_SMOOTH_L2 = 0.9859067652457228


def test_smooth_normalized():
    for K in (64, 256, 4096):
        assert l2_norm(smooth_data(make_grid(K))) == pytest.approx(1.0, abs=1e-14)


def test_smooth_value_at_origin():
    # cos(0)/(2+sin 0) = 1/2 before normalization
    grid = make_grid(256)
    w = to_physical(smooth_data(grid))
    assert w[0] == pytest.approx(0.5 / RAW_SMOOTH_L2, rel=1e-12)


def test_smooth_truncations_agree():
    # shared modes of the K=2^12 and K=2^10 constructions
    a = smooth_data(make_grid(4096))
    b = smooth_data(make_grid(1024))
    ka = np.fft.fftfreq(4096, d=1 / 4096).astype(int)
    kb = np.fft.fftfreq(1024, d=1 / 1024).astype(int)
    ia = {k: i for i, k in enumerate(ka)}
    diffs = [abs(a.coeffs[ia[k]] - b.coeffs[i]) for i, k in enumerate(kb)]
    assert max(diffs) < 1e-12


def test_rough_normalized_and_mean_free():
    grid = make_grid(512)
    st = rough_data(grid, 2.0, 99)
    assert l2_norm(st) == pytest.approx(1.0, abs=1e-14)
    assert zero_mode(st) == 0.0


def test_rough_deterministic():
    grid = make_grid(256)
    a = rough_data(grid, 2.0, 1234)
    b = rough_data(grid, 2.0, 1234)
    assert np.array_equal(a.coeffs, b.coeffs)
    c = rough_data(grid, 2.0, 1235)
    assert not np.array_equal(a.coeffs, c.coeffs)


def test_rough_rejects_small_theta():
    grid = make_grid(64)
    for theta in (0.5, 0.2, -1.0):
        with pytest.raises(ConfigurationError):
            rough_data(grid, theta, 1)


def test_rough_sobolev_growth():
    # theta = 2: H^2 partial sums grow slowly with K, H^4 partial sums blow up
    n2 = {K: hs_norm(rough_data(make_grid(K), 2.0, 31415), 2) for K in (256, 4096)}
    n4 = {K: hs_norm(rough_data(make_grid(K), 2.0, 31415), 4) for K in (256, 4096)}
    assert n4[4096] / n4[256] > 100  # ~ (K2/K1)^{5/2} = 1024
    assert n2[4096] / n2[256] < 10  # ~ (K2/K1)^{1/2} = 4


def test_rough_matches_documented_construction():
    # independent reconstruction: PCG64 uniforms, |k|^{-theta} mask, normalize
    grid = make_grid(256)
    theta, seed = 2.5, 2718
    gen = np.random.Generator(np.random.PCG64(seed))
    u = gen.random(256) + 1j * gen.random(256)
    k = grid.modes.astype(float)
    mask = np.zeros(256)
    mask[k != 0] = np.abs(k[k != 0]) ** -theta
    raw = u * mask
    raw /= np.sqrt(2 * np.pi) * np.linalg.norm(raw)
    st = rough_data(grid, theta, seed)
    assert np.max(np.abs(st.coeffs - raw)) < 1e-16
