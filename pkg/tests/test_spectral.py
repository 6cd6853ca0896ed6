import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsr import (
    ConfigurationError,
    NonlinearityParams,
    SpectralState,
    apply_phi,
    conjugate,
    energy,
    free_flow,
    hs_norm,
    inv_derivative,
    l2_norm,
    make_grid,
    phi1,
    phi2,
    pointwise_power_abs,
    pointwise_product,
    to_frequency,
    to_physical,
    zero_mode,
)
from nlsr.spectral import derivative, embed, restrict

from conftest import random_state

SQRT_2PI = 2.5066282746310002


def unit_mode(grid, k, amp=1.0):
    c = np.zeros(grid.K, dtype=np.complex128)
    c[k % grid.K] = amp
    return SpectralState(c, grid)


# ---------------------------------------------------------------- grid

def test_make_grid_k4():
    g = make_grid(4)
    assert list(g.modes) == [0, 1, -2, -1]
    assert np.allclose(g.nodes, [0, np.pi / 2, np.pi, 3 * np.pi / 2])


def test_make_grid_k8_modes():
    assert list(make_grid(8).modes) == [0, 1, 2, 3, -4, -3, -2, -1]


def test_make_grid_mode_coverage():
    g = make_grid(64)
    assert sorted(g.modes) == list(range(-32, 32))


@pytest.mark.parametrize("K", [6, 3, 2, 0, -8, 4.5])
def test_make_grid_rejects_bad_K(K):
    with pytest.raises(ConfigurationError):
        make_grid(K)


# ------------------------------------------------------------- transforms

def test_constant_field(grid):
    st = to_frequency(np.full(grid.K, 2.5 - 1.0j), grid)
    assert st.coeffs[0] == pytest.approx(2.5 - 1.0j)
    assert np.max(np.abs(st.coeffs[1:])) < 1e-15


def test_single_harmonic(grid):
    st = to_frequency(np.exp(1j * grid.nodes), grid)
    assert st.coeffs[1] == pytest.approx(1.0)
    mask = np.ones(grid.K, bool)
    mask[1] = False
    assert np.max(np.abs(st.coeffs[mask])) < 1e-15


def test_round_trip(grid, rng):
    w = rng.standard_normal(grid.K) + 1j * rng.standard_normal(grid.K)
    back = to_physical(to_frequency(w, grid))
    assert np.max(np.abs(back - w)) / np.max(np.abs(w)) < 1e-13


def test_length_mismatch(grid):
    with pytest.raises(ConfigurationError):
        to_frequency(np.zeros(grid.K + 1), grid)


# ------------------------------------------------------------- free flow

def test_free_flow_t0_identity(grid, rng):
    v = random_state(grid, rng)
    assert free_flow(v, 0.0) is v


def test_free_flow_single_mode_pi(grid):
    out = free_flow(unit_mode(grid, 1), np.pi)
    assert out.coeffs[1] == pytest.approx(-1.0, abs=1e-14)


def test_free_flow_isometry(grid, rng):
    v = random_state(grid, rng)
    for t in (0.17, -2.3, 1e4, -9999.75):
        w = free_flow(v, t)
        assert abs(l2_norm(w) - l2_norm(v)) / l2_norm(v) < 1e-13
        assert abs(hs_norm(w, 2) - hs_norm(v, 2)) / hs_norm(v, 2) < 1e-13


@settings(max_examples=50, deadline=None)
@given(si=st.integers(-2 ** 21, 2 ** 21), ti=st.integers(-2 ** 21, 2 ** 21))
def test_free_flow_semigroup(si, ti):
    # dyadic times keep s + t exact in floating point
    s, t = si / 2.0 ** 18, ti / 2.0 ** 18
    grid = make_grid(64)
    v = random_state(grid, np.random.default_rng(7))
    lhs = free_flow(free_flow(v, s), t)
    rhs = free_flow(v, s + t)
    assert l2_norm(lhs - rhs) < 1e-12


# ------------------------------------------------------------- phi filters

def test_phi_values_at_zero():
    assert phi1(np.array([0.0]))[0] == pytest.approx(1.0)
    assert phi2(np.array([0.0]))[0] == pytest.approx(0.5)


def test_phi_frozen_values():
    # independently evaluated closed forms (30-digit arithmetic)
    assert phi1(np.array([1j * np.pi]))[0] == pytest.approx(
        0.63661977236758134308j, abs=1e-15)
    assert phi2(np.array([0.6j]))[0] == pytest.approx(
        0.45589194151860975434 + 0.19289195680341216349j, abs=1e-15)


def test_phi_series_closed_form_seam():
    # values straddling the series/closed-form switch agree
    for mag in (0.0499, 0.05, 0.0501):
        for z in (1j * mag, -1j * mag, mag + 0j):
            a1 = phi1(np.array([z * 1.0000001]))[0]
            b1 = phi1(np.array([z]))[0]
            assert abs(a1 - b1) < 1e-7  # continuity across the seam
    # direct small-z against high-order quadrature identity phi1' = phi2
    z = np.array([1e-9j, 1e-6j, 1e-3j])
    assert np.allclose(phi1(z), 1 + z / 2 + z ** 2 / 6, atol=1e-15)
    assert np.allclose(phi2(z), 0.5 + z / 3 + z ** 2 / 8, atol=1e-15)


def test_apply_phi_mode0(grid):
    st = unit_mode(grid, 0, 2.0)
    assert apply_phi(st, 1, 0.3).coeffs[0] == pytest.approx(2.0)
    assert apply_phi(st, 2, 0.3).coeffs[0] == pytest.approx(1.0)


def test_apply_phi_closed_form(grid):
    # mode 1 with c = pi/2: phi_1(i pi) = (e^{i pi} - 1)/(i pi) = 2i/pi
    out = apply_phi(unit_mode(grid, 1), 1, np.pi / 2)
    assert out.coeffs[1] == pytest.approx(2j / np.pi, abs=1e-14)


def test_apply_phi_bad_index(grid):
    with pytest.raises(ConfigurationError):
        apply_phi(unit_mode(grid, 1), 3, 0.1)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(-1e4, 1e4), y=st.floats(-1e4, 1e4))
def test_phi_lemma_inequalities(x, y):
    zx, zy = np.array([1j * x]), np.array([1j * y])
    d = abs(x - y)
    tol = 1e-12
    assert abs(phi1(zx) - phi1(zy))[0] <= d / 2 + tol
    assert abs(phi2(zx) - phi2(zy))[0] <= d / 3 + tol
    assert abs(np.exp(1j * x) * phi1(zx) - np.exp(1j * y) * phi1(zy))[0] <= 2 * d + tol
    assert abs(np.exp(1j * x) * phi2(zx) - np.exp(1j * y) * phi2(zy))[0] <= d + tol


def test_phi_bounds_bulk(rng):
    x = rng.uniform(-1e3, 1e3, 1_000_000)
    assert np.max(np.abs(phi1(1j * x))) <= 1 + 1e-12
    assert np.max(np.abs(phi2(1j * x))) <= 0.5 + 1e-12


# ------------------------------------------------- antiderivative, zero mode

def test_inv_derivative_single_mode(grid):
    out = inv_derivative(unit_mode(grid, 1))
    assert out.coeffs[1] == pytest.approx(-1j)


def test_inv_derivative_constant(grid):
    out = inv_derivative(unit_mode(grid, 0, 3.0))
    assert np.all(out.coeffs == 0)


def test_inv_derivative_left_inverse(grid, rng):
    v = random_state(grid, rng)
    back = derivative(inv_derivative(v))
    expected = v.coeffs.copy()
    expected[0] = 0.0
    assert np.max(np.abs(back.coeffs - expected)) < 1e-14


def test_inv_derivative_zero_mean(grid, rng):
    assert zero_mode(inv_derivative(random_state(grid, rng))) == 0.0


def test_zero_mode(grid):
    assert zero_mode(unit_mode(grid, 0, 1.5 + 0.5j)) == pytest.approx(1.5 + 0.5j)
    assert zero_mode(unit_mode(grid, 1)) == 0.0


def test_zero_mode_conjugation(grid, rng):
    v = random_state(grid, rng)
    assert zero_mode(conjugate(v)) == pytest.approx(np.conj(zero_mode(v)))


# ------------------------------------------------------------------ norms

def test_l2_norm_plancherel(grid):
    assert l2_norm(unit_mode(grid, 0)) == pytest.approx(SQRT_2PI)
    assert hs_norm(unit_mode(grid, 0), 1) == pytest.approx(SQRT_2PI)


def test_hs_norm_mode1():
    g = make_grid(8)
    assert hs_norm(unit_mode(g, 1), 1) == pytest.approx(3.5449077018110318)


def test_hs_norm_rejects_negative_s(grid):
    with pytest.raises(ConfigurationError):
        hs_norm(unit_mode(grid, 0), -1.0)


def test_l2_matches_physical_quadrature(grid, rng):
    v = random_state(grid, rng)
    w = to_physical(v)
    quad = np.sqrt(2 * np.pi / grid.K) * np.linalg.norm(w)
    assert l2_norm(v) == pytest.approx(quad, rel=1e-13)


# ------------------------------------------------------------- products

def test_product_of_harmonics(grid):
    out = pointwise_product(unit_mode(grid, 1), unit_mode(grid, 2))
    assert out.coeffs[3] == pytest.approx(1.0)
    mask = np.ones(grid.K, bool)
    mask[3] = False
    assert np.max(np.abs(out.coeffs[mask])) < 1e-15


def test_conjugate_flips_modes(grid):
    out = conjugate(unit_mode(grid, 1, 2.0 + 1.0j))
    assert out.coeffs[-1] == pytest.approx(2.0 - 1.0j)


def test_conjugate_matches_physical(grid, rng):
    v = random_state(grid, rng)
    direct = to_frequency(np.conj(to_physical(v)), grid)
    assert np.max(np.abs(conjugate(v).coeffs - direct.coeffs)) < 1e-15


def test_power_abs_plane_wave(grid):
    A = 0.8 - 0.5j
    out = pointwise_power_abs(unit_mode(grid, 1, A), 1)
    assert out.coeffs[1] == pytest.approx(abs(A) ** 2 * A)


def test_grid_mismatch_rejected(rng):
    a = random_state(make_grid(64), rng)
    b = random_state(make_grid(128), rng)
    with pytest.raises(ConfigurationError):
        pointwise_product(a, b)


# ------------------------------------------------------------------ energy

def test_energy_zero(grid, params):
    assert energy(SpectralState(np.zeros(grid.K, complex), grid), params) == 0.0


def test_energy_constant(grid, params):
    c = 1.3 - 0.7j
    # no gradient: E = 2 pi |c|^4 / 2
    assert energy(unit_mode(grid, 0, c), params) == pytest.approx(
        np.pi * abs(c) ** 4, rel=1e-13)


def test_energy_plane_wave(grid):
    A = 0.7 + 0.1j
    par = NonlinearityParams(1.0, 1)
    # 2 pi (|A|^2 + |A|^4/2) = 3.9269908169872414 for |A|^2 = 1/2
    assert energy(unit_mode(grid, 1, A), par) == pytest.approx(
        3.9269908169872414, rel=1e-12)


# ------------------------------------------------------------- embed/restrict

def test_embed_restrict_round_trip(rng):
    g1, g2 = make_grid(64), make_grid(256)
    v = random_state(g1, rng)
    up = embed(v, g2)
    assert hs_norm(up, 3) == pytest.approx(hs_norm(v, 3), rel=1e-13)
    back = restrict(up, g1)
    assert np.array_equal(back.coeffs, v.coeffs)


def test_params_validation():
    with pytest.raises(ConfigurationError):
        NonlinearityParams(lam=0.0, p=1)
    with pytest.raises(ConfigurationError):
        NonlinearityParams(lam=1.0, p=0)
