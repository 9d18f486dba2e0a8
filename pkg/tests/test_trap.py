import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import hermite as H
from scipy import constants as sc
from scipy import integrate

from ringcav import trap
from ringcav.errors import DomainError, UnsupportedRegimeError
from ringcav.physics import RB85
from ringcav.trap import TransverseMode

LAM = 799e-9
KB = sc.k


def grimm_depth(p_per_dir, wv, wh, lam):
    """Independent two-line depth at a balanced standing-wave antinode."""
    c = sc.c
    wl = 2 * np.pi * c / lam
    w2, w1 = 2 * np.pi * c / 780.241e-9, 2 * np.pi * c / 794.979e-9
    g = 2 * np.pi * 6.07e6
    i0 = 4 * 2 * p_per_dir / (np.pi * wv * wh)

    # counter-rotating terms dropped to match the rotating-wave formula
    def rwa(w0, weight):
        return weight * g / (w0 ** 3 * (wl - w0))

    return abs(3 * np.pi * c ** 2 / 2 * (rwa(w2, 2) + rwa(w1, 1)) / 3 * i0)


def test_depth_matches_independent_formula(geo_p):
    for p in (1.0, 5.0, 10.0):
        assert abs(trap.dipole_depth(p, geo_p, LAM) / grimm_depth(p, 129e-6, 124e-6, LAM) - 1) \
            < 1e-9


def test_depth_5w_per_direction_within_factor_two(geo_p):
    # 10 W total circulating power, 5 W in each direction
    u = trap.dipole_depth(5.0, geo_p, LAM) / KB
    assert 0.7e-3 <= u <= 2.8e-3
    assert abs(u / 2.735e-3 - 1) < 1e-3


def test_depth_10w_per_direction_value(geo_p):
    u = trap.dipole_depth(10.0, geo_p, LAM) / KB
    assert abs(u / 5.47e-3 - 1) < 1e-3


@pytest.mark.xfail(strict=True, reason="10 W in each direction gives 5.5 mK, outside the "
                   "factor-2 window; the window holds for 10 W total (see decisions ledger)")
def test_depth_10w_per_direction_literal_window(geo_p):
    u = trap.dipole_depth(10.0, geo_p, LAM) / KB
    assert 0.7e-3 <= u <= 2.8e-3


def test_depth_zero_power(geo_p):
    assert trap.dipole_depth(0.0, geo_p, LAM) == 0.0


def test_single_beam_quarter(geo_p):
    full = trap.dipole_depth(3.0, geo_p, LAM)
    single = trap.dipole_depth(3.0, geo_p, LAM, standing_wave=False)
    assert abs(single * 4 / full - 1) < 1e-14


def test_unequal_powers(geo_p):
    a = trap.antinode_intensity(4.0, geo_p, 1.0)
    assert abs(a / (2 * 9 / (math.pi * 129e-6 * 124e-6)) - 1) < 1e-14


@pytest.mark.parametrize("lam", [780e-9, 790e-9, 500e-9])
def test_blue_or_between_lines_rejected(geo_p, lam):
    with pytest.raises(UnsupportedRegimeError):
        trap.dipole_depth(1.0, geo_p, lam)


def test_secular_example(geo_p):
    ax, rv, rh = trap.secular_frequencies(KB * 0.67e-3, LAM, geo_p)
    assert abs(ax / (2 * math.pi) / 452e3 - 1) < 5e-3
    assert abs(math.sqrt(rv * rh) / (2 * math.pi) / 643 - 1) < 5e-3


def test_ratio_paper(geo_p):
    r = trap.frequency_ratio(LAM, geo_p)
    assert abs(r / 703.3 - 1) < 1e-3
    assert abs(r / (450e3 / 640) - 1) < 0.02
    assert abs(700 / r - 1) < 0.01


@given(st.floats(1e-30, 1e-24))
def test_ratio_independent_of_depth(u):
    from ringcav.cavity import paper_geometry
    geo = paper_geometry("p")
    ax, rv, rh = trap.secular_frequencies(u, LAM, geo)
    assert abs(ax / math.sqrt(rv * rh) / trap.frequency_ratio(LAM, geo) - 1) < 1e-9
    assert ax > rv and ax > rh


@given(st.floats(1e-30, 1e-24))
def test_secular_sqrt_scaling(u):
    from ringcav.cavity import paper_geometry
    geo = paper_geometry("p")
    a = np.array(trap.secular_frequencies(4 * u, LAM, geo))
    b = np.array(trap.secular_frequencies(u, LAM, geo))
    assert np.all(np.abs(a / (2 * b) - 1) < 1e-12)


def test_secular_domain(geo_p):
    with pytest.raises(DomainError):
        trap.secular_frequencies(0.0, LAM, geo_p)


def test_harmonic_matches_finite_difference(geo_p):
    u0 = KB * 1e-3
    m = RB85.mass
    ax, rv, rh = trap.secular_frequencies(u0, LAM, geo_p)

    def curv(f, h):
        return (f(h) - 2 * f(0.0) + f(-h)) / h ** 2

    kz = curv(lambda z: trap.potential(0.0, 0.0, z, u0, LAM, geo_p), 1e-10)
    kx = curv(lambda x: trap.potential(x, 0.0, 0.0, u0, LAM, geo_p), 1e-7)
    ky = curv(lambda y: trap.potential(0.0, y, 0.0, u0, LAM, geo_p), 1e-7)
    assert abs(math.sqrt(kz / m) / ax - 1) < 1e-3
    assert abs(math.sqrt(kx / m) / rh - 1) < 1e-3
    assert abs(math.sqrt(ky / m) / rv - 1) < 1e-3


def test_make_trap_invariants(geo_p):
    st_ = trap.make_trap(5.0, geo_p, LAM)
    assert st_.depth > 0
    assert st_.omega_ax > st_.omega_rad_v > 0
    assert trap.make_trap(0.0, geo_p, LAM).omega_ax == 0.0
    with pytest.raises(DomainError):
        trap.TrapState(LAM, 1.0, geo_p, -1.0, 1.0, 1.0, 1.0)


def test_scattering_zero_and_linear(geo_p):
    assert trap.scattering_rate(0.0, LAM) == 0.0
    u = trap.dipole_depth(5.0, geo_p, LAM)
    assert abs(trap.scattering_rate(2 * u, LAM) / (2 * trap.scattering_rate(u, LAM)) - 1) < 1e-12


def test_scattering_rate_value(geo_p):
    # Gamma_sc ~ (Gamma / hbar Delta_eff) U with Delta_eff from the D-line weighting
    u = trap.dipole_depth(5.0, geo_p, LAM)
    g = trap.scattering_rate(u, LAM)
    assert abs(g / 888.0 - 1) < 2e-3
    c = sc.c
    wl = 2 * np.pi * c / LAM
    d2 = wl - 2 * np.pi * c / 780.241e-9
    d1 = wl - 2 * np.pi * c / 794.979e-9
    d_eff = (2 / d2 + 1 / d1) / (2 / d2 ** 2 + 1 / d1 ** 2)
    approx = RB85.gamma / sc.hbar * u / abs(d_eff)
    assert abs(g / approx - 1) < 0.02


@pytest.mark.xfail(strict=True, reason="the 10-100 /s sanity range is exceeded: about 9e2 /s "
                   "at 2.7 mK depth (see decisions ledger)")
def test_scattering_rate_sanity_range(geo_p):
    g = trap.scattering_rate(trap.dipole_depth(5.0, geo_p, LAM), LAM)
    assert 10 <= g <= 100


# Hermite-Gauss modes
W = 100e-6


def test_tem00_is_gaussian():
    mode = TransverseMode(0, 0, W, 1.2 * W)
    x = np.linspace(-3 * W, 3 * W, 41)
    y = np.linspace(-3 * W, 3 * W, 31)
    grid = trap.hermite_gauss_intensity(mode, x, y, 7.0)
    ref = 7.0 * np.exp(-2 * x[None, :] ** 2 / W ** 2 - 2 * y[:, None] ** 2 / (1.2 * W) ** 2)
    assert np.allclose(grid, ref, rtol=1e-14, atol=0)
    assert trap.hermite_gauss_intensity(mode, [0.0], [0.0], 7.0)[0, 0] == 7.0


def test_tem10_node_on_axis():
    mode = TransverseMode(1, 0, W, W)
    assert trap.hermite_gauss_intensity(mode, [0.0], [0.3 * W], 1.0)[0, 0] == 0.0


@pytest.mark.parametrize("m", range(7))
def test_tem_m0_zero_count(m):
    mode = TransverseMode(m, 0, W, W)
    x = np.linspace(-5 * W, 5 * W, 200001)
    prof = trap.hermite_gauss_intensity(mode, x, [0.0], 1.0)[0]
    amp = np.polynomial.hermite.hermval(np.sqrt(2) * x / W, [0] * m + [1])
    sign_changes = np.count_nonzero(np.signbit(amp[1:]) != np.signbit(amp[:-1]))
    roots = H.hermroots([0] * m + [1]) if m else np.array([])
    assert sign_changes == m == roots.size
    # the intensity vanishes at each analytic root
    for r in roots:
        xr = r * W / np.sqrt(2)
        assert trap.hermite_gauss_intensity(mode, [xr], [0.0], 1.0)[0, 0] < 1e-20


@pytest.mark.parametrize("m", range(5))
@pytest.mark.parametrize("n", range(5))
def test_mode_power_normalisation(m, n):
    wh, wv = 124e-6, 129e-6
    mode = TransverseMode(m, n, wh, wv)
    peak = 2 * 1.0 / (math.pi * wh * wv)  # 1 W
    x = np.linspace(-6 * wh, 6 * wh, 1201)
    y = np.linspace(-6 * wv, 6 * wv, 1201)
    grid = trap.hermite_gauss_intensity(mode, x, y, peak)
    power = integrate.simpson(integrate.simpson(grid, x=x, axis=1), x=y)
    assert abs(power - 1.0) < 5e-3


def test_mode_indices_validated():
    with pytest.raises(DomainError):
        TransverseMode(-1, 0, W, W)


# antinodes
def test_antinode_count_paper():
    n = trap.antinode_count(4.0e-3, LAM)
    assert n == 10012
    assert 0.1 < n / 10000 < 10


def test_antinode_trivial():
    assert trap.antinode_count(0.0, LAM) == 0
    assert trap.antinode_count(LAM / 2, LAM) == 1
    with pytest.raises(DomainError):
        trap.antinode_count(-1.0, LAM)


@settings(max_examples=50)
@given(st.floats(0, 0.01))
def test_antinode_floor(extent):
    assert trap.antinode_count(extent, LAM) == math.floor(2 * extent / LAM * (1 + 1e-12))


def test_envelope_frequency_small(geo_p):
    st_ = trap.make_trap(5.0, geo_p, LAM)
    w_env = trap.envelope_frequency(st_)
    assert 0 < w_env < st_.omega_rad_v
