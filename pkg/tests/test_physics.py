import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import constants as sc

from ringcav import physics
from ringcav.errors import DomainError
from ringcav.physics import (CODATA, RB85, AtomSpecies, LaserLine, PhysicalConstants,
                             constants, detuning_angular, rabi_from_intensity, rb85,
                             using_constants, wavenumber)


def test_codata_matches_scipy():
    assert CODATA.c == sc.c
    assert CODATA.hbar == sc.hbar
    assert CODATA.kB == sc.k
    assert abs(CODATA.h / (2 * math.pi * CODATA.hbar) - 1) < 1e-12


def test_constants_reject_nonpositive():
    with pytest.raises(DomainError):
        PhysicalConstants.from_hbar(c=-1.0)
    with pytest.raises(DomainError):
        PhysicalConstants(c=sc.c, hbar=sc.hbar, h=2 * sc.h, kB=sc.k, amu=sc.atomic_mass)


def test_using_constants_is_scoped():
    alt = PhysicalConstants.from_hbar(kB=2 * sc.k)
    with using_constants(alt):
        assert constants().kB == 2 * sc.k
    assert constants().kB == sc.k


def test_rb85_defaults():
    assert abs(RB85.mass / (84.9118 * sc.atomic_mass) - 1) < 1e-14
    assert RB85.d2_wavelength == 780.241e-9
    assert RB85.d1_wavelength == 794.979e-9
    assert abs(RB85.gamma - 2 * math.pi * 6.07e6) < 1e-6
    assert RB85.i_sat == 16.7
    assert rb85(CODATA) == RB85


@pytest.mark.parametrize("field,value", [
    ("mass", 0.0), ("gamma", -1.0), ("i_sat", 0.0), ("d1_wavelength", 700e-9),
])
def test_species_invariants(field, value):
    kw = dict(mass=RB85.mass, d2_wavelength=RB85.d2_wavelength,
              d1_wavelength=RB85.d1_wavelength, gamma=RB85.gamma, i_sat=RB85.i_sat)
    kw[field] = value
    with pytest.raises(DomainError):
        AtomSpecies(**kw)


def test_laser_line_invariants():
    with pytest.raises(DomainError):
        LaserLine(wavelength=0.0, power=1.0)
    with pytest.raises(DomainError):
        LaserLine(wavelength=1e-6, power=-1.0)


# wavenumber examples
def test_wavenumber_799():
    assert abs(wavenumber(799e-9) / 7.8640e6 - 1) < 5e-5


def test_wavenumber_unit():
    assert wavenumber(1.0) == 2 * math.pi


def test_wavenumber_780():
    assert abs(wavenumber(780.24e-9) / 8.0528e6 - 1) < 5e-5


def test_wavenumber_domain():
    with pytest.raises(DomainError):
        wavenumber(0.0)


@given(st.floats(1e-9, 1e-3))
def test_wavenumber_times_wavelength(lam):
    assert abs(wavenumber(lam) * lam / (2 * math.pi) - 1) < 1e-12


# detuning examples
def test_detuning_raman_offset():
    line = sc.c / 780.241e-9
    assert abs(detuning_angular(line - 110e6, line) / (-2 * math.pi * 1.1e8) - 1) < 1e-6


def test_detuning_on_resonance():
    assert detuning_angular(3.8e14, 3.8e14) == 0.0


def test_detuning_trap_vs_d2():
    d = detuning_angular(sc.c / 799e-9, sc.c / 780.24e-9)
    assert abs(d / (-2 * math.pi * 9.02e12) - 1) < 2e-3


@given(st.floats(1e14, 1e15), st.floats(1e14, 1e15))
def test_detuning_antisymmetric(a, b):
    assert detuning_angular(a, b) == -detuning_angular(b, a)


# Rabi frequency examples
def test_rabi_dark():
    assert rabi_from_intensity(0.0, RB85) == 0.0


def test_rabi_two_isat():
    assert abs(rabi_from_intensity(2 * RB85.i_sat, RB85) / RB85.gamma - 1) < 1e-15


def test_rabi_paper_beam():
    assert abs(rabi_from_intensity(500.0, RB85) / RB85.gamma - 3.87) < 5e-3


def test_rabi_negative_intensity():
    with pytest.raises(DomainError):
        rabi_from_intensity(-1.0, RB85)


@given(st.floats(1e-6, 1e8))
def test_rabi_sqrt_scaling(i):
    assert abs(rabi_from_intensity(4 * i, RB85) / (2 * rabi_from_intensity(i, RB85)) - 1) < 1e-12


@given(st.floats(0, 1e6), st.floats(1e-6, 1e6))
def test_rabi_monotone(i, di):
    assert rabi_from_intensity(i + di, RB85) > rabi_from_intensity(i, RB85)


def test_module_exports():
    assert physics.RB85 is RB85
    assert np.isfinite(RB85.gamma)
