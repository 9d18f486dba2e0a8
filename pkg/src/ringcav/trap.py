"""Intracavity standing-wave dipole trap.

Depth uses the far-detuned two-line formula (D2 weight 2, D1 weight 1,
rotating-wave approximation).  Gravity is neglected: m*g*w is three orders
of magnitude below the depth for the geometries handled here.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, UnsupportedRegimeError
from .physics import RB85, constants


@dataclass(frozen=True)
class TrapState:
    wavelength: float
    circulating_power_per_direction: float
    geometry: object
    depth: float
    omega_ax: float
    omega_rad_v: float
    omega_rad_h: float

    def __post_init__(self):
        if not self.depth >= 0:
            raise DomainError("trap depth must be non-negative")

    @property
    def omega_rad_mean(self):
        return math.sqrt(self.omega_rad_v * self.omega_rad_h)


@dataclass(frozen=True)
class TransverseMode:
    m_index: int
    n_index: int
    waist_h: float
    waist_v: float

    def __post_init__(self):
        if self.m_index < 0 or self.n_index < 0:
            raise DomainError("mode indices must be non-negative")
        if not (self.waist_h > 0 and self.waist_v > 0):
            raise DomainError("mode waists must be positive")


def _line_terms(wavelength, species):
    c = constants().c
    if not wavelength > species.d1_wavelength:
        raise UnsupportedRegimeError(
            f"trap wavelength {wavelength * 1e9:.3f} nm is not red of both D lines"
        )
    w_l = 2 * math.pi * c / wavelength
    w_2 = 2 * math.pi * c / species.d2_wavelength
    w_1 = 2 * math.pi * c / species.d1_wavelength
    return (w_2, w_l - w_2), (w_1, w_l - w_1)


def _polarizability_factor(wavelength, species):
    # U = factor * I; negative for red detuning.
    (w2, d2), (w1, d1) = _line_terms(wavelength, species)
    c = constants().c
    return math.pi * c ** 2 * species.gamma / 2 * (2 / (w2 ** 3 * d2) + 1 / (w1 ** 3 * d1))


def antinode_intensity(power_per_direction, geometry, power_backward=None):
    """Peak intensity where the two counter-propagating beams interfere."""
    if power_backward is None:
        power_backward = power_per_direction
    if power_per_direction < 0 or power_backward < 0:
        raise DomainError("powers must be non-negative")
    area = math.pi * geometry.waist_v * geometry.waist_h
    return 2 * (math.sqrt(power_per_direction) + math.sqrt(power_backward)) ** 2 / area


def dipole_depth(power_per_direction, geometry, wavelength, species=RB85,
                 power_backward=None, standing_wave=True):
    """Well depth |U0| in J at a standing-wave antinode.

    ``standing_wave=False`` gives the single travelling-beam depth, a quarter
    of the balanced antinode value.
    """
    factor = _polarizability_factor(wavelength, species)
    if standing_wave:
        intensity = antinode_intensity(power_per_direction, geometry, power_backward)
    else:
        if power_per_direction < 0:
            raise DomainError("power must be non-negative")
        intensity = 2 * power_per_direction / (math.pi * geometry.waist_v * geometry.waist_h)
    return abs(factor * intensity)


def secular_frequencies(depth, wavelength, geometry, species=RB85):
    """Harmonic (omega_ax, omega_rad_v, omega_rad_h) in rad/s at a lattice site."""
    if not depth > 0:
        raise DomainError("depth must be positive")
    k = 2 * math.pi / wavelength
    m = species.mass
    omega_ax = k * math.sqrt(2 * depth / m)
    omega_v = math.sqrt(4 * depth / (m * geometry.waist_v ** 2))
    omega_h = math.sqrt(4 * depth / (m * geometry.waist_h ** 2))
    return omega_ax, omega_v, omega_h


def frequency_ratio(wavelength, geometry):
    """omega_ax / sqrt(omega_rad_v omega_rad_h); the depth drops out."""
    k = 2 * math.pi / wavelength
    return k * math.sqrt(geometry.waist_v * geometry.waist_h) / math.sqrt(2)


def make_trap(power_per_direction, geometry, wavelength, species=RB85):
    depth = dipole_depth(power_per_direction, geometry, wavelength, species)
    if depth > 0:
        ax, rv, rh = secular_frequencies(depth, wavelength, geometry, species)
    else:
        ax = rv = rh = 0.0
    return TrapState(wavelength, power_per_direction, geometry, depth, ax, rv, rh)


def potential(x, y, z, depth, wavelength, geometry):
    """Full lattice potential near the waist, -U0 cos^2(kz) exp(-2x^2/w_h^2 - 2y^2/w_v^2).

    ``x`` is horizontal, ``y`` vertical, ``z`` along the cavity axis.
    """
    k = 2 * math.pi / wavelength
    x, y, z = np.asarray(x), np.asarray(y), np.asarray(z)
    return -depth * np.cos(k * z) ** 2 * np.exp(
        -2 * x ** 2 / geometry.waist_h ** 2 - 2 * y ** 2 / geometry.waist_v ** 2
    )


def rayleigh_range(wavelength, geometry):
    """Effective Rayleigh range of the astigmatic waist for the axial envelope."""
    zv = math.pi * geometry.waist_v ** 2 / wavelength
    zh = math.pi * geometry.waist_h ** 2 / wavelength
    return 1 / math.sqrt(0.5 * (1 / zv ** 2 + 1 / zh ** 2))


def envelope_frequency(trap, species=RB85):
    """Axial frequency of the lattice-site-averaged potential -U0/2 / (1 + z^2/zR^2)."""
    z_r = rayleigh_range(trap.wavelength, trap.geometry)
    return math.sqrt(trap.depth / (species.mass * z_r ** 2))


def scattering_rate(depth, wavelength, species=RB85):
    """Photon scattering rate (1/s) of an atom sitting in a well of ``depth``.

    Same D1/D2 weighting as :func:`dipole_depth`, evaluated at the intensity
    that produces this depth.
    """
    if depth < 0:
        raise DomainError("depth must be non-negative")
    if depth == 0:
        return 0.0
    (w2, d2), (w1, d1) = _line_terms(wavelength, species)
    c = constants().c
    hbar = constants().hbar
    intensity = depth / abs(_polarizability_factor(wavelength, species))
    g = species.gamma
    return (math.pi * c ** 2 * g ** 2 / (2 * hbar)
            * (2 / (w2 ** 3 * d2 ** 2) + 1 / (w1 ** 3 * d1 ** 2)) * intensity)


def hermite_gauss_intensity(mode, x, y, peak):
    """Intensity of TEM_mn on the grid spanned by 1-D arrays ``x`` and ``y``.

    ``peak`` is the on-axis intensity a TEM00 beam of the same power would
    have, 2P/(pi w_h w_v).  Every mode then integrates to that same power.
    The result has shape (len(y), len(x)).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    m, n = int(mode.m_index), int(mode.n_index)
    norm = 2.0 ** (m + n) * math.factorial(m) * math.factorial(n)
    return _kernels.hermite_gauss_grid(m, n, x, y, mode.waist_h, mode.waist_v, peak / norm)


def antinode_count(cloud_extent_axial, wavelength):
    """Number of lattice sites, spaced lambda/2, in an axial extent."""
    if cloud_extent_axial < 0:
        raise DomainError("extent must be non-negative")
    # guard against 0.99999... at exact multiples of lambda/2
    return int(math.floor(2 * cloud_extent_axial / wavelength * (1 + 1e-12)))
