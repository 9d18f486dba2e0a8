"""Physical constants, atom data and elementary laser-field conversions.

All internal frequencies are angular (rad/s).  Conversion to Hz happens only
at the CLI boundary.
"""
import contextlib
import contextvars
import math
from dataclasses import dataclass

from scipy import constants as csts

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = csts.c
    hbar: float = csts.hbar
    h: float = csts.h
    kB: float = csts.k
    amu: float = csts.atomic_mass

    def __post_init__(self):
        for name in ("c", "hbar", "h", "kB", "amu"):
            if not getattr(self, name) > 0:
                raise DomainError(f"constant {name} must be positive")
        if abs(self.h - 2 * math.pi * self.hbar) > 1e-12 * self.h:
            raise DomainError("h must equal 2*pi*hbar")

    @classmethod
    def from_hbar(cls, c=csts.c, hbar=csts.hbar, kB=csts.k, amu=csts.atomic_mass):
        return cls(c=c, hbar=hbar, h=2 * math.pi * hbar, kB=kB, amu=amu)


CODATA = PhysicalConstants()

_current = contextvars.ContextVar("ringcav_constants", default=CODATA)


def constants():
    """Constants in effect for the current context (CODATA by default)."""
    return _current.get()


@contextlib.contextmanager
def using_constants(pc):
    token = _current.set(pc)
    try:
        yield pc
    finally:
        _current.reset(token)


@dataclass(frozen=True)
class AtomSpecies:
    """Two-line alkali model.

    ``gamma`` is the natural linewidth in rad/s, ``i_sat`` the saturation
    intensity in W/m^2 (one scalar for all polarisations).
    """

    mass: float
    d2_wavelength: float
    d1_wavelength: float
    gamma: float
    i_sat: float
    label: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError("species mass must be positive")
        if not self.d2_wavelength > 0:
            raise DomainError("d2_wavelength must be positive")
        if not self.d1_wavelength > self.d2_wavelength:
            raise DomainError("d1_wavelength must exceed d2_wavelength")
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        if not self.i_sat > 0:
            raise DomainError("i_sat must be positive")


def rb85(pc=None):
    pc = pc or constants()
    return AtomSpecies(
        mass=84.9118 * pc.amu,
        d2_wavelength=780.241e-9,
        d1_wavelength=794.979e-9,
        gamma=2 * math.pi * 6.07e6,
        i_sat=16.7,
        label="85Rb",
    )


RB85 = rb85(CODATA)


@dataclass(frozen=True)
class LaserLine:
    wavelength: float
    power: float
    intensity_peak: float = None

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError("wavelength must be positive")
        if not self.power >= 0:
            raise DomainError("power must be non-negative")

    @property
    def frequency(self):
        return constants().c / self.wavelength


def wavenumber(wavelength):
    """Angular wavenumber 2*pi/lambda in rad/m."""
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    return 2 * math.pi / wavelength


def detuning_angular(laser_freq, line_freq):
    """2*pi*(laser - line) in rad/s; red detuning is negative."""
    if not (laser_freq > 0 and line_freq > 0):
        raise DomainError("frequencies must be positive")
    return 2 * math.pi * (laser_freq - line_freq)


def rabi_from_intensity(intensity, species):
    """Resonant Rabi frequency Gamma*sqrt(I/(2 I_sat)) in rad/s."""
    if intensity < 0:
        raise DomainError(f"intensity must be non-negative, got {intensity!r}")
    return species.gamma * math.sqrt(intensity / (2 * species.i_sat))
