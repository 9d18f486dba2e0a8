"""Ring-cavity optics: FSR, finesse, linewidth, power buildup, mode volume."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .physics import constants

# Mirror transmissions quoted for the two linear polarisations, M0 first.
PAPER_TRANSMISSIONS = {
    "p": (2200e-6, 9e-6, 9e-6),
    "s": (27e-6, 2e-6, 2e-6),
}
PAPER_FINESSE = {"p": 2500.0, "s": 170000.0}


@dataclass(frozen=True)
class CavityGeometry:
    round_trip_length: float
    waist_v: float
    waist_h: float
    mirror_transmissions: tuple
    extra_loss: float = 0.0

    def __post_init__(self):
        if not self.round_trip_length > 0:
            raise DomainError("round_trip_length must be positive")
        if not (self.waist_v > 0 and self.waist_h > 0):
            raise DomainError("waists must be positive")
        ts = tuple(float(t) for t in self.mirror_transmissions)
        if len(ts) != 3:
            raise DomainError("a ring cavity needs exactly three mirror transmissions")
        if not all(0 < t < 1 for t in ts):
            raise DomainError("mirror transmissions must lie in (0, 1)")
        if not self.extra_loss >= 0:
            raise DomainError("extra_loss must be non-negative")
        if not sum(ts) + self.extra_loss < 1:
            raise DomainError("total round-trip loss must be below 1")
        object.__setattr__(self, "mirror_transmissions", ts)

    @property
    def total_loss(self):
        return sum(self.mirror_transmissions) + self.extra_loss

    def with_extra_loss(self, extra_loss):
        return CavityGeometry(
            self.round_trip_length, self.waist_v, self.waist_h,
            self.mirror_transmissions, extra_loss,
        )


@dataclass(frozen=True)
class CavityCharacter:
    """Derived cavity figures.  Both decay-rate conventions are carried so
    a factor of two cannot slip through silently."""

    finesse: float
    fsr: float
    linewidth_fwhm: float
    intensity_decay_rate: float
    field_decay_rate: float
    buildup: float
    mode_volume: float


def paper_geometry(polarization="p", extra_loss=None):
    """The 85 mm ring with w_v = 129 um, w_h = 124 um.

    With ``extra_loss=None`` the extra round-trip loss is chosen so that the
    mirror data reproduce the measured finesse for that polarisation.
    """
    try:
        ts = PAPER_TRANSMISSIONS[polarization]
    except KeyError:
        raise DomainError(f"unknown polarization {polarization!r}") from None
    geo = CavityGeometry(85e-3, 129e-6, 124e-6, ts, 0.0)
    if extra_loss is None:
        extra_loss = extra_loss_for_finesse(geo, PAPER_FINESSE[polarization])
    return geo.with_extra_loss(extra_loss)


def free_spectral_range(geometry):
    return constants().c / geometry.round_trip_length


def finesse_from_total_loss(total_loss):
    """2 pi over the fractional round-trip loss."""
    if not total_loss > 0:
        raise DomainError("zero round-trip loss gives infinite finesse")
    return 2 * math.pi / total_loss


def finesse_from_losses(geometry):
    return finesse_from_total_loss(geometry.total_loss)


def extra_loss_for_finesse(geometry, finesse):
    """Extra round-trip loss that, added to the mirror transmissions, gives
    ``finesse``.  Negative results mean the mirrors alone are already too
    lossy and are reported as an error."""
    if not finesse > 0:
        raise DomainError("finesse must be positive")
    extra = 2 * math.pi / finesse - sum(geometry.mirror_transmissions)
    if extra < 0:
        raise DomainError(
            f"finesse {finesse:g} exceeds the mirror-limited value "
            f"{2 * math.pi / sum(geometry.mirror_transmissions):g}"
        )
    return extra


def linewidth_and_decay(geometry, finesse):
    """Return ``(fwhm_hz, kappa)`` with kappa = 2*pi*FWHM in rad/s.

    kappa is the intensity decay rate; the field decays at kappa/2.
    """
    if not finesse > 0:
        raise DomainError("finesse must be positive")
    fwhm = free_spectral_range(geometry) / finesse
    return fwhm, 2 * math.pi * fwhm


def buildup_factor(finesse):
    if not finesse > 0:
        raise DomainError("finesse must be positive")
    return finesse / math.pi


def round_trip_amplitude(geometry):
    """Field amplitude left after one round trip, extra loss shared equally
    between the three mirrors."""
    share = geometry.extra_loss / 3
    prod = 1.0
    for t in geometry.mirror_transmissions:
        prod *= 1 - t - share
    return math.sqrt(prod)


def circulating_power(input_power, geometry, mode_match=1.0):
    """On-resonance circulating power per direction (Airy peak).

    Light couples in through mirror 0.  For small losses this tends to
    ``4 T0 P_in / L_total**2``.
    """
    if input_power < 0:
        raise DomainError("input power must be non-negative")
    if not 0 <= mode_match <= 1:
        raise DomainError("mode_match must lie in [0, 1]")
    t0 = geometry.mirror_transmissions[0]
    r = round_trip_amplitude(geometry)
    return mode_match * input_power * t0 / (1 - r) ** 2


def input_power_for(circulating, geometry, mode_match=1.0):
    """Inverse of :func:`circulating_power`."""
    if not mode_match > 0:
        raise DomainError("mode_match must be positive")
    return circulating / circulating_power(1.0, geometry, mode_match)


def circulating_power_series(input_power, geometry, mode_match=1.0,
                             round_trips=1_000_000, detuning_phase=0.0):
    """Brute-force round-trip phasor sum; independent check of the Airy peak."""
    t0 = geometry.mirror_transmissions[0]
    r = round_trip_amplitude(geometry)
    n = np.arange(round_trips, dtype=float)
    field = math.sqrt(t0) * np.sum(r ** n * np.exp(1j * detuning_phase * n))
    return mode_match * input_power * abs(field) ** 2


def mode_volume(geometry):
    """(pi/4) L w_v w_h in m^3."""
    return math.pi / 4 * geometry.round_trip_length * geometry.waist_v * geometry.waist_h


def characterize(geometry, finesse=None):
    """Bundle the derived figures.  ``finesse`` defaults to the loss model."""
    if finesse is None:
        finesse = finesse_from_losses(geometry)
    fwhm, kappa = linewidth_and_decay(geometry, finesse)
    return CavityCharacter(
        finesse=finesse,
        fsr=free_spectral_range(geometry),
        linewidth_fwhm=fwhm,
        intensity_decay_rate=kappa,
        field_decay_rate=kappa / 2,
        buildup=buildup_factor(finesse),
        mode_volume=mode_volume(geometry),
    )
