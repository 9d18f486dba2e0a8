"""Recoil-induced resonance spectroscopy.

Two Raman beams at angle theta write a moving lattice with wavevector
q = 2k sin(theta/2).  Free atoms resonate at v_z = dw/q.  For atoms held in
the axial lattice only the radial projection q_r = q sin(phi) of a slightly
misaligned q matters, which stretches every velocity and time scale by
f = 1/sin(phi).

Signal orientation: by default the positive lobe sits at positive detuning,
which is minus the literal net 1->2 scattering rate.  Pass ``flip=True`` to
get the literal rate.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, FitError
from .physics import RB85, constants, rabi_from_intensity
from .thermal import maxwell_boltzmann_1d_derivative, thermal_velocity


@dataclass(frozen=True)
class RamanProbe:
    wavelength: float
    theta: float
    phi: float
    detuning: float
    intensity_1: float
    intensity_2: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError("probe wavelength must be positive")
        if not 0 < self.theta < math.pi / 2:
            raise DomainError("theta must lie in (0, pi/2)")
        if not 0 <= self.phi <= math.pi / 2:
            raise DomainError("phi must lie in [0, pi/2]")
        if self.detuning == 0:
            raise DomainError("Raman detuning must be non-zero")
        if self.intensity_1 < 0 or self.intensity_2 < 0:
            raise DomainError("intensities must be non-negative")


@dataclass(frozen=True)
class RirSpectrum:
    delta_omega: np.ndarray
    signal: np.ndarray
    q: float
    temperature_used: float = None

    def __post_init__(self):
        d = np.asarray(self.delta_omega, dtype=float)
        s = np.asarray(self.signal, dtype=float)
        if d.shape != s.shape or d.ndim != 1:
            raise DomainError("delta_omega and signal must be 1-D and equally long")
        object.__setattr__(self, "delta_omega", d)
        object.__setattr__(self, "signal", s)


@dataclass(frozen=True)
class RirFit:
    temperature: float
    temperature_closed_form: float
    amplitude: float
    q: float
    residual: float
    method: str = "least_squares"


def paper_probe(phi_deg=3.0):
    """Probe as used for the free-atom scans: 13.1 deg, -110 MHz, 50 mW/cm^2 each."""
    return RamanProbe(
        wavelength=780.241e-9,
        theta=math.radians(13.1),
        phi=math.radians(phi_deg),
        detuning=-2 * math.pi * 110e6,
        intensity_1=500.0,
        intensity_2=500.0,
    )


def raman_q(probe):
    """(q, q_z, q_r) in rad/m; beams taken at equal wavelength."""
    k = 2 * math.pi / probe.wavelength
    q = 2 * k * math.sin(probe.theta / 2)
    return q, q * math.cos(probe.phi), q * math.sin(probe.phi)


def effective_q(probe, trapped=False):
    q, _, q_r = raman_q(probe)
    if not trapped:
        return q
    if probe.phi == 0:
        raise DomainError("trapped-atom model needs a non-zero misalignment phi")
    return q_r


def two_photon_rabi(omega1, omega2, detuning):
    """Omega_1 Omega_2 / (2 Delta), sign included."""
    if detuning == 0:
        raise DomainError("detuning must be non-zero")
    return omega1 * omega2 / (2 * detuning)


def probe_rabi(probe, species=RB85):
    o1 = rabi_from_intensity(probe.intensity_1, species)
    o2 = rabi_from_intensity(probe.intensity_2, species)
    return two_photon_rabi(o1, o2, probe.detuning)


def raman_lattice_depth(probe, species=RB85):
    """Peak-to-peak depth hbar |Omega_1 Omega_2 / Delta| of the moving lattice.

    From the interference term of the light shift hbar |Omega(x)|^2 / (4 Delta).
    """
    if probe.detuning == 0:
        raise DomainError("detuning must be non-zero")
    o1 = rabi_from_intensity(probe.intensity_1, species)
    o2 = rabi_from_intensity(probe.intensity_2, species)
    return constants().hbar * abs(o1 * o2 / probe.detuning)


def geometry_factor(phi):
    """Path-length factor 1/sin(phi) for a q misaligned by phi."""
    if phi == 0:
        raise DomainError("phi = 0: strictly axial q, the trapped model diverges")
    if not 0 < phi <= math.pi / 2:
        raise DomainError("phi must lie in (0, pi/2]")
    return 1 / math.sin(phi)


def rir_lineshape(delta_omega, temperature, q, species=RB85):
    """Derivative-of-Gaussian shape scaled to +1 at its positive extremum.

    Extrema sit at +-q v_th.
    """
    x = np.asarray(delta_omega, dtype=float) / (q * thermal_velocity(temperature, species))
    return x * np.exp(0.5 * (1 - x * x))


def rir_signal(delta_omega, temperature, probe, atom_count, species=RB85,
               trapped=False, flip=False, heating=0.0):
    """Net Raman scattering rate hbar pi/2 Omega_R^2 N dPi/dv at v = dw/q (arb. units).

    ``heating`` (K per rad/s of scan) lets the temperature drift linearly
    from the first grid point onward, a crude stand-in for probe heating.
    """
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    q = effective_q(probe, trapped)
    omega_r = probe_rabi(probe, species)
    d = np.asarray(delta_omega, dtype=float)
    temps = temperature
    if heating:
        temps = temperature + heating * (d - d.flat[0])
        if np.any(temps <= 0):
            raise DomainError("heating drives the temperature non-positive")
    v = d / q
    rate = (constants().hbar * math.pi / 2 * omega_r ** 2 * atom_count
            * maxwell_boltzmann_1d_derivative(v, temps, species))
    return rate if flip else -rate


def rir_spectrum(delta_omega, temperature, probe, atom_count=1.0, species=RB85,
                 trapped=False, flip=False):
    d = np.asarray(delta_omega, dtype=float)
    sig = rir_signal(d, temperature, probe, atom_count, species, trapped, flip)
    return RirSpectrum(d, sig, effective_q(probe, trapped), temperature)


def _refined_extremum(x, y, i):
    # parabola through three points around a sampled extremum
    if i == 0 or i == len(x) - 1:
        return x[i]
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 ** 2 * (y0 - y1) + x1 ** 2 * (y2 - y0) + x0 ** 2 * (y1 - y2)) / denom
    if a == 0:
        return x1
    return -b / (2 * a)


def spectrum_extrema(delta_omega, signal):
    """Locations (rad/s) of the interior maximum and minimum, parabola-refined."""
    d = np.asarray(delta_omega, dtype=float)
    s = np.asarray(signal, dtype=float)
    if d.size < 5 or not np.any(s != 0):
        raise FitError("spectrum is empty or identically zero")
    order = np.argsort(d)
    d, s = d[order], s[order]
    i_max, i_min = int(np.argmax(s)), int(np.argmin(s))
    for i in (i_max, i_min):
        if i == 0 or i == d.size - 1:
            raise FitError("spectrum has no interior extremum; it must span both lobes")
    return _refined_extremum(d, s, i_max), _refined_extremum(d, s, i_min)


def closed_form_temperature(peak_to_peak, q, species=RB85):
    """T = m (dw_pp / 2q)^2 / kB from the extremum splitting."""
    return species.mass * (peak_to_peak / (2 * q)) ** 2 / constants().kB


def fit_temperature_rir(spectrum, species=RB85):
    """Fit amplitude and temperature of the derivative lineshape.

    Starts from the closed-form peak-splitting estimate, which is also
    reported.  Orientation of the trace does not matter.
    """
    d, s, q = spectrum.delta_omega, spectrum.signal, spectrum.q
    w_max, w_min = spectrum_extrema(d, s)
    t0 = closed_form_temperature(abs(w_max - w_min), q, species)
    if not t0 > 0:
        raise FitError("extrema coincide; cannot estimate a temperature")
    # amplitude is fitted in units of the largest |signal| so both parameters are O(1)
    scale = float(np.max(np.abs(s)))
    amp0 = 1.0 if w_max > w_min else -1.0
    shape_s = s / scale

    def resid(p):
        amp, log_t = p
        return amp * rir_lineshape(d, t0 * math.exp(log_t), q, species) - shape_s

    sol = optimize.least_squares(resid, [amp0, 0.0], method="lm", xtol=1e-14, ftol=1e-14)
    if not sol.success:
        raise FitError(f"least-squares fit failed: {sol.message}")
    amp, log_t = sol.x
    res = float(np.sqrt(np.mean(sol.fun ** 2)) * scale)
    return RirFit(t0 * math.exp(log_t), t0, float(amp * scale), q, res)


def grating_lifetime(temperature, probe, species=RB85, trapped=False):
    """Decay time 1/(q v_th) of the atomic density grating, times f when trapped."""
    q, _, _ = raman_q(probe)
    tau = 1 / (q * thermal_velocity(temperature, species))
    if trapped:
        tau *= geometry_factor(probe.phi)
    return tau


def critical_scan_rate(temperature, probe, species=RB85, trapped=False):
    """Ringing threshold (Hz/s): the squared free-atom linewidth (q v_th / 2 pi)^2,
    divided by f^2 for trapped atoms."""
    q, _, _ = raman_q(probe)
    rate = (q * thermal_velocity(temperature, species) / (2 * math.pi)) ** 2
    if trapped:
        rate /= geometry_factor(probe.phi) ** 2
    return rate


def trapped_velocity_map(delta_omega, probe):
    """Velocity along the lattice valleys resonant at ``delta_omega``: f dw / q."""
    q, _, _ = raman_q(probe)
    return geometry_factor(probe.phi) * np.asarray(delta_omega) / q
