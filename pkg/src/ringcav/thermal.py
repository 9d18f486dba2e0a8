"""Thermal ensembles: Maxwell-Boltzmann, seeded sampling, time of flight."""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError
from .physics import RB85, constants
from .trap import envelope_frequency


class HarmonicApproximationWarning(UserWarning):
    pass


@dataclass
class Ensemble:
    atom_count: int
    temperature: float
    species: object
    rng_seed: int
    positions: np.ndarray = field(repr=False)
    velocities: np.ndarray = field(repr=False)

    def __len__(self):
        return self.positions.shape[0]

    def moments(self):
        """Per-axis means and variances; stable summary for golden files."""
        return {
            "position_mean": self.positions.mean(axis=0).tolist() if len(self) else [],
            "position_var": self.positions.var(axis=0).tolist() if len(self) else [],
            "velocity_mean": self.velocities.mean(axis=0).tolist() if len(self) else [],
            "velocity_var": self.velocities.var(axis=0).tolist() if len(self) else [],
        }


@dataclass(frozen=True)
class TofSeries:
    times: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.widths, dtype=float)
        if t.ndim != 1 or t.shape != s.shape:
            raise DomainError("times and widths must be 1-D and equally long")
        if np.any(np.diff(t) <= 0):
            raise DomainError("TOF times must be strictly increasing")
        if np.any(s <= 0):
            raise DomainError("TOF widths must be positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "widths", s)


@dataclass(frozen=True)
class TofFit:
    temperature: float
    sigma0: float
    residual: float


def thermal_velocity(temperature, species=RB85):
    """One-dimensional rms velocity sqrt(kB T / m)."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    return math.sqrt(constants().kB * temperature / species.mass)


def maxwell_boltzmann_1d(v, temperature, species=RB85):
    """Normalised 1-D velocity density in s/m."""
    if not np.all(np.asarray(temperature) > 0):
        raise DomainError("temperature must be positive")
    a = species.mass / (constants().kB * temperature)
    return np.sqrt(a / (2 * np.pi)) * np.exp(-0.5 * a * np.square(v))


def maxwell_boltzmann_1d_derivative(v, temperature, species=RB85):
    a = species.mass / (constants().kB * temperature)
    return -a * np.asarray(v) * maxwell_boltzmann_1d(v, temperature, species)


def sample_ensemble(n, temperature, trap, seed, species=RB85, atom_count=None):
    """Draw ``n`` atoms from the harmonic thermal state of ``trap``.

    Axes are (x horizontal, y vertical, z axial).  The same ``(n, seed)``
    always gives the same samples.
    """
    if n < 0:
        raise DomainError("sample size must be non-negative")
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    kT = constants().kB * temperature
    if kT > trap.depth / 2:
        warnings.warn(
            f"kB*T = {kT / trap.depth:.2f} U0 exceeds U0/2; harmonic sampling is unreliable",
            HarmonicApproximationWarning,
            stacklevel=2,
        )
    omegas = np.array([trap.omega_rad_h, trap.omega_rad_v, trap.omega_ax])
    if np.any(omegas <= 0):
        raise DomainError("trap frequencies must be positive")
    sigma_x = np.sqrt(kT / species.mass) / omegas
    sigma_v = math.sqrt(kT / species.mass)
    rng = np.random.default_rng(np.uint64(seed))
    positions = rng.standard_normal((n, 3)) * sigma_x
    velocities = rng.standard_normal((n, 3)) * sigma_v
    return Ensemble(
        atom_count=n if atom_count is None else atom_count,
        temperature=temperature,
        species=species,
        rng_seed=seed,
        positions=positions,
        velocities=velocities,
    )


def tof_width(t, sigma0, temperature, species=RB85):
    """Gaussian rms width after ballistic expansion for time ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("expansion time must be non-negative")
    if not sigma0 > 0:
        raise DomainError("sigma0 must be positive")
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    return np.sqrt(sigma0 ** 2 + constants().kB * temperature / species.mass * t ** 2)


def fit_temperature_tof(series, species=RB85):
    """Linear least squares of sigma^2 against t^2.

    Slope is kB T / m, intercept sigma0^2.
    """
    t, s = series.times, series.widths
    if t.size < 3:
        raise FitError("need at least three TOF points")
    x = t ** 2
    if np.ptp(x) == 0:
        raise FitError("TOF times are degenerate")
    design = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, s ** 2, rcond=None)
    if slope <= 0:
        raise FitError("fitted expansion rate is not positive")
    temperature = slope * species.mass / constants().kB
    sigma0 = math.sqrt(intercept) if intercept > 0 else 0.0
    model = np.sqrt(np.maximum(intercept + slope * x, 0.0))
    residual = float(np.sqrt(np.mean((model - s) ** 2)))
    return TofFit(float(temperature), sigma0, residual)


def synthetic_tof(times, sigma0, temperature, species=RB85, noise=0.0, seed=0):
    """TOF series from the ballistic model with optional multiplicative noise."""
    widths = tof_width(times, sigma0, temperature, species)
    if noise:
        rng = np.random.default_rng(np.uint64(seed))
        widths = widths * (1 + noise * rng.standard_normal(widths.shape))
    return TofSeries(np.asarray(times, dtype=float), widths)


def depth_ratio(temperature, depth):
    """kB T / U0."""
    if not depth > 0:
        raise DomainError("depth must be positive")
    return constants().kB * temperature / depth


def peak_density(atom_count, temperature, trap, species=RB85):
    """Peak density (1/m^3) of a harmonic thermal cloud.

    Radially the per-site frequencies are used; axially the lattice-site
    averaged envelope of the cavity mode, since imaging does not resolve
    single sites.
    """
    if atom_count < 0:
        raise DomainError("atom_count must be non-negative")
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    if atom_count == 0:
        return 0.0
    a = math.sqrt(species.mass / (2 * math.pi * constants().kB * temperature))
    omegas = (trap.omega_rad_v, trap.omega_rad_h, envelope_frequency(trap, species))
    out = float(atom_count)
    for w in omegas:
        out *= w * a
    return out
