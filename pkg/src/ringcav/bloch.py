"""Swept two-level optical Bloch equations.

State is the Bloch vector (u, v, w) with coherence rho_12 = (u + i v)/2 and
inversion w = rho_11 - rho_22, so the ground state is w = +1.  In the frame
of the chirped drive::

    du/dt =  d(t) v - (G/2) u
    dv/dt = -d(t) u + W w - (G/2) v
    dw/dt = -W v - G (w - 1)

with d(t) = delta_start + 2 pi * scan_rate * t.  The plotted observable is
Im rho_12 = v/2.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import BracketError, DomainError, InsufficientRingingError, IntegrationError
from .physics import RB85
from .rir import effective_q
from .thermal import thermal_velocity


@dataclass(frozen=True)
class SweepConfig:
    """Sweep parameters.  Rates and detunings are angular except
    ``scan_rate``, which is the rate of the ordinary frequency in Hz/s.

    ``max_step=None`` lets the adaptive stepper choose freely.  With
    ``fixed_step=True`` the integrator takes constant steps of ``max_step``.
    """

    gamma: float
    rabi: float
    scan_rate: float
    delta_start: float
    delta_end: float
    max_step: float = None
    tolerance: float = 1e-8
    n_samples: int = 4001
    fixed_step: bool = False
    max_steps: int = 50_000_000

    def __post_init__(self):
        if not self.gamma >= 0:
            raise DomainError("gamma must be non-negative")
        if not self.rabi >= 0:
            raise DomainError("rabi must be non-negative")
        if self.scan_rate == 0:
            raise DomainError("scan_rate must be non-zero")
        span = self.delta_end - self.delta_start
        if span == 0 or (span > 0) != (self.scan_rate > 0):
            raise DomainError("sweep direction must match the sign of scan_rate")
        if not 0 < self.tolerance <= 1e-3:
            raise DomainError("tolerance must lie in (0, 1e-3]")
        if self.n_samples < 2:
            raise DomainError("need at least two samples")
        if self.max_step is not None and not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if self.fixed_step and self.max_step is None:
            raise DomainError("fixed-step mode needs max_step")

    @property
    def chirp(self):
        """d(delta)/dt in rad/s^2."""
        return 2 * math.pi * self.scan_rate

    @property
    def duration(self):
        return (self.delta_end - self.delta_start) / self.chirp

    @property
    def dimensionless_rate(self):
        """Sweep rate in units of the squared linewidth, 2 pi rate / G^2."""
        return self.chirp / self.gamma ** 2

    def detuning(self, t):
        return self.delta_start + self.chirp * np.asarray(t)

    def sample_times(self):
        return np.linspace(0.0, self.duration, self.n_samples)


@dataclass
class BlochTrace:
    t: np.ndarray
    delta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    n_steps: int = 0
    backend: str = field(default="", compare=False)

    @property
    def im_rho12(self):
        return self.v / 2

    @property
    def norm(self):
        return np.sqrt(self.u ** 2 + self.v ** 2 + self.w ** 2)


@dataclass(frozen=True)
class RingingMetrics:
    onset_time: float
    crossing_times: np.ndarray
    mid_times: np.ndarray
    instantaneous_freqs: np.ndarray
    envelope_decay_rate: float

    @property
    def n_oscillations(self):
        return (len(self.crossing_times) - 1) / 2


def steady_state(delta, rabi, gamma):
    """Stationary Bloch vector at fixed detuning (vectorised over ``delta``)."""
    if not gamma > 0:
        raise DomainError("steady state needs gamma > 0")
    delta = np.asarray(delta, dtype=float)
    v = (gamma * rabi / 2) / (delta ** 2 + gamma ** 2 / 4 + rabi ** 2 / 2)
    return 2 * delta * v / gamma, v, 1 - rabi * v / gamma


def _initial_state(delta, rabi, gamma):
    if gamma > 0:
        u, v, w = steady_state(delta, rabi, gamma)
        return np.column_stack([u, v, w])
    # no damping: start in the ground state
    n = np.size(delta)
    y0 = np.zeros((n, 3))
    y0[:, 2] = 1.0
    return y0


def integrate_classes(config, offsets):
    """Integrate one sweep per detuning offset; returns (t, y[ns, n, 3], n_steps)."""
    offsets = np.ascontiguousarray(np.atleast_1d(offsets), dtype=float)
    t_end = config.duration
    if t_end <= 0:
        raise DomainError("sweep duration must be positive")
    ts = config.sample_times()
    y0 = _initial_state(config.delta_start + offsets, config.rabi, config.gamma)
    max_step = t_end if config.max_step is None else min(config.max_step, t_end)
    out, n_steps, status, t_stop = _kernels.integrate_bloch(
        y0, offsets, float(config.delta_start), float(config.chirp),
        float(config.rabi), float(config.gamma), float(t_end), ts,
        float(config.tolerance), float(max_step), bool(config.fixed_step),
        int(config.max_steps),
    )
    if status == _kernels.STATUS_UNDERFLOW:
        raise IntegrationError(f"step size underflow at t = {t_stop:.6e} s", t_stop)
    if status == _kernels.STATUS_MAX_STEPS:
        raise IntegrationError(
            f"step budget of {config.max_steps} exhausted at t = {t_stop:.6e} s", t_stop
        )
    return ts, out, int(n_steps)


def integrate_sweep(config):
    """Bloch trace for a single sweep, started from the steady state at delta_start."""
    from ._accel import backend_name

    ts, out, n_steps = integrate_classes(config, np.zeros(1))
    y = out[:, 0, :]
    return BlochTrace(ts, config.detuning(ts), y[:, 0].copy(), y[:, 1].copy(),
                      y[:, 2].copy(), n_steps, backend_name())


def adiabatic_trace(config):
    """Steady state evaluated along d(t); the zero-sweep-rate reference."""
    ts = config.sample_times()
    delta = config.detuning(ts)
    u, v, w = steady_state(delta, config.rabi, config.gamma)
    return BlochTrace(ts, delta, u, v, w)


def resonance_time(config):
    """Time at which d(t) passes zero."""
    t_res = -config.delta_start / config.chirp
    if not 0 < t_res < config.duration:
        raise DomainError("sweep does not cross resonance")
    return t_res


def pre_resonance_mask(trace, config):
    """Samples still far enough before resonance to count as 'not yet reacting':
    d(t) below -3 max(G, sqrt(2 pi rate))."""
    margin = 3 * max(config.gamma, math.sqrt(abs(config.chirp)))
    sign = 1.0 if config.chirp > 0 else -1.0
    return sign * trace.delta <= -margin


def _zero_crossings(t, x):
    s = np.signbit(x)
    idx = np.nonzero(s[1:] != s[:-1])[0]
    t0, t1 = t[idx], t[idx + 1]
    x0, x1 = x[idx], x[idx + 1]
    return t0 - x0 * (t1 - t0) / (x1 - x0)


def ringing_metrics(trace, config):
    """Zero-crossing analysis of v after the resonance crossing.

    Instantaneous angular frequency between consecutive crossings is
    pi / spacing, attached to the midpoint time.  The envelope decay rate is
    an exponential fit to the peak |v| in each half period.
    """
    t_res = resonance_time(config)
    post = trace.t >= t_res
    tc = _zero_crossings(trace.t[post], trace.v[post])
    if tc.size < 4:
        raise InsufficientRingingError(
            f"only {tc.size} post-resonance zero crossings; need at least 4"
        )
    spacing = np.diff(tc)
    mids = 0.5 * (tc[1:] + tc[:-1])
    freqs = np.pi / spacing

    peak_t, peak_v = [], []
    for a, b in zip(tc[:-1], tc[1:]):
        sel = (trace.t > a) & (trace.t < b)
        if np.any(sel):
            i = np.argmax(np.abs(trace.v[sel]))
            peak_t.append(trace.t[sel][i])
            peak_v.append(abs(trace.v[sel][i]))
    peak_t, peak_v = np.array(peak_t), np.array(peak_v)
    good = peak_v > 0
    if good.sum() >= 2:
        slope, _ = np.polyfit(peak_t[good], np.log(peak_v[good]), 1)
        decay = -slope
    else:
        decay = float("nan")
    return RingingMetrics(float(tc[0]), tc, mids, freqs, float(decay))


def ringing_overshoot(trace, config):
    """Largest excursion of v to the side opposite the adiabatic curve,
    relative to the adiabatic peak.

    The adiabatic v never changes sign, so any such excursion is ringing;
    ordinary adiabatic lag does not contribute.
    """
    ref = adiabatic_trace(config).v
    peak = np.max(np.abs(ref))
    if peak == 0:
        return 0.0
    sign = np.sign(ref[np.argmax(np.abs(ref))])
    return float(max(0.0, np.max(-sign * trace.v)) / peak)


def critical_rate_scan(config_base, threshold, bracket=(1e-2, 2.0), rel_tol=1e-3):
    """Smallest scan rate (Hz/s) whose ringing overshoot exceeds ``threshold``.

    ``bracket`` is in units of the dimensionless rate 2 pi rate / G^2.
    Bisection is geometric and fully deterministic.
    """
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    g2 = config_base.gamma ** 2
    if g2 == 0:
        raise DomainError("critical rate needs gamma > 0")

    def overshoot(r):
        cfg = replace(config_base, scan_rate=r * g2 / (2 * math.pi))
        return ringing_overshoot(integrate_sweep(cfg), cfg)

    lo, hi = bracket
    if overshoot(hi) <= threshold:
        raise BracketError(
            f"overshoot never reaches {threshold:g} below dimensionless rate {hi:g}"
        )
    if overshoot(lo) > threshold:
        raise BracketError(f"overshoot already exceeds {threshold:g} at rate {lo:g}")
    while hi / lo - 1 > rel_tol:
        mid = math.sqrt(lo * hi)
        if overshoot(mid) > threshold:
            hi = mid
        else:
            lo = mid
    return hi * g2 / (2 * math.pi)


def doppler_classes(temperature, probe, n_classes, species=RB85, trapped=False):
    """Detuning offsets q v_z and weights from Gauss-Hermite quadrature on
    the Maxwell-Boltzmann distribution."""
    if n_classes < 1:
        raise DomainError("need at least one velocity class")
    x, wts = np.polynomial.hermite_e.hermegauss(n_classes)
    wts = wts / wts.sum()
    q = effective_q(probe, trapped)
    return q * thermal_velocity(temperature, species) * x, wts


def inhomogeneous_average(temperature, probe, species, sweep, n_classes, trapped=False):
    """Doppler-averaged trace; classes are integrated together and reduced
    with fixed weights in index order."""
    from ._accel import backend_name

    offsets, wts = doppler_classes(temperature, probe, n_classes, species, trapped)
    ts, out, n_steps = integrate_classes(sweep, offsets)
    mean = np.zeros((ts.size, 3))
    for i in range(n_classes):
        mean += wts[i] * out[:, i, :]
    return BlochTrace(ts, sweep.detuning(ts), mean[:, 0], mean[:, 1], mean[:, 2],
                      n_steps, backend_name())


def paper_sweep(**overrides):
    """G = 2 pi 5 kHz, W = 0.1 G, 2.1 kHz/us over +-200 kHz."""
    gamma = 2 * math.pi * 5e3
    base = dict(
        gamma=gamma,
        rabi=0.1 * gamma,
        scan_rate=2.1e9,
        delta_start=-2 * math.pi * 200e3,
        delta_end=2 * math.pi * 200e3,
    )
    base.update(overrides)
    return SweepConfig(**base)
