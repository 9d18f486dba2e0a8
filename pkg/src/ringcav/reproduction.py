"""Reproduction checks of the published numbers, bundled into one deterministic document.

Each entry records the computed values, the target and a pass flag.  Used by
the ``report`` subcommand; the test-suite re-derives the same numbers
independently.
"""
import math

import numpy as np
from scipy import stats

from . import bloch, cavity, rir, thermal, trap
from .physics import constants, using_constants

KHZ_PER_US = 1e9  # Hz/s


def _entry(name, values, target, passed):
    return {"name": name, "values": values, "target": target, "passed": bool(passed)}


def cavity_checks(cfg):
    out = {}
    geo_p, geo_s = cfg.geometry("p"), cfg.geometry("s")
    f_p, f_s = cfg.cavity.measured_finesse_p, cfg.cavity.measured_finesse_s
    fwhm_p, _ = cavity.linewidth_and_decay(geo_p, f_p)
    fwhm_s, _ = cavity.linewidth_and_decay(geo_s, f_s)
    out["1_cavity_linewidth"] = _entry(
        "cavity FWHM for F=2500 and F=170000",
        {"fwhm_p_hz": fwhm_p, "fwhm_s_hz": fwhm_s},
        "[1.38, 1.44] MHz and [20.3, 21.2] kHz",
        1.38e6 <= fwhm_p <= 1.44e6 and 20.3e3 <= fwhm_s <= 21.2e3,
    )
    vol = cavity.mode_volume(geo_p)
    out["2_mode_volume"] = _entry(
        "mode volume", {"mode_volume_mm3": vol * 1e9}, "1 mm^3 within 10%",
        abs(vol * 1e9 - 1.0) <= 0.1,
    )
    bare_s = geo_s.with_extra_loss(0.0)
    f_mirror = cavity.finesse_from_losses(bare_s)
    extra = cavity.extra_loss_for_finesse(bare_s, f_s)
    out["3_finesse_from_mirrors"] = _entry(
        "s-pol mirror-limited finesse and extra loss for F=170000",
        {"finesse_mirrors_only": f_mirror, "extra_loss": extra},
        "F ~ 2.0e5; extra_loss in (0, 1e-5)",
        abs(f_mirror / 2.0e5 - 1) < 0.05 and 0 < extra < 1e-5,
    )
    return out


def trap_checks(cfg, species):
    geo = cfg.geometry("p")
    lam = cfg.trap.wavelength_nm * 1e-9
    ratio = trap.frequency_ratio(lam, geo)
    depth = trap.dipole_depth(cfg.trap.power_per_direction_w, geo, lam, species)
    depth_mk = depth / constants().kB * 1e3
    fig4_ratio = 700e3 / 1e3
    return {"4_secular_ratio_and_depth": _entry(
        "secular-frequency ratio and absolute depth at 10 W total",
        {"ratio": ratio, "paper_ratio": 450e3 / 640, "fig4_ratio": fig4_ratio,
         "depth_mk": depth_mk},
        "703 +- 2%, plotted trap 700 within 5%, depth within factor 2 of 1.4 mK",
        abs(ratio / 703 - 1) <= 0.02 and abs(fig4_ratio / ratio - 1) <= 0.05
        and 0.7 <= depth_mk <= 2.8,
    )}


def rir_checks(cfg, species):
    probe = cfg.raman_probe()
    q, _, _ = rir.raman_q(probe)
    v_th = thermal.thermal_velocity(100e-6, species)
    grid = np.linspace(-6, 6, 4801) * q * v_th
    spec = rir.rir_spectrum(grid, 100e-6, probe, 1.0, species)
    w_max, w_min = rir.spectrum_extrema(spec.delta_omega, spec.signal)
    fits = {}
    worst = 0.0
    for t_uk in (20, 50, 100, 200, 500):
        t = t_uk * 1e-6
        g = np.linspace(-6, 6, 1201) * q * thermal.thermal_velocity(t, species)
        fit = rir.fit_temperature_rir(rir.rir_spectrum(g, t, probe, 1.0, species), species)
        fits[str(t_uk)] = fit.temperature
        worst = max(worst, abs(fit.temperature / t - 1))
    out = {"5_rir_free_spectrum": _entry(
        "RIR extrema at 100 uK and fit round trip",
        {"max_hz": w_max / (2 * math.pi), "min_hz": w_min / (2 * math.pi),
         "fit_temperatures_K": fits, "worst_fit_error": worst},
        "extrema +-28.9 kHz within 2%; fits within 0.5%",
        abs(w_max / (2 * math.pi) / 28.9e3 - 1) <= 0.02
        and abs(-w_min / (2 * math.pi) / 28.9e3 - 1) <= 0.02 and worst <= 5e-3,
    )}
    f = rir.geometry_factor(math.radians(3.0))
    tau = rir.grating_lifetime(100e-6, probe, species, trapped=True)
    out["6_geometry_factor"] = _entry(
        "geometry factor and trapped grating lifetime",
        {"f": f, "lifetime_us": tau * 1e6},
        "f(3 deg) = 19.11; lifetime within 15% of 100 us",
        abs(f - 19.11) < 0.01 and abs(tau / 100e-6 - 1) <= 0.15,
    )
    free = rir.critical_scan_rate(100e-6, probe, species)
    trapped = rir.critical_scan_rate(100e-6, probe, species, trapped=True)
    out["7_critical_scan_rate"] = _entry(
        "free and trapped critical scan rates",
        {"free_khz_per_us": free / KHZ_PER_US, "trapped_khz_per_us": trapped / KHZ_PER_US,
         "ratio": free / trapped, "f_squared": f ** 2},
        "free within factor 3 of 2.1 kHz/us; trapped exactly f^2 lower",
        1 / 3 <= free / (2.1 * KHZ_PER_US) <= 3 and abs(free / trapped / f ** 2 - 1) < 1e-12,
    )
    return out


def bloch_checks(cfg):
    sweep = bloch.paper_sweep(n_samples=8001)
    tr = bloch.integrate_sweep(sweep)
    peak = np.max(np.abs(tr.v))
    pre = np.max(np.abs(tr.v[bloch.pre_resonance_mask(tr, sweep)])) / peak
    m = bloch.ringing_metrics(tr, sweep)
    rel = np.abs(m.instantaneous_freqs / np.abs(sweep.detuning(m.mid_times)) - 1)

    g = sweep.gamma
    slow = bloch.paper_sweep(scan_rate=0.01 * (g / (2 * math.pi)) ** 2,
                             delta_start=-10 * g, delta_end=10 * g, n_samples=2001)
    tr_slow = bloch.integrate_sweep(slow)
    ref = bloch.adiabatic_trace(slow)
    adiabatic_dev = float(np.max(np.abs(tr_slow.v - ref.v) / ref.v))
    return {"8_bloch_ringing": _entry(
        "swept Bloch ringing at G = 2pi 5 kHz, W = 0.1 G, 2.1 kHz/us",
        {"pre_resonance_fraction": pre, "oscillations": m.n_oscillations,
         "max_chirp_deviation": float(rel.max()),
         "envelope_decay_over_half_gamma": m.envelope_decay_rate / (g / 2),
         "adiabatic_max_rel_dev": adiabatic_dev},
        "pre < 5%; >= 5 oscillations tracking |d(t)| within 10%; adiabatic within 5%",
        pre < 0.05 and m.n_oscillations >= 5 and rel.max() <= 0.10 and adiabatic_dev <= 0.05,
    )}


def thermal_checks(cfg, species, tr):
    out = {}
    times = np.asarray(cfg.thermal.tof_times_ms) * 1e-3
    sigma0 = cfg.thermal.sigma0_um * 1e-6
    clean = thermal.fit_temperature_tof(thermal.synthetic_tof(times, sigma0, 140e-6, species),
                                        species)
    noisy = thermal.fit_temperature_tof(
        thermal.synthetic_tof(times, sigma0, 140e-6, species, noise=cfg.thermal.tof_noise,
                              seed=cfg.thermal.seed), species)
    temperature = cfg.thermal.temperature_uk * 1e-6
    ens = thermal.sample_ensemble(cfg.thermal.n_samples, temperature, tr, cfg.thermal.seed,
                                  species)
    sig_v = thermal.thermal_velocity(temperature, species)
    ks = stats.kstest(ens.velocities[:, 2] / sig_v, "norm")
    ratio = thermal.depth_ratio(280e-6, constants().kB * 1.4e-3)
    out["10_thermal_suite"] = _entry(
        "TOF fits, KS on sampled velocities, T/U",
        {"tof_clean_rel_err": abs(clean.temperature / 140e-6 - 1),
         "tof_noisy_rel_err": abs(noisy.temperature / 140e-6 - 1),
         "ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue),
         "t_over_u": ratio, "moments": ens.moments()},
        "0.1% clean, 3% noisy, KS p > 0.01, T/U = 0.20",
        abs(clean.temperature / 140e-6 - 1) <= 1e-3 and abs(noisy.temperature / 140e-6 - 1) <= 0.03
        and ks.pvalue > 0.01 and abs(ratio - 0.2) < 1e-9,
    )
    return out


def paper_reproduction(cfg):
    """Run every reproducible check under the constants of ``cfg``."""
    with using_constants(cfg.physical_constants()):
        species = cfg.atom()
        tr = cfg.trap_state()
        checks = {}
        checks.update(cavity_checks(cfg))
        checks.update(trap_checks(cfg, species))
        checks.update(rir_checks(cfg, species))
        checks.update(bloch_checks(cfg))
        checks.update(thermal_checks(cfg, species, tr))
    return checks
