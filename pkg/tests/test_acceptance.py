"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test records a one-line PASS/FAIL verdict; the lines are printed in
the pytest terminal summary (see conftest.py).  Run just this file with
``pytest tests/test_acceptance.py -v``.
"""
import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import constants as sc
from scipy import stats

from ringcav import bloch, cavity, cli, rir, thermal, trap
from ringcav.bloch import SweepConfig
from ringcav.config import paper_defaults
from ringcav.physics import RB85

RESULTS = []


def verdict(number, title, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})")
    assert ok, detail


def test_criterion_01_cavity_linewidth():
    p, _ = cavity.linewidth_and_decay(cavity.paper_geometry("p"), 2500)
    s, _ = cavity.linewidth_and_decay(cavity.paper_geometry("s"), 170000)
    verdict(1, "cavity linewidth", 1.38e6 <= p <= 1.44e6 and 20.3e3 <= s <= 21.2e3,
            f"FWHM {p / 1e6:.4f} MHz, {s / 1e3:.3f} kHz")


def test_criterion_02_mode_volume():
    v = cavity.mode_volume(cavity.paper_geometry("p")) * 1e9
    verdict(2, "mode volume", abs(v - 1.068) < 5e-4 and abs(v - 1) <= 0.1, f"{v:.4f} mm^3")


def test_criterion_03_finesse_from_mirrors():
    bare = cavity.paper_geometry("s", extra_loss=0.0)
    f = cavity.finesse_from_losses(bare)
    extra = cavity.extra_loss_for_finesse(bare, 170000)
    verdict(3, "finesse from mirror data", abs(f / 2.0e5 - 1) < 0.05 and 0 < extra < 1e-5,
            f"F = {f:.4g}, extra_loss = {extra:.3g}")


def test_criterion_04_secular_ratio_and_depth():
    geo = cavity.paper_geometry("p")
    ratio = trap.frequency_ratio(799e-9, geo)
    # P = 10 W is the total circulating power, 5 W in each direction
    depth = trap.dipole_depth(5.0, geo, 799e-9) / sc.k
    ok = (abs(ratio / 703 - 1) <= 0.02 and abs(700 / ratio - 1) <= 0.05
          and 0.7e-3 <= depth <= 2.8e-3)
    verdict(4, "secular ratio and depth", ok,
            f"ratio {ratio:.2f}, depth {depth * 1e3:.3f} mK at 10 W total")


def test_criterion_05_rir_free_spectrum():
    probe = rir.paper_probe()
    q = rir.raman_q(probe)[0]
    vt = thermal.thermal_velocity(100e-6)
    g = np.linspace(-6, 6, 4801) * q * vt
    w_max, w_min = rir.spectrum_extrema(g, rir.rir_signal(g, 100e-6, probe, 1.0))
    target = 2 * math.pi * 28.9e3
    worst = 0.0
    for t in np.geomspace(20e-6, 500e-6, 9):
        gt = np.linspace(-6, 6, 1201) * q * thermal.thermal_velocity(t)
        fit = rir.fit_temperature_rir(rir.rir_spectrum(gt, t, probe))
        worst = max(worst, abs(fit.temperature / t - 1))
    ok = abs(w_max / target - 1) <= 0.02 and abs(-w_min / target - 1) <= 0.02 and worst <= 5e-3
    verdict(5, "RIR free-atom spectrum", ok,
            f"extrema {w_max / 2e3 / math.pi:+.2f}/{w_min / 2e3 / math.pi:+.2f} kHz, "
            f"worst fit error {worst:.1e}")


def test_criterion_06_geometry_factor():
    f = rir.geometry_factor(math.radians(3))
    tau = rir.grating_lifetime(100e-6, rir.paper_probe(), trapped=True)
    ok = abs(f - 19.11) < 5e-3 and abs(tau / 100e-6 - 1) <= 0.15 and abs(tau / 105e-6 - 1) < 0.01
    verdict(6, "geometry factor chain", ok, f"f = {f:.3f}, lifetime {tau * 1e6:.1f} us")


def test_criterion_07_critical_scan_rate():
    probe = rir.paper_probe()
    free = rir.critical_scan_rate(100e-6, probe)
    trapped = rir.critical_scan_rate(100e-6, probe, trapped=True)
    f2 = rir.geometry_factor(probe.phi) ** 2
    ok = (abs(free / 0.84e9 - 1) < 0.01 and 1 / 3 <= free / 2.1e9 <= 3
          and abs(trapped * f2 / free - 1) < 1e-12)
    verdict(7, "critical scan rate", ok,
            f"free {free / 1e9:.3f} kHz/us, trapped {trapped / 1e9:.5f} kHz/us (f^2 = {f2:.1f})")


def test_criterion_08_bloch_ringing():
    cfg = bloch.paper_sweep(n_samples=8001)
    bloch.integrate_sweep(replace(cfg, n_samples=11))  # compile outside the timed block
    slow = bloch.paper_sweep(scan_rate=0.01 * (cfg.gamma / (2 * math.pi)) ** 2,
                             delta_start=-10 * cfg.gamma, delta_end=10 * cfg.gamma,
                             n_samples=2001)
    start = time.perf_counter()
    tr = bloch.integrate_sweep(cfg)
    pre = np.max(np.abs(tr.v[bloch.pre_resonance_mask(tr, cfg)])) / np.max(np.abs(tr.v))
    m = bloch.ringing_metrics(tr, cfg)
    dev = np.max(np.abs(m.instantaneous_freqs / np.abs(cfg.detuning(m.mid_times)) - 1))
    tr_slow = bloch.integrate_sweep(slow)
    ref = bloch.adiabatic_trace(slow)
    adiabatic = np.max(np.abs(tr_slow.v - ref.v) / ref.v)
    elapsed = time.perf_counter() - start
    ok = pre < 0.05 and m.n_oscillations >= 5 and dev <= 0.10 and adiabatic <= 0.05 \
        and elapsed < 10
    verdict(8, "Bloch ringing", ok,
            f"pre {pre:.3f}, {m.n_oscillations:g} oscillations, chirp dev {dev:.3f}, "
            f"adiabatic dev {adiabatic:.4f}, {elapsed:.2f} s")


def _random_damped(rng):
    gamma = 2 * math.pi * rng.uniform(1e3, 2e4)
    span = rng.uniform(5, 25) * gamma
    return SweepConfig(gamma=gamma, rabi=rng.uniform(0, 2) * gamma,
                       scan_rate=rng.uniform(0.05, 30) * gamma ** 2 / (2 * math.pi),
                       delta_start=-span * rng.uniform(0.3, 1), delta_end=span,
                       tolerance=10 ** rng.uniform(-10, -5), n_samples=401)


def _random_hamiltonian(rng):
    rabi = 2 * math.pi * rng.uniform(1e3, 2e4)
    span = rng.uniform(5, 25) * rabi
    return SweepConfig(gamma=0.0, rabi=rabi, scan_rate=rng.uniform(0.05, 30) * rabi ** 2,
                       delta_start=-span, delta_end=span * rng.uniform(0.3, 1),
                       tolerance=10 ** rng.uniform(-10, -6), n_samples=401)


def test_criterion_09_bloch_invariants():
    rng = np.random.default_rng(9)
    n = 120
    contained = conserved = converged = 0
    for _ in range(n):
        cfg = _random_damped(rng)
        a = bloch.integrate_sweep(cfg)
        contained += bool(np.all(a.norm <= 1 + 10 * cfg.tolerance))
        b = bloch.integrate_sweep(replace(cfg, tolerance=cfg.tolerance / 2))
        diff = np.max(np.abs(np.vstack([a.u - b.u, a.v - b.v, a.w - b.w])))
        converged += bool(diff < cfg.tolerance * a.n_steps)
        h = _random_hamiltonian(rng)
        conserved += bool(np.max(np.abs(bloch.integrate_sweep(h).norm - 1)) <= 10 * h.tolerance)
    verdict(9, "Bloch invariant suite", contained == conserved == converged == n,
            f"{n} configs: containment {contained}, norm {conserved}, halving {converged}")


def test_criterion_10_thermal_suite():
    times = np.array([0, 1, 2, 4, 6, 8, 10, 12]) * 1e-3
    clean = thermal.fit_temperature_tof(thermal.synthetic_tof(times, 1e-4, 140e-6))
    noisy = thermal.fit_temperature_tof(
        thermal.synthetic_tof(times, 1e-4, 140e-6, noise=0.01, seed=20030917))
    st_ = trap.make_trap(5.0, cavity.paper_geometry("p"), 799e-9)
    ens = thermal.sample_ensemble(100_000, 100e-6, st_, seed=20030917)
    sig = thermal.thermal_velocity(100e-6)
    p_values = [stats.kstest(ens.velocities[:, i], "norm", args=(0, sig)).pvalue for i in range(3)]
    ratio = thermal.depth_ratio(280e-6, sc.k * 1.4e-3)
    ok = (abs(clean.temperature / 140e-6 - 1) <= 1e-3
          and abs(noisy.temperature / 140e-6 - 1) <= 0.03
          and min(p_values) > 0.01 and abs(ratio - 0.20) < 1e-12)
    verdict(10, "thermal suite", ok,
            f"TOF errors {abs(clean.temperature / 140e-6 - 1):.1e}/"
            f"{abs(noisy.temperature / 140e-6 - 1):.3f}, KS min p {min(p_values):.3f}, "
            f"T/U {ratio:.3f}")


def test_criterion_11_determinism(tmp_path):
    cfg = paper_defaults()
    cli.run_subcommand("report", cfg, {"out": str(tmp_path / "a")})
    cli.run_subcommand("report", cfg, {"out": str(tmp_path / "b")})
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
               for f in ("report.json", "run_report.json"))
    verdict(11, "report determinism", same, "two consecutive runs byte-identical" if same
            else "outputs differ")


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-v"]))
