"""Command-line front end.

Exit status: 0 success, 2 configuration error, 3 domain/physics error,
4 I/O error.  Outputs are computed in memory first and only then written,
each through a temp file and rename, so a failing command leaves nothing
partial behind.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, bloch, cavity, reproduction, rir, thermal, trap
from ._accel import backend_name
from ._io import atomic_write, csv_bytes, sha256
from .config import load_config, paper_defaults
from .errors import ConfigError, DomainError, IntegrationError, SchemaError
from .physics import constants, using_constants
from .plotting import PlotSpec, emit_plot, read_columns

REPORT_SCHEMA = "ringcav.report/1"
OUTPUT_ENV = "RINGCAV_OUTPUT_DIR"

SUBCOMMANDS = ("cavity", "trap", "modes", "tof", "rir-spectrum", "rir-fit",
               "bloch-sweep", "bloch-critical", "report")

EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 2, 3, 4


@dataclass
class RunReport:
    subcommand: str
    config: dict
    derived: dict
    manifest: list = field(default_factory=list)
    schema: str = REPORT_SCHEMA

    def to_json(self):
        doc = {
            "schema": self.schema,
            "version": __version__,
            "backend": backend_name(),
            "subcommand": self.subcommand,
            "config": self.config,
            "derived": self.derived,
            "manifest": self.manifest,
        }
        return json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _json_bytes(doc):
    return (json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n").encode()


def _table(rows):
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{name:<{width}}  {value:>14.6g}  {unit}" for name, value, unit in rows)


# -- subcommands -----------------------------------------------------------
# Each returns (derived dict, {filename: bytes}, text for stdout).

def _cmd_cavity(cfg, flags):
    pol = flags.get("polarization") or cfg.cavity.polarization
    geo = cfg.geometry(pol)
    measured = getattr(cfg.cavity, f"measured_finesse_{pol}")
    char = cavity.characterize(geo, measured)
    p_in = cfg.cavity.input_power(geo)
    p_circ = cavity.circulating_power(p_in, geo, cfg.cavity.mode_match)
    rows = [
        ("free_spectral_range", char.fsr, "Hz"),
        ("finesse_measured", measured, ""),
        ("finesse_mirrors_only", cavity.finesse_from_losses(geo.with_extra_loss(0.0)), ""),
        ("extra_loss", geo.extra_loss, ""),
        ("linewidth_fwhm", char.linewidth_fwhm, "Hz"),
        ("kappa_intensity_over_2pi", char.intensity_decay_rate / (2 * math.pi), "Hz"),
        ("kappa_field_over_2pi", char.field_decay_rate / (2 * math.pi), "Hz"),
        ("buildup_F_over_pi", char.buildup, ""),
        ("buildup_circulating_over_input", p_circ / p_in if p_in else float("nan"), ""),
        ("input_power", p_in, "W"),
        ("circulating_power_per_direction", p_circ, "W"),
        ("mode_volume", char.mode_volume, "m^3"),
    ]
    derived = {name: value for name, value, _ in rows}
    derived["polarization"] = pol
    body = csv_bytes(["quantity", "value", "unit"], [(n, v, u) for n, v, u in rows])
    return derived, {"cavity.csv": body}, _table(rows)


def _cmd_trap(cfg, flags):
    species = cfg.atom()
    st = cfg.trap_state()
    kB = constants().kB
    rows = [
        ("power_per_direction", st.circulating_power_per_direction, "W"),
        ("antinode_intensity", trap.antinode_intensity(st.circulating_power_per_direction,
                                                       st.geometry), "W/m^2"),
        ("depth", st.depth / kB, "K"),
        ("omega_ax_over_2pi", st.omega_ax / (2 * math.pi), "Hz"),
        ("omega_rad_v_over_2pi", st.omega_rad_v / (2 * math.pi), "Hz"),
        ("omega_rad_h_over_2pi", st.omega_rad_h / (2 * math.pi), "Hz"),
        ("frequency_ratio", trap.frequency_ratio(st.wavelength, st.geometry), ""),
        ("envelope_omega_over_2pi", trap.envelope_frequency(st, species) / (2 * math.pi), "Hz"),
        ("scattering_rate", trap.scattering_rate(st.depth, st.wavelength, species), "1/s"),
        ("antinode_count", trap.antinode_count(cfg.trap.cloud_extent_mm * 1e-3, st.wavelength),
         ""),
    ]
    derived = {name: value for name, value, _ in rows}
    body = csv_bytes(["quantity", "value", "unit"], rows)
    return derived, {"trap.csv": body}, _table(rows)


def _cmd_modes(cfg, flags):
    m, n = int(flags.get("m", 0)), int(flags.get("n", 0))
    points = int(flags.get("points") or 101)
    extent = float(flags.get("extent_waists") or 3.0)
    geo = cfg.geometry()
    mode = trap.TransverseMode(m, n, geo.waist_h, geo.waist_v)
    x = np.linspace(-extent, extent, points) * geo.waist_h
    y = np.linspace(-extent, extent, points) * geo.waist_v
    p = cfg.trap.power_per_direction_w
    peak = 2 * p / (math.pi * geo.waist_h * geo.waist_v)
    grid = trap.hermite_gauss_intensity(mode, x, y, peak)
    rows = [(x[j], y[i], grid[i, j]) for i in range(points) for j in range(points)]
    name = f"modes_m{m}_n{n}.csv"
    derived = {"m": m, "n": n, "points": points, "peak_intensity_w_per_m2": float(grid.max())}
    return derived, {name: csv_bytes(["x_m", "y_m", "intensity_w_per_m2"], rows)}, \
        f"TEM{m}{n}: {points}x{points} grid -> {name}"


def _cmd_tof(cfg, flags):
    species = cfg.atom()
    if flags.get("input"):
        t, s = read_columns(flags["input"], ["t_s", "width_m"])
        series = thermal.TofSeries(np.array(t), np.array(s))
        source = str(flags["input"])
    else:
        times = np.asarray(cfg.thermal.tof_times_ms) * 1e-3
        noise = cfg.thermal.tof_noise if flags.get("noise") is None else float(flags["noise"])
        series = thermal.synthetic_tof(times, cfg.thermal.sigma0_um * 1e-6,
                                       cfg.thermal.temperature_uk * 1e-6, species,
                                       noise=noise, seed=cfg.thermal.seed)
        source = "synthetic"
    fit = thermal.fit_temperature_tof(series, species)
    doc = {"temperature_K": fit.temperature, "sigma0_m": fit.sigma0,
           "residual_m": fit.residual, "points": int(series.times.size), "source": source}
    files = {"tof_fit.json": _json_bytes(doc)}
    if not flags.get("input"):
        files["tof_series.csv"] = csv_bytes(["t_s", "width_m"],
                                            zip(series.times, series.widths))
    return doc, files, f"T = {fit.temperature * 1e6:.3f} uK, sigma0 = {fit.sigma0 * 1e6:.2f} um"


def _cmd_rir_spectrum(cfg, flags):
    species = cfg.atom()
    probe = cfg.raman_probe()
    temperature = float(flags.get("temperature") or cfg.thermal.temperature_uk * 1e-6)
    trapped = bool(flags.get("trapped"))
    points = int(flags.get("points") or 1201)
    q = rir.effective_q(probe, trapped)
    width = q * thermal.thermal_velocity(temperature, species)
    span = flags.get("span_khz")
    half = 2 * math.pi * float(span) * 1e3 if span else 6 * width
    grid = np.linspace(-half, half, points)
    spec = rir.rir_spectrum(grid, temperature, probe, cfg.thermal.atom_count, species,
                            trapped, cfg.probe.flip_sign)
    w_max, w_min = rir.spectrum_extrema(spec.delta_omega, spec.signal)
    derived = {"temperature_K": temperature, "q_rad_per_m": q, "trapped": trapped,
               "max_hz": w_max / (2 * math.pi), "min_hz": w_min / (2 * math.pi)}
    body = csv_bytes(["delta_omega_hz", "signal"], zip(grid / (2 * math.pi), spec.signal))
    return derived, {"rir_spectrum.csv": body}, \
        f"extrema at {w_max / 2e3 / math.pi:+.3f} kHz and {w_min / 2e3 / math.pi:+.3f} kHz"


def _cmd_rir_fit(cfg, flags):
    if not flags.get("input"):
        raise ConfigError("rir-fit needs --input CSV")
    species = cfg.atom()
    probe = cfg.raman_probe()
    trapped = bool(flags.get("trapped"))
    d_hz, sig = read_columns(flags["input"], ["delta_omega_hz", "signal"])
    q = rir.effective_q(probe, trapped)
    spec = rir.RirSpectrum(2 * math.pi * np.array(d_hz), np.array(sig), q)
    fit = rir.fit_temperature_rir(spec, species)
    doc = {"temperature_K": fit.temperature, "q": q, "method": fit.method,
           "temperature_closed_form_K": fit.temperature_closed_form,
           "residual": fit.residual, "trapped": trapped}
    return doc, {"rir_fit.json": _json_bytes(doc)}, f"T = {fit.temperature * 1e6:.3f} uK"


def _sweep_from_flags(cfg, flags):
    sweep = cfg.sweep_config()
    if flags.get("rate_khz_per_us") is not None:
        sweep = replace(sweep, scan_rate=float(flags["rate_khz_per_us"]) * 1e9)
    if flags.get("fixed_step"):
        step = float(flags.get("step_us") or cfg.sweep.fixed_step_us) * 1e-6
        sweep = replace(sweep, fixed_step=True, max_step=step)
    return sweep


def _cmd_bloch_sweep(cfg, flags):
    sweep = _sweep_from_flags(cfg, flags)
    n_classes = int(flags.get("classes") or cfg.sweep.n_classes)
    if n_classes > 1:
        temperature = float(flags.get("temperature") or cfg.thermal.temperature_uk * 1e-6)
        tr = bloch.inhomogeneous_average(temperature, cfg.raman_probe(), cfg.atom(), sweep,
                                         n_classes, bool(flags.get("trapped")))
    else:
        tr = bloch.integrate_sweep(sweep)
    rows = zip(tr.t, tr.delta / (2 * math.pi), tr.u, tr.v, tr.w, tr.im_rho12)
    body = csv_bytes(["t_s", "delta_hz", "u", "v", "w", "im_rho12"], rows)
    derived = {"steps": tr.n_steps, "samples": int(tr.t.size), "fixed_step": sweep.fixed_step,
               "dimensionless_rate": sweep.dimensionless_rate, "classes": n_classes,
               "max_abs_v": float(np.max(np.abs(tr.v)))}
    try:
        m = bloch.ringing_metrics(tr, sweep)
        derived["ringing_onset_s"] = m.onset_time
        derived["ringing_oscillations"] = m.n_oscillations
        derived["envelope_decay_rate_rad_per_s"] = m.envelope_decay_rate
    except DomainError:
        derived["ringing_oscillations"] = 0
    return derived, {"bloch_sweep.csv": body}, \
        f"{tr.n_steps} steps, {derived['ringing_oscillations']} ringing oscillations"


def _cmd_bloch_critical(cfg, flags):
    sweep = cfg.sweep_config()
    threshold = float(flags.get("threshold") or cfg.sweep.critical_threshold)
    if flags.get("gamma_from_rir"):
        species = cfg.atom()
        probe = cfg.raman_probe()
        g = rir.raman_q(probe)[0] * thermal.thermal_velocity(cfg.thermal.temperature_uk * 1e-6,
                                                             species)
        sweep = replace(sweep, gamma=g, rabi=cfg.sweep.rabi_over_gamma * g,
                        delta_start=-20 * g, delta_end=20 * g)
    rate = bloch.critical_rate_scan(sweep, threshold)
    doc = {"critical_rate_hz_per_s": rate, "threshold": threshold,
           "gamma_rad_per_s": sweep.gamma}
    return doc, {"bloch_critical.json": _json_bytes(doc)}, \
        f"critical rate {rate / 1e9:.4g} kHz/us at threshold {threshold:g}"


def _cmd_report(cfg, flags):
    checks = reproduction.paper_reproduction(cfg)
    doc = {"criteria": checks, "all_passed": all(c["passed"] for c in checks.values())}
    lines = [f"[{'PASS' if c['passed'] else 'FAIL'}] {key}: {c['name']}"
             for key, c in checks.items()]
    return doc, {"report.json": _json_bytes(doc)}, "\n".join(lines)


_DISPATCH = {
    "cavity": _cmd_cavity,
    "trap": _cmd_trap,
    "modes": _cmd_modes,
    "tof": _cmd_tof,
    "rir-spectrum": _cmd_rir_spectrum,
    "rir-fit": _cmd_rir_fit,
    "bloch-sweep": _cmd_bloch_sweep,
    "bloch-critical": _cmd_bloch_critical,
    "report": _cmd_report,
}


def output_dir(cfg, flags):
    return Path(flags.get("out") or os.environ.get(OUTPUT_ENV) or cfg.output.directory)


def run_subcommand(name, cfg, flags=None, echo=None):
    """Run one subcommand and write its outputs plus ``<name>.report.json``."""
    flags = dict(flags or {})
    if name not in _DISPATCH:
        raise ConfigError(f"unknown subcommand {name!r}")
    if flags.get("seed") is not None:
        cfg = replace(cfg, thermal=replace(cfg.thermal, seed=int(flags["seed"])))
    with using_constants(cfg.physical_constants()):
        derived, files, text = _DISPATCH[name](cfg, flags)
    out = output_dir(cfg, flags)
    report = RunReport(name, cfg.to_dict(), derived)
    for fname in sorted(files):
        report.manifest.append({"file": fname, "bytes": len(files[fname]),
                                "sha256": sha256(files[fname])})
    for fname in sorted(files):
        atomic_write(out / fname, files[fname])
    report_name = "run_report.json" if name == "report" else f"{name}.report.json"
    atomic_write(out / report_name, report.to_json().encode())
    if echo:
        echo(text)
    return report


def _parser():
    p = argparse.ArgumentParser(prog="ringcav", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="experiment config JSON (default: shipped apparatus defaults)")
    p.add_argument("--out", help=f"output directory (env {OUTPUT_ENV} also works)")
    p.add_argument("--seed", type=int, help="override thermal.seed")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cavity", help="cavity parameter table")
    s.add_argument("--polarization", choices=("p", "s"))

    sub.add_parser("trap", help="trap parameter table")

    s = sub.add_parser("modes", help="Hermite-Gauss intensity grid as CSV")
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--points", type=int, default=101)
    s.add_argument("--extent-waists", type=float, default=3.0)

    s = sub.add_parser("tof", help="fit a time-of-flight series")
    s.add_argument("--input", help="CSV with t_s,width_m; omit for a synthetic series")
    s.add_argument("--noise", type=float)

    s = sub.add_parser("rir-spectrum", help="RIR spectrum CSV")
    s.add_argument("--temperature", type=float, help="K")
    s.add_argument("--trapped", action="store_true")
    s.add_argument("--points", type=int, default=1201)
    s.add_argument("--span-khz", type=float)

    s = sub.add_parser("rir-fit", help="temperature from an RIR spectrum CSV")
    s.add_argument("--input", required=True)
    s.add_argument("--trapped", action="store_true")

    s = sub.add_parser("bloch-sweep", help="swept Bloch trace CSV")
    s.add_argument("--rate-khz-per-us", type=float)
    s.add_argument("--fixed-step", action="store_true")
    s.add_argument("--step-us", type=float)
    s.add_argument("--classes", type=int)
    s.add_argument("--temperature", type=float)
    s.add_argument("--trapped", action="store_true")

    s = sub.add_parser("bloch-critical", help="critical scan rate by bisection")
    s.add_argument("--threshold", type=float)
    s.add_argument("--gamma-from-rir", action="store_true",
                   help="set G to the free-atom RIR width q v_th")

    sub.add_parser("report", help="full reproduction report of the published numbers")

    s = sub.add_parser("plot", help="render two CSV columns as SVG")
    s.add_argument("csv")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--title", default="")
    s.add_argument("--output")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        if args.command == "plot":
            path = emit_plot(args.csv, PlotSpec(args.x, args.y, args.title), args.output)
            print(path)
            return 0
        cfg = load_config(args.config) if args.config else paper_defaults()
        run_subcommand(args.command, cfg, flags, echo=print)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
