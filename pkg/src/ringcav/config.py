"""Experiment configuration: JSON with units spelled out in every key.

Unknown keys are rejected and every error carries the dotted field path.
An empty file (or ``{}``) yields the shipped ``paper_defaults``.
"""
import json
import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

from . import bloch, cavity, physics, rir, trap
from ._io import atomic_write
from .errors import ConfigError, DomainError

SCHEMA = "ringcav.config/1"


def _positive(x):
    return x > 0


def _nonnegative(x):
    return x >= 0


def _unit(x):
    return 0 <= x <= 1


def _checked(default, check=None, kind=float):
    meta = {"check": check, "kind": kind}
    if isinstance(default, list):
        return field(default_factory=lambda: list(default), metadata=meta)
    return field(default=default, metadata=meta)


@dataclass
class ConstantsBlock:
    c_m_per_s: float = _checked(physics.CODATA.c, _positive)
    hbar_j_s: float = _checked(physics.CODATA.hbar, _positive)
    kb_j_per_k: float = _checked(physics.CODATA.kB, _positive)
    amu_kg: float = _checked(physics.CODATA.amu, _positive)

    def build(self):
        return physics.PhysicalConstants.from_hbar(
            c=self.c_m_per_s, hbar=self.hbar_j_s, kB=self.kb_j_per_k, amu=self.amu_kg
        )


@dataclass
class SpeciesBlock:
    label: str = _checked("85Rb", kind=str)
    mass_amu: float = _checked(84.9118, _positive)
    d2_wavelength_nm: float = _checked(780.241, _positive)
    d1_wavelength_nm: float = _checked(794.979, _positive)
    gamma_2pi_mhz: float = _checked(6.07, _positive)
    i_sat_w_per_m2: float = _checked(16.7, _positive)

    def build(self, pc):
        return physics.AtomSpecies(
            mass=self.mass_amu * pc.amu,
            d2_wavelength=self.d2_wavelength_nm * 1e-9,
            d1_wavelength=self.d1_wavelength_nm * 1e-9,
            gamma=2 * math.pi * self.gamma_2pi_mhz * 1e6,
            i_sat=self.i_sat_w_per_m2,
            label=self.label,
        )


@dataclass
class CavityBlock:
    round_trip_length_mm: float = _checked(85.0, _positive)
    waist_v_um: float = _checked(129.0, _positive)
    waist_h_um: float = _checked(124.0, _positive)
    polarization: str = _checked("p", lambda s: s in ("p", "s"), kind=str)
    transmissions_p_ppm: list = _checked([2200.0, 9.0, 9.0], kind=list)
    transmissions_s_ppm: list = _checked([27.0, 2.0, 2.0], kind=list)
    measured_finesse_p: float = _checked(2500.0, _positive)
    measured_finesse_s: float = _checked(170000.0, _positive)
    # null: chosen so the mirror data reproduce the measured finesse
    extra_loss_p_ppm: float = _checked(None, _nonnegative, kind=(float, type(None)))
    extra_loss_s_ppm: float = _checked(None, _nonnegative, kind=(float, type(None)))
    mode_match: float = _checked(1.0, _unit)
    # null: inverted from circulating_power_per_direction_w
    input_power_mw: float = _checked(None, _nonnegative, kind=(float, type(None)))
    circulating_power_per_direction_w: float = _checked(5.0, _nonnegative)

    def build(self, polarization=None):
        pol = polarization or self.polarization
        ts = getattr(self, f"transmissions_{pol}_ppm")
        if len(ts) != 3:
            raise ConfigError("need three transmissions", f"cavity.transmissions_{pol}_ppm")
        geo = cavity.CavityGeometry(
            self.round_trip_length_mm * 1e-3,
            self.waist_v_um * 1e-6,
            self.waist_h_um * 1e-6,
            tuple(t * 1e-6 for t in ts),
            0.0,
        )
        extra = getattr(self, f"extra_loss_{pol}_ppm")
        if extra is None:
            extra = cavity.extra_loss_for_finesse(geo, getattr(self, f"measured_finesse_{pol}"))
        else:
            extra *= 1e-6
        return geo.with_extra_loss(extra)

    def input_power(self, geometry):
        if self.input_power_mw is not None:
            return self.input_power_mw * 1e-3
        return cavity.input_power_for(self.circulating_power_per_direction_w, geometry,
                                      self.mode_match)


@dataclass
class TrapBlock:
    wavelength_nm: float = _checked(799.0, _positive)
    # 10 W total intracavity power split over the two pumped directions
    power_per_direction_w: float = _checked(5.0, _nonnegative)
    cloud_extent_mm: float = _checked(4.0, _nonnegative)


@dataclass
class ProbeBlock:
    wavelength_nm: float = _checked(780.241, _positive)
    theta_deg: float = _checked(13.1, lambda x: 0 < x < 90)
    phi_deg: float = _checked(3.0, lambda x: 0 <= x <= 90)
    detuning_mhz: float = _checked(-110.0, lambda x: x != 0)
    intensity_1_mw_per_cm2: float = _checked(50.0, _nonnegative)
    intensity_2_mw_per_cm2: float = _checked(50.0, _nonnegative)
    flip_sign: bool = _checked(False, kind=bool)

    def build(self):
        return rir.RamanProbe(
            wavelength=self.wavelength_nm * 1e-9,
            theta=math.radians(self.theta_deg),
            phi=math.radians(self.phi_deg),
            detuning=2 * math.pi * self.detuning_mhz * 1e6,
            intensity_1=self.intensity_1_mw_per_cm2 * 10.0,
            intensity_2=self.intensity_2_mw_per_cm2 * 10.0,
        )


@dataclass
class SweepBlock:
    gamma_2pi_khz: float = _checked(5.0, _nonnegative)
    rabi_over_gamma: float = _checked(0.1, _nonnegative)
    scan_rate_khz_per_us: float = _checked(2.1, lambda x: x != 0)
    delta_start_2pi_khz: float = _checked(-200.0)
    delta_end_2pi_khz: float = _checked(200.0)
    tolerance: float = _checked(1e-8, lambda x: 0 < x <= 1e-3)
    max_step_us: float = _checked(None, _positive, kind=(float, type(None)))
    n_samples: int = _checked(4001, lambda n: n >= 2, kind=int)
    fixed_step: bool = _checked(False, kind=bool)
    fixed_step_us: float = _checked(0.01, _positive)
    critical_threshold: float = _checked(0.1, _positive)
    n_classes: int = _checked(1, lambda n: n >= 1, kind=int)

    def build(self):
        gamma = 2 * math.pi * self.gamma_2pi_khz * 1e3
        if self.fixed_step:
            max_step = self.fixed_step_us * 1e-6
        else:
            max_step = None if self.max_step_us is None else self.max_step_us * 1e-6
        return bloch.SweepConfig(
            gamma=gamma,
            rabi=self.rabi_over_gamma * gamma,
            scan_rate=self.scan_rate_khz_per_us * 1e9,
            delta_start=2 * math.pi * self.delta_start_2pi_khz * 1e3,
            delta_end=2 * math.pi * self.delta_end_2pi_khz * 1e3,
            max_step=max_step,
            tolerance=self.tolerance,
            n_samples=self.n_samples,
            fixed_step=self.fixed_step,
        )


@dataclass
class ThermalBlock:
    atom_count: float = _checked(3e7, _nonnegative)
    temperature_uk: float = _checked(100.0, _positive)
    seed: int = _checked(20030917, lambda s: 0 <= s < 2 ** 64, kind=int)
    n_samples: int = _checked(100000, _nonnegative, kind=int)
    sigma0_um: float = _checked(100.0, _positive)
    tof_times_ms: list = _checked([0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0], kind=list)
    tof_noise: float = _checked(0.01, _nonnegative)


@dataclass
class OutputBlock:
    directory: str = _checked("ringcav_out", kind=str)
    csv: bool = _checked(True, kind=bool)
    svg: bool = _checked(False, kind=bool)


@dataclass
class ExperimentConfig:
    constants: ConstantsBlock = field(default_factory=ConstantsBlock)
    species: SpeciesBlock = field(default_factory=SpeciesBlock)
    cavity: CavityBlock = field(default_factory=CavityBlock)
    trap: TrapBlock = field(default_factory=TrapBlock)
    probe: ProbeBlock = field(default_factory=ProbeBlock)
    sweep: SweepBlock = field(default_factory=SweepBlock)
    thermal: ThermalBlock = field(default_factory=ThermalBlock)
    output: OutputBlock = field(default_factory=OutputBlock)

    # -- physics objects ------------------------------------------------
    def physical_constants(self):
        return self.constants.build()

    def atom(self):
        return self.species.build(self.physical_constants())

    def geometry(self, polarization=None):
        return self.cavity.build(polarization)

    def trap_state(self):
        with physics.using_constants(self.physical_constants()):
            return trap.make_trap(
                self.trap.power_per_direction_w,
                self.geometry(),
                self.trap.wavelength_nm * 1e-9,
                self.atom(),
            )

    def raman_probe(self):
        return self.probe.build()

    def sweep_config(self):
        return self.sweep.build()

    def to_dict(self):
        return {"schema": SCHEMA, **asdict(self)}


_BLOCKS = {f.name: f.default_factory for f in fields(ExperimentConfig)}


def _coerce(value, kind, path):
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if value is None:
        if type(None) in kinds:
            return None
        raise ConfigError("null is not allowed here", path)
    if bool in kinds:
        if isinstance(value, bool):
            return value
        raise ConfigError(f"expected true/false, got {value!r}", path)
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if int in kinds and float not in kinds:
        if isinstance(value, int) or (isinstance(value, float) and value.is_integer()):
            return int(value)
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if float in kinds:
        if isinstance(value, (int, float)) and math.isfinite(value):
            return float(value)
        raise ConfigError(f"expected a finite number, got {value!r}", path)
    if str in kinds:
        if isinstance(value, str):
            return value
        raise ConfigError(f"expected a string, got {value!r}", path)
    if list in kinds:
        if isinstance(value, list) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            return [float(v) for v in value]
        raise ConfigError("expected a list of numbers", path)
    raise ConfigError(f"unsupported value {value!r}", path)  # pragma: no cover


def _load_block(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", path)
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", f"{path}.{unknown[0]}")
    block = cls()
    for name, value in data.items():
        f = known[name]
        fpath = f"{path}.{name}"
        value = _coerce(value, f.metadata["kind"], fpath)
        check = f.metadata["check"]
        if value is not None and check is not None and not check(value):
            raise ConfigError(f"value {value!r} out of range", fpath)
        setattr(block, name, value)
    return block


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    data = dict(data)
    schema = data.pop("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported schema {schema!r}", "schema")
    unknown = sorted(set(data) - set(_BLOCKS))
    if unknown:
        raise ConfigError(f"unknown block {unknown[0]!r}", unknown[0])
    cfg = ExperimentConfig()
    for name, value in data.items():
        setattr(cfg, name, _load_block(type(_BLOCKS[name]()), value, name))
    validate(cfg)
    return cfg


def validate(cfg):
    """Re-check the physical invariants of every derived object."""
    checks = [
        ("constants", cfg.physical_constants),
        ("species", cfg.atom),
        ("cavity", lambda: (cfg.geometry("p"), cfg.geometry("s"))),
        ("trap", cfg.trap_state),
        ("probe", cfg.raman_probe),
        ("sweep", cfg.sweep_config),
    ]
    for path, build in checks:
        try:
            build()
        except ConfigError:
            raise
        except DomainError as exc:
            raise ConfigError(str(exc), path) from None


def load_config(path):
    """Read and validate a config file; missing keys take the shipped defaults."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    if not text.strip():
        return config_from_dict({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return config_from_dict(data)


def dump_config(cfg):
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def write_config(cfg, path):
    atomic_write(path, dump_config(cfg).encode())


def paper_defaults_text():
    return resources.files("ringcav.data").joinpath("paper_defaults.json").read_text()


def paper_defaults():
    return config_from_dict(json.loads(paper_defaults_text()))
