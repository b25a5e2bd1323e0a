"""INI-style run configuration.

All frequencies in units of 2*pi x MHz, phases in degrees.  Example::

    [drives]
    omega21 = 0.1        ; amplitude Omega of omega21
    phi21_deg = 0
    omega31 = 1
    omega32 = 1
    delta = 10

    [decoherence]
    gamma = 0.1          ; shorthand: every relaxation and dephasing rate
    ; gamma12 = ..., gamma13, gamma23, deph21, deph31, deph32 override it

    [equilibrium]
    p1 = 1
    p2 = 0
    p3 = 0

    [molecule]
    name = 1,2-propanediol
    nu21 = 100961300
    nu31 = 100962100
    nu32 = 846.8

Optional run sections: ``[switch]`` (silenced = L|R), ``[mixture]``
(n_left, n_right), ``[robust]`` (target_eta) and ``[sweep]`` (see
:class:`SweepSettings`).  The preset name ``baseline`` stands for the
defaults above.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidConfigError
from .qmodel import (
    Chirality,
    DecoherenceConfig,
    DriveConfig,
    EquilibriumState,
    MoleculeMetadata,
    polar,
)

PRESETS = ("baseline",)

_KNOWN = {
    "drives": {"omega21", "phi21_deg", "omega31", "phi31_deg", "omega32", "phi32_deg", "delta"},
    "decoherence": {"gamma", "gamma12", "gamma13", "gamma23", "deph21", "deph31", "deph32"},
    "equilibrium": {"p1", "p2", "p3"},
    "molecule": {"name", "nu21", "nu31", "nu32"},
    "switch": {"silenced"},
    "mixture": {"n_left", "n_right"},
    "robust": {"target_eta"},
    "sweep": None,  # validated against SweepSettings fields
}


@dataclass(frozen=True)
class SweepSettings:
    omega_min: float = 0.0
    omega_max: float = 0.2
    n_omega: int = 201
    phi_min_deg: float = 0.0
    phi_max_deg: float = 360.0
    n_phi: int = 181
    n_phi_line: int = 721
    delta_min: float = 0.5
    delta_max: float = 20.0
    n_delta: int = 41
    gamma_ratios: tuple = (0.1, 1.0, 10.0)
    domega_rel_max: float = 2e-3
    dphi_max_deg: float = 0.12
    n_dev: int = 81

    def with_grid(self, n: int) -> "SweepSettings":
        """Uniform resolution override used by ``--grid``."""
        if n < 1:
            raise InvalidConfigError("--grid must be >= 1")
        return dataclasses.replace(
            self, n_omega=n, n_phi=n, n_phi_line=n, n_delta=n, n_dev=n
        )


@dataclass(frozen=True)
class RunConfig:
    drives: DriveConfig = field(default_factory=lambda: DriveConfig(0.1, 1.0, 1.0, 10.0))
    decoherence: DecoherenceConfig = field(default_factory=lambda: DecoherenceConfig.uniform(0.1))
    equilibrium: EquilibriumState = field(default_factory=EquilibriumState)
    molecule: MoleculeMetadata = field(default_factory=MoleculeMetadata)
    silenced: Chirality = Chirality.LEFT
    n_left: float = 75.0
    n_right: float = 25.0
    target_eta: float = 0.01
    sweep: SweepSettings = field(default_factory=SweepSettings)

    @property
    def omega_bar(self) -> float:
        """Reference coupling for the gamma/Omega_bar decoherence regimes."""
        return abs(self.drives.omega31)

    def to_dict(self) -> dict:
        d = self.drives
        return {
            "drives": {
                "omega21_re": d.omega21.real,
                "omega21_im": d.omega21.imag,
                "omega21_amplitude": d.amplitude,
                "phi21_deg": d.phase_deg,
                "omega31_re": d.omega31.real,
                "omega31_im": d.omega31.imag,
                "omega32_re": d.omega32.real,
                "omega32_im": d.omega32.imag,
                "delta": d.delta,
            },
            "decoherence": dataclasses.asdict(self.decoherence),
            "equilibrium": dataclasses.asdict(self.equilibrium),
            "molecule": dataclasses.asdict(self.molecule),
            "switch": {"silenced": str(self.silenced)},
            "mixture": {"n_left": self.n_left, "n_right": self.n_right},
            "robust": {"target_eta": self.target_eta},
            "sweep": {k: list(v) if isinstance(v, tuple) else v
                      for k, v in dataclasses.asdict(self.sweep).items()},
            "units": "angular frequencies in 2*pi*MHz, phases in degrees",
        }


def _float(section, key, default):
    try:
        return section.getfloat(key, fallback=default)
    except ValueError as exc:
        raise InvalidConfigError(f"[{section.name}] {key}: {exc}") from None


def _check_keys(parser):
    for name in parser.sections():
        if name not in _KNOWN:
            raise InvalidConfigError(f"unknown config section [{name}]")
        allowed = _KNOWN[name]
        if allowed is None:
            allowed = {f.name for f in dataclasses.fields(SweepSettings)}
        unknown = set(parser[name]) - allowed
        if unknown:
            raise InvalidConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")


def _sweep_settings(section) -> SweepSettings:
    base = SweepSettings()
    values = {}
    for f in dataclasses.fields(SweepSettings):
        if f.name not in section:
            continue
        raw = section[f.name]
        try:
            if f.name == "gamma_ratios":
                values[f.name] = tuple(float(x) for x in raw.replace(",", " ").split())
            elif isinstance(getattr(base, f.name), int):
                values[f.name] = int(raw)
            else:
                values[f.name] = float(raw)
        except ValueError:
            raise InvalidConfigError(f"[sweep] {f.name}: cannot parse {raw!r}") from None
    return dataclasses.replace(base, **values)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise InvalidConfigError(f"malformed config: {exc}") from None
    _check_keys(parser)
    base = RunConfig()

    dr = parser["drives"] if parser.has_section("drives") else parser[parser.default_section]
    bd = base.drives
    drives = DriveConfig.from_polar(
        _float(dr, "omega21", bd.amplitude),
        _float(dr, "phi21_deg", bd.phase_deg),
        polar(_float(dr, "omega31", abs(bd.omega31)), _float(dr, "phi31_deg", 0.0)),
        polar(_float(dr, "omega32", abs(bd.omega32)), _float(dr, "phi32_deg", 0.0)),
        _float(dr, "delta", bd.delta),
    )

    dc = parser["decoherence"] if parser.has_section("decoherence") else parser[parser.default_section]
    gamma = _float(dc, "gamma", None)
    rates = {}
    for f in dataclasses.fields(DecoherenceConfig):
        fallback = gamma if gamma is not None else getattr(base.decoherence, f.name)
        rates[f.name] = _float(dc, f.name, fallback)
    dec = DecoherenceConfig(**rates)

    eq = parser["equilibrium"] if parser.has_section("equilibrium") else parser[parser.default_section]
    es = EquilibriumState(_float(eq, "p1", 1.0), _float(eq, "p2", 0.0), _float(eq, "p3", 0.0))

    mol = parser["molecule"] if parser.has_section("molecule") else parser[parser.default_section]
    bm = base.molecule
    molecule = MoleculeMetadata(
        mol.get("name", bm.name),
        _float(mol, "nu21", bm.nu21),
        _float(mol, "nu31", bm.nu31),
        _float(mol, "nu32", bm.nu32),
    )

    silenced = base.silenced
    if parser.has_section("switch") and "silenced" in parser["switch"]:
        silenced = Chirality.parse(parser["switch"]["silenced"])
    mix = parser["mixture"] if parser.has_section("mixture") else parser[parser.default_section]
    rob = parser["robust"] if parser.has_section("robust") else parser[parser.default_section]
    sweep = _sweep_settings(parser["sweep"]) if parser.has_section("sweep") else base.sweep

    return RunConfig(
        drives=drives,
        decoherence=dec,
        equilibrium=es,
        molecule=molecule,
        silenced=silenced,
        n_left=_float(mix, "n_left", base.n_left),
        n_right=_float(mix, "n_right", base.n_right),
        target_eta=_float(rob, "target_eta", base.target_eta),
        sweep=sweep,
    )


def load_config(source: str | Path | None) -> RunConfig:
    """Load a config file, or a preset by name (``baseline``); ``None`` means baseline."""
    if source is None or str(source) in PRESETS:
        return RunConfig()
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
