import pytest

from chiral_switch import Chirality
from chiral_switch.config import RunConfig, SweepSettings, load_config, parse_config
from chiral_switch.errors import InvalidConfigError

FULL = """
[drives]
omega21 = 0.2     ; amplitude
phi21_deg = 90
omega31 = 2
phi31_deg = 180
omega32 = 0.5
delta = -4

[decoherence]
gamma = 0.3
deph32 = 0.05

[equilibrium]
p1 = 0.9
p2 = 0.1
p3 = 0

[switch]
silenced = R

[mixture]
n_left = 10
n_right = 30

[robust]
target_eta = 0.02

[sweep]
n_omega = 11
gamma_ratios = 0.5, 2
"""


def test_baseline_preset():
    for source in (None, "baseline"):
        cfg = load_config(source)
        assert cfg == RunConfig()
        assert cfg.drives.omega21 == 0.1 and cfg.drives.delta == 10
        assert cfg.decoherence.rates == (0.1,) * 6


def test_full_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(FULL)
    cfg = load_config(path)
    d = cfg.drives
    assert d.amplitude == pytest.approx(0.2) and d.phase_deg == pytest.approx(90)
    assert d.omega31 == pytest.approx(-2) and d.omega32 == 0.5 and d.delta == -4
    assert cfg.decoherence.gamma12 == 0.3 and cfg.decoherence.deph32 == 0.05
    assert (cfg.equilibrium.p1, cfg.equilibrium.p2) == (0.9, 0.1)
    assert cfg.silenced is Chirality.RIGHT
    assert (cfg.n_left, cfg.n_right, cfg.target_eta) == (10, 30, 0.02)
    assert cfg.sweep.n_omega == 11 and cfg.sweep.gamma_ratios == (0.5, 2.0)
    assert cfg.sweep.n_phi == SweepSettings().n_phi
    assert cfg.omega_bar == pytest.approx(2)


@pytest.mark.parametrize(
    "text, match",
    [
        ("[drives]\nomega21 = fast\n", "omega21"),
        ("[drives]\nomgea21 = 0.1\n", "unknown keys"),
        ("[extras]\nx = 1\n", "unknown config section"),
        ("[decoherence]\ngamma = -1\n", ">= 0"),
        ("[equilibrium]\np1 = 0.5\n", "sum"),
        ("[switch]\nsilenced = up\n", "up"),
        ("[sweep]\nn_omega = many\n", "n_omega"),
        ("no section header\n", "malformed"),
    ],
)
def test_invalid_configs(text, match):
    with pytest.raises(InvalidConfigError, match=match):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(InvalidConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")


def test_grid_override():
    s = SweepSettings().with_grid(7)
    assert (s.n_omega, s.n_phi, s.n_phi_line, s.n_delta, s.n_dev) == (7,) * 5
    with pytest.raises(InvalidConfigError):
        SweepSettings().with_grid(0)


def test_to_dict_echoes_everything():
    d = RunConfig().to_dict()
    assert set(d) >= {"drives", "decoherence", "equilibrium", "molecule", "sweep", "units"}
    assert d["drives"]["omega21_amplitude"] == 0.1
