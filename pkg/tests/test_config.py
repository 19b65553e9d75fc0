import math

import numpy as np
import pytest

from rffso.config import db_to_linear, default_config, load_config, parse_config
from rffso.errors import ConfigError
from rffso.secrecy import ATAS, OTAS, TASE, TASR


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.ini"
    p.write_text("")
    cfg = load_config(p)
    m = cfg.model
    assert m.N_S == 5 and m.Rs == 0.01 and m.K == 80
    mal = m.fso.malaga
    assert (mal.alpha, mal.beta, mal.Omega, mal.b0, mal.rho0) == (2.296, 2, 1.3265, 0.1079, 0.596)
    assert mal.phase_diff == pytest.approx(math.pi / 2)
    assert m.fso.path_loss == 0.9 and m.fso.pointing.A0 == 1.0
    assert cfg.values["link_km"] == 1.0 and cfg.values["wavelength_nm"] == 785.0
    assert cfg.values["cn2"] == 1.2e-13
    assert cfg.schemes == (OTAS, TASR, TASE, ATAS)


def test_db_conversion_at_boundary():
    cfg = parse_config("[rf]\nsnr_sr_db = 3\n[fso]\nsnr_rd_db = -10\n")
    assert cfg.model.rf_sr.mean_snr == pytest.approx(db_to_linear(3.0))
    assert cfg.model.fso.mean_electrical_snr == pytest.approx(0.1)


def test_range_error_names_field():
    with pytest.raises(ConfigError) as err:
        parse_config("[fso]\nrho_fso = 1.5\n")
    assert err.value.field == "rho_fso"
    assert err.value.line == 2
    assert "rho_fso" in str(err.value)


def test_unknown_key_and_section_report_lines():
    with pytest.raises(ConfigError) as err:
        parse_config("[system]\nn_s = 4\n\n# comment\nfoo = 1\n")
    assert err.value.line == 5 and err.value.field == "foo"
    with pytest.raises(ConfigError) as err:
        parse_config("[rf]\nm_r = 2\n[plots]\nx = 1\n")
    assert err.value.line == 3


def test_parse_error_has_line():
    with pytest.raises(ConfigError) as err:
        parse_config("n_s = 4\n")
    assert err.value.line == 1


def test_type_error():
    with pytest.raises(ConfigError) as err:
        parse_config("[system]\nn_s = 2.5\n")
    assert err.value.field == "n_s"


def test_pointing_overrides_give_two_scenarios():
    a = parse_config("[fso]\nxi = 1.1\n")
    b = parse_config("[fso]\nxi = 6.7\n")
    assert a.model.fso.pointing.xi == 1.1 and b.model.fso.pointing.xi == 6.7


def test_sweep_block():
    cfg = parse_config("[sweep]\nvariable = snr_se_db\nstart_db = -10\nstop_db = 0\nstep_db = 2.5\n"
                       "schemes = tase, tasr\n")
    assert np.allclose(cfg.sweep_points(), [-10, -7.5, -5, -2.5, 0])
    assert cfg.schemes == (TASE, TASR)
    m = cfg.model_at(-2.5)
    assert m.rf_se.mean_snr == pytest.approx(db_to_linear(-2.5))
    with pytest.raises(ConfigError):
        parse_config("[sweep]\nstart_db = 5\nstop_db = 0\n")
    with pytest.raises(ConfigError):
        parse_config("[sweep]\nstep_db = 0\n")
    with pytest.raises(ConfigError):
        parse_config("[sweep]\nschemes = best\n")


def test_rate_sweep():
    cfg = parse_config("[sweep]\nvariable = rs\nstart_db = 0.01\nstop_db = 0.03\nstep_db = 0.01\n")
    assert cfg.model_at(0.02).Rs == 0.02


def test_with_values_revalidates():
    cfg = default_config()
    assert cfg.with_values(seed=5).seed == 5
    with pytest.raises(ConfigError):
        cfg.with_values(mc_samples=10)
