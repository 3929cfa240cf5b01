import pytest

from config.Configuration import Configuration


def test_defaults_are_read_from_the_shipped_file():
    config = Configuration.get_configuration()
    assert config.tolerances.cuntz == 1e-9
    assert config.tolerances.spectral == 1e-8
    assert config.caps.max_window_dim == 4096
    assert config.caps.max_bond_dim == 60
    assert config.certification.window == 2
    assert config.certification.gap_max == 6
    assert config.certification.random_seed == 20240601
    assert config.logging.logs_dir is None


def test_configuration_is_a_singleton():
    assert Configuration.get_configuration() is Configuration.get_configuration()


def test_environment_overrides_the_file(monkeypatch):
    monkeypatch.setenv('TOL_CUNTZ', '1e-6')
    monkeypatch.setenv('TOL_COMPARE', '2.5e-10')
    Configuration.reset()
    config = Configuration.get_configuration()
    assert config.tolerances.cuntz == 1e-6
    assert config.tolerances.compare == 2.5e-10
    assert config.tolerances.spectral == 1e-8


def test_flags_override_the_environment(monkeypatch):
    monkeypatch.setenv('TOL_SPECTRAL', '1e-7')
    Configuration.reset()
    config = Configuration.get_configuration()
    config.override(spectral=1e-5, cuntz=None)
    assert config.tolerances.spectral == 1e-5
    assert config.tolerances.cuntz == 1e-9


def test_invalid_environment_value(monkeypatch):
    monkeypatch.setenv('TOL_SPECTRAL', 'tight')
    Configuration.reset()
    with pytest.raises(RuntimeError, match='TOL_SPECTRAL'):
        Configuration.get_configuration()


def test_alternative_configuration_file(monkeypatch, tmp_path):
    path = tmp_path / 'certify.conf'
    path.write_text('[tolerances]\ntol_cuntz = 1e-7\n[caps]\nmax_bond_dim = 8\n'
                    '[certification]\nwindow = 1\n[logging]\nlevel = DEBUG\n')
    monkeypatch.setenv('CERTIFY_CONFIG', str(path))
    Configuration.reset()
    config = Configuration.get_configuration()
    assert config.tolerances.cuntz == 1e-7
    assert config.tolerances.compare == 1e-9
    assert config.caps.max_bond_dim == 8
    assert config.certification.window == 1
    assert config.certification.gap_max == 6
    assert config.logging.level == 'DEBUG'


def test_missing_configuration_file(monkeypatch, tmp_path):
    monkeypatch.setenv('CERTIFY_CONFIG', str(tmp_path / 'absent.conf'))
    Configuration.reset()
    with pytest.raises(RuntimeError, match='Failed to read configuration file'):
        Configuration.get_configuration()


def test_parameters_are_reported():
    parameters = Configuration.get_configuration().parameters()
    assert sorted(parameters) == ['caps', 'certification', 'tolerances']
    assert parameters['tolerances']['cuntz'] == 1e-9
    assert 'logging' not in parameters
