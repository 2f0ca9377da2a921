import logging
import pytest

from strata import config

def test_config_defaults():
    assert config.defaults.machine.filaments == 3
    assert config.defaults.machine.ratio_letters == 'ABCDH'
    assert config.defaults.optimizer.tolerance == pytest.approx(1e-2)
    assert config.defaults.validator.cell_size == pytest.approx(0.2)
    assert isinstance(config.defaults.log, logging.Logger)

def test_config_number_range():
    with pytest.raises(ValueError):
        config.defaults.machine.filaments = 6
    with pytest.raises(ValueError):
        config.defaults.machine.nozzle_diameter = 0
    with pytest.raises(ValueError):
        config.defaults.machine.filaments = 2.5
    assert config.defaults.machine.filaments == 3

def test_config_enum():
    with pytest.raises(ValueError):
        config.defaults.pipeline.shape = 'sphere'

def test_config_unknown_field():
    with pytest.raises(AttributeError):
        config.defaults.machine.colour = 'red'

def test_config_namespace():
    assert 'trilinear' in config.filtering
    assert config.role.shield == 'shield'
    with pytest.raises(AttributeError):
        config.role.shield = 'wall'

def test_config_fields():
    names = [ name for name, _, _ in config.fields(config.defaults) ]
    assert 'machine.filaments' in names
    assert 'pipeline.field' in names
    assert 'optimizer.max_candidates' in names
    assert len(names) == len(set(names))

def test_config_override_restores():
    with config.override({'machine': {'filaments': 4}, 'ordering.seed': 7}) as conf:
        assert conf.machine.filaments == 4
        assert conf.ordering.seed == 7
    assert config.defaults.machine.filaments == 3
    assert config.defaults.ordering.seed == 0

def test_config_override_unknown():
    with pytest.raises(AttributeError):
        with config.override({'machine.colour': 1}):
            pass

def test_config_flatten_keeps_leaves():
    res = config.flatten({'machine': {'filaments': 4}, 'pipeline': {'dimensions': {'radius': 1.0}}, 'pipeline.field': {'kind': 'constant', 'mix': [1, 0]}})
    assert res == {'machine.filaments': 4, 'pipeline.dimensions': {'radius': 1.0}, 'pipeline.field': {'kind': 'constant', 'mix': [1, 0]}}
