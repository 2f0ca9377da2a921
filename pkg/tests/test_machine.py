import math
import pytest

from strata import error, config
from strata.machine import machine

def test_machine_defaults():
    m = machine()
    assert m.K == 3
    assert m.track_width == pytest.approx(0.4)
    assert m.layer_thickness == pytest.approx(0.3)
    assert m.ratio_letters == 'ABC'

def test_machine_five_filaments():
    m = machine(filaments=5)
    assert m.ratio_letters == 'ABCDH'
    assert m.layer_thickness == pytest.approx(0.4)

def test_machine_explicit_thickness_is_kept():
    assert machine(filaments=4, layer_thickness=0.35).layer_thickness == pytest.approx(0.35)

def test_machine_thickness_exceeds_nozzle():
    with pytest.raises(error.ValidationError):
        machine(layer_thickness=0.5)

@pytest.mark.parametrize('letters', ['AB', 'AEC', 'abc', 'AAB'])
def test_machine_bad_letters(letters):
    with pytest.raises(error.ValidationError):
        machine(ratio_letters=letters)

def test_machine_unknown_parameter():
    with pytest.raises(error.UserError):
        machine(colour='red')

def test_machine_invalid_value():
    with pytest.raises(error.ValidationError):
        machine(filaments=0)

def test_machine_immutable():
    m = machine()
    with pytest.raises(AttributeError):
        m.filaments = 4

def test_machine_filament_length():
    m = machine()
    area = math.pi * 1.75 ** 2 / 4
    assert m.volume_to_length(area) == pytest.approx(1.0)
    assert m.length_to_volume(2.0) == pytest.approx(2 * area)

def test_machine_copy():
    m = machine()
    res = m.copy(filaments=4)
    assert res.K == 4 and res.ratio_letters == 'ABCD'
    assert m.copy() == m
    assert hash(m.copy()) == hash(m)

def test_machine_reads_configuration():
    with config.override({'machine.purge_volume': 3.0}):
        m = machine()
    assert m.purge_volume == pytest.approx(3.0)
    assert machine().purge_volume == pytest.approx(7.0)
