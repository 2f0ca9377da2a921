import math
import numpy as np
import pytest

from strata import validate, field, toolpath, error
from conftest import compiled

def test_validate_example_line():
    res = validate.parse_gcode('G1 X0 Y0 Z3.0\nG1 X10.0 Y12.0 Z3.0 E20.5 A0.2 B0.3 C0.5\n')
    assert [item.kind for item in res] == ['travel', 'extrude']
    assert res[-1].start == (0.0, 0.0, 3.0)
    assert res[-1].end == (10.0, 12.0, 3.0)
    assert res[-1].e == 20.5 and res[-1].delta == 20.5
    assert res[-1].ratios == (0.2, 0.3, 0.5)

@pytest.mark.parametrize('text', [
    'G1 X0 Y0 Z0.3\nG1 X1 Y0 E1 A0.5 B0.6 C0.5\n',
    'G1 X0 Y0 Z0.3\nG1 X1 Y0 E1 A-0.5 B1.0 C0.5\n',
    'G28\n',
    'G1 X1..5\n',
    'G1 X0 Y0 Q1\n',
    'G1 X1 Y0 E1\n',
    'G1 X1 Y0 E2 A1 B0 C0\nG1 X2 Y0 E1\n',
    'G92 X0\n',
    'G21 X1\n',
], ids=['sum', 'negative', 'command', 'malformed', 'word', 'unmixed', 'decreasing', 'reset', 'units'])
def test_validate_parse_errors(text):
    with pytest.raises(error.ParseError) as info:
        validate.parse_gcode(text, source='part.gcode')
    assert info.value.source == 'part.gcode'
    assert info.value.lineno == len(text.splitlines())

def test_validate_modal_ratios():
    res = validate.parse_gcode('G1 X0 Y0 Z0.3\nG1 X1 Y0 E1 A0.25 B0.25 C0.5\nG1 X2 Y0 E2\n')
    assert res[2].ratios == (0.25, 0.25, 0.5)
    assert res[2].delta == 1.0

def test_validate_reset_extrusion():
    res = validate.parse_gcode('G1 X1 Y0 E10 A1 B0 C0\nG92 E0\nG1 X2 Y0 E1\n')
    assert res[-1].delta == 1.0 and res[-1].e == 1.0

def test_validate_motion_kinds():
    text = '\n'.join([
        'G21', 'G90', 'M82', 'M900 K0.050', 'G92 E0',
        ';TYPE:SHIELD',
        'G1 X0 Y0 F9000.0',
        'G1 Z0.3 F9000.0',
        'G1 X1 Y0 Z0.3 E1 F3000.0 A1 B0 C0',
        'G1 E0 F2400.0',
        'G1 E1 F2400.0',
        ';TYPE:PART',
        'G1 X2 Y0 Z0.3 E2 F3000.0',
    ])
    res = validate.parse_gcode(text)
    assert [item.kind for item in res] == ['travel', 'lift', 'extrude', 'retract', 'retract', 'extrude']
    assert [item.role for item in res if item.extruding] == ['shield', 'part']
    assert res[2].feedrate == pytest.approx(50.0)
    assert res[3].delta == -1.0 and not res[3].extruding

def test_validate_deposit_by_hand(machine):
    moves = validate.parse_gcode('G1 X0 Y0 Z0.3\nG1 X1 Y0 Z0.3 E2 A0.2 B0.3 C0.5\n')
    res = validate.simulate_deposition(moves, machine, cell_size=0.5)
    volume = 2 * math.pi * 1.75 ** 2 / 4
    assert sorted(res.cells) == [(0, 0, 0), (1, 0, 0)]
    assert res.cells[(0, 0, 0)] == pytest.approx(0.5 * volume * np.array([0.2, 0.3, 0.5]))
    assert res.total() == pytest.approx(volume * np.array([0.2, 0.3, 0.5]))
    assert not res.shield

def test_validate_deposit_layer_from_highest_end(machine):
    moves = validate.parse_gcode('G1 X0 Y0 Z0.2\nG1 X1 Y0 Z0.45 E1 A1 B0 C0\n')
    res = validate.simulate_deposition(moves, machine, cell_size=0.5)
    assert res.layers() == [1]

def test_validate_deposit_outside_job(machine):
    job = toolpath.job([toolpath.layer(0, 0.3, 0.3)])
    moves = validate.parse_gcode('G1 X0 Y0 Z5\nG1 X1 Y0 Z5 E1 A1 B0 C0\n')
    with pytest.raises(error.ValidationError):
        validate.simulate_deposition(moves, machine, job=job)

def test_validate_deposit_matches_program(rectangle, gradient):
    res = compiled(rectangle, gradient)
    moves = validate.parse_gcode(res.program.text(), letters=rectangle.machine.ratio_letters)
    deposit = validate.simulate_deposition(moves, rectangle.machine, job=res.job)
    assert deposit.total() == pytest.approx(res.program.totals, rel=1e-6)
    assert deposit.shield and deposit.cells
    assert deposit.layers() == [0, 1]

def test_validate_compare_by_hand():
    job = toolpath.job([toolpath.layer(0, 0.3, 0.3)])
    deposit = validate.grid(0.5, 3)
    deposit.cells[(0, 0, 0)] = 2.0 * np.array([0.2, 0.3, 0.5])
    deposit.cells[(4, 1, 0)] = np.array([0.1, 0.3, 0.6])
    res = validate.compare_to_field(deposit, field.constant((0.2, 0.3, 0.5)), job)
    assert res.cells == 2 and res.excluded == 0
    assert res.max_dev == pytest.approx(0.1)
    assert res.mean_dev == pytest.approx(0.05)
    assert res.per_layer[0]['layer'] == 0 and res.per_layer[0]['cells'] == 2
    assert not res.passed(0.02)
    assert res.passed(0.2)

def test_validate_compare_exact():
    job = toolpath.job([toolpath.layer(0, 0.3, 0.3)])
    deposit = validate.grid(0.5, 3)
    deposit.cells[(0, 0, 0)] = np.array([0.2, 0.3, 0.5])
    res = validate.compare_to_field(deposit, field.constant((0.2, 0.3, 0.5)), job)
    assert res.max_dev == pytest.approx(0.0, abs=1e-12)
    assert res.passed()
    assert set(res.serialize()) == {'cells', 'excluded', 'max_dev', 'p95_dev', 'mean_dev', 'per_layer'}

def test_validate_compare_empty():
    job = toolpath.job([toolpath.layer(0, 0.3, 0.3)])
    res = validate.compare_to_field(validate.grid(0.5, 3), field.constant((0.2, 0.3, 0.5)), job)
    assert res.cells == 0 and res.passed()

def test_validate_deposit_follows_gap(machine):
    moves = validate.parse_gcode('G1 X0 Y0 Z0.3\nG1 X1 Y0 Z0.0 E1 A1 B0 C0\n')
    res = validate.simulate_deposition(moves, machine, cell_size=0.5)
    volume = math.pi * 1.75 ** 2 / 4
    assert res.cells[(0, 0, 0)][0] == pytest.approx(0.75 * volume)
    assert res.cells[(1, 0, 0)][0] == pytest.approx(0.25 * volume)

def test_validate_deposit_stacked_strata(machine):
    text = '\n'.join([
        'G1 X0 Y0 Z0.15',
        'G1 X1 Y0 Z0.15 E1 A1 B0 C0',
        'G1 X0 Y0 Z0.3',
        'G1 X1 Y0 Z0.3 E2 A0 B1 C0',
    ])
    res = validate.simulate_deposition(validate.parse_gcode(text), machine, cell_size=0.5)
    for value in res.cells.values():
        assert value / value.sum() == pytest.approx([0.5, 0.5, 0.0])

def test_validate_deposit_passes(machine):
    text = '\n'.join([
        ';STRATUM:0',
        'G1 X0 Y0 Z0.3',
        'G1 X1 Y0 Z0.0 E1 A1 B0 C0',
        ';STRATUM:1',
        'G1 X0 Y0 Z0.3',
        'G1 X1 Y0 Z0.3 E2 A0 B1 C0',
    ])
    moves = validate.parse_gcode(text)
    assert [item.stratum for item in moves if item.extruding] == [1, 2]
    res = validate.simulate_deposition(moves, machine, cell_size=0.5)
    assert res.cells[(0, 0, 0)] / res.cells[(0, 0, 0)].sum() == pytest.approx([0.75, 0.25, 0.0])
    assert res.cells[(1, 0, 0)] / res.cells[(1, 0, 0)].sum() == pytest.approx([0.25, 0.75, 0.0])
