import numpy as np
import pytest

from strata import field, toolpath, pipeline, validate, utils
from strata import machine as _machine
from conftest import compiled

def fidelity(res, source):
    return pipeline.validate_program(res.program.text(), source, res.job, cell_size=0.2)

def test_acceptance_gradient_rectangle(machine):
    job = toolpath.generate_test_shape('extruded_rectangle', {'width': 170.0, 'depth': 10.0, 'height': 0.6}, machine=machine)
    gradient = field.axis_gradient((0.45, 0.35, 0.2), (0.2, 0.35, 0.45), axis='x', range=(-85.0, 85.0))
    res = compiled(job, gradient)
    assert res.report['total_strata'] == 4
    report = fidelity(res, gradient)
    assert report.cells > 0
    assert report.p95_dev <= 0.02

def test_acceptance_gradient_monotone(machine):
    job = toolpath.generate_test_shape('extruded_rectangle', {'width': 40.0, 'depth': 4.0, 'height': 0.3}, machine=machine)
    gradient = field.axis_gradient((0.45, 0.35, 0.2), (0.2, 0.35, 0.45), axis='x', range=(-20.0, 20.0))
    res = compiled(job, gradient)
    moves = validate.parse_gcode(res.program.text())
    deposit = validate.simulate_deposition(moves, job.machine, cell_size=1.0, job=res.job)
    columns = {}
    for (ix, iy, _), value in deposit.cells.items():
        columns.setdefault(ix, []).append(value)
    first = [ np.sum(columns[ix], axis=0) for ix in sorted(columns) ]
    first = np.array([ value[0] / value.sum() for value in first ])
    assert np.all(np.diff(first[2:-2]) <= 1e-3)
    assert first[2] > first[-3]

def test_acceptance_sine_cylinder(machine):
    job = toolpath.generate_test_shape('cylinder', {'radius': 10.0, 'height': 0.9}, machine=machine)
    sine = field.sine_around_axis((0.45, 0.35, 0.2), (0.25, 0.35, 0.4), periods=(3, 6), z=(-0.03, 0.87))
    res = compiled(job, sine)
    assert [int(sine.periods(item.z_top)) for item in res.job.layers] == [4, 5, 6]
    assert [int(sine.periods(item.middle)) for item in res.job.layers] == [4, 5, 6]
    assert [item.plan.S for item in res.job.layers] == [2, 2, 2]
    report = fidelity(res, sine)
    assert report.p95_dev <= 0.02
    assert len(report.per_layer) == 3

def test_acceptance_five_filaments():
    machine = _machine.machine(filaments=5)
    assert machine.layer_thickness == pytest.approx(0.4)
    job = toolpath.generate_test_shape('cylinder', {'radius': 5.0, 'height': 0.8}, machine=machine)
    source = field.constant((0.2, 0.2, 0.2, 0.2, 0.2))
    res = compiled(job, source, optimize=False)
    assert [item.plan.S for item in res.job.layers] == [5, 5]
    assert any(line.endswith(' H1.0000') for line in res.program.lines)
    assert fidelity(res, source).p95_dev <= 0.02

def test_acceptance_five_filaments_optimized():
    machine = _machine.machine(filaments=5)
    job = toolpath.generate_test_shape('cylinder', {'radius': 5.0, 'height': 0.4}, machine=machine)
    res = compiled(job, field.constant((0.2, 0.2, 0.2, 0.2, 0.2)))
    assert res.report['total_strata'] == 1

def test_acceptance_five_filaments_disc():
    machine = _machine.machine(filaments=5)
    job = toolpath.generate_test_shape('disc', {'radius': 5.0, 'height': 0.8}, machine=machine)
    disc = field.radial_disc(np.full(5, 0.2), np.eye(5), radius=4.0)
    res = compiled(job, disc)
    assert [item.plan.S for item in res.job.layers] == [5, 5]
    for item in res.job.layers:
        assert item.plan.fallback in ('simplex', 'unit')
        assert item.plan.stats['residual_post'] <= 5e-3
        for path in item.toolpaths:
            assert path.alphas.min() >= 0
            assert item.thickness * path.alphas.sum(axis=1) == pytest.approx(np.full(len(path), item.thickness), abs=1e-9)

    tops = dict((item.index, utils.fixed(item.z_top, 4)) for item in res.job.layers)
    layer,stratum,checked = None, None, 0
    for line in res.program.lines:
        if line.startswith(';LAYER:'):
            layer = int(line.split(':')[1])
        elif line.startswith(';STRATUM:'):
            stratum = int(line.split(':')[1])
        elif line.startswith('G1 ') and ' X' in line and ' E' in line and stratum == 4:
            assert line.split(' Z')[1].split()[0] == tops[layer]
            checked += 1
        continue
    assert checked

    moves = [ item for item in validate.parse_gcode(res.program.text(), letters=machine.ratio_letters) if item.extruding ]
    assert moves
    for item in moves:
        assert min(item.ratios) >= 0
        assert sum(item.ratios) == pytest.approx(1.0, abs=1e-6)

def test_acceptance_radial_disc(machine):
    job = toolpath.generate_test_shape('disc', {'radius': 5.0, 'height': 0.3}, machine=machine)
    disc = field.radial_disc((0.4, 0.3, 0.3), [(0.5, 0.25, 0.25), (0.25, 0.5, 0.25), (0.25, 0.25, 0.5)], radius=5.0)
    res = compiled(job, disc)
    plan = res.job.layers[0].plan
    assert 2 <= plan.S <= 3
    assert plan.stats['residual_post'] <= 0.02
    assert fidelity(res, disc).cells > 0

def test_acceptance_fewer_strata_than_filaments(rectangle, gradient):
    optimized = compiled(rectangle, gradient)
    unoptimized = compiled(rectangle, gradient, optimize=False)
    assert optimized.report['total_strata'] < unoptimized.report['total_strata']
    assert optimized.report['estimated_time'] < unoptimized.report['estimated_time']
