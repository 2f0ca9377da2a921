import io,json
import numpy as np
import pytest

from strata import toolpath, field, error, config
from strata.machine import machine

def line(count, z=0.3, spacing=1.0):
    return np.column_stack((np.arange(count) * spacing, np.zeros(count), np.full(count, z)))

def test_toolpath_closed_repeats_first_vertex():
    square = np.array([(0, 0, 0.3), (1, 0, 0.3), (1, 1, 0.3), (0, 1, 0.3)], dtype=float)
    res = toolpath.path(square, closed=True)
    assert len(res) == 5
    assert res.points[0].tolist() == res.points[-1].tolist()
    assert res.length() == pytest.approx(4.0)
    assert res.serialize()['vertices'] == square[:, :2].tolist()

def test_toolpath_path_invalid():
    with pytest.raises(error.ValidationError):
        toolpath.path(np.array([(0, 0, 0.3), (0, 0, 0.3), (1, 0, 0.3)], dtype=float))
    with pytest.raises(error.ValidationError):
        toolpath.path(np.array([(0, 0, 0.3), (1, 0, 0.6)], dtype=float))
    with pytest.raises(error.ValidationError):
        toolpath.path(np.array([(0, 0, 0.3), (1, 0, 0.3)], dtype=float), closed=True)
    with pytest.raises(error.UserError):
        toolpath.path(line(3), track_width=0.0)
    with pytest.raises(error.UserError):
        toolpath.path(line(3), role='support')

def test_toolpath_points_are_frozen():
    res = toolpath.path(line(3))
    with pytest.raises(ValueError):
        res.points[0, 0] = 5.0

def test_toolpath_vertex_check():
    assert toolpath.vertex((0, 0, 0), mix=(0.5, 0.5), alphas=(0.25, 0.75)).check()
    with pytest.raises(error.ValidationError):
        toolpath.vertex((0, 0, 0), alphas=(0.5, 0.6)).check()

def test_toolpath_segment_volume():
    v0 = toolpath.vertex((0, 0, 0.3), alphas=(1.0, 0.0))
    v1 = toolpath.vertex((2, 0, 0.3), alphas=(0.0, 1.0))
    assert toolpath.segment_volume(v0, v1, 0, 0.4, 0.3) == pytest.approx(0.12)
    with pytest.raises(error.UserError):
        toolpath.segment_volume(v0, v1, 2, 0.4, 0.3)
    with pytest.raises(error.PreconditionError):
        toolpath.segment_volume(toolpath.vertex((0, 0, 0.3)), v1, 0, 0.4, 0.3)

def test_toolpath_volumes_cover_the_track(rng):
    alphas = rng.dirichlet((1, 1, 1), size=6)
    res = toolpath.path(line(6), alphas=alphas)
    assert res.volumes(0.3).sum() == pytest.approx(0.4 * 0.3 * res.length())

def test_toolpath_job_not_monotone():
    layers = [ toolpath.layer(0, 0.6, 0.3), toolpath.layer(1, 0.3, 0.3) ]
    with pytest.raises(error.ValidationError):
        toolpath.job(layers)

def test_toolpath_job_thickness_mismatch():
    with pytest.raises(error.ValidationError):
        toolpath.job([toolpath.layer(0, 0.2, 0.2)])
    with pytest.raises(error.ValidationError):
        toolpath.job([toolpath.layer(0, 0.3, 0.3), toolpath.layer(1, 0.9, 0.3)])

def test_toolpath_job_locate():
    res = toolpath.job([toolpath.layer(0, 0.3, 0.3), toolpath.layer(1, 0.6, 0.3)])
    assert res.locate(0.45) == 1
    assert res.locate(0.3) == 0
    assert res.locate(0.6) == 1
    with pytest.raises(error.ValidationError):
        res.locate(0.7)
    with pytest.raises(error.ValidationError):
        res.locate(0.0)

def test_toolpath_generate_rectangle():
    res = toolpath.generate_test_shape('extruded_rectangle', {'width': 20.0, 'depth': 6.0, 'height': 0.6})
    assert len(res.layers) == 2
    assert [item.z_top for item in res.layers] == pytest.approx([0.3, 0.6])
    loop, = res.layers[0].toolpaths
    assert loop.closed and loop.role == config.role.perimeter
    assert loop.length() == pytest.approx(2 * (19.6 + 5.6))

def test_toolpath_generate_perimeters():
    res = toolpath.generate_test_shape('extruded_rectangle', {'width': 20.0, 'depth': 6.0, 'perimeters': 3})
    assert len(res.layers) == 1
    assert [item.length() for item in res.layers[0].toolpaths] == pytest.approx([50.4, 47.2, 44.0])

def test_toolpath_generate_disc():
    res = toolpath.generate_test_shape('disc', {'radius': 2.0, 'center': (5.0, 5.0)})
    loops = res.layers[0].toolpaths
    assert len(loops) >= 2
    assert loops[0].role == config.role.perimeter
    assert all(item.role == config.role.infill for item in loops[1:])
    assert np.allclose(loops[0].points[:-1, :2].mean(axis=0), (5.0, 5.0), atol=1e-9)

def test_toolpath_generate_five_filaments():
    res = toolpath.generate_test_shape('cylinder', {'radius': 5.0, 'height': 0.8}, machine=machine(filaments=5))
    assert res.machine.layer_thickness == pytest.approx(0.4)
    assert len(res.layers) == 2

def test_toolpath_generate_invalid():
    with pytest.raises(error.UserError):
        toolpath.generate_test_shape('sphere', {'radius': 1.0})
    with pytest.raises(error.UserError):
        toolpath.generate_test_shape('cylinder', {})
    with pytest.raises(error.UserError):
        toolpath.generate_test_shape('cylinder', {'radius': -1.0})
    with pytest.raises(error.UserError):
        toolpath.generate_test_shape('cylinder', {'radius': 1.0, 'height': 0.1})

def test_toolpath_file_round_trip():
    job = toolpath.generate_test_shape('cylinder', {'radius': 4.0, 'height': 0.9})
    out = io.StringIO()
    toolpath.save_toolpaths(job, out)
    res = toolpath.load_toolpaths(io.StringIO(out.getvalue()))
    assert res.machine == job.machine
    assert [item.z_top for item in res.layers] == pytest.approx([item.z_top for item in job.layers])
    assert [len(item.toolpaths[0]) for item in res.layers] == [len(item.toolpaths[0]) for item in job.layers]

def toolpath_document(*paths):
    header = {'format': toolpath.TOOLPATH_FORMAT, 'machine': {'filaments': 3}}
    record = {'index': 0, 'z_top': 0.3, 'thickness': 0.3, 'paths': list(paths)}
    return '\n'.join([json.dumps(header), json.dumps(record)]) + '\n'

def test_toolpath_load_drops_coincident_vertices():
    text = toolpath_document({'closed': True, 'vertices': [[0, 0], [0, 0], [4, 0], [4, 2], [0, 2], [0, 0]]})
    res = toolpath.load_toolpaths(io.StringIO(text))
    loop, = res.layers[0].toolpaths
    assert len(loop) == 5
    assert loop.length() == pytest.approx(12.0)

def test_toolpath_load_drops_degenerate_paths():
    text = toolpath_document({'closed': True, 'vertices': [[0, 0], [1, 0]]}, {'vertices': [[0, 0], [1, 0]]})
    res = toolpath.load_toolpaths(io.StringIO(text))
    assert len(res.layers[0].toolpaths) == 1
    assert not res.layers[0].toolpaths[0].closed

def test_toolpath_load_parse_errors():
    text = toolpath_document({'vertices': [[0, 0], [1, 0]]}) + 'garbage\n'
    with pytest.raises(error.ParseError) as e:
        toolpath.load_toolpaths(io.StringIO(text))
    assert e.value.lineno == 3
    with pytest.raises(error.ParseError) as e:
        toolpath.load_toolpaths(io.StringIO('{"format": "gcode"}\n'))
    assert e.value.lineno == 1
    with pytest.raises(error.ParseError):
        toolpath.load_toolpaths(io.StringIO(toolpath_document({'vertices': [[0, 0], [1, 0]], 'role': 'support'})))

def test_toolpath_densify():
    res = toolpath.densify(line(2), 0.3)
    assert len(res) == 5
    assert np.hypot(*np.diff(res[:, :2], axis=0).T) == pytest.approx(np.full(4, 0.25))
    assert res[0].tolist() == [0.0, 0.0, 0.3] and res[-1].tolist() == [1.0, 0.0, 0.3]

def test_toolpath_resample(rectangle):
    f = field.constant((0.2, 0.3, 0.5))
    res = toolpath.resample(rectangle.layers[0], f)
    loop, = res.toolpaths
    assert res.resampled() and res.plan is None
    assert loop.mixes.shape == (len(loop), 3)
    assert np.allclose(loop.mixes, (0.2, 0.3, 0.5))
    assert loop.lengths().max() <= 0.2 + 1e-9
    assert loop.length() == pytest.approx(rectangle.layers[0].toolpaths[0].length())

def test_toolpath_resample_samples_mid_layer():
    f = field.axis_gradient((1, 0), (0, 1), axis='z', range=(0.0, 0.6))
    layer = toolpath.layer(1, 0.6, 0.3, [toolpath.path(line(3, z=0.6))])
    res = toolpath.resample(layer, f, step=1.0)
    assert res.mixes() == pytest.approx(np.tile((0.25, 0.75), (3, 1)))

def test_toolpath_resample_invalid_step(rectangle):
    with pytest.raises(error.UserError):
        toolpath.resample(rectangle.layers[0], field.constant((0.5, 0.25, 0.25)), step=0.0)

def test_toolpath_simplify_collinear():
    res = toolpath.simplify(toolpath.path(line(11), alphas=np.tile((0.3, 0.7), (11, 1))), 0.01, 0.005)
    assert len(res) == 2
    assert res.points[-1, 0] == pytest.approx(10.0)

def test_toolpath_simplify_keeps_alpha_changes():
    alphas = np.tile((0.3, 0.7), (11, 1))
    alphas[5] = (0.5, 0.5)
    res = toolpath.simplify(toolpath.path(line(11), alphas=alphas), 0.01, 0.005)
    assert res.points[:, 0].tolist() == [0.0, 4.0, 5.0, 6.0, 10.0]
    assert res.alphas[2].tolist() == [0.5, 0.5]

def test_toolpath_simplify_linear_alphas():
    t = np.linspace(0.0, 1.0, 11)
    res = toolpath.simplify(toolpath.path(line(11), alphas=np.column_stack((t, 1 - t))), 0.01, 0.005)
    assert len(res) == 2

def test_toolpath_simplify_idempotent(rng):
    points = np.column_stack((np.cumsum(rng.uniform(0.1, 0.3, 40)), rng.normal(0.0, 0.02, 40), np.full(40, 0.3)))
    alphas = rng.dirichlet((4, 4), size=40)
    once = toolpath.simplify(toolpath.path(points, alphas=alphas), 0.01, 0.05)
    twice = toolpath.simplify(once, 0.01, 0.05)
    assert np.array_equal(once.points, twice.points)

def test_toolpath_simplify_closed():
    square = np.array([(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)], dtype=float)
    points = np.column_stack((square, np.full(len(square), 0.3)))
    res = toolpath.simplify(toolpath.path(points, closed=True, alphas=np.tile((1.0,), (8, 1))), 0.01, 0.005)
    assert res.closed and len(res) >= 4
    assert res.points[0].tolist() == res.points[-1].tolist()

def test_toolpath_simplify_requires_alphas():
    with pytest.raises(error.PreconditionError):
        toolpath.simplify(toolpath.path(line(3)))
