import io,json,math
import numpy as np
import pytest

from strata import field, error

def test_field_ratio():
    assert field.ratio((0.2, 0.3, 0.5)).tolist() == pytest.approx([0.2, 0.3, 0.5])
    res = field.ratio((1.0 + 1e-10, -1e-10, 0.0))
    assert res.min() >= 0 and res.sum() == pytest.approx(1.0, abs=1e-15)

@pytest.mark.parametrize('weights', [(0.5, 0.6), (1.2, -0.2), (1.0,), (float('nan'), 1.0)])
def test_field_ratio_invalid(weights):
    with pytest.raises(error.UserError):
        field.ratio(weights)

def test_field_constant():
    f = field.constant((0.2, 0.3, 0.5))
    assert f.K == 3
    assert field.sample_field(f, (12.5, -3.0, 7.0)).tolist() == pytest.approx([0.2, 0.3, 0.5])

def test_field_axis_gradient():
    f = field.axis_gradient((1, 0, 0), (0, 1, 0), axis='x', range=(0.0, 10.0))
    assert f.sample((5.0, 0.0, 0.0)).tolist() == pytest.approx([0.5, 0.5, 0.0])
    assert f.sample((-4.0, 0.0, 0.0)).tolist() == pytest.approx([1.0, 0.0, 0.0])
    assert f.sample((14.0, 0.0, 0.0)).tolist() == pytest.approx([0.0, 1.0, 0.0])

def test_field_axis_gradient_along_z():
    f = field.axis_gradient((1, 0), (0, 1), axis='z', range=(0.0, 2.0))
    assert f.sample((100.0, 100.0, 0.5)).tolist() == pytest.approx([0.75, 0.25])

def test_field_axis_gradient_invalid():
    with pytest.raises(error.UserError):
        field.axis_gradient((1, 0, 0), (0, 1), axis='x')
    with pytest.raises(error.UserError):
        field.axis_gradient((1, 0), (0, 1), axis='w')
    with pytest.raises(error.UserError):
        field.axis_gradient((1, 0), (0, 1), range=(1.0, 1.0))

def test_field_sharpening_gradient():
    f = field.sharpening_gradient((1, 0), (0, 1), axis='x', center=0.0, width=(10.0, 0.0), z=(0.0, 10.0))
    assert f.transition(0.0) == pytest.approx(10.0)
    assert f.transition(5.0) == pytest.approx(5.0)
    assert f.sample((2.5, 0.0, 0.0)).tolist() == pytest.approx([0.25, 0.75])
    assert f.sample((-0.1, 0.0, 10.0)).tolist() == pytest.approx([1.0, 0.0])
    assert f.sample((0.1, 0.0, 10.0)).tolist() == pytest.approx([0.0, 1.0])

def test_field_sharpening_gradient_discontinuity():
    f = field.sharpening_gradient((1, 0), (0, 1), width=(4.0, 0.0), z=(0.0, 1.0))
    res = f.discontinuity(np.array([(0.3, 0.0, 0.5), (0.3, 0.0, 1.0), (-2.0, 0.0, 1.5)]))
    assert np.isinf(res[0])
    assert res[1:].tolist() == pytest.approx([0.3, 2.0])

def test_field_sine_around_axis():
    f = field.sine_around_axis((1, 0), (0, 1), periods=(2, 6), z=(0.0, 4.0))
    assert f.periods(0.0) == 2 and f.periods(2.0) == 4 and f.periods(10.0) == 6
    assert f.stripe_width(0.0, 10.0) == pytest.approx(math.pi * 10.0 / 2)
    # sin(2 * pi/4) = 1 at the bottom
    assert f.sample((math.cos(math.pi / 4), math.sin(math.pi / 4), 0.0)).tolist() == pytest.approx([0.0, 1.0])
    assert f.sample((1.0, 0.0, 0.0)).tolist() == pytest.approx([0.5, 0.5])

def test_field_sine_around_axis_finest_stripes():
    f = field.sine_around_axis((1, 0), (0, 1), periods=(2, 52), z=(0.0, 10.0))
    widths = [ f.stripe_width(z, 10.0) for z in np.linspace(0.0, 10.0, 21) ]
    assert widths == sorted(widths, reverse=True) and widths[0] > widths[-1]
    assert widths[-1] == pytest.approx(0.6, abs=0.05)

    theta = np.linspace(0.0, 2 * math.pi, 20000, endpoint=False) + 1e-5
    points = np.column_stack((10.0 * np.cos(theta), 10.0 * np.sin(theta), np.full(len(theta), 10.0)))
    side = f.sample_many(points)[:, 1] > 0.5
    crossings = int(np.sum(side != np.roll(side, 1)))
    assert crossings == 104
    assert 2 * math.pi * 10.0 / crossings == pytest.approx(widths[-1])

def test_field_radial_disc():
    f = field.radial_disc((1, 0, 0), [(0, 1, 0), (0, 0, 1)], center=(0.0, 0.0), radius=10.0)
    assert f.sample((0.0, 0.0, 0.0)).tolist() == pytest.approx([1.0, 0.0, 0.0])
    assert f.sample((10.0, 0.0, 0.0)).tolist() == pytest.approx([0.0, 1.0, 0.0])
    assert f.sample((-20.0, 0.0, 0.0)).tolist() == pytest.approx([0.0, 0.0, 1.0])
    assert f.sample((5.0, 0.0, 0.0)).tolist() == pytest.approx([0.5, 0.5, 0.0])

def test_field_sample_many_non_finite():
    f = field.constant((0.5, 0.5))
    with pytest.raises(error.FieldDomainError):
        f.sample_many([(0.0, 0.0, float('nan'))])

def test_field_sample_many_shape(rng):
    f = field.axis_gradient((1, 0, 0), (0, 0, 1), axis='y', range=(0.0, 1.0))
    res = f.sample_many(rng.random((50, 3)))
    assert res.shape == (50, 3)
    assert np.allclose(res.sum(axis=1), 1.0)
    assert res.min() >= 0

def grid_texture(filtering='trilinear'):
    # x varies fastest, 2x1x1 voxels blending the first filament into the second
    voxels = np.array([[1.0, 0.0], [0.0, 1.0]])
    return field.texture((2, 1, 1), ((0.0, 0.0, 0.0), (2.0, 1.0, 1.0)), voxels, filtering=filtering)

def test_field_texture_trilinear():
    t = grid_texture()
    assert t.sample((1.0, 0.5, 0.5)).tolist() == pytest.approx([0.5, 0.5])
    assert t.sample((0.5, 0.5, 0.5)).tolist() == pytest.approx([1.0, 0.0])
    assert t.sample((-5.0, 0.5, 0.5)).tolist() == pytest.approx([1.0, 0.0])
    assert t.sample((1.25, 0.5, 0.5)).tolist() == pytest.approx([0.25, 0.75])

def test_field_texture_nearest():
    t = grid_texture('nearest')
    assert t.sample((0.9, 0.5, 0.5)).tolist() == pytest.approx([1.0, 0.0])
    assert t.sample((1.1, 0.5, 0.5)).tolist() == pytest.approx([0.0, 1.0])
    assert t.sample((9.0, 9.0, 9.0)).tolist() == pytest.approx([0.0, 1.0])

def texture_document(voxels, dims=(2, 1, 1)):
    return json.dumps({'format': field.TEXTURE_FORMAT, 'dims': list(dims), 'bbox': [[0, 0, 0], [2, 1, 1]], 'K': 2, 'filtering': 'nearest', 'voxels': voxels})

def test_field_load_volume_texture():
    t = field.load_volume_texture(io.BytesIO(texture_document([[1, 0], [0.25, 0.75]]).encode('utf-8')))
    assert t.dims == (2, 1, 1) and t.K == 2 and t.filtering == 'nearest'
    assert t.sample((1.5, 0.5, 0.5)).tolist() == pytest.approx([0.25, 0.75])

def test_field_load_volume_texture_bad_voxel():
    data = texture_document([[1, 0], [0.5, 0.6]]).encode('utf-8')
    with pytest.raises(error.TextureError) as e:
        field.load_volume_texture(io.BytesIO(data))
    assert e.value.voxel == 1

def test_field_load_volume_texture_dimension_mismatch():
    data = texture_document([[1, 0], [0, 1]], dims=(3, 1, 1)).encode('utf-8')
    with pytest.raises(error.TextureError):
        field.load_volume_texture(io.BytesIO(data))

def test_field_load_volume_texture_bad_header():
    with pytest.raises(error.ParseError):
        field.load_volume_texture(io.BytesIO(b'{"format": "other"}'))
    with pytest.raises(error.ParseError):
        field.load_volume_texture(io.BytesIO(b'not json'))

def test_field_binary_texture(tmp_path):
    path = str(tmp_path / 'texture.bin')
    field.save_texture(grid_texture(), path, binary=True)
    res = field.load_volume_texture(path)
    assert res.dims == (2, 1, 1)
    assert np.array_equal(res.voxels, grid_texture().voxels)

def test_field_from_spec():
    f = field.from_spec({'kind': 'axis_gradient', 'start': [1, 0], 'end': [0, 1], 'axis': 'y', 'range': [0, 4]})
    assert isinstance(f, field.axis_gradient)
    assert f.sample((0.0, 1.0, 0.0)).tolist() == pytest.approx([0.75, 0.25])
    assert field.from_spec(f.describe()).describe() == f.describe()

def test_field_from_spec_invalid():
    with pytest.raises(error.InputError):
        field.from_spec({'kind': 'spiral'})
    with pytest.raises(error.InputError):
        field.from_spec({'kind': 'constant'})
    with pytest.raises(error.InputError):
        field.from_spec([1, 2])

def test_field_load_field(tmp_path):
    path = tmp_path / 'field.json'
    path.write_text(json.dumps({'kind': 'constant', 'mix': [0.1, 0.9]}))
    assert field.load_field(str(path)).sample((0, 0, 0)).tolist() == pytest.approx([0.1, 0.9])

def test_field_load_field_texture_reference(tmp_path):
    field.save_texture(grid_texture(), str(tmp_path / 'voxels.json'))
    (tmp_path / 'field.json').write_text(json.dumps({'kind': 'volume_texture', 'path': 'voxels.json'}))
    res = field.load_field(str(tmp_path / 'field.json'))
    assert isinstance(res, field.texture)
    assert res.sample((1.0, 0.5, 0.5)).tolist() == pytest.approx([0.5, 0.5])
