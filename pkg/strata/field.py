"""Volumetric mixing-ratio fields.

A field returns the mixing ratio, a vector of K non-negative filament
fractions summing to one, at any point of the print volume. Fields are
either procedural or an access into a volume texture enclosing the object.
Every field is immutable once constructed and can be sampled concurrently.

    class interface(field.base):
        K -- number of filaments

        def sample(self, point):
            '''Return the mixing ratio at the 3d ``point``'''
        def sample_many(self, points):
            '''Return an (n, K) array of mixing ratios for an (n, 3) array'''
        def discontinuity(self, points):
            '''Return the distance from each point to the nearest discontinuity'''
        def describe(self):
            '''Return a mapping that ``from_spec`` turns back into the field'''

The following kinds are available:

    constant -- one mixing ratio everywhere
    axis_gradient -- linear blend between two ratios along x, y or z
    sharpening_gradient -- blend whose transition narrows towards the top
    sine_around_axis -- stripes around a vertical axis, increasing in frequency with z
    radial_disc -- blend from a center ratio towards ratios spread along a rim
    texture -- trilinear or nearest lookup into a 3d grid of ratios

Example usage:
    from strata import field
    f = field.axis_gradient((1,0,0), (0,1,0), axis='x', range=(0, 10))
    print(field.sample_field(f, (5, 0, 0)))

    t = field.load_volume_texture('painting.json')
    print(t.sample((1.0, 2.0, 0.15)))
"""
import os,json,math,numbers
import six
import numpy as np

from . import config,error
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'ratio,base,constant,axis_gradient,sharpening_gradient,sine_around_axis,radial_disc,texture,sample_field,load_volume_texture,save_texture,from_spec,load_field'.split(',')

TEXTURE_FORMAT = 'strata-texture/1'
axes = {'x': 0, 'y': 1, 'z': 2}

def ratio(weights, tolerance=1e-9):
    '''Return ``weights`` as a validated mixing ratio.

    Components may violate positivity or the unit sum by at most
    ``tolerance``; such vectors are clamped and renormalized.
    '''
    res = np.array(weights, dtype=float).reshape(-1)
    if len(res) < 2:
        raise error.UserError(None, 'ratio', message='A mixing ratio needs at least 2 components : {!r}'.format(weights))
    if not np.all(np.isfinite(res)):
        raise error.UserError(None, 'ratio', message='Mixing ratio has non-finite components : {!r}'.format(weights))
    if res.min() < -tolerance or abs(res.sum() - 1.0) > tolerance:
        raise error.UserError(None, 'ratio', message='Weights {!r} are not a mixing ratio (sum={:.9g})'.format(tuple(res), res.sum()))
    return normalize(res)

def normalize(values):
    '''Clamp negative components of ``values`` (one vector per row) and rescale each row to sum to one'''
    res = np.clip(np.asarray(values, dtype=float), 0.0, None)
    total = res.sum(axis=-1, keepdims=True)
    return res / np.where(total > 0, total, 1.0)

def axis_index(axis):
    if isinstance(axis, six.string_types):
        if axis.lower() not in axes:
            raise error.UserError(None, 'axis_index', message='Unknown axis {!r}'.format(axis))
        return axes[axis.lower()]
    if axis not in (0, 1, 2):
        raise error.UserError(None, 'axis_index', message='Unknown axis {!r}'.format(axis))
    return int(axis)

class base(object):
    kind = None

    def __init__(self, K):
        if not isinstance(K, numbers.Integral) or K < 2:
            raise error.UserError(self, '__init__', message='A field needs at least 2 filaments : {!r}'.format(K))
        self.K = int(K)

    def sample(self, point):
        '''Return the mixing ratio at the 3d ``point``'''
        return self.sample_many(np.asarray(point, dtype=float).reshape(1, 3))[0]

    def sample_many(self, points):
        '''Return an (n, K) array holding the mixing ratio at each of the (n, 3) ``points``'''
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(points)):
            raise error.FieldDomainError(self, 'sample_many', message='Unable to sample at a non-finite position')
        res = self.__sample__(points)
        if res.shape != (len(points), self.K) or not np.all(np.isfinite(res)):
            raise error.FieldDomainError(self, 'sample_many', message='Field has no value at {:d} of {:d} position(s)'.format(int(np.sum(~np.all(np.isfinite(res), axis=-1))), len(points)))
        return normalize(res)

    def __sample__(self, points):
        raise error.InternalError(self, '__sample__', message='Developer forgot to overload this method')

    def discontinuity(self, points):
        '''Return the distance from each of the ``points`` to the nearest discontinuity of the field'''
        return np.full(len(np.asarray(points).reshape(-1, 3)), np.inf)

    def describe(self):
        raise error.InternalError(self, 'describe', message='Developer forgot to overload this method')

    def shortname(self):
        return '{:s}(K={:d})'.format(self.kind or type(self).__name__, self.K)

    def __repr__(self):
        return '<field {:s}>'.format(self.shortname())

def blend(start, end, t):
    t = np.clip(t, 0.0, 1.0)[:, None]
    return (1.0 - t) * start[None, :] + t * end[None, :]

class constant(base):
    kind = 'constant'

    def __init__(self, mix):
        self.mix = ratio(mix)
        super(constant, self).__init__(len(self.mix))
    def __sample__(self, points):
        return np.repeat(self.mix[None, :], len(points), axis=0)
    def describe(self):
        return {'kind': self.kind, 'mix': self.mix.tolist()}

class axis_gradient(base):
    '''Linear blend from ``start`` at range[0] to ``end`` at range[1] along ``axis``'''
    kind = 'axis_gradient'

    def __init__(self, start, end, axis='x', range=(0.0, 1.0)):
        self.start,self.end = ratio(start),ratio(end)
        if len(self.start) != len(self.end):
            raise error.UserError(self, '__init__', message='Endpoint mixes have different lengths : {:d} != {:d}'.format(len(self.start), len(self.end)))
        super(axis_gradient, self).__init__(len(self.start))
        self.axis = axis_index(axis)
        lo,hi = map(float, range)
        if not hi > lo:
            raise error.UserError(self, '__init__', message='Empty gradient range : ({:g}, {:g})'.format(lo, hi))
        self.range = lo, hi

    def __sample__(self, points):
        lo,hi = self.range
        return blend(self.start, self.end, (points[:, self.axis] - lo) / (hi - lo))

    def describe(self):
        return {'kind': self.kind, 'start': self.start.tolist(), 'end': self.end.tolist(), 'axis': 'xyz'[self.axis], 'range': list(self.range)}

class sharpening_gradient(base):
    """Blend between two mixes across ``center`` along ``axis``.

    The transition is ``width[0]`` wide at z[0] and narrows linearly to
    ``width[1]`` at z[1]. A final width of 0 turns the top into an edge.
    """
    kind = 'sharpening_gradient'

    def __init__(self, start, end, axis='x', center=0.0, width=(10.0, 0.0), z=(0.0, 10.0)):
        self.start,self.end = ratio(start),ratio(end)
        if len(self.start) != len(self.end):
            raise error.UserError(self, '__init__', message='Endpoint mixes have different lengths : {:d} != {:d}'.format(len(self.start), len(self.end)))
        super(sharpening_gradient, self).__init__(len(self.start))
        self.axis,self.center = axis_index(axis),float(center)
        self.width,self.z = tuple(map(float, width)),tuple(map(float, z))
        if min(self.width) < 0 or not self.z[1] > self.z[0]:
            raise error.UserError(self, '__init__', message='Invalid transition : width={!r} z={!r}'.format(self.width, self.z))

    def transition(self, z):
        '''Return the width of the transition at height ``z``'''
        t = np.clip((np.asarray(z, dtype=float) - self.z[0]) / (self.z[1] - self.z[0]), 0.0, 1.0)
        return (1.0 - t) * self.width[0] + t * self.width[1]

    def __sample__(self, points):
        width = self.transition(points[:, 2])
        offset = points[:, self.axis] - self.center
        t = np.where(width > 0, 0.5 + offset / np.where(width > 0, width, 1.0), np.where(offset < 0, 0.0, 1.0))
        return blend(self.start, self.end, t)

    def discontinuity(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        width = self.transition(points[:, 2])
        return np.where(width > 0, np.inf, np.abs(points[:, self.axis] - self.center))

    def describe(self):
        return {'kind': self.kind, 'start': self.start.tolist(), 'end': self.end.tolist(), 'axis': 'xyz'[self.axis], 'center': self.center, 'width': list(self.width), 'z': list(self.z)}

class sine_around_axis(base):
    """Sine stripes around the vertical axis through ``center``.

    The number of periods around the axis grows linearly from periods[0] at
    z[0] to periods[1] at z[1], rounded to a whole number so that the
    stripes close up around the axis.
    """
    kind = 'sine_around_axis'

    def __init__(self, low, high, center=(0.0, 0.0), periods=(2, 100), z=(0.0, 10.0)):
        self.low,self.high = ratio(low),ratio(high)
        if len(self.low) != len(self.high):
            raise error.UserError(self, '__init__', message='Mixes have different lengths : {:d} != {:d}'.format(len(self.low), len(self.high)))
        super(sine_around_axis, self).__init__(len(self.low))
        self.center = tuple(map(float, center))[:2]
        self.periods_range,self.z = tuple(map(float, periods)),tuple(map(float, z))
        if min(self.periods_range) < 1 or not self.z[1] > self.z[0]:
            raise error.UserError(self, '__init__', message='Invalid frequency profile : periods={!r} z={!r}'.format(self.periods_range, self.z))

    def periods(self, z):
        '''Return the whole number of periods around the axis at height ``z``'''
        t = np.clip((np.asarray(z, dtype=float) - self.z[0]) / (self.z[1] - self.z[0]), 0.0, 1.0)
        return np.round((1.0 - t) * self.periods_range[0] + t * self.periods_range[1])

    def stripe_width(self, z, radius):
        '''Return the arc length covered by one stripe (half a period) at height ``z`` on a cylinder of ``radius``'''
        return math.pi * radius / self.periods(z)

    def __sample__(self, points):
        theta = np.arctan2(points[:, 1] - self.center[1], points[:, 0] - self.center[0])
        s = 0.5 + 0.5 * np.sin(self.periods(points[:, 2]) * theta)
        return blend(self.low, self.high, s)

    def describe(self):
        return {'kind': self.kind, 'low': self.low.tolist(), 'high': self.high.tolist(), 'center': list(self.center), 'periods': list(self.periods_range), 'z': list(self.z)}

class radial_disc(base):
    """Blend from the ``inner`` mix at ``center`` towards the rim at ``radius``.

    The rim value is interpolated around the circle between the ``rim``
    mixes, spread evenly by angle starting at the positive x axis.
    """
    kind = 'radial_disc'

    def __init__(self, inner, rim, center=(0.0, 0.0), radius=10.0):
        self.inner = ratio(inner)
        self.rim = np.array([ratio(item) for item in (rim if len(np.shape(rim)) > 1 else [rim])])
        if self.rim.shape[1] != len(self.inner):
            raise error.UserError(self, '__init__', message='Mixes have different lengths : {:d} != {:d}'.format(self.rim.shape[1], len(self.inner)))
        super(radial_disc, self).__init__(len(self.inner))
        self.center,self.radius = tuple(map(float, center))[:2],float(radius)
        if not self.radius > 0:
            raise error.UserError(self, '__init__', message='Radius must be positive : {!r}'.format(radius))

    def __sample__(self, points):
        dx,dy = points[:, 0] - self.center[0], points[:, 1] - self.center[1]
        count = len(self.rim)
        position = (np.arctan2(dy, dx) % (2 * math.pi)) / (2 * math.pi) * count
        index = np.floor(position).astype(int) % count
        t = (position - np.floor(position))[:, None]
        edge = (1.0 - t) * self.rim[index] + t * self.rim[(index + 1) % count]
        r = np.clip(np.hypot(dx, dy) / self.radius, 0.0, 1.0)[:, None]
        return (1.0 - r) * self.inner[None, :] + r * edge

    def describe(self):
        return {'kind': self.kind, 'inner': self.inner.tolist(), 'rim': self.rim.tolist(), 'center': list(self.center), 'radius': self.radius}

class texture(base):
    """Mixing ratios stored on a regular grid of voxels filling ``bbox``.

    ``voxels`` is indexed as [iz, iy, ix, filament]. Positions outside of
    the bounding box are clamped to its edge.
    """
    kind = 'volume_texture'

    def __init__(self, dims, bbox, voxels, filtering=None, source=None):
        self.dims = tuple(int(n) for n in dims)
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise error.UserError(self, '__init__', message='Texture dimensions must be 3 positive integers : {!r}'.format(dims))
        lo,hi = (np.array(corner, dtype=float) for corner in bbox)
        if lo.shape != (3,) or hi.shape != (3,) or not np.all(hi > lo):
            raise error.UserError(self, '__init__', message='Invalid bounding box : {!r}'.format(bbox))
        self.bbox = lo, hi
        nx,ny,nz = self.dims
        voxels = np.asarray(voxels, dtype=float)
        self.voxels = voxels.reshape(nz, ny, nx, -1)
        super(texture, self).__init__(self.voxels.shape[-1])
        self.filtering = config.filtering.trilinear if filtering is None else filtering
        if self.filtering not in config.filtering:
            raise error.UserError(self, '__init__', message='Unknown filtering mode {!r}'.format(filtering))
        self.source = source

    def cell(self):
        lo,hi = self.bbox
        return (hi - lo) / np.array(self.dims, dtype=float)

    def __sample__(self, points):
        lo,_ = self.bbox
        dims = np.array(self.dims)
        u = (points - lo) / self.cell()

        if self.filtering == config.filtering.nearest:
            ix,iy,iz = np.clip(np.floor(u).astype(int), 0, dims - 1).T
            return self.voxels[iz, iy, ix]

        # trilinear between voxel centers, clamped to the outermost centers
        u = np.clip(u - 0.5, 0.0, dims - 1)
        i0 = np.minimum(np.floor(u).astype(int), dims - 1)
        i1 = np.minimum(i0 + 1, dims - 1)
        w = u - i0
        res = np.zeros((len(points), self.K))
        for cx in (0, 1):
            ix,wx = (i1[:, 0], w[:, 0]) if cx else (i0[:, 0], 1.0 - w[:, 0])
            for cy in (0, 1):
                iy,wy = (i1[:, 1], w[:, 1]) if cy else (i0[:, 1], 1.0 - w[:, 1])
                for cz in (0, 1):
                    iz,wz = (i1[:, 2], w[:, 2]) if cz else (i0[:, 2], 1.0 - w[:, 2])
                    res += (wx * wy * wz)[:, None] * self.voxels[iz, iy, ix]
                continue
            continue
        return res

    def header(self):
        lo,hi = self.bbox
        return {'format': TEXTURE_FORMAT, 'dims': list(self.dims), 'bbox': [lo.tolist(), hi.tolist()], 'K': self.K, 'filtering': self.filtering}

    def describe(self):
        if self.source is not None:
            return {'kind': self.kind, 'path': str(self.source)}
        res = self.header()
        res.update(kind=self.kind, voxels=self.voxels.reshape(-1, self.K).tolist())
        return res

    def shortname(self):
        return 'texture({:d}x{:d}x{:d}, K={:d}, {:s})'.format(self.dims[0], self.dims[1], self.dims[2], self.K, self.filtering)

def sample_field(field, p):
    '''Return the mixing ratio of ``field`` at the 3d point ``p``'''
    return field.sample(p)

## volume texture files
def __texture_header(header, source):
    if not isinstance(header, dict) or header.get('format') != TEXTURE_FORMAT:
        raise error.ParseError(source, 1, message='Expected a header with format {!r}'.format(TEXTURE_FORMAT))
    try:
        dims = [int(n) for n in header['dims']]
        lo,hi = ([float(v) for v in corner] for corner in header['bbox'])
        K = int(header['K'])
        filtering = header.get('filtering', config.filtering.trilinear)
    except (KeyError, TypeError, ValueError) as e:
        raise error.ParseError(source, 1, message='Invalid texture header : {!s}'.format(e))
    if len(dims) != 3 or min(dims) < 1 or len(lo) != 3 or len(hi) != 3 or K < 2:
        raise error.ParseError(source, 1, message='Invalid texture header : dims={!r} K={!r}'.format(dims, K))
    if filtering not in config.filtering:
        raise error.ParseError(source, 1, message='Unknown filtering mode {!r}'.format(filtering))
    return dims, (lo, hi), K, filtering

def __texture_voxels(values, dims, K, source, tolerance=1e-6):
    count = dims[0] * dims[1] * dims[2]
    try:
        voxels = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise error.ParseError(source, 1, message='Voxels are not numeric : {!s}'.format(e))
    if voxels.ndim == 1 and len(voxels) % K == 0:
        voxels = voxels.reshape(-1, K)
    if voxels.ndim != 2 or voxels.shape[1] != K:
        raise error.TextureError(source, 0, message='Voxels must have {:d} components'.format(K))
    if len(voxels) != count:
        raise error.TextureError(source, min(len(voxels), count), message='Dimension mismatch : {:d} voxels for dims {!r}'.format(len(voxels), dims))

    # report the first voxel that isn't a mixing ratio
    bad = ~np.all(np.isfinite(voxels), axis=1)
    bad |= np.nan_to_num(voxels, nan=-1.0).min(axis=1) < -tolerance
    bad |= np.abs(np.nan_to_num(voxels.sum(axis=1), nan=np.inf) - 1.0) > tolerance
    if np.any(bad):
        index = int(np.argmax(bad))
        raise error.TextureError(source, index, message='Voxel {!r} is not a mixing ratio (sum={:.9g})'.format(tuple(voxels[index]), voxels[index].sum()))
    return normalize(voxels)

def load_volume_texture(file):
    """Read a volume texture from ``file`` (a path or a binary file object).

    The text form is a single JSON object holding the header fields and a
    ``voxels`` list. The binary form is the JSON header on its own line
    with ``"encoding": "float64-le"`` followed by the raw voxel data. In
    both, voxels are listed with x varying fastest, then y, then z.
    """
    if hasattr(file, 'read'):
        source,data = getattr(file, 'name', None),file.read()
    else:
        source = file
        with open(file, 'rb') as f:
            data = f.read()
    if isinstance(data, six.text_type):
        data = data.encode('utf-8')

    # binary textures carry their header on the first line
    line,_,rest = data.partition(b'\n')
    try:
        header = json.loads(line.decode('utf-8'))
    except (ValueError, UnicodeDecodeError):
        header = None

    if isinstance(header, dict) and 'encoding' in header and 'voxels' not in header:
        dims,bbox,K,filtering = __texture_header(header, source)
        if header['encoding'] != 'float64-le':
            raise error.ParseError(source, 1, message='Unsupported encoding {!r}'.format(header['encoding']))
        if len(rest) % 8:
            raise error.TextureError(source, len(rest) // (8 * K), message='Truncated voxel data of {:d} bytes'.format(len(rest)))
        values = np.frombuffer(rest, dtype='<f8')
    else:
        try:
            header = json.loads(data.decode('utf-8'))
        except (ValueError, UnicodeDecodeError) as e:
            raise error.ParseError(source, getattr(e, 'lineno', 1), message='Invalid texture : {!s}'.format(e))
        dims,bbox,K,filtering = __texture_header(header, source)
        if 'voxels' not in header:
            raise error.ParseError(source, 1, message='Texture has no voxels')
        values = header['voxels']

    voxels = __texture_voxels(values, dims, K, source)
    Log.info('load_volume_texture : {!s} : Loaded {:d}x{:d}x{:d} voxels of {:d} filaments ({:s})'.format(source, dims[0], dims[1], dims[2], K, filtering))
    return texture(dims, bbox, voxels, filtering=filtering, source=source)

def save_texture(tex, file, binary=False):
    '''Write the texture ``tex`` to ``file`` in the text or the binary form'''
    header = tex.header()
    voxels = tex.voxels.reshape(-1, tex.K)
    if binary:
        header['encoding'] = 'float64-le'
        data = json.dumps(header, sort_keys=True).encode('utf-8') + b'\n' + voxels.astype('<f8').tobytes()
    else:
        header['voxels'] = voxels.tolist()
        data = json.dumps(header, sort_keys=True).encode('utf-8')
    if hasattr(file, 'write'):
        file.write(data)
        return
    with open(file, 'wb') as f:
        f.write(data)
    return

## field descriptions
kinds = {
    'constant': lambda spec: constant(spec['mix']),
    'axis_gradient': lambda spec: axis_gradient(spec['start'], spec['end'], axis=spec.get('axis', 'x'), range=spec.get('range', (0.0, 1.0))),
    'sharpening_gradient': lambda spec: sharpening_gradient(spec['start'], spec['end'], axis=spec.get('axis', 'x'), center=spec.get('center', 0.0), width=spec.get('width', (10.0, 0.0)), z=spec.get('z', (0.0, 10.0))),
    'sine_around_axis': lambda spec: sine_around_axis(spec['low'], spec['high'], center=spec.get('center', (0.0, 0.0)), periods=spec.get('periods', (2, 100)), z=spec.get('z', (0.0, 10.0))),
    'radial_disc': lambda spec: radial_disc(spec['inner'], spec['rim'], center=spec.get('center', (0.0, 0.0)), radius=spec.get('radius', 10.0)),
}

def from_spec(spec, directory=None):
    '''Return the field described by the mapping ``spec``'''
    if not isinstance(spec, dict) or 'kind' not in spec:
        raise error.InputError(spec, 'from_spec', message='A field description needs a kind')
    kind = spec['kind']
    if kind == texture.kind:
        if 'path' in spec:
            path = spec['path'] if directory is None else os.path.join(directory, spec['path'])
            return load_volume_texture(path)
        values = __texture_voxels(spec['voxels'], [int(n) for n in spec['dims']], int(spec['K']), None)
        return texture(spec['dims'], spec['bbox'], values, filtering=spec.get('filtering'))
    if kind not in kinds:
        raise error.InputError(spec, 'from_spec', message='Unknown field kind {!r}. Expected one of {!r}'.format(kind, sorted(kinds) + [texture.kind]))
    try:
        return kinds[kind](spec)
    except KeyError as e:
        raise error.InputError(spec, 'from_spec', message='Field of kind {:s} is missing {!s}'.format(kind, e))

def load_field(path):
    '''Read a field description (or a volume texture) from the JSON file at ``path``'''
    with open(path, 'rb') as f:
        data = f.read()
    try:
        spec = json.loads(data.decode('utf-8'))
    except (ValueError, UnicodeDecodeError):
        return load_volume_texture(path)
    if isinstance(spec, dict) and spec.get('format') == TEXTURE_FORMAT:
        return load_volume_texture(path)
    return from_spec(spec, directory=os.path.dirname(path))

if __name__ == '__main__':
    class Result(Exception): pass
    class Success(Result): pass
    class Failure(Result): pass

    TestCaseList = []
    def TestCase(fn):
        def harness(**kwds):
            name = fn.__name__
            try:
                res = fn(**kwds)
                raise Failure
            except Success as e:
                print('%s: %r'% (name,e))
                return True
            except Failure as e:
                print('%s: %r'% (name,e))
            except Exception as e:
                print('%s: %r : %r'% (name,Failure(), e))
            return False
        TestCaseList.append(harness)
        return fn

if __name__ == '__main__':
    @TestCase
    def test_field_gradient_midpoint():
        f = axis_gradient((1,0,0), (0,1,0), axis='x', range=(0, 10))
        if np.allclose(f.sample((5, 0, 0)), (0.5, 0.5, 0)):
            raise Success

    @TestCase
    def test_field_nearest_texture():
        t = texture((2,1,1), ((0,0,0), (2,1,1)), [(1,0), (0,1)], filtering='nearest')
        if np.allclose(t.sample((1.5, 0.5, 0.5)), (0, 1)):
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
