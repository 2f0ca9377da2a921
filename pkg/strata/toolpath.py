"""Layers of polyline toolpaths.

A print job is an ordered list of layers of uniform thickness. Each layer
holds the toolpaths that the nozzle follows at the top of the layer. A
toolpath is an ordered list of vertices, each carrying the mixing ratio
sampled from the field and, once the layer has been optimized, the
thickness coefficients (alphas) of every stratum.

Closed toolpaths repeat their first vertex at the end. The toolpath file
omits the repetition.

    class interface(path):
        closed -- whether the last vertex joins the first
        track_width -- width of the deposited track in mm
        role -- one of config.role

        def vertices(self):
            '''Return the list of vertex records'''
        def length(self):
            '''Return the total xy length'''
        def volumes(self, thickness):
            '''Return the volume deposited by each segment for each stratum'''

Example usage:
    from strata import toolpath, field
    job = toolpath.generate_test_shape('cylinder', {'radius': 20, 'height': 0.4}, layer_thickness=0.4)
    f = field.constant((0.2, 0.3, 0.5))
    layer = toolpath.resample(job.layers[0], f, step=0.2)
    print(layer.vertex_count())

The toolpath file is in JSON Lines. The first line is a header
``{"format": "strata-toolpaths/1", "machine": {...}}`` and every other
non-empty line is one layer:

    {"index": 0, "z_top": 0.3, "thickness": 0.3,
     "paths": [{"closed": true, "track_width": 0.4, "role": "perimeter",
                "vertices": [[x, y], ...]}]}
"""
import math,json,itertools
import six
import numpy as np

from . import config,error
from . import machine as _machine
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'vertex,path,layer,job,load_toolpaths,save_toolpaths,generate_test_shape,resample,simplify,simplify_indices,segment_volume'.split(',')

TOOLPATH_FORMAT = 'strata-toolpaths/1'

def frozen(array):
    res = np.array(array, dtype=float)
    res.setflags(write=False)
    return res

class vertex(object):
    '''A single position along a toolpath'''
    __slots__ = ('position', 'mix', 'alphas')

    def __init__(self, position, mix=None, alphas=None):
        self.position = tuple(float(n) for n in position)
        self.mix = None if mix is None else np.asarray(mix, dtype=float)
        self.alphas = None if alphas is None else np.asarray(alphas, dtype=float)

    def check(self):
        '''Raise a ValidationError if the mix or alphas are not barycentric'''
        if self.mix is not None and (self.mix.min() < 0 or abs(self.mix.sum() - 1.0) > 1e-9):
            raise error.ValidationError(self, 'check', message='Mix {!r} is not a mixing ratio'.format(tuple(self.mix)))
        if self.alphas is not None and (self.alphas.min() < 0 or abs(self.alphas.sum() - 1.0) > 1e-6):
            raise error.ValidationError(self, 'check', message='Alphas {!r} do not sum to one'.format(tuple(self.alphas)))
        return self

    def shortname(self):
        return 'vertex({:g}, {:g}, {:g})'.format(*self.position)

    def __repr__(self):
        return '<{:s} mix={!r} alphas={!r}>'.format(self.shortname(), None if self.mix is None else tuple(self.mix), None if self.alphas is None else tuple(self.alphas))

class path(object):
    """A polyline followed by the nozzle within one layer.

    ``points`` is an (n, 3) array of positions. ``mixes`` and ``alphas``
    are optional (n, K) and (n, S) arrays with one row per vertex.
    """
    def __init__(self, points, closed=False, track_width=None, role=None, mixes=None, alphas=None):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise error.UserError(self, '__init__', message='Expected an (n, 3) array of points : {!r}'.format(points.shape))

        self.closed = bool(closed)
        if self.closed and len(points) and not np.allclose(points[0], points[-1], rtol=0.0, atol=Config.toolpath.coincident):
            points = np.vstack((points, points[:1]))
            mixes = None if mixes is None else np.vstack((mixes, np.asarray(mixes)[:1]))
            alphas = None if alphas is None else np.vstack((alphas, np.asarray(alphas)[:1]))

        minimum = 4 if self.closed else 2
        if len(points) < minimum:
            raise error.ValidationError(self, '__init__', message='A{:s} path needs at least {:d} vertices : {:d}'.format(' closed' if self.closed else 'n open', minimum - 1 if self.closed else minimum, len(points) - (1 if self.closed else 0)))
        lengths = np.hypot(*np.diff(points[:, :2], axis=0).T)
        if np.any(lengths <= Config.toolpath.coincident):
            raise error.ValidationError(self, '__init__', message='Path has coincident consecutive vertices at index {:d}'.format(int(np.argmax(lengths <= Config.toolpath.coincident))))
        if np.ptp(points[:, 2]) > 1e-9:
            raise error.ValidationError(self, '__init__', message='Path vertices are not at a single height')

        self.points = frozen(points)
        self.track_width = float(Config.machine.nozzle_diameter if track_width is None else track_width)
        if not self.track_width > 0:
            raise error.UserError(self, '__init__', message='Track width must be positive : {!r}'.format(track_width))
        self.role = config.role.perimeter if role is None else role
        if self.role not in config.role:
            raise error.UserError(self, '__init__', message='Unknown role {!r}'.format(role))

        self.mixes = None if mixes is None else frozen(mixes)
        self.alphas = None if alphas is None else frozen(alphas)
        for name, values in [('mixes', self.mixes), ('alphas', self.alphas)]:
            if values is not None and (values.ndim != 2 or len(values) != len(points)):
                raise error.UserError(self, '__init__', message='Expected one row of {:s} per vertex : {!r}'.format(name, values.shape))
            continue

    def __len__(self):
        return len(self.points)

    @property
    def z(self):
        return float(self.points[0, 2])

    @property
    def vertices(self):
        mixes = itertools.repeat(None) if self.mixes is None else self.mixes
        alphas = itertools.repeat(None) if self.alphas is None else self.alphas
        return [ vertex(p, m, a) for p, m, a in zip(self.points, mixes, alphas) ]

    def lengths(self):
        '''Return the xy length of every segment'''
        return np.hypot(*np.diff(self.points[:, :2], axis=0).T)

    def length(self):
        return float(self.lengths().sum())

    def volumes(self, thickness):
        '''Return an (n-1, S) array with the volume each segment deposits for each stratum'''
        if self.alphas is None:
            raise error.PreconditionError(self, 'volumes', message='Path has no strata thickness coefficients')
        average = 0.5 * (self.alphas[:-1] + self.alphas[1:])
        return self.track_width * thickness * self.lengths()[:, None] * average

    def copy(self, **attrs):
        res = dict(points=self.points, closed=self.closed, track_width=self.track_width, role=self.role, mixes=self.mixes, alphas=self.alphas)
        res.update(attrs)
        return path(**res)

    def serialize(self):
        points = self.points[:-1] if self.closed else self.points
        return {'closed': self.closed, 'track_width': self.track_width, 'role': self.role, 'vertices': points[:, :2].tolist()}

    def shortname(self):
        return '{:s} path[{:d}]'.format(self.role, len(self))

    def __repr__(self):
        return '<{:s} {:s} length={:.3f}>'.format('closed' if self.closed else 'open', self.shortname(), self.length())

class layer(object):
    '''The toolpaths deposited at one height'''
    def __init__(self, index, z_top, thickness, toolpaths=(), plan=None):
        self.index,self.z_top,self.thickness = int(index),float(z_top),float(thickness)
        if not self.thickness > 0:
            raise error.ValidationError(self, '__init__', message='Layer thickness must be positive : {!r}'.format(thickness))
        self.toolpaths = tuple(toolpaths)
        self.plan = plan

    @property
    def base(self):
        '''Height of the bottom of the layer'''
        return self.z_top - self.thickness

    @property
    def middle(self):
        return self.z_top - 0.5 * self.thickness

    def vertex_count(self):
        return sum(len(item) for item in self.toolpaths)

    def length(self):
        return sum(item.length() for item in self.toolpaths)

    def resampled(self):
        return all(item.mixes is not None for item in self.toolpaths)

    def mixes(self):
        '''Return the mixing ratio of every vertex of every path as a single array'''
        if not self.resampled():
            raise error.PreconditionError(self, 'mixes', message='Layer has not been resampled against a field')
        if not self.toolpaths:
            return np.zeros((0, 0))
        return np.vstack([item.mixes for item in self.toolpaths])

    def volume(self):
        '''Return the total volume deposited by the layer'''
        return sum(item.track_width * self.thickness * item.length() for item in self.toolpaths)

    def xy(self):
        '''Return every vertex position projected onto the xy plane'''
        if not self.toolpaths:
            return np.zeros((0, 2))
        return np.vstack([item.points[:, :2] for item in self.toolpaths])

    def copy(self, **attrs):
        res = dict(index=self.index, z_top=self.z_top, thickness=self.thickness, toolpaths=self.toolpaths, plan=self.plan)
        res.update(attrs)
        return layer(**res)

    def serialize(self):
        return {'index': self.index, 'z_top': self.z_top, 'thickness': self.thickness, 'paths': [item.serialize() for item in self.toolpaths]}

    def shortname(self):
        return 'layer {:d}'.format(self.index)

    def __repr__(self):
        return '<{:s} z_top={:.4f} thickness={:.4f} paths={:d} plan={!r}>'.format(self.shortname(), self.z_top, self.thickness, len(self.toolpaths), self.plan)

class job(object):
    '''Layers of a print ordered bottom up, and the machine they target'''
    def __init__(self, layers, machine=None):
        self.layers = tuple(layers)
        self.machine = _machine.machine() if machine is None else machine
        for prev, item in zip(self.layers, self.layers[1:]):
            if not item.z_top > prev.z_top:
                raise error.ValidationError(self, '__init__', message='Layer {:d} at z={:g} is not above layer {:d} at z={:g}'.format(item.index, item.z_top, prev.index, prev.z_top))
            if abs(item.z_top - prev.z_top - item.thickness) > 1e-6:
                raise error.ValidationError(self, '__init__', message='Layer {:d} at z={:g} is not stacked on layer {:d} at z={:g} with thickness {:g}'.format(item.index, item.z_top, prev.index, prev.z_top, item.thickness))
            continue
        for item in self.layers:
            if abs(item.thickness - self.machine.layer_thickness) > 1e-6:
                raise error.ValidationError(self, '__init__', message='Layer {:d} thickness {:g} differs from the machine layer thickness {:g}'.format(item.index, item.thickness, self.machine.layer_thickness))
            continue

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def copy(self, **attrs):
        res = dict(layers=self.layers, machine=self.machine)
        res.update(attrs)
        return job(**res)

    def locate(self, z, tolerance=1e-6):
        '''Return the position of the layer whose slab (z_top - T, z_top] contains ``z``'''
        tops = np.array([item.z_top for item in self.layers])
        index = int(np.searchsorted(tops, z - tolerance))
        if index < len(self.layers) and self.layers[index].base < z <= self.layers[index].z_top + tolerance:
            return index
        raise error.ValidationError(self, 'locate', message='Height {:g} is not within any layer'.format(z))

    def shortname(self):
        return 'job[{:d}]'.format(len(self.layers))

    def __repr__(self):
        return '<{:s} {!r}>'.format(self.shortname(), self.machine)

## file input/output
def __decode(line, source, lineno):
    try:
        res = json.loads(line)
    except ValueError as e:
        raise error.ParseError(source, lineno, message='Invalid record : {!s}'.format(e))
    if not isinstance(res, dict):
        raise error.ParseError(source, lineno, message='Expected an object but found {:s}'.format(type(res).__name__))
    return res

def __path(record, z_top, source, lineno, default_width):
    if not isinstance(record, dict) or 'vertices' not in record:
        raise error.ParseError(source, lineno, message='Path record has no vertices')
    try:
        xy = np.array(record['vertices'], dtype=float)
    except (TypeError, ValueError) as e:
        raise error.ParseError(source, lineno, message='Path vertices are not numeric : {!s}'.format(e))
    if xy.ndim != 2 or xy.shape[1] not in (2, 3) or not np.all(np.isfinite(xy)):
        raise error.ParseError(source, lineno, message='Expected a list of [x, y] pairs')
    if xy.shape[1] == 3 and np.any(np.abs(xy[:, 2] - z_top) > 1e-6):
        raise error.ParseError(source, lineno, message='Path vertex is not at the layer height {:g}'.format(z_top))
    closed,role = bool(record.get('closed', False)),record.get('role', config.role.perimeter)
    if role not in config.role:
        raise error.ParseError(source, lineno, message='Unknown role {!r}'.format(role))

    # drop zero-length segments
    keep = np.ones(len(xy), dtype=bool)
    if len(xy) > 1:
        keep[1:] = np.hypot(*np.diff(xy[:, :2], axis=0).T) > Config.toolpath.coincident
    if closed and keep.sum() > 1 and math.hypot(*(xy[keep][-1, :2] - xy[0, :2])) <= Config.toolpath.coincident:
        keep[np.flatnonzero(keep)[-1]] = False
    if not keep.all():
        Log.info('load_toolpaths : {!s}:{:d} : Dropped {:d} coincident vertices'.format(source, lineno, int((~keep).sum())))
    xy = xy[keep]

    points = np.column_stack((xy[:, :2], np.full(len(xy), z_top)))
    if len(points) < (3 if closed else 2):
        Log.info('load_toolpaths : {!s}:{:d} : Dropped a degenerate {:s} path of {:d} vertices'.format(source, lineno, role, len(points)))
        return None
    return path(points, closed=closed, track_width=record.get('track_width', default_width), role=role)

def load_toolpaths(source):
    '''Read a print job from ``source`` (a path or a text file object) in the strata-toolpaths/1 format'''
    if hasattr(source, 'read'):
        name,lines = getattr(source, 'name', '<input>'),source.read()
    else:
        name = source
        with open(source, 'rt') as f:
            lines = f.read()
    if isinstance(lines, bytes):
        lines = lines.decode('utf-8')

    records = [ (lineno, line) for lineno, line in enumerate(lines.splitlines(), 1) if line.strip() ]
    if not records:
        raise error.ParseError(name, 1, message='Missing header')
    lineno,line = records[0]
    header = __decode(line, name, lineno)
    if header.get('format') != TOOLPATH_FORMAT:
        raise error.ParseError(name, lineno, message='Expected a header with format {!r} but found {!r}'.format(TOOLPATH_FORMAT, header.get('format')))

    layers = []
    for lineno, line in records[1:]:
        record = __decode(line, name, lineno)
        try:
            index,z_top,thickness = int(record['index']),float(record['z_top']),float(record['thickness'])
            paths = record['paths']
        except KeyError as e:
            raise error.ParseError(name, lineno, message='Layer record is missing {!s}'.format(e))
        except (TypeError, ValueError) as e:
            raise error.ParseError(name, lineno, message='Invalid layer record : {!s}'.format(e))
        if not thickness > 0:
            raise error.ParseError(name, lineno, message='Layer thickness must be positive : {!r}'.format(thickness))
        width = header.get('machine', {}).get('nozzle_diameter', Config.machine.nozzle_diameter)
        items = [ __path(item, z_top, name, lineno, width) for item in paths ]
        layers.append(layer(index, z_top, thickness, [item for item in items if item is not None]))

    attrs = dict(header.get('machine', {}))
    if layers and 'layer_thickness' not in attrs:
        attrs['layer_thickness'] = layers[0].thickness
    try:
        m = _machine.machine(**attrs)
    except error.UserError as e:
        raise error.ParseError(name, records[0][0], message='Invalid machine : {!s}'.format(e))
    res = job(layers, machine=m)
    Log.info('load_toolpaths : {!s} : Loaded {:d} layers with {:d} paths'.format(name, len(res.layers), sum(len(item.toolpaths) for item in res.layers)))
    return res

def save_toolpaths(job, file):
    '''Write ``job`` to ``file`` (a path or a text file object) in the strata-toolpaths/1 format'''
    lines = [ json.dumps({'format': TOOLPATH_FORMAT, 'machine': dict(job.machine.items())}, sort_keys=True) ]
    lines.extend(json.dumps(item.serialize(), sort_keys=True) for item in job.layers)
    data = '\n'.join(lines) + '\n'
    if hasattr(file, 'write'):
        file.write(data)
        return
    with open(file, 'wt') as f:
        f.write(data)
    return

## built-in test shapes
def circle(center, radius, z, resolution):
    count = max(8, int(math.ceil(2 * math.pi * radius / resolution)))
    theta = np.linspace(0.0, 2 * math.pi, count, endpoint=False)
    return np.column_stack((center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta), np.full(count, z)))

def rectangle(center, width, depth, z):
    x0,x1 = center[0] - width / 2.0, center[0] + width / 2.0
    y0,y1 = center[1] - depth / 2.0, center[1] + depth / 2.0
    return np.array([(x0, y0, z), (x1, y0, z), (x1, y1, z), (x0, y1, z)])

def __loops(shape, params, z, width, resolution):
    center = tuple(map(float, params.get('center', (0.0, 0.0))))
    perimeters = int(params.get('perimeters', 1))
    if perimeters < 1:
        raise error.UserError(None, 'generate_test_shape', message='At least one perimeter is required : {!r}'.format(perimeters))

    res = []
    if shape == 'extruded_rectangle':
        for index in six.moves.range(perimeters):
            inset = (index + 0.5) * width
            w,d = params['width'] - 2 * inset, params['depth'] - 2 * inset
            if w <= Config.toolpath.coincident or d <= Config.toolpath.coincident:
                break
            res.append(path(rectangle(center, w, d, z), closed=True, track_width=width, role=config.role.perimeter))
        return res

    # a disc is filled with concentric loops until the center
    count = int(math.floor(params['radius'] / width + 0.5)) if shape == 'disc' else perimeters
    for index in six.moves.range(max(1, count)):
        radius = params['radius'] - (index + 0.5) * width
        if radius <= 0.5 * width and index:
            break
        radius = max(radius, 0.5 * width)
        role = config.role.perimeter if index < perimeters else config.role.infill
        res.append(path(circle(center, radius, z, resolution), closed=True, track_width=width, role=role))
    return res

shapes = {
    'extruded_rectangle': ('width', 'depth'),
    'cylinder': ('radius',),
    'disc': ('radius',),
}

def generate_test_shape(shape, params, layer_thickness=None, machine=None):
    """Return a job tracing one of the built-in shapes with closed loops.

    ``shape`` is one of extruded_rectangle (``width`` by ``depth``), cylinder
    or disc (``radius``). Every shape takes a ``height`` (defaults to a single
    layer), a ``center`` and a number of ``perimeters``. The disc is filled
    with concentric loops.
    """
    if shape not in shapes:
        raise error.UserError(None, 'generate_test_shape', message='Unknown shape {!r}. Expected one of {!r}'.format(shape, sorted(shapes)))
    m = _machine.machine() if machine is None else machine
    if layer_thickness is not None and abs(layer_thickness - m.layer_thickness) > 1e-12:
        m = m.copy(layer_thickness=layer_thickness)
    T = m.layer_thickness

    params = dict(params)
    missing = [ name for name in shapes[shape] if name not in params ]
    if missing:
        raise error.UserError(None, 'generate_test_shape', message='Shape {:s} requires {!r}'.format(shape, missing))
    height = float(params.setdefault('height', T))
    for name in shapes[shape] + ('height',):
        if not float(params[name]) > 0:
            raise error.UserError(None, 'generate_test_shape', message='Dimension {:s} must be positive : {!r}'.format(name, params[name]))
        params[name] = float(params[name])

    count = int(round(height / T))
    if count < 1:
        raise error.UserError(None, 'generate_test_shape', message='Height {:g} is lower than one layer of {:g}'.format(height, T))

    layers = []
    for index in six.moves.range(count):
        z_top = (index + 1) * T
        loops = __loops(shape, params, z_top, m.track_width, Config.toolpath.circle_resolution)
        layers.append(layer(index, z_top, T, loops))
    Log.info('generate_test_shape : {:s} : Generated {:d} layers of {:d} loops'.format(shape, len(layers), len(layers[0].toolpaths)))
    return job(layers, machine=m)

## resampling
def densify(points, step):
    '''Subdivide every segment of ``points`` into the fewest pieces of equal length no longer than ``step``'''
    lengths = np.hypot(*np.diff(points[:, :2], axis=0).T)
    pieces = np.maximum(1, np.ceil(lengths / step - 1e-9).astype(int))
    segment = np.repeat(np.arange(len(lengths)), pieces)
    offset = np.concatenate([np.arange(n) / float(n) for n in pieces])
    res = points[segment] + offset[:, None] * (points[segment + 1] - points[segment])
    return np.vstack((res, points[-1:]))

def resample(layer, field, step=None):
    """Return ``layer`` with every segment subdivided to at most ``step`` mm.

    Original vertices are kept. Each vertex receives the mixing ratio of
    ``field`` sampled at the vertex with z at the middle of the layer. A
    ``step`` of None uses the configured step, or half of each track width.
    """
    step = Config.toolpath.resample_step if step is None else step
    if step is not None and not step > 0:
        raise error.UserError(layer, 'resample', message='Resampling step must be positive : {!r}'.format(step))

    res = []
    for item in layer.toolpaths:
        points = densify(item.points, 0.5 * item.track_width if step is None else step)
        samples = points.copy()
        samples[:, 2] = layer.middle
        mixes = field.sample_many(samples)
        res.append(item.copy(points=points, mixes=mixes, alphas=None))
    Log.debug('resample : {:s} : {:d} vertices became {:d}'.format(layer.shortname(), layer.vertex_count(), sum(len(item) for item in res)))
    return layer.copy(toolpaths=res, plan=None)

## simplification
def simplify_indices(xy, alphas, xy_tol, alpha_tol):
    """Return the sorted indices of the vertices kept by simplifying a polyline.

    A vertex between two kept vertices is removed when its xy distance to
    the chord is at most ``xy_tol`` and its alphas deviate by at most
    ``alpha_tol`` from the alphas interpolated at its projection onto the
    chord. Otherwise the vertex deviating the most is kept and both halves
    are simplified again.
    """
    xy,alphas = np.asarray(xy, dtype=float)[:, :2],np.asarray(alphas, dtype=float)
    count = len(xy)
    if count < 3:
        return list(six.moves.range(count))

    keep = np.zeros(count, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, count - 1)]
    while stack:
        first,last = stack.pop()
        if last - first < 2:
            continue
        a,b = xy[first], xy[last]
        chord = b - a
        squared = chord.dot(chord)
        inner = xy[first+1:last]
        if squared > 0:
            t = np.clip((inner - a).dot(chord) / squared, 0.0, 1.0)
        else:
            t = np.zeros(len(inner))
        distance = np.hypot(*(inner - (a + t[:, None] * chord)).T)
        expected = alphas[first] + t[:, None] * (alphas[last] - alphas[first])
        deviation = np.abs(alphas[first+1:last] - expected).max(axis=1)

        # weigh both criteria against their own tolerance
        excess = np.maximum(distance / xy_tol if xy_tol > 0 else np.where(distance > 0, np.inf, 0.0),
                            deviation / alpha_tol if alpha_tol > 0 else np.where(deviation > 0, np.inf, 0.0))
        index = int(np.argmax(excess))
        if excess[index] > 1.0:
            split = first + 1 + index
            keep[split] = True
            stack.append((split, last))
            stack.append((first, split))
        continue
    return np.flatnonzero(keep).tolist()

def simplify(toolpath, xy_tol=None, alpha_tol=None):
    '''Return ``toolpath`` without the vertices that are redundant within ``xy_tol`` and ``alpha_tol``'''
    xy_tol = Config.toolpath.xy_tolerance if xy_tol is None else xy_tol
    alpha_tol = Config.toolpath.alpha_tolerance if alpha_tol is None else alpha_tol
    if toolpath.alphas is None:
        raise error.PreconditionError(toolpath, 'simplify', message='Path has no strata thickness coefficients')
    index = simplify_indices(toolpath.points, toolpath.alphas, xy_tol, alpha_tol)
    if len(index) == len(toolpath):
        return toolpath

    # closed paths keep at least a triangle
    if toolpath.closed and len(index) < 4:
        return toolpath
    mixes = None if toolpath.mixes is None else toolpath.mixes[index]
    return toolpath.copy(points=toolpath.points[index], mixes=mixes, alphas=toolpath.alphas[index])

def segment_volume(v0, v1, stratum, track_width, layer_thickness):
    '''Return the volume deposited for ``stratum`` between the vertices ``v0`` and ``v1``'''
    if v0.alphas is None or v1.alphas is None:
        raise error.PreconditionError(v0 if v0.alphas is None else v1, 'segment_volume', message='Vertex has no strata thickness coefficients')
    if not 0 <= stratum < min(len(v0.alphas), len(v1.alphas)):
        raise error.UserError(v0, 'segment_volume', message='Stratum {!r} is out of range'.format(stratum))
    length = math.hypot(v1.position[0] - v0.position[0], v1.position[1] - v0.position[1])
    return track_width * layer_thickness * length * 0.5 * (v0.alphas[stratum] + v1.alphas[stratum])

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
    def test_toolpath_segment_volume():
        a,b = vertex((0,0,0.3), alphas=(1.0,)), vertex((10,0,0.3), alphas=(1.0,))
        if abs(segment_volume(a, b, 0, 0.4, 0.3) - 1.2) < 1e-12:
            raise Success

    @TestCase
    def test_toolpath_densify():
        res = densify(np.array([(0,0,0), (10,0,0)], dtype=float), 1.0)
        if len(res) == 11:
            raise Success

    @TestCase
    def test_toolpath_simplify_collinear():
        xy = np.column_stack((np.linspace(0, 10, 11), np.zeros(11)))
        alphas = np.column_stack((np.linspace(0, 1, 11), np.linspace(1, 0, 11)))
        if simplify_indices(xy, alphas, 0.01, 0.005) == [0, 10]:
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
