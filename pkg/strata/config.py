import contextlib,numbers
import six,logging

__all__ = 'defaults,filtering,role,fields,resolve,flatten,override'.split(',')

class field:
    class descriptor(object):
        def __init__(self):
            self.__value__ = {}
        def __set__(self, instance, value):
            self.__value__[instance] = self.check(value)
        def __get__(self, instance, type=None):
            if instance is None:
                return self
            return self.__value__.get(instance)
        def __delete__(self, instance):
            raise AttributeError
        def check(self, value):
            return value

    class __enum_descriptor(descriptor):
        __option__ = set()
        def check(self, value):
            if value in self.__option__:
                return value
            raise ValueError('{!r} is not a member of {!r}'.format(value, sorted(self.__option__, key=str)))

    class __type_descriptor(descriptor):
        __type__ = type
        def check(self, value):
            if isinstance(value, self.__type__):
                return value
            raise ValueError('{!r} is not an instance of {!r}'.format(value, self.__type__))

    class __number_descriptor(descriptor):
        __type__ = numbers.Real
        __range__ = None, None
        __optional__ = False
        def check(self, value):
            if value is None and self.__optional__:
                return value
            if isinstance(value, bool) or not isinstance(value, self.__type__):
                raise ValueError('{!r} is not an instance of {!r}'.format(value, self.__type__))
            minimum,maximum = self.__range__
            if minimum is not None and not value > minimum:
                raise ValueError('{!r} must be larger than {!r}'.format(value, minimum))
            if maximum is not None and not value <= maximum:
                raise ValueError('{!r} must not be larger than {!r}'.format(value, maximum))
            return value

    class __bool_descriptor(descriptor):
        def check(self, value):
            if not isinstance(value, bool):
                logging.warning("rvalue {!r} is not of boolean type. Coercing it into one : ({:s} != {:s})".format(value, type(value).__name__, bool.__name__))
            return bool(value)

    @classmethod
    def enum(cls, name, options=(), doc=''):
        base = cls.__enum_descriptor
        attrs = {}
        attrs['__option__'] = set(options)
        attrs['__doc__'] = doc
        return type(name, (base,), attrs)()
    @classmethod
    def type(cls, name, subtype, doc=''):
        base = cls.__type_descriptor
        attrs = {}
        attrs['__type__'] = subtype
        attrs['__doc__'] = doc
        return type(name, (base,), attrs)()
    @classmethod
    def number(cls, name, doc='', minimum=0, maximum=None, integral=False, optional=False):
        '''A real (or integral) value which must be larger than ``minimum`` and at most ``maximum``'''
        base = cls.__number_descriptor
        attrs = {}
        attrs['__type__'] = numbers.Integral if integral else numbers.Real
        attrs['__range__'] = minimum, maximum
        attrs['__optional__'] = optional
        attrs['__doc__'] = doc
        return type(name, (base,), attrs)()
    @classmethod
    def bool(cls, name, doc=''):
        base = cls.__bool_descriptor
        attrs = {}
        attrs['__doc__'] = doc
        return type(name, (base,), attrs)()

def namespace(cls):
    # turn all instances of things into read-only attributes
    attrs,properties = {},{}
    for k,v in cls.__dict__.items():
        if k in ('__dict__','__weakref__'):
            continue
        elif k.startswith('_') or type(v) is property:
            attrs[k] = v
        else:
            properties[k] = v
        continue

    def __repr__(self):
        descr = ('{{{!s}}} # {}\n' if cls.__doc__ else '{{{!s}}}\n')
        res = descr.format(cls.__name__, cls.__doc__)
        return res + '\n'.join('{:s} : {!r}'.format(k, v) for k,v in sorted(properties.items()))

    def __setattr__(self, name, value):
        raise AttributeError('Namespace \'{:s}\' does not have a writable field named \'{:s}\''.format(cls.__name__,name))

    def __iter__(self):
        return iter(sorted(properties))

    attrs['__repr__'] = __repr__
    attrs['__setattr__'] = __setattr__
    attrs['__iter__'] = __iter__
    attrs.update((k,property(fget=lambda s,k=k:properties[k])) for k in properties)
    result = type(cls.__name__, cls.__bases__, attrs)
    return result()

def configuration(cls):
    attrs,properties,subclass = dict(cls.__dict__),{},{}
    [ attrs.pop(k, None) for k in ('__dict__','__weakref__') ]
    for k,v in list(attrs.items()):
        if isinstance(v, field.descriptor):
            properties[k] = v
        elif isinstance(v, type) and not k.startswith('_'):
            subclass[k] = configuration(v)
        continue

    def getprops(obj,val):
        result = []
        col1,col2 = 0,0
        for k,v in sorted(obj.items()):
            col1 = max((col1,len(k)))
            doc = v.__doc__.split('\n')[0] if v.__doc__ else None
            col2 = max((col2,len('{!r}'.format(val[k]))))
            result.append((k, val[k], doc))
        return [(('{{name:{:d}}} = {{val!r:<{:d}}} # {{doc}}' if d else '{{name:{:d}}} = {{val!r:<{:d}}}').format(col1,col2)).format(name=k,val=v,doc=d) for k,v,d in result]

    def __repr__(self):
        descr = ('[{!s}] # {}\n' if cls.__doc__ else '[{!s}]\n')
        values = dict((k,getattr(self,k,None)) for k in properties)
        res = descr.format(cls.__name__,cls.__doc__.split('\n')[0] if cls.__doc__ else None) + '\n'.join(getprops(properties,values))
        subs = ['[{}.{}]\n...'.format(cls.__name__,k) for k in sorted(subclass)]
        if subs:
            return res + '\n' + '\n'.join(subs) + '\n'
        return res + '\n'

    def __setattr__(self, name, value):
        if name in properties:
            object.__setattr__(self, name, value)
            return
        raise AttributeError('Namespace \'{:s}\' does not have a field named \'{:s}\''.format(cls.__name__,name))

    attrs['__repr__'] = __repr__
    attrs['__setattr__'] = __setattr__
    attrs['__properties__'] = properties
    attrs['__sections__'] = subclass
    attrs.update((k,property(fget=lambda s,k=k:subclass[k])) for k in subclass)
    result = type(cls.__name__, cls.__bases__, attrs)
    return result()

def fields(conf, prefix=''):
    '''Yield a (dotted-name, descriptor, value) tuple for every leaf of the configuration ``conf``'''
    for k,v in sorted(type(conf).__properties__.items()):
        yield prefix + k, v, getattr(conf, k)
    for k,sub in sorted(type(conf).__sections__.items()):
        for res in fields(sub, prefix + k + '.'):
            yield res
        continue
    return

def resolve(conf, dotted):
    '''Return the (section, attribute) pair that the ``dotted`` name refers to'''
    path = dotted.split('.')
    section = conf
    for name in path[:-1]:
        if name not in type(section).__sections__:
            raise AttributeError('Configuration \'{:s}\' does not have a section named \'{:s}\''.format(type(section).__name__, name))
        section = getattr(section, name)
    if path[-1] not in type(section).__properties__:
        raise AttributeError('Configuration \'{:s}\' does not have a field named \'{:s}\''.format(type(section).__name__, path[-1]))
    return section, path[-1]

def __leaf(conf, dotted):
    try:
        resolve(conf, dotted)
    except AttributeError:
        return False
    return True

def flatten(mapping, prefix='', conf=None):
    '''Flatten a nested mapping of configuration values into dotted names, keeping the value of a leaf whole'''
    conf = defaults if conf is None else conf
    result = {}
    for k,v in mapping.items():
        if isinstance(v, dict) and not __leaf(conf, prefix + k):
            result.update(flatten(v, prefix + k + '.', conf))
        else:
            result[prefix + k] = v
        continue
    return result

@contextlib.contextmanager
def override(mapping, conf=None):
    '''Temporarily assign the dotted names in ``mapping`` for the scope of the context'''
    conf = defaults if conf is None else conf
    targets = [ (resolve(conf, k), v) for k,v in flatten(mapping, conf=conf).items() ]
    states = [ (section, name, getattr(section, name)) for (section, name),_ in targets ]
    try:
        for (section,name),value in targets:
            setattr(section, name, value)
        yield conf
    finally:
        for section,name,value in states:
            object.__setattr__(section, name, value)
    return

### constants that can be used as options
@namespace
class filtering:
    '''Volume texture filtering modes'''
    nearest = 'nearest'
    trilinear = 'trilinear'

@namespace
class role:
    '''Roles of a toolpath within a layer'''
    perimeter = 'perimeter'
    infill = 'infill'
    shield = 'shield'

### new-config
@configuration
class defaults:
    log = field.type('default-logger', logging.Filterer, 'Default place to log progress')

    class machine:
        '''Printer parameters'''
        filaments = field.number('filaments', 'Number of filaments (K) entering the mixing nozzle', minimum=1, maximum=5, integral=True)
        nozzle_diameter = field.number('nozzle_diameter', 'Nozzle diameter in mm, also the deposited track width')
        filament_diameter = field.number('filament_diameter', 'Filament diameter in mm')
        layer_thickness = field.number('layer_thickness', 'Layer thickness T in mm')
        volumetric_rate = field.number('volumetric_rate', 'Constant volumetric extrusion rate in mm^3/s')
        max_feedrate = field.number('max_feedrate', 'Upper bound on extrusion feedrate in mm/s')
        travel_feedrate = field.number('travel_feedrate', 'Feedrate of non-extruding moves in mm/s')
        retraction = field.number('retraction', 'Filament retracted on every deposition interruption, in mm')
        retraction_feedrate = field.number('retraction_feedrate', 'Feedrate of retractions in mm/s')
        purge_volume = field.number('purge_volume', 'Volume purged on the ooze shield before each stratum, in mm^3')
        shield_offset = field.number('shield_offset', 'Distance between the layer hull and the ooze shield, in mm')
        linear_advance_factor = field.number('linear_advance_factor', 'Firmware linear advance K-factor', minimum=None)
        minimum_thickness = field.number('minimum_thickness', 'Strata thinner than this (mm) interrupt deposition')
        ratio_letters = field.type('ratio_letters', six.string_types, 'Words carrying the mixing ratio of each filament')

    class optimizer:
        '''Strata mixture optimization'''
        epsilon = field.number('epsilon', 'Variance threshold selecting the intrinsic dimension')
        tolerance = field.number('tolerance', 'Tolerance on barycentric constraints of simplex vertices (lambda)')
        residual_tol = field.number('residual_tol', 'Largest error of the strata reproducing a vertex mixture once their base mixtures are clamped')
        singular_tol = field.number('singular_tol', 'Hyperplane intersections conditioned below this are rejected')
        enclosure_tol = field.number('enclosure_tol', 'Tolerance when checking that a simplex encloses the hull')
        max_candidates = field.number('max_candidates', 'Facet subsets tested per dimension, larger hulls are first reduced to their most prominent facets (None tests every subset)', integral=True, optional=True)
        shuffle_seed = field.number('shuffle_seed', 'Draw random facet subsets up to the cap with this seed instead of reducing the hull (None reduces it)', minimum=-1, integral=True, optional=True)

    class toolpath:
        '''Toolpath resampling and simplification'''
        resample_step = field.number('resample_step', 'Maximum segment length after resampling in mm (None is half the nozzle)', optional=True)
        xy_tolerance = field.number('xy_tolerance', 'Simplification tolerance on the path geometry in mm')
        alpha_tolerance = field.number('alpha_tolerance', 'Simplification tolerance on the strata thickness coefficients')
        coincident = field.number('coincident', 'Vertices closer than this (mm) are considered coincident')
        circle_resolution = field.number('circle_resolution', 'Maximum chord length of generated circles in mm')

    class ordering:
        '''Strata ordering'''
        seed = field.number('seed', 'Seed of the random order of the first layer', minimum=-1, integral=True)

    class validator:
        '''Virtual printer'''
        cell_size = field.number('cell_size', 'Edge of the deposit grid cells in mm')
        budget = field.number('budget', 'Deviation budget beyond which validation fails')

    class gcode:
        '''Number formatting of emitted G-code'''
        xy_places = field.number('xy_places', 'Decimal places of X and Y words', minimum=-1, integral=True)
        z_places = field.number('z_places', 'Decimal places of Z words', minimum=-1, integral=True)
        e_places = field.number('e_places', 'Decimal places of E words', minimum=-1, integral=True)
        f_places = field.number('f_places', 'Decimal places of F words', minimum=-1, integral=True)
        ratio_places = field.number('ratio_places', 'Decimal places of ratio words', minimum=-1, integral=True)

    class pipeline:
        '''Stages of the compiler'''
        input = field.type('input', six.string_types + (type(None),), 'Toolpath file of the job (None generates the test shape)')
        shape = field.enum('shape', ('extruded_rectangle', 'cylinder', 'disc'), 'Built-in test shape generated when there is no input')
        dimensions = field.type('dimensions', dict, 'Dimensions of the test shape in mm')
        output = field.type('output', six.string_types + (type(None),), 'Path of the emitted G-code')
        report = field.type('report', six.string_types + (type(None),), 'Path of the JSON report')
        optimize = field.bool('optimize', 'Optimize the strata of every layer (off prints one stratum per filament)')
        compare = field.bool('compare', 'Also compile without optimization and report both')
        workers = field.number('workers', 'Number of layers resampled and optimized concurrently', integral=True)
        field = field.type('field', six.string_types + (dict, type(None)), 'Field description, or the path of a field or a volume texture')

### defaults
# logging
defaults.log = log = logging.getLogger('strata')
log.setLevel(logging.root.level)
log.propagate = True
res = logging.StreamHandler(None)
res.setFormatter(logging.Formatter("[%(created).3f] <%(process)x.%(thread)x> [%(levelname)s:%(name)s] %(message)s", None))
log.addHandler(res)
del(res,log)

# machine
defaults.machine.filaments = 3
defaults.machine.nozzle_diameter = 0.4
defaults.machine.filament_diameter = 1.75
defaults.machine.layer_thickness = 0.3
defaults.machine.volumetric_rate = 6.0
defaults.machine.max_feedrate = 150.0
defaults.machine.travel_feedrate = 150.0
defaults.machine.retraction = 1.0
defaults.machine.retraction_feedrate = 40.0
defaults.machine.purge_volume = 7.0
defaults.machine.shield_offset = 3.0
defaults.machine.linear_advance_factor = 0.05
defaults.machine.minimum_thickness = 0.02
defaults.machine.ratio_letters = 'ABCDH'

# optimizer
defaults.optimizer.epsilon = 1e-4
defaults.optimizer.tolerance = 1e-2
defaults.optimizer.residual_tol = 5e-3
defaults.optimizer.singular_tol = 1e-8
defaults.optimizer.enclosure_tol = 1e-7
defaults.optimizer.max_candidates = 2000
defaults.optimizer.shuffle_seed = None

# toolpaths
defaults.toolpath.resample_step = None
defaults.toolpath.xy_tolerance = 0.01
defaults.toolpath.alpha_tolerance = 0.005
defaults.toolpath.coincident = 1e-6
defaults.toolpath.circle_resolution = 1.0

# ordering
defaults.ordering.seed = 0

# virtual printer
defaults.validator.cell_size = 0.2
defaults.validator.budget = 0.02

# g-code
defaults.gcode.xy_places = 3
defaults.gcode.z_places = 4
defaults.gcode.e_places = 5
defaults.gcode.f_places = 1
defaults.gcode.ratio_places = 4

# pipeline
defaults.pipeline.input = None
defaults.pipeline.shape = 'extruded_rectangle'
defaults.pipeline.dimensions = {'width': 170.0, 'depth': 10.0, 'height': 0.6}
defaults.pipeline.field = None
defaults.pipeline.output = None
defaults.pipeline.report = None
defaults.pipeline.optimize = True
defaults.pipeline.compare = False
defaults.pipeline.workers = 1

if __name__ == '__main__':
    print('{!r}'.format(filtering))
    print('{!r}'.format(defaults))
    for name,descriptor,value in fields(defaults):
        print('{:s} = {!r}'.format(name, value))
