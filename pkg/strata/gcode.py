"""Mixing G-code emission.

Each layer is printed once per stratum in the order of its plan. While
printing a stratum the nozzle mixes the filaments at the base mixture of
the stratum and rises at every vertex to the top of the strata printed so
far, so that the last stratum ends exactly at the top of the layer. The
flow follows the thickness of the stratum and the feedrate is adjusted to
keep the volumetric extrusion rate constant. Where a stratum vanishes the
deposition is interrupted with a retraction. Before each stratum the new
mixture is purged along an ooze shield surrounding the layer, continuing
along the loop where the previous purge stopped, across layers as well.

    class interface(program):
        lines -- the emitted lines of G-code
        records -- one record per motion
        totals -- per-filament extruded volume in mm^3

        def text(self):
            '''Return the G-code as a single string'''

The emitted dialect is made of the following lines:

    G1 X<f> Y<f> Z<f> E<f> F<f> A<r> B<r> C<r>    ; extrusion
    G1 X<f> Y<f> F<f>                             ; travel
    G1 Z<f> F<f>                                  ; positioning
    G1 E<f> F<f>                                  ; retraction

E is the absolute length of filament, F is in mm/min, and the ratio words
of every extrusion are rounded to 4 decimals summing to exactly one.

Example usage:
    from strata import gcode
    res = gcode.emit_strata(job)
    open('part.gcode', 'wt').write(res.text())
"""
import math,json
import six
import numpy as np
from shapely.geometry import MultiPoint

from . import config,error,utils
from . import toolpath as _toolpath
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'record,program,compute_feedrate,build_ooze_shield,emit_strata,estimate_print_time'.split(',')

class record(object):
    '''One motion of the nozzle'''
    __slots__ = ('kind', 'distance', 'feedrate', 'volume', 'role')
    def __init__(self, kind, distance, feedrate, volume=0.0, role=None):
        self.kind,self.distance,self.feedrate = kind,float(distance),float(feedrate)
        self.volume,self.role = float(volume),role

    def duration(self):
        return self.distance / self.feedrate if self.feedrate > 0 else 0.0

    def __repr__(self):
        return '<record {:s} distance={:.4f} feedrate={:.2f} volume={:.5f}>'.format(self.kind, self.distance, self.feedrate, self.volume)

class program(object):
    """Emitted G-code along with what it deposits.

    ``totals`` is computed from the rendered E words and ratio words, so it
    matches what a parser reads back. ``part_volume`` and ``shield_volume``
    are the exact volumes requested for the part and the ooze shield, and
    ``skipped_volume`` is the part volume of interrupted segments.
    """
    def __init__(self, machine):
        self.machine = machine
        self.lines,self.records = [], []
        self.totals = np.zeros(machine.K)
        self.part_volume = self.shield_volume = self.skipped_volume = 0.0
        self.estimated_time = None

    def text(self):
        return '\n'.join(self.lines) + '\n'

    def extrusions(self):
        return [ item for item in self.records if item.kind == 'extrude' ]

    def usage(self):
        '''Return the volume and the length of every filament'''
        return [ (letter, float(volume), float(self.machine.volume_to_length(volume))) for letter, volume in zip(self.machine.ratio_letters, self.totals) ]

    def shortname(self):
        return 'program[{:d}]'.format(len(self.lines))

    def __repr__(self):
        return '<{:s} totals={!r}>'.format(self.shortname(), self.totals.tolist())

def compute_feedrate(track_width, thickness, machine):
    '''Return the feedrate in mm/s that extrudes at the volumetric rate of ``machine``'''
    if not track_width > 0 or not thickness > 0:
        raise error.UserError(machine, 'compute_feedrate', message='Track of {:g}x{:g} has no cross-section'.format(track_width, thickness))
    return min(machine.volumetric_rate / (track_width * thickness), machine.max_feedrate)

def build_ooze_shield(layer, machine):
    """Return the shield loop around ``layer`` and the length purged along it before each stratum.

    The loop is the convex hull of the layer offset by the shield distance,
    at the top of the layer. Returns None for a layer without toolpaths.
    """
    xy = layer.xy()
    if not len(xy):
        return None
    outline = MultiPoint([tuple(p) for p in xy]).convex_hull.buffer(machine.shield_offset)
    coords = np.array(outline.exterior.coords)[:-1, :2]
    points = np.column_stack((coords, np.full(len(coords), layer.z_top)))
    loop = _toolpath.path(points, closed=True, track_width=machine.track_width, role=config.role.shield)
    return loop, machine.purge_volume / (machine.track_width * layer.thickness)

class writer(object):
    '''Tracks the position of the nozzle while emitting lines into a program'''
    def __init__(self, program):
        self.program,self.machine = program,program.machine
        self.position,self.z = None, None
        self.e,self.rendered = 0.0, 0.0
        self.retracted,self.started = False, False
        self.places = Config.gcode

    def xy(self, value):
        return utils.fixed(value, self.places.xy_places)

    def emit(self, line):
        self.program.lines.append(line)

    def feed(self, rate):
        return utils.fixed(rate * 60.0, self.places.f_places)

    def retract(self):
        if self.retracted or not self.started or not self.machine.retraction > 0:
            return
        self.emit('G1 E{:s} F{:s}'.format(utils.fixed(self.rendered - self.machine.retraction, self.places.e_places), self.feed(self.machine.retraction_feedrate)))
        self.program.records.append(record('retract', self.machine.retraction, self.machine.retraction_feedrate))
        self.retracted = True

    def prime(self):
        if not self.retracted:
            return
        self.emit('G1 E{:s} F{:s}'.format(utils.fixed(self.rendered, self.places.e_places), self.feed(self.machine.retraction_feedrate)))
        self.program.records.append(record('prime', self.machine.retraction, self.machine.retraction_feedrate))
        self.retracted = False

    def lift(self, z):
        if self.z is not None and utils.fixed(z, self.places.z_places) == utils.fixed(self.z, self.places.z_places):
            return
        self.emit('G1 Z{:s} F{:s}'.format(utils.fixed(z, self.places.z_places), self.feed(self.machine.travel_feedrate)))
        self.program.records.append(record('lift', abs(z - (self.z or 0.0)), self.machine.travel_feedrate))
        self.z = z

    def travel(self, x, y, z):
        '''Move to (``x``, ``y``) without extruding and descend or rise to ``z``'''
        here = self.position
        if here is None or self.xy(x) != self.xy(here[0]) or self.xy(y) != self.xy(here[1]):
            self.retract()
            self.emit('G1 X{:s} Y{:s} F{:s}'.format(self.xy(x), self.xy(y), self.feed(self.machine.travel_feedrate)))
            distance = 0.0 if here is None else math.hypot(x - here[0], y - here[1])
            self.program.records.append(record('travel', distance, self.machine.travel_feedrate))
            self.position = x, y
        self.lift(z)
        self.prime()

    def extrude(self, x, y, z, volume, feedrate, ratios, role):
        x0,y0 = self.position
        self.e += self.machine.volume_to_length(volume)
        rendered = utils.fixed(self.e, self.places.e_places)
        delta = float(rendered) - self.rendered
        self.rendered = float(rendered)

        words = [ '{:s}{:s}'.format(letter, utils.fixed(r, self.places.ratio_places)) for letter, r in zip(self.machine.ratio_letters, ratios) ]
        self.emit('G1 X{:s} Y{:s} Z{:s} E{:s} F{:s} {:s}'.format(self.xy(x), self.xy(y), utils.fixed(z, self.places.z_places), rendered, self.feed(feedrate), ' '.join(words)))
        self.program.totals += self.machine.length_to_volume(delta) * np.asarray(ratios)
        distance = math.sqrt((x - x0) ** 2 + (y - y0) ** 2 + (z - (self.z if self.z is not None else z)) ** 2)
        self.program.records.append(record('extrude', distance, feedrate, volume=volume, role=role))
        self.position,self.z,self.started = (x, y), z, True

def walk(loop, position, distance):
    '''Return the points covering ``distance`` along the closed ``loop`` from the arc ``position``, and the final position'''
    points = loop.points
    cumulative = utils.cumulative(points)
    perimeter = cumulative[-1]
    position %= perimeter

    def at(s):
        index = min(int(np.searchsorted(cumulative, s, side='right')) - 1, len(points) - 2)
        t = (s - cumulative[index]) / (cumulative[index + 1] - cumulative[index])
        return points[index] + t * (points[index + 1] - points[index])

    res,remaining = [at(position)], distance
    while remaining > 1e-9:
        index = min(int(np.searchsorted(cumulative, position, side='right')) - 1, len(points) - 2)
        step = min(cumulative[index + 1] - position, remaining)
        position += step
        remaining -= step
        if step > 1e-9:
            res.append(at(position))
        if position >= perimeter - 1e-12:
            position = 0.0
        continue
    return res, position

def __purge(out, loop, cursor, length, ratios, machine, thickness):
    points,cursor = walk(loop, cursor, length)
    feedrate = compute_feedrate(loop.track_width, thickness, machine)
    out.emit(';TYPE:SHIELD')
    out.travel(points[0][0], points[0][1], loop.z)
    for p0, p1 in zip(points, points[1:]):
        volume = loop.track_width * thickness * math.hypot(*(p1[:2] - p0[:2]))
        out.extrude(p1[0], p1[1], loop.z, volume, feedrate, ratios, config.role.shield)
        out.program.shield_volume += volume
    return cursor

def __stratum(out, layer, k, stratum, ratios, machine):
    '''Emit the part of ``layer`` covered by the ``k``-th printed ``stratum``'''
    T,minimum = layer.thickness, machine.minimum_thickness
    order = layer.plan.ordered()
    out.emit(';TYPE:PART')
    for item in layer.toolpaths:
        alphas = item.alphas[:, list(order)]
        if k == len(order) - 1:
            heights = np.full(len(item), layer.z_top)
        else:
            heights = np.clip(layer.base + T * np.cumsum(alphas, axis=1)[:, k], layer.base, layer.z_top)
        volumes = item.volumes(T)[:, stratum]
        thickness = 0.5 * T * (item.alphas[:-1, stratum] + item.alphas[1:, stratum])

        for index in six.moves.range(len(item) - 1):
            if thickness[index] < minimum:
                out.program.skipped_volume += volumes[index]
                continue
            p0,p1 = item.points[index], item.points[index + 1]
            if out.position is None or (p0[0], p0[1]) != tuple(out.position) or out.retracted:
                out.travel(p0[0], p0[1], heights[index])
            elif out.z != heights[index]:
                out.lift(heights[index])
            feedrate = compute_feedrate(item.track_width, thickness[index], machine)
            out.extrude(p1[0], p1[1], heights[index + 1], volumes[index], feedrate, ratios, item.role)
            out.program.part_volume += volumes[index]
        continue
    return

def __header(job, machine):
    res = [ '; strata mixing program', '; machine {:s}'.format(json.dumps(dict(machine.items()), sort_keys=True)) ]
    for item in job.layers:
        plan = item.plan
        res.append('; layer {:d} z_top={:s} S={:d} order={:s} mixtures={:s} volumes={:s}'.format(item.index, utils.fixed(item.z_top, Config.gcode.z_places), plan.S, json.dumps(list(plan.order or ())), json.dumps(np.round(plan.base_mixtures, 6).tolist()), json.dumps(np.round(plan.per_stratum_volume, 6).tolist())))
    return res

def emit_strata(job, machine=None):
    '''Return the program printing the ordered strata of every layer of ``job``'''
    machine = job.machine if machine is None else machine
    for item in job.layers:
        if item.plan is None or item.plan.order is None:
            raise error.PreconditionError(item, 'emit_strata', message='Layer has no ordered strata plan')
        if item.thickness > machine.nozzle_diameter:
            raise error.ValidationError(item, 'emit_strata', message='Layer thickness {:g} exceeds the nozzle diameter {:g}'.format(item.thickness, machine.nozzle_diameter))
        if item.plan.S and item.plan.K != machine.K:
            raise error.ValidationError(item, 'emit_strata', message='Plan mixes {:d} filaments but the machine has {:d}'.format(item.plan.K, machine.K))
        if item.plan.S and any(path.alphas is None or path.alphas.shape[1] != item.plan.S for path in item.toolpaths):
            raise error.PreconditionError(item, 'emit_strata', message='Toolpaths do not carry the thickness of {:d} strata'.format(item.plan.S))
        continue

    res = program(machine)
    out = writer(res)
    res.lines.extend(__header(job, machine))
    res.lines.extend(['G21', 'G90', 'M82', 'M900 K{:s}'.format(utils.fixed(machine.linear_advance_factor, 3)), 'G92 E0'])

    cursor = 0.0
    for item in job.layers:
        plan = item.plan
        if not plan.S:
            continue
        out.emit(';LAYER:{:d}'.format(item.index))
        shield = build_ooze_shield(item, machine)
        for k, stratum in enumerate(plan.ordered()):
            ratios = utils.quantize(plan.base_mixtures[stratum], Config.gcode.ratio_places)
            out.emit(';STRATUM:{:d}'.format(k))
            if shield is not None:
                loop,length = shield
                cursor = __purge(out, loop, cursor, length, ratios, machine, item.thickness)
            __stratum(out, item, k, stratum, ratios, machine)
        Log.debug('emit_strata : {:s} : Emitted {:d} strata'.format(item.shortname(), plan.S))

    out.retract()
    res.estimated_time = estimate_print_time(res)
    for letter, volume, length in res.usage():
        res.lines.append('; filament {:s} used {:s} mm3 {:s} mm'.format(letter, utils.fixed(volume, 5), utils.fixed(length, 5)))
    res.lines.append('; estimated time {:s} s'.format(utils.fixed(res.estimated_time, 1)))
    Log.info('emit_strata : Emitted {:d} lines for {:d} layers'.format(len(res.lines), len(job.layers)))
    return res

def estimate_print_time(program):
    '''Return the time in seconds taken by every motion of ``program`` at its feedrate'''
    return float(sum(item.duration() for item in program.records))

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
    from . import machine as _machine

    @TestCase
    def test_gcode_feedrate():
        m = _machine.machine(volumetric_rate=6.0)
        if abs(compute_feedrate(0.4, 0.3, m) - 50.0) < 1e-9:
            raise Success

    @TestCase
    def test_gcode_feedrate_clamp():
        m = _machine.machine(volumetric_rate=48.0, max_feedrate=150.0)
        if compute_feedrate(0.4, 0.3, m) == 150.0:
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
