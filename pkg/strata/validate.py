"""Virtual printer.

The validator reads emitted G-code back, deposits the filament of every
extruding move into a grid of cells per layer, and compares the effective
mixture of each cell (the accumulated volume of every filament divided by
the total) with the field the program was compiled from.

    class interface(grid):
        cell_size -- edge of a cell in mm
        cells -- mapping of (ix, iy, layer) to the volume of every filament in the part
        shield -- the same mapping for the ooze shield

        def total(self):
            '''Return the volume of every filament over all cells'''

Example usage:
    from strata import validate
    moves = validate.parse_gcode(text)
    deposit = validate.simulate_deposition(moves, job.machine, job=job)
    print(validate.compare_to_field(deposit, field, job).serialize())
"""
import math,re,json

import numpy as np

from . import config,error
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'move,parse_gcode,grid,simulate_deposition,report,compare_to_field'.split(',')

word = re.compile(r'^([A-Z])([-+]?(?:\d+\.?\d*|\.\d+))$')

class move(object):
    '''A parsed motion from ``start`` to ``end``'''
    __slots__ = ('lineno', 'kind', 'start', 'end', 'e', 'delta', 'feedrate', 'ratios', 'role', 'stratum')
    def __init__(self, lineno, kind, start, end, e, delta, feedrate, ratios, role, stratum=0):
        self.lineno,self.kind = lineno,kind
        self.start,self.end = start,end
        self.e,self.delta = e,delta
        self.feedrate,self.ratios,self.role = feedrate,ratios,role
        self.stratum = stratum

    @property
    def extruding(self):
        return self.kind == 'extrude' and self.delta > 0

    def __repr__(self):
        return '<move:{:d} {:s} {!r} -> {!r} E={:.5f} ratios={!r} {!s}>'.format(self.lineno, self.kind, self.start, self.end, self.e, self.ratios, self.role)

def __words(text, source, lineno):
    res = []
    for token in text.split():
        match = word.match(token)
        if match is None:
            raise error.ParseError(source, lineno, message='Malformed word {!r}'.format(token))
        res.append((match.group(1), float(match.group(2))))
    return res

def parse_gcode(text, letters=None, source=None):
    """Return the list of motions in the G-code ``text``.

    Positions are absolute and E is the absolute filament length. Ratio
    words use ``letters`` (the configured ratio letters by default), must be
    non-negative, and must sum to one within 1e-4. Ratios carry over to the
    following lines until replaced. Every ;STRATUM: comment starts a new
    pass, counted by the ``stratum`` of the following moves.
    """
    letters = Config.machine.ratio_letters if letters is None else letters
    lines = text.decode('utf-8') if isinstance(text, bytes) else text
    res = []
    x = y = z = 0.0
    e,feedrate,ratios,role,stratum = 0.0, None, None, 'part', 0
    for lineno, line in enumerate(lines.splitlines(), 1):
        code,_,comment = line.partition(';')
        if comment.startswith('STRATUM:'):
            stratum += 1
        elif comment.startswith('TYPE:'):
            role = comment[len('TYPE:'):].strip().lower()
        code = code.strip().upper()
        if not code:
            continue
        items = __words(code, source, lineno)
        (letter,number),items = items[0],items[1:]
        command = '{:s}{:d}'.format(letter, int(number))

        if command in ('G21', 'G90', 'M82'):
            if items:
                raise error.ParseError(source, lineno, message='Unexpected word(s) for {:s}'.format(command))
            continue
        elif command == 'M900':
            if any(name != 'K' for name, _ in items):
                raise error.ParseError(source, lineno, message='Unknown word for {:s}'.format(command))
            continue
        elif command == 'G92':
            for name, value in items:
                if name != 'E':
                    raise error.ParseError(source, lineno, message='Only E can be reset by {:s}'.format(command))
                e = value
            continue
        elif command not in ('G0', 'G1'):
            raise error.ParseError(source, lineno, message='Unsupported command {:s}'.format(command))

        values,mix = {}, {}
        for name, value in items:
            if name in 'XYZEF':
                values[name] = value
            elif name in letters:
                mix[name] = value
            else:
                raise error.ParseError(source, lineno, message='Unknown word {:s}'.format(name))
            continue
        if mix:
            weights = np.array([mix.get(letter, 0.0) for letter in letters[:max(letters.index(name) for name in mix) + 1]])
            if weights.min() < 0 or abs(weights.sum() - 1.0) > 1e-4:
                raise error.ParseError(source, lineno, message='Ratio words {!r} are not a mixing ratio (sum={:.6g})'.format(tuple(weights), weights.sum()))
            ratios = tuple(weights)
        if 'F' in values:
            feedrate = values['F'] / 60.0

        start = (x, y, z)
        x,y,z = values.get('X', x), values.get('Y', y), values.get('Z', z)
        delta = values['E'] - e if 'E' in values else 0.0
        e = values.get('E', e)
        planar = 'X' in values or 'Y' in values
        if planar and delta < 0:
            raise error.ParseError(source, lineno, message='Extruding move decreases E by {:g}'.format(-delta))
        if planar and delta > 0:
            if ratios is None:
                raise error.ParseError(source, lineno, message='Extruding move without a mixing ratio')
            kind = 'extrude'
        elif planar:
            kind = 'travel'
        elif 'E' in values:
            kind = 'retract'
        else:
            kind = 'lift'
        res.append(move(lineno, kind, start, (x, y, z), e, delta, feedrate, ratios if kind == 'extrude' else None, role, stratum))
    Log.debug('parse_gcode : {!s} : Parsed {:d} moves'.format(source or '<input>', len(res)))
    return res

class grid(object):
    '''Volume of every filament accumulated per cell of every layer'''
    def __init__(self, cell_size, K):
        self.cell_size,self.K = float(cell_size), int(K)
        self.cells,self.shield = {}, {}

    def total(self):
        res = np.zeros(self.K)
        for cells in (self.cells, self.shield):
            for value in cells.values():
                res += value
            continue
        return res

    def layers(self):
        return sorted({key[2] for key in self.cells})

    def center(self, key):
        ix,iy,_ = key
        return (ix + 0.5) * self.cell_size, (iy + 0.5) * self.cell_size

    def shortname(self):
        return 'grid({:g}mm, {:d}+{:d} cells)'.format(self.cell_size, len(self.cells), len(self.shield))

    def __repr__(self):
        return '<{:s}>'.format(self.shortname())

def __layer_of(z, job, thickness):
    '''Return the position of the layer containing ``z`` and the height of its bottom'''
    if job is not None:
        index = job.locate(z)
        return index, job.layers[index].base
    index = int(math.ceil(z / thickness - 1e-6)) - 1
    if index < 0:
        raise error.ValidationError(None, 'simulate_deposition', message='Height {:g} is not within any layer'.format(z))
    return index, index * thickness

def __raise_surface(tops, pending):
    for key, (total, pieces, base) in pending.items():
        tops[key] = max(tops.get(key, base), total / pieces)
    pending.clear()

def simulate_deposition(moves, machine, cell_size=None, job=None):
    """Return the grid of the volume deposited by every extruding move.

    Each move is split into pieces no longer than half a cell. The filament
    of a move is shared between its pieces in proportion to the gap between
    the nozzle and the surface left by the previous passes in the cell
    holding the middle of each piece, or equally when the nozzle never rises
    above that surface. The surface of a cell is raised to the average
    height of the pieces a pass deposits in it. A move belongs to the layer
    containing the highest of its two heights, from the layers of ``job``
    when given or from the layer thickness of ``machine``.
    """
    cell_size = Config.validator.cell_size if cell_size is None else cell_size
    res = grid(cell_size, machine.K)
    keys,volumes,shield = [], [], []
    tops,pending,current = {}, {}, None
    for item in moves:
        if not item.extruding:
            continue
        if item.stratum != current:
            __raise_surface(tops, pending)
            current = item.stratum
        try:
            layer,base = __layer_of(max(item.start[2], item.end[2]), job, machine.layer_thickness)
        except error.ValidationError as e:
            raise error.ValidationError(item, 'simulate_deposition', message='Line {:d} : {!s}'.format(item.lineno, e.message))
        x0,y0,z0 = item.start
        x1,y1,z1 = item.end
        count = max(1, int(math.ceil(math.hypot(x1 - x0, y1 - y0) / (0.5 * cell_size))))
        t = (np.arange(count) + 0.5) / count
        ix = np.floor((x0 + t * (x1 - x0)) / cell_size).astype(int)
        iy = np.floor((y0 + t * (y1 - y0)) / cell_size).astype(int)
        z = z0 + t * (z1 - z0)
        cells = [ (int(a), int(b), layer) for a, b in zip(ix, iy) ]

        surface = np.array([tops.get(key, base) for key in cells])
        gap = np.clip(z - surface, 0.0, None)
        weights = gap / gap.sum() if gap.sum() > 1e-12 else np.full(count, 1.0 / count)
        for key, height in zip(cells, z):
            total,pieces,_ = pending.get(key, (0.0, 0, base))
            pending[key] = total + height, pieces + 1, base

        keys.append(np.column_stack((ix, iy, np.full(count, layer))))
        ratios = np.zeros(machine.K)
        ratios[:len(item.ratios)] = item.ratios
        volumes.append(weights[:, None] * (machine.length_to_volume(item.delta) * ratios)[None])
        shield.append(np.full(count, item.role == config.role.shield))

    if not keys:
        return res
    keys,volumes,shield = np.vstack(keys), np.vstack(volumes), np.concatenate(shield)
    for mask, cells in ((~shield, res.cells), (shield, res.shield)):
        if not np.any(mask):
            continue
        unique,inverse = np.unique(keys[mask], axis=0, return_inverse=True)
        sums = np.zeros((len(unique), machine.K))
        np.add.at(sums, inverse.reshape(-1), volumes[mask])
        cells.update((tuple(int(n) for n in key), value) for key, value in zip(unique, sums))
    Log.info('simulate_deposition : Deposited {:d} part cells and {:d} shield cells'.format(len(res.cells), len(res.shield)))
    return res

class report(object):
    '''Deviation between the deposited mixtures and the field'''
    def __init__(self, deviations, layers, excluded=0):
        deviations = np.asarray(deviations, dtype=float)
        self.cells,self.excluded = len(deviations), int(excluded)
        self.max_dev,self.p95_dev,self.mean_dev = self.summary(deviations)
        self.per_layer = []
        for index in sorted(layers):
            values = np.asarray(layers[index], dtype=float)
            maximum,p95,mean = self.summary(values)
            self.per_layer.append({'layer': index, 'cells': len(values), 'max_dev': maximum, 'p95_dev': p95, 'mean_dev': mean})
        return

    @staticmethod
    def summary(values):
        if not len(values):
            return 0.0, 0.0, 0.0
        return float(values.max()), float(np.percentile(values, 95)), float(values.mean())

    def passed(self, budget=None):
        budget = Config.validator.budget if budget is None else budget
        return self.p95_dev <= budget

    def serialize(self):
        return {'cells': self.cells, 'excluded': self.excluded, 'max_dev': self.max_dev, 'p95_dev': self.p95_dev, 'mean_dev': self.mean_dev, 'per_layer': self.per_layer}

    def __str__(self):
        return json.dumps(self.serialize(), indent=2, sort_keys=True)

    def __repr__(self):
        return '<report cells={:d} max_dev={:.6f} p95_dev={:.6f}>'.format(self.cells, self.max_dev, self.p95_dev)

def compare_to_field(grid, field, job, margin=None):
    """Return the deviation of every part cell of ``grid`` from ``field``.

    The deviation of a cell is the largest difference between a component
    of its effective mixture and the field at the center of the cell at
    the middle of its layer. Cells closer than ``margin`` (the nozzle
    diameter by default) to a discontinuity of the field are excluded.
    """
    margin = job.machine.nozzle_diameter if margin is None else margin
    keys = [ key for key, value in sorted(grid.cells.items()) if value.sum() > 0 ]
    if not keys:
        return report([], {})
    volumes = np.array([grid.cells[key] for key in keys])
    effective = volumes / volumes.sum(axis=1, keepdims=True)
    centers = np.array([ grid.center(key) + (job.layers[key[2]].middle,) for key in keys ])

    expected = field.sample_many(centers)
    deviations = np.abs(effective - expected[:, :effective.shape[1]]).max(axis=1)
    included = field.discontinuity(centers) >= margin

    layers = {}
    for key, deviation in zip(np.array(keys)[included], deviations[included]):
        layers.setdefault(int(key[2]), []).append(deviation)
    res = report(deviations[included], layers, excluded=int((~included).sum()))
    Log.info('compare_to_field : {!r}'.format(res))
    return res

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
    def test_validate_example_line():
        res = parse_gcode('G1 X0 Y0 Z3.0\nG1 X10.0 Y12.0 Z3.0 E20.5 A0.2 B0.3 C0.5\n')
        if res[-1].end == (10.0, 12.0, 3.0) and res[-1].e == 20.5 and res[-1].ratios == (0.2, 0.3, 0.5):
            raise Success

    @TestCase
    def test_validate_bad_ratio():
        try:
            parse_gcode('G1 X0 Y0 Z0.3\nG1 X1 Y0 E1 A0.5 B0.6 C0.5\n')
        except error.ParseError:
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
