"""Printer parameters.

A machine describes the printer that the emitted G-code targets: a nozzle
accepting K filaments through a single exit hole, the deposition geometry,
the rates used for extruding and travelling, and the auxiliary purge. Any
parameter that isn't given at construction is taken from
``config.defaults.machine`` so that a machine is fixed once it has been
created.

    class interface(machine):
        K -- number of filaments
        nozzle_diameter -- also the width of every deposited track
        layer_thickness -- layer thickness T
        ratio_letters -- one G-code word per filament

        def filament_area(self):
            '''Return the cross-section of the filament in mm^2'''
        def volume_to_length(self, volume):
            '''Convert a deposited ``volume`` into a length of filament'''
        def items(self):
            '''Return every parameter as a (name, value) pair'''

Example usage:
    from strata import machine
    m = machine.machine(filaments=5, layer_thickness=0.4)
    print(m.ratio_letters)
"""
import math

from . import config,error
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'machine,parameters'.split(',')

# G-code words that can't carry a ratio
reserved = set('EFGMNTXYZ')

parameters = (
    'filaments', 'nozzle_diameter', 'filament_diameter', 'layer_thickness',
    'volumetric_rate', 'max_feedrate', 'travel_feedrate', 'retraction',
    'retraction_feedrate', 'purge_volume', 'shield_offset',
    'linear_advance_factor', 'minimum_thickness', 'ratio_letters',
)

class machine(object):
    def __init__(self, **attrs):
        res = set(attrs).difference(parameters)
        if res:
            raise error.UserError(self, '__init__', message='Invalid keyword(s) specified. Expected ({!r}) : {!r}'.format(parameters, tuple(sorted(res))))

        # validate each value against the configuration it would be assigned to
        section = type(Config.machine).__properties__
        for name in parameters:
            value = attrs[name] if name in attrs else getattr(Config.machine, name)

            # thicker layers are needed to fit four or five strata
            if name == 'layer_thickness' and name not in attrs and self.filaments >= 4:
                value = max(value, 0.4)
            try:
                value = section[name].check(value)
            except ValueError as e:
                raise error.ValidationError(self, '__init__', message='Parameter {:s} : {!s}'.format(name, e))
            object.__setattr__(self, name, value)

        if self.layer_thickness > self.nozzle_diameter:
            raise error.ValidationError(self, '__init__', message='Layer thickness {:g} exceeds the nozzle diameter {:g}'.format(self.layer_thickness, self.nozzle_diameter))

        letters = self.ratio_letters[:self.K]
        if len(letters) < self.K or len(set(letters)) != len(letters) or reserved.intersection(letters) or not letters.isalpha() or not letters.isupper():
            raise error.ValidationError(self, '__init__', message='Ratio letters {!r} can not name {:d} filaments'.format(self.ratio_letters, self.K))
        object.__setattr__(self, 'ratio_letters', letters)

    def __setattr__(self, name, value):
        raise AttributeError('{:s} is immutable : {:s}'.format(type(self).__name__, name))

    @property
    def K(self):
        return self.filaments

    @property
    def track_width(self):
        return self.nozzle_diameter

    def filament_area(self):
        '''Return the cross-section of the filament in mm^2'''
        return math.pi * (self.filament_diameter / 2.0) ** 2

    def volume_to_length(self, volume):
        '''Convert a deposited ``volume`` in mm^3 into a length of filament in mm'''
        return volume / self.filament_area()

    def length_to_volume(self, length):
        return length * self.filament_area()

    def items(self):
        return [ (name, getattr(self, name)) for name in parameters ]

    def copy(self, **attrs):
        res = dict(self.items())
        res.update(attrs)
        if 'filaments' in attrs and 'ratio_letters' not in attrs:
            res['ratio_letters'] = Config.machine.ratio_letters
        return machine(**res)

    def __eq__(self, other):
        return isinstance(other, machine) and self.items() == other.items()
    def __ne__(self, other):
        return not self == other
    def __hash__(self):
        return hash(tuple(self.items()))

    def shortname(self):
        return 'machine(K={!s})'.format(getattr(self, 'filaments', '?'))

    def __repr__(self):
        return '<{:s} {:s}>'.format(type(self).__name__, ' '.join('{:s}={!r}'.format(k, v) for k, v in self.items()))
