class Base(Exception):
    """Root exception type in strata"""
    def __init__(self, *args):
        return super(Base,self).__init__(*args)

    def name(self):
        module = self.__module__
        name = type(self).__name__
        return '.'.join((module,name))

    def __repr__(self):
        return self.__str__()

def objectname(object):
    '''Return a short description of the object an error was raised against'''
    if object is None:
        return '<none>'
    if isinstance(object, type):
        return object.__name__
    res = getattr(object, 'shortname', None)
    return res() if callable(res) else type(object).__name__

### errors caused by something being asked of an object
class RequestError(Base):
    def __init__(self, object, method, message='', **kwds):
        super(RequestError,self).__init__(method, message)
        self.object,self.message = object,message
        self.method = method
        self.attributes = kwds
    def objectname(self):
        return objectname(self.object)
    def methodname(self):
        return str(self.method)
    def __str__(self):
        if self.message:
            return ' : '.join((self.methodname(), self.objectname(), self.message))
        return ' : '.join((self.methodname(), self.objectname()))

class UserError(RequestError, ValueError):
    """Invalid argument passed to an operation"""
class PreconditionError(RequestError):
    """Operation applied to data that is not in the required state"""
class FieldDomainError(RequestError, ValueError):
    """Field sampled outside of the region where it is defined"""
class ValidationError(RequestError, ValueError):
    """Well-formed data violates an invariant"""

### errors that happen while reading input
class InputError(RequestError, ValueError):
    """Input could not be interpreted"""

class ParseError(InputError):
    """Malformed record within a structured input"""
    def __init__(self, source, lineno, message='', **kwds):
        super(ParseError,self).__init__(source, 'parse', message, **kwds)
        self.source,self.lineno = source,lineno
    def objectname(self):
        return '{!s}:{:d}'.format(self.source or '<input>', self.lineno)

class TextureError(InputError):
    """Voxel within a volume texture is invalid"""
    def __init__(self, source, voxel, message='', **kwds):
        super(TextureError,self).__init__(source, 'load_volume_texture', message, **kwds)
        self.source,self.voxel = source,voxel
    def objectname(self):
        return '{!s}[voxel {:d}]'.format(self.source or '<texture>', self.voxel)

### assertion errors. conditions which are excluded upstream
class InternalError(Base, AssertionError):
    def __init__(self, object, method, message='', **kwds):
        super(InternalError,self).__init__(method, message)
        self.object,self.message = object,message
        self.method = method
    def __str__(self):
        if self.message:
            return ' : '.join((str(self.method), objectname(self.object), self.message))
        return ' : '.join((str(self.method), objectname(self.object)))

class DegenerateError(InternalError):
    """Geometry does not span the dimension it was expected to"""

### errors raised by the pipeline
class StageError(Base):
    """Error raised by a pipeline stage, tagged with the stage and layer"""
    def __init__(self, stage, layer, cause):
        super(StageError,self).__init__(stage, layer, cause)
        self.stage,self.layer,self.cause = stage,layer,cause
    def __str__(self):
        if self.layer is None:
            return '{:s} : {:s} : {!s}'.format(self.stage, type(self.cause).__name__, self.cause)
        return '{:s} : layer {:d} : {:s} : {!s}'.format(self.stage, self.layer, type(self.cause).__name__, self.cause)
