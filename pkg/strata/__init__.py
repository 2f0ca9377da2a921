from . import field,toolpath,optimize,ordering,gcode,validate,pipeline
from . import config,error,utils,machine
Config = config.defaults

__all__ = 'field','toolpath','optimize','ordering','gcode','validate','pipeline','machine','config','error','setlevel','run'

## globally changing how much is logged
def setlevel(level):
    '''Sets the level of the package logger, ``config.defaults.log``'''
    Config.log.setLevel(level)

## running the whole compiler
def run(**attrs):
    '''
    Compiles the job described by the pipeline parameters in ``attrs`` and
    returns the pipeline result. See ``pipeline.settings`` for the parameters.
    '''
    return pipeline.run_pipeline(pipeline.settings(**attrs))

from .toolpath import generate_test_shape,load_toolpaths,save_toolpaths
from .field import sample_field,load_volume_texture
