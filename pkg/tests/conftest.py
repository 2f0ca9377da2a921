import numpy as np
import pytest

from strata import field, toolpath, pipeline
from strata import machine as _machine

@pytest.fixture
def machine():
    return _machine.machine()

@pytest.fixture
def rng():
    return np.random.default_rng(1234)

def mixed_layer(mixes, z_top=0.3, thickness=0.3, index=0, spacing=0.25):
    '''Return a resampled layer holding one open path whose vertices carry ``mixes``'''
    mixes = np.asarray(mixes, dtype=float)
    points = np.column_stack((np.arange(len(mixes)) * spacing, np.zeros(len(mixes)), np.full(len(mixes), z_top)))
    return toolpath.layer(index, z_top, thickness, [toolpath.path(points, mixes=mixes)])

def simplex_mixes(corners, count, rng):
    '''Return the ``corners`` followed by ``count`` random mixtures of them'''
    corners = np.asarray(corners, dtype=float)
    weights = rng.dirichlet(np.ones(len(corners)), size=count)
    return np.vstack((corners, weights.dot(corners)))

def compiled(job, source, **attrs):
    '''Return the job optimized, ordered and simplified against the field ``source``'''
    cfg = pipeline.settings(field=source, machine=job.machine, **attrs)
    return pipeline.compile_job(cfg, job=job)

@pytest.fixture
def gradient():
    return field.axis_gradient((0.45, 0.35, 0.2), (0.2, 0.35, 0.45), axis='x', range=(-10.0, 10.0))

@pytest.fixture
def rectangle(machine):
    return toolpath.generate_test_shape('extruded_rectangle', {'width': 20.0, 'depth': 6.0, 'height': 0.6}, machine=machine)
