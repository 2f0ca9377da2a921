"""Compiler pipeline.

The pipeline turns a job and a field into mixing G-code by running each
stage in turn:

    load -- read the toolpath file or generate the test shape, and the field
    resample -- subdivide the toolpaths and sample the field at every vertex
    optimize -- find the strata of every layer (or one stratum per filament)
    order -- order the strata of every layer against the layer below
    simplify -- drop the vertices that the strata thickness does not need
    emit -- write the G-code
    estimate -- compute the print time

Any error raised by a stage is re-raised as an error.StageError carrying the
name of the stage and the index of the layer.

Example usage:
    from strata import pipeline
    res = pipeline.run_pipeline(pipeline.settings(field={'kind': 'constant', 'mix': [0.2, 0.3, 0.5]}))
    print(res.report['total_strata'])
"""
import json,time,contextlib
import six
from concurrent import futures

from . import config,error
from . import field as _field, toolpath, optimize, ordering, gcode, validate
from . import machine as _machine
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'settings,result,run_pipeline,optimize_job,stats_report,load_job,load_field_source'.split(',')

class settings(object):
    """Everything the pipeline needs, read from ``config.defaults`` when not given.

    ``machine`` and ``optimizer`` are constructed from their configuration
    sections unless instances are passed. ``field`` is a field, a field
    description, or the path of a field file.
    """
    parameters = (
        'machine', 'optimizer', 'resample_step', 'xy_tolerance', 'alpha_tolerance', 'seed',
        'input', 'shape', 'dimensions', 'field', 'output', 'report', 'optimize', 'compare', 'workers',
    )
    sections = {
        'resample_step': 'toolpath', 'xy_tolerance': 'toolpath', 'alpha_tolerance': 'toolpath',
        'seed': 'ordering',
    }

    def __init__(self, **attrs):
        res = set(attrs).difference(self.parameters)
        if res:
            raise error.UserError(self, '__init__', message='Invalid keyword(s) specified. Expected ({!r}) : {!r}'.format(self.parameters, tuple(sorted(res))))
        for name in self.parameters[2:]:
            section = getattr(Config, self.sections.get(name, 'pipeline'))
            value = attrs[name] if name in attrs else getattr(section, name)
            if name in attrs and not isinstance(value, _field.base):
                try:
                    value = type(section).__properties__[name].check(value)
                except ValueError as e:
                    raise error.ValidationError(self, '__init__', message='Parameter {:s} : {!s}'.format(name, e))
            object.__setattr__(self, name, value)
        object.__setattr__(self, 'machine', attrs['machine'] if 'machine' in attrs else _machine.machine())
        object.__setattr__(self, 'optimizer', attrs['optimizer'] if 'optimizer' in attrs else optimize.settings())

    def __setattr__(self, name, value):
        raise AttributeError('{:s} is immutable : {:s}'.format(type(self).__name__, name))

    def copy(self, **attrs):
        res = dict((name, getattr(self, name)) for name in self.parameters)
        res.update(attrs)
        return settings(**res)

    def shortname(self):
        return 'pipeline'

    def __repr__(self):
        return '<{:s} {:s}>'.format(type(self).__name__, ' '.join('{:s}={!r}'.format(name, getattr(self, name)) for name in self.parameters))

class result(object):
    '''The job, program and report produced by the pipeline'''
    def __init__(self, job, program, report, field=None, baseline=None):
        self.job,self.program,self.report = job,program,report
        self.field,self.baseline = field,baseline

    def __repr__(self):
        return '<result layers={:d} strata={!r} time={!r}>'.format(len(self.job.layers), self.report.get('total_strata'), self.report.get('estimated_time'))

@contextlib.contextmanager
def stage(name, layer=None):
    '''Re-raise any error of the enclosed stage as a StageError'''
    try:
        yield
    except error.StageError:
        raise
    except (error.Base, ValueError, ArithmeticError, EnvironmentError) as e:
        Log.error('{:s} : {!s} : {!s}'.format(name, 'job' if layer is None else 'layer {:d}'.format(layer), e))
        six.raise_from(error.StageError(name, layer, e), e)
    return

def load_field_source(source, K=None):
    '''Return the field described by ``source``, a field, a description or a path'''
    if isinstance(source, _field.base):
        res = source
    elif isinstance(source, dict):
        res = _field.from_spec(source)
    elif isinstance(source, six.string_types):
        res = _field.load_field(source)
    else:
        raise error.InputError(source, 'load_field_source', message='No field was given')
    if K is not None and res.K != K:
        raise error.ValidationError(res, 'load_field_source', message='Field mixes {:d} filaments but the machine has {:d}'.format(res.K, K))
    return res

def load_job(cfg):
    '''Return the job read from the input file of ``cfg``, or the test shape it describes'''
    if cfg.input is not None:
        res = toolpath.load_toolpaths(cfg.input)
        if res.machine.K != cfg.machine.K:
            res = res.copy(machine=cfg.machine.copy(layer_thickness=res.machine.layer_thickness))
        return res
    return toolpath.generate_test_shape(cfg.shape, cfg.dimensions, machine=cfg.machine)

def __prepare(layer, field, cfg, optimized):
    '''Resample and optimize a single ``layer``'''
    with stage('resample', layer.index):
        layer = toolpath.resample(layer, field, cfg.resample_step)
    with stage('optimize', layer.index):
        plan = optimize.optimize_layer(layer, cfg.optimizer) if optimized else optimize.fixed_plan(layer, field.K)
        return plan.apply(layer)

def prepare_layers(job, field, cfg, optimized=True):
    '''Return the layers of ``job`` resampled and holding their strata plan'''
    if cfg.workers > 1 and len(job.layers) > 1:
        with futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            return list(executor.map(lambda layer: __prepare(layer, field, cfg, optimized), job.layers))
    return [ __prepare(layer, field, cfg, optimized) for layer in job.layers ]

def optimize_job(cfg, job=None, field=None, optimized=None):
    '''Return the job of ``cfg`` with every layer resampled, planned and ordered'''
    optimized = cfg.optimize if optimized is None else optimized
    with stage('load'):
        job = load_job(cfg) if job is None else job
        field = load_field_source(cfg.field if field is None else field, K=job.machine.K)

    job = job.copy(layers=prepare_layers(job, field, cfg, optimized))
    if optimized:
        with stage('order'):
            job = ordering.order_layers(job, seed=cfg.seed)
    return job

def simplify_job(job, cfg):
    layers = []
    for item in job.layers:
        with stage('simplify', item.index):
            if item.plan is None or not item.plan.S:
                layers.append(item)
                continue
            paths = [ toolpath.simplify(path, cfg.xy_tolerance, cfg.alpha_tolerance) for path in item.toolpaths ]
            layers.append(item.copy(toolpaths=paths))
        continue
    return job.copy(layers=layers)

def compile_job(cfg, job=None, field=None, optimized=None):
    '''Run every stage and return the result without writing any file'''
    started = time.time()
    with stage('load'):
        job = load_job(cfg) if job is None else job
        field = load_field_source(cfg.field if field is None else field, K=job.machine.K)
    job = optimize_job(cfg, job=job, field=field, optimized=optimized)
    job = simplify_job(job, cfg)
    with stage('emit'):
        program = gcode.emit_strata(job)
    with stage('estimate'):
        program.estimated_time = gcode.estimate_print_time(program)
    report = stats_report(job, program)
    report['elapsed'] = time.time() - started
    return result(job, program, report, field=field)

def run_pipeline(cfg):
    """Compile the job of ``cfg`` and write the G-code and the report.

    When ``cfg.compare`` is set the job is also compiled without
    optimization and both are reported side by side.
    """
    res = compile_job(cfg)
    if cfg.compare:
        baseline = compile_job(cfg, field=res.field, optimized=not cfg.optimize)
        res.baseline = baseline
        res.report['comparison'] = compare_reports(res.report, baseline.report, optimized=cfg.optimize)

    if cfg.output is not None:
        with stage('write'):
            with open(cfg.output, 'wt') as f:
                f.write(res.program.text())
        Log.info('run_pipeline : Wrote {:d} lines to {:s}'.format(len(res.program.lines), cfg.output))
    if cfg.report is not None:
        with stage('write'):
            with open(cfg.report, 'wt') as f:
                json.dump(res.report, f, indent=2, sort_keys=True)
    return res

def compare_reports(report, baseline, optimized=True):
    '''Return the strata counts and print times of the optimized and the unoptimized compilations'''
    ours,theirs = (report, baseline) if optimized else (baseline, report)
    return {
        'strata': {'optimized': ours['total_strata'], 'unoptimized': theirs['total_strata']},
        'estimated_time': {'optimized': ours['estimated_time'], 'unoptimized': theirs['estimated_time']},
        'optimizer_time': ours['optimizer_time'],
    }

def stats_report(job, program):
    '''Return the strata, timings and filament usage of a compiled job as a JSON-compatible mapping'''
    scores = ordering.layer_score(job)
    layers = []
    for item, score in zip(job.layers, scores):
        plan = item.plan
        res = {'index': item.index, 'z_top': item.z_top, 'score': score}
        res.update(plan.serialize() if plan is not None else {'S': 0})
        layers.append(res)

    usage = program.usage()
    return {
        'layers': layers,
        'total_strata': int(sum(item['S'] for item in layers)),
        'optimizer_time': float(sum(item.get('elapsed', 0.0) for item in layers)),
        'total_score': float(sum(score for score in scores if score is not None)),
        'estimated_time': program.estimated_time if program.estimated_time is not None else gcode.estimate_print_time(program),
        'filament_volume': dict((letter, volume) for letter, volume, _ in usage),
        'filament_length': dict((letter, length) for letter, _, length in usage),
        'part_volume': program.part_volume,
        'shield_volume': program.shield_volume,
    }

def validate_program(text, field, job, cell_size=None, source=None):
    '''Return the report comparing the deposits of the G-code ``text`` with ``field``'''
    with stage('validate'):
        moves = validate.parse_gcode(text, letters=job.machine.ratio_letters, source=source)
        deposit = validate.simulate_deposition(moves, job.machine, cell_size=cell_size, job=job)
        return validate.compare_to_field(deposit, field, job)
