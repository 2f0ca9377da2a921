"""Command-line interface.

Every leaf of ``config.defaults`` is available as a flag named after its
dotted key (``--machine.filaments 4``, ``--pipeline.field field.json``) and
a JSON file given with ``--config`` may assign the same keys, either nested
or dotted. Flags take precedence over the file.

    strata plan -- compile the job into G-code and write the report
    strata optimize -- print the strata plan of every layer
    strata validate FILE -- replay FILE on the virtual printer against the field
    strata stats -- compile with and without optimization and print both reports
    strata gen-test-shape -- write a built-in test shape as a toolpath file

Exit status is 0 on success, 2 when the data violates an invariant or the
deposits exceed the deviation budget, and 3 when the input can not be read.

Example usage:
    $ strata plan --pipeline.field '{"kind": "constant", "mix": [0.2, 0.3, 0.5]}' --pipeline.output part.gcode
    $ strata validate part.gcode --pipeline.field '{"kind": "constant", "mix": [0.2, 0.3, 0.5]}'
"""
import sys,json,logging,argparse,numbers
import six

from . import config,error
from . import pipeline, toolpath
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'main,parser,configure'.split(',')

EXIT_SUCCESS, EXIT_FAILURE, EXIT_VALIDATION, EXIT_INPUT = 0, 1, 2, 3

## converting flag values
def __boolean(string):
    res = string.strip().lower()
    if res in ('1', 'true', 'yes', 'on'):
        return True
    if res in ('0', 'false', 'no', 'off'):
        return False
    raise argparse.ArgumentTypeError('{!r} is not a boolean'.format(string))

def __number(descriptor):
    integral = issubclass(descriptor.__type__, numbers.Integral)
    def convert(string):
        if descriptor.__optional__ and string.strip().lower() == 'none':
            return None
        try:
            return int(string) if integral else float(string)
        except ValueError:
            raise argparse.ArgumentTypeError('{!r} is not {:s} number'.format(string, 'an integral' if integral else 'a'))
    return convert

def __value(descriptor):
    types = descriptor.__type__ if isinstance(descriptor.__type__, tuple) else (descriptor.__type__,)
    def convert(string):
        if type(None) in types and string.strip().lower() == 'none':
            return None
        if dict in types and (string.lstrip().startswith('{') or not any(issubclass(str, item) for item in types)):
            try:
                return json.loads(string)
            except ValueError as e:
                raise argparse.ArgumentTypeError('{!r} is not a JSON object : {!s}'.format(string, e))
        return string
    return convert

def converter(descriptor):
    '''Return the function turning a flag string into a value of ``descriptor``, or None when it has no flag'''
    if hasattr(descriptor, '__option__'):
        return str
    elif hasattr(descriptor, '__range__'):
        return __number(descriptor)
    elif hasattr(descriptor, '__type__'):
        types = descriptor.__type__ if isinstance(descriptor.__type__, tuple) else (descriptor.__type__,)
        if not any(issubclass(item, six.string_types + (dict, type(None))) for item in types):
            return None
        return __value(descriptor)
    return __boolean

## parser
def options(parser, conf=None):
    '''Add one flag to ``parser`` for every configuration leaf of ``conf``'''
    conf = Config if conf is None else conf
    group = parser.add_argument_group('configuration')
    for name, descriptor, value in config.fields(conf):
        convert = converter(descriptor)
        if convert is None:
            continue
        kwds = dict(dest='config:' + name, type=convert, default=argparse.SUPPRESS, metavar=name.rsplit('.', 1)[-1].upper())
        if hasattr(descriptor, '__option__'):
            kwds['choices'] = sorted(descriptor.__option__)
        doc = (descriptor.__doc__ or '').split('\n')[0]
        kwds['help'] = '{:s} (default: {!r})'.format(doc, value) if doc else 'default: {!r}'.format(value)
        group.add_argument('--' + name, **kwds)
    return parser

def parser():
    res = argparse.ArgumentParser(prog='strata', description='Compile toolpaths and a mixture field into mixing-nozzle G-code')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='FILE', help='JSON file of configuration values')
    common.add_argument('-v', '--verbose', action='count', default=0, help='Log more (repeat for debug output)')
    common.add_argument('-q', '--quiet', action='store_true', help='Only log errors')
    options(common)

    commands = res.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True
    commands.add_parser('plan', parents=[common], help='Compile the job into G-code')
    commands.add_parser('optimize', parents=[common], help='Print the strata plan of every layer')
    item = commands.add_parser('validate', parents=[common], help='Replay G-code on the virtual printer')
    item.add_argument('gcode', metavar='FILE', help='G-code file to replay')
    commands.add_parser('stats', parents=[common], help='Report strata and print time with and without optimization')
    commands.add_parser('gen-test-shape', parents=[common], help='Write a built-in test shape as a toolpath file')
    return res

def configure(args):
    '''Return the configuration mapping selected by the file and the flags of ``args``'''
    res = {}
    if args.config:
        try:
            with open(args.config, 'rt') as f:
                mapping = json.load(f)
        except ValueError as e:
            raise error.ParseError(args.config, getattr(e, 'lineno', 1), message='Invalid configuration : {!s}'.format(e))
        if not isinstance(mapping, dict):
            raise error.ParseError(args.config, 1, message='Expected an object but found {:s}'.format(type(mapping).__name__))
        res.update(config.flatten(mapping))
    res.update((name[len('config:'):], value) for name, value in vars(args).items() if name.startswith('config:'))
    return res

def verbosity(args):
    if args.quiet:
        return logging.ERROR
    return (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]

## commands
def __write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'wt') as f:
        f.write(text)
    return

def plan(cfg, args):
    res = pipeline.run_pipeline(cfg)
    if cfg.output is None:
        sys.stdout.write(res.program.text())
    Log.info('plan : {!r}'.format(res))
    return EXIT_SUCCESS

def optimize(cfg, args):
    job = pipeline.optimize_job(cfg)
    layers = [ dict(item.plan.serialize(), index=item.index, z_top=item.z_top) for item in job.layers ]
    __write(json.dumps({'layers': layers, 'total_strata': sum(item['S'] for item in layers)}, indent=2, sort_keys=True) + '\n', cfg.report)
    return EXIT_SUCCESS

def stats(cfg, args):
    res = pipeline.run_pipeline(cfg.copy(compare=True, output=None, report=None))
    __write(json.dumps(res.report, indent=2, sort_keys=True) + '\n', cfg.report)
    return EXIT_SUCCESS

def validate_(cfg, args):
    with pipeline.stage('load'):
        job = pipeline.load_job(cfg)
        field = pipeline.load_field_source(cfg.field, K=job.machine.K)
        with open(args.gcode, 'rt') as f:
            text = f.read()
    res = pipeline.validate_program(text, field, job, source=args.gcode)
    __write('{!s}\n'.format(res), cfg.report)
    if not res.passed(Config.validator.budget):
        Log.error('validate : {:s} : 95th percentile deviation {:.6f} exceeds the budget {:g}'.format(args.gcode, res.p95_dev, Config.validator.budget))
        return EXIT_VALIDATION
    return EXIT_SUCCESS

def gen_test_shape(cfg, args):
    with pipeline.stage('load'):
        job = toolpath.generate_test_shape(cfg.shape, cfg.dimensions, machine=cfg.machine)
    if cfg.output is None:
        toolpath.save_toolpaths(job, sys.stdout)
    else:
        toolpath.save_toolpaths(job, cfg.output)
    return EXIT_SUCCESS

commands = {
    'plan': plan,
    'optimize': optimize,
    'validate': validate_,
    'stats': stats,
    'gen-test-shape': gen_test_shape,
}

def status(exception):
    '''Return the exit status for ``exception``'''
    if isinstance(exception, error.StageError):
        return status(exception.cause)
    if isinstance(exception, (error.InputError, EnvironmentError)):
        return EXIT_INPUT
    if isinstance(exception, error.ValidationError):
        return EXIT_VALIDATION
    return EXIT_FAILURE

def main(argv=None):
    args = parser().parse_args(argv)
    Config.log.setLevel(verbosity(args))
    try:
        mapping = configure(args)
        with config.override(mapping):
            cfg = pipeline.settings()
            return commands[args.command](cfg, args)
    except (error.Base, EnvironmentError) as e:
        Log.fatal('main : {:s} : {!s}'.format(args.command, e))
        return status(e)
    except (AttributeError, ValueError) as e:
        Log.fatal('main : {:s} : Invalid configuration : {!s}'.format(args.command, e))
        return EXIT_INPUT

if __name__ == '__main__':
    sys.exit(main())
