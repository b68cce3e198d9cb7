"""
HenonCLI provides one major API method, do_command, which takes a list of
command-line arguments and executes them.

Each of the supported commands corresponds to a method on this class. For
example:

  hd orbit --point 1,1 --fwd 3

results in

  HenonCLI.do_command(['orbit', '--point', '1,1', '--fwd', '3'])
  HenonCLI.do_orbit_command(args)

Results go to stdout as JSON (with a schema_version) or CSV; errors go to
stderr and map onto the exit codes in henondevaney.common.
"""
import argparse
import itertools
import logging
import os
import sys
import textwrap

import argcomplete
import numpy as np
from argcomplete.completers import FilesCompleter

from henondevaney.common import (
    HENONDEVANEY_VERSION,
    NotFoundError,
    UsageError,
    VerificationFailed,
    exception_to_exit_code,
    precondition,
)
from henondevaney.dynamics import boole, coding, curves, decode, verify
from henondevaney.dynamics.coding import WordStatus
from henondevaney.dynamics.core_map import make_point, orbit
from henondevaney.dynamics.scalar import PrecisionMode
from henondevaney.lib import formatting, schemas
from henondevaney.lib.config import OutputFormat, load_config

logger = logging.getLogger(__name__)

DYNAMICS_COMMANDS = ('orbit', 'code', 'curves')

SEARCH_COMMANDS = ('decode', 'periodic', 'boole')

OTHER_COMMANDS = ('verify', 'config', 'help')

BOOLE_OPERATIONS = ('apply', 'code', 'decode', 'check-measure')

# Symbols per boole code run unless --depth is given.
BOOLE_DEPTH = 12

FAMILY_NAMES = {
    'R': curves.CurveFamily.PREIMAGE_OF_Y_ZERO,
    'L': curves.CurveFamily.IMAGE_OF_ANTI_DIAGONAL,
}


class HenonArgumentParser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        # Get a reference to the CLI
        self.cli = kwargs.pop('cli')
        argparse.ArgumentParser.__init__(self, *args, **kwargs)

    def print_help(self, out_file=None):
        if out_file is None:
            out_file = self.cli.stdout
        self._print_message(self.format_help(), out_file)

    def error(self, message):
        self.print_usage(self.cli.stderr)
        if self.cli.headless:
            raise UsageError(message)
        self.exit(2, '%s: error: %s\n' % (self.prog, message))


class Commands(object):
    """
    Class initialized once at interpretation-time that registers all the functions
    for building parsers and actions etc.
    """

    commands = {}

    class Argument(object):
        """
        Container for the arguments that we will eventually pass into
        `ArgumentParser.add_argument`.
        """

        def __init__(self, *args, **kwargs):
            self.args = args
            self.kwargs = kwargs

    class Command(object):
        def __init__(self, name, help, arguments, function):
            self.name = name
            self.help = help if isinstance(help, list) else [help]
            self.arguments = arguments
            self.function = function

    @classmethod
    def command(cls, name, help='', arguments=()):
        """
        Return a decorator function that registers the decoratee as the action function
        for the subcommand defined by the arguments passed here.

        `name`      - name of the subcommand
        `help`      - help string (or list of lines) for the subcommand
        `arguments` - iterable of `Commands.Argument` instances defining the arguments
                      to this subcommand
        """

        def register_command(function):
            cls.commands[name] = cls.Command(name, help, arguments, function)
            return function

        return register_command

    @classmethod
    def help_text(cls, verbose):
        indent = 2
        max_length = max(
            len(command)
            for command in itertools.chain(DYNAMICS_COMMANDS, SEARCH_COMMANDS, OTHER_COMMANDS)
        )

        def command_help_text(command):
            command_obj = cls.commands[command]
            if not verbose:
                return '%s%s%s%s' % (
                    ' ' * indent,
                    command,
                    ' ' * (indent + max_length - len(command)),
                    command_obj.help[0],
                )
            rows = []
            for arg in command_obj.arguments:
                rows.append([', '.join(arg.args), arg.kwargs.get('help', '')])
            width = max([len(row[0]) for row in rows] + [0])
            lines = ['%s%s:' % (' ' * indent, command)]
            lines += [' ' * (indent * 2) + line for line in command_obj.help]
            if rows:
                lines.append(' ' * (indent * 2) + 'Arguments:')
                lines += [
                    (' ' * (indent * 3) + '%-' + str(width) + 's  %s') % (row[0], row[1])
                    for row in rows
                ]
            return '\n'.join(lines) + '\n'

        def command_group_help_text(commands):
            return '\n'.join([command_help_text(command) for command in commands])

        return (
            textwrap.dedent(
                """
        Usage: hd [--verbose] <command> <arguments>

        Commands for orbits, codings and curves:
        {dynamics_commands}

        Commands for searches and the Boole map:
        {search_commands}

        Other commands:
        {other_commands}
        """
            )
            .format(
                dynamics_commands=command_group_help_text(DYNAMICS_COMMANDS),
                search_commands=command_group_help_text(SEARCH_COMMANDS),
                other_commands=command_group_help_text(OTHER_COMMANDS),
            )
            .strip()
        )

    @classmethod
    def build_parser(cls, cli):
        """
        Builds an `ArgumentParser` for the hd program, with all the subcommands registered
        through the `Commands.command` decorator.
        """
        parser = HenonArgumentParser(
            prog='hd', cli=cli, add_help=False, formatter_class=argparse.RawTextHelpFormatter
        )
        parser.add_argument('--version', dest='print_version', action='store_true')
        parser.add_argument(
            '--verbose', dest='log_verbose', action='store_true', help='Log progress to stderr.'
        )
        subparsers = parser.add_subparsers(dest='command', metavar='command')

        for command in cls.commands.values():
            help = '\n'.join(command.help)
            subparser = subparsers.add_parser(
                command.name,
                cli=cli,
                help=help,
                description=help,
                add_help=True,
                formatter_class=argparse.RawTextHelpFormatter,
            )
            for argument in command.arguments:
                argument_kwargs = argument.kwargs.copy()
                completer = argument_kwargs.pop('completer', None)
                added = subparser.add_argument(*argument.args, **argument_kwargs)
                if completer is not None:
                    added.completer = completer
            subparser.set_defaults(function=command.function)

        return parser


# Flags that override RunConfig fields; shared by the commands that compute.
CONFIG_ARGUMENTS = (
    Commands.Argument(
        '--config',
        dest='config_path',
        help='YAML config file (default: $HD_CONFIG).',
        completer=FilesCompleter(),
    ),
    Commands.Argument(
        '--mode',
        dest='precision_mode',
        choices=sorted(PrecisionMode.OPTIONS),
        help='Arithmetic: exact rationals or floats.',
    ),
    Commands.Argument('--epsilon', type=float, help='Float zero threshold.'),
    Commands.Argument('--depth', type=int, help='Maximum number of map iterations.'),
    Commands.Argument('--max-bits', type=int, help='Bit budget for exact rationals.'),
    Commands.Argument(
        '--max-refinements', type=int, help='Refinement budget for searches.'
    ),
    Commands.Argument(
        '--format',
        dest='output_format',
        choices=sorted(OutputFormat.OPTIONS),
        help='Output format.',
    ),
)

_CONFIG_FLAGS = ('precision_mode', 'epsilon', 'depth', 'max_bits', 'max_refinements')


class HenonCLI(object):
    def __init__(self, headless=False, stdout=sys.stdout, stderr=sys.stderr, environ=None):
        self.headless = headless
        self.stdout = stdout
        self.stderr = stderr
        self.environ = os.environ if environ is None else environ

    def exit(self, message, error_code=1):
        """
        Print the message to stderr and exit with the given error code.
        """
        precondition(error_code, 'exit called with error_code == 0')
        print(message, file=self.stderr)
        sys.exit(error_code)

    def emit(self, text):
        print(text, file=self.stdout)

    def emit_document(self, schema, document):
        self.emit(formatting.pretty_json(schema.dump(document)))

    def load_config(self, args, **extra):
        overrides = {key: getattr(args, key, None) for key in _CONFIG_FLAGS}
        overrides['output_format'] = getattr(args, 'output_format', None)
        overrides.update(extra)
        config = load_config(getattr(args, 'config_path', None), self.environ, overrides)
        logger.debug('Running %s with %s', args.command, config)
        return config

    def do_command(self, argv):
        parser = Commands.build_parser(self)

        # Call autocompleter (no side effect if os.environ['_ARGCOMPLETE'] is not set)
        argcomplete.autocomplete(parser)

        if len(argv) > 0 and argv[0] == '--version':
            self.print_version()
            return
        if len(argv) == 0:
            args = parser.parse_args(['help'])
        else:
            args = parser.parse_args(argv)
        if args.log_verbose:
            logging.getLogger('henondevaney').setLevel(logging.DEBUG)
        if getattr(args, 'function', None) is None:
            args = parser.parse_args(['help'])

        try:
            return args.function(self, args)
        except UsageError as e:
            if self.headless:
                raise e
            self.exit('%s: %s' % (e.__class__.__name__, e), exception_to_exit_code(e))

    def print_version(self):
        print('hd version %s' % HENONDEVANEY_VERSION, file=self.stdout)

    @Commands.command(
        'help',
        help=[
            'Show usage information for commands.',
            '  help           : Show brief description for all commands.',
            '  help -v        : Show full usage information for all commands.',
            '  help <command> : Show full usage information for <command>.',
        ],
        arguments=(
            Commands.Argument('command', help='name of command to look up', nargs='?'),
            Commands.Argument(
                '-v', '--verbose', action='store_true', help='Display all options of all commands.'
            ),
        ),
    )
    def do_help_command(self, args):
        if args.command:
            if args.command not in Commands.commands:
                raise UsageError('No such command: %s' % args.command)
            self.do_command([args.command, '--help'])
            return
        self.emit(Commands.help_text(args.verbose))

    @Commands.command(
        'orbit',
        help=[
            'Iterate a point forward and backward and report where the orbit stops.',
            '  orbit --point 1,1 --fwd 3',
            '  orbit --point 1/2,-3/7 --bwd 5 --format csv',
        ],
        arguments=(
            Commands.Argument('--point', required=True, help='Start point x,y (p/q or decimals).'),
            Commands.Argument('--fwd', type=int, default=0, help='Forward steps.'),
            Commands.Argument('--bwd', type=int, default=0, help='Backward steps.'),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_orbit_command(self, args):
        config = self.load_config(args)
        ctx = config.scalar_context()
        if args.fwd < 0 or args.bwd < 0:
            raise UsageError('Step counts must be non-negative')
        p = make_point(*formatting.parse_point(args.point), ctx=ctx)
        record = orbit(p, args.fwd, args.bwd, ctx, max_depth=config.depth)
        if config.output_format == OutputFormat.CSV:
            rows = [(t, q.x, q.y) for t, q in record.items()]
            self.stdout.write(formatting.csv_table('orbit', rows))
            return record
        document = {
            'point': p,
            'points': [{'time': t, 'x': q.x, 'y': q.y} for t, q in record.items()],
            'forward_termination': record.forward_termination._asdict(),
            'backward_termination': record.backward_termination._asdict(),
        }
        self.emit_document(schemas.OrbitSchema(), document)
        return record

    @Commands.command(
        'code',
        help=[
            'Compute the coordinate words and both symbol sequences of a point.',
            '  code --point=-1,1/2 --window 4',
            '  code --point 1/3,2 --mirror --format csv',
        ],
        arguments=(
            Commands.Argument('--point', required=True, help='Point x,y (p/q or decimals).'),
            Commands.Argument('--window', type=int, help='Symbols per side.'),
            Commands.Argument(
                '--mirror', action='store_true', help='Negate every word and symbol.'
            ),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_code_command(self, args):
        config = self.load_config(args, window=args.window)
        ctx = config.scalar_context()
        p = make_point(*formatting.parse_point(args.point), ctx=ctx)
        wi, wj = coding.words(p, config.window, config.depth, ctx)
        seq_i, seq_j = coding.h_from_words(p, wi, wj, config.window, ctx)
        if args.mirror:
            wi, wj, seq_i, seq_j = -wi, -wj, -seq_i, -seq_j
        if config.output_format == OutputFormat.CSV:
            start = -max(len(seq_i.past), len(seq_j.past))
            end = max(len(seq_i.future), len(seq_j.future))
            rows = [
                (t, _symbol_or_none(seq_i, t), _symbol_or_none(seq_j, t))
                for t in range(start, end)
            ]
            self.stdout.write(formatting.csv_table('code', rows))
            return seq_i, seq_j
        document = {
            'point': p,
            'mirror': args.mirror,
            'window': config.window,
            'i_word': wi,
            'j_word': wj,
            'h_i': seq_i,
            'h_j': seq_j,
        }
        self.emit_document(schemas.CodeSchema(), document)
        return seq_i, seq_j

    @Commands.command(
        'curves',
        help=[
            'Sample the exceptional curves of one family at one level, branch by branch.',
            '  curves --family R --level 1 --samples 100',
            '  curves --family L --level 3 --format csv',
        ],
        arguments=(
            Commands.Argument(
                '--family',
                choices=sorted(FAMILY_NAMES),
                required=True,
                help='R: pre-images of {y=0}; L: images of {x+y=0}.',
            ),
            Commands.Argument('--level', type=int, required=True, help='Curve level n >= 1.'),
            Commands.Argument('--samples', type=int, default=100, help='Base samples per branch.'),
            Commands.Argument(
                '--pixel', type=float, default=0.05, help='Refine until points are this close.'
            ),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_curves_command(self, args):
        config = self.load_config(args)
        family = FAMILY_NAMES[args.family]
        if not 1 <= args.level <= config.depth:
            raise UsageError('level must be in 1..%d, got %d' % (config.depth, args.level))
        if args.samples < 1:
            raise UsageError('samples must be positive')
        exported = curves.export_curves(family, args.level, args.samples, args.pixel)
        if config.output_format == OutputFormat.CSV:
            rows = [
                (args.family, args.level, k, branch.side, t, q.x, q.y)
                for k, (branch, pairs) in enumerate(exported)
                for t, q in pairs
            ]
            self.stdout.write(formatting.csv_table('curves', rows))
            return exported
        document = {
            'family': args.family,
            'level': args.level,
            'discontinuity_params': curves.discontinuity_params(args.level).floats(),
            'branches': [
                {
                    'branch': branch.to_dict(),
                    'samples': [{'t': t, 'x': q.x, 'y': q.y} for t, q in pairs],
                }
                for branch, pairs in exported
            ],
        }
        self.emit_document(schemas.CurvesSchema(), document)
        return exported

    def emit_not_found(self, e):
        """
        Print the diagnostics of a failed search to stdout before the error exits.
        """
        document = {
            'error': e.__class__.__name__,
            'message': str(e),
            'diagnostics': e.diagnostics,
        }
        self.emit_document(schemas.NotFoundSchema(), document)

    @Commands.command(
        'decode',
        help=[
            'Find a point whose coordinate words start with the given prefixes.',
            '  decode --iword 1 --jword 1 --box 0,3,0,3',
            '  decode --iword 1,-2 --finite  (a point of the curve R carrying this finite word)',
        ],
        arguments=(
            Commands.Argument('--iword', required=True, help='i-word entries, e.g. 3,-2.'),
            Commands.Argument('--jword', default='', help='j-word prefix entries.'),
            Commands.Argument('--box', help='Search box x_lo,x_hi,y_lo,y_hi.'),
            Commands.Argument(
                '--tolerance',
                type=float,
                default=decode.DEFAULT_TOLERANCE,
                help='Stop once a matching cell is this small.',
            ),
            Commands.Argument(
                '--finite', action='store_true', help='Treat --iword as a finite word.'
            ),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_decode_command(self, args):
        config = self.load_config(args)
        try:
            if args.finite:
                wi = formatting.parse_word(args.iword, WordStatus.FINITE)
                p = decode.curve_point_from_finite_iword(
                    wi, config.bracket_width, config.sweep_bound
                )
                self.emit_document(schemas.CurvePointSchema(), {'i_word': wi, 'point': p})
                return p
            i_prefix = formatting.parse_word(args.iword)
            j_prefix = formatting.parse_word(args.jword)
            box = formatting.parse_box(args.box) if args.box else decode.DEFAULT_BOX
            query = decode.make_query(
                i_prefix, j_prefix, box, args.tolerance, config.max_refinements
            )
            p = decode.cylinder_locate(query, config.epsilon)
        except NotFoundError as e:
            self.emit_not_found(e)
            raise
        document = {
            'i_prefix': i_prefix,
            'j_prefix': j_prefix,
            'search_box': query.search_box,
            'point': p,
            'recoded': decode.cylinder_recodes(p, i_prefix, j_prefix),
        }
        self.emit_document(schemas.CylinderSchema(), document)
        return p

    @Commands.command(
        'periodic',
        help=[
            'Find a periodic point whose i-word repeats the given cycle.',
            '  periodic --icycle 1,-1 --box=-1.5,-0.5,0,1',
        ],
        arguments=(
            Commands.Argument('--icycle', required=True, help='One period of the i-word.'),
            Commands.Argument('--jcycle', help='One period of the j-word (derived if omitted).'),
            Commands.Argument('--box', help='Seed search box x_lo,x_hi,y_lo,y_hi.'),
            Commands.Argument(
                '--repeats', type=int, default=1, help='Periods in the seeding prefix.'
            ),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_periodic_command(self, args):
        config = self.load_config(args)
        i_cycle = formatting.parse_word(args.icycle).entries
        j_cycle = formatting.parse_word(args.jcycle).entries if args.jcycle else None
        box = formatting.parse_box(args.box) if args.box else decode.DEFAULT_BOX
        try:
            candidate = decode.periodic_search(
                i_cycle,
                j_cycle,
                seed_box=box,
                repeats=args.repeats,
                tolerance=config.tolerance,
                max_steps=config.newton_steps,
                max_refinements=config.max_refinements,
            )
        except NotFoundError as e:
            self.emit_not_found(e)
            raise
        self.emit_document(schemas.PeriodicSchema(), {'candidate': candidate.to_dict()})
        return candidate

    @Commands.command(
        'boole',
        help=[
            'Tools for the Boole map B(x) = x - 1/x.',
            '  boole apply --x 2',
            '  boole code --x 7/3 --depth 12',
            '  boole decode --word 2,-1',
            '  boole check-measure --samples 100',
        ],
        arguments=(
            Commands.Argument('operation', choices=BOOLE_OPERATIONS, help='What to compute.'),
            Commands.Argument('--x', help='Point of the line (p/q or decimal).'),
            Commands.Argument('--word', help='Word entries to decode, e.g. 2,-1.'),
            Commands.Argument(
                '--finite', action='store_true', help='Treat --word as a finite word.'
            ),
            Commands.Argument(
                '--samples', type=int, default=100, help='Heights to test (check-measure).'
            ),
            Commands.Argument('--seed', type=int, help='Random seed (check-measure).'),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_boole_command(self, args):
        config = self.load_config(args, seed=args.seed)
        ctx = config.scalar_context()
        operation = args.operation
        if operation in ('apply', 'code') and args.x is None:
            raise UsageError('boole %s needs --x' % operation)
        if operation == 'apply':
            x = ctx.coerce(formatting.parse_scalar(args.x))
            result = {'x': x, 'image': boole.apply_B(x, ctx)}
        elif operation == 'code':
            depth = args.depth if args.depth is not None else BOOLE_DEPTH
            x = ctx.coerce(formatting.parse_scalar(args.x))
            word = boole.b_word(x, depth, ctx)
            seq = boole.h_B(x, depth, ctx)
            if config.output_format == OutputFormat.CSV:
                rows = []
                point = x
                for k, symbol in enumerate(seq.future):
                    rows.append((k, point, symbol))
                    if symbol != 0 and k + 1 < len(seq.future):
                        point = boole.apply_B(point, ctx)
                self.stdout.write(formatting.csv_table('boole', rows))
                return seq
            result = {
                'x': x,
                'depth': depth,
                'word': word.to_dict(),
                'rendered_word': str(word),
                'symbols': list(seq.future),
                'rendered': seq.render(),
            }
        elif operation == 'decode':
            if args.word is None:
                raise UsageError('boole decode needs --word')
            status = WordStatus.FINITE if args.finite else WordStatus.TRUNCATED
            word = formatting.parse_word(args.word, status)
            interval = boole.decode_B(word)
            result = {'word': str(word), 'interval': interval.to_dict()}
        else:
            result = self.check_measure(args.samples, config.seed)
        self.emit_document(schemas.BooleSchema(), {'operation': operation, 'result': result})
        if operation == 'check-measure' and not result['passed']:
            raise VerificationFailed('%d heights failed' % result['failed'])
        return result

    def check_measure(self, samples, seed):
        if samples < 1:
            raise UsageError('samples must be positive')
        rng = np.random.default_rng(seed)
        heights = rng.uniform(-50, 50, samples)
        checks = [boole.measure_preservation_check(float(y)) for y in heights]
        failures = [check.to_dict() for check in checks if not check.passed]
        return {
            'samples': samples,
            'seed': seed,
            'passed': not failures,
            'failed': len(failures),
            'first_failures': failures[:5],
        }

    @Commands.command(
        'verify',
        help=[
            'Run verification suites and print a JSON report; exit 1 if any check fails.',
            '  verify --suite coding --points 50',
            '  verify --suite all --seed 42',
        ],
        arguments=(
            Commands.Argument(
                '--suite', default='all', choices=verify.suite_names(), help='Suite to run.'
            ),
            Commands.Argument(
                '--points',
                type=int,
                default=verify.DEFAULT_POINTS,
                help='Random samples per check.',
            ),
            Commands.Argument('--seed', type=int, help='Random seed.'),
            Commands.Argument(
                '--window', type=int, default=verify.DEFAULT_WINDOW, help='Commutation window.'
            ),
        )
        + CONFIG_ARGUMENTS,
    )
    def do_verify_command(self, args):
        config = self.load_config(args, seed=args.seed)
        report = verify.run_suite(
            args.suite, args.points, config.seed, args.window, config.max_bits
        )
        self.emit_document(schemas.ReportSchema(), report.to_dict())
        if not report.passed:
            raise VerificationFailed(
                '%d of %d checks failed' % (len(report.failures), len(report.results)),
                report=report,
            )
        return report

    @Commands.command(
        'config',
        help=[
            'Print the effective configuration after file, environment and flag overrides.',
            '  config --depth 20',
        ],
        arguments=CONFIG_ARGUMENTS,
    )
    def do_config_command(self, args):
        config = self.load_config(args)
        self.emit_document(schemas.ConfigSchema(), {'config': config.to_dict()})
        return config


def _symbol_or_none(seq, t):
    if t >= 0:
        return seq.future[t] if t < len(seq.future) else None
    return seq.past[-t - 1] if -t - 1 < len(seq.past) else None
