"""
Named suites of checks over the whole package. Each suite returns a
VerificationReport listing CheckResults; random inputs come from a seeded
numpy Generator so a (suite, seed) pair always reproduces the same report.

Suites are registered with the @suite decorator; 'all' runs every one of them
in registration order.
"""
import logging
import math
from collections import OrderedDict
from fractions import Fraction

import numpy as np

from henondevaney.common import (
    BranchNotFound,
    DiscontinuityHit,
    ExhaustedWord,
    NotFoundError,
    PreconditionViolation,
    ResourceLimitError,
    UsageError,
)
from henondevaney.dynamics import boole, coding, core_map, curves, decode
from henondevaney.dynamics.coding import WordStatus, make_word
from henondevaney.dynamics.report import CheckResult
from henondevaney.dynamics.scalar import (
    DEFAULT_MAX_BITS,
    FLOAT,
    PrecisionMode,
    ScalarContext,
    bit_length,
)

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 20
DEFAULT_WINDOW = 3
# The commutation sweep redraws skipped points up to this many times per point.
SWEEP_ATTEMPTS_PER_POINT = 20
SWEEP_MAX_DENOMINATOR = 4
# Exact heights grow by about this factor per step of f.
HEIGHT_GROWTH = 2.62
CURVE_LEVELS = 6
CURVE_SAMPLES = 100
BOOLE_EXACT_DEPTH = 15
BOOLE_FLOAT_DEPTH = 15
DECODE_PREFIX_RUNS = (2, 4)
DECODE_WORD_DEPTH = 40

_T = WordStatus.TRUNCATED
_F = WordStatus.FINITE

# (i-word, j-word, h_i render, h_j render); None where only h_i is pinned down.
GOLDEN_RENDERS = [
    (
        ((3, -2), _T),
        ((1, -4), _T),
        '... -2 -2 -2 -1 2 ; 2 2 1 -2 -1 ...',
        '... -1 -2 -2 -2 ; 1 2 2 2 -1 -2 ...',
    ),
    (
        ((-1, 3, -1), _T),
        ((-1, 2), _T),
        '... 2 1 -2 ; -1 2 2 1 -1 ...',
        '... 1 2 ; -1 -2 1 2 2 -1 ...',
    ),
    (
        ((3, -2), _T),
        ((-1, 4), _T),
        '... 2 2 2 1 -1 ; 2 2 1 -2 -1 ...',
        '... 1 2 2 2 ; -1 1 2 2 -1 -2 ...',
    ),
    (((3,), _F), ((1, -4), _T), '... -2 -2 -2 -1 2 ; 2 2 0', None),
    (((3, -2), _T), ((1, -4), _F), '0 -2 -2 -2 -1 2 ; 2 2 1 -2 -1 ...', None),
    (((3,), _F), ((1, -4), _F), '0 -2 -2 -2 -1 2 ; 2 2 0', None),
]

# (i-word, j-word, i codes, j codes) after two coordinate steps.
CODING_TABLE = [
    ((3, -2), (1, -4), (2, 2, 1), (1, 2, 2)),
    ((-1, 3, -1), (-1,), (-1, 2, 2), (-1, -2, 1)),
    ((-1, 1, -1), (-1,), (-1, 1, -1), (-1, -2, 1)),
    ((3, -2), (3, -4), (2, 2, 1), (2, 2, 2)),
    ((3, -2), (-1, 4), (2, 2, 1), (-1, 1, 2)),
]

# Listed so that reports come out in a fixed order.
CURVE_FAMILIES = (
    curves.CurveFamily.PREIMAGE_OF_Y_ZERO,
    curves.CurveFamily.IMAGE_OF_ANTI_DIAGONAL,
)

PERIOD_TWO_POINT = (-1.0, 0.5)
PERIOD_TWO_SEED_BOX = (-1.5, -0.5, 0.0, 1.0)


class VerificationReport(object):
    def __init__(
        self,
        suite,  # type: str
        seed,  # type: int
        results,  # type: List[CheckResult]
    ):
        self.suite = suite
        self.seed = seed
        self.results = results

    @property
    def failures(self):
        return [r for r in self.results if not r.passed and not r.informational]

    @property
    def passed(self):
        return not self.failures

    def counts(self):
        return {
            'total': len(self.results),
            'passed': sum(1 for r in self.results if r.passed and not r.informational),
            'failed': len(self.failures),
            'informational': sum(1 for r in self.results if r.informational),
        }

    def to_dict(self):
        return {
            'suite': self.suite,
            'seed': self.seed,
            'passed': self.passed,
            'counts': self.counts(),
            'results': [r.to_dict() for r in self.results],
        }


class SuiteContext(object):
    """
    Inputs shared by every check of a run.
    """

    def __init__(self, seed, points, window, max_bits):
        self.seed = seed
        self.points = points
        self.window = window
        self.rng = np.random.default_rng(seed)
        self.exact = ScalarContext(PrecisionMode.EXACT, max_bits=max_bits)

    def rationals(self, count, bound=3, max_denominator=10):
        values = []
        for _ in range(count):
            q = int(self.rng.integers(1, max_denominator + 1))
            p = int(self.rng.integers(-bound * q, bound * q + 1))
            values.append(Fraction(p, q))
        return values

    def rational_points(self, count, bound=3, max_denominator=10):
        """
        Points with y != 0, so that f is defined at each of them.
        """
        points = []
        while len(points) < count:
            x, y = self.rationals(2, bound, max_denominator)
            if y != 0:
                points.append(core_map.Point(x, y))
        return points


SUITES = OrderedDict()


def suite(name):
    def decorator(function):
        SUITES[name] = function
        return function

    return decorator


def _tally(name, outcomes, details=None, min_checked=0):
    """
    Fold per-sample booleans (None for skipped) into one CheckResult. Skipped
    samples are not passes: the result fails unless at least `min_checked`
    samples were actually checked.
    """
    failures = [witness for witness, ok in outcomes if ok is False]
    checked = sum(1 for _, ok in outcomes if ok is not None)
    details = dict(details or {})
    details.update(
        {
            'samples': len(outcomes),
            'checked': checked,
            'required': min_checked,
            'skipped': len(outcomes) - checked,
            'failed': len(failures),
            'first_failures': failures[:5],
        }
    )
    if checked < min_checked:
        logger.info('%s: only %d of %d required samples checked', name, checked, min_checked)
    return CheckResult(name, not failures and checked >= min_checked, details)


@suite('core')
def core_suite(ctx):
    determinants, round_trips, mirrors = [], [], []
    for p in ctx.rational_points(ctx.points):
        witness = [p.x, p.y]
        try:
            jac = core_map.jacobian(p, ctx.exact)
            determinants.append((witness, core_map.determinant(jac) == 1))
            image = core_map.apply_f(p, ctx.exact)
            round_trips.append((witness, core_map.apply_f_inv(image, ctx.exact) == p))
            mirrors.append((witness, core_map.apply_f(-p, ctx.exact) == -image))
        except ResourceLimitError:
            round_trips.append((witness, None))
    return [
        _tally('determinant_is_one', determinants),
        _tally('inverse_round_trip', round_trips),
        _tally('mirror_symmetry', mirrors),
    ]


def _identity_outcomes(check, ctx, max_level):
    outcomes = []
    for t in ctx.rationals(ctx.points):
        for n in range(1, max_level + 1):
            try:
                outcomes.append(([n, t], check(n, t, ctx.exact)))
            except (DiscontinuityHit, ResourceLimitError):
                outcomes.append(([n, t], None))
    return outcomes


@suite('curves')
def curves_suite(ctx):
    results = []

    level_two = curves.discontinuity_params(2)
    expected = [-1 / math.sqrt(2), 0.0, 1 / math.sqrt(2)]
    results.append(
        CheckResult(
            'discontinuity_set_level_2',
            len(level_two) == 3
            and all(abs(a - b) <= 1e-9 for a, b in zip(level_two.floats(), expected)),
            {'params': level_two.floats(), 'expected': expected},
        )
    )

    results.append(
        _tally(
            'anti_diagonal_identity',
            _identity_outcomes(curves.anti_diagonal_identity_check, ctx, 8),
        )
    )
    results.append(
        _tally('telescoped_x', _identity_outcomes(curves.telescoped_x_check, ctx, 8))
    )

    heights = [float(c.y) for c in curves.zero_crossing_sequence(10, ctx=FLOAT)]
    results.append(
        CheckResult(
            'zero_crossings_increasing',
            abs(heights[0] - 1) <= 1e-9 and all(b > a for a, b in zip(heights, heights[1:])),
            {'heights': heights},
        )
    )

    d_heights = [height for _, height in curves.d_curve_heights(6)]
    results.append(
        CheckResult(
            'd_curve_heights_decreasing',
            d_heights[0] < 1 and all(b < a for a, b in zip(d_heights, d_heights[1:])),
            {'heights': d_heights},
        )
    )

    for family in CURVE_FAMILIES:
        outcomes = []
        for level in range(1, CURVE_LEVELS + 1):
            for branch in curves.branches(family, level):
                check = curves.monotonicity_check(
                    family, level, branch, samples=CURVE_SAMPLES, ctx=FLOAT
                )
                outcomes.append((check.details, check.passed))
        results.append(
            _tally(
                'monotonicity',
                outcomes,
                {'family': family, 'levels': CURVE_LEVELS, 'samples_per_branch': CURVE_SAMPLES},
            )
        )
        for level in range(2, CURVE_LEVELS + 1):
            results.append(
                curves.disjointness_check(level, samples=CURVE_SAMPLES, family=family)
            )

    results.append(curves.t0_check())
    results.append(CheckResult('t0_closed_form', True, {'note': curves.T0_NOTE}, True))

    for t_d in [-math.inf] + list(level_two.params) + [math.inf]:
        for side in ('left', 'right'):
            if (t_d == -math.inf and side == 'left') or (t_d == math.inf and side == 'right'):
                continue
            results.append(curves.boundary_limits_check(2, t_d, side))
    return results


def _word(pair):
    entries, status = pair
    return make_word(entries, status)


@suite('coding')
def coding_suite(ctx):
    results = []
    for wi_spec, wj_spec, i_render, j_render in GOLDEN_RENDERS:
        wi, wj = _word(wi_spec), _word(wj_spec)
        seq_i, seq_j = coding.full_sequences(wi, wj)
        cases = [('h_i', seq_i.render(), i_render)]
        if j_render is not None:
            cases.append(('h_j', seq_j.render(), j_render))
        for name, observed, expected in cases:
            results.append(
                CheckResult(
                    'golden_%s' % name,
                    observed == expected,
                    {'words': [str(wi), str(wj)], 'observed': observed, 'expected': expected},
                )
            )

    for i_entries, j_entries, i_codes, j_codes in CODING_TABLE:
        rows = coding.coordinate_codings(make_word(i_entries), make_word(j_entries), steps=2)
        observed = ' -> '.join(
            '(%s,%s)' % (''.join(str(abs(s)) for s in i), ''.join(str(abs(s)) for s in j))
            for i, j in rows
        )
        results.append(
            CheckResult(
                'coding_table',
                rows[-1] == (i_codes, j_codes),
                {
                    'words': [list(i_entries), list(j_entries)],
                    'codes': observed,
                    'expected': [list(i_codes), list(j_codes)],
                },
            )
        )

    results.append(_commutation_sweep(ctx))
    return results


def _depth_within_budget(p, max_bits):
    """
    The longest orbit from p whose exact heights should stay within max_bits.
    Words that need more steps are skipped rather than computed.
    """
    if max_bits is None:
        return None
    height = max(bit_length(p.x), bit_length(p.y))
    if max_bits <= height:
        return 1
    return max(1, int(math.log(max_bits / height) / math.log(HEIGHT_GROWTH)))


def _commutation_sweep(ctx):
    """
    Exact commutation on low-height rational points. Points the bit budget or
    the discontinuities rule out are redrawn until ctx.points of them have been
    checked or the attempts run out.
    """
    outcomes = []
    checked = attempts = 0
    while checked < ctx.points and attempts < SWEEP_ATTEMPTS_PER_POINT * ctx.points:
        attempts += 1
        p = ctx.rational_points(1, max_denominator=SWEEP_MAX_DENOMINATOR)[0]
        witness = [p.x, p.y]
        depth = _depth_within_budget(p, ctx.exact.max_bits)
        try:
            result = coding.verify_commutation(p, ctx.window, depth, ctx.exact)
        except ResourceLimitError:
            outcomes.append((witness, None))
            continue
        except PreconditionViolation as e:
            outcomes.append(({'point': witness, 'error': str(e)}, False))
            checked += 1
            continue
        if result.informational:
            outcomes.append((witness, None))
            continue
        outcomes.append((witness, result.passed))
        checked += 1
    return _tally(
        'commutation_sweep',
        outcomes,
        {'window': ctx.window, 'attempts': attempts},
        min_checked=ctx.points,
    )


@suite('boole')
def boole_suite(ctx):
    xs = [x for x in ctx.rationals(ctx.points, bound=10) if x != 0]

    required = max(1, len(xs) // 2)

    exact = []
    for x in xs:
        try:
            result = boole.boole_commutation(x, BOOLE_EXACT_DEPTH, ctx.exact)
        except ResourceLimitError:
            exact.append(([x], None))
            continue
        exact.append(([x], None if result.informational else result.passed))
    floats = []
    for x in ctx.rng.uniform(-50, 50, ctx.points):
        result = boole.boole_commutation(float(x), BOOLE_FLOAT_DEPTH, FLOAT)
        floats.append(([float(x)], None if result.informational else result.passed))

    round_trips = []
    for x in xs:
        try:
            result = boole.decode_round_trip_check(x)
        except ExhaustedWord:
            round_trips.append(([x], None))
            continue
        round_trips.append((result.details, result.passed))

    measure = [
        ([float(y)], boole.measure_preservation_check(float(y)).passed)
        for y in ctx.rng.uniform(-50, 50, 100)
    ]
    return [
        _tally(
            'boole_commutation_exact',
            exact,
            {'depth': BOOLE_EXACT_DEPTH},
            min_checked=required,
        ),
        _tally(
            'boole_commutation_float',
            floats,
            {'depth': BOOLE_FLOAT_DEPTH},
            min_checked=max(1, ctx.points // 2),
        ),
        _tally(
            'boole_decode_round_trip',
            round_trips,
            {'runs': boole.ROUND_TRIP_RUNS, 'width': boole.ROUND_TRIP_WIDTH},
            min_checked=required,
        ),
        _tally('boole_measure_preservation', measure),
    ]


def _multi_run_round_trip(ctx):
    """
    Cylinders of 2 to 4 runs per word around random points, searched in a
    small box that holds the point off its center. A search that never sees a
    match before running out of blind cells is a skip: the cylinder is thinner
    than the grid. Losing a cylinder after matching it is a failure.
    """
    low, high = DECODE_PREFIX_RUNS
    outcomes = []
    for x, y in ctx.rng.uniform(-3, 3, (ctx.points, 2)):
        witness = [float(x), float(y)]
        runs_i, runs_j = (int(k) for k in ctx.rng.integers(low, high + 1, 2))
        try:
            wi = coding.i_word((x, y), DECODE_WORD_DEPTH, FLOAT)
            wj = coding.j_word((x, y), DECODE_WORD_DEPTH, FLOAT)
        except UsageError:
            outcomes.append((witness, None))
            continue
        if len(wi.entries) < runs_i or len(wj.entries) < runs_j or wi.is_finite or wj.is_finite:
            outcomes.append((witness, None))
            continue
        i_prefix, j_prefix = make_word(wi.entries[:runs_i]), make_word(wj.entries[:runs_j])
        box = (x - 0.3, x + 0.2, y - 0.2, y + 0.3)
        try:
            found = decode.cylinder_locate(decode.make_query(i_prefix, j_prefix, box))
        except NotFoundError as e:
            lost = e.diagnostics.get('matched_any', False)
            witness = {'point': witness, 'diagnostics': e.diagnostics}
            outcomes.append((witness, False if lost else None))
            continue
        recoded = decode.cylinder_recodes(found, i_prefix, j_prefix)
        outcomes.append(
            (
                {'point': witness, 'words': [str(i_prefix), str(j_prefix)], 'found': list(found)},
                recoded,
            )
        )
    return _tally(
        'cylinder_round_trip_multi_run',
        outcomes,
        {'runs': list(DECODE_PREFIX_RUNS)},
        min_checked=max(1, ctx.points // 2),
    )


@suite('decode')
def decode_suite(ctx):
    results = []

    outcomes = []
    for x, y in ctx.rng.uniform(-3, 3, (ctx.points, 2)):
        witness = [float(x), float(y)]
        try:
            wi = coding.i_word((x, y), 12, FLOAT)
            wj = coding.j_word((x, y), 12, FLOAT)
        except UsageError:
            outcomes.append((witness, None))
            continue
        if not wi.entries or not wj.entries or max(abs(wi.head), abs(wj.head)) > 3:
            outcomes.append((witness, None))
            continue
        i_prefix, j_prefix = make_word(wi.entries[:1]), make_word(wj.entries[:1])
        try:
            found = decode.cylinder_locate(decode.make_query(i_prefix, j_prefix))
        except NotFoundError as e:
            outcomes.append(({'point': witness, 'diagnostics': e.diagnostics}, False))
            continue
        recoded = decode.cylinder_recodes(found, i_prefix, j_prefix)
        outcomes.append(({'point': witness, 'found': list(found)}, recoded))
    results.append(_tally('cylinder_round_trip', outcomes))
    results.append(_multi_run_round_trip(ctx))

    for entries in ((1,), (3,), (1, -2)):
        word = make_word(entries, WordStatus.FINITE)
        try:
            p = decode.curve_point_from_finite_iword(word)
        except BranchNotFound as e:
            results.append(
                CheckResult('curve_point', False, {'word': str(word), 'tried': e.diagnostics})
            )
            continue
        results.append(
            CheckResult(
                'curve_point',
                coding.i_word(p, word.total + 1) == word,
                {'word': str(word), 'point': [p.x, p.y]},
            )
        )

    try:
        candidate = decode.periodic_search([1, -1], seed_box=PERIOD_TWO_SEED_BOX)
    except NotFoundError as e:
        results.append(CheckResult('period_two_orbit', False, {'diagnostics': e.diagnostics}))
    else:
        x, y = PERIOD_TWO_POINT
        results.append(
            CheckResult(
                'period_two_orbit',
                abs(candidate.point.x - x) <= 1e-9
                and abs(candidate.point.y - y) <= 1e-9
                and candidate.classification == decode.PeriodicClass.HYPERBOLIC,
                candidate.to_dict(),
            )
        )

    try:
        decode.periodic_search([1])
        no_fixed_point = False
    except NotFoundError:
        no_fixed_point = True
    results.append(CheckResult('no_fixed_points', no_fixed_point, {'i_cycle': [1]}))
    return results


def suite_names():
    return list(SUITES) + ['all']


def run_suite(
    name,
    points=DEFAULT_POINTS,
    seed=0,
    window=DEFAULT_WINDOW,
    max_bits=DEFAULT_MAX_BITS,
):
    """
    Run one named suite (or 'all') and return its VerificationReport.
    """
    if name != 'all' and name not in SUITES:
        raise UsageError('Unknown suite %s; choose from %s' % (name, ', '.join(suite_names())))
    if points < 1:
        raise UsageError('points must be positive, got %s' % points)
    if window < 1:
        raise UsageError('window must be positive, got %s' % window)
    ctx = SuiteContext(seed, points, window, max_bits)
    selected = list(SUITES) if name == 'all' else [name]
    results = []
    for key in selected:
        logger.info('Running suite %s (seed %s)', key, seed)
        suite_results = SUITES[key](ctx)
        for result in suite_results:
            result.details.setdefault('suite', key)
        results.extend(suite_results)
    report = VerificationReport(name, seed, results)
    logger.info('Suite %s: %s', name, report.counts())
    return report
