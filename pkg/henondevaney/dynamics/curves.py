"""
Exceptional curves of f.

  - R family: the pre-images f^-n({y=0}), parameterized by t -> f^-n(t, 0).
  - L family: the images f^n({y=-x}), parameterized by t -> f^n(t, -t).

Both families at level n are defined off the discontinuity set of level n: the
parameters whose backward orbit from (t, 0) meets {x+y=0} after j < n steps.
Writing g_j(t) = f^-j_x(t, 0) + f^-j_y(t, 0) = f^-(j+1)_y(t, 0), g_j is strictly
increasing from -inf to +inf on every branch of level j, so each branch holds
exactly one root of g_j and the level-n set has 2^n - 1 members. Roots are kept
as certified rational brackets found by bisection.
"""
import functools
import logging
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from henondevaney.common import BracketNotFound, DiscontinuityHit, UsageError, precondition
from henondevaney.dynamics.core_map import Point, apply_f, apply_f_inv, make_point
from henondevaney.dynamics.report import CheckResult
from henondevaney.dynamics.scalar import EXACT, FLOAT

logger = logging.getLogger(__name__)

DEFAULT_WIDTH = Fraction(1, 10 ** 12)
DEFAULT_SWEEP_BOUND = 10 ** 6
# Parameter span used in place of an infinite branch end when sampling.
DEFAULT_SPAN = 10
MAX_HALVINGS = 64

T0_NOTE = (
    'f^-2_y(t0, 0) = 2*t0 - 1/t0 = sqrt(4 - 2*sqrt(2)) - sqrt(2 + sqrt(2)); the closed form '
    'sqrt(4 - sqrt(2)) - sqrt(2 + sqrt(2)) does not satisfy 2t^4 - 4t^2 + 1 = 0'
)


class CurveFamily(object):
    """
    An enumeration of the two exceptional-curve families.
    """

    PREIMAGE_OF_Y_ZERO = 'R'
    IMAGE_OF_ANTI_DIAGONAL = 'L'

    OPTIONS = {PREIMAGE_OF_Y_ZERO, IMAGE_OF_ANTI_DIAGONAL}


class Side(object):
    POSITIVE = 'positive'
    NEGATIVE = 'negative'


class Root(namedtuple('Root', 'lo hi level')):
    """
    A bracket [lo, hi] around a root. For discontinuity parameters `level` is the
    number of backward steps after which (t, 0) meets {x+y=0}.
    """

    __slots__ = ()

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self):
        return self.lo == self.hi

    def __neg__(self):
        return Root(-self.hi, -self.lo, self.level)

    def __float__(self):
        return float(self.midpoint)

    def contains(self, t):
        return self.lo <= t <= self.hi

    def overlaps(self, other):
        return self.lo <= other.hi and other.lo <= self.hi


class DiscontinuitySet(object):
    def __init__(
        self, level, params  # type: int  # type: List[Root]
    ):
        self.level = level
        self.params = params

    def __len__(self):
        return len(self.params)

    def __iter__(self):
        return iter(self.params)

    def contains(self, t):
        return any(root.contains(t) for root in self.params)

    def floats(self):
        return [float(root) for root in self.params]

    def to_dict(self):
        return {'level': self.level, 'params': [root._asdict() for root in self.params]}


class CurveBranch(namedtuple('CurveBranch', 'family level left right side')):
    """
    One connected component of a curve family at a level. `left` and `right` are
    the bounding Roots, None for an infinite end.
    """

    __slots__ = ()

    @property
    def param_interval(self):
        return (self.left, self.right)

    def to_dict(self):
        return {
            'family': self.family,
            'level': self.level,
            'left': self.left._asdict() if self.left is not None else None,
            'right': self.right._asdict() if self.right is not None else None,
            'side': self.side,
        }


def preimage_orbit(n, t, ctx=EXACT):
    """
    [(t, 0), f^-1(t, 0), ..., f^-n(t, 0)].
    """
    precondition(n >= 0, 'level must be non-negative, got %s' % n)
    points = [make_point(t, 0, ctx)]
    for j in range(1, n + 1):
        try:
            points.append(apply_f_inv(points[-1], ctx))
        except DiscontinuityHit as e:
            raise DiscontinuityHit(
                'f^-%d(t, 0) is undefined at t=%s: step %d starts on {x+y=0}' % (n, t, j),
                point=e.point,
                level=j,
            )
    return points


def preimage_point(n, t, ctx=EXACT):
    return preimage_orbit(n, t, ctx)[-1]


def image_point(n, t, ctx=EXACT):
    p = make_point(t, -ctx.coerce(t), ctx)
    for j in range(n):
        try:
            p = apply_f(p, ctx)
        except DiscontinuityHit as e:
            raise DiscontinuityHit(
                'f^%d(t, -t) is undefined at t=%s: step %d starts on {y=0}' % (n, t, j + 1),
                point=e.point,
                level=j + 1,
            )
    return p


def anti_diagonal_gap(j, t, ctx=EXACT):
    """
    g_j(t) = f^-j_x(t, 0) + f^-j_y(t, 0), which is also f^-(j+1)_y(t, 0).
    """
    q = preimage_point(j, t, ctx)
    return q.x + q.y


def evaluate(family, level, t, ctx=EXACT):
    if family == CurveFamily.PREIMAGE_OF_Y_ZERO:
        return preimage_point(level, t, ctx)
    if family == CurveFamily.IMAGE_OF_ANTI_DIAGONAL:
        return image_point(level, t, ctx)
    raise UsageError('Unknown curve family: %s' % family)


def anti_diagonal_identity_check(n, t, ctx=EXACT):
    """
    f^n(t, -t) == (f^-n_x(t, 0), -f^-(n+1)_y(t, 0)).
    """
    forward = image_point(n, t, ctx)
    q = preimage_point(n, t, ctx)
    expected = Point(q.x, -(q.x + q.y))
    if ctx.exact:
        return forward == expected
    return abs(forward.x - expected.x) <= ctx.epsilon and abs(forward.y - expected.y) <= ctx.epsilon


def telescoped_x_check(n, t, ctx=EXACT):
    """
    f^-n_x(t, 0) == t - sum_{j=1..n} 1 / f^-j_y(t, 0).
    """
    points = preimage_orbit(n, t, ctx)
    telescoped = ctx.coerce(t) - sum((1 / p.y for p in points[1:]), ctx.coerce(0))
    if ctx.exact:
        return points[-1].x == telescoped
    return abs(points[-1].x - telescoped) <= ctx.epsilon * max(1, abs(telescoped))


def _trial_params(end, other, toward_left, ctx, sweep_bound):
    """
    Parameters marching from the interior of a branch toward one of its ends.
    """
    if end is None:
        if other is None:
            anchor = 0
        elif toward_left:
            anchor = math.floor(other.lo)
        else:
            anchor = math.ceil(other.hi)
        k = 0
        while 2 ** k <= 2 * sweep_bound:
            yield ctx.coerce(anchor - 2 ** k if toward_left else anchor + 2 ** k)
            k += 1
        return

    if other is None:
        span = ctx.coerce(1)
    elif toward_left:
        span = other.lo - end.hi
    else:
        span = end.lo - other.hi
    for k in range(1, MAX_HALVINGS + 1):
        delta = ctx.coerce(span) / 2 ** k
        yield ctx.coerce(end.hi + delta if toward_left else end.lo - delta)


def _solve_increasing(
    fn, left, right, target=0, width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND, ctx=EXACT,
    level=None,
):
    """
    Bracket the unique t in the branch (left, right) with fn(t) = target, where fn
    is strictly increasing there and passes from below target to above it.
    """
    target = ctx.coerce(target)

    def value(t):
        try:
            return fn(t) - target
        except DiscontinuityHit:
            return None

    lo = hi = None
    for t in _trial_params(left, right, True, ctx, sweep_bound):
        v = value(t)
        if v is None:
            continue
        if v == 0:
            return Root(t, t, level)
        if v < 0:
            lo = t
            break
    for t in _trial_params(right, left, False, ctx, sweep_bound):
        v = value(t)
        if v is None:
            continue
        if v == 0:
            return Root(t, t, level)
        if v > 0:
            hi = t
            break
    if lo is None or hi is None:
        raise BracketNotFound(
            'No sign change found on branch (%s, %s)' % (left, right),
            diagnostics={'left': left, 'right': right, 'lo': lo, 'hi': hi},
        )

    while hi - lo > width:
        mid = (lo + hi) / 2
        v = value(mid)
        precondition(v is not None, 'Discontinuity inside branch at %s' % mid)
        if v == 0:
            return Root(mid, mid, level)
        if v < 0:
            lo = mid
        else:
            hi = mid
    return Root(lo, hi, level)


def _gaps(roots):
    ends = [None] + list(roots) + [None]
    return list(zip(ends[:-1], ends[1:]))


@functools.lru_cache(maxsize=None)
def _discontinuity_roots(n, width, sweep_bound):
    if n == 0:
        return ()
    previous = _discontinuity_roots(n - 1, width, sweep_bound)
    found = []
    for left, right in _gaps(previous):
        fn = functools.partial(anti_diagonal_gap, n - 1)
        found.append(_solve_increasing(fn, left, right, 0, width, sweep_bound, level=n - 1))
    roots = tuple(sorted(previous + tuple(found), key=lambda root: root.lo))
    logger.debug('Discontinuity level %d: %d parameters', n, len(roots))
    return roots


def _as_width(width):
    if isinstance(width, float):
        return Fraction(repr(width))
    return Fraction(width)


def discontinuity_params(
    n, search_interval=None, width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND
):
    """
    All parameters t whose backward orbit from (t, 0) meets {x+y=0} before step n,
    optionally restricted to search_interval = (lo, hi).
    """
    precondition(n >= 1, 'level must be at least 1, got %s' % n)
    roots = list(_discontinuity_roots(n, _as_width(width), sweep_bound))
    if search_interval is not None:
        lo, hi = search_interval
        roots = [root for root in roots if root.hi >= lo and root.lo <= hi]
    return DiscontinuitySet(n, roots)


def branches(family, level, width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND):
    """
    The connected components of a family at a level, ordered by parameter.
    """
    if family not in CurveFamily.OPTIONS:
        raise UsageError('Unknown curve family: %s' % family)
    if level < 1:
        raise UsageError('Curve level must be at least 1, got %s' % level)
    roots = discontinuity_params(level, width=width, sweep_bound=sweep_bound).params
    result = []
    for left, right in _gaps(roots):
        side = Side.POSITIVE if left is not None and left.lo >= 0 else Side.NEGATIVE
        result.append(CurveBranch(family, level, left, right, side))
    return result


def branch_window(branch, span=DEFAULT_SPAN):
    lo = branch.left.hi if branch.left is not None else None
    hi = branch.right.lo if branch.right is not None else None
    if lo is None and hi is None:
        return Fraction(-span), Fraction(span)
    if lo is None:
        return hi - span, hi
    if hi is None:
        return lo, lo + span
    return lo, hi


def sample_params(branch, samples, span=DEFAULT_SPAN):
    """
    `samples` equally spaced parameters strictly inside the branch window.
    """
    lo, hi = branch_window(branch, span)
    step = (hi - lo) / (samples + 1)
    return [lo + step * k for k in range(1, samples + 1)]


def monotonicity_check(family, n, branch, samples=100, ctx=EXACT):
    """
    Both coordinates increase along a pre-image branch; along an image branch x
    increases and y decreases.
    """
    y_direction = 1 if family == CurveFamily.PREIMAGE_OF_Y_ZERO else -1
    params = sample_params(branch, samples)
    points = [evaluate(family, n, t, ctx) for t in params]
    violation = None
    for k in range(1, len(points)):
        previous, current = points[k - 1], points[k]
        if not (current.x > previous.x and y_direction * (current.y - previous.y) > 0):
            violation = {
                'index': k,
                't': params[k],
                'previous': tuple(previous),
                'current': tuple(current),
            }
            break
    return CheckResult(
        'monotonicity',
        violation is None,
        {
            'family': family,
            'level': n,
            'branch': branch.to_dict(),
            'samples': len(points),
            'first_violation': violation,
        },
    )


def _level_samples(family, level, samples):
    params = []
    for branch in branches(family, level):
        params.extend(float(t) for t in sample_params(branch, samples))
    points = []
    for t in params:
        try:
            points.append(tuple(evaluate(family, level, t, FLOAT)))
        except DiscontinuityHit:
            continue
    return np.array(points, dtype=float)


def crossings_at_height(level, y, width=DEFAULT_WIDTH):
    """
    x-coordinates where the level-n pre-image curve meets the horizontal line at
    height y, one per branch that reaches it.
    """
    xs = []
    fn = lambda t: preimage_point(level, t).y
    for branch in branches(CurveFamily.PREIMAGE_OF_Y_ZERO, level, width):
        try:
            root = _solve_increasing(fn, branch.left, branch.right, y, width)
        except BracketNotFound:
            continue
        xs.append(float(preimage_point(level, root.midpoint).x))
    return sorted(xs)


def disjointness_check(
    n, samples=200, min_gap=0.0, family=CurveFamily.PREIMAGE_OF_Y_ZERO, heights=(1, 2)
):
    """
    Sampled witness that the level n-1 and level n curves do not meet. For the
    pre-image family, also compares the curves along a few horizontal lines.
    """
    precondition(n >= 2, 'disjointness needs n >= 2, got %s' % n)
    if samples < 1:
        raise UsageError('samples must be positive, got %s' % samples)
    previous = _level_samples(family, n - 1, samples)
    current = _level_samples(family, n, samples)
    if not len(previous) or not len(current):
        details = {'family': family, 'level': n, 'samples': int(len(previous) + len(current))}
        details['reason'] = 'no curve points sampled on one of the levels'
        return CheckResult('disjointness', False, details)
    gap = math.inf
    for chunk in np.array_split(current, max(1, len(current) // samples)):
        distances = np.hypot(
            chunk[:, None, 0] - previous[None, :, 0], chunk[:, None, 1] - previous[None, :, 1]
        )
        gap = min(gap, float(distances.min()))

    matched = []
    if family == CurveFamily.PREIMAGE_OF_Y_ZERO:
        for y in heights:
            upper = crossings_at_height(n, Fraction(y))
            lower = crossings_at_height(n - 1, Fraction(y))
            if upper and lower:
                matched.append(
                    {'y': y, 'gap': min(abs(a - b) for a in upper for b in lower)}
                )
    passed = gap > min_gap and all(entry['gap'] > min_gap for entry in matched)
    return CheckResult(
        'disjointness',
        passed,
        {
            'family': family,
            'level': n,
            'samples': int(len(previous) + len(current)),
            'min_gap': gap,
            'matched_heights': matched,
        },
    )


class Trend(object):
    PLUS_INFINITY = '+inf'
    MINUS_INFINITY = '-inf'
    ZERO = '0'
    UNCLEAR = 'unclear'


def classify_trend(values, ratio=1000):
    """
    Classify the tail (second half) of a sequence of samples as diverging, vanishing
    or unclear.
    """
    values = values[len(values) // 2 :]
    magnitudes = [abs(float(v)) for v in values]
    if len(magnitudes) < 2 or any(m == 0 for m in magnitudes):
        return Trend.UNCLEAR
    pairs = list(zip(magnitudes, magnitudes[1:]))
    if all(b > a for a, b in pairs) and magnitudes[-1] > ratio * magnitudes[0]:
        return Trend.PLUS_INFINITY if values[-1] > 0 else Trend.MINUS_INFINITY
    if all(b < a for a, b in pairs) and magnitudes[-1] * ratio < magnitudes[0]:
        return Trend.ZERO
    return Trend.UNCLEAR


def expected_limits(n, t_d, side):
    """
    (x, y) limits of f^-n(t, 0) as t approaches t_d from `side`. t_d is a Root of
    the level-n discontinuity set or one of the floats +inf / -inf.
    """
    if t_d == math.inf:
        return Trend.PLUS_INFINITY, Trend.PLUS_INFINITY
    if t_d == -math.inf:
        return Trend.MINUS_INFINITY, Trend.MINUS_INFINITY
    newest = t_d.level == n - 1
    if side == 'left':
        return Trend.PLUS_INFINITY, Trend.ZERO if newest else Trend.PLUS_INFINITY
    return Trend.MINUS_INFINITY, Trend.ZERO if newest else Trend.MINUS_INFINITY


def boundary_limits_check(n, t_d, side, probe_count=24):
    """
    Evaluate f^-n(t, 0) along a geometric sequence of parameters approaching t_d
    and compare the observed trends with the expected ones.
    """
    if side not in ('left', 'right'):
        raise UsageError('side must be left or right, got %s' % side)
    roots = discontinuity_params(n).params
    if t_d in (math.inf, -math.inf):
        outer = math.ceil(max([abs(root.hi) for root in roots] + [0])) + 1
        sign = 1 if t_d > 0 else -1
        params = [Fraction(sign * (outer + 2 ** k)) for k in range(probe_count)]
    else:
        precondition(t_d.level is not None and t_d.level < n, 'not a level-%d root' % n)
        neighbours = [
            root for root in roots if root.lo != t_d.lo and root.hi != t_d.hi
        ]
        reach = min(
            [Fraction(1, 4)]
            + [(root.lo - t_d.hi) / 4 for root in neighbours if root.lo > t_d.hi]
            + [(t_d.lo - root.hi) / 4 for root in neighbours if root.hi < t_d.lo]
        )
        if side == 'left':
            params = [t_d.lo - reach / 2 ** k for k in range(probe_count)]
        else:
            params = [t_d.hi + reach / 2 ** k for k in range(probe_count)]
    points = [preimage_point(n, t) for t in params]
    observed = (classify_trend([p.x for p in points]), classify_trend([p.y for p in points]))
    expected = expected_limits(n, t_d, side)
    return CheckResult(
        'boundary_limits',
        observed == expected,
        {
            'level': n,
            't_d': float(t_d) if not isinstance(t_d, Root) else t_d._asdict(),
            'side': side,
            'probes': probe_count,
            'observed': list(observed),
            'expected': list(expected),
            'last_point': [float(points[-1].x), float(points[-1].y)],
        },
    )


@functools.lru_cache(maxsize=None)
def _all_positive_end(n, width, sweep_bound, ctx):
    """
    Left end of the all-positive branch of level n: the largest level-n
    discontinuity parameter.
    """
    if n == 1:
        return Root(ctx.coerce(0), ctx.coerce(0), 0)
    left = _all_positive_end(n - 1, width, sweep_bound, ctx)
    fn = functools.partial(anti_diagonal_gap, n - 1, ctx=ctx)
    return _solve_increasing(fn, left, None, 0, width, sweep_bound, ctx, level=n - 1)


ZeroCrossing = namedtuple('ZeroCrossing', 'n t y')


def zero_crossing_sequence(max_n, width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND, ctx=EXACT):
    """
    For each level n, the parameter t_n on the all-positive branch where the
    pre-image curve crosses the y-axis, and its height y_n = f^-n_y(t_n, 0).
    """
    precondition(max_n >= 1, 'max_n must be at least 1, got %s' % max_n)
    width = ctx.coerce(_as_width(width))
    result = []
    for n in range(1, max_n + 1):
        left = _all_positive_end(n, width, sweep_bound, ctx)
        fn = lambda t, n=n: preimage_point(n, t, ctx).x
        t_n = _solve_increasing(fn, left, None, 0, width, sweep_bound, ctx)
        y_n = preimage_point(n, t_n.midpoint, ctx).y
        logger.debug('Zero crossing %d: t=%s y=%s', n, float(t_n), float(y_n))
        result.append(ZeroCrossing(n, t_n, y_n))
    return result


def d_branch(n, width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND, ctx=EXACT):
    """
    D_n: parameters positive with respect to the anti-diagonal for the first n
    backward steps (j < n) and negative at step n. It is a single level-(n+1)
    branch.
    """
    width = ctx.coerce(_as_width(width))
    return (
        _all_positive_end(n, width, sweep_bound, ctx),
        _all_positive_end(n + 1, width, sweep_bound, ctx),
    )


def d_curve_heights(
    max_n, xs=(0,), width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND, ctx=EXACT
):
    """
    Height max |y| of the curve f^-1(D_n) over the vertical lines x in xs. By
    default only the line x = 0 is sampled, so each height is a single crossing
    rather than the maximum over the whole curve.
    """
    precondition(max_n >= 1, 'max_n must be at least 1, got %s' % max_n)
    heights = []
    for n in range(1, max_n + 1):
        left, right = d_branch(n, width, sweep_bound, ctx)
        fn = lambda t, n=n: preimage_point(n + 1, t, ctx).x
        height = 0.0
        for x in xs:
            root = _solve_increasing(
                fn, left, right, x, ctx.coerce(_as_width(width)), sweep_bound, ctx
            )
            height = max(height, abs(float(preimage_point(n + 1, root.midpoint, ctx).y)))
        heights.append((n, height))
    return heights


def t0_check(width=DEFAULT_WIDTH):
    """
    The parameter t0 in D_1 where f^-2(t, 0) crosses the y-axis, the positive
    root of 2t^4 - 4t^2 + 1 below 1/sqrt(2).
    """
    left, right = d_branch(1, width)
    root = _solve_increasing(lambda t: preimage_point(2, t).x, left, right, 0, _as_width(width))
    quartic = lambda t: 2 * t ** 4 - 4 * t ** 2 + 1
    y = float(preimage_point(2, root.midpoint).y)
    closed_t0 = math.sqrt(1 - math.sqrt(2) / 2)
    oracle = math.sqrt(4 - 2 * math.sqrt(2)) - math.sqrt(2 + math.sqrt(2))
    printed = math.sqrt(4 - math.sqrt(2)) - math.sqrt(2 + math.sqrt(2))
    x_changes_sign = root.is_exact or (
        preimage_point(2, root.lo).x <= 0 <= preimage_point(2, root.hi).x
    )
    quartic_changes_sign = root.is_exact or quartic(root.lo) * quartic(root.hi) <= 0
    passed = (
        x_changes_sign
        and quartic_changes_sign
        and abs(float(root.midpoint) - closed_t0) <= 1e-9
        and -1 < y < 0
        and abs(y - oracle) <= 1e-6
    )
    return CheckResult(
        't0',
        passed,
        {
            't0': root._asdict(),
            'bracket_width': float(root.width),
            'y': y,
            'closed_form_t0': closed_t0,
            'oracle_y': oracle,
            'printed_closed_form_y': printed,
            'note': T0_NOTE,
        },
    )


def sample_branch(
    family, level, branch, samples=100, pixel=0.05, max_passes=6, span=DEFAULT_SPAN
):
    """
    Float samples (t, Point) along a branch. Midpoints are inserted wherever two
    successive points are farther apart than `pixel`, for at most max_passes
    rounds.
    """
    params = [float(t) for t in sample_params(branch, samples, span)]
    pairs = []
    for t in params:
        try:
            pairs.append((t, evaluate(family, level, t, FLOAT)))
        except DiscontinuityHit:
            continue
    for _ in range(max_passes):
        refined = pairs[:1]
        inserted = 0
        for (t0, p0), (t1, p1) in zip(pairs, pairs[1:]):
            if math.hypot(p1.x - p0.x, p1.y - p0.y) > pixel:
                tm = (t0 + t1) / 2
                try:
                    refined.append((tm, evaluate(family, level, tm, FLOAT)))
                    inserted += 1
                except DiscontinuityHit:
                    pass
            refined.append((t1, p1))
        pairs = refined
        if not inserted:
            break
    logger.debug('Branch %s: %d samples', branch.param_interval, len(pairs))
    return pairs


def export_curves(family, level, samples=100, pixel=0.05, max_passes=6, span=DEFAULT_SPAN):
    """
    [(CurveBranch, [(t, Point), ...]), ...] for every branch of the level.
    """
    return [
        (branch, sample_branch(family, level, branch, samples, pixel, max_passes, span))
        for branch in branches(family, level)
    ]
