"""
From words back to the plane: locate points of a cylinder (the set of points
whose coordinates start with given prefixes), points on the curve R carrying a
finite i-word, and periodic points with a given periodic coding.
"""
import logging
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from henondevaney.common import (
    BranchNotFound,
    DiscontinuityHit,
    NewtonDiverged,
    NotFoundError,
    ResourceLimitError,
    UsageError,
)
from henondevaney.dynamics.coding import (
    WordStatus,
    expand_runs,
    i_word,
    j_word,
    make_word,
    run_lengths,
)
from henondevaney.dynamics.core_map import Point, apply_f, jacobian, make_point
from henondevaney.dynamics.curves import (
    DEFAULT_SWEEP_BOUND,
    DEFAULT_WIDTH,
    CurveFamily,
    branches,
    preimage_point,
)
from henondevaney.dynamics.scalar import EXACT, FLOAT

logger = logging.getLogger(__name__)

DEFAULT_BOX = (-3.0, 3.0, -3.0, 3.0)
DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_REFINEMENTS = 24
# Cells kept per level once some sample point matches.
BEAM_WIDTH = 64
# Cells refined blindly per level before the first match.
MAX_BLIND_CELLS = 4 ** 8
HYPERBOLICITY_THRESHOLD = 1e-6
NEWTON_TOLERANCE = 1e-9
NEWTON_STEPS = 100
MAX_DAMPING = 30
SEED_TOLERANCE = 1e-3


class Box(namedtuple('Box', 'x_lo x_hi y_lo y_hi')):
    __slots__ = ()

    @property
    def diameter(self):
        return math.hypot(self.x_hi - self.x_lo, self.y_hi - self.y_lo)

    def children(self):
        x_mid = (self.x_lo + self.x_hi) / 2
        y_mid = (self.y_lo + self.y_hi) / 2
        return [
            Box(self.x_lo, x_mid, self.y_lo, y_mid),
            Box(x_mid, self.x_hi, self.y_lo, y_mid),
            Box(self.x_lo, x_mid, y_mid, self.y_hi),
            Box(x_mid, self.x_hi, y_mid, self.y_hi),
        ]

    def sample_points(self):
        """
        The center and the four quarter points, which are the centers of the
        children. The center is a corner of every child, so a match there is
        carried down rather than sampled again.
        """
        w = self.x_hi - self.x_lo
        h = self.y_hi - self.y_lo
        return [
            (self.x_lo + w / 2, self.y_lo + h / 2),
            (self.x_lo + w / 4, self.y_lo + h / 4),
            (self.x_lo + 3 * w / 4, self.y_lo + h / 4),
            (self.x_lo + w / 4, self.y_lo + 3 * h / 4),
            (self.x_lo + 3 * w / 4, self.y_lo + 3 * h / 4),
        ]

    def contains(self, point):
        x, y = point
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def to_dict(self):
        return self._asdict()


def make_box(x_lo, x_hi, y_lo, y_hi):
    box = Box(float(x_lo), float(x_hi), float(y_lo), float(y_hi))
    if not (box.x_lo < box.x_hi and box.y_lo < box.y_hi):
        raise UsageError('Empty search box: %s' % (box,))
    return box


CylinderQuery = namedtuple(
    'CylinderQuery', 'i_prefix j_prefix search_box tolerance max_refinements'
)


def make_query(
    i_prefix,
    j_prefix,
    search_box=DEFAULT_BOX,
    tolerance=DEFAULT_TOLERANCE,
    max_refinements=DEFAULT_MAX_REFINEMENTS,
):
    for prefix in (i_prefix, j_prefix):
        make_word(prefix.entries, prefix.status)
        if prefix.is_finite:
            raise UsageError('Cylinder prefixes are truncated words; use the curve locator')
    if not tolerance > 0:
        raise UsageError('tolerance must be positive, got %s' % tolerance)
    if max_refinements < 0:
        raise UsageError('max_refinements must be non-negative')
    return CylinderQuery(i_prefix, j_prefix, make_box(*search_box), tolerance, max_refinements)


def sign_pattern(prefix):
    """
    The signs a prefix fixes: its runs plus the opposite sign that closes the
    last run.
    """
    signs = expand_runs(prefix.entries)
    if signs:
        signs.append(-signs[-1])
    return signs


def _orbit_signs(xs, ys, steps, backward, epsilon):
    """
    Signs of y (forward) or x+y (backward) along `steps` orbit points of every
    sample point, as a (steps, n) array; 0 marks the discontinuity and everything after.
    """
    signs = np.zeros((steps, len(xs)), dtype=int)
    alive = np.ones(len(xs), dtype=bool)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        for k in range(steps):
            side = xs + ys if backward else ys
            alive &= np.abs(side) >= epsilon
            signs[k] = np.where(alive, np.sign(side), 0)
            if k == steps - 1:
                break
            if backward:
                xs, ys = xs - 1 / side, side
            else:
                xs, ys = xs + 1 / ys, ys - 1 / ys - xs
    return signs


def _match_counts(boxes, i_signs, j_signs, epsilon):
    """
    Per box, how many of its sample points carry both sign patterns.
    """
    points = np.array([p for box in boxes for p in box.sample_points()], dtype=float)
    xs, ys = points[:, 0], points[:, 1]
    matched = np.ones(len(points), dtype=bool)
    for pattern, backward in ((i_signs, False), (j_signs, True)):
        if pattern:
            signs = _orbit_signs(xs, ys, len(pattern), backward, epsilon)
            matched &= (signs == np.array(pattern)[:, None]).all(axis=0)
    return matched.reshape(len(boxes), 5), points.reshape(len(boxes), 5, 2)


def cylinder_locate(query, epsilon=FLOAT.epsilon):
    """
    Quadtree search of the query box. A cell survives if one of its five sample points
    has the queried prefixes, or if it contains a point that matched at an
    earlier level. Before the first match every cell is refined, as long as the
    level stays within MAX_BLIND_CELLS; after it the best BEAM_WIDTH cells are.
    Returns a matching point from a cell of diameter at most the tolerance.
    """
    i_signs = sign_pattern(query.i_prefix)
    j_signs = sign_pattern(query.j_prefix)
    cells = [(query.search_box, ())]
    sampled = 0
    seen_match = False
    reason = 'max_refinements reached'
    for level in range(query.max_refinements + 1):
        matched, points = _match_counts([box for box, _ in cells], i_signs, j_signs, epsilon)
        sampled += matched.size
        hits = [
            [tuple(point) for point in points[k][matched[k]]] + list(inherited)
            for k, (_, inherited) in enumerate(cells)
        ]
        counts = np.array([len(cell_hits) for cell_hits in hits])
        logger.debug('Refinement %d: %d cells, %d matching', level, len(cells), (counts > 0).sum())
        if counts.any():
            seen_match = True
            order = np.argsort(-counts, kind='stable')
            best = int(order[0])
            if cells[best][0].diameter <= query.tolerance:
                x, y = hits[best][0]
                return Point(float(x), float(y))
            survivors = [(cells[int(k)][0], hits[int(k)]) for k in order[:BEAM_WIDTH]]
            survivors = [(box, cell_hits) for box, cell_hits in survivors if cell_hits]
        elif len(cells) * 4 > MAX_BLIND_CELLS:
            reason = 'blind refinement exceeded %d cells' % MAX_BLIND_CELLS
            break
        else:
            survivors = [(box, ()) for box, _ in cells]
        if level == query.max_refinements:
            break
        cells = [
            (child, tuple(point for point in cell_hits if child.contains(point)))
            for box, cell_hits in survivors
            for child in box.children()
        ]
    raise NotFoundError(
        'No point of the cylinder (%s ; %s) found in %s'
        % (query.i_prefix, query.j_prefix, query.search_box),
        diagnostics={
            'reason': reason,
            'refinements': level,
            'samples': sampled,
            'matched_any': seen_match,
            'last_cells': [box.to_dict() for box, _ in cells[:16]],
            'last_cell_count': len(cells),
        },
    )


def cylinder_recodes(p, i_prefix, j_prefix):
    """
    Whether the float coding of p starts with both prefixes.
    """
    wi = i_word(p, i_prefix.total + 1, FLOAT)
    wj = j_word(p, j_prefix.total + 1, FLOAT)
    n, m = len(i_prefix.entries), len(j_prefix.entries)
    return wi.entries[:n] == i_prefix.entries and wj.entries[:m] == j_prefix.entries


def _inner_param(branch):
    """
    A simple rational strictly inside a branch: the integer closest to 0 if
    there is one, else the midpoint.
    """
    lo = branch.left.hi if branch.left is not None else None
    hi = branch.right.lo if branch.right is not None else None
    if (lo is None or lo < 0) and (hi is None or hi > 0):
        return Fraction(0)
    if lo is not None and lo >= 0:
        candidate = math.floor(lo) + 1
        if hi is None or candidate < hi:
            return Fraction(candidate)
    if hi is not None and hi <= 0:
        candidate = math.ceil(hi) - 1
        if lo is None or candidate > lo:
            return Fraction(candidate)
    return (lo + hi) / 2


def curve_point_from_finite_iword(wi, width=DEFAULT_WIDTH, sweep_bound=DEFAULT_SWEEP_BOUND):
    """
    A point of R = f^-n({y=0}) whose i-word is wi, n = |wi|. Signs along the
    backward orbit of (t, 0) are constant on each branch, so one exact
    parameter per branch decides it.
    """
    if not wi.is_finite or not wi.entries:
        raise UsageError('Need a nonempty finite i-word, got %s' % (wi,))
    make_word(wi.entries, wi.status)
    n = wi.total
    tried = []
    family = CurveFamily.PREIMAGE_OF_Y_ZERO
    for branch in branches(family, n, width=width, sweep_bound=sweep_bound):
        t = _inner_param(branch)
        p = preimage_point(n, t)
        found = i_word(p, n + 1)
        tried.append({'t': t, 'entries': list(found.entries)})
        if found == wi:
            logger.debug('Curve point for %s at t=%s: %s', wi, t, p)
            return p
    raise BranchNotFound(
        'No level-%d branch carries the i-word %s' % (n, wi), diagnostics={'tried': tried}
    )


def _matmul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def jacobian_chain(p, period, ctx=EXACT):
    """
    (Df^period at p, f^period(p)), multiplying Df along the orbit in ctx
    arithmetic.
    """
    q = make_point(p[0], p[1], ctx)
    one, zero = ctx.coerce(1), ctx.coerce(0)
    product = ((one, zero), (zero, one))
    for _ in range(period):
        product = _matmul(jacobian(q, ctx), product)
        q = apply_f(q, ctx)
    return product, q


class PeriodicClass(object):
    """
    An enumeration of the kinds of periodic points.
    """

    HYPERBOLIC = 'hyperbolic'
    # Some multiplier within the threshold of the unit circle
    NON_HYPERBOLIC = 'non_hyperbolic'

    OPTIONS = {HYPERBOLIC, NON_HYPERBOLIC}


def multipliers(matrix):
    return np.linalg.eigvals(np.array(matrix, dtype=float))


def classify(values, threshold=HYPERBOLICITY_THRESHOLD):
    if all(abs(abs(value) - 1) > threshold for value in values):
        return PeriodicClass.HYPERBOLIC
    return PeriodicClass.NON_HYPERBOLIC


class PeriodicCandidate(
    namedtuple(
        'PeriodicCandidate', 'point period residual multipliers classification i_cycle j_cycle'
    )
):
    __slots__ = ()

    def to_dict(self):
        return {
            'point': {'x': self.point.x, 'y': self.point.y},
            'period': self.period,
            'residual': self.residual,
            'multipliers': [_complex_or_real(value) for value in self.multipliers],
            'classification': self.classification,
            'i_cycle': list(self.i_cycle),
            'j_cycle': list(self.j_cycle),
            'derived': True,
        }


def _complex_or_real(value):
    value = complex(value)
    if value.imag == 0:
        return value.real
    return {'re': value.real, 'im': value.imag}


def periodic_j_cycle(i_cycle):
    """
    The backward coding implied by a periodic forward coding: signs of x+y
    going back are the forward signs read in reverse.
    """
    signs = expand_runs(i_cycle)
    backward = list(reversed(signs))
    return tuple(run_lengths(backward))


def _repeated_prefix(signs, repeats):
    """
    Complete runs of `signs` repeated, closed by the next sign of the cycle.
    """
    extended = signs * repeats + signs[:1]
    return make_word(run_lengths(extended)[:-1], WordStatus.TRUNCATED)


def _check_cycles(i_cycle, j_cycle):
    i_cycle = tuple(int(e) for e in i_cycle)
    make_word(i_cycle)
    if len(i_cycle) % 2:
        raise UsageError('A periodic i-cycle needs an even number of alternating entries')
    expected = periodic_j_cycle(i_cycle)
    if j_cycle is None:
        return i_cycle, expected
    j_cycle = tuple(int(e) for e in j_cycle)
    make_word(j_cycle)
    if expand_runs(j_cycle) != expand_runs(expected):
        raise UsageError('j-cycle %s is not the backward coding of %s' % (j_cycle, i_cycle))
    return i_cycle, j_cycle


def _residual(p, period):
    try:
        q = p
        for _ in range(period):
            q = apply_f(q, FLOAT)
    except DiscontinuityHit:
        return None, None
    r = np.array([q.x - p.x, q.y - p.y])
    return r, float(np.max(np.abs(r)))


def newton_periodic(seed, period, tolerance=NEWTON_TOLERANCE, max_steps=NEWTON_STEPS):
    """
    Damped Newton on f^period(p) - p. The step is halved while the residual
    does not decrease.
    """
    p = make_point(seed[0], seed[1], FLOAT)
    r, size = _residual(p, period)
    if r is None:
        raise NewtonDiverged('Seed %s leaves the domain within one period' % (p,), trace=[])
    trace = [{'point': tuple(p), 'residual': size}]
    for _ in range(max_steps):
        if size <= tolerance:
            return p, size, trace
        matrix, _ = jacobian_chain(p, period, FLOAT)
        system = np.array(matrix, dtype=float) - np.eye(2)
        try:
            step = np.linalg.solve(system, -r)
        except np.linalg.LinAlgError:
            raise NewtonDiverged('Singular Newton system at %s' % (p,), trace=trace)
        damping = 1.0
        for _ in range(MAX_DAMPING):
            candidate = Point(p.x + damping * step[0], p.y + damping * step[1])
            new_r, new_size = _residual(candidate, period)
            if new_r is not None and new_size < size:
                break
            damping /= 2
        else:
            raise NewtonDiverged('Newton stalled at %s' % (p,), trace=trace)
        p, r, size = candidate, new_r, new_size
        trace.append({'point': tuple(p), 'residual': size, 'damping': damping})
    if size <= tolerance:
        return p, size, trace
    raise NewtonDiverged(
        'Newton did not reach %g in %d steps' % (tolerance, max_steps), trace=trace
    )


def polish_exact(p, period, steps=2, ctx=EXACT):
    """
    A few Newton steps in exact arithmetic from a float solution. Returns the
    polished point and its residual, or None if the bit budget runs out.
    """
    q = make_point(p[0], p[1], ctx)
    try:
        for _ in range(steps):
            ((a, b), (c, d)), image = jacobian_chain(q, period, ctx)
            rx, ry = image.x - q.x, image.y - q.y
            a, d = a - 1, d - 1
            det = a * d - b * c
            if det == 0:
                return None
            q = Point(q.x - (d * rx - b * ry) / det, q.y - (-c * rx + a * ry) / det)
        image = jacobian_chain(q, period, ctx)[1]
    except (ResourceLimitError, DiscontinuityHit):
        return None
    return q, max(abs(image.x - q.x), abs(image.y - q.y))


def periodic_search(
    i_cycle,
    j_cycle=None,
    seed_box=DEFAULT_BOX,
    repeats=1,
    tolerance=NEWTON_TOLERANCE,
    max_steps=NEWTON_STEPS,
    max_refinements=DEFAULT_MAX_REFINEMENTS,
    exact_steps=2,
):
    """
    A periodic point whose i-word is i_cycle repeated. Seeds from the cylinder
    of the repeated prefixes, refines with Newton and checks the coding of the
    result.
    """
    period = sum(abs(int(e)) for e in i_cycle)
    if period == 1:
        raise NotFoundError(
            'f has no fixed points: f(p) = p forces 1/y = 0', diagnostics={'period': 1}
        )
    i_cycle, j_cycle = _check_cycles(i_cycle, j_cycle)
    i_signs = expand_runs(i_cycle)
    j_signs = expand_runs(j_cycle)
    query = make_query(
        _repeated_prefix(i_signs, repeats),
        _repeated_prefix(j_signs, repeats),
        seed_box,
        SEED_TOLERANCE,
        max_refinements,
    )
    seed = cylinder_locate(query)
    logger.info('Periodic search for %s: seed %s', i_cycle, seed)
    p, residual, trace = newton_periodic(seed, period, tolerance, max_steps)

    coded = i_word(p, period + 1, FLOAT)
    if coded.entries != _repeated_prefix(i_signs, 1).entries:
        raise NotFoundError(
            'Newton converged to a point coded %s, not %s' % (coded, i_cycle),
            diagnostics={'point': tuple(p), 'trace': trace},
        )

    matrix, _ = jacobian_chain(p, period, FLOAT)
    if exact_steps:
        polished = polish_exact(p, period, exact_steps)
        if polished is not None:
            exact_point, exact_residual = polished
            matrix, _ = jacobian_chain(exact_point, period, EXACT)
            residual = float(exact_residual)
            p = Point(float(exact_point.x), float(exact_point.y))
    values = multipliers(matrix)
    candidate = PeriodicCandidate(
        p, period, residual, tuple(values), classify(values), i_cycle, j_cycle
    )
    logger.info('Periodic point %s: residual %g, %s', p, residual, candidate.classification)
    return candidate
