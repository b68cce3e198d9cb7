"""
The Hénon-Devaney map f(x, y) = (x + 1/y, y - 1/y - x), its inverse, Jacobian and
the point symmetry f(-p) = -f(p), together with orbit iteration that records
where an orbit stops instead of raising.

f is undefined on {y = 0} and its inverse on the anti-diagonal {x + y = 0}.
"""
import logging
from collections import namedtuple

from henondevaney.common import DiscontinuityHit, precondition
from henondevaney.dynamics.scalar import EXACT

logger = logging.getLogger(__name__)


class Point(namedtuple('Point', 'x y')):
    __slots__ = ()

    def __neg__(self):
        return Point(-self.x, -self.y)

    def anti_diagonal(self):
        return self.x + self.y


def make_point(x, y, ctx=EXACT):
    return Point(ctx.coerce(x), ctx.coerce(y))


def apply_f(p, ctx=EXACT):
    p = make_point(p[0], p[1], ctx)
    if ctx.is_zero(p.y):
        raise DiscontinuityHit('f is undefined on {y=0}: %s' % (p,), point=p)
    inverse_y = 1 / p.y
    x = p.x + inverse_y
    y = p.y - inverse_y - p.x
    ctx.guard(x, y)
    return Point(x, y)


def apply_f_inv(p, ctx=EXACT):
    p = make_point(p[0], p[1], ctx)
    s = p.x + p.y
    if ctx.is_zero(s):
        raise DiscontinuityHit('f^-1 is undefined on {x+y=0}: %s' % (p,), point=p)
    x = p.x - 1 / s
    ctx.guard(x, s)
    return Point(x, s)


def jacobian(p, ctx=EXACT):
    """
    Df at p as a pair of rows. Its determinant is identically 1.
    """
    p = make_point(p[0], p[1], ctx)
    if ctx.is_zero(p.y):
        raise DiscontinuityHit('Df is undefined on {y=0}: %s' % (p,), point=p)
    k = 1 / (p.y * p.y)
    return ((ctx.coerce(1), -k), (ctx.coerce(-1), 1 + k))


def determinant(matrix):
    (a, b), (c, d) = matrix
    return a * d - b * c


def trace(matrix):
    return matrix[0][0] + matrix[1][1]


def mirror(p):
    return -Point(p[0], p[1])


class Termination(object):
    """
    An enumeration of the ways an orbit stops being iterated.
    """

    # Requested number of steps reached
    ALIVE = 'alive'
    # Forward orbit landed on {y=0}
    HIT_Y_ZERO = 'hit_y_zero'
    # Backward orbit landed on {x+y=0}
    HIT_ANTI_DIAGONAL = 'hit_anti_diagonal'
    # Stopped by the depth cap before the requested number of steps
    TRUNCATED = 'truncated'

    OPTIONS = {ALIVE, HIT_Y_ZERO, HIT_ANTI_DIAGONAL, TRUNCATED}


TerminationCause = namedtuple('TerminationCause', 'kind time')


class OrbitRecord(object):
    """
    Orbit samples at times -m..n. points[k] is the point at time start + k.
    """

    def __init__(
        self,
        points,  # type: List[Point]
        start,  # type: int
        forward_termination,  # type: TerminationCause
        backward_termination,  # type: TerminationCause
    ):
        self.points = points
        self.start = start
        self.forward_termination = forward_termination
        self.backward_termination = backward_termination

    @property
    def end(self):
        return self.start + len(self.points) - 1

    def times(self):
        return range(self.start, self.end + 1)

    def at(self, time):
        precondition(self.start <= time <= self.end, 'No orbit point at time %d' % time)
        return self.points[time - self.start]

    def items(self):
        return list(zip(self.times(), self.points))

    def to_dict(self):
        return {
            'points': [{'time': t, 'x': p.x, 'y': p.y} for t, p in self.items()],
            'forward_termination': self.forward_termination._asdict(),
            'backward_termination': self.backward_termination._asdict(),
        }


def orbit(p, n_fwd=0, n_bwd=0, ctx=EXACT, max_depth=None):
    """
    Iterate p forward n_fwd times and backward n_bwd times. A discontinuity ends
    the corresponding half of the orbit and is recorded, not raised. `max_depth`
    caps both halves; hitting the cap is recorded as TRUNCATED.
    """
    p = make_point(p[0], p[1], ctx)

    def capped(n):
        if max_depth is not None and n > max_depth:
            return max_depth, True
        return n, False

    steps, truncated = capped(n_fwd)
    forward = [p]
    forward_termination = None
    for k in range(steps):
        if ctx.is_zero(forward[-1].y):
            forward_termination = TerminationCause(Termination.HIT_Y_ZERO, k)
            break
        forward.append(apply_f(forward[-1], ctx))
    if forward_termination is None:
        if ctx.is_zero(forward[-1].y):
            forward_termination = TerminationCause(Termination.HIT_Y_ZERO, len(forward) - 1)
        elif truncated:
            forward_termination = TerminationCause(Termination.TRUNCATED, steps)
        else:
            forward_termination = TerminationCause(Termination.ALIVE, len(forward) - 1)

    steps, truncated = capped(n_bwd)
    backward = [p]
    backward_termination = None
    for k in range(steps):
        if ctx.is_zero(backward[-1].anti_diagonal()):
            backward_termination = TerminationCause(Termination.HIT_ANTI_DIAGONAL, -k)
            break
        backward.append(apply_f_inv(backward[-1], ctx))
    if backward_termination is None:
        if ctx.is_zero(backward[-1].anti_diagonal()):
            backward_termination = TerminationCause(
                Termination.HIT_ANTI_DIAGONAL, -(len(backward) - 1)
            )
        elif truncated:
            backward_termination = TerminationCause(Termination.TRUNCATED, -steps)
        else:
            backward_termination = TerminationCause(Termination.ALIVE, -(len(backward) - 1))

    logger.debug(
        'Orbit of %s: %d forward, %d backward points', p, len(forward) - 1, len(backward) - 1
    )
    points = list(reversed(backward[1:])) + forward
    return OrbitRecord(points, -(len(backward) - 1), forward_termination, backward_termination)
