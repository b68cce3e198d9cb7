"""
The Boole transformation B(x) = x - 1/x on the real line and its one-sided
coding. B is the restriction of the Henon-Devaney coding to one coordinate:
the word of x is the signed run-length encoding of sign(B^k(x)), and the
symbol at time k is 1, 2, -1, -2 as B^k(x) lies in (0, 1), (1, oo), (-1, 0),
(-oo, -1).

B is a strictly increasing bijection from each half-line onto R, so a coding
prefix pins down an open interval, recovered here by pulling the last
half-line back through the inverse branches.
"""
import logging
from collections import namedtuple
from fractions import Fraction

import numpy as np

from henondevaney.common import (
    DiscontinuityHit,
    EmptyCylinder,
    ExhaustedWord,
    UsageError,
    precondition,
)
from henondevaney.dynamics.coding import (
    CodingEngine,
    SymbolSequence,
    expand_runs,
    h_i_future,
    make_word,
)
from henondevaney.dynamics.report import CheckResult
from henondevaney.dynamics.scalar import EXACT, FLOAT

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = Fraction(1, 10**12)
MAX_DOUBLINGS = 256
# A round trip decodes at most this many runs and must get narrower than the width.
ROUND_TRIP_RUNS = 12
ROUND_TRIP_WIDTH = Fraction(1, 10**6)
MAX_PREFIX_DEPTH = 2**17


def apply_B(x, ctx=EXACT):
    x = ctx.coerce(x)
    if ctx.is_zero(x):
        raise DiscontinuityHit('B is undefined at 0', point=x)
    image = x - 1 / x
    ctx.guard(image)
    return image


def derivative_B(x):
    return 1 + 1 / (x * x)


BOOLE = CodingEngine('Boole', apply_B, lambda x: x)


def b_word(x, max_depth, ctx=EXACT, need=None):
    return BOOLE.forward_word(ctx.coerce(x), max_depth, ctx, need)


def h_B(x, depth, ctx=EXACT):
    """
    Symbols at times 0..depth-1, assembled from the word of x the way the
    forward half of h_i is: a finite word ends with 0 in place of its last
    +-1, so an orbit reaching 0 is terminated there.
    """
    x = ctx.coerce(x)
    if ctx.is_zero(x):
        return SymbolSequence((), (0,), True, True)
    word = b_word(x, depth + 1, ctx)
    symbols, terminated = h_i_future(word)
    if not terminated:
        # The dropped run continues at least up to time depth - 1.
        covered = sum(abs(e) for e in word.entries)
        s = (-1 if word.entries[-1] > 0 else 1) if word.entries else ctx.sign(x)
        symbols = symbols + [2 * s] * (depth - covered)
    future = tuple(symbols[:depth])
    return SymbolSequence((), future, True, terminated and len(symbols) <= depth)


def boole_commutation(x, depth, ctx=EXACT):
    """
    shift(h_B(x)) == h_B(B(x)) over depth - 1 symbols.
    """
    x = ctx.coerce(x)
    details = {'x': x, 'depth': depth}
    if ctx.is_zero(x):
        details['skipped'] = 'x = 0'
        return CheckResult('boole_commutation', False, details, informational=True)
    image = apply_B(x, ctx)
    if ctx.is_zero(image):
        # h_B of 0 is not the tail of a coding.
        details['skipped'] = 'B(x) = 0'
        return CheckResult('boole_commutation', False, details, informational=True)
    here = h_B(x, depth, ctx).future[1:]
    there = h_B(image, depth - 1, ctx).future
    details['here'] = list(here)
    details['there'] = list(there)
    return CheckResult('boole_commutation', here == there, details)


class Interval(namedtuple('Interval', 'lo hi')):
    """
    An interval of the line; None stands for -oo (lo) or +oo (hi).
    """

    __slots__ = ()

    @property
    def width(self):
        if self.lo is None or self.hi is None:
            return None
        return self.hi - self.lo

    def contains(self, x):
        return (self.lo is None or self.lo <= x) and (self.hi is None or x <= self.hi)

    def to_dict(self):
        return {'lo': self.lo, 'hi': self.hi}


_SYMBOL_INTERVALS = {
    2: Interval(Fraction(1), None),
    1: Interval(Fraction(0), Fraction(1)),
    -1: Interval(Fraction(-1), Fraction(0)),
    -2: Interval(None, Fraction(-1)),
}


def boole_interval(symbol):
    """
    The open interval of points carrying `symbol` at time 0.
    """
    if symbol not in _SYMBOL_INTERVALS:
        raise UsageError('No interval for symbol %s; 0 marks the points -1 and 1' % symbol)
    return _SYMBOL_INTERVALS[symbol]


def _positive_preimage(a, width):
    """
    Bracket the x > 0 with B(x) = a to the given width.
    """
    lo, hi = Fraction(1), Fraction(1)
    for _ in range(MAX_DOUBLINGS):
        if apply_B(lo) <= a:
            break
        lo /= 2
    for _ in range(MAX_DOUBLINGS):
        if apply_B(hi) >= a:
            break
        hi *= 2
    precondition(apply_B(lo) <= a <= apply_B(hi), 'Could not bracket B(x) = %s' % a)
    while hi - lo > width:
        mid = (lo + hi) / 2
        value = apply_B(mid)
        if value == a:
            return Interval(mid, mid)
        if value < a:
            lo = mid
        else:
            hi = mid
    if apply_B(lo) == a:
        return Interval(lo, lo)
    return Interval(lo, hi)


def _preimage(a, sign, width):
    if sign > 0:
        return _positive_preimage(a, width)
    # B is odd.
    bracket = _positive_preimage(-a, width)
    return Interval(-bracket.hi, -bracket.lo)


def _pull_back(endpoint, sign, width, side):
    """
    Pull an endpoint bracket (None for an infinite end) back through the
    inverse branch of the given sign.
    """
    if endpoint is None:
        # -oo pulls back to 0+ on the positive branch; +oo to 0- on the negative one.
        if (side == 'lo') == (sign > 0):
            return Interval(Fraction(0), Fraction(0))
        return None
    lower = _preimage(endpoint.lo, sign, width)
    if endpoint.lo == endpoint.hi:
        return lower
    upper = _preimage(endpoint.hi, sign, width)
    return Interval(lower.lo, upper.hi)


def decode_B(word, tol=DEFAULT_TOLERANCE):
    """
    Outer rational bracket of the set of x whose word starts with the given
    entries. Entries of a truncated word are complete runs, so the sign after
    the last run is known; a finite word pins down the single x whose orbit
    lands on 0.

    Each end is bisected on the monotone branches of B to within tol of the
    true end. The bracket is only as narrow as the cylinder: a word of a few
    runs leaves it wide and longer words narrow it.
    """
    if not word.entries:
        if word.is_finite:
            raise EmptyCylinder('No point of the domain of B has an empty finite word')
        raise UsageError('decode_B needs at least one entry')
    tol = Fraction(tol)
    precondition(tol > 0, 'tol must be positive')
    signs = expand_runs(word.entries)
    if word.is_finite:
        lo = hi = Interval(Fraction(0), Fraction(0))
    else:
        last = -signs[-1]
        lo = Interval(Fraction(0), Fraction(0)) if last > 0 else None
        hi = None if last > 0 else Interval(Fraction(0), Fraction(0))
    width = tol / (2 * len(signs))
    for sign in reversed(signs):
        lo = _pull_back(lo, sign, width, 'lo')
        hi = _pull_back(hi, sign, width, 'hi')
    result = Interval(lo.lo if lo is not None else None, hi.hi if hi is not None else None)
    if result.lo is not None and result.hi is not None and result.lo > result.hi:
        raise EmptyCylinder('Cylinder of %s is empty' % (word,))
    logger.debug('Cylinder of %s: %s', word, result)
    return result


def b_prefix(x, runs, max_depth=MAX_PREFIX_DEPTH, ctx=FLOAT):
    """
    The first `runs` complete runs of the word of x, as a truncated word. The
    orbit is extended by doubling until enough runs have closed.
    """
    precondition(runs >= 1, 'runs must be positive, got %s' % runs)
    depth = 64
    while True:
        word = b_word(x, depth, ctx)
        # A finite word's last run ends on 0, not on a sign change.
        closed = len(word.entries) - (1 if word.is_finite else 0)
        if closed >= runs:
            return make_word(word.entries[:runs])
        if word.is_finite or depth >= max_depth:
            raise ExhaustedWord(
                'Only %d runs of the word of %s close within %d steps' % (closed, x, depth)
            )
        depth = min(2 * depth, max_depth)


def decode_round_trip_check(
    x, runs=ROUND_TRIP_RUNS, width=ROUND_TRIP_WIDTH, tol=DEFAULT_TOLERANCE
):
    """
    Decode ever longer run prefixes of the word of x until the bracket is
    narrower than `width`; it must still hold x. The word is read off a float
    orbit, the brackets are exact.
    """
    x = Fraction(x)
    word = b_prefix(x, runs)
    details = {'x': x, 'word': str(word), 'width_target': width}
    for k in range(1, runs + 1):
        prefix = make_word(word.entries[:k])
        cylinder = decode_B(prefix, tol)
        if cylinder.width is not None and cylinder.width < width:
            break
    details.update({'runs': k, 'interval': cylinder.to_dict(), 'width': cylinder.width})
    narrow = cylinder.width is not None and cylinder.width < width
    return CheckResult('boole_decode_round_trip', narrow and cylinder.contains(x), details)


def measure_preservation_check(y, tol=1e-12):
    """
    The two pre-images x+ and x- of y solve x^2 - y x - 1 = 0; B preserves
    Lebesgue measure iff 1/B'(x+) + 1/B'(x-) = 1.
    """
    roots = np.roots([1.0, -float(y), -1.0]).real
    total = float(np.sum(1.0 / (1.0 + 1.0 / roots**2)))
    details = {'y': y, 'preimages': sorted(roots.tolist()), 'sum': total}
    return CheckResult('measure_preservation', abs(total - 1.0) <= tol, details)
