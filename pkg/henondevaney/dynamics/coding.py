"""
Symbolic coding of orbits.

Coordinates. The i-word of p is the signed run-length encoding of the signs of
y along the forward orbit p, f(p), f^2(p), ...; the j-word is the signed
run-length encoding of the signs of x+y along the backward orbit p, f^-1(p), ...
Since y(f^-1(q)) = x(q) + y(q), both words cut one sign sequence
sigma_n = sign(y(f^n(p))), n in Z, at the origin.

Every entry of a word is a complete run. A TRUNCATED word stops where the
computation stopped (the run still open at that point is not listed); a FINITE
word ends because the orbit met the discontinuity:
  - forward, landing on {y=0} closes the current run at its strict-sign count;
  - backward, landing on {x+y=0} counts the zero point in the current run.

Symbols. h_i assigns to time n the symbol of i_0(f^n(p)) and h_j the symbol of
j_0(f^n(p)), over the alphabet {-2, -1, 0, 1, 2}. Both are assembled here from
the words in blocks, and independently from the orbit one time at a time.

The engine is written against (map, inverse, forward side, backward side) so
the Boole map reuses it with no backward side.
"""
import logging
from collections import namedtuple

from henondevaney.common import (
    DiscontinuityHit,
    EmptyFuture,
    ExhaustedWord,
    OnDiscontinuity,
    UsageError,
    WindowExceedsWords,
    precondition,
)
from henondevaney.dynamics.core_map import apply_f, apply_f_inv, make_point
from henondevaney.dynamics.report import CheckResult
from henondevaney.dynamics.scalar import EXACT

logger = logging.getLogger(__name__)

ALPHABET = (-2, -1, 0, 1, 2)


def _sign(n):
    return 1 if n > 0 else -1


class WordStatus(object):
    """
    An enumeration of how a coordinate word ends.
    """

    # More entries follow that were not computed
    TRUNCATED = 'truncated'
    # The orbit met the discontinuity; the word is complete
    FINITE = 'finite'

    OPTIONS = {TRUNCATED, FINITE}


class CoordinateWord(namedtuple('CoordinateWord', 'entries status')):
    __slots__ = ()

    @property
    def is_finite(self):
        return self.status == WordStatus.FINITE

    @property
    def head(self):
        return self.entries[0] if self.entries else None

    @property
    def total(self):
        return sum(abs(e) for e in self.entries)

    def __neg__(self):
        return CoordinateWord(tuple(-e for e in self.entries), self.status)

    def __str__(self):
        text = ' (+) '.join(str(e) for e in self.entries)
        return text if self.is_finite else text + ' (+) ...'

    def to_dict(self):
        return {'entries': list(self.entries), 'status': self.status}


def make_word(entries, status=WordStatus.TRUNCATED):
    """
    Validated constructor: nonzero entries of strictly alternating sign.
    """
    entries = tuple(int(e) for e in entries)
    if status not in WordStatus.OPTIONS:
        raise UsageError('Unknown word status: %s' % status)
    if any(e == 0 for e in entries):
        raise UsageError('Coordinate word entries must be nonzero: %s' % (entries,))
    for a, b in zip(entries, entries[1:]):
        if _sign(a) == _sign(b):
            raise UsageError('Coordinate word entries must alternate in sign: %s' % (entries,))
    return CoordinateWord(entries, status)


def run_lengths(signs):
    """
    Signed run-length encoding of a sequence of +1/-1.
    """
    entries = []
    for s in signs:
        if entries and _sign(entries[-1]) == s:
            entries[-1] += s
        else:
            entries.append(s)
    return entries


def expand_runs(entries):
    """
    Inverse of run_lengths.
    """
    signs = []
    for e in entries:
        signs.extend([_sign(e)] * abs(e))
    return signs


class CodingEngine(object):
    def __init__(
        self,
        name,  # type: str
        forward,  # type: Callable[[Any, ScalarContext], Any]
        forward_side,  # type: Callable[[Any], Scalar]
        inverse=None,  # type: Optional[Callable[[Any, ScalarContext], Any]]
        backward_side=None,  # type: Optional[Callable[[Any], Scalar]]
    ):
        self.name = name
        self.forward = forward
        self.forward_side = forward_side
        self.inverse = inverse
        self.backward_side = backward_side

    def _signs(self, state, step, side, max_depth, ctx):
        """
        Yield sign(side(state)), stepping with `step`, for at most max_depth
        states. A zero sign is yielded last.
        """
        for k in range(max_depth):
            s = ctx.sign(side(state))
            yield s
            if s == 0 or k == max_depth - 1:
                return
            state = step(state, ctx)

    def _word(self, signs, inclusive, need):
        observed = []
        landed = False
        for s in signs:
            if s == 0:
                landed = True
                break
            observed.append(s)
            # Stop once the complete runs cover `need` symbols.
            if need is not None and len(observed) >= 2 and observed[-1] != observed[-2]:
                if len(observed) - 1 >= need:
                    break
        if not observed:
            raise OnDiscontinuity('Point lies on the discontinuity of the %s map' % self.name)
        entries = run_lengths(observed)
        if landed:
            if inclusive:
                entries[-1] += _sign(entries[-1])
            return CoordinateWord(tuple(entries), WordStatus.FINITE)
        logger.debug(
            '%s word truncated after %d signs; dropping incomplete run %d',
            self.name,
            len(observed),
            entries[-1],
        )
        return CoordinateWord(tuple(entries[:-1]), WordStatus.TRUNCATED)

    def forward_word(self, state, max_depth, ctx=EXACT, need=None):
        signs = self._signs(state, self.forward, self.forward_side, max_depth, ctx)
        return self._word(signs, False, need)

    def backward_word(self, state, max_depth, ctx=EXACT, need=None):
        precondition(self.inverse is not None, '%s has no backward coding' % self.name)
        signs = self._signs(state, self.inverse, self.backward_side, max_depth, ctx)
        return self._word(signs, True, need)

    def leading_run(self, state, backward=False, cap=2, ctx=EXACT):
        """
        Signed length of the first run, capped at `cap`; 0 on the discontinuity.
        """
        if backward:
            signs = self._signs(state, self.inverse, self.backward_side, cap, ctx)
        else:
            signs = self._signs(state, self.forward, self.forward_side, cap, ctx)
        first = None
        length = 0
        for s in signs:
            if first is None:
                if s == 0:
                    return 0
                first = s
            if s != first or length == cap:
                break
            length += 1
        return first * length


HENON_DEVANEY = CodingEngine(
    'Henon-Devaney',
    apply_f,
    lambda p: p.y,
    inverse=apply_f_inv,
    backward_side=lambda p: p.x + p.y,
)


def i_word(p, max_depth, ctx=EXACT, need=None):
    """
    Forward coordinate of p, from at most max_depth orbit points.
    """
    return HENON_DEVANEY.forward_word(make_point(p[0], p[1], ctx), max_depth, ctx, need)


def j_word(p, max_depth, ctx=EXACT, need=None):
    """
    Backward coordinate of p, from at most max_depth orbit points.
    """
    return HENON_DEVANEY.backward_word(make_point(p[0], p[1], ctx), max_depth, ctx, need)


def coordinate_step(wi, wj):
    """
    The action of f on coordinates: i_0 loses one step (and is popped at +-1);
    j_0 gains one step if it has the sign of i_0, otherwise a new j_0 = +-1 is
    prepended.
    """
    if not wi.entries:
        raise ExhaustedWord('The i-word is empty; f is not defined or not computed here')
    i0 = wi.entries[0]
    if abs(i0) > 1:
        stepped_i = (i0 - _sign(i0),) + wi.entries[1:]
    else:
        if len(wi.entries) == 1 and not wi.is_finite:
            raise ExhaustedWord('i_0 = %d has no computed successor' % i0)
        stepped_i = wi.entries[1:]

    s = _sign(i0)
    if not wj.entries:
        if wj.is_finite:
            # The zero point joins the new run.
            stepped_j = (2 * s,)
        else:
            raise ExhaustedWord('The j-word is empty')
    elif _sign(wj.entries[0]) == s:
        stepped_j = (wj.entries[0] + s,) + wj.entries[1:]
    else:
        stepped_j = (s,) + wj.entries
    return CoordinateWord(stepped_i, wi.status), CoordinateWord(stepped_j, wj.status)


def symbol_of(i0):
    if i0 == 0:
        raise UsageError('symbol_of needs a nonzero entry')
    if i0 > 1:
        return 2
    if i0 < -1:
        return -2
    return i0


def coordinate_codings(wi, wj, steps=2):
    """
    Pairs (symbols of i_0, symbols of j_0) accumulated over `steps` applications
    of coordinate_step, e.g. (3 (+) -2, 1 (+) -4) -> ['2', '1'], ['22', '12'], ...
    """
    i_codes, j_codes = [], []
    result = []
    for k in range(steps + 1):
        i_codes.append(symbol_of(wi.head))
        j_codes.append(symbol_of(wj.head))
        result.append((tuple(i_codes), tuple(j_codes)))
        if k < steps:
            wi, wj = coordinate_step(wi, wj)
    return result


class SymbolSequence(namedtuple('SymbolSequence', 'past future past_terminated future_terminated')):
    """
    `past` holds the symbols at times -1, -2, ... and `future` those at times
    0, 1, .... A terminated side ends with 0.
    """

    __slots__ = ()

    def __neg__(self):
        return self._replace(
            past=tuple(-s for s in self.past), future=tuple(-s for s in self.future)
        )

    @property
    def origin(self):
        return len(self.past)

    def symbols(self):
        """
        All symbols in time order; symbols()[origin] is the symbol at time 0.
        """
        return tuple(reversed(self.past)) + self.future

    def symbol_at(self, time):
        if time >= 0:
            return self.future[time]
        return self.past[-time - 1]

    def trimmed(self, past_length, future_length):
        past, future = self.past[:past_length], self.future[:future_length]
        return SymbolSequence(
            past,
            future,
            self.past_terminated and len(past) == len(self.past),
            self.future_terminated and len(future) == len(self.future),
        )

    def render(self):
        past = ' '.join(str(s) for s in reversed(self.past))
        future = ' '.join(str(s) for s in self.future)
        left = past if self.past_terminated else ('... ' + past).rstrip()
        right = future if self.future_terminated else (future + ' ...').lstrip()
        if not self.past and self.past_terminated:
            # One-sided sequence.
            return right
        return ('%s ; %s' % (left, right)).strip()

    def to_dict(self):
        return {
            'symbols': list(self.symbols()),
            'origin': self.origin,
            'past_terminated': self.past_terminated,
            'future_terminated': self.future_terminated,
        }


def _fit(symbols, terminated, window, label):
    """
    Cut one side to `window` symbols. A side that cannot be filled raises
    unless it is terminated.
    """
    if len(symbols) >= window:
        return tuple(symbols[:window]), terminated and len(symbols) == window
    if terminated:
        return tuple(symbols), True
    raise WindowExceedsWords(
        'The %s side has %d symbols, fewer than the window %d' % (label, len(symbols), window),
        fillable=len(symbols),
    )


def _same_sign(wi, wj):
    return bool(wi.entries) and bool(wj.entries) and _sign(wi.head) == _sign(wj.head)


def h_i_future(wi):
    """
    h_i at times 0, 1, ...: each i entry e gives |e|-1 symbols 2*sign(e) then
    sign(e). A finite word ends with 0 in place of its last +-1.
    """
    symbols = []
    for e in wi.entries:
        symbols.extend([2 * _sign(e)] * (abs(e) - 1) + [_sign(e)])
    if wi.is_finite:
        symbols = symbols[:-1] + [0]
    return symbols, wi.is_finite


def h_i_past(wi, wj):
    """
    h_i at times -1, -2, ...: read away from the origin, each j block is sign(e)
    then 2*sign(e) repeated, except j_0 continuing the run of i_0, which is all
    2's. A finite word appends 0.
    """
    symbols = []
    same = _same_sign(wi, wj)
    for m, e in enumerate(wj.entries):
        s = _sign(e)
        if m == 0 and same:
            symbols.extend([2 * s] * abs(e))
        else:
            symbols.extend([s] + [2 * s] * (abs(e) - 1))
    if wj.is_finite:
        symbols.append(0)
    return symbols, wj.is_finite


def h_i_assemble(wi, wj, window):
    future, future_terminated = _fit(*h_i_future(wi), window=window, label='h_i future')
    past, past_terminated = _fit(*h_i_past(wi, wj), window=window, label='h_i past')
    return SymbolSequence(past, future, past_terminated, future_terminated)


def h_j_origin_and_past(wj):
    """
    h_j at times 0, -1, -2, ...: read away from the origin, each j block is
    2*sign(e) repeated then sign(e). A finite word appends 0.
    """
    symbols = []
    for e in wj.entries:
        symbols.extend([2 * _sign(e)] * (abs(e) - 1) + [_sign(e)])
    if wj.is_finite:
        symbols.append(0)
    return symbols, wj.is_finite


def h_j_after_origin(wi, wj):
    """
    h_j at times 1, 2, ...: each i block is sign(e) then 2*sign(e) repeated,
    except i_0 continuing the run of j_0, which is all 2's. A finite word
    appends 0.
    """
    symbols = []
    same = _same_sign(wi, wj)
    for n, e in enumerate(wi.entries):
        s = _sign(e)
        if n == 0 and same:
            symbols.extend([2 * s] * abs(e))
        else:
            symbols.extend([s] + [2 * s] * (abs(e) - 1))
    if wi.is_finite:
        symbols.append(0)
    return symbols, wi.is_finite


def h_j_sides(wi, wj):
    """
    (past symbols, past terminated, future symbols, future terminated) of h_j.
    """
    backward, backward_terminated = h_j_origin_and_past(wj)
    after, after_terminated = h_j_after_origin(wi, wj)
    if not wj.entries and wj.is_finite:
        # On {x+y=0} at time 0: the terminal 0 takes the past side.
        past_symbols, past_terminated = backward, True
        future_symbols, future_terminated = after, after_terminated
    elif not backward:
        raise WindowExceedsWords('The j-word is empty; the time-0 symbol is unknown', fillable=0)
    else:
        past_symbols, past_terminated = backward[1:], backward_terminated
        future_symbols = [backward[0]] + after
        future_terminated = after_terminated
    return past_symbols, past_terminated, future_symbols, future_terminated


def h_j_assemble(wi, wj, window):
    past_symbols, past_terminated, future_symbols, future_terminated = h_j_sides(wi, wj)
    future, future_terminated = _fit(future_symbols, future_terminated, window, 'h_j future')
    past, past_terminated = _fit(past_symbols, past_terminated, window, 'h_j past')
    return SymbolSequence(past, future, past_terminated, future_terminated)


def full_sequences(wi, wj):
    """
    (h_i, h_j) with every symbol the words determine.
    """
    past, past_terminated = h_i_past(wi, wj)
    future, future_terminated = h_i_future(wi)
    seq_i = SymbolSequence(tuple(past), tuple(future), past_terminated, future_terminated)
    past, past_terminated, future, future_terminated = h_j_sides(wi, wj)
    seq_j = SymbolSequence(tuple(past), tuple(future), past_terminated, future_terminated)
    return seq_i, seq_j


def words(p, window, max_depth, ctx=EXACT):
    """
    (i_word, j_word) deep enough for a window, or empty finite words for a point
    on a discontinuity.
    """
    p = make_point(p[0], p[1], ctx)
    try:
        wi = i_word(p, max_depth, ctx, need=window)
    except OnDiscontinuity:
        wi = CoordinateWord((), WordStatus.FINITE)
    try:
        wj = j_word(p, max_depth, ctx, need=window + 1)
    except OnDiscontinuity:
        wj = CoordinateWord((), WordStatus.FINITE)
    return wi, wj


def per_time_symbols(p, window, ctx=EXACT):
    """
    h_i and h_j on times -window..window-1 read off the orbit directly: the
    symbol at time n is the symbol of the (capped) leading run at f^n(p).
    """
    p = make_point(p[0], p[1], ctx)
    forward = [p]
    for _ in range(window):
        forward.append(apply_f(forward[-1], ctx))
    backward = [p]
    for _ in range(window):
        backward.append(apply_f_inv(backward[-1], ctx))

    def symbols(backward_side):
        run = lambda q: symbol_of(HENON_DEVANEY.leading_run(q, backward_side, ctx=ctx))
        future = tuple(run(q) for q in forward[:window])
        past = tuple(run(q) for q in backward[1 : window + 1])
        return SymbolSequence(past, future, False, False)

    return symbols(False), symbols(True)


def h(p, window, max_depth=None, ctx=EXACT, cross_check=True):
    """
    (h_i(p), h_j(p)) cut to `window` symbols per side.
    """
    max_depth = max_depth if max_depth is not None else 4 * window + 8
    wi, wj = words(p, window, max_depth, ctx)
    return h_from_words(p, wi, wj, window, ctx, cross_check)


def h_from_words(p, wi, wj, window, ctx=EXACT, cross_check=True):
    """
    h assembled from the words of p already computed by `words`. For points
    whose words are both truncated, the block assembly is compared against
    per_time_symbols.
    """
    seq_i = h_i_assemble(wi, wj, window)
    seq_j = h_j_assemble(wi, wj, window)
    if cross_check and not wi.is_finite and not wj.is_finite:
        per_i, per_j = per_time_symbols(p, window, ctx)
        precondition(
            per_i == seq_i and per_j == seq_j,
            'Block assembly disagrees with per-time symbols at %s' % (p,),
        )
    return seq_i, seq_j


def shift(seq):
    """
    Move the origin one step forward.
    """
    if not seq.future or (seq.future_terminated and seq.future == (0,)):
        raise EmptyFuture('Nothing to shift: the future side is exhausted')
    return SymbolSequence(
        (seq.future[0],) + seq.past, seq.future[1:], seq.past_terminated, seq.future_terminated
    )


def _agree(a, b):
    """
    Symbol-by-symbol agreement on the overlap of two sequences.
    """
    past = min(len(a.past), len(b.past))
    future = min(len(a.future), len(b.future))
    return a.past[:past] == b.past[:past] and a.future[:future] == b.future[:future]


def verify_commutation(p, window, max_depth=None, ctx=EXACT):
    """
    shift(h_i(p)) == h_i(f(p)) and shift(h_j(p)) == h_j(f(p)) on the overlap.
    """
    p = make_point(p[0], p[1], ctx)
    details = {'point': tuple(p), 'window': window}
    try:
        image = apply_f(p, ctx)
        h_p = h(p, window, max_depth, ctx)
        h_image = h(image, window, max_depth, ctx)
    except (DiscontinuityHit, WindowExceedsWords) as e:
        # Not checked, so not passed.
        details['skipped'] = str(e)
        return CheckResult('commutation', False, details, informational=True)
    checks = []
    for name, here, there in zip(('i', 'j'), h_p, h_image):
        try:
            checks.append((name, _agree(shift(here), there)))
        except EmptyFuture:
            checks.append((name, True))
    details['agree'] = dict(checks)
    return CheckResult('commutation', all(ok for _, ok in checks), details)


def _is_unit(s):
    return abs(s) == 1


def sigma_membership(seq, kind=None):
    """
    Whether a (windowed) sequence can belong to the symbol space: symbols from
    the alphabet, a 0 only as the last symbol of a terminated side, and the
    block grammar between nonzero symbols. kind='i' enforces the h_i blocks
    (2..2 1), kind='j' the h_j blocks (1 2..2); None only requires a +-1 at
    every sign change.
    """
    for side, terminated in ((seq.past, seq.past_terminated), (seq.future, seq.future_terminated)):
        if any(s not in ALPHABET for s in side):
            return False
        zeros = [k for k, s in enumerate(side) if s == 0]
        if terminated:
            if side and zeros != [len(side) - 1]:
                return False
        elif zeros:
            return False
    body = [s for s in seq.symbols() if s != 0]
    for a, b in zip(body, body[1:]):
        changes = _sign(a) != _sign(b)
        if changes and not (_is_unit(a) or _is_unit(b)):
            return False
        if kind == 'i' and (changes != _is_unit(a)):
            return False
        if kind == 'j' and (changes != _is_unit(b)):
            return False
    return True
