"""
ScalarContext decides how the real quantities of a computation are represented:
exact rationals (fractions.Fraction) or binary floats. Every map in this package
takes a context so that sign decisions, the float discontinuity guard and the
exact-mode bit budget live in one place.
"""
import logging
from fractions import Fraction

from henondevaney.common import ResourceLimitError, UsageError

logger = logging.getLogger(__name__)


class PrecisionMode(object):
    """
    An enumeration of the supported scalar modes.
    """

    EXACT = 'exact'
    FLOAT = 'float'

    OPTIONS = {EXACT, FLOAT}


DEFAULT_EPSILON = 1e-12
DEFAULT_MAX_BITS = 1000000


def bit_length(value):
    """
    Combined numerator and denominator bit length of a rational.
    """
    return value.numerator.bit_length() + value.denominator.bit_length()


class ScalarContext(object):
    def __init__(
        self, mode=PrecisionMode.EXACT, epsilon=DEFAULT_EPSILON, max_bits=DEFAULT_MAX_BITS
    ):
        if mode not in PrecisionMode.OPTIONS:
            raise UsageError('Unknown precision mode: %s' % mode)
        if mode == PrecisionMode.FLOAT and not epsilon > 0:
            raise UsageError('epsilon must be positive in float mode, got %s' % epsilon)
        self.mode = mode
        self.epsilon = epsilon
        self.max_bits = max_bits

    @property
    def exact(self):
        return self.mode == PrecisionMode.EXACT

    def coerce(self, value):
        """
        Convert an int, Fraction or float into this context's scalar type.
        Floats become the rational they denote exactly.
        """
        if self.exact:
            if isinstance(value, Fraction):
                return value
            return Fraction(value)
        return float(value)

    def sign(self, value):
        """
        Return -1, 0 or 1. In float mode anything within epsilon of 0 is 0.
        """
        if not self.exact and abs(value) < self.epsilon:
            return 0
        if value > 0:
            return 1
        if value < 0:
            return -1
        return 0

    def is_zero(self, value):
        return self.sign(value) == 0

    def guard(self, *values):
        """
        Raise ResourceLimitError if any exact value outgrows the bit budget.
        Returns the values unchanged so calls can be inlined.
        """
        if self.exact and self.max_bits is not None:
            for value in values:
                bits = bit_length(value)
                if bits > self.max_bits:
                    logger.info('Rational of %d bits exceeds limit %d', bits, self.max_bits)
                    raise ResourceLimitError(
                        'Exact arithmetic exceeded %d bits (got %d); lower the depth or raise '
                        'max_bits' % (self.max_bits, bits)
                    )
        return values

    def __repr__(self):
        return 'ScalarContext(mode=%r, epsilon=%r, max_bits=%r)' % (
            self.mode,
            self.epsilon,
            self.max_bits,
        )


EXACT = ScalarContext(PrecisionMode.EXACT)
FLOAT = ScalarContext(PrecisionMode.FLOAT)
