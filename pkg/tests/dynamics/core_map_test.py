import unittest
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from henondevaney.common import DiscontinuityHit, ResourceLimitError, UsageError
from henondevaney.dynamics.core_map import (
    Point,
    Termination,
    apply_f,
    apply_f_inv,
    determinant,
    jacobian,
    mirror,
    orbit,
    trace,
)
from henondevaney.dynamics.scalar import FLOAT, ScalarContext

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)


class ApplyFTest(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(apply_f((1, 1)), Point(2, -1))
        self.assertEqual(apply_f((2, -1)), Point(1, -2))
        self.assertEqual(apply_f((0, 1)), Point(1, 0))

    def test_discontinuity(self):
        with self.assertRaises(DiscontinuityHit) as cm:
            apply_f((3, 0))
        self.assertEqual(cm.exception.point, Point(3, 0))
        self.assertIsInstance(cm.exception, UsageError)

    def test_float_guard(self):
        self.assertRaises(DiscontinuityHit, lambda: apply_f((1.0, 1e-13), FLOAT))
        self.assertEqual(apply_f((1.0, 1.0), FLOAT), Point(2.0, -1.0))

    def test_exact_results_are_fractions(self):
        p = apply_f((Fraction(1, 3), Fraction(2, 5)))
        self.assertEqual(p, Point(Fraction(17, 6), Fraction(-73, 30)))
        self.assertIsInstance(p.x, Fraction)

    def test_bit_limit(self):
        ctx = ScalarContext(max_bits=40)
        self.assertRaises(
            ResourceLimitError, lambda: orbit((Fraction(3, 7), Fraction(5, 11)), 20, ctx=ctx)
        )


class ApplyFInvTest(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(apply_f_inv((1, -2)), Point(2, -1))
        self.assertEqual(apply_f_inv((1, 0)), Point(0, 1))
        self.assertRaises(DiscontinuityHit, lambda: apply_f_inv((2, -2)))

    @given(rationals, rationals)
    def test_inverse_of_f(self, x, y):
        assume(y != 0)
        p = Point(x, y)
        image = apply_f(p)
        assume(image.x + image.y != 0)
        self.assertEqual(apply_f_inv(image), p)

    @given(rationals, rationals)
    def test_f_of_inverse(self, x, y):
        assume(x + y != 0)
        p = Point(x, y)
        self.assertEqual(apply_f(apply_f_inv(p)), p)


class JacobianTest(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(jacobian((0, 1)), ((1, -1), (-1, 2)))
        self.assertEqual(determinant(jacobian((0, 1))), 1)
        self.assertEqual(trace(jacobian((0, 2))), Fraction(9, 4))
        self.assertRaises(DiscontinuityHit, lambda: jacobian((1, 0)))

    @given(rationals, rationals)
    def test_determinant_is_one(self, x, y):
        assume(y != 0)
        self.assertEqual(determinant(jacobian((x, y))), 1)

    @given(st.floats(-10, 10), st.floats(0.5, 10))
    def test_float_determinant(self, x, y):
        self.assertLess(abs(determinant(jacobian((x, y), FLOAT)) - 1), 1e-12)


class MirrorTest(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(mirror((1, 1)), Point(-1, -1))
        self.assertEqual(apply_f(mirror((1, 1))), Point(-2, 1))

    @given(rationals, rationals)
    def test_equivariance(self, x, y):
        assume(y != 0)
        p = Point(x, y)
        self.assertEqual(apply_f(mirror(p)), mirror(apply_f(p)))
        self.assertEqual(mirror(mirror(p)), p)


class OrbitTest(unittest.TestCase):
    def test_forward(self):
        record = orbit((1, 1), n_fwd=2)
        self.assertEqual(record.points, [Point(1, 1), Point(2, -1), Point(1, -2)])
        self.assertEqual(record.forward_termination.kind, Termination.ALIVE)
        self.assertEqual(record.forward_termination.time, 2)

    def test_hits_y_zero(self):
        record = orbit((0, 1), n_fwd=2)
        self.assertEqual(record.forward_termination, (Termination.HIT_Y_ZERO, 1))
        self.assertEqual(record.end, 1)
        self.assertEqual(record.at(1).y, 0)

    def test_hits_anti_diagonal(self):
        record = orbit((1, -1), n_bwd=1)
        self.assertEqual(record.backward_termination, (Termination.HIT_ANTI_DIAGONAL, 0))
        self.assertEqual(record.start, 0)

    def test_backward_times(self):
        record = orbit((1, 1), n_fwd=1, n_bwd=2)
        self.assertEqual(list(record.times()), [-2, -1, 0, 1])
        self.assertEqual(record.at(-1), Point(Fraction(1, 2), 2))
        for t in range(record.start, record.end):
            self.assertEqual(apply_f(record.at(t)), record.at(t + 1))

    def test_depth_cap(self):
        record = orbit((1, 1), n_fwd=10, max_depth=3)
        self.assertEqual(record.forward_termination, (Termination.TRUNCATED, 3))
        self.assertEqual(len(record.points), 4)

    @settings(max_examples=30)
    @given(rationals, rationals)
    def test_rational_closure(self, x, y):
        record = orbit((x, y), n_fwd=5, n_bwd=5)
        for point in record.points:
            self.assertIsInstance(point.x, Fraction)
            self.assertIsInstance(point.y, Fraction)
