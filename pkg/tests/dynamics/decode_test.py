import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from henondevaney.common import NotFoundError, UsageError
from henondevaney.dynamics.coding import WordStatus, i_word, j_word, make_word
from henondevaney.dynamics.core_map import Point, determinant
from henondevaney.dynamics.decode import (
    Box,
    PeriodicClass,
    classify,
    curve_point_from_finite_iword,
    cylinder_locate,
    cylinder_recodes,
    jacobian_chain,
    make_query,
    periodic_j_cycle,
    periodic_search,
    sign_pattern,
)
from henondevaney.dynamics.scalar import FLOAT


def truncated(*entries):
    return make_word(entries, WordStatus.TRUNCATED)


def finite(*entries):
    return make_word(entries, WordStatus.FINITE)


class CylinderLocateTest(unittest.TestCase):
    def test_sign_pattern(self):
        self.assertEqual(sign_pattern(truncated(2, -1)), [1, 1, -1, 1])
        self.assertEqual(sign_pattern(truncated()), [])

    def test_single_flips(self):
        query = make_query(truncated(1), truncated(1), (0, 3, 0, 3))
        p = cylinder_locate(query)
        self.assertTrue(0 <= p.x <= 3 and 0 <= p.y <= 3)
        self.assertTrue(cylinder_recodes(p, truncated(1), truncated(1)))

    def test_longer_prefix(self):
        query = make_query(truncated(2, -1), truncated(1))
        p = cylinder_locate(query)
        self.assertTrue(cylinder_recodes(p, truncated(2, -1), truncated(1)))

    def test_not_found(self):
        # Near (5, 5), y flips after one step, so no point has i_0 = 3.
        query = make_query(truncated(3), truncated(), (5, 5.001, 5, 5.001), max_refinements=4)
        with self.assertRaises(NotFoundError) as cm:
            cylinder_locate(query)
        self.assertFalse(cm.exception.diagnostics['matched_any'])
        self.assertTrue(cm.exception.diagnostics['last_cells'])

    def test_match_at_center_is_carried_down(self):
        # The period-2 point (-1, 1/2) sits at the center of the box.
        query = make_query(truncated(1, -1), truncated(-1, 1), (-1.5, -0.5, 0, 1), 1e-4)
        p = cylinder_locate(query)
        self.assertTrue(cylinder_recodes(p, truncated(1, -1), truncated(-1, 1)))

    def test_box_contains(self):
        box = Box(0, 1, 0, 1)
        self.assertTrue(box.contains((0.5, 1)))
        self.assertFalse(box.contains((1.5, 0.5)))
        for child in box.children():
            self.assertTrue(child.contains(box.sample_points()[0]))

    @settings(max_examples=15, deadline=None)
    @given(
        st.floats(min_value=-3, max_value=3),
        st.floats(min_value=-3, max_value=3),
        st.integers(min_value=2, max_value=4),
        st.integers(min_value=2, max_value=4),
    )
    def test_multi_run_prefixes(self, x, y, runs_i, runs_j):
        try:
            wi = i_word((x, y), 40, FLOAT)
            wj = j_word((x, y), 40, FLOAT)
        except UsageError:
            return
        if wi.is_finite or wj.is_finite:
            return
        if len(wi.entries) < runs_i or len(wj.entries) < runs_j:
            return
        i_prefix, j_prefix = truncated(*wi.entries[:runs_i]), truncated(*wj.entries[:runs_j])
        query = make_query(i_prefix, j_prefix, (x - 0.3, x + 0.2, y - 0.2, y + 0.3))
        try:
            p = cylinder_locate(query)
        except NotFoundError as e:
            # Only a cylinder thinner than the blind grid may go unseen.
            self.assertFalse(e.diagnostics['matched_any'], e.diagnostics)
            return
        self.assertTrue(cylinder_recodes(p, i_prefix, j_prefix))

    def test_invalid_queries(self):
        self.assertRaises(UsageError, lambda: make_query(finite(1), truncated(1)))
        self.assertRaises(UsageError, lambda: make_query(truncated(1), truncated(1), tolerance=0))
        self.assertRaises(UsageError, lambda: make_query(truncated(1), truncated(1), (1, 0, 0, 1)))


class CurvePointTest(unittest.TestCase):
    def test_level_one(self):
        self.assertEqual(curve_point_from_finite_iword(finite(1)), Point(0, 1))

    def test_level_three(self):
        for entries in ((3,), (1, -2), (-1, 2), (-2, 1)):
            wi = finite(*entries)
            p = curve_point_from_finite_iword(wi)
            self.assertEqual(i_word(p, 4), wi)

    def test_needs_finite_word(self):
        self.assertRaises(UsageError, lambda: curve_point_from_finite_iword(truncated(1)))
        self.assertRaises(UsageError, lambda: curve_point_from_finite_iword(finite()))


class JacobianChainTest(unittest.TestCase):
    @settings(max_examples=25, deadline=None)
    @given(
        st.fractions(min_value=-5, max_value=5, max_denominator=10).filter(lambda v: v != 0),
        st.fractions(min_value=-5, max_value=5, max_denominator=10).filter(lambda v: v != 0),
    )
    def test_determinant_is_one(self, x, y):
        try:
            matrix, _ = jacobian_chain((x, y), 3)
        except UsageError:
            return
        self.assertEqual(determinant(matrix), 1)

    def test_period_two_orbit(self):
        matrix, image = jacobian_chain((-1, Fraction(1, 2)), 2)
        self.assertEqual(image, Point(-1, Fraction(1, 2)))
        self.assertEqual(matrix[0][0] + matrix[1][1], 34)

    def test_classify(self):
        self.assertEqual(classify([33.97, 0.0294]), PeriodicClass.HYPERBOLIC)
        self.assertEqual(classify([1 + 1e-8, 1 - 1e-8]), PeriodicClass.NON_HYPERBOLIC)
        unit_circle = [complex(0.6, 0.8), complex(0.6, -0.8)]
        self.assertEqual(classify(unit_circle), PeriodicClass.NON_HYPERBOLIC)


class PeriodicSearchTest(unittest.TestCase):
    def test_no_fixed_points(self):
        with self.assertRaises(NotFoundError) as cm:
            periodic_search([1])
        self.assertEqual(cm.exception.diagnostics['period'], 1)

    def test_j_cycle(self):
        self.assertEqual(periodic_j_cycle((1, -1)), (-1, 1))
        self.assertEqual(periodic_j_cycle((2, -1)), (-1, 2))

    def test_inconsistent_cycles(self):
        self.assertRaises(UsageError, lambda: periodic_search([1, -1], j_cycle=[1, -1, 1, -1]))
        self.assertRaises(UsageError, lambda: periodic_search([2, -1, 3]))

    def test_period_two(self):
        # The only period-2 orbit is (-1, 1/2) <-> (1, -1/2).
        candidate = periodic_search([1, -1], seed_box=(-1.5, -0.5, 0, 1))
        self.assertEqual(candidate.period, 2)
        self.assertAlmostEqual(candidate.point.x, -1.0, places=9)
        self.assertAlmostEqual(candidate.point.y, 0.5, places=9)
        self.assertLess(candidate.residual, 1e-20)
        small, large = sorted(abs(value) for value in candidate.multipliers)
        self.assertAlmostEqual(large, 17 + 288 ** 0.5, places=6)
        self.assertAlmostEqual(small * large, 1.0, places=9)
        self.assertEqual(candidate.classification, PeriodicClass.HYPERBOLIC)
        self.assertEqual(candidate.to_dict()['j_cycle'], [-1, 1])

    def test_period_two_off_center(self):
        candidate = periodic_search([1, -1], seed_box=(-1.3, -0.6, 0.2, 0.9))
        self.assertAlmostEqual(candidate.point.x, -1.0, places=9)
        self.assertAlmostEqual(candidate.point.y, 0.5, places=9)


if __name__ == '__main__':
    unittest.main()
