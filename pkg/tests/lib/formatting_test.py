import json
import unittest
from fractions import Fraction

import numpy as np

from henondevaney.common import UsageError
from henondevaney.dynamics.coding import WordStatus, make_word
from henondevaney.lib import formatting


class RationalStrTest(unittest.TestCase):
    def test_rationals(self):
        self.assertEqual(formatting.rational_str(Fraction(6, -4)), '-3/2')
        self.assertEqual(formatting.rational_str(Fraction(4, 2)), '2')
        self.assertEqual(formatting.rational_str(0.1), '0.1')
        self.assertEqual(formatting.rational_str(np.float64(2.5)), '2.5')


class ParseTest(unittest.TestCase):
    def test_parse_point(self):
        self.assertEqual(formatting.parse_point('3/7,5/2'), (Fraction(3, 7), Fraction(5, 2)))
        self.assertEqual(formatting.parse_point('0.25,-1.5'), (Fraction(1, 4), Fraction(-3, 2)))
        self.assertEqual(formatting.parse_point(' 1 , −2 '), (1, -2))

    def test_parse_point_errors(self):
        for s in ('1', '1,2,3', 'a,1', '1/0,1', 'inf,1'):
            self.assertRaises(UsageError, lambda: formatting.parse_point(s))

    def test_parse_word(self):
        self.assertEqual(formatting.parse_word('3,-2'), make_word([3, -2]))
        self.assertEqual(formatting.parse_word('1 -4'), make_word([1, -4]))
        self.assertEqual(
            formatting.parse_word('3', WordStatus.FINITE), make_word([3], WordStatus.FINITE)
        )
        self.assertEqual(formatting.parse_word('').entries, ())
        self.assertRaises(UsageError, lambda: formatting.parse_word('2,2'))
        self.assertRaises(UsageError, lambda: formatting.parse_word('x'))

    def test_parse_box(self):
        self.assertEqual(formatting.parse_box('0,3,-1/2,1'), (0.0, 3.0, -0.5, 1.0))
        self.assertRaises(UsageError, lambda: formatting.parse_box('0,3'))


class JsonTest(unittest.TestCase):
    def test_jsonable(self):
        value = formatting.jsonable(
            {
                'r': Fraction(1, 3),
                'n': np.int64(4),
                'c': complex(1, -1),
                'inf': float('inf'),
                'word': make_word([2, -1]),
                'list': (Fraction(2), np.float64(0.5)),
            }
        )
        self.assertEqual(
            value,
            {
                'r': '1/3',
                'n': 4,
                'c': {'re': 1.0, 'im': -1.0},
                'inf': '+inf',
                'word': {'entries': [2, -1], 'status': 'truncated'},
                'list': ['2', 0.5],
            },
        )

    def test_pretty_json_is_sorted(self):
        text = formatting.pretty_json({'b': 1, 'a': Fraction(1, 2)})
        self.assertEqual(json.loads(text), {'a': '1/2', 'b': 1})
        self.assertLess(text.index('"a"'), text.index('"b"'))


class CsvTest(unittest.TestCase):
    def test_orbit_table(self):
        text = formatting.csv_table('orbit', [(0, Fraction(1), Fraction(1)), (1, 2, -1)])
        self.assertEqual(text, 'time,x,y\n0,1,1\n1,2,-1\n')

    def test_missing_cells(self):
        self.assertEqual(formatting.csv_table('code', [(-1, None, 2)]), 't,s_i,s_j\n-1,,2\n')

    def test_unknown_kind(self):
        self.assertRaises(UsageError, lambda: formatting.csv_table('nothing', []))


if __name__ == '__main__':
    unittest.main()
