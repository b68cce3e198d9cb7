import unittest

import mock

from henondevaney.common import UsageError
from henondevaney.dynamics.curves import CurveFamily
from henondevaney.dynamics.report import CheckResult
from henondevaney.dynamics.verify import (
    SUITES,
    VerificationReport,
    _tally,
    run_suite,
    suite_names,
)


class VerificationReportTest(unittest.TestCase):
    def test_counts(self):
        report = VerificationReport(
            'core',
            0,
            [
                CheckResult('a', True),
                CheckResult('b', False),
                CheckResult('c', False, informational=True),
            ],
        )
        self.assertFalse(report.passed)
        self.assertEqual(
            report.to_dict()['counts'], {'total': 3, 'passed': 1, 'failed': 1, 'informational': 1}
        )
        self.assertEqual([r.name for r in report.failures], ['b'])

    def test_informational_never_fails(self):
        report = VerificationReport('core', 0, [CheckResult('note', False, informational=True)])
        self.assertTrue(report.passed)

    def test_tally(self):
        result = _tally('sweep', [([1], True), ([2], None), ([3], False)])
        self.assertFalse(result)
        self.assertEqual(result.details['skipped'], 1)
        self.assertEqual(result.details['first_failures'], [[3]])

    def test_tally_requires_checked_samples(self):
        result = _tally('sweep', [([1], None), ([2], None)], min_checked=1)
        self.assertFalse(result)
        self.assertEqual(result.details['checked'], 0)
        self.assertEqual(result.details['required'], 1)
        self.assertTrue(_tally('sweep', [([1], True), ([2], None)], min_checked=1))


class RunSuiteTest(unittest.TestCase):
    def test_suite_names(self):
        self.assertEqual(suite_names(), ['core', 'curves', 'coding', 'boole', 'decode', 'all'])
        self.assertEqual(list(SUITES), suite_names()[:-1])

    def test_bad_arguments(self):
        self.assertRaises(UsageError, lambda: run_suite('nonsense'))
        self.assertRaises(UsageError, lambda: run_suite('core', points=0))
        self.assertRaises(UsageError, lambda: run_suite('core', window=0))

    def test_core(self):
        report = run_suite('core', points=10, seed=1)
        self.assertTrue(report.passed, report.to_dict())
        self.assertEqual(len(report.results), 3)
        self.assertTrue(all(r.details['suite'] == 'core' for r in report.results))

    def test_deterministic(self):
        first = run_suite('core', points=5, seed=7).to_dict()
        second = run_suite('core', points=5, seed=7).to_dict()
        self.assertEqual(first, second)

    def test_coding(self):
        report = run_suite('coding', points=5, seed=0)
        self.assertTrue(report.passed, [r.to_dict() for r in report.failures])
        golden = [r for r in report.results if r.name.startswith('golden_')]
        self.assertEqual(len(golden), 9)
        table = [r for r in report.results if r.name == 'coding_table']
        self.assertEqual(table[0].details['codes'], '(2,1) -> (22,12) -> (221,122)')
        sweep = [r for r in report.results if r.name == 'commutation_sweep'][0]
        self.assertGreaterEqual(sweep.details['checked'], 5)

    def test_commutation_sweep_out_of_bits(self):
        report = run_suite('coding', points=3, seed=0, max_bits=16)
        sweep = [r for r in report.results if r.name == 'commutation_sweep'][0]
        self.assertFalse(sweep.passed)
        self.assertLess(sweep.details['checked'], 3)
        self.assertEqual(sweep.details['attempts'], 60)
        self.assertFalse(report.passed)

    def test_boole(self):
        report = run_suite('boole', points=5, seed=3)
        self.assertTrue(report.passed, [r.to_dict() for r in report.failures])
        self.assertEqual(
            [r.name for r in report.results],
            [
                'boole_commutation_exact',
                'boole_commutation_float',
                'boole_decode_round_trip',
                'boole_measure_preservation',
            ],
        )
        exact = report.results[0]
        self.assertEqual(exact.details['depth'], 15)
        self.assertGreaterEqual(exact.details['checked'], exact.details['required'])

    def test_decode(self):
        report = run_suite('decode', points=4, seed=0)
        self.assertTrue(report.passed, [r.to_dict() for r in report.failures])
        names = [r.name for r in report.results]
        self.assertIn('cylinder_round_trip_multi_run', names)
        self.assertIn('period_two_orbit', names)

    @mock.patch('henondevaney.dynamics.curves.disjointness_check')
    @mock.patch('henondevaney.dynamics.curves.monotonicity_check')
    def test_curves_cover_both_families(self, monotonicity_check, disjointness_check):
        monotonicity_check.return_value = CheckResult('monotonicity', True)
        disjointness_check.return_value = CheckResult('disjointness', True)
        run_suite('curves', points=2, seed=0)
        levels = {(call[0][0], call[0][1]) for call in monotonicity_check.call_args_list}
        families = (CurveFamily.PREIMAGE_OF_Y_ZERO, CurveFamily.IMAGE_OF_ANTI_DIAGONAL)
        self.assertEqual(levels, {(family, n) for family in families for n in range(1, 7)})
        self.assertTrue(
            all(call[1]['samples'] == 100 for call in monotonicity_check.call_args_list)
        )
        compared = {
            (call[1]['family'], call[0][0]) for call in disjointness_check.call_args_list
        }
        self.assertEqual(compared, {(family, n) for family in families for n in range(2, 7)})


if __name__ == '__main__':
    unittest.main()
