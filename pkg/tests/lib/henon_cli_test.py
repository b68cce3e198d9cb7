import io
import json
import unittest

import mock

from henondevaney.common import NotFoundError, UsageError
from henondevaney.dynamics.report import CheckResult
from henondevaney.dynamics.verify import VerificationReport
from henondevaney.lib.henon_cli import HenonCLI


class CLITestCase(unittest.TestCase):
    def run_cli(self, *argv, **kwargs):
        """
        Returns (exit code, stdout, stderr).
        """
        stdout, stderr = io.StringIO(), io.StringIO()
        cli = HenonCLI(
            headless=kwargs.get('headless', False),
            stdout=stdout,
            stderr=stderr,
            environ=kwargs.get('environ', {}),
        )
        code = 0
        try:
            cli.do_command(list(argv))
        except SystemExit as e:
            code = e.code
        return code, stdout.getvalue(), stderr.getvalue()

    def run_json(self, *argv, **kwargs):
        code, out, err = self.run_cli(*argv, **kwargs)
        self.assertEqual(code, 0, err)
        document = json.loads(out)
        self.assertEqual(document['schema_version'], 1)
        return document


class OrbitCommandTest(CLITestCase):
    def test_forward(self):
        document = self.run_json('orbit', '--point', '1,1', '--fwd', '3')
        points = [(p['x'], p['y']) for p in document['points']]
        self.assertEqual(points, [('1', '1'), ('2', '-1'), ('1', '-2'), ('1/2', '-5/2')])
        self.assertEqual(document['forward_termination'], {'kind': 'alive', 'time': 3})

    def test_hits_y_zero(self):
        document = self.run_json('orbit', '--point', '0,1', '--fwd', '3')
        self.assertEqual(document['forward_termination'], {'kind': 'hit_y_zero', 'time': 1})

    def test_hits_anti_diagonal(self):
        document = self.run_json('orbit', '--point', '1,-1', '--bwd', '1')
        self.assertEqual(
            document['backward_termination'], {'kind': 'hit_anti_diagonal', 'time': 0}
        )

    def test_csv(self):
        code, out, _ = self.run_cli('orbit', '--point', '1,1', '--fwd', '1', '--format', 'csv')
        self.assertEqual(code, 0)
        self.assertEqual(out, 'time,x,y\n0,1,1\n1,2,-1\n')

    def test_parse_error(self):
        code, out, err = self.run_cli('orbit', '--point', '1;1')
        self.assertEqual(code, 2)
        self.assertEqual(out, '')
        self.assertIn('UsageError', err)

    def test_headless_raises(self):
        with self.assertRaises(UsageError):
            self.run_cli('orbit', '--point', '1', headless=True)

    def test_resource_limit(self):
        code, _, err = self.run_cli(
            'orbit', '--point', '1/3,2/7', '--fwd', '40', '--max-bits', '64'
        )
        self.assertEqual(code, 3)
        self.assertIn('ResourceLimitError', err)

    def test_deterministic(self):
        first = self.run_cli('orbit', '--point', '3/7,5/2', '--fwd', '5', '--bwd', '5')
        second = self.run_cli('orbit', '--point', '3/7,5/2', '--fwd', '5', '--bwd', '5')
        self.assertEqual(first, second)


class CodeCommandTest(CLITestCase):
    def test_period_two_point(self):
        document = self.run_json('code', '--point=-1,1/2', '--window', '3')
        self.assertEqual(document['h_i']['rendered'], '... -1 1 -1 ; 1 -1 1 ...')
        self.assertEqual(document['h_i']['origin'], 3)
        self.assertEqual(document['i_word']['entries'][:2], [1, -1])

    def test_mirror(self):
        document = self.run_json('code', '--point=-1,1/2', '--window', '3', '--mirror')
        self.assertEqual(document['h_i']['rendered'], '... 1 -1 1 ; -1 1 -1 ...')
        self.assertTrue(document['mirror'])

    def test_csv(self):
        code, out, _ = self.run_cli(
            'code', '--point=-1,1/2', '--window', '2', '--format', 'csv'
        )
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 't,s_i,s_j')
        self.assertEqual([line.split(',')[0] for line in lines[1:]], ['-2', '-1', '0', '1'])


class CurvesCommandTest(CLITestCase):
    def test_level_one(self):
        document = self.run_json('curves', '--family', 'R', '--level', '1', '--samples', '10')
        self.assertEqual(document['discontinuity_params'], [0.0])
        self.assertEqual(len(document['branches']), 2)
        for branch in document['branches']:
            for sample in branch['samples']:
                t = sample['t']
                self.assertAlmostEqual(sample['x'], t - 1 / t)
                self.assertAlmostEqual(sample['y'], t)

    def test_level_out_of_range(self):
        code, _, _ = self.run_cli('curves', '--family', 'L', '--level', '0')
        self.assertEqual(code, 2)


class DecodeCommandTest(CLITestCase):
    def test_cylinder(self):
        document = self.run_json('decode', '--iword', '1', '--jword', '1', '--box', '0,3,0,3')
        self.assertTrue(document['recoded'])

    def test_curve_point(self):
        document = self.run_json('decode', '--iword', '1', '--finite')
        self.assertEqual(document['point'], {'x': '0', 'y': '1'})

    def test_not_found(self):
        code, out, err = self.run_cli(
            'decode',
            '--iword',
            '3',
            '--box',
            '5,5.001,5,5.001',
            '--max-refinements',
            '4',
        )
        self.assertEqual(code, 4)
        document = json.loads(out)
        self.assertEqual(document['error'], 'NotFoundError')
        self.assertFalse(document['diagnostics']['matched_any'])
        self.assertIn('NotFoundError', err)

    def test_no_fixed_points(self):
        code, out, _ = self.run_cli('periodic', '--icycle', '1')
        self.assertEqual(code, 4)
        self.assertEqual(json.loads(out)['diagnostics'], {'period': 1})

    @mock.patch('henondevaney.dynamics.decode.periodic_search')
    def test_periodic_passes_config(self, periodic_search):
        periodic_search.side_effect = NotFoundError('nothing', diagnostics={})
        code, _, _ = self.run_cli(
            'periodic',
            '--icycle',
            '1,-1',
            '--box=-1.5,-0.5,0,1',
            environ={'HD_MAX_REFINEMENTS': '7'},
        )
        self.assertEqual(code, 4)
        _, kwargs = periodic_search.call_args
        self.assertEqual(kwargs['max_refinements'], 7)
        self.assertEqual(kwargs['seed_box'], (-1.5, -0.5, 0.0, 1.0))

    def test_period_two(self):
        document = self.run_json('periodic', '--icycle', '1,-1', '--box=-1.5,-0.5,0,1')
        candidate = document['candidate']
        self.assertEqual(candidate['period'], 2)
        self.assertAlmostEqual(float(candidate['point']['x']), -1.0, places=9)
        self.assertAlmostEqual(float(candidate['point']['y']), 0.5, places=9)


class BooleCommandTest(CLITestCase):
    def test_apply(self):
        document = self.run_json('boole', 'apply', '--x', '2')
        self.assertEqual(document['result']['image'], '3/2')

    def test_code(self):
        document = self.run_json('boole', 'code', '--x', '1')
        self.assertEqual(document['result']['rendered'], '0')
        self.assertEqual(document['result']['word']['status'], 'finite')

    def test_code_csv(self):
        code, out, _ = self.run_cli('boole', 'code', '--x', '1', '--format', 'csv')
        self.assertEqual(code, 0)
        self.assertEqual(out, 'k,x,symbol\n0,1,0\n')

    def test_code_symbols(self):
        document = self.run_json('boole', 'code', '--x', '7/3', '--depth', '6')
        self.assertEqual(document['result']['rendered'], '2 2 2 1 -1 1 ...')

    def test_decode(self):
        document = self.run_json('boole', 'decode', '--word', '1')
        self.assertEqual(document['result']['interval'], {'lo': '0', 'hi': '1'})

    def test_check_measure(self):
        document = self.run_json('boole', 'check-measure', '--samples', '20')
        self.assertTrue(document['result']['passed'])

    def test_missing_x(self):
        code, _, _ = self.run_cli('boole', 'apply')
        self.assertEqual(code, 2)


class VerifyCommandTest(CLITestCase):
    def test_core(self):
        document = self.run_json('verify', '--suite', 'core', '--points', '5', '--seed', '3')
        self.assertTrue(document['passed'])
        self.assertEqual(document['seed'], 3)
        self.assertEqual(document['counts']['failed'], 0)

    @mock.patch('henondevaney.dynamics.verify.run_suite')
    def test_failure_exit_code(self, run_suite):
        run_suite.return_value = VerificationReport('core', 0, [CheckResult('broken', False)])
        code, out, err = self.run_cli('verify', '--suite', 'core')
        self.assertEqual(code, 1)
        self.assertFalse(json.loads(out)['passed'])
        self.assertIn('VerificationFailed', err)

    @mock.patch('henondevaney.dynamics.verify.run_suite')
    def test_max_bits_from_config(self, run_suite):
        run_suite.return_value = VerificationReport('core', 0, [CheckResult('ok', True)])
        code, _, _ = self.run_cli('verify', '--suite', 'core', environ={'HD_MAX_BITS': '12345'})
        self.assertEqual(code, 0)
        self.assertEqual(run_suite.call_args[0][4], 12345)
        self.run_cli('verify', '--suite', 'core', '--max-bits', '777')
        self.assertEqual(run_suite.call_args[0][4], 777)


class OtherCommandsTest(CLITestCase):
    def test_config(self):
        document = self.run_json('config', '--depth', '7', environ={'HD_MAX_BITS': '99'})
        self.assertEqual(document['config']['depth'], 7)
        self.assertEqual(document['config']['max_bits'], 99)

    def test_help(self):
        code, out, _ = self.run_cli('help')
        self.assertEqual(code, 0)
        for command in ('orbit', 'code', 'curves', 'decode', 'periodic', 'boole', 'verify'):
            self.assertIn(command, out)

    def test_no_arguments_prints_help(self):
        self.assertEqual(self.run_cli()[1], self.run_cli('help')[1])

    def test_version(self):
        self.assertIn('hd version', self.run_cli('--version')[1])


if __name__ == '__main__':
    unittest.main()
