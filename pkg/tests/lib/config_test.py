import os
import tempfile
import unittest

from henondevaney.common import UsageError
from henondevaney.dynamics.scalar import PrecisionMode
from henondevaney.lib.config import DEFAULTS, RunConfig, env_overrides, load_config


class RunConfigTest(unittest.TestCase):
    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.to_dict(), DEFAULTS)
        self.assertTrue(config.scalar_context().exact)

    def test_validation(self):
        for values in (
            {'depth': 0},
            {'epsilon': 0},
            {'precision_mode': 'interval'},
            {'output_format': 'xml'},
            {'max_refinements': -1},
            {'depth': 'ten'},
            {'colour': 'blue'},
        ):
            self.assertRaises(UsageError, lambda: RunConfig(**values))

    def test_replace_ignores_none(self):
        config = RunConfig().replace(depth=5, window=None)
        self.assertEqual(config.depth, 5)
        self.assertEqual(config.window, DEFAULTS['window'])

    def test_float_context(self):
        ctx = RunConfig(precision_mode=PrecisionMode.FLOAT, epsilon=1e-9).scalar_context()
        self.assertFalse(ctx.exact)
        self.assertEqual(ctx.epsilon, 1e-9)


class LoadConfigTest(unittest.TestCase):
    def setUp(self):
        handle, self.path = tempfile.mkstemp(suffix='.yaml')
        with os.fdopen(handle, 'w') as f:
            f.write('depth: 20\nwindow: 4\nepsilon: 1e-10\nmax_bits: 5000\n')

    def tearDown(self):
        os.remove(self.path)

    def test_layering(self):
        environ = {'HD_CONFIG': self.path, 'HD_DEPTH': '30'}
        config = load_config(environ=environ, overrides={'window': 6, 'seed': None})
        # file < env < flags
        self.assertEqual(config.max_bits, 5000)
        self.assertEqual(config.epsilon, 1e-10)
        self.assertEqual(config.depth, 30)
        self.assertEqual(config.window, 6)
        self.assertEqual(config.seed, 0)

    def test_explicit_path_wins_over_env_var(self):
        config = load_config(self.path, environ={'HD_CONFIG': '/nonexistent.yaml'})
        self.assertEqual(config.depth, 20)

    def test_missing_file(self):
        self.assertRaises(UsageError, lambda: load_config('/nonexistent.yaml', environ={}))

    def test_env_overrides(self):
        self.assertEqual(
            env_overrides({'HD_MAX_BITS': '64', 'HD_EPSILON': '1e-6', 'HD_DEPTH': ''}),
            {'max_bits': 64, 'epsilon': 1e-6},
        )
        self.assertRaises(UsageError, lambda: env_overrides({'HD_MAX_REFINEMENTS': 'many'}))

    def test_bad_yaml(self):
        with open(self.path, 'w') as f:
            f.write('- just\n- a list\n')
        self.assertRaises(UsageError, lambda: load_config(self.path, environ={}))


if __name__ == '__main__':
    unittest.main()
