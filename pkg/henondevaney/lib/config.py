"""
RunConfig holds every knob a command reads. Values are layered, each layer
overriding the previous one:

  1. built-in defaults (DEFAULTS below)
  2. a YAML file: --config PATH, else $HD_CONFIG
  3. environment variables HD_MAX_BITS, HD_MAX_REFINEMENTS, HD_EPSILON, HD_DEPTH
  4. explicit command-line flags

Validation raises UsageError so the client reports bad values as input errors.
"""
import logging
import os

import yaml

from henondevaney.common import UsageError
from henondevaney.dynamics.scalar import PrecisionMode, ScalarContext

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = 'HD_CONFIG'


class OutputFormat(object):
    JSON = 'json'
    CSV = 'csv'

    OPTIONS = {JSON, CSV}


DEFAULTS = {
    'precision_mode': PrecisionMode.EXACT,
    'epsilon': 1e-12,
    'depth': 64,
    'window': 10,
    'seed': 0,
    'output_format': OutputFormat.JSON,
    'max_bits': 1000000,
    'max_refinements': 24,
    'bracket_width': 1e-12,
    'sweep_bound': 1000000,
    'tolerance': 1e-9,
    'newton_steps': 100,
}

# Environment variable -> (field, parser)
ENV_OVERRIDES = {
    'HD_MAX_BITS': ('max_bits', int),
    'HD_MAX_REFINEMENTS': ('max_refinements', int),
    'HD_EPSILON': ('epsilon', float),
    'HD_DEPTH': ('depth', int),
}

_INTEGER_FIELDS = ('depth', 'window', 'seed', 'max_bits', 'max_refinements', 'newton_steps')
_FLOAT_FIELDS = ('epsilon', 'bracket_width', 'sweep_bound', 'tolerance')


class RunConfig(object):
    def __init__(self, **values):
        unknown = set(values) - set(DEFAULTS)
        if unknown:
            raise UsageError('Unknown config keys: %s' % ', '.join(sorted(unknown)))
        merged = dict(DEFAULTS)
        merged.update(values)
        for key in _FLOAT_FIELDS:
            # YAML reads 1e-12 (no dot) as a string.
            if isinstance(merged[key], str):
                try:
                    merged[key] = float(merged[key])
                except ValueError:
                    raise UsageError('%s must be a number, got %r' % (key, merged[key]))
        for key, value in merged.items():
            setattr(self, key, value)
        self.validate()

    def validate(self):
        for key in _INTEGER_FIELDS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int):
                raise UsageError('%s must be an integer, got %r' % (key, value))
        for key in _FLOAT_FIELDS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise UsageError('%s must be a number, got %r' % (key, value))
        if self.precision_mode not in PrecisionMode.OPTIONS:
            raise UsageError(
                'precision_mode must be one of %s, got %s'
                % (sorted(PrecisionMode.OPTIONS), self.precision_mode)
            )
        if self.output_format not in OutputFormat.OPTIONS:
            raise UsageError(
                'output_format must be one of %s, got %s'
                % (sorted(OutputFormat.OPTIONS), self.output_format)
            )
        if self.depth < 1:
            raise UsageError('depth must be at least 1, got %s' % self.depth)
        if self.window < 1:
            raise UsageError('window must be at least 1, got %s' % self.window)
        if not self.epsilon > 0:
            raise UsageError('epsilon must be positive, got %s' % self.epsilon)
        for key in ('max_bits', 'bracket_width', 'sweep_bound', 'tolerance', 'newton_steps'):
            if not getattr(self, key) > 0:
                raise UsageError('%s must be positive, got %s' % (key, getattr(self, key)))
        if self.max_refinements < 0:
            raise UsageError('max_refinements must be non-negative')

    def scalar_context(self):
        return ScalarContext(self.precision_mode, self.epsilon, self.max_bits)

    def replace(self, **values):
        merged = self.to_dict()
        merged.update({key: value for key, value in values.items() if value is not None})
        return RunConfig(**merged)

    def to_dict(self):
        return {key: getattr(self, key) for key in DEFAULTS}

    @classmethod
    def from_dict(cls, values):
        return cls(**values)

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        items = sorted(self.to_dict().items())
        return 'RunConfig(%s)' % ', '.join('%s=%r' % item for item in items)


def read_yaml_config(path):
    """
    Read a YAML mapping of config values; a missing file is an input error.
    """
    try:
        with open(path) as f:
            values = yaml.safe_load(f)
    except IOError as e:
        raise UsageError('Could not read config file %s: %s' % (path, e))
    except yaml.YAMLError as e:
        raise UsageError('Invalid YAML in config file %s: %s' % (path, e))
    if values is None:
        return {}
    if not isinstance(values, dict):
        raise UsageError(
            'Config file %s must hold a mapping, got %s' % (path, type(values).__name__)
        )
    return values


def env_overrides(environ):
    values = {}
    for name, (key, parse) in ENV_OVERRIDES.items():
        raw = environ.get(name)
        if raw is None or raw == '':
            continue
        try:
            values[key] = parse(raw)
        except ValueError:
            raise UsageError('Invalid value for %s: %s' % (name, raw))
    return values


def load_config(path=None, environ=None, overrides=None):
    """
    Build the effective RunConfig. `overrides` holds command-line flags; None
    values mean the flag was not given.
    """
    environ = os.environ if environ is None else environ
    values = {}
    path = path or environ.get(CONFIG_ENV_VAR)
    if path:
        logger.debug('Reading config from %s', path)
        values.update(read_yaml_config(path))
    values.update(env_overrides(environ))
    if overrides:
        values.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig(**values)
