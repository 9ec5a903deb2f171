"""Configuration layering for the command-line front end.

Handles the layered run config:
  schema defaults -> config file (--config) -> command-line flags

The config file is a flat YAML mapping using the long option names with
underscores (`rel_tol`, `sup_psi_prime`, ...). Sweep ranges are written as
`sweep_<param>: "MIN:MAX:STEPS"`, the same text the --sweep-<param> flags
take. Nested mappings and lists are rejected: every option is a scalar.
"""

import logging

from pydantic import ValidationError

from config_schema import SWEEP_PARAMS, RunConfig, SweepRange, load_yaml_file, values_differ
from model import PoiseuilleError

logger = logging.getLogger(__name__)

SWEEP_PREFIX = 'sweep_'


class ConfigError(PoiseuilleError):
    """A config file or option value that cannot be used."""


class ConfigManager:
    """Builds a validated RunConfig from an optional file and flag values."""

    def __init__(self, config_path=None):
        self.config_path = config_path

    def load_file_config(self):
        """Load the flat config file; {} when no file was given."""
        if not self.config_path:
            return {}
        try:
            data = load_yaml_file(self.config_path)
        except Exception as e:
            raise ConfigError(f"cannot read config file {self.config_path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {self.config_path} must be a key: value mapping")
        nested = sorted(k for k, v in data.items() if isinstance(v, (dict, list)))
        if nested:
            raise ConfigError(f"config file {self.config_path}: nested values for {', '.join(nested)}")
        return {str(k).replace('-', '_'): v for k, v in data.items()}

    def merge(self, command, flag_values):
        """Flags override file values; None flags are treated as not given."""
        merged = self.load_file_config()
        for key, value in flag_values.items():
            if value is None:
                continue
            if key in merged and values_differ(merged[key], value):
                logger.debug(f"--{key.replace('_', '-')} overrides config file value {merged[key]!r}")
            merged[key] = value

        merged['sweep'] = self.parse_sweep_ranges(
            {k[len(SWEEP_PREFIX):]: merged.pop(k) for k in list(merged) if k.startswith(SWEEP_PREFIX)})
        try:
            return RunConfig(command=command, **merged)
        except ValidationError as e:
            errors = self.format_validation_errors(e)
            raise ConfigError("; ".join(f"{field}: {msg}" for field, msg in errors.items())) from e

    @staticmethod
    def parse_sweep_ranges(texts):
        """{param: "MIN:MAX:STEPS"} -> {param: SweepRange}."""
        ranges = {}
        for param, text in texts.items():
            if param not in SWEEP_PARAMS:
                raise ConfigError(f"cannot sweep '{param}' (sweepable: {', '.join(SWEEP_PARAMS)})")
            try:
                ranges[param] = SweepRange.parse(text)
            except (ValueError, ValidationError) as e:
                raise ConfigError(f"--sweep-{param} {text!r}: {e}") from e
        return ranges

    @staticmethod
    def format_validation_errors(validation_error, section_prefix=None):
        """Convert Pydantic ValidationError to dict of field -> error message."""
        errors = {}
        for error in validation_error.errors():
            loc = '.'.join(str(part) for part in error['loc']) or '__root__'
            field_path = f"{section_prefix}.{loc}" if section_prefix else loc
            errors[field_path] = error['msg']
        return errors
