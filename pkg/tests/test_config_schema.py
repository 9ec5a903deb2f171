"""Tests for Pydantic config schema validation.

Tests the frozen parameter models:
- FluidParams (Carreau-Yasuda parameters)
- FlowParams (pressure gradient and radius)
- EvalSettings / QuadratureSettings (numerical controls)
- SweepRange / RunConfig (command-line layering target)

Also tests the config file utility functions.
"""
import math
import os
import tempfile

import numpy as np
import pytest
from pydantic import ValidationError

from config_schema import (
    EvalSettings, FlowParams, FluidParams, QuadratureSettings, RunConfig, SweepRange,
    load_yaml_file, values_differ,
)


class TestFluidParams:
    """Test FluidParams schema validation."""

    def test_valid_fluid(self):
        """A c = 1 fluid is fully shear-thinning."""
        fluid = FluidParams(n=-10, alpha=10, c=1, cu=1)
        assert fluid.n == -10
        assert fluid.is_full_thinning
        assert not fluid.is_newtonian

    def test_alpha_must_be_positive(self):
        """alpha = 0 is rejected."""
        with pytest.raises(ValidationError) as exc_info:
            FluidParams(n=-1, alpha=0, c=0.5, cu=1)
        assert 'greater than 0' in str(exc_info.value)

    @pytest.mark.parametrize('c', [-0.1, 1.1])
    def test_c_bounds(self, c):
        """c must lie in [0, 1]."""
        with pytest.raises(ValidationError):
            FluidParams(n=-1, alpha=2, c=c, cu=1)

    def test_carreau_number_non_negative(self):
        """Negative Carreau numbers are rejected."""
        with pytest.raises(ValidationError):
            FluidParams(n=-1, alpha=2, c=0.5, cu=-1)

    @pytest.mark.parametrize('field', ['n', 'alpha', 'c', 'cu'])
    def test_non_finite_rejected(self, field):
        """NaN and inf are rejected for every field."""
        values = dict(n=-1, alpha=2, c=0.5, cu=1)
        values[field] = math.nan
        with pytest.raises(ValidationError):
            FluidParams(**values)
        values[field] = math.inf
        with pytest.raises(ValidationError):
            FluidParams(**values)

    def test_unknown_field_rejected(self):
        """Extra fields are rejected."""
        with pytest.raises(ValidationError):
            FluidParams(n=-1, alpha=2, c=0.5, cu=1, lam=3)

    def test_frozen(self):
        """Fields cannot be reassigned."""
        fluid = FluidParams(n=-1, alpha=2, c=0.5, cu=1)
        with pytest.raises(ValidationError):
            fluid.c = 0.6

    @pytest.mark.parametrize('params, expected', [
        (dict(n=-1, alpha=2, c=0.0, cu=1), True),
        (dict(n=-1, alpha=2, c=0.5, cu=0), True),
        (dict(n=1, alpha=2, c=0.5, cu=1), True),
        (dict(n=0.99, alpha=2, c=0.5, cu=1), False),
    ])
    def test_is_newtonian(self, params, expected):
        """Newtonian when c = 0, Cu = 0 or n = 1."""
        assert FluidParams(**params).is_newtonian is expected


class TestFlowParams:
    """Test FlowParams schema validation."""

    def test_from_signed_negative(self):
        """A negative gradient is split into magnitude and sign."""
        flow = FlowParams.from_signed(-2.0, 1.5)
        assert flow.b == 2.0
        assert flow.sign == -1
        assert flow.signed_b == -2.0
        assert flow.half_wall_stress == pytest.approx(1.5)

    def test_from_signed_zero(self):
        """b = 0 takes a positive sign."""
        assert FlowParams.from_signed(0.0, 1.0).sign == 1

    def test_radius_must_be_positive(self):
        """The radius must be positive."""
        with pytest.raises(ValidationError):
            FlowParams(b=1, r=0)

    def test_magnitude_non_negative(self):
        """The stored magnitude cannot be negative."""
        with pytest.raises(ValidationError):
            FlowParams(b=-1, r=1)

    def test_sign_values(self):
        """The sign is -1 or 1."""
        with pytest.raises(ValidationError):
            FlowParams(b=1, r=1, sign=2)


class TestEvalSettings:
    """Test numerical tolerance settings."""

    def test_defaults(self):
        """Default tolerances and iteration cap."""
        s = EvalSettings()
        assert s.rel_tol == 1e-12
        assert s.abs_tol == 1e-12
        assert s.eq_tol == 1e-9
        assert s.max_iter == 200

    def test_relatively_equal(self):
        """Relative equality within eq_tol."""
        s = EvalSettings(eq_tol=1e-6)
        assert s.relatively_equal(1.0, 1.0 + 5e-7)
        assert not s.relatively_equal(1.0, 1.0 + 5e-6)
        assert s.relatively_equal(0.0, 0.0)

    def test_tolerances_positive(self):
        """Zero tolerances and iteration caps are rejected."""
        with pytest.raises(ValidationError):
            EvalSettings(eq_tol=0)
        with pytest.raises(ValidationError):
            EvalSettings(max_iter=0)


class TestQuadratureSettings:
    """Test profile grid settings."""

    def test_defaults(self):
        """Default grid size and quadrature target."""
        q = QuadratureSettings()
        assert q.grid_size == 101
        assert q.target_abs_err == 1e-10

    def test_grid_needs_two_points(self):
        """A grid needs both end points."""
        with pytest.raises(ValidationError):
            QuadratureSettings(grid_size=1)


class TestSweepRange:
    """Test MIN:MAX:STEPS parsing."""

    def test_parse(self):
        """MIN:MAX:STEPS maps to linspace."""
        sweep = SweepRange.parse("0.1:1.0:10")
        assert sweep.steps == 10
        assert np.allclose(sweep.values(), np.linspace(0.1, 1.0, 10))

    def test_single_step(self):
        """A degenerate range gives a single value."""
        assert SweepRange.parse("0.5:0.5:1").values().tolist() == [0.5]

    @pytest.mark.parametrize('text', ["1:2", "a:b:3", "1:2:0", "2:1:3", "1:2:1"])
    def test_malformed(self, text):
        """Malformed ranges raise ValueError."""
        with pytest.raises(ValueError):
            SweepRange.parse(text)


class TestRunConfig:
    """Test the layered run config model."""

    def test_builds_parameter_models(self):
        """Parameter models are built with optional overrides."""
        config = RunConfig(command='classify', n=-3, alpha=2, c=0.9, cu=1, b=-1.0, eq_tol=1e-6)
        assert config.fluid().c == 0.9
        assert config.fluid(c=0.5).c == 0.5
        assert config.flow().sign == -1
        assert config.flow(b=2.0).b == 2.0
        assert config.eval_settings().eq_tol == 1e-6

    def test_missing(self):
        """Unset required options are listed in order."""
        config = RunConfig(command='sweep', n=-3, sweep={'c': SweepRange.parse("0.1:0.9:3")})
        assert config.missing(['n', 'alpha', 'c', 'cu']) == ['alpha', 'cu']

    def test_unknown_command(self):
        """Unknown subcommands are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command='plot')

    def test_unknown_sweep_parameter(self):
        """Unknown sweep parameters are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command='sweep', sweep={'beta': SweepRange.parse("0:1:2")})

    def test_unknown_option(self):
        """Unknown options are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command='classify', colour='red')


class TestYamlIO:
    """Test YAML file loading."""

    def test_load_missing_file(self):
        """Loading missing file should return empty dict."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'missing.yml')
            assert load_yaml_file(path) == {}

    def test_load_flat_file(self, write_file):
        """A flat YAML file loads as a mapping."""
        path = write_file('run.yml', "n: -10\nalpha: 10\nrel_tol: 1.0e-12\n")
        assert load_yaml_file(path) == {'n': -10, 'alpha': 10, 'rel_tol': 1e-12}

    def test_empty_file(self, write_file):
        """An empty file loads as an empty mapping."""
        assert load_yaml_file(write_file('empty.yml', "")) == {}


class TestValuesDiffer:
    """Test values_differ utility function."""

    def test_same_values(self):
        """Same values should not differ."""
        assert not values_differ(42, 42)
        assert not values_differ('json', 'json')
        assert not values_differ(True, True)

    def test_different_values(self):
        """Different values differ."""
        assert values_differ(42, 43)
        assert values_differ('json', 'csv')

    def test_none_handling(self):
        """None differs from any value but itself."""
        assert not values_differ(None, None)
        assert values_differ(None, 42)
        assert values_differ(42, None)

    def test_float_comparison(self):
        """Floats compare to 1e-12 relative."""
        assert not values_differ(1.0, 1.0)
        assert not values_differ(1.0, 1.0 + 1e-14)
        assert values_differ(1.0, 1.0000001)
        assert not values_differ(2, 2.0)
