"""
Pydantic models for every validated input of the solver.

These models define:
- Field types and constraints (ge, le, gt) -> rejection of out-of-domain
  parameter sets before any numerics run
- Metadata (title, description) -> help text and diagnostics naming the
  offending field

All models are frozen: a parameter set is a value, shared freely between the
regime classifier, the profile builder and the sweep worker threads.

Config files:
- A run config file is a flat YAML mapping of option name -> value
  (`n: -10`, `alpha: 10`, `rel_tol: 1.0e-12`, ...).
- Command-line flags override file values; file values override defaults
  (see config_manager.py).
"""
import math
import os
from typing import Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator


# ============================================================================
# Config File Loading
# ============================================================================

def load_yaml_file(path):
    """Load YAML file, return empty dict if missing."""
    if not os.path.exists(path):
        return {}
    with open(path) as f:
        return yaml.safe_load(f) or {}


def values_differ(val1, val2):
    """Check if two values are different (for override tracking)."""
    if val1 is None and val2 is None:
        return False
    if val1 is None or val2 is None:
        return True
    if isinstance(val1, float) or isinstance(val2, float):
        try:
            return not math.isclose(float(val1), float(val2), rel_tol=1e-12, abs_tol=0.0)
        except (TypeError, ValueError):
            return val1 != val2
    return val1 != val2


FROZEN = ConfigDict(frozen=True, extra='forbid')


# ============================================================================
# Fluid and Flow
# ============================================================================

class FluidParams(BaseModel):
    """Dimensionless Carreau-Yasuda parameter set.

    Newtonian behaviour is recovered for c = 0, Cu = 0 or n = 1; every
    evaluator short-circuits to the exact Newtonian values in that case.
    """
    model_config = FROZEN

    n: float = Field(allow_inf_nan=False, title="Power-law index",
                     description="n < 1 shear-thinning, n > 1 shear-thickening, n < 0 allowed")
    alpha: float = Field(gt=0, allow_inf_nan=False, title="Yasuda exponent",
                         description="transition sharpness between the plateaus")
    c: float = Field(ge=0, le=1, allow_inf_nan=False, title="Viscosity ratio",
                     description="1 - mu_inf/mu_0. c = 1 is the fully shear-thinning limit")
    cu: float = Field(ge=0, allow_inf_nan=False, title="Carreau number",
                      description="lambda * U_ref / R. 0 gives a Newtonian fluid")

    @property
    def is_newtonian(self):
        return self.c == 0 or self.cu == 0 or self.n == 1

    @property
    def is_full_thinning(self):
        return self.c == 1


class FlowParams(BaseModel):
    """Normalized pressure gradient and pipe radius.

    `b` is the magnitude of the (positive-normalized) pressure gradient and
    `sign` carries its direction: the profile for -b is the negated profile
    for b.
    """
    model_config = FROZEN

    b: float = Field(ge=0, allow_inf_nan=False, title="Pressure gradient",
                     description="normalized |dp/dz|, 0 is the trivial flow")
    r: float = Field(gt=0, allow_inf_nan=False, title="Pipe radius")
    sign: Literal[1, -1] = Field(default=1, title="Gradient sign")

    @classmethod
    def from_signed(cls, b, r):
        """Build from a signed gradient; b = 0 is stored with sign +1."""
        return cls(b=abs(b), r=r, sign=-1 if b < 0 else 1)

    @property
    def signed_b(self):
        return self.sign * self.b

    @property
    def half_wall_stress(self):
        """bR/2, the flux value the inversion must reach at the wall."""
        return self.b * self.r / 2


# ============================================================================
# Numerical Settings
# ============================================================================

class EvalSettings(BaseModel):
    """Tolerances shared by root finding, regime comparisons and recursions."""
    model_config = FROZEN

    rel_tol: float = Field(default=1e-12, gt=0, allow_inf_nan=False, title="Relative tolerance")
    abs_tol: float = Field(default=1e-12, gt=0, allow_inf_nan=False, title="Absolute tolerance")
    eq_tol: float = Field(default=1e-9, gt=0, allow_inf_nan=False, title="Equality tolerance",
                          description="relative band inside which two regime-defining "
                                      "quantities are reported as equal")
    max_iter: int = Field(default=200, ge=1, title="Iteration cap")

    def relatively_equal(self, a, b):
        """Relative comparison used for every regime-defining equality."""
        return abs(a - b) <= self.eq_tol * max(abs(a), abs(b), self.abs_tol)


class QuadratureSettings(BaseModel):
    """Grid and adaptive-quadrature controls for velocity profiles."""
    model_config = FROZEN

    target_abs_err: float = Field(default=1e-10, gt=0, allow_inf_nan=False,
                                  title="Quadrature error target",
                                  description="absolute error budget for the whole profile")
    max_refinements: int = Field(default=200, ge=1, title="Subdivision limit per panel")
    grid_size: int = Field(default=101, ge=2, title="Output grid points")
    # Panels next to a singular radius get split geometrically toward it.
    geometric_levels: int = Field(default=12, ge=0, title="Geometric refinement levels")


# ============================================================================
# Unsteady Data
# ============================================================================

class UnsteadyData(BaseModel):
    """Suprema of the forcing and initial data entering the a-priori bounds.

    `psi_radii`/`psi_values` optionally carry the sampled initial profile;
    without them the envelope condition can only be decided for Psi == 0.
    `beta` is the forcing decay rate: carried and reported, it enters none
    of the bounds computed here.
    """
    model_config = FROZEN

    sup_f: float = Field(ge=0, allow_inf_nan=False, title="sup |f|")
    sup_psi_prime: float = Field(default=0.0, ge=0, allow_inf_nan=False, title="sup |Psi'|")
    sup_psi_weighted: float = Field(default=0.0, ge=0, allow_inf_nan=False,
                                    title="2 sup |Psi| / (R^2 - Y^2)")
    psi_radii: Optional[tuple[float, ...]] = None
    psi_values: Optional[tuple[float, ...]] = None
    beta: float = Field(default=1.0, gt=0, allow_inf_nan=False, title="Forcing decay rate")

    @model_validator(mode='after')
    def _check_samples(self):
        if (self.psi_radii is None) != (self.psi_values is None):
            raise ValueError("psi_radii and psi_values must be given together")
        if self.psi_radii is not None:
            if len(self.psi_radii) != len(self.psi_values):
                raise ValueError("psi_radii and psi_values differ in length")
            if not all(math.isfinite(v) for v in self.psi_radii + self.psi_values):
                raise ValueError("Psi samples must be finite")
            if any(y < 0 for y in self.psi_radii):
                raise ValueError("psi_radii must be non-negative")
        return self

    @property
    def has_samples(self):
        return self.psi_radii is not None and len(self.psi_radii) > 0

    @property
    def psi_is_zero(self):
        """Psi vanishes identically (no samples and zero suprema, or all-zero samples)."""
        if self.has_samples:
            return all(v == 0 for v in self.psi_values)
        return self.sup_psi_prime == 0 and self.sup_psi_weighted == 0

    def m_value(self, r):
        """M = max{sup|f|, sup|Psi'|/R, 2 sup|Psi|/(R^2 - Y^2)}."""
        return max(self.sup_f, self.sup_psi_prime / r, self.sup_psi_weighted)

    @classmethod
    def from_samples(cls, radii, values, r, sup_f, beta=1.0):
        """Derive the Psi suprema from a sampled initial profile.

        Radii must be increasing inside [0, R]. Points at the wall are kept
        for the envelope check but skipped in the weighted supremum, where
        the weight is singular.
        """
        y = np.asarray(radii, dtype=float)
        psi = np.asarray(values, dtype=float)
        if y.ndim != 1 or y.shape != psi.shape:
            raise ValueError("radii and values must be 1-D arrays of equal length")
        if y.size and (np.any(np.diff(y) <= 0) or y[0] < 0 or y[-1] > r):
            raise ValueError(f"radii must be increasing inside [0, {r}]")
        sup_psi_prime = float(np.max(np.abs(np.gradient(psi, y)))) if y.size > 1 else 0.0
        interior = y < r
        sup_weighted = 0.0
        if np.any(interior):
            sup_weighted = float(np.max(2 * np.abs(psi[interior]) / (r ** 2 - y[interior] ** 2)))
        return cls(
            sup_f=sup_f,
            sup_psi_prime=sup_psi_prime,
            sup_psi_weighted=sup_weighted,
            psi_radii=tuple(float(v) for v in y),
            psi_values=tuple(float(v) for v in psi),
            beta=beta,
        )


# ============================================================================
# Run Config (CLI)
# ============================================================================

SWEEP_PARAMS = ('n', 'alpha', 'c', 'cu', 'b', 'r')


class SweepRange(BaseModel):
    """Inclusive linear range MIN:MAX:STEPS for one swept parameter."""
    model_config = FROZEN

    min: float = Field(allow_inf_nan=False)
    max: float = Field(allow_inf_nan=False)
    steps: int = Field(ge=1)

    @model_validator(mode='after')
    def _check_order(self):
        if self.max < self.min:
            raise ValueError(f"range max {self.max} below min {self.min}")
        if self.steps == 1 and self.max != self.min:
            raise ValueError("a single-step range needs MIN == MAX")
        return self

    @classmethod
    def parse(cls, text):
        parts = str(text).split(':')
        if len(parts) != 3:
            raise ValueError(f"expected MIN:MAX:STEPS, got {text!r}")
        return cls(min=float(parts[0]), max=float(parts[1]), steps=int(parts[2]))

    def values(self):
        return np.linspace(self.min, self.max, self.steps)


class RunConfig(BaseModel):
    """Every option of one CLI invocation after file/flag layering."""
    model_config = FROZEN

    command: Literal['classify', 'profile', 'sweep', 'bounds', 'selftest']
    n: Optional[float] = Field(default=None, allow_inf_nan=False)
    alpha: Optional[float] = Field(default=None, allow_inf_nan=False)
    c: Optional[float] = Field(default=None, allow_inf_nan=False)
    cu: Optional[float] = Field(default=None, allow_inf_nan=False)
    b: Optional[float] = Field(default=None, allow_inf_nan=False)
    r: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    grid: int = Field(default=101, ge=2)
    rel_tol: float = Field(default=1e-12, gt=0)
    abs_tol: float = Field(default=1e-12, gt=0)
    eq_tol: float = Field(default=1e-9, gt=0)
    max_iter: int = Field(default=200, ge=1)
    format: Literal['json', 'csv'] = 'json'
    out: Optional[str] = None
    partial: bool = False
    sweep: dict[str, SweepRange] = Field(default_factory=dict)
    m: Optional[float] = Field(default=None, ge=0, allow_inf_nan=False)
    sup_f: Optional[float] = Field(default=None, ge=0, allow_inf_nan=False)
    sup_psi_prime: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    sup_psi_weighted: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    psi_file: Optional[str] = None
    beta: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode='after')
    def _check_sweep_keys(self):
        unknown = set(self.sweep) - set(SWEEP_PARAMS)
        if unknown:
            raise ValueError(f"cannot sweep {sorted(unknown)}")
        return self

    def eval_settings(self):
        return EvalSettings(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                            eq_tol=self.eq_tol, max_iter=self.max_iter)

    def quadrature_settings(self):
        return QuadratureSettings(grid_size=self.grid)

    def fluid(self, **overrides):
        values = {k: getattr(self, k) for k in ('n', 'alpha', 'c', 'cu')}
        values.update(overrides)
        return FluidParams(**values)

    def flow(self, **overrides):
        b = overrides.get('b', self.b)
        r = overrides.get('r', self.r)
        return FlowParams.from_signed(b if b is not None else 0.0, r)

    def missing(self, names):
        """Names among `names` (and not swept) that have no value."""
        return [k for k in names if getattr(self, k) is None and k not in self.sweep]
