"""Steady velocity, shear-rate and curvature profiles.

    U_Y(Y)  = F^-1(bY/2)                      on the admissible branch
    U(Y)    = -integral_Y^R F^-1(bs/2) ds     (U(R) = 0)
    U_YY(Y) = b / (2 F'(F^-1(bY/2)))

U is assembled panel by panel between consecutive output radii with
QUADPACK's adaptive Gauss-Kronrod rule (scipy.integrate.quad) and summed from
the wall inward, so U(R) is exactly zero and every sample carries the error
estimate of the panels outside it.

The integrand F^-1(bs/2) is continuous everywhere it is used but has an
unbounded slope where F' vanishes: at the interior radius Y0 in the
stationary-inflection family and at the wall in the boundary-equality cases.
Radii of those points are injected as panel edges and the adjacent panels are
pre-split geometrically toward them before the adaptive rule runs. U_YY is
reported as math.inf at those points.

For c = 1, n = 0 with bR/2 at the unattained supremum 1/Cu the integrand
itself is unbounded at the wall; U_Y(R) and U_YY(R) are both math.inf there
and U is finite for alpha > 1 only.

A negative pressure gradient gives the negated profile; unbounded U_YY markers
keep the value math.inf regardless of sign.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from config_schema import EvalSettings, QuadratureSettings
from inverse import admissible_branch, invert_flux, supremum_inverse
from model import DomainError, PoiseuilleError, flux, flux_prime
from regime import Regime, RegimeMismatchError, classify

logger = logging.getLogger(__name__)

# F' at or below this is treated as zero when evaluating U_YY. The inversion
# near a stationary point only resolves zeta to about cbrt(machine epsilon),
# so F' there cannot be computed much closer to zero than this.
SINGULAR_SLOPE_TOL = 1e-8


class QuadratureError(PoiseuilleError):
    """A panel exhausted max_refinements without meeting its error target."""


@dataclass
class VelocityProfile:
    grid: np.ndarray
    u: np.ndarray
    u_y: np.ndarray
    u_yy: np.ndarray
    y_end: float
    regime: Regime
    singular_points: tuple = ()
    max_residual: float = 0.0
    undetermined_constant: bool = False
    quadrature_error: float = 0.0
    notes: list = field(default_factory=list)


# ── Pointwise quantities ─────────────────────────────────────────────────────

def shear_rate_profile(p, f, branch, grid, s=None):
    """U_Y at each radius: sign * F^-1(bY/2)."""
    s = s or EvalSettings()
    return np.array([f.sign * invert_flux(p, branch, f.b * y / 2.0, s) for y in grid], dtype=float)


def second_derivative_at(p, f, y, s=None, branch=None, y_end=None):
    """U_YY(Y) = b / (2 F'(F^-1(bY/2))), math.inf where F' vanishes."""
    s = s or EvalSettings()
    y_end = f.r if y_end is None else y_end
    if not 0 <= y <= y_end:
        raise DomainError(f"Y = {y} outside [0, {y_end}]")
    if f.b == 0:
        return 0.0
    if p.is_newtonian:
        return f.sign * f.b / 2.0
    branch = branch or admissible_branch(p, s)
    slope = flux_prime(p, invert_flux(p, branch, f.b * y / 2.0, s))
    if slope <= max(s.abs_tol, SINGULAR_SLOPE_TOL):
        return math.inf
    return f.sign * f.b / (2.0 * slope)


# ── Quadrature ───────────────────────────────────────────────────────────────

def _split_panel(lo, hi, singular, levels):
    """Pieces of [lo, hi], refined geometrically toward singular radii."""
    cuts = sorted({lo, hi} | {y for y in singular if lo < y < hi})
    pieces = []
    for a, c in zip(cuts[:-1], cuts[1:]):
        edges = {a, c}
        width = c - a
        if a in singular:
            edges.update(a + width * 2.0 ** -k for k in range(1, levels + 1))
        if c in singular:
            edges.update(c - width * 2.0 ** -k for k in range(1, levels + 1))
        ordered = sorted(edges)
        pieces.extend(zip(ordered[:-1], ordered[1:]))
    return pieces


def _quad_piece(integrand, a, c, epsabs, q, **weight):
    result = integrate.quad(integrand, a, c, epsabs=epsabs, epsrel=0.0,
                            limit=q.max_refinements, full_output=1, **weight)
    value, abserr, info = result[:3]
    if len(result) > 3:
        if info.get('last', 0) >= q.max_refinements and abserr > epsabs:
            raise QuadratureError(f"[{a!r}, {c!r}]: {result[3]} (error estimate {abserr:.3g})")
        logger.debug(f"quad on [{a!r}, {c!r}]: {result[3]}")
    return value, abserr


def _panel_integrals(p, f, branch, nodes, singular, q, s):
    """Integral of F^-1(bs/2) over each [nodes[i], nodes[i+1]] with error estimates."""
    integrand = lambda y: invert_flux(p, branch, f.b * y / 2.0, s)
    pieces = [_split_panel(a, c, singular, q.geometric_levels) for a, c in zip(nodes[:-1], nodes[1:])]
    epsabs = q.target_abs_err / max(1, sum(len(panel) for panel in pieces))
    values = np.zeros(len(pieces))
    errors = np.zeros(len(pieces))
    for i, panel in enumerate(pieces):
        for a, c in panel:
            value, abserr = _quad_piece(integrand, a, c, epsabs, q)
            values[i] += value
            errors[i] += abserr
    return values, errors


def integrate_shear_rate(p, f, branch, y_lo, y_hi, q=None, s=None, singular=()):
    """Integral of F^-1(bs/2) over [y_lo, y_hi] and its error estimate."""
    q = q or QuadratureSettings()
    s = s or EvalSettings()
    if y_hi < y_lo:
        raise DomainError(f"empty interval [{y_lo}, {y_hi}]")
    if y_hi == y_lo or f.b == 0:
        return 0.0, 0.0
    values, errors = _panel_integrals(p, f, branch, [y_lo, y_hi], set(singular), q, s)
    return float(values[0]), float(errors[0])


# ── Unattained supremum (c = 1, n = 0) ───────────────────────────────────────
#
# With b y_end / 2 = 1/Cu the shear rate F^-1(bY/2) = supremum_inverse(Y/y_end)
# grows like (y_end - Y)^(-1/alpha). The last panel is integrated against
# that algebraic weight (QUADPACK qawse), which needs alpha > 1.

def _weighted_shear_rate(p, y_end, y):
    """F^-1 times (y_end - Y)^(1/alpha); finite up to and at y_end."""
    t = y / y_end
    if t <= 0:
        return 0.0
    if t >= 1:
        ratio = 1.0 / p.alpha
    else:
        ratio = (y_end - y) / y_end / -math.expm1(p.alpha * math.log(t))
    return t / p.cu * (y_end * ratio) ** (1.0 / p.alpha)


def _supremum_panels(p, nodes, y_end, q):
    """Panel integrals of the shear rate when it is unbounded at y_end."""
    epsabs = q.target_abs_err / max(1, len(nodes) - 1)
    values = np.zeros(len(nodes) - 1)
    errors = np.zeros(len(nodes) - 1)
    for i, (a, c) in enumerate(zip(nodes[:-1], nodes[1:])):
        if c < y_end:
            values[i], errors[i] = _quad_piece(lambda y: supremum_inverse(p, y / y_end), a, c, epsabs, q)
        elif p.alpha > 1:
            values[i], errors[i] = _quad_piece(lambda y: _weighted_shear_rate(p, y_end, y), a, c, epsabs, q,
                                               weight='alg', wvar=(0.0, -1.0 / p.alpha))
        else:
            values[i] = math.inf
    return values, errors


def _supremum_profile(p, f, y_end, grid, q, s, regime, notes, from_axis):
    """Profile whose shear rate reaches the unattained supremum at y_end."""
    nodes = np.union1d(grid, [y_end])
    values, errors = _supremum_panels(p, nodes, y_end, q)
    if from_axis:
        u = f.sign * np.concatenate([[0.0], np.cumsum(values)])
    else:
        outer = np.concatenate([np.cumsum(values[::-1])[::-1], [0.0]])
        u = -f.sign * outer[np.searchsorted(nodes, grid)]
    u_y = f.sign * np.array([supremum_inverse(p, y / y_end) for y in grid])
    profile = VelocityProfile(
        grid=grid, u=u, u_y=u_y, u_yy=_curvature(p, f, grid, u_y, {y_end}, s),
        y_end=y_end, regime=regime, singular_points=(y_end,), undetermined_constant=from_axis,
        quadrature_error=float(np.sum(errors)),
        notes=list(notes) + [f"bY/2 taken as 1/Cu at Y = {y_end!r}; U_Y unbounded there"])
    profile.max_residual = ode_residual(p, f, profile)
    return profile


# ── Profiles ─────────────────────────────────────────────────────────────────

def _output_grid(y_end, q, radii, singular):
    if radii is not None:
        grid = np.asarray(radii, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise DomainError("radii must be a non-empty 1-D sequence")
        if np.any(np.diff(grid) <= 0) or grid[0] < 0 or grid[-1] > y_end:
            raise DomainError(f"radii must be strictly increasing inside [0, {y_end}]")
        return grid
    grid = np.linspace(0.0, y_end, q.grid_size)
    inner = np.array([y for y in singular if 0 < y < y_end])
    if inner.size == 0:
        return grid
    # a singular radius replaces a grid point it coincides with up to rounding
    spacing = y_end / (q.grid_size - 1)
    keep = np.all(np.abs(grid[:, None] - inner[None, :]) > 1e-9 * spacing, axis=1)
    keep[0] = keep[-1] = True
    return np.union1d(grid[keep], inner)


def _curvature(p, f, grid, u_y, singular, s):
    u_yy = np.empty_like(grid)
    for i, y in enumerate(grid):
        if y in singular:
            u_yy[i] = math.inf
            continue
        slope = flux_prime(p, abs(u_y[i]))
        u_yy[i] = math.inf if slope <= max(s.abs_tol, SINGULAR_SLOPE_TOL) else f.sign * f.b / (2.0 * slope)
    return u_yy


def velocity_profile(p, f, q=None, s=None, radii=None):
    """Profile on [0, R] for every regime with a classical or generalized solution."""
    q = q or QuadratureSettings()
    s = s or EvalSettings()
    report = classify(p, f, s)
    regime = report.regime
    if regime is Regime.NO_CLASSICAL_SOLUTION:
        raise RegimeMismatchError(
            f"bR/2 = {f.half_wall_stress!r} exceeds the flux maximum; no classical solution (use partial_profile)")

    r = f.r
    if regime is Regime.TRIVIAL_ZERO_GRADIENT or regime is Regime.NEWTONIAN:
        grid = _output_grid(r, q, radii, ())
        u = f.sign * f.b / 4.0 * (grid ** 2 - r ** 2)
        profile = VelocityProfile(
            grid=grid, u=u, u_y=f.sign * f.b * grid / 2.0,
            u_yy=np.full_like(grid, f.sign * f.b / 2.0), y_end=r, regime=regime)
        profile.max_residual = ode_residual(p, f, profile)
        return profile

    branch = admissible_branch(p, s)
    if not branch.attained and regime is Regime.CLASSICAL_BOUNDARY_SINGULAR:
        grid = _output_grid(r, q, radii, ())
        return _supremum_profile(p, f, r, grid, q, s, regime, report.notes, from_axis=False)
    if branch.bounded and f.half_wall_stress > branch.upper_flux:
        logger.warning(f"bR/2 = {f.half_wall_stress!r} exceeds F(zeta1) = {branch.upper_flux!r} "
                       f"within eq_tol: shear rates at the wall clamped to zeta1")

    singular = set()
    if regime is Regime.GENERALIZED_INTERIOR_SINGULAR:
        singular.add(report.critical.y_singular)
    elif regime is Regime.CLASSICAL_BOUNDARY_SINGULAR:
        singular.add(r)

    grid = _output_grid(r, q, radii, singular)
    nodes = np.union1d(grid, sorted(singular | {r}))
    values, errors = _panel_integrals(p, f, branch, nodes, singular, q, s)
    # U(nodes[i]) = -sum of panels outside it
    outer = np.concatenate([np.cumsum(values[::-1])[::-1], [0.0]])
    outer_err = np.concatenate([np.cumsum(errors[::-1])[::-1], [0.0]])
    index = np.searchsorted(nodes, grid)
    u = -f.sign * outer[index]

    u_y = shear_rate_profile(p, f, branch, grid, s)
    profile = VelocityProfile(
        grid=grid, u=u, u_y=u_y, u_yy=_curvature(p, f, grid, u_y, singular, s),
        y_end=r, regime=regime, singular_points=tuple(sorted(singular)),
        quadrature_error=float(outer_err[0]), notes=list(report.notes))
    profile.max_residual = ode_residual(p, f, profile)
    logger.info(f"{regime.value} profile: {grid.size} points, U(0) = {u[0]!r}, "
                f"residual {profile.max_residual:.3g}, quadrature error {profile.quadrature_error:.3g}")
    return profile


def partial_profile(p, f, q=None, s=None):
    """Profile on [0, Y1] when no classical solution reaches the wall.

    The wall condition cannot be imposed, so U is anchored at the axis
    (U(0) = 0) and the additive constant is left undetermined.
    """
    q = q or QuadratureSettings()
    s = s or EvalSettings()
    report = classify(p, f, s)
    if report.regime is not Regime.NO_CLASSICAL_SOLUTION:
        raise RegimeMismatchError(f"partial profile only applies to NoClassicalSolution, got {report.regime.value}")
    branch = admissible_branch(p, s)
    y1 = report.critical.y_singular
    axis_note = "U(0) anchored at 0; additive constant undetermined"
    if not branch.attained:
        grid = _output_grid(y1, q, None, ())
        return _supremum_profile(p, f, y1, grid, q, s, report.regime,
                                 list(report.notes) + [axis_note], from_axis=True)

    singular = {y1}
    grid = _output_grid(y1, q, None, singular)
    values, errors = _panel_integrals(p, f, branch, grid, singular, q, s)
    u = f.sign * np.concatenate([[0.0], np.cumsum(values)])
    u_y = shear_rate_profile(p, f, branch, grid, s)
    profile = VelocityProfile(
        grid=grid, u=u, u_y=u_y, u_yy=_curvature(p, f, grid, u_y, singular, s),
        y_end=y1, regime=report.regime, singular_points=(y1,), undetermined_constant=True,
        quadrature_error=float(np.sum(errors)),
        notes=list(report.notes) + [axis_note])
    profile.max_residual = ode_residual(p, f, profile)
    return profile


def ode_residual(p, f, profile):
    """max |F(|U_Y|) - b|Y|/2| over samples with a finite shear rate."""
    finite = np.isfinite(profile.u_y)
    if not np.any(finite):
        return 0.0
    residuals = [abs(flux(p, abs(g)) - f.b * abs(y) / 2.0)
                 for y, g in zip(profile.grid[finite], profile.u_y[finite])]
    return float(max(residuals))
