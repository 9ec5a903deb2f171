"""Regime classification of steady pipe Poiseuille flow.

The first integral F(U_Y) = bY/2 has a classical solution exactly when
bY/2 can be inverted along the branch of F through the origin for every
Y in [0, R]. Whether that branch covers [0, bR/2] depends on the shape of F:

  - F strictly increasing (Newtonian, n >= 0, or alpha*c*D < 1 - c):
    always solvable, smooth.
  - alpha*c*D = 1 - c: F has a stationary inflection at zeta0. Past
    Y0 = 2F(zeta0)/b the profile stays C^1 but U_YY blows up at Y0
    (generalized solution with an interior singular point).
  - alpha*c*D > 1 - c: F rises to a local maximum at zeta1 < zeta0, falls
    to a local minimum at zeta2 > zeta0, then rises again. The branch through
    the origin ends at zeta1, so bR/2 > F(zeta1) means no classical solution.
  - c = 1 (no infinite-shear plateau): closed forms. n > 0 increasing, n = 0
    increasing towards the unattained supremum 1/Cu, n < 0 maximum at
    zeta1 = Cu^-1 (-1/n)^(1/alpha) and decreasing after it. For n = 0 at
    bR/2 = 1/Cu the wall shear rate is unbounded; U stays finite only for
    alpha > 1.

Here D = (1 - (alpha+1)/n)^((n-1-alpha)/alpha) and F'(zeta0) = 1 - c - alpha*c*D.

Every regime-defining equality is decided with EvalSettings.relatively_equal,
so parameter sets within eq_tol of a frontier land on the boundary regime and
carry a note naming both neighbours.
"""

import logging
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize

from config_schema import EvalSettings, FlowParams, FluidParams
from model import DomainError, PoiseuilleError, flux, flux_prime

logger = logging.getLogger(__name__)

# Smallest rtol scipy's bracketing solvers accept.
MIN_RTOL = 4 * np.finfo(float).eps


class RootNotFoundError(PoiseuilleError):
    """The requested critical point does not exist for this parameter set."""


class NonConvergenceError(PoiseuilleError):
    """A bracket search or iteration hit max_iter."""


class InconsistentRegimeError(PoiseuilleError):
    """Numerics contradict the discriminant (e.g. F'(zeta0) >= 0 under Above)."""


class RegimeMismatchError(PoiseuilleError):
    """An operation was asked for in a regime where it has no meaning."""


class Comparison(str, Enum):
    BELOW = 'Below'
    EQUAL = 'Equal'
    ABOVE = 'Above'


class Regime(str, Enum):
    TRIVIAL_ZERO_GRADIENT = 'TrivialZeroGradient'
    NEWTONIAN = 'Newtonian'
    CLASSICAL_SMOOTH = 'ClassicalSmooth'
    CLASSICAL_BOUNDARY_SINGULAR = 'ClassicalBoundarySingular'
    GENERALIZED_INTERIOR_SINGULAR = 'GeneralizedInteriorSingular'
    NO_CLASSICAL_SOLUTION = 'NoClassicalSolution'

    @property
    def exit_code(self):
        return REGIME_EXIT_CODES[self]

    @property
    def is_classical(self):
        return self not in (Regime.GENERALIZED_INTERIOR_SINGULAR, Regime.NO_CLASSICAL_SOLUTION)


REGIME_EXIT_CODES = {
    Regime.TRIVIAL_ZERO_GRADIENT: 0,
    Regime.NEWTONIAN: 0,
    Regime.CLASSICAL_SMOOTH: 0,
    Regime.CLASSICAL_BOUNDARY_SINGULAR: 10,
    Regime.GENERALIZED_INTERIOR_SINGULAR: 20,
    Regime.NO_CLASSICAL_SOLUTION: 30,
}


class SingularKind(str, Enum):
    INTERIOR_Y0 = 'InteriorY0'
    BRANCH_END_Y1 = 'BranchEndY1'


# Governing result per decision-tree branch: (citation, criterion).
CRITERIA = {
    'trivial': ("Theorems 2.1-2.4", "b = 0, only the trivial solution"),
    'newtonian': ("Theorem 2.1", "Newtonian limit (c = 0, Cu = 0 or n = 1)"),
    'n_nonnegative': ("Theorem 2.2", "monotone flux, 0 < c < 1, n >= 0"),
    'below': ("Theorem 2.2", "monotone flux, alpha*c*D < 1 - c"),
    'equal': ("Theorem 2.3", "stationary inflection alpha*c*D = 1 - c, F(zeta0) against bR/2"),
    'above': ("Theorem 2.4", "local flux maximum alpha*c*D > 1 - c, F(zeta1) against bR/2"),
    'full_positive': ("Theorem 4.1(a)", "c = 1, n > 0, monotone flux"),
    'full_zero': ("Theorem 4.1(b)", "c = 1, n = 0, unattained sup F = 1/Cu against bR/2"),
    'full_negative': ("Theorem 4.1(c)", "c = 1, n < 0, closed-form F(zeta1) against bR/2"),
}
# Remark covering the wall-singular equality case of a branch.
BOUNDARY_REMARKS = {
    'equal': "Remark 2.1",
    'above': "Remark 2.2",
    'full_zero': "Remark 4.1",
    'full_negative': "Remark 4.1",
}


def citation(criterion, boundary=False):
    """Citation such as "Theorem 2.4 / Remark 2.2: <criterion>" for a branch."""
    head, text = CRITERIA[criterion]
    if boundary:
        head = f"{head} / {BOUNDARY_REMARKS[criterion]}"
    return f"{head}: {text}"


class Discriminant(NamedTuple):
    comparison: Comparison
    lhs: float
    rhs: float


class ZetaRoots(NamedTuple):
    zeta1: Optional[float]
    zeta2: Optional[float]
    flux_supremum: float
    supremum_attained: bool


class CriticalPoints(BaseModel):
    """Critical shear rates and singular radius; absent entries are None."""
    model_config = ConfigDict(frozen=True)

    zeta0: Optional[float] = None
    zeta1: Optional[float] = None
    zeta2: Optional[float] = None
    f_at_zeta0: Optional[float] = None
    f_at_zeta1: Optional[float] = None
    flux_supremum: Optional[float] = None
    y_singular: Optional[float] = None
    y_singular_kind: Optional[str] = None


class RegimeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    regime: Regime
    theorem: str
    critical: CriticalPoints
    fluid: FluidParams
    flow: FlowParams
    discriminant: Optional[Comparison] = None
    discriminant_lhs: Optional[float] = None
    discriminant_rhs: Optional[float] = None
    existence_margin: Optional[float] = None
    inflection_margin: Optional[float] = None
    critical_gradient: Optional[float] = None
    notes: tuple[str, ...] = ()

    @property
    def exit_code(self):
        return self.regime.exit_code


# ── Critical points ──────────────────────────────────────────────────────────

def zeta_naught(p):
    """Zero of F'' away from the origin: Cu^-1 (-(alpha+1)/n)^(1/alpha)."""
    if p.n >= 0 or p.cu == 0:
        raise DomainError(f"zeta0 needs n < 0 and Cu > 0 (n={p.n}, Cu={p.cu})")
    return (-(p.alpha + 1.0) / p.n) ** (1.0 / p.alpha) / p.cu


def discriminant(p, s=None):
    """Compare D = (1 - (alpha+1)/n)^((n-1-alpha)/alpha) with (1-c)/(alpha*c)."""
    s = s or EvalSettings()
    if p.n >= 0 or not 0 < p.c < 1 or p.cu == 0:
        raise DomainError(f"discriminant needs n < 0, 0 < c < 1, Cu > 0 (n={p.n}, c={p.c}, Cu={p.cu})")
    lhs = (1.0 - (p.alpha + 1.0) / p.n) ** ((p.n - 1.0 - p.alpha) / p.alpha)
    rhs = (1.0 - p.c) / (p.alpha * p.c)
    if s.relatively_equal(lhs, rhs):
        comparison = Comparison.EQUAL
    elif lhs < rhs:
        comparison = Comparison.BELOW
    else:
        comparison = Comparison.ABOVE
    return Discriminant(comparison, lhs, rhs)


def bracketed_root(func, lo, hi, s, label):
    """Brent's method on [lo, hi] after checking the bracket.

    Raises RootNotFoundError when func does not change sign and
    NonConvergenceError when Brent exhausts max_iter.
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise RootNotFoundError(f"{label}: no sign change on [{lo}, {hi}]")
    root, info = optimize.brentq(func, lo, hi, xtol=s.abs_tol, rtol=max(s.rel_tol, MIN_RTOL),
                                 maxiter=s.max_iter, full_output=True, disp=False)
    if not info.converged:
        raise NonConvergenceError(f"{label}: Brent stopped after {info.iterations} iterations")
    logger.debug(f"{label}: root {root!r} in {info.iterations} iterations")
    return root


def expand_upper_bracket(func, start, s, label):
    """Double `start` until func > 0; at most max_iter doublings."""
    hi = start
    for _ in range(s.max_iter):
        if func(hi) > 0:
            return hi
        hi *= 2.0
    raise NonConvergenceError(f"{label}: no positive value up to {hi}")


def full_thinning_zeta1(p):
    """c = 1, n < 0: the flux maximum Cu^-1 (-1/n)^(1/alpha)."""
    return (-1.0 / p.n) ** (1.0 / p.alpha) / p.cu


def full_thinning_flux_max(p):
    """c = 1, n < 0: F(zeta1) = Cu^-1 ((n-1)/n)^((n-1)/alpha) (-1/n)^(1/alpha)."""
    return ((p.n - 1.0) / p.n) ** ((p.n - 1.0) / p.alpha) * (-1.0 / p.n) ** (1.0 / p.alpha) / p.cu


def find_zeta_roots(p, s=None):
    """Zeros zeta1 < zeta0 < zeta2 of F', or the c = 1 closed forms."""
    s = s or EvalSettings()
    if p.is_newtonian:
        raise RootNotFoundError("F' = 1 for a Newtonian fluid")
    if p.is_full_thinning:
        if p.n < 0:
            zeta1 = full_thinning_zeta1(p)
            return ZetaRoots(zeta1, None, full_thinning_flux_max(p), True)
        if p.n == 0:
            return ZetaRoots(None, None, 1.0 / p.cu, False)
        raise RootNotFoundError(f"F is increasing for c = 1, n = {p.n} > 0")

    if p.n >= 0:
        raise RootNotFoundError(f"F is increasing for n = {p.n} >= 0")
    comparison = discriminant(p, s).comparison
    if comparison is not Comparison.ABOVE:
        raise RootNotFoundError(f"F' has no sign change (discriminant {comparison.value})")

    z0 = zeta_naught(p)
    slope = lambda z: flux_prime(p, z)
    if slope(z0) >= 0:
        raise InconsistentRegimeError(f"F'(zeta0) = {slope(z0)!r} >= 0 with discriminant Above")
    zeta1 = bracketed_root(slope, s.abs_tol, z0, s, "zeta1")
    hi = expand_upper_bracket(slope, 2.0 * z0, s, "zeta2 bracket")
    zeta2 = bracketed_root(slope, z0, hi, s, "zeta2")
    return ZetaRoots(zeta1, zeta2, flux(p, zeta1), True)


def _landmarks(p, s):
    """Every critical point that exists for p, plus the discriminant."""
    points = {}
    disc = None
    if p.is_newtonian:
        return points, disc
    if p.n < 0:
        points['zeta0'] = zeta_naught(p)
    if 0 < p.c < 1 and p.n < 0:
        disc = discriminant(p, s)
        if disc.comparison is Comparison.EQUAL:
            points['f_at_zeta0'] = flux(p, points['zeta0'])
    if (p.is_full_thinning and p.n <= 0) or (disc is not None and disc.comparison is Comparison.ABOVE):
        roots = find_zeta_roots(p, s)
        points['zeta1'] = roots.zeta1
        points['zeta2'] = roots.zeta2
        points['flux_supremum'] = roots.flux_supremum
        if roots.zeta1 is not None:
            points['f_at_zeta1'] = roots.flux_supremum
    return points, disc


def _three_way(limit, half, s):
    if s.relatively_equal(limit, half):
        return Comparison.EQUAL
    return Comparison.ABOVE if limit > half else Comparison.BELOW


# ── Classification ───────────────────────────────────────────────────────────

def classify(p, f, s=None):
    """Full decision tree; see the module docstring."""
    s = s or EvalSettings()
    points, disc = _landmarks(p, s)
    half = f.half_wall_stress
    notes = []
    extra = {}
    if f.sign < 0:
        notes.append("negative gradient: profile is the negation of the |b| profile")
    if disc is not None:
        extra.update(discriminant=disc.comparison, discriminant_lhs=disc.lhs, discriminant_rhs=disc.rhs)
        if disc.comparison is Comparison.EQUAL:
            notes.append("alpha*c*D equals 1 - c within eq_tol: between the monotone "
                         "(ClassicalSmooth) and local-maximum (NoClassicalSolution) families")

    if f.b == 0:
        regime, criterion = Regime.TRIVIAL_ZERO_GRADIENT, 'trivial'
    elif p.is_newtonian:
        regime, criterion = Regime.NEWTONIAN, 'newtonian'
    elif p.is_full_thinning and p.n > 0:
        regime, criterion = Regime.CLASSICAL_SMOOTH, 'full_positive'
    elif not p.is_full_thinning and (p.n >= 0 or disc.comparison is Comparison.BELOW):
        regime = Regime.CLASSICAL_SMOOTH
        criterion = 'n_nonnegative' if p.n >= 0 else 'below'
    elif disc is not None and disc.comparison is Comparison.EQUAL:
        criterion = 'equal'
        limit = points['f_at_zeta0']
        extra['inflection_margin'] = limit - half
        points['y_singular'] = 2.0 * limit / f.b
        points['y_singular_kind'] = 'Y0'
        regime = _split(limit, half, s, Regime.GENERALIZED_INTERIOR_SINGULAR, notes, "F(zeta0)")
    else:
        if p.is_full_thinning:
            criterion = 'full_zero' if p.n == 0 else 'full_negative'
        else:
            criterion = 'above'
        limit = points['flux_supremum']
        extra['existence_margin'] = limit - half
        points['y_singular'] = 2.0 * limit / f.b
        points['y_singular_kind'] = 'Y1'
        regime = _split(limit, half, s, Regime.NO_CLASSICAL_SOLUTION, notes, "the flux maximum")
        if p.is_full_thinning and p.n == 0:
            notes.append("sup F = 1/Cu is approached but not attained")
            if regime is Regime.CLASSICAL_BOUNDARY_SINGULAR:
                notes.append("U_Y is unbounded at the wall and behaves like (R - Y)^(-1/alpha)")
                if p.alpha <= 1:
                    notes.append("(R - Y)^(-1/alpha) is not integrable for alpha <= 1: U is unbounded")
                    regime = Regime.NO_CLASSICAL_SOLUTION

    theorem = citation(criterion, boundary=regime is Regime.CLASSICAL_BOUNDARY_SINGULAR)
    logger.info(f"n={p.n} alpha={p.alpha} c={p.c} Cu={p.cu} b={f.signed_b} R={f.r}: {regime.value}")
    return RegimeReport(
        regime=regime,
        theorem=theorem,
        critical=CriticalPoints(**points),
        fluid=p,
        flow=f,
        critical_gradient=critical_pressure_gradient(p, f.r, s),
        notes=tuple(notes),
        **extra,
    )


def _split(limit, half, s, failing_regime, notes, limit_name):
    comparison = _three_way(limit, half, s)
    if comparison is Comparison.ABOVE:
        return Regime.CLASSICAL_SMOOTH
    if comparison is Comparison.EQUAL:
        notes.append(f"bR/2 equals {limit_name} within eq_tol: between ClassicalSmooth "
                     f"and {failing_regime.value}")
        return Regime.CLASSICAL_BOUNDARY_SINGULAR
    return failing_regime


def singular_radius(p, f, kind, s=None):
    """Y0 = 2F(zeta0)/b (InteriorY0) or Y1 = 2F(zeta1)/b (BranchEndY1)."""
    s = s or EvalSettings()
    kind = SingularKind(kind)
    if f.b == 0:
        raise DomainError("singular radius undefined for b = 0")
    if kind is SingularKind.INTERIOR_Y0:
        if p.is_newtonian or p.n >= 0 or not 0 < p.c < 1 or discriminant(p, s).comparison is not Comparison.EQUAL:
            raise RegimeMismatchError("Y0 exists only when alpha*c*D = 1 - c")
        return 2.0 * flux(p, zeta_naught(p)) / f.b
    try:
        roots = find_zeta_roots(p, s)
    except RootNotFoundError as e:
        raise RegimeMismatchError(f"Y1 needs a flux maximum: {e.reason}") from e
    return 2.0 * roots.flux_supremum / f.b


# ── Frontier ─────────────────────────────────────────────────────────────────

def critical_pressure_gradient(p, r, s=None):
    """Gradient b at which the smooth classical solution ends, or None.

    2F(zeta1)/R (or 2/(Cu R) for c = 1, n = 0) where a flux maximum exists,
    2F(zeta0)/R in the stationary-inflection case.
    """
    s = s or EvalSettings()
    if p.is_newtonian or p.n > 0 or (p.n == 0 and not p.is_full_thinning):
        return None
    if p.is_full_thinning:
        return 2.0 * find_zeta_roots(p, s).flux_supremum / r
    comparison = discriminant(p, s).comparison
    if comparison is Comparison.BELOW:
        return None
    if comparison is Comparison.EQUAL:
        return 2.0 * flux(p, zeta_naught(p)) / r
    return 2.0 * find_zeta_roots(p, s).flux_supremum / r


def bisect_frontier(p, r, b_lo, b_hi, s=None, tol=1e-10):
    """Locate the classical / non-classical frontier in b by classification alone."""
    s = s or EvalSettings()

    def side(b):
        return 1.0 if classify(p, FlowParams(b=b, r=r), s).regime.is_classical else -1.0

    if side(b_lo) < 0 or side(b_hi) > 0:
        raise DomainError(f"[{b_lo}, {b_hi}] does not straddle the classical frontier")
    b_star = optimize.bisect(side, b_lo, b_hi, xtol=tol, rtol=MIN_RTOL, maxiter=max(s.max_iter, 100))
    logger.debug(f"frontier bisection: b* = {b_star!r}")
    return b_star


def has_finite_branch(p, s):
    """Whether the branch through the origin ends at a finite zeta1."""
    if p.is_newtonian:
        return False
    if p.is_full_thinning:
        return p.n < 0
    return p.n < 0 and discriminant(p, s).comparison is Comparison.ABOVE
