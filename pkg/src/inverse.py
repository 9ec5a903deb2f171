"""Inversion of the flux function along the branch through the origin.

The steady shear rate is U_Y(Y) = F^-1(bY/2). F may be non-monotone, so the
inverse is only defined on the admissible branch: the connected piece of the
graph of F that starts at (0, 0) and on which F is non-decreasing. The other
branches of F^-1 give U_Y(0) != 0 and are never produced.

Inversion is bracketed root finding on [0, upper_zeta]. Brent's method is
used away from a finite branch end; close to it F is flat (F'(zeta1) = 0)
and plain bisection is used instead, since the secant and inverse-quadratic
steps degrade where the slope vanishes. For c = 1, n = 0 F^-1 has a closed
form and no root finding is needed.

A flux value above a finite branch end by no more than eq_tol (relative) is
clamped to zeta1 and logged at debug level; profile builders report the
clamp once.
"""

import logging
import math

from pydantic import BaseModel, ConfigDict
from scipy import optimize

from config_schema import EvalSettings
from model import DomainError, PoiseuilleError, flux
from regime import (
    MIN_RTOL, NonConvergenceError, bracketed_root, expand_upper_bracket, find_zeta_roots,
    has_finite_branch,
)

logger = logging.getLogger(__name__)

# Fraction of upper_flux below a finite branch end inside which bisection is used.
NEAR_ENDPOINT = 1e-3


class OutOfRangeError(PoiseuilleError):
    """The requested flux value lies beyond the admissible branch."""


class InverseBranch(BaseModel):
    """[0, upper_zeta] with F([0, upper_zeta]) = [0, upper_flux].

    upper_zeta is math.inf for an unbounded branch. For c = 1, n = 0 the
    branch is unbounded but F only approaches upper_flux = 1/Cu
    (attained = False).
    """
    model_config = ConfigDict(frozen=True)

    upper_zeta: float
    upper_flux: float
    attained: bool = True

    @property
    def bounded(self):
        return math.isfinite(self.upper_zeta)


def admissible_branch(p, s=None):
    s = s or EvalSettings()
    if has_finite_branch(p, s):
        roots = find_zeta_roots(p, s)
        return InverseBranch(upper_zeta=roots.zeta1, upper_flux=roots.flux_supremum)
    if not p.is_newtonian and p.is_full_thinning and p.n == 0:
        return InverseBranch(upper_zeta=math.inf, upper_flux=1.0 / p.cu, attained=False)
    return InverseBranch(upper_zeta=math.inf, upper_flux=math.inf)


def supremum_inverse(p, t):
    """c = 1, n = 0: F^-1(t/Cu) = (t/Cu) (1 - t^alpha)^(-1/alpha) for 0 <= t < 1.

    t is the fraction of the supremum 1/Cu; 1 - t^alpha is formed with
    expm1 so the inverse keeps its accuracy as t approaches 1.
    """
    if t <= 0:
        return 0.0
    if t >= 1:
        return math.inf
    return t / p.cu * (-math.expm1(p.alpha * math.log(t))) ** (-1.0 / p.alpha)


def clamps_to_endpoint(br, x, s=None):
    """Whether x sits on a finite branch end within eq_tol."""
    s = s or EvalSettings()
    return br.bounded and x >= br.upper_flux * (1.0 - s.eq_tol)


def invert_flux(p, br, x, s=None):
    """zeta in [0, upper_zeta] with F(zeta) = x."""
    s = s or EvalSettings()
    if not (x >= 0) or math.isinf(x):
        raise DomainError(f"flux value must be finite and >= 0, got {x}")
    if x == 0:
        return 0.0
    if p.is_newtonian:
        return float(x)

    if not br.attained:
        if x >= br.upper_flux * (1.0 - s.eq_tol):
            raise OutOfRangeError(
                f"flux {x!r} at or beyond the unattained supremum {br.upper_flux!r}")
        return supremum_inverse(p, x * p.cu)
    if br.bounded:
        if x >= br.upper_flux:
            if x - br.upper_flux <= s.eq_tol * br.upper_flux:
                if x > br.upper_flux:
                    logger.debug(f"flux {x!r} exceeds branch maximum {br.upper_flux!r} "
                                 f"within eq_tol, clamped to zeta1")
                return br.upper_zeta
            raise OutOfRangeError(f"flux {x!r} beyond branch maximum {br.upper_flux!r}")

    residual = lambda z: flux(p, z) - x
    if br.bounded:
        hi = br.upper_zeta
    else:
        # mu <= 1 for shear-thinning fluids puts the root at or above x.
        hi = expand_upper_bracket(residual, max(x, s.abs_tol), s, "flux inversion bracket")

    if br.bounded and x > br.upper_flux * (1.0 - NEAR_ENDPOINT):
        root, info = optimize.bisect(residual, 0.0, hi, xtol=s.abs_tol,
                                     rtol=max(s.rel_tol, MIN_RTOL), maxiter=max(s.max_iter, 100),
                                     full_output=True, disp=False)
        if not info.converged:
            raise NonConvergenceError(f"bisection near zeta1 stopped after {info.iterations} iterations")
        return root
    return bracketed_root(residual, 0.0, hi, s, "flux inversion")
