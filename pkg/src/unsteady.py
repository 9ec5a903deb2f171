"""A-priori bounds for the start-up (unsteady) pipe flow problem.

Nothing here integrates in time. Given suprema of the forcing f(T) and of
the initial profile Psi(Y), this module evaluates the computable pieces of
the global-existence theory:

  - M = max{sup|f|, sup|Psi'|/R, 2 sup|Psi|/(R^2 - Y^2)} and the gradient
    bound K1, the limit of C0 = RM/(1-c), C_m = RM / mu(C_{m-1}). The map is
    monotone and C1 <= C0, so the sequence decreases to its limit and stays
    above RM.
  - the forward-backward criterion: with h(eta) = F'(eta), the diffusion in
    the gradient equation changes type exactly when h has two positive roots
    eta1 < eta0 < eta2, which happens iff n < 0 and alpha*D > (1-c)/c.
  - the global-existence conditions: the steady gradient at b = sup|f| and
    sup|Psi'| both stay strictly below zeta1, and |Psi| fits under the steady
    profile with b = sup|f|.

The source formulates the envelope as -U <= Psi <= U, while U <= 0 in the
convention used throughout this package. It is checked as |Psi(Y)| <= -U(Y).
"""

import logging
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict

from config_schema import EvalSettings, FlowParams
from flow_profile import velocity_profile
from inverse import OutOfRangeError, admissible_branch, invert_flux
from model import DomainError, PoiseuilleError, apparent_viscosity, h_function
from regime import (
    Comparison, Regime, bracketed_root, discriminant, expand_upper_bracket,
    zeta_naught,
)

logger = logging.getLogger(__name__)

ENVELOPE_NOTE = ("envelope checked as |Psi(Y)| <= -U(Y) (U <= 0); "
                 "pointwise on the supplied samples only")


class K1Result(BaseModel):
    model_config = ConfigDict(frozen=True)

    m_value: float
    k1: float
    iterations: int
    converged: bool
    fixed_point_residual: float
    history: tuple[float, ...]


class ForwardBackward(BaseModel):
    model_config = ConfigDict(frozen=True)

    flag: bool
    eta0: Optional[float] = None
    eta1: Optional[float] = None
    eta2: Optional[float] = None


class GlobalExistenceCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    gradient_ok: bool
    envelope_ok: Optional[bool]
    gradient_bound: Optional[float] = None
    zeta1: Optional[float] = None
    guaranteed: bool = False
    reasons: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()


class BoundReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    m_value: float
    beta: Optional[float] = None
    k1: Optional[K1Result] = None
    forward_backward: ForwardBackward
    global_existence: Optional[GlobalExistenceCheck] = None
    notes: tuple[str, ...] = ()


def forward_backward_check(p, s=None):
    """True iff h has two positive roots around eta0 = zeta0."""
    s = s or EvalSettings()
    if p.is_newtonian or p.n >= 0:
        return ForwardBackward(flag=False)
    if not p.is_full_thinning and discriminant(p, s).comparison is not Comparison.ABOVE:
        return ForwardBackward(flag=False)

    eta0 = zeta_naught(p)
    h = lambda eta: h_function(p, eta)
    eta1 = bracketed_root(h, s.abs_tol, eta0, s, "eta1")
    eta2 = None
    if not p.is_full_thinning:
        hi = expand_upper_bracket(h, 2.0 * eta0, s, "eta2 bracket")
        eta2 = bracketed_root(h, eta0, hi, s, "eta2")
    return ForwardBackward(flag=True, eta0=eta0, eta1=eta1, eta2=eta2)


def k1_bound(p, r, m, s=None):
    """Iterate C_m = RM / mu(C_{m-1}) from C0 = RM/(1-c) to its limit K1."""
    s = s or EvalSettings()
    if not 0 < p.c < 1:
        raise DomainError(f"K1 needs 0 < c < 1 (C0 = RM/(1-c)), got c={p.c}")
    if p.n >= 0:
        raise DomainError(f"K1 recursion is defined for n < 0, got n={p.n}")
    if not (m >= 0) or math.isinf(m):
        raise DomainError(f"M must be finite and >= 0, got {m}")
    if not (r > 0) or math.isinf(r):
        raise DomainError(f"R must be finite and > 0, got {r}")

    rm = r * m
    step = lambda k: rm / apparent_viscosity(p, k)
    history = [rm / (1.0 - p.c)]
    converged = False
    for _ in range(s.max_iter):
        nxt = step(history[-1])
        history.append(nxt)
        if abs(nxt - history[-2]) <= max(s.abs_tol, s.rel_tol * nxt):
            converged = True
            break
    k1 = history[-1]
    if not converged:
        logger.warning(f"K1 recursion not converged after {s.max_iter} iterations (last {k1!r})")
    return K1Result(
        m_value=m,
        k1=k1,
        iterations=len(history) - 1,
        converged=converged,
        fixed_point_residual=abs(k1 - step(k1)),
        history=tuple(history),
    )


def global_existence_check(p, r, data, s=None):
    """Gradient and envelope conditions with the steady problem at b = sup|f|."""
    s = s or EvalSettings()
    if p.is_newtonian or not 0 < p.c <= 1 or p.n >= 0:
        raise DomainError(f"global existence check needs 0 < c <= 1 and n < 0 (c={p.c}, n={p.n})")

    reasons = []
    notes = [ENVELOPE_NOTE]
    flow = FlowParams(b=data.sup_f, r=r)
    branch = admissible_branch(p, s)
    zeta1 = branch.upper_zeta if branch.bounded else None

    gradient_bound = None
    gradient_ok = False
    if zeta1 is None:
        reasons.append("F' has no zero on the branch through the origin: zeta1 does not exist")
    else:
        try:
            gradient_bound = invert_flux(p, branch, flow.half_wall_stress, s)
        except OutOfRangeError as e:
            reasons.append(f"R sup|f|/2 exceeds F(zeta1): {e.reason}")
        else:
            worst = max(gradient_bound, data.sup_psi_prime)
            gradient_ok = worst < zeta1
            if not gradient_ok:
                reasons.append(f"max(F^-1(R sup|f|/2), sup|Psi'|) = {worst!r} is not below zeta1 = {zeta1!r}")

    envelope_ok = _envelope(p, flow, data, s, reasons)
    if envelope_ok is None:
        notes.append("envelope undecided: no Psi samples supplied")
    check = GlobalExistenceCheck(
        gradient_ok=gradient_ok,
        envelope_ok=envelope_ok,
        gradient_bound=gradient_bound,
        zeta1=zeta1,
        guaranteed=gradient_ok and envelope_ok is True,
        reasons=tuple(reasons),
        notes=tuple(notes),
    )
    if check.guaranteed:
        logger.info(f"global classical solution guaranteed, |W_Y| <= zeta1 = {zeta1!r}")
    return check


def _envelope(p, flow, data, s, reasons):
    if not data.has_samples:
        return True if data.psi_is_zero else None
    if any(y > flow.r for y in data.psi_radii):
        reasons.append("Psi sampled outside [0, R]")
        return False
    if data.psi_is_zero:
        return True
    try:
        steady = velocity_profile(p, flow, s=s, radii=data.psi_radii)
    except PoiseuilleError as e:
        reasons.append(f"no steady profile at b = sup|f|: {e.reason}")
        return False
    if steady.regime not in (Regime.CLASSICAL_SMOOTH, Regime.CLASSICAL_BOUNDARY_SINGULAR,
                             Regime.TRIVIAL_ZERO_GRADIENT):
        reasons.append(f"steady problem at b = sup|f| is {steady.regime.value}")
        return False
    bad = [y for y, psi, u in zip(steady.grid, data.psi_values, steady.u) if abs(psi) > -u]
    if bad:
        reasons.append(f"|Psi| exceeds -U at {len(bad)} sample(s), first at Y = {bad[0]!r}")
        return False
    return True


def bounds_report(p, r, data=None, s=None, m=None):
    """K1, forward-backward flag and global-existence check in one report.

    An explicit `m` overrides the M derived from `data` and always runs the
    K1 recursion (so an unsupported fluid raises DomainError). Without it,
    K1 is computed only where it is defined. The global-existence check
    needs `data`.
    """
    s = s or EvalSettings()
    if m is None and data is None:
        raise DomainError("bounds need either M or the forcing/initial-data suprema")
    m_value = m if m is not None else data.m_value(r)
    notes = []
    k1 = None
    if m is not None or (0 < p.c < 1 and p.n < 0):
        k1 = k1_bound(p, r, m_value, s)
    else:
        notes.append("K1 not defined for this fluid (needs 0 < c < 1, n < 0)")
    existence = None
    if data is None:
        notes.append("global existence check skipped: no sup|f| given")
    elif not p.is_newtonian and 0 < p.c <= 1 and p.n < 0:
        existence = global_existence_check(p, r, data, s)
    else:
        notes.append("global existence check needs 0 < c <= 1, n < 0")
    return BoundReport(
        m_value=m_value,
        beta=data.beta if data is not None else None,
        k1=k1,
        forward_backward=forward_backward_check(p, s),
        global_existence=existence,
        notes=tuple(notes),
    )
