"""Carreau-Yasuda viscosity law and the flux function of steady pipe flow.

Dimensionless quantities throughout. With X = (Cu*zeta)^alpha:

    mu(zeta)  = 1 - c + c (1 + X)^((n-1)/alpha)
    F(zeta)   = mu(zeta) * zeta
    F'(zeta)  = 1 - c + c (1 + X)^((n-1-alpha)/alpha) (1 + n X)
    F''(zeta) = c (n-1) Cu^alpha zeta^(alpha-1) (1 + X)^((n-1-2 alpha)/alpha) (alpha + 1 + n X)

The steady axial profile satisfies the first integral F(U_Y) = bY/2, so F
is the only constitutive object the rest of the package needs. Every power
is taken of the strictly positive base 1 + X; there is no fractional power
of a negative number anywhere.

h(eta) = 1 - c + c Phi(eta) is the unsteady-energy form of the same slope;
it equals F'(eta) identically and is kept as its own evaluator so that the
equality can be checked rather than assumed.

All functions are pure and scalar. Newtonian fluids (c = 0, Cu = 0 or
n = 1) return the exact Newtonian values, not a rounded evaluation of the
general formula.
"""

import math


class PoiseuilleError(Exception):
    """Base class for every error raised by the solver.

    `reason` carries the one-line diagnostic the CLI prints.
    """

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class DomainError(PoiseuilleError, ValueError):
    """An argument outside the domain of the evaluated function."""


def _check_nonnegative(name, value):
    if not (value >= 0) or math.isinf(value):
        raise DomainError(f"{name} must be finite and >= 0, got {value}")


def _base(p, zeta):
    """1 + (Cu*zeta)^alpha."""
    return 1.0 + (p.cu * zeta) ** p.alpha


def apparent_viscosity(p, gamma):
    _check_nonnegative("shear rate", gamma)
    if p.is_newtonian:
        return 1.0
    return 1.0 - p.c + p.c * _base(p, gamma) ** ((p.n - 1.0) / p.alpha)


def flux(p, zeta):
    """F(zeta) = mu(zeta) * zeta."""
    _check_nonnegative("zeta", zeta)
    if zeta == 0:
        return 0.0
    if p.is_newtonian:
        return float(zeta)
    return apparent_viscosity(p, zeta) * zeta


def flux_prime(p, zeta):
    """F'(zeta); F'(0) = 1 for every fluid."""
    _check_nonnegative("zeta", zeta)
    if p.is_newtonian:
        return 1.0
    x = (p.cu * zeta) ** p.alpha
    return 1.0 - p.c + p.c * (1.0 + x) ** ((p.n - 1.0 - p.alpha) / p.alpha) * (1.0 + p.n * x)


def flux_second(p, zeta):
    """F''(zeta).

    At zeta = 0 the factor zeta^(alpha-1) decides: 0 for alpha > 1, the
    finite limit 2c(n-1)Cu for alpha = 1, unbounded for alpha < 1.
    """
    _check_nonnegative("zeta", zeta)
    if p.is_newtonian:
        return 0.0
    if zeta == 0:
        if p.alpha > 1:
            return 0.0
        if p.alpha == 1:
            return 2.0 * p.c * (p.n - 1.0) * p.cu
        raise DomainError(f"F'' is unbounded at zero for alpha={p.alpha} < 1")
    x = (p.cu * zeta) ** p.alpha
    return (p.c * (p.n - 1.0) * p.cu ** p.alpha * zeta ** (p.alpha - 1.0)
            * (1.0 + x) ** ((p.n - 1.0 - 2.0 * p.alpha) / p.alpha)
            * (p.alpha + 1.0 + p.n * x))


def h_function(p, eta):
    """h(eta) = 1 - c + c Phi(eta) with
    Phi = (1-n)(1+X)^((n-1-alpha)/alpha) + n (1+X)^((n-1)/alpha)."""
    _check_nonnegative("eta", eta)
    if p.is_newtonian:
        return 1.0
    base = _base(p, eta)
    phi = ((1.0 - p.n) * base ** ((p.n - 1.0 - p.alpha) / p.alpha)
           + p.n * base ** ((p.n - 1.0) / p.alpha))
    return 1.0 - p.c + p.c * phi
