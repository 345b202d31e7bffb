"""Analytic functions, self-maps of the disc, and norm computations.

The function algebra is deliberately small - polynomials, conformal powers
scale * ((1-|a|)/(1 - conj(a) z))^gamma, sums and scalar multiples - so that
n-th derivatives are available in closed form.  Derivative accuracy drives
every criterion downstream, which is why arbitrary closures are not
accepted.  The principal branch of the complex power is unambiguous here:
1 - conj(a) z has positive real part whenever a and z lie in the disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasepointError, DomainError, SelfMapViolationError

__all__ = [
    "AnalyticFunction",
    "Polynomial",
    "ConformalPower",
    "FunctionSum",
    "SelfMap",
    "Identity",
    "Scale",
    "PowerMap",
    "Moebius",
    "MapComposition",
    "OperatorSpec",
    "deriv_eval",
    "apply_operator",
    "bergman_norm",
    "norm_against_measure",
    "hardy_means",
    "test_function",
]


class AnalyticFunction:
    """Base class: evaluable on complex arrays, with exact n-th derivatives."""

    def __call__(self, z):
        return self.eval_deriv(0, z)

    def eval_deriv(self, n, z):
        raise NotImplementedError

    def __add__(self, other):
        if not isinstance(other, AnalyticFunction):
            return NotImplemented
        return FunctionSum([self, other], [1.0, 1.0])

    def __mul__(self, factor):
        return FunctionSum([self], [complex(factor)])

    __rmul__ = __mul__


class Polynomial(AnalyticFunction):
    """Finite Taylor polynomial with complex coefficients (ascending order)."""

    def __init__(self, coeffs):
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if coeffs.ndim != 1:
            raise DomainError("polynomial coefficients must be a 1-d sequence")
        self.coeffs = coeffs

    def eval_deriv(self, n, z):
        if n < 0:
            raise DomainError("derivative order must be nonnegative")
        z = np.asarray(z, dtype=complex)
        if n >= len(self.coeffs):
            return np.zeros_like(z)
        c = self.coeffs if n == 0 else np.polynomial.polynomial.polyder(self.coeffs, n)
        return np.polynomial.polynomial.polyval(z, c)

    def __repr__(self):
        return f"Polynomial(deg={len(self.coeffs) - 1})"


class ConformalPower(AnalyticFunction):
    """scale * ((1-|a|) / (1 - conj(a) z))^gamma.

    The n-th derivative is scale (1-|a|)^gamma conj(a)^n gamma (gamma+1)
    ... (gamma+n-1) (1 - conj(a) z)^(-gamma-n).
    """

    def __init__(self, base, gamma, scale=1.0):
        base = complex(base)
        if abs(base) >= 1.0:
            raise DomainError("conformal power base must lie in the disc")
        if gamma <= 0:
            raise DomainError("conformal power exponent must be positive")
        self.base = base
        self.gamma = float(gamma)
        self.scale = complex(scale)

    def eval_deriv(self, n, z):
        if n < 0:
            raise DomainError("derivative order must be nonnegative")
        z = np.asarray(z, dtype=complex)
        rising = 1.0
        for i in range(n):
            rising *= self.gamma + i
        coef = (
            self.scale
            * (1.0 - abs(self.base)) ** self.gamma
            * np.conj(self.base) ** n
            * rising
        )
        return coef * (1.0 - np.conj(self.base) * z) ** (-(self.gamma + n))

    def __repr__(self):
        return f"ConformalPower(a={self.base}, gamma={self.gamma}, scale={self.scale})"


class FunctionSum(AnalyticFunction):
    """Linear combination of analytic functions."""

    def __init__(self, parts, factors=None):
        self.parts = list(parts)
        self.factors = [complex(f) for f in (factors or [1.0] * len(self.parts))]
        if len(self.parts) != len(self.factors):
            raise DomainError("parts and factors must match")

    def eval_deriv(self, n, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c, f in zip(self.factors, self.parts):
            out = out + c * f.eval_deriv(n, z)
        return out


def deriv_eval(f, n, z):
    """f^{(n)}(z); n = 0 is plain evaluation."""
    return f.eval_deriv(n, z)


# ---------------------------------------------------------------------------
# self-maps
# ---------------------------------------------------------------------------

class SelfMap:
    """Analytic self-map of the disc with a first derivative and a sup bound."""

    def __call__(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError

    def image_radius(self, s):
        """sup of |phi| over the closed disc of radius s (structural)."""
        raise NotImplementedError

    def sup_abs(self):
        return self.image_radius(1.0)


class Identity(SelfMap):
    def __call__(self, z):
        return np.asarray(z, dtype=complex)

    def deriv(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    def image_radius(self, s):
        return s

    def __repr__(self):
        return "Identity()"


class Scale(SelfMap):
    def __init__(self, ratio):
        if not (0.0 < ratio <= 1.0):
            raise DomainError("scale ratio must lie in (0, 1]")
        self.ratio = float(ratio)

    def __call__(self, z):
        return self.ratio * np.asarray(z, dtype=complex)

    def deriv(self, z):
        return np.full_like(np.asarray(z, dtype=complex), self.ratio)

    def image_radius(self, s):
        return self.ratio * s

    def __repr__(self):
        return f"Scale({self.ratio})"


class PowerMap(SelfMap):
    def __init__(self, k):
        if int(k) != k or k < 1:
            raise DomainError("power map exponent must be an integer >= 1")
        self.k = int(k)

    def __call__(self, z):
        return np.asarray(z, dtype=complex) ** self.k

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return self.k * z ** (self.k - 1)

    def image_radius(self, s):
        return s ** self.k

    def __repr__(self):
        return f"PowerMap({self.k})"


class Moebius(SelfMap):
    """Disc automorphism z -> (z - c) / (1 - conj(c) z)."""

    def __init__(self, c):
        c = complex(c)
        if abs(c) >= 1.0:
            raise DomainError("Moebius parameter must lie in the disc")
        self.c = c

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (z - self.c) / (1.0 - np.conj(self.c) * z)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return (1.0 - abs(self.c) ** 2) / (1.0 - np.conj(self.c) * z) ** 2

    def image_radius(self, s):
        return (s + abs(self.c)) / (1.0 + s * abs(self.c))

    def __repr__(self):
        return f"Moebius({self.c})"


class MapComposition(SelfMap):
    """Apply the listed maps in order: z -> maps[-1](... maps[0](z))."""

    def __init__(self, maps):
        self.maps = list(maps)
        if not self.maps:
            raise DomainError("composition needs at least one map")

    def __call__(self, z):
        out = np.asarray(z, dtype=complex)
        for m in self.maps:
            out = m(out)
        return out

    def deriv(self, z):
        out = np.asarray(z, dtype=complex)
        d = np.ones_like(out)
        for m in self.maps:
            d = d * m.deriv(out)
            out = m(out)
        return d

    def image_radius(self, s):
        for m in self.maps:
            s = m.image_radius(s)
        return s

    def __repr__(self):
        return f"MapComposition({self.maps})"


@dataclass(frozen=True)
class OperatorSpec:
    """u * (f^{(n)} o phi): composition for n=0, u==1; weighted composition
    for n=0; differentiation-composition for n >= 1."""

    phi: SelfMap
    u: AnalyticFunction
    n: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("derivative order must be nonnegative")


def apply_operator(op, f):
    """The function z -> u(z) * f^{(n)}(phi(z)), vectorized."""

    def g(z):
        z = np.asarray(z, dtype=complex)
        w = op.phi(z)
        if np.any(np.abs(w) >= 1.0):
            raise SelfMapViolationError("self-map left the open disc")
        return op.u(z) * f.eval_deriv(op.n, w)

    return g


# ---------------------------------------------------------------------------
# norms and test functions
# ---------------------------------------------------------------------------

def bergman_norm(f, p, w, grid):
    """(int |f|^p w dA)^(1/p) on the grid; f a function or node-value array."""
    if p <= 0:
        raise DomainError("p must be positive")
    vals = np.abs(f(grid.nodes) if callable(f) or isinstance(f, AnalyticFunction) else f)
    dens = w.density_at_gap(grid.gaps)
    return float(np.sum(vals ** p * dens * grid.weights) ** (1.0 / p))


def norm_against_measure(g, q, mu):
    """(int |g|^q d(mu))^(1/q) over the measure's discrete support."""
    if q <= 0:
        raise DomainError("q must be positive")
    pts, masses = mu.support_nodes()
    return float(np.sum(np.abs(g(pts)) ** q * masses) ** (1.0 / q))


def hardy_means(f, p, r, n_angles=2048):
    """Circle mean M_p(r, f); p = inf gives the maximum modulus."""
    if not (0.0 <= r < 1.0):
        raise DomainError("radius must lie in [0, 1)")
    theta = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    vals = np.abs(f(r * np.exp(1j * theta)))
    if p == math.inf:
        return float(np.max(vals))
    if p <= 0:
        raise DomainError("p must be positive or inf")
    return float(np.mean(vals ** p) ** (1.0 / p))


def test_function(a, gamma, p, w):
    """Unit-scale probe at basepoint a: conformal power normalized by the
    Carleson-square mass at a (whole-disc mass for a = 0)."""
    a = complex(a)
    mass = w.carleson_mass(abs(a))
    if not np.isfinite(mass) or mass < 1e-300:
        raise DegenerateBasepointError(
            f"Carleson mass underflowed at |a| = {abs(a):.12g}"
        )
    return ConformalPower(a, gamma, scale=mass ** (-1.0 / p))
