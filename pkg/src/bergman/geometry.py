"""Geometry of the unit disc: pseudohyperbolic metric, regions, lattices.

Points are plain complex numbers (vectorized as complex ndarrays).  Regions
expose a vectorized ``contains`` predicate; the pseudohyperbolic disc also
knows its exact Euclidean parameters and can produce quadrature nodes for
integrals of radial densities over itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceLimitError

__all__ = [
    "rho",
    "pseudo_disc",
    "carleson_square",
    "tent",
    "nt_region",
    "r_lattice",
    "probe_lattice",
    "PseudoDisc",
    "CarlesonSquare",
    "Tent",
    "NtRegion",
    "Annulus",
    "WholeDisc",
]

_TWO_PI = 2.0 * math.pi

_GL24_X, _GL24_W = np.polynomial.legendre.leggauss(24)
_GL24_X = (_GL24_X + 1.0) / 2.0
_GL24_W = _GL24_W / 2.0


def _wrapped_angle_gap(z, w):
    """|arg z - arg w| wrapped into [0, pi]."""
    d = np.angle(np.asarray(z)) - np.angle(np.asarray(w))
    return np.abs((d + math.pi) % _TWO_PI - math.pi)


def rho(a, b):
    """Pseudohyperbolic distance |a-b| / |1 - conj(a) b|; vectorized."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.abs((a - b) / (1.0 - np.conj(a) * b))


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

class WholeDisc:
    """The open unit disc as a region."""

    def contains(self, pts):
        return np.abs(np.asarray(pts, dtype=complex)) < 1.0

    def to_json(self):
        return {"region": "disc"}


@dataclass(frozen=True)
class CarlesonSquare:
    """Polar box attached to the boundary at base z.

    The angular halfwidth is (1-|z|)/2 around arg z.  With the standard
    convention the radial side is [|z|, 1); the "literal" convention uses
    (1-|z|, 1) instead and is kept only for comparison (it makes the box
    grow as |z| -> 1).  Base 0 denotes the whole disc.
    """

    base: complex
    convention: str = "standard"

    def __post_init__(self):
        if abs(self.base) >= 1.0:
            raise DomainError("Carleson square base must lie in the disc")
        if self.convention not in ("standard", "literal"):
            raise DomainError(f"unknown convention {self.convention!r}")

    @property
    def is_whole_disc(self):
        return self.base == 0

    @property
    def angular_halfwidth(self):
        return (1.0 - abs(self.base)) / 2.0

    @property
    def radial_lower(self):
        if self.convention == "standard":
            return abs(self.base)
        return 1.0 - abs(self.base)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=complex)
        inside = np.abs(pts) < 1.0
        if self.is_whole_disc:
            return inside
        radial = np.abs(pts) >= self.radial_lower
        angular = _wrapped_angle_gap(pts, self.base) < self.angular_halfwidth
        return inside & radial & angular

    def to_json(self):
        return {
            "region": "carleson_square",
            "base": [self.base.real, self.base.imag],
            "convention": self.convention,
        }


@dataclass(frozen=True)
class PseudoDisc:
    """Pseudohyperbolic ball of center a and radius r in (0, 1).

    It is a Euclidean disc with center (1-r^2)a / (1-r^2|a|^2) and radius
    (1-|a|^2)r / (1-r^2|a|^2).  gap_outer/gap_inner are 1 minus the outer
    and inner edge radii, computed in cancellation-free form so the disc
    stays usable arbitrarily close to the boundary.
    """

    center: complex
    radius: float
    euclid_center: complex = field(init=False)
    euclid_radius: float = field(init=False)
    gap_outer: float = field(init=False)
    gap_inner: float = field(init=False)

    def __post_init__(self):
        a, r = self.center, self.radius
        if not (0.0 < r < 1.0):
            raise DomainError("pseudohyperbolic radius must lie in (0, 1)")
        m = abs(a)
        if m >= 1.0:
            raise DomainError("center must lie in the disc")
        denom = 1.0 - r * r * m * m
        object.__setattr__(self, "euclid_center", (1.0 - r * r) * a / denom)
        object.__setattr__(self, "euclid_radius", (1.0 - m * m) * r / denom)
        ua = 1.0 - m
        object.__setattr__(self, "gap_outer", ua * (1.0 - r) / (1.0 + r * m))
        object.__setattr__(self, "gap_inner", ua * (1.0 + r) / (1.0 - r * m))

    def contains(self, pts):
        pts = np.asarray(pts, dtype=complex)
        return np.abs(pts - self.euclid_center) < self.euclid_radius

    def polar_sample(self, n_radial=24, n_angular=48):
        """Quadrature nodes for (1/pi) * integral over the disc of a radial density.

        Returns (gaps, weights): gaps are 1-|node| (stable near the
        boundary), weights sum to euclid_radius^2 (the normalized area).
        """
        R = self.euclid_radius
        c = abs(self.euclid_center)
        s = R * _GL24_X
        r_minus_s = R * (1.0 - _GL24_X)
        w_s = R * _GL24_W * s
        psi = (np.arange(n_angular) + 0.5) * (_TWO_PI / n_angular)
        # |c + s e^{i psi}|^2 = c^2 + 2 c s cos(psi) + s^2  (c rotated real)
        sq = c * c + 2.0 * c * np.outer(s, np.cos(psi)) + s[:, None] ** 2
        # 1-|pt|^2 as a sum of nonnegative terms anchored at the outer gap:
        # g0(2-g0) + 2c[(R-s) + 2 s sin^2(psi/2)] + (R-s)(R+s)
        g0 = self.gap_outer
        vers = 2.0 * np.sin(psi / 2.0) ** 2
        one_minus_sq = (
            g0 * (2.0 - g0)
            + 2.0 * c * (r_minus_s[:, None] + np.outer(s, vers))
            + (r_minus_s * (R + s))[:, None]
        )
        gaps = one_minus_sq / (1.0 + np.sqrt(np.minimum(np.maximum(sq, 0.0), 1.0)))
        weights = np.broadcast_to(w_s[:, None] * (2.0 / n_angular), sq.shape)
        return gaps.ravel(), weights.ravel().copy()

    def to_json(self):
        return {
            "region": "pseudo_disc",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
        }


@dataclass(frozen=True)
class Tent:
    """Tent with vertex z != 0: points w with |w| > |z| whose argument is
    within (1 - |z|/|w|)/2 of arg z."""

    vertex: complex

    def __post_init__(self):
        if self.vertex == 0:
            raise DomainError("tent is undefined for vertex 0")
        if abs(self.vertex) >= 1.0:
            raise DomainError("tent vertex must lie in the disc")

    def contains(self, pts):
        pts = np.asarray(pts, dtype=complex)
        m = np.abs(pts)
        v = abs(self.vertex)
        with np.errstate(divide="ignore", invalid="ignore"):
            halfwidth = 0.5 * (1.0 - v / np.where(m > 0, m, np.nan))
        ok = (m < 1.0) & (m > v)
        return ok & (_wrapped_angle_gap(pts, self.vertex) < halfwidth)

    def to_json(self):
        return {"region": "tent", "vertex": [self.vertex.real, self.vertex.imag]}


@dataclass(frozen=True)
class NtRegion:
    """Non-tangential approach region with vertex z in the closed disc, z != 0."""

    vertex: complex

    def __post_init__(self):
        if self.vertex == 0:
            raise DomainError("approach region is undefined for vertex 0")
        if abs(self.vertex) > 1.0 + 1e-12:
            raise DomainError("vertex must lie in the closed disc")

    def contains(self, pts):
        pts = np.asarray(pts, dtype=complex)
        m = np.abs(pts)
        v = abs(self.vertex)
        halfwidth = 0.5 * (1.0 - m / v)
        ok = (m < 1.0) & (m < v)
        return ok & (_wrapped_angle_gap(pts, self.vertex) < halfwidth)

    def to_json(self):
        return {"region": "nt_region", "vertex": [self.vertex.real, self.vertex.imag]}


@dataclass(frozen=True)
class Annulus:
    """Polar box r_inner <= |z| < r_outer, arg in [theta0, theta0 + width)."""

    r_inner: float
    r_outer: float
    theta0: float = 0.0
    angular_width: float = _TWO_PI

    def contains(self, pts):
        pts = np.asarray(pts, dtype=complex)
        m = np.abs(pts)
        ok = (m >= self.r_inner) & (m < min(self.r_outer, 1.0)) & (m < 1.0)
        if self.angular_width >= _TWO_PI:
            return ok
        d = (np.angle(pts) - self.theta0) % _TWO_PI
        return ok & (d < self.angular_width)

    def to_json(self):
        return {
            "region": "annulus",
            "r_inner": self.r_inner,
            "r_outer": self.r_outer,
            "theta0": self.theta0,
            "angular_width": self.angular_width,
        }


def pseudo_disc(a, r):
    return PseudoDisc(complex(a), float(r))


def carleson_square(z, convention="standard"):
    return CarlesonSquare(complex(z), convention)


def tent(z):
    return Tent(complex(z))


def nt_region(z):
    return NtRegion(complex(z))


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

_LATTICE_MAX_NODES = 10_000_000


def r_lattice(r, depth=16):
    """Dyadic-annulus lattice with pseudohyperbolic spacing ~ r/2.

    Rings sit at gaps u = 2^{-(m+0.5)/n_sub}; the angular step on a ring is
    r*u, so both the radial and angular neighbor distances are close to r/2,
    giving covering radius <= r and pairwise separation >= r/5 down to the
    lattice depth.  Raises ResourceLimitError above 10^7 nodes.
    """
    if not (0.0 < r < 1.0):
        raise DomainError("lattice parameter must lie in (0, 1)")
    n_sub = max(1, math.ceil(0.7 / r))
    gaps = 2.0 ** (-(np.arange(n_sub * depth) + 0.5) / n_sub)
    radii = 1.0 - gaps
    # angular neighbors on a ring of radius x sit at distance ~ x dtheta /
    # (1-x^2); aim for r/2
    counts = np.maximum(
        1, np.ceil(4.0 * math.pi * radii / (r * gaps * (2.0 - gaps)))
    ).astype(int)
    if int(np.sum(counts)) > _LATTICE_MAX_NODES:
        raise ResourceLimitError(
            f"lattice would need {int(np.sum(counts))} nodes (> {_LATTICE_MAX_NODES})"
        )
    pieces = []
    for u, n in zip(gaps, counts):
        theta = (np.arange(n) + 0.5) * (_TWO_PI / n)
        pieces.append((1.0 - u) * np.exp(1j * theta))
    return np.concatenate(pieces)


def probe_lattice(depth=14, rings_per_octave=2, angles_per_ring=8):
    """Thin basepoint lattice for supremum sweeps.

    Returns (points, gaps) with gaps = 1-|point| exact by construction.
    Radial placement is geometric (rings_per_octave rings per dyadic level);
    the angular count is fixed, which is enough for radially symmetric data
    and keeps criterion sweeps cheap.  Use r_lattice for a true covering.
    """
    m = np.arange(rings_per_octave * depth)
    gaps = 2.0 ** (-(m + 0.5) / rings_per_octave)
    theta = (np.arange(angles_per_ring) + 0.5) * (_TWO_PI / angles_per_ring)
    pts = ((1.0 - gaps)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    return pts, np.repeat(gaps, angles_per_ring)
