"""Quadrature grids on the disc, disc measures, and the weighted pushforward.

The grid is boundary-refined: dyadic annuli 1-2^{-k} <= |z| < 1-2^{-k-1} for
k = 0..L-1 plus a closing cap (0 < 1-|z| <= 2^{-L}), each annulus carrying a
fixed number of radial subcells (two Gauss-Legendre nodes per subcell, exact
for cubic radial integrands) and an angular midpoint count proportional to
2^k.  All radial bookkeeping happens through the boundary gap u = 1-|z|,
which every node stores exactly.

Measures come in three representations: a radial density (backed by the
same tail-integral machinery as radial weights, so region masses reduce to
1-d quadrature), a general pointwise density sampled lazily at grid nodes,
and an atomic cloud.  ``support_nodes`` exposes the common discrete picture
(points, masses) that the pushforward and criterion integrals consume.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from . import geometry
from .errors import DomainError, ResourceLimitError, SelfMapViolationError
from .weights import RadialWeight, weighted_area

__all__ = [
    "QuadratureGrid",
    "make_grid",
    "integrate",
    "DiscMeasure",
    "RadialDensityMeasure",
    "CallableDensityMeasure",
    "AtomicMeasure",
    "measure_of",
    "pushforward",
]

_TWO_PI = 2.0 * math.pi
_MAX_GRID_NODES = 100_000_000

# 2-point Gauss-Legendre on [0, 1]
_GL2_X = np.array([0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0)])
_GL2_W = np.array([0.5, 0.5])


def _ring_layout(levels, radial_subcells):
    """Radial rings of the boundary-refined grid.

    Returns (gaps, radial masses int (1-u) du * GL weight, band index).  The
    dyadic annuli split into uniform u-subcells; the closing cap splits
    geometrically toward u = 0.  Two GL nodes per subcell make the layout
    exact for cubic radial integrands.
    """
    m = radial_subcells
    gaps, masses, bands = [], [], []
    for k in range(levels + 1):
        u_hi = 2.0 ** (-k)
        if k < levels:
            edges = np.linspace(u_hi / 2.0, u_hi, m + 1)
            subs = [(edges[i], edges[i + 1]) for i in range(m)]
        else:
            cap = [u_hi * 2.0 ** (-i) for i in range(m)] + [0.0]
            subs = [(cap[i + 1], cap[i]) for i in range(m)][::-1]
        for lo, hi in subs:
            width = hi - lo
            for x, wgl in zip(_GL2_X, _GL2_W):
                u = lo + width * x
                gaps.append(u)
                masses.append(wgl * width * (1.0 - u))
                bands.append(min(k, levels))
    return np.array(gaps), np.array(masses), np.array(bands, dtype=int)


class QuadratureGrid:
    """Boundary-refined polar node/weight set for the normalized area measure.

    nodes/weights/gaps are flat arrays; ring_index maps each node to its
    radial ring (a fixed gap value), which radial integrands exploit.
    Weights sum to 1 exactly up to roundoff.  Instances are immutable and
    shared freely.
    """

    def __init__(self, levels, angular_base=16, radial_subcells=4):
        if not (1 <= levels <= 24):
            raise DomainError("grid level must lie in 1..24")
        self.levels = int(levels)
        self.angular_base = int(angular_base)
        self.radial_subcells = int(radial_subcells)

        est = 4 * self.radial_subcells * self.angular_base * 2 ** self.levels
        if est > _MAX_GRID_NODES:
            raise ResourceLimitError(
                f"grid would need about {est} nodes (> {_MAX_GRID_NODES})"
            )

        gap_chunks, weight_chunks, node_chunks, ring_chunks = [], [], [], []
        ring_gaps, ring_weights = [], []
        ring = 0
        for u, w_rad, band in zip(*_ring_layout(self.levels, self.radial_subcells)):
            n_theta = self.angular_base * 2 ** band
            theta = (np.arange(n_theta) + 0.5) * (_TWO_PI / n_theta)
            w_node = w_rad * (_TWO_PI / n_theta) / math.pi
            gap_chunks.append(np.full(n_theta, u))
            weight_chunks.append(np.full(n_theta, w_node))
            node_chunks.append((1.0 - u) * np.exp(1j * theta))
            ring_chunks.append(np.full(n_theta, ring, dtype=np.int32))
            ring_gaps.append(u)
            ring_weights.append(w_rad * 2.0)  # full-circle mass
            ring += 1
        self.gaps = np.concatenate(gap_chunks)
        self.weights = np.concatenate(weight_chunks)
        self.nodes = np.concatenate(node_chunks)
        self.ring_index = np.concatenate(ring_chunks)
        self.ring_gaps = np.array(ring_gaps)
        self.ring_weights = np.array(ring_weights)

    @property
    def node_count(self):
        return len(self.nodes)

    def depth_mask(self, min_gap):
        """Nodes no deeper than min_gap; used for truncation diagnostics."""
        return self.gaps >= min_gap

    def integrate(self, g):
        """Sum g over nodes against the area weights.

        g may be a callable on complex points or an array of node values.
        Non-finite values are reported with the offending node.
        """
        vals = np.asarray(g(self.nodes) if callable(g) else g)
        if vals.shape != self.nodes.shape:
            vals = np.broadcast_to(vals, self.nodes.shape)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DomainError(
                f"integrand is not finite at node {self.nodes[i]} (gap {self.gaps[i]:g})"
            )
        return float(np.sum(vals * self.weights))

    def __repr__(self):
        return (
            f"QuadratureGrid(levels={self.levels}, nodes={self.node_count})"
        )


def make_grid(levels, angular_base=16, radial_subcells=4):
    return QuadratureGrid(levels, angular_base, radial_subcells)


def radial_rings(levels, radial_subcells=4):
    """Ring gaps and full-circle ring masses of a grid, without the angular
    replication; enough for integrals of radial profiles."""
    gaps, masses, _ = _ring_layout(levels, radial_subcells)
    return gaps, 2.0 * masses


def integrate(g, grid):
    """Integral of g over the disc against normalized area, on the grid."""
    return grid.integrate(g)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

class DiscMeasure:
    """A finite positive Borel measure on the disc (discretized)."""

    def total_mass(self):
        _, masses = self.support_nodes()
        return float(np.sum(masses))

    def support_nodes(self):
        """The discrete picture (points, masses) of the measure."""
        raise NotImplementedError

    def measure_of(self, region):
        pts, masses = self.support_nodes()
        inside = region.contains(pts)
        return float(np.sum(masses[inside]))

    def pseudo_disc_masses(self, centers, r, center_gaps=None):
        """Vectorized mu(Delta(a, r)) over an array of centers."""
        raise NotImplementedError

    def carleson_masses(self, bases, convention="standard"):
        """mu(S(a)) over an array of basepoints (S(0) is the whole disc)."""
        bases = np.atleast_1d(np.asarray(bases, dtype=complex))
        out = np.empty(len(bases))
        for i, a in enumerate(bases):
            region = geometry.WholeDisc() if a == 0 else geometry.CarlesonSquare(
                complex(a), convention)
            out[i] = self.measure_of(region)
        return out

    def integrate(self, g):
        """int g d(mu) over the discrete representation (g may be complex)."""
        pts, masses = self.support_nodes()
        return np.sum(np.asarray(g(pts)) * masses).item()


def _disc_params(center_abs, gaps, r):
    """Euclidean (c, R, gap_outer) of Delta(a, r) from |a| and 1-|a|."""
    one_minus_sq = gaps * (2.0 - gaps)  # 1 - |a|^2
    denom = 1.0 - r * r * center_abs ** 2
    c = (1.0 - r * r) * center_abs / denom
    R = one_minus_sq * r / denom
    g_out = gaps * (1.0 - r) / (1.0 + r * center_abs)
    g_in = gaps * (1.0 + r) / (1.0 - r * center_abs)
    return c, R, g_out, g_in


class RadialDensityMeasure(DiscMeasure):
    """d(mu) = f(|z|) dA for a radial density f, given through the gap u=1-|z|.

    Region masses reduce to 1-d tail integrals (squares, tents, annuli, the
    whole disc) or to a disc-centered polar rule (pseudohyperbolic discs),
    so they are accurate independently of any grid.  The grid is still
    carried: it defines the discrete support for pushforwards.
    """

    def __init__(self, gap_density, grid, name="radial_density"):
        self._weight = RadialWeight(gap_density, name=name, allow_zero=True)
        self.grid = grid
        self.name = name
        self._node_masses = None

    @classmethod
    def from_power(cls, beta, grid):
        if beta <= -1.0:
            raise DomainError("power density needs beta > -1")
        return cls(lambda u: u ** beta, grid, name=f"power_density({beta:g})")

    @classmethod
    def from_weight(cls, w, grid):
        return cls(w.density_at_gap, grid, name=f"density({w.name})")

    def density_at_gap(self, u):
        return self._weight.density_at_gap(u)

    def support_nodes(self):
        if self._node_masses is None:
            dens = self._weight.density_at_gap(self.grid.gaps)
            self._node_masses = dens * self.grid.weights
        return self.grid.nodes, self._node_masses

    def total_mass(self):
        return self._weight.disc_mass()

    def measure_of(self, region):
        return weighted_area(self._weight, region)

    def carleson_masses(self, bases, convention="standard"):
        bases = np.atleast_1d(np.asarray(bases, dtype=complex))
        return np.atleast_1d(
            self._weight.carleson_mass(np.abs(bases), convention=convention))

    def pseudo_disc_masses(self, centers, r, center_gaps=None):
        centers = np.atleast_1d(np.asarray(centers, dtype=complex))
        if center_gaps is None:
            center_gaps = 1.0 - np.abs(centers)
        c, R, g_out, _ = _disc_params(np.abs(centers), center_gaps, r)
        # disc-centered polar rule, shared nodes across all centers
        glx, glw = geometry._GL24_X, geometry._GL24_W
        n_ang = 48
        psi = (np.arange(n_ang) + 0.5) * (_TWO_PI / n_ang)
        vers = 2.0 * np.sin(psi / 2.0) ** 2
        s = R[:, None] * glx[None, :]
        r_minus_s = R[:, None] * (1.0 - glx)[None, :]
        sq = (c[:, None, None] ** 2
              + 2.0 * c[:, None, None] * s[:, :, None] * np.cos(psi)[None, None, :]
              + (s ** 2)[:, :, None])
        one_minus_sq = (
            (g_out * (2.0 - g_out))[:, None, None]
            + 2.0 * c[:, None, None] * (r_minus_s[:, :, None]
                                        + s[:, :, None] * vers[None, None, :])
            + (r_minus_s * (R[:, None] + s))[:, :, None]
        )
        gaps = one_minus_sq / (1.0 + np.sqrt(np.clip(sq, 0.0, 1.0)))
        w = (R[:, None] * glw[None, :] * s)[:, :, None] * (2.0 / n_ang)
        vals = self._weight.density_at_gap(gaps.ravel()).reshape(gaps.shape)
        return np.einsum("bij,bij->b", vals, np.broadcast_to(w, gaps.shape))

    def to_json(self):
        return {"kind": "radial_density", "name": self.name}


class CallableDensityMeasure(DiscMeasure):
    """d(mu) = f(z) dA for a general pointwise density, sampled on the grid."""

    def __init__(self, fn, grid, name="density"):
        self._fn = fn
        self.grid = grid
        self.name = name
        self._node_masses = None

    def support_nodes(self):
        if self._node_masses is None:
            dens = np.asarray(self._fn(self.grid.nodes), dtype=float)
            if np.any(dens < 0.0) or np.any(~np.isfinite(dens)):
                raise DomainError("measure density must be finite and nonnegative")
            self._node_masses = dens * self.grid.weights
        return self.grid.nodes, self._node_masses

    def pseudo_disc_masses(self, centers, r, center_gaps=None):
        centers = np.atleast_1d(np.asarray(centers, dtype=complex))
        if center_gaps is None:
            center_gaps = 1.0 - np.abs(centers)
        pts, masses = self.support_nodes()
        c, R, _, _ = _disc_params(np.abs(centers), center_gaps, r)
        ce = centers * np.where(np.abs(centers) > 0, c / np.maximum(np.abs(centers), 1e-300), 0.0)
        out = np.empty(len(centers))
        for i in range(len(centers)):
            inside = np.abs(pts - ce[i]) < R[i]
            out[i] = np.sum(masses[inside])
        return out

    def to_json(self):
        return {"kind": "density", "name": self.name}


class AtomicMeasure(DiscMeasure):
    """A finite sum of point masses inside the disc."""

    def __init__(self, points, masses, name="atoms"):
        points = np.asarray(points, dtype=complex).ravel()
        masses = np.asarray(masses, dtype=float).ravel()
        if points.shape != masses.shape:
            raise DomainError("points and masses must have matching shapes")
        if np.any(masses < 0.0) or np.any(~np.isfinite(masses)):
            raise DomainError("atom masses must be finite and nonnegative")
        if np.any(np.abs(points) >= 1.0):
            raise DomainError("atoms must lie inside the open disc")
        self.name = name
        self.points = points
        self.masses = masses
        order = np.argsort(1.0 - np.abs(points))
        self._gaps_sorted = (1.0 - np.abs(points))[order]
        self._pts_sorted = points[order]
        self._masses_sorted = masses[order]

    @classmethod
    def from_csv(cls, path, name=None):
        rows = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                rows.append((float(row["re"]), float(row["im"]), float(row["mass"])))
        if not rows:
            return cls(np.array([], dtype=complex), np.array([]), name=name or str(path))
        arr = np.array(rows)
        return cls(arr[:, 0] + 1j * arr[:, 1], arr[:, 2], name=name or str(path))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im", "mass"])
            for p, m in zip(self.points, self.masses):
                writer.writerow([repr(float(p.real)), repr(float(p.imag)),
                                 repr(float(m))])

    def support_nodes(self):
        return self.points, self.masses

    def pseudo_disc_masses(self, centers, r, center_gaps=None):
        centers = np.atleast_1d(np.asarray(centers, dtype=complex))
        if center_gaps is None:
            center_gaps = 1.0 - np.abs(centers)
        mods = np.abs(centers)
        c, R, g_out, g_in = _disc_params(mods, center_gaps, r)
        phase = np.where(mods > 0, centers / np.maximum(mods, 1e-300), 1.0)
        ce = phase * c
        out = np.empty(len(centers))
        for i in range(len(centers)):
            lo = np.searchsorted(self._gaps_sorted, g_out[i] * (1.0 - 1e-12), "left")
            hi = np.searchsorted(self._gaps_sorted, g_in[i] * (1.0 + 1e-12), "right")
            if lo >= hi:
                out[i] = 0.0
                continue
            pts = self._pts_sorted[lo:hi]
            inside = np.abs(pts - ce[i]) < R[i]
            out[i] = np.sum(self._masses_sorted[lo:hi][inside])
        return out

    def to_json(self):
        return {"kind": "atoms", "count": len(self.points), "name": self.name}


def measure_of(mu, region):
    """mu(region) for the regions the criteria need."""
    return mu.measure_of(region)


def pushforward(phi, h, mu):
    """Weighted pushforward: atoms (phi(x), h(x) * mass(x)) over mu's support.

    The discrete change of variable int g d(pushforward) = int (g o phi) h
    d(mu) then holds exactly, term by term.  h = None means h == 1.
    """
    pts, masses = mu.support_nodes()
    images = np.asarray(phi(pts), dtype=complex)
    if np.any(np.abs(images) >= 1.0):
        worst = int(np.argmax(np.abs(images)))
        raise SelfMapViolationError(
            f"map sent {pts[worst]} to {images[worst]} (|.| = {abs(images[worst]):.6f})"
        )
    new_masses = masses if h is None else np.asarray(h(pts), dtype=float) * masses
    if np.any(new_masses < 0.0):
        raise DomainError("pushforward density h must be nonnegative")
    return AtomicMeasure(images, new_masses, name=f"pushforward({mu.name})")
