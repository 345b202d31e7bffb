"""Radial weights on the unit disc and their doubling-class diagnostics.

A radial weight is a nonnegative integrable density w(r) on [0, 1).  The
objects of interest are built from its tail integrals

    tail_integral(r)  =  int_r^1 w(s) ds          (written w-hat in the
                                                   doubling-weight literature)
    tail_density(r)   =  tail_integral(r) / (1-r)
    moment(x)         =  int_0^1 r^x w(r) dr

and from masses of boundary regions (Carleson squares, tents, pseudo-
hyperbolic discs).  Everything is computed in "gap space" u = 1 - r: the
standard weights (1-r)^a and their ilk are exact functions of u, so working
in u avoids catastrophic cancellation arbitrarily close to the boundary.

Quadrature strategy: integrals from the boundary inward are summed over
dyadic octaves of u with a fixed Gauss-Legendre rule per octave.  Power-like
integrands are resolved to near machine precision this way, and a divergent
tail (non-integrable weight) is detected from the octave-term ratios.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IntegrabilityError
from . import geometry

__all__ = [
    "RadialWeight",
    "WeightClassReport",
    "classify",
    "weighted_area",
    "gamma_exponent",
    "gamma_for",
    "GammaResult",
]

# 16-point Gauss-Legendre rule on [0, 1].
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = (_GL_X + 1.0) / 2.0
_GL_W = _GL_W / 2.0

# Tail integrals below this are treated as numerically extinct.
_UNDERFLOW_FLOOR = 1e-300


def _segment_integral(f, lo, hi):
    """Gauss-Legendre integral of f over [lo, hi] (vectorized in f)."""
    if hi <= lo:
        return 0.0
    x = lo + (hi - lo) * _GL_X
    return float((hi - lo) * np.dot(_GL_W, f(x)))


def _octave_integral(f, u0, max_octaves=600):
    """Integral of f over (0, u0] by dyadic octaves toward u = 0.

    Uses geometric extrapolation once the octave terms settle into a ratio,
    which is exact for pure powers u^a.  Raises IntegrabilityError when the
    terms do not decay (a <= -1, or worse).
    """
    if u0 <= 0.0:
        return 0.0
    total = 0.0
    prev = None
    ratios = []
    tiny_streak = 0
    zero_streak = 0
    for m in range(max_octaves):
        hi = u0 * 2.0 ** (-m)
        lo = hi / 2.0
        term = _segment_integral(f, lo, hi)
        total += term
        if prev is not None and prev > 0.0 and term > 0.0:
            ratios.append(term / prev)
        prev = term
        # Zero octaves alone must not stop the sweep early: a density may
        # vanish on a band and resume deeper in.  Past u ~ 1e-18 a bounded
        # remainder is negligible and a singular one shows nonzero terms.
        zero_streak = zero_streak + 1 if term == 0.0 else 0
        tiny_streak = tiny_streak + 1 if (total > 0.0 and term < 1e-17 * total) else 0
        if tiny_streak >= 3 and m >= 8:
            return total
        if zero_streak >= 3 and m >= (20 if total > 0.0 else 60):
            return total
    # Did not converge outright: extrapolate geometrically or flag divergence.
    tail_ratios = ratios[-5:]
    if not tail_ratios:
        return total
    rho = float(np.median(tail_ratios))
    if rho >= 0.9995:
        raise IntegrabilityError(
            "tail integral does not converge (octave ratio %.6f)" % rho
        )
    return total + prev * rho / (1.0 - rho)


class RadialWeight:
    """A radial weight with eagerly built tail-integral caches.

    Parameters
    ----------
    gap_density:
        Vectorized callable u -> w(1-u) for u in (0, 1].  Working through
        the boundary gap keeps standard weights exact arbitrarily close to
        |z| = 1.
    name:
        Text tag used in reports.
    mesh_levels:
        Depth of the cached geometric mesh u_j = 2^(-j/8); the cache covers
        j = 0 .. 8*mesh_levels.

    Instances are immutable after construction and safe to share between
    workers.
    """

    def __init__(self, gap_density, name="custom", mesh_levels=48, allow_zero=False):
        self._gap_density = gap_density
        self.name = name
        self.mesh_levels = int(mesh_levels)
        j = np.arange(8 * self.mesh_levels + 1)
        # ascending in u, from the deep end up to u = 1
        self._mesh_u = np.sort(2.0 ** (-j / 8.0))
        self._check_nonnegative()
        self._tails = {
            "hat": self._build_tail(lambda u: self._gap(u)),
            "rmom": self._build_tail(lambda u: (1.0 - u) * self._gap(u)),
            "umom": self._build_tail(lambda u: u * self._gap(u)),
        }
        total = self.tail_integral(0.0)
        if not np.isfinite(total) or total < 0.0 or (total == 0.0 and not allow_zero):
            raise IntegrabilityError("tail_integral(0) must be finite and positive")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def power(cls, alpha, **kw):
        """w(r) = (1-r)^alpha, integrable for alpha > -1."""
        if alpha <= -1.0:
            raise IntegrabilityError("power weight needs alpha > -1")
        return cls(lambda u: u ** alpha, name=f"power({alpha:g})", **kw)

    @classmethod
    def log_power(cls, alpha, b, **kw):
        """w(r) = (1-r)^alpha * (log(e/(1-r)))^b."""
        if alpha <= -1.0:
            raise IntegrabilityError("log_power weight needs alpha > -1")
        return cls(
            lambda u: u ** alpha * (1.0 - np.log(u)) ** b,
            name=f"log_power({alpha:g},{b:g})",
            **kw,
        )

    @classmethod
    def exp_inverse(cls, **kw):
        """w(r) = exp(-1/(1-r)); rapidly vanishing, not upper doubling."""

        def gap(u):
            u = np.asarray(u, dtype=float)
            out = np.zeros_like(u)
            mask = u > 1e-3 / 690.0
            out[mask] = np.exp(-1.0 / u[mask])
            return out

        return cls(gap, name="exp_inverse", **kw)

    @classmethod
    def from_table(cls, r, w, **kw):
        """Linear interpolation through sample points (r_i, w_i)."""
        r = np.asarray(r, dtype=float)
        w = np.asarray(w, dtype=float)
        if r.ndim != 1 or r.shape != w.shape or len(r) < 2:
            raise DomainError("table weight needs matching 1-d r and w arrays")
        if np.any(w < 0.0):
            raise DomainError("table weight values must be nonnegative")
        order = np.argsort(r)
        r, w = r[order], w[order]

        def gap(u):
            return np.interp(1.0 - np.asarray(u, dtype=float), r, w)

        return cls(gap, name="table", **kw)

    @classmethod
    def from_density(cls, evaluator, name="custom", **kw):
        """Wrap a plain density r -> w(r).

        Note: evaluating through 1-u loses precision for u below ~1e-8; the
        dedicated constructors keep deep-boundary arithmetic exact.
        """
        return cls(lambda u: np.asarray(evaluator(1.0 - np.asarray(u))), name=name, **kw)

    # -- internals ------------------------------------------------------------

    def _gap(self, u):
        return np.asarray(self._gap_density(np.asarray(u, dtype=float)), dtype=float)

    def _check_nonnegative(self):
        probe = np.concatenate([self._mesh_u, np.linspace(0.05, 1.0, 64)])
        vals = self._gap(probe)
        if np.any(~np.isfinite(vals[probe > 1e-12])) or np.any(vals < 0.0):
            raise DomainError("weight density must be finite and nonnegative")

    def _build_tail(self, f):
        """Cumulative integrals T[i] = int_0^{mesh_u[i]} f du, ascending mesh."""
        mesh = self._mesh_u
        T = np.empty_like(mesh)
        T[0] = _octave_integral(f, mesh[0])
        for i in range(1, len(mesh)):
            T[i] = T[i - 1] + _segment_integral(f, mesh[i - 1], mesh[i])
        return T

    def _tail_at_gap(self, kind, u):
        """T(u) = int_0^u f du for the cached integrand, vectorized."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u).astype(float)
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise DomainError("gap argument must lie in [0, 1]")
        mesh = self._mesh_u
        T = self._tails[kind]
        f = {
            "hat": lambda x: self._gap(x),
            "rmom": lambda x: (1.0 - x) * self._gap(x),
            "umom": lambda x: x * self._gap(x),
        }[kind]
        out = np.zeros_like(u)
        deep = u < mesh[0]
        for idx in np.nonzero(deep)[0]:
            if u[idx] > 0.0:
                out[idx] = _octave_integral(f, u[idx])
        main = ~deep
        if np.any(main):
            um = u[main]
            i = np.searchsorted(mesh, um, side="right") - 1
            base = mesh[i]
            width = um - base
            x = base[:, None] + width[:, None] * _GL_X[None, :]
            part = width * (f(x.ravel()).reshape(x.shape) @ _GL_W)
            out[main] = T[i] + part
        return float(out[0]) if scalar else out

    # -- public operations ----------------------------------------------------

    def density(self, r):
        """The weight density w(r) itself."""
        return self._gap(1.0 - np.asarray(r, dtype=float))

    def density_at_gap(self, u):
        """w evaluated at r = 1-u, taking the gap directly (exact near 1)."""
        return self._gap(u)

    def tail_integral(self, r):
        """int_r^1 w(s) ds for r in [0, 1]; vectorized, ~1e-8 relative or better."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0) or np.any(r > 1.0):
            raise DomainError("radius must lie in [0, 1]")
        return self._tail_at_gap("hat", 1.0 - r)

    def tail_integral_at_gap(self, u):
        """tail_integral(1-u) without forming 1-u (exact for deep u)."""
        return self._tail_at_gap("hat", u)

    def tail_density(self, r):
        """tail_integral(r) / (1-r); requires r < 1."""
        r = np.asarray(r, dtype=float)
        if np.any(r >= 1.0):
            raise DomainError("tail_density requires r < 1")
        u = 1.0 - r
        return self._tail_at_gap("hat", u) / u

    def tail_density_at_gap(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0.0):
            raise DomainError("tail_density requires a positive gap")
        return self._tail_at_gap("hat", u) / u

    def moment(self, x):
        """int_0^1 r^x w(r) dr for x >= 1."""
        if x < 1.0:
            raise DomainError("moment is defined for x >= 1")

        def f(u):
            # r^x = exp(x log(1-u)) through log1p for stability
            return np.exp(x * np.log1p(-np.minimum(u, 1.0 - 1e-17))) * self._gap(u)

        return _octave_integral(f, 1.0)

    def disc_mass(self):
        """Weighted area of the whole disc, area measure normalized by pi."""
        return 2.0 * self._tail_at_gap("rmom", 1.0)

    def carleson_mass(self, rho, convention="standard"):
        """Weighted area of the Carleson square with basepoint radius rho.

        The square at z != 0 has angular width (1-|z|) and radial side
        [|z|, 1) (standard convention) or (1-|z|, 1) (the literal variant,
        kept for comparison).  rho == 0 returns the whole-disc mass.
        """
        rho = np.asarray(rho, dtype=float)
        scalar = rho.ndim == 0
        rho = np.atleast_1d(rho).astype(float)
        if np.any(rho < 0.0) or np.any(rho >= 1.0):
            raise DomainError("basepoint radius must lie in [0, 1)")
        u = 1.0 - rho
        if convention == "standard":
            radial = self._tail_at_gap("rmom", u)
        elif convention == "literal":
            radial = self._tail_at_gap("rmom", np.minimum(rho, 1.0))
        else:
            raise DomainError(f"unknown Carleson convention {convention!r}")
        out = u * radial / math.pi
        out = np.where(rho == 0.0, self.disc_mass(), out)
        return float(out[0]) if scalar else out

    def carleson_mass_at_gap(self, u, convention="standard"):
        """carleson_mass at rho = 1-u, taking the gap directly."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u).astype(float)
        if np.any(u <= 0.0) or np.any(u > 1.0):
            raise DomainError("gap must lie in (0, 1]")
        if convention == "standard":
            radial = self._tail_at_gap("rmom", u)
        elif convention == "literal":
            radial = self._tail_at_gap("rmom", np.minimum(1.0 - u, 1.0))
        else:
            raise DomainError(f"unknown Carleson convention {convention!r}")
        out = u * radial / math.pi
        out = np.where(u == 1.0, self.disc_mass(), out)
        return float(out[0]) if scalar else out

    def tent_mass(self, rho):
        """Weighted area of the tent with vertex radius rho in (0, 1)."""
        rho = np.asarray(rho, dtype=float)
        if np.any(rho <= 0.0) or np.any(rho >= 1.0):
            raise DomainError("tent vertex radius must lie in (0, 1)")
        u = 1.0 - rho
        return (u * self._tail_at_gap("hat", u) - self._tail_at_gap("umom", u)) / math.pi

    def tilde_weight(self, name=None):
        """The derived weight r -> tail_density(r) as a RadialWeight."""
        return RadialWeight(
            lambda u: self.tail_integral_at_gap(u) / u,
            name=name or f"tilde({self.name})",
            mesh_levels=self.mesh_levels,
        )

    def __repr__(self):
        return f"RadialWeight({self.name})"


# ---------------------------------------------------------------------------
# classification into the doubling classes
# ---------------------------------------------------------------------------

@dataclass
class WeightClassReport:
    """Empirical doubling-class diagnostics for a radial weight.

    dhat_constant is the mesh supremum of tail(r)/tail((1+r)/2); exponents
    are the envelope of the local dyadic decay rates of the tail integral
    (for (1-r)^a both equal a+1); flags record the threshold decisions, with
    stability measured under mesh doubling.
    """

    name: str
    dhat_constant: float
    dcheck_pair: tuple  # (K, C)
    exponents: tuple  # (alpha, beta), alpha <= beta
    upper_doubling: bool
    lower_doubling: bool
    doubling: bool
    moment_class: bool
    mesh_resolution: int
    sandwich_constant: float
    fitted_slope: float
    dhat_stability: float
    dcheck_stability: float
    truncated_at: float | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "weight": self.name,
            "dhat_constant": self.dhat_constant,
            "dcheck_K": self.dcheck_pair[0],
            "dcheck_C": self.dcheck_pair[1],
            "exponent_lower": self.exponents[0],
            "exponent_upper": self.exponents[1],
            "upper_doubling": self.upper_doubling,
            "lower_doubling": self.lower_doubling,
            "doubling": self.doubling,
            "moment_class": self.moment_class,
            "mesh_resolution": self.mesh_resolution,
            "sandwich_constant": self.sandwich_constant,
            "fitted_slope": self.fitted_slope,
            "dhat_stability": self.dhat_stability,
            "dcheck_stability": self.dcheck_stability,
            "truncated_at": self.truncated_at,
            "notes": self.notes,
        }


# Relative-change threshold for "the empirical sup is stable under mesh
# doubling", the observable proxy for "a constant exists".
_STABILITY_TOL = 0.02
_LOWER_MARGIN = 1.05


def _mesh_gaps(points, per_octave=8):
    j = np.arange(points)
    return 2.0 ** (-j / per_octave)


def _dyadic_ratio_stats(w, points, per_octave=8):
    """Tail values on the geometric mesh plus shifted meshes for K = 2,4,8,16."""
    u = _mesh_gaps(points + 4 * per_octave, per_octave)
    hat = w.tail_integral_at_gap(u)
    floor = _UNDERFLOW_FLOOR
    alive = hat > floor
    # keep the contiguous prefix of mesh points whose halved/16th gaps survive
    n_ok = points
    for j in range(points):
        if not alive[j + 4 * per_octave]:
            n_ok = j
            break
    truncated_at = None if n_ok == points else float(1.0 - u[n_ok])
    n_ok = max(n_ok, 2)
    ratios = {}
    for shift, K in ((per_octave, 2), (2 * per_octave, 4), (3 * per_octave, 8), (4 * per_octave, 16)):
        ratios[K] = hat[:n_ok] / hat[shift : shift + n_ok]
    return u[:n_ok], hat[:n_ok], ratios, truncated_at


def classify(w, mesh=256):
    """Classify a radial weight into the upper/lower doubling and moment classes.

    mesh is the number of geometric mesh points 1 - 2^(-j/8).  Membership
    flags threshold empirical constants and require them to be stable in
    depth: doubling the mesh doubles its reach toward the boundary, and the
    first half of the doubled mesh is the original one, so stability is the
    relative change between the constant over the shallow half and over the
    full (alive, non-underflowed) mesh.
    """
    if mesh < 64:
        raise DomainError("classification mesh must have at least 64 points")

    u, hat, ratios, truncated_at = _dyadic_ratio_stats(w, mesh)

    r2 = ratios[2]
    half = max(2, len(r2) // 2)
    dhat = float(np.max(r2))
    dhat_shallow = float(np.max(r2[:half]))
    dhat_stability = abs(dhat - dhat_shallow) / dhat if dhat > 0 else math.inf
    upper = bool(np.isfinite(dhat) and dhat_stability < _STABILITY_TOL)

    best_K, best_C, dcheck_stability = 2, -math.inf, math.inf
    for K in (2, 4, 8, 16):
        C = float(np.min(ratios[K]))
        C_shallow = float(np.min(ratios[K][:half]))
        stab = abs(C - C_shallow) / C if C > 0 else math.inf
        if C > best_C:
            best_K, best_C, dcheck_stability = K, C, stab
    lower = bool(best_C >= _LOWER_MARGIN and dcheck_stability < _STABILITY_TOL)

    exps = np.log2(r2)
    alpha_hat = float(np.min(exps))
    beta_hat = float(np.max(exps))
    slope = float(np.polyfit(np.log(u), np.log(hat), 1)[0])

    # minimal sandwich constant at the fitted exponent envelope
    idx = np.arange(len(u))
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    keep = ii < jj  # u[ii] > u[jj], i.e. r_ii <= r_jj
    scale = u[ii[keep]] / u[jj[keep]]
    rat = hat[ii[keep]] / hat[jj[keep]]
    with np.errstate(over="ignore"):
        c_up = np.max(rat / scale ** beta_hat)
        c_lo = np.max(scale ** alpha_hat / rat)
    sandwich = float(max(1.0, c_up, c_lo))

    xs = 2.0 ** np.arange(11)
    moms = np.array([w.moment(float(x)) for x in xs])
    m_member = False
    for K in (2, 4, 8):
        shift = int(math.log2(K))
        valid = moms[:-shift] / moms[shift:]
        if np.min(valid) >= _LOWER_MARGIN:
            m_member = True
            break

    notes = []
    if truncated_at is not None:
        notes.append(
            f"mesh truncated at r = {truncated_at:.6g}: tail integral underflowed"
        )

    return WeightClassReport(
        name=w.name,
        dhat_constant=dhat,
        dcheck_pair=(best_K, best_C),
        exponents=(min(alpha_hat, beta_hat), max(alpha_hat, beta_hat)),
        upper_doubling=upper,
        lower_doubling=lower,
        doubling=upper and lower,
        moment_class=m_member,
        mesh_resolution=mesh,
        sandwich_constant=sandwich,
        fitted_slope=slope,
        dhat_stability=float(dhat_stability),
        dcheck_stability=float(dcheck_stability),
        truncated_at=truncated_at,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# region masses and the Berezin exponent
# ---------------------------------------------------------------------------

def weighted_area(w, region, grid=None):
    """Weighted area int_E w dA of a region, dA normalized by pi.

    Without a grid the value comes from the exact radial reduction of the
    region (1-d quadrature); with a grid the region indicator is summed over
    the grid nodes, which is the refinement-diagnostic route.
    """
    if grid is not None:
        inside = region.contains(grid.nodes)
        if not np.any(inside):
            return 0.0
        dens = w.density_at_gap(grid.gaps[inside])
        return float(np.sum(dens * grid.weights[inside]))

    if isinstance(region, geometry.WholeDisc):
        return w.disc_mass()
    if isinstance(region, geometry.CarlesonSquare):
        if region.is_whole_disc:
            return w.disc_mass()
        return float(
            w.carleson_mass(abs(region.base), convention=region.convention)
        )
    if isinstance(region, geometry.Tent):
        return float(w.tent_mass(abs(region.vertex)))
    if isinstance(region, geometry.PseudoDisc):
        gaps, wts = region.polar_sample()
        return float(np.sum(w.density_at_gap(gaps) * wts))
    if isinstance(region, geometry.Annulus):
        lo = w._tail_at_gap("rmom", 1.0 - region.r_inner)
        hi = w._tail_at_gap("rmom", 1.0 - region.r_outer)
        return float((lo - hi) * region.angular_width / math.pi)
    raise DomainError(f"unsupported region type {type(region).__name__}")


@dataclass
class GammaResult:
    gamma: float
    verified: bool
    worst_constant: float
    attempts: int

    def to_json(self):
        return {
            "gamma": self.gamma,
            "verified": self.verified,
            "worst_constant": self.worst_constant,
            "attempts": self.attempts,
        }


def gamma_exponent(w, p, report=None, mesh=128):
    """Berezin kernel exponent 2*(beta+2)/p from the fitted upper decay rate."""
    if p <= 0:
        raise DomainError("p must be positive")
    if report is None:
        report = classify(w, mesh=mesh)
    return 2.0 * (report.exponents[1] + 2.0) / p


def gamma_for(w, p, report=None, grid=None, max_retries=3):
    """gamma_exponent escalated by 1.5 until the kernel-domination test passes.

    Returns a GammaResult; gamma is usable either way, with verified=False
    and a warning when every retry failed.
    """
    from . import criteria  # local import: criteria depends on this module

    gamma = gamma_exponent(w, p, report=report)
    result = None
    for attempt in range(max_retries + 1):
        passed, worst = criteria.verify_gamma(w, p, gamma, grid=grid)
        result = GammaResult(gamma, passed, worst, attempt + 1)
        if passed:
            return result
        gamma *= 1.5
    warnings.warn(
        f"gamma_for: no verified exponent after {max_retries} escalations "
        f"(last worst constant {result.worst_constant:.3g})"
    )
    return result
