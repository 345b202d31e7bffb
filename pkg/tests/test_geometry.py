"""Pseudohyperbolic geometry, regions, and lattices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman import (
    DomainError,
    ResourceLimitError,
    carleson_square,
    nt_region,
    probe_lattice,
    pseudo_disc,
    r_lattice,
    rho,
    tent,
)

disc_points = st.complex_numbers(max_magnitude=0.95, allow_nan=False,
                                 allow_infinity=False)


class TestRho:
    def test_from_origin(self):
        assert rho(0.0, 0.3 + 0.4j) == pytest.approx(0.5)

    def test_coincident(self):
        assert rho(0.25 + 0.1j, 0.25 + 0.1j) == 0.0

    def test_antipodal_halves(self):
        assert rho(0.5, -0.5) == pytest.approx(0.8)

    @given(a=disc_points, b=disc_points)
    @settings(max_examples=200, deadline=None)
    def test_symmetry(self, a, b):
        assert rho(a, b) == pytest.approx(rho(b, a), abs=1e-14)

    @given(a=disc_points, b=disc_points, c=disc_points)
    @settings(max_examples=200, deadline=None)
    def test_triangle_inequality(self, a, b, c):
        assert rho(a, c) <= rho(a, b) + rho(b, c) + 1e-12

    @given(a=disc_points, b=disc_points, c=disc_points)
    @settings(max_examples=200, deadline=None)
    def test_moebius_invariance(self, a, b, c):
        ta = (a - c) / (1.0 - np.conj(c) * a)
        tb = (b - c) / (1.0 - np.conj(c) * b)
        assert rho(ta, tb) == pytest.approx(rho(a, b), abs=1e-12)


class TestPseudoDisc:
    def test_origin_center(self):
        d = pseudo_disc(0.0, 0.3)
        assert d.euclid_center == 0.0
        assert d.euclid_radius == pytest.approx(0.3)

    def test_half_half(self):
        d = pseudo_disc(0.5, 0.5)
        assert d.euclid_center == pytest.approx(0.4)
        assert d.euclid_radius == pytest.approx(0.4)

    def test_boundary_has_constant_distance(self, rng):
        theta = np.arange(64) * (2.0 * np.pi / 64)
        for _ in range(50):
            a = np.sqrt(rng.uniform()) * 0.99 * np.exp(2j * np.pi * rng.uniform())
            r = rng.uniform(0.05, 0.95)
            d = pseudo_disc(a, r)
            boundary = d.euclid_center + d.euclid_radius * np.exp(1j * theta)
            assert np.max(np.abs(rho(a, boundary) - r)) < 1e-9

    def test_contains_matches_metric(self, rng):
        a, r = 0.3 + 0.45j, 0.4
        d = pseudo_disc(a, r)
        pts = (rng.uniform(-1, 1, 500) + 1j * rng.uniform(-1, 1, 500))
        pts = pts[np.abs(pts) < 1.0]
        assert np.array_equal(d.contains(pts), rho(a, pts) < r)

    def test_stays_inside_disc(self):
        d = pseudo_disc(0.99, 0.9)
        assert abs(d.euclid_center) + d.euclid_radius < 1.0
        assert d.gap_outer > 0.0

    def test_radius_domain(self):
        with pytest.raises(DomainError):
            pseudo_disc(0.5, 1.0)

    def test_polar_sample_mass(self):
        d = pseudo_disc(0.6 + 0.1j, 0.35)
        gaps, weights = d.polar_sample()
        assert weights.sum() == pytest.approx(d.euclid_radius ** 2, rel=1e-12)
        assert np.all(gaps > 0.0)


class TestCarlesonSquare:
    def test_zero_is_whole_disc(self):
        sq = carleson_square(0.0)
        assert sq.is_whole_disc
        pts = np.array([0.0, 0.5j, -0.99])
        assert np.all(sq.contains(pts))

    def test_halfwidth(self):
        sq = carleson_square(0.5)
        assert sq.angular_halfwidth == pytest.approx(0.25)
        assert sq.radial_lower == pytest.approx(0.5)

    def test_membership_example(self):
        assert carleson_square(0.5).contains(0.75 * np.exp(0.1j))

    def test_rotation_covariance(self):
        sq = carleson_square(0.5 * np.exp(1.3j))
        inner = 0.75 * np.exp(1.3j + 0.1j)
        outer = 0.75 * np.exp(1.3j + 0.3j)
        assert sq.contains(inner) and not sq.contains(outer)

    def test_literal_convention_differs(self):
        # the printed radial bound 1-|z| < |zeta| shrinks the box for
        # |z| < 1/2 and grows it for |z| > 1/2
        pt = 0.5 * np.exp(0.05j)
        assert carleson_square(0.3, "standard").contains(pt)
        assert not carleson_square(0.3, "literal").contains(pt)
        assert not carleson_square(0.72, "standard").contains(0.5)
        assert carleson_square(0.72, "literal").contains(0.5)


class TestTentRegion:
    def test_tent_at_zero_rejected(self):
        with pytest.raises(DomainError):
            tent(0.0)

    def test_duality(self, rng):
        # zeta in T(z) iff z in Gamma(zeta), on random pairs
        z = rng.uniform(0.05, 0.95, 10_000) * np.exp(2j * np.pi * rng.uniform(0, 1, 10_000))
        zeta = rng.uniform(0.05, 0.95, 10_000) * np.exp(2j * np.pi * rng.uniform(0, 1, 10_000))
        in_tent = np.array([tent(a).contains(b) for a, b in zip(z[:200], zeta[:200])])
        in_region = np.array([nt_region(b).contains(a) for a, b in zip(z[:200], zeta[:200])])
        assert np.array_equal(in_tent, in_region)

    def test_tent_shrinks_toward_boundary(self):
        probe = 0.97 * np.exp(0.01j)
        assert tent(0.9).contains(probe)
        assert not tent(0.96).contains(probe)


class TestLattices:
    def test_covering_at_half(self, rng):
        lattice = r_lattice(0.5, depth=16)
        pts = np.sqrt(rng.uniform(0, 1, 10_000)) * np.exp(2j * np.pi * rng.uniform(0, 1, 10_000))
        pts = pts[np.abs(pts) < 1.0]
        # bucket lattice nodes by gap so each query only meets nearby rings
        lat_gap = 1.0 - np.abs(lattice)
        order = np.argsort(lat_gap)
        lattice, lat_gap = lattice[order], lat_gap[order]
        for chunk in np.array_split(pts, 40):
            gap = 1.0 - np.abs(chunk)
            lo = np.searchsorted(lat_gap, gap / 8.0)
            hi = np.searchsorted(lat_gap, np.minimum(gap * 8.0, 1.0), side="right")
            for pt, l, h in zip(chunk, lo, hi):
                d = rho(pt, lattice[l:h])
                assert d.size and np.min(d) <= 0.5

    def test_separation(self):
        lattice = r_lattice(0.5, depth=8)
        sample = lattice[::7][:300]
        d = rho(sample[:, None], lattice[None, :])
        d[d == 0.0] = 1.0
        assert np.min(d) >= 0.5 / 5.0

    def test_all_inside(self):
        lattice = r_lattice(0.3, depth=6)
        assert np.all(np.abs(lattice) < 1.0)

    def test_smaller_r_larger_lattice(self):
        assert len(r_lattice(0.2, depth=6)) > len(r_lattice(0.4, depth=6))

    def test_resource_guard(self):
        with pytest.raises(ResourceLimitError):
            r_lattice(0.001, depth=16)

    def test_probe_lattice_gaps_exact(self):
        pts, gaps = probe_lattice(depth=6)
        assert np.allclose(1.0 - np.abs(pts), gaps, atol=1e-15)
