import io
import math

import numpy as np
from django.test import SimpleTestCase
from scipy import stats
from scipy.spatial import cKDTree

from .geometry import ORIGIN, Ball, Point3, distance, sample_uniform_ball, volume
from .pointprocess import (
    DUMP_HEADER,
    MhccpConfig,
    PointSet,
    density_lambda2,
    density_lambda3,
    lambda3_derivative,
    lambda3_limit,
    matern2_thin,
    sample_bpp,
    sample_mhccp,
    sample_ppp,
    write_realization,
)

R1 = 10_000.0
D_MIN = 1_000.0


def interior_count(points, radius):
    return int(np.count_nonzero(np.linalg.norm(points, axis=1) <= radius))


class GeometryTests(SimpleTestCase):
    def test_volume(self):
        self.assertEqual(volume(Ball(ORIGIN, 0.0)), 0.0)
        self.assertAlmostEqual(volume(Ball(ORIGIN, 1.0)), 4.0 * math.pi / 3.0)
        self.assertAlmostEqual(volume(Ball(ORIGIN, 1e4)) / 4.18879e12, 1.0, places=5)

    def test_negative_radius_rejected(self):
        with self.assertRaises(ValueError):
            Ball(ORIGIN, -1.0)

    def test_degenerate_ball_returns_center(self):
        rng = np.random.default_rng(1)
        center = Point3(1.0, -2.0, 3.0)
        self.assertEqual(sample_uniform_ball(rng, Ball(center, 0.0)), center)

    def test_samples_stay_inside_ball(self):
        rng = np.random.default_rng(2)
        ball = Ball(Point3(5.0, 5.0, 5.0), 2.5)
        points = sample_uniform_ball(rng, ball, size=10_000)
        self.assertTrue(ball.contains(points).all())

    def test_sample_mean_is_center(self):
        rng = np.random.default_rng(3)
        points = sample_uniform_ball(rng, Ball(ORIGIN, 1.0), size=100_000)
        self.assertTrue(np.all(np.abs(points.mean(axis=0)) < 0.02))

    def test_radial_distribution(self):
        """Radial CDF of uniform-ball samples is (t/R)^3"""
        rng = np.random.default_rng(4)
        radius = 7.0
        points = sample_uniform_ball(rng, Ball(ORIGIN, radius), size=100_000)
        r = np.linalg.norm(points, axis=1) / radius
        result = stats.kstest(r, lambda t: np.clip(t, 0.0, 1.0) ** 3)
        self.assertGreater(result.pvalue, 0.01)

    def test_distance(self):
        self.assertEqual(distance(ORIGIN, ORIGIN), 0.0)
        self.assertEqual(distance(ORIGIN, Point3(3.0, 4.0, 0.0)), 5.0)
        rng = np.random.default_rng(5)
        a = Point3(*rng.normal(size=3))
        b = Point3(*rng.normal(size=3))
        self.assertEqual(distance(a, b), distance(b, a))

    def test_point_rejects_non_finite(self):
        with self.assertRaises(ValueError):
            Point3(float('nan'), 0.0, 0.0)


class PoissonAndBinomialTests(SimpleTestCase):
    region = Ball(ORIGIN, R1)

    def test_bpp_counts(self):
        rng = np.random.default_rng(10)
        self.assertEqual(len(sample_bpp(rng, 0, self.region)), 0)
        bpp = sample_bpp(rng, 40, self.region)
        self.assertEqual(len(bpp), 40)
        self.assertTrue(self.region.contains(bpp.points).all())

    def test_single_bpp_point_is_uniform(self):
        rng = np.random.default_rng(11)
        radii = np.array([
            np.linalg.norm(sample_bpp(rng, 1, self.region).points[0]) for _ in range(100_000)
        ]) / R1
        self.assertGreater(stats.kstest(radii, lambda t: np.clip(t, 0.0, 1.0) ** 3).pvalue, 0.01)

    def test_ppp_zero_density(self):
        rng = np.random.default_rng(12)
        self.assertEqual(len(sample_ppp(rng, 0.0, self.region)), 0)

    def test_ppp_count_is_poisson(self):
        rng = np.random.default_rng(13)
        counts = np.array([len(sample_ppp(rng, 1e-11, self.region)) for _ in range(10_000)])
        expected = 1e-11 * volume(self.region)
        self.assertAlmostEqual(expected, 41.888, places=2)
        self.assertLess(abs(counts.mean() - expected) / expected, 0.02)
        self.assertLess(abs(counts.var() / counts.mean() - 1.0), 0.05)


class MaternThinningTests(SimpleTestCase):
    def test_single_candidate_retained(self):
        rng = np.random.default_rng(20)
        candidates = PointSet(np.array([[1.0, 2.0, 3.0]]))
        self.assertEqual(len(matern2_thin(rng, candidates, 10.0)), 1)

    def test_smaller_mark_wins(self):
        candidates = PointSet(np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]))
        marks = np.random.default_rng(21).random(2)
        kept = matern2_thin(np.random.default_rng(21), candidates, 1.0)
        self.assertEqual(len(kept), 1)
        np.testing.assert_array_equal(kept.points[0], candidates.points[np.argmin(marks)])

    def test_far_candidates_all_retained(self):
        rng = np.random.default_rng(22)
        candidates = PointSet(np.array([[0.0, 0.0, 0.0], [5.0, 0.0, 0.0], [0.0, 5.0, 0.0]]))
        self.assertEqual(len(matern2_thin(rng, candidates, 1.0)), 3)

    def test_retained_density_matches_formula(self):
        """Interior density of retained points equals lambda2"""
        region = Ball(ORIGIN, R1)
        inner = R1 - D_MIN
        inner_volume = volume(Ball(ORIGIN, inner))
        for lambda1, realizations in ((1e-11, 10_000), (1e-10, 2_000), (1e-9, 500)):
            with self.subTest(lambda1=lambda1):
                rng = np.random.default_rng(23)
                total = 0
                for _ in range(realizations):
                    kept = matern2_thin(rng, sample_ppp(rng, lambda1, region), D_MIN)
                    total += interior_count(kept.points, inner)
                empirical = total / (realizations * inner_volume)
                expected = density_lambda2(lambda1, D_MIN)
                self.assertLess(abs(empirical - expected) / expected, 0.03)


class MhccpTests(SimpleTestCase):
    def config(self, lambda1=1e-11, c_bar=5.0):
        return MhccpConfig(lambda1=lambda1, d_min=D_MIN, c_bar=c_bar, region=Ball(ORIGIN, R1))

    def test_invalid_config_rejected(self):
        with self.assertRaises(ValueError):
            MhccpConfig(lambda1=-1.0, d_min=0.0, c_bar=-2.0, region=Ball(ORIGIN, R1))

    def test_zero_mean_cluster_size(self):
        rng = np.random.default_rng(30)
        realization = sample_mhccp(rng, self.config(lambda1=1e-10, c_bar=0.0))
        self.assertGreater(len(realization.parents), 0)
        self.assertEqual(len(realization.points), 0)

    def test_hard_core_and_cluster_invariants(self):
        rng = np.random.default_rng(31)
        cfg = self.config(lambda1=1e-10)
        violations = 0
        for _ in range(1_000):
            realization = sample_mhccp(rng, cfg)
            if len(realization.parents) > 1:
                close = cKDTree(realization.parents).query_pairs(r=D_MIN * (1.0 - 1e-12))
                violations += len(close)
            if len(realization.points):
                offsets = realization.points - realization.parents[realization.parent_index]
                violations += int(np.count_nonzero(np.linalg.norm(offsets, axis=1) > D_MIN / 2.0))
        self.assertEqual(violations, 0)

    def test_cluster_sizes_match_points(self):
        rng = np.random.default_rng(32)
        realization = sample_mhccp(rng, self.config())
        self.assertEqual(int(realization.cluster_sizes().sum()), len(realization.points))

    def test_member_density_matches_formula(self):
        rng = np.random.default_rng(33)
        cfg = self.config()
        inner = R1 - 1.5 * D_MIN
        realizations = 10_000
        total = sum(interior_count(sample_mhccp(rng, cfg).points, inner) for _ in range(realizations))
        empirical = total / (realizations * volume(Ball(ORIGIN, inner)))
        expected = density_lambda3(cfg.lambda1, D_MIN, cfg.c_bar)
        self.assertLess(abs(empirical - expected) / expected, 0.03)


class DensityFormulaTests(SimpleTestCase):
    def test_lambda2_value(self):
        self.assertAlmostEqual(density_lambda2(1e-11, D_MIN) / 9.7935e-12, 1.0, places=4)

    def test_lambda2_limits(self):
        v_h = 4.0 * math.pi * D_MIN ** 3 / 3.0
        self.assertAlmostEqual(density_lambda2(1e-20, D_MIN) / 1e-20, 1.0, places=8)
        self.assertAlmostEqual(density_lambda2(1e-3, D_MIN) * v_h, 1.0, places=12)
        for lambda1 in (1e-12, 1e-11, 1e-10, 1e-9):
            self.assertLessEqual(density_lambda2(lambda1, D_MIN), min(lambda1, 1.0 / v_h))

    def test_lambda3(self):
        self.assertEqual(density_lambda3(1e-11, D_MIN, 0.0), 0.0)
        self.assertEqual(density_lambda3(1e-11, D_MIN, 1.0), density_lambda2(1e-11, D_MIN))
        self.assertAlmostEqual(density_lambda3(1e-11, D_MIN, 5.0) / 4.8967e-11, 1.0, places=4)

    def test_saturation(self):
        limit = lambda3_limit(D_MIN, 5.0)
        self.assertAlmostEqual(limit / 1.19366e-9, 1.0, places=5)
        self.assertGreaterEqual(density_lambda3(1e-8, D_MIN, 5.0), 0.99 * limit)

    def test_monotone_and_bounded(self):
        grid = np.logspace(-14, -6, 81)
        values = [density_lambda3(lam, D_MIN, 5.0) for lam in grid]
        self.assertTrue(all(b >= a for a, b in zip(values, values[1:])))
        self.assertTrue(all(v <= lambda3_limit(D_MIN, 5.0) for v in values))
        self.assertTrue(all(lambda3_derivative(lam, D_MIN, 5.0) >= 0.0 for lam in grid))
        self.assertAlmostEqual(lambda3_derivative(1e-6, D_MIN, 5.0), 0.0)


class RealizationDumpTests(SimpleTestCase):
    def test_dump_table(self):
        rng = np.random.default_rng(40)
        region = Ball(ORIGIN, R1)
        bpp = sample_bpp(rng, 4, region)
        mhccp = sample_mhccp(rng, MhccpConfig(1e-11, D_MIN, 5.0, region))

        stream = io.StringIO()
        rows = write_realization(stream, bpp, mhccp)

        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0].split(','), DUMP_HEADER)
        self.assertEqual(rows, 4 + len(mhccp.parents) + len(mhccp.points))
        self.assertEqual(len(lines), rows + 1)
        self.assertTrue(lines[1].startswith('bpp,-1,'))
