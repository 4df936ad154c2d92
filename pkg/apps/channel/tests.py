import math

import mpmath
import numpy as np
from django.test import SimpleTestCase
from scipy import integrate, stats

from apps.common.exceptions import NumericFailure, TruncationNotConverged

from .antenna import BeamPattern, mean_gain_mixture, sample_interferer_gain, target_gain
from .fading import (
    SRParams,
    sr_cdf,
    sr_mean,
    sr_mgf,
    sr_pdf,
    sr_sample,
    sr_series_coeff,
)
from .special import hyp1f1, log_hyp1f1, log_pochhammer, lower_incomplete_gamma

mpmath.mp.dps = 50

DEFAULT_SR = SRParams(0.158, 1.0, 0.1)
ACCEPTANCE_SR = (
    SRParams(0.158, 1.0, 0.1),
    SRParams(0.126, 5.0, 0.251),
    SRParams(0.063, 2.0, 0.0005),
)


def relative_error(value, reference):
    reference = float(reference)
    return abs(value - reference) / abs(reference)


class Hyp1f1Tests(SimpleTestCase):
    def test_zero_argument(self):
        for a, b in ((0.5, 1.0), (3.0, 2.0), (-2.0, 1.0)):
            self.assertEqual(hyp1f1(a, b, 0.0), 1.0)

    def test_exponential_identity(self):
        for x in (-5.0, 0.3, 1.0, 12.0, 60.0):
            self.assertLess(relative_error(hyp1f1(1.0, 1.0, x), math.exp(x)), 1e-12)

    def test_against_arbitrary_precision(self):
        self.assertLess(relative_error(hyp1f1(2.0, 1.0, 0.5), mpmath.hyp1f1(2, 1, 0.5)), 1e-10)
        for a in (0.5, 1.0, 2.5, 5.0):
            for x in (0.1, 1.0, 10.0, 50.0, 200.0):
                with self.subTest(a=a, x=x):
                    self.assertLess(relative_error(hyp1f1(a, 1.0, x), mpmath.hyp1f1(a, 1, x)), 1e-10)

    def test_negative_argument(self):
        for a, x in ((1.5, -20.0), (0.5, -3.0), (4.0, -40.0)):
            with self.subTest(a=a, x=x):
                self.assertLess(relative_error(hyp1f1(a, 1.0, x), mpmath.hyp1f1(a, 1, x)), 1e-10)

    def test_large_negative_argument(self):
        for a, x in ((1.5, -750.0), (1.5, -1000.0), (0.5, -900.0), (2.5, -1200.0)):
            with self.subTest(a=a, x=x):
                expected = mpmath.hyp1f1(a, 1, x)
                self.assertLess(relative_error(hyp1f1(a, 1.0, x), expected), 1e-10)
        self.assertLess(hyp1f1(1.5, 1.0, -1000.0), 0.0)

    def test_terminating_series(self):
        # 1F1(-3; 1; x) is the Laguerre polynomial L_3
        x = 2.0
        expected = 1 - 3 * x + 1.5 * x ** 2 - x ** 3 / 6
        self.assertAlmostEqual(hyp1f1(-3.0, 1.0, x), expected, places=13)
        self.assertAlmostEqual(hyp1f1(-3.0, 1.0, -x), float(mpmath.hyp1f1(-3, 1, -x)), places=12)

    def test_pole_rejected(self):
        with self.assertRaises(NumericFailure):
            hyp1f1(1.0, -2.0, 1.0)

    def test_log_variant_beyond_overflow(self):
        expected = mpmath.log(mpmath.hyp1f1(2.5, 1, 1000))
        self.assertLess(relative_error(log_hyp1f1(2.5, 1.0, 1000.0), expected), 1e-10)
        self.assertAlmostEqual(log_hyp1f1(1.0, 1.0, 3.0), 3.0, places=12)


class IncompleteGammaTests(SimpleTestCase):
    def test_exponential_case(self):
        for x in (0.01, 0.5, 3.0, 20.0):
            self.assertAlmostEqual(lower_incomplete_gamma(1.0, x), -math.expm1(-x), places=14)

    def test_zero_argument(self):
        self.assertEqual(lower_incomplete_gamma(2.5, 0.0), 0.0)

    def test_against_quadrature(self):
        reference, _ = integrate.quad(lambda t: t ** 2 * math.exp(-t), 0.0, 2.0, epsabs=0, epsrel=1e-13)
        self.assertLess(relative_error(lower_incomplete_gamma(3.0, 2.0), reference), 1e-9)

    def test_against_arbitrary_precision(self):
        for a in (0.5, 1.0, 3.0, 10.5, 40.0):
            for x in (0.05, 1.0, 5.0, 30.0, 100.0):
                with self.subTest(a=a, x=x):
                    expected = mpmath.gammainc(a, 0, x)
                    self.assertLess(relative_error(lower_incomplete_gamma(a, x), expected), 1e-9)

    def test_large_shape(self):
        for a in (180.0, 201.0):
            for x in (0.5, 10.0, 30.0):
                with self.subTest(a=a, x=x):
                    expected = mpmath.gammainc(a, 0, x)
                    self.assertLess(relative_error(lower_incomplete_gamma(a, x), expected), 1e-9)
        self.assertLess(relative_error(lower_incomplete_gamma(201.0, 10.0), mpmath.mpf("2.376e194")), 1e-3)

    def test_overflow_reported(self):
        with self.assertRaises(NumericFailure):
            lower_incomplete_gamma(201.0, 300.0)

    def test_monotone_towards_gamma(self):
        values = [lower_incomplete_gamma(4.0, x) for x in np.linspace(0.0, 60.0, 61)]
        self.assertTrue(all(b >= a for a, b in zip(values, values[1:])))
        self.assertAlmostEqual(values[-1], math.gamma(4.0), places=10)

    def test_pochhammer(self):
        self.assertEqual(log_pochhammer(0.0, 1), (0, -math.inf))
        sign, log_abs = log_pochhammer(-1.0, 1)
        self.assertEqual((sign, log_abs), (-1, 0.0))
        sign, log_abs = log_pochhammer(-0.5, 3)
        self.assertEqual(sign, -1)
        self.assertAlmostEqual(math.exp(log_abs), 0.5 * 0.5 * 1.5)


class SRParamsTests(SimpleTestCase):
    def test_derived_constants(self):
        self.assertAlmostEqual(DEFAULT_SR.kappa, 2.40385, places=5)
        self.assertAlmostEqual(DEFAULT_SR.beta, 1.0 / 0.316)
        self.assertAlmostEqual(DEFAULT_SR.delta, 0.1 / (0.316 * 0.416))
        self.assertAlmostEqual(DEFAULT_SR.beta_minus_delta, DEFAULT_SR.beta - DEFAULT_SR.delta)
        self.assertAlmostEqual(sr_mean(DEFAULT_SR), 0.416)

    def test_invalid_parameters(self):
        for args in ((0.0, 1.0, 0.1), (0.1, -1.0, 0.1), (0.1, 1.0, -0.5)):
            with self.subTest(args=args), self.assertRaises(ValueError):
                SRParams(*args)


class SeriesCoefficientTests(SimpleTestCase):
    def test_leading_coefficient(self):
        for params in ACCEPTANCE_SR:
            self.assertAlmostEqual(sr_series_coeff(params, 0), params.kappa)

    def test_unit_shape_has_single_term(self):
        for k in range(1, 20):
            self.assertEqual(sr_series_coeff(DEFAULT_SR, k), 0.0)

    def test_second_coefficient_for_q2(self):
        params = SRParams(0.158, 2.0, 0.1)
        self.assertAlmostEqual(sr_series_coeff(params, 1), params.kappa * params.delta)

    def test_integer_shape_termination(self):
        for q in (1, 2, 3, 5):
            params = SRParams(0.126, float(q), 0.251)
            nonzero = [k for k in range(40) if sr_series_coeff(params, k) != 0.0]
            self.assertEqual(nonzero, list(range(q)))

    def test_large_index_stays_finite(self):
        params = SRParams(0.158, 1.5, 0.1)
        self.assertTrue(math.isfinite(sr_series_coeff(params, 150)))


class SRDistributionTests(SimpleTestCase):
    def test_pdf_at_origin(self):
        self.assertAlmostEqual(sr_pdf(DEFAULT_SR, 0.0), 2.40385, places=5)

    def test_pdf_unit_shape_is_exponential(self):
        mean = 2 * DEFAULT_SR.c + DEFAULT_SR.omega
        for x in (0.0, 0.1, 1.0, 5.0, 20.0):
            self.assertAlmostEqual(sr_pdf(DEFAULT_SR, x), math.exp(-x / mean) / mean, places=12)

    def test_pdf_normalized(self):
        for params in ACCEPTANCE_SR + (SRParams(0.158, 1.5, 0.1),):
            with self.subTest(params=params):
                total, _ = integrate.quad(lambda x: sr_pdf(params, x), 0.0, math.inf, limit=200)
                self.assertAlmostEqual(total, 1.0, delta=1e-6)

    def test_pdf_far_tail(self):
        self.assertEqual(sr_pdf(DEFAULT_SR, 1e6), 0.0)
        self.assertGreater(sr_pdf(SRParams(0.158, 2.0, 0.1), 200.0), 0.0)

    def test_cdf_at_origin(self):
        self.assertEqual(sr_cdf(DEFAULT_SR, 0.0), 0.0)

    def test_cdf_unit_shape(self):
        mean = 2 * DEFAULT_SR.c + DEFAULT_SR.omega
        for x in (0.01, 0.4, 2.0, 10.0):
            self.assertAlmostEqual(sr_cdf(DEFAULT_SR, x), -math.expm1(-x / mean), places=13)

    def test_cdf_derivative_matches_pdf(self):
        h = 1e-5
        for params in ACCEPTANCE_SR + (SRParams(0.158, 1.5, 0.1),):
            for x in (0.05, 0.2, 0.5, 1.0, 2.0, 4.0):
                with self.subTest(params=params, x=x):
                    derivative = (
                        sr_cdf(params, x + h, tol=1e-15) - sr_cdf(params, x - h, tol=1e-15)
                    ) / (2 * h)
                    expected = sr_pdf(params, x)
                    self.assertAlmostEqual(derivative, expected, delta=1e-6 * max(1.0, expected))

    def test_cdf_monotone_and_bounded(self):
        params = SRParams(0.158, 1.5, 0.1)
        values = [sr_cdf(params, x) for x in np.linspace(0.0, 30.0, 121)]
        self.assertTrue(all(0.0 <= v <= 1.0 for v in values))
        self.assertTrue(all(b >= a for a, b in zip(values, values[1:])))
        self.assertAlmostEqual(values[-1], 1.0, places=9)

    def test_cdf_truncation_failure(self):
        with self.assertRaises(TruncationNotConverged):
            sr_cdf(SRParams(0.158, 1.5, 0.1), 1.0, k_max=0)

    def test_mgf_values(self):
        self.assertEqual(sr_mgf(DEFAULT_SR, 0.0), 1.0)
        self.assertAlmostEqual(sr_mgf(DEFAULT_SR, 1.0), 0.316 / (0.416 * 1.316 - 0.1), places=12)
        self.assertAlmostEqual(sr_mgf(DEFAULT_SR, 1.0), 0.70622, places=5)

    def test_mgf_bounds_and_monotonicity(self):
        for params in ACCEPTANCE_SR:
            values = sr_mgf(params, np.linspace(0.0, 50.0, 201))
            self.assertTrue(np.all(values > 0.0))
            self.assertTrue(np.all(values <= 1.0))
            self.assertTrue(np.all(np.diff(values) < 0.0))

    def test_mgf_matches_samples(self):
        for params in ACCEPTANCE_SR:
            samples = sr_sample(np.random.default_rng(50), params, size=1_000_000)
            for x in (0.5, 1.0, 5.0):
                with self.subTest(params=params, x=x):
                    empirical = np.exp(-x * samples).mean()
                    self.assertLess(relative_error(empirical, sr_mgf(params, x)), 0.005)


class SRSamplerTests(SimpleTestCase):
    def test_sample_mean(self):
        for params in ACCEPTANCE_SR:
            with self.subTest(params=params):
                samples = sr_sample(np.random.default_rng(60), params, size=1_000_000)
                self.assertLess(relative_error(samples.mean(), sr_mean(params)), 0.005)

    def test_samples_follow_series_cdf(self):
        shapes = ACCEPTANCE_SR + (SRParams(0.158, 2.0, 0.1), SRParams(0.158, 3.0, 0.1))
        for params in shapes:
            with self.subTest(params=params):
                samples = sr_sample(np.random.default_rng(61), params, size=100_000)
                cdf = np.vectorize(lambda x: sr_cdf(params, x))
                self.assertGreater(stats.kstest(samples, cdf).pvalue, 0.01)

    def test_no_line_of_sight_is_rayleigh(self):
        params = SRParams(0.2, 1.0, 0.0)
        samples = sr_sample(np.random.default_rng(62), params, size=100_000)
        self.assertGreater(stats.kstest(samples, 'expon', args=(0.0, 0.4)).pvalue, 0.01)

    def test_scalar_draw(self):
        self.assertIsInstance(sr_sample(np.random.default_rng(63), DEFAULT_SR), float)


class AntennaTests(SimpleTestCase):
    def pattern(self, theta=math.pi / 6):
        return BeamPattern(g_main_tx=10.0, g_side_tx=0.1, g_main_rx=100.0, theta=theta)

    def test_target_gain(self):
        self.assertEqual(target_gain(BeamPattern(1.0, 1.0, 1.0, 0.5)), 1.0)
        self.assertEqual(target_gain(self.pattern()), 1000.0)
        self.assertEqual(target_gain(self.pattern(theta=0.0)), target_gain(self.pattern(theta=2.0)))

    def test_from_dbi(self):
        pattern = BeamPattern.from_dbi(10.0, -10.0, 30.0, math.pi / 6)
        self.assertAlmostEqual(pattern.g_main_tx, 10.0)
        self.assertAlmostEqual(pattern.g_side_tx, 0.1)
        self.assertAlmostEqual(pattern.g_main_rx, 1000.0)

    def test_invalid_pattern(self):
        with self.assertRaises(ValueError):
            BeamPattern(g_main_tx=1.0, g_side_tx=2.0, g_main_rx=1.0, theta=7.0)

    def test_degenerate_widths(self):
        rng = np.random.default_rng(70)
        self.assertTrue(np.all(sample_interferer_gain(rng, self.pattern(2 * math.pi), size=1000) == 1000.0))
        self.assertTrue(np.all(sample_interferer_gain(rng, self.pattern(0.0), size=1000) == 10.0))

    def test_main_lobe_fraction(self):
        rng = np.random.default_rng(71)
        n = 100_000
        gains = sample_interferer_gain(rng, self.pattern(math.pi / 2), size=n)
        fraction = np.mean(gains == 1000.0)
        self.assertLess(abs(fraction - 0.25), 3 * math.sqrt(0.25 * 0.75 / n))

    def test_mixture(self):
        pattern = self.pattern(math.pi)
        self.assertAlmostEqual(mean_gain_mixture(pattern, lambda g: 1.0), 1.0)
        self.assertAlmostEqual(mean_gain_mixture(pattern, lambda g: g), (1000.0 + 10.0) / 2)

    def test_sampled_mean_matches_mixture(self):
        pattern = self.pattern()
        n = 100_000
        gains = sample_interferer_gain(np.random.default_rng(72), pattern, size=n)
        p = pattern.main_lobe_probability
        sigma = (pattern.main_gain - pattern.side_gain) * math.sqrt(p * (1 - p) / n)
        self.assertLess(abs(gains.mean() - mean_gain_mixture(pattern, lambda g: g)), 3 * sigma)
