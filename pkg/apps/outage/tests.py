import csv
import io
import json
import math
import os
import tempfile
from dataclasses import replace

import numpy as np
from django.contrib.auth import get_user_model
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework.exceptions import ValidationError
from rest_framework.test import APIClient
from scipy import stats

from apps.channel.antenna import mean_gain_mixture, target_gain
from apps.channel.fading import SRParams, sr_cdf, sr_mgf
from apps.channel.special import lower_incomplete_gamma
from apps.common.exceptions import (
    ConfigParseError,
    EmptyChannel,
    InvalidChannelCount,
    InvalidThreshold,
    ScenarioError,
    TruncationNotConverged,
)
from apps.common.units import db_to_linear
from apps.topology.geometry import ORIGIN, Ball
from apps.topology.pointprocess import MhccpConfig, sample_bpp, sample_mhccp

from .analysis import (
    a2_share_for,
    alzer_bound,
    laplace_interference,
    m1,
    m2,
    outage_curve,
    outage_probability,
    s_value,
    zeta,
)
from .config import ASSUMED_DEFAULT_KEYS, parse_config
from .models import OutageRun
from .montecarlo import (
    OutageEstimate,
    _path_gains,
    assign_channels,
    estimate_outage,
    estimate_outage_curve,
    replication_rng,
    sample_interference,
    simulate_range,
)
from .runner import CSV_COLUMNS, ResultRow, emit_csv, run, store_run
from .scenario import (
    ChannelPolicy,
    DistanceMode,
    Scenario,
    SeriesControl,
    SnapshotOptions,
    TargetGroup,
    with_parameter,
)
from .tasks import celery_executor

SEED = 20240501
THRESHOLDS_DB = (-30, -25, -20, -18, -15, -10)


def default_scenario():
    return parse_config('').scenario


def quiet_scenario(**changes):
    """Four A1 nodes, no A2 members: only the BPP matters"""
    scn = default_scenario()
    topology = replace(scn.topology, lambda1=1e-13, c_bar=0.0)
    return replace(scn, topology=topology, **changes)


def is_monotone(values, increasing=True):
    pairs = list(zip(values, values[1:]))
    if increasing:
        return all(b >= a - 1e-12 for a, b in pairs)
    return all(b <= a + 1e-12 for a, b in pairs)


class ScenarioTests(SimpleTestCase):
    def test_defaults(self):
        scn = default_scenario()
        self.assertEqual(scn.d0, 300_000.0)
        self.assertEqual(scn.region.radius, 10_000.0)
        self.assertEqual(scn.topology.d_min, 1_000.0)
        self.assertAlmostEqual(scn.p_m, 100.0)
        self.assertAlmostEqual(scn.p2, 10 ** 1.9)
        self.assertAlmostEqual(scn.noise_power / 1e-19, 1.0)
        self.assertEqual(scn.target_group, TargetGroup.A1)
        self.assertEqual(scn.n1_per_channel, 10)
        self.assertEqual(scn.n1_interferers, 9)
        self.assertEqual(replace(scn, target_group='A2').n1_interferers, 10)

    def test_divisibility_enforced(self):
        with self.assertRaises(InvalidChannelCount):
            with_parameter(default_scenario(), 'K', 7)

    def test_a1_target_needs_a1_nodes(self):
        with self.assertRaisesMessage(ScenarioError, 'at least one A1 node per channel'):
            replace(default_scenario(), n1_total=0, k_channels=1)
        scn = replace(default_scenario(), n1_total=0, k_channels=1, target_group=TargetGroup.A2)
        self.assertEqual(scn.n1_interferers, 0)
        self.assertLessEqual(laplace_interference(scn, 3e3), 1.0)

    def test_invalid_values_listed(self):
        with self.assertRaisesMessage(ValueError, 'alpha must be >= 2'):
            replace(default_scenario(), alpha=1.5, d0=-1.0)

    def test_serializable_form(self):
        scn = replace(default_scenario(), target_group=TargetGroup.A2)
        data = json.loads(json.dumps(scn.to_dict()))
        self.assertEqual(Scenario.from_dict(data), scn)

    def test_with_parameter(self):
        scn = default_scenario()
        self.assertEqual(with_parameter(scn, 'R1', 5_000.0).region.radius, 5_000.0)
        self.assertEqual(with_parameter(scn, 'lambda1', 1e-9).topology.lambda1, 1e-9)
        self.assertEqual(with_parameter(scn, 'p_m', 10.0).p_m, 10.0)
        self.assertEqual(with_parameter(scn, 'K', 8).n1_per_channel, 5)

    def test_snapshot_options(self):
        opts = SnapshotOptions('exact-geometry', 'per-cluster-share', 3e5)
        self.assertEqual(opts.distance_mode, DistanceMode.EXACT_GEOMETRY)
        self.assertEqual(SnapshotOptions.from_dict(opts.to_dict()), opts)
        with self.assertRaises(ValueError):
            SnapshotOptions(distance_mode='nearest')


class HelperFactorTests(SimpleTestCase):
    def setUp(self):
        self.scn = default_scenario()

    def test_zeta(self):
        self.assertEqual(zeta(0), 1.0)
        self.assertAlmostEqual(zeta(1), 2 ** -0.5, places=12)
        self.assertAlmostEqual(zeta(2), 6 ** (-1 / 3), places=12)
        self.assertTrue(all(0 < zeta(k) <= 1 for k in range(50)))

    def test_s_value(self):
        T = db_to_linear(-18.0)
        self.assertEqual(s_value(self.scn, T, 0, 0), 0.0)
        doubled = replace(self.scn, p_m=2 * self.scn.p_m)
        self.assertAlmostEqual(s_value(doubled, T, 1, 1) * 2, s_value(self.scn, T, 1, 1))
        expected = self.scn.sr.beta_minus_delta * T * self.scn.d0 ** 2 / (self.scn.p_m * 1e4)
        self.assertAlmostEqual(s_value(self.scn, T, 0, 1) / expected, 1.0, places=12)
        self.assertAlmostEqual(s_value(self.scn, T, 0, 1), 3428.9, delta=1.0)

    def test_m1_is_fading_mgf(self):
        grid = np.linspace(0.0, 10.0, 101)
        self.assertEqual(m1(self.scn, 0.0), 1.0)
        np.testing.assert_array_equal(m1(self.scn, grid), sr_mgf(self.scn.sr, grid))
        self.assertTrue(np.all(np.diff(m1(self.scn, grid)) < 0))

    def test_m2(self):
        self.assertEqual(m2(self.scn, 1, 0.0), 1.0)
        s = 5e3
        scale = s * self.scn.p2 * self.scn.d0 ** -2
        expected = mean_gain_mixture(self.scn.beam, lambda g: m1(self.scn, scale * g))
        self.assertEqual(m2(self.scn, 2, s), expected)
        self.assertTrue(0 < m2(self.scn, 1, s) < 1)

    def test_m2_full_main_lobe(self):
        scn = replace(self.scn, beam=replace(self.scn.beam, theta=2 * math.pi))
        s = 5e3
        scale = s * scn.p1 * scn.d0 ** -2
        self.assertAlmostEqual(m2(scn, 1, s), m1(scn, scale * target_gain(scn.beam)), places=14)

    def test_m2_equal_lobes(self):
        beam = replace(self.scn.beam, g_side_tx=self.scn.beam.g_main_tx)
        reference = m2(replace(self.scn, beam=beam), 1, 5e3)
        for theta in (0.0, 0.5, math.pi, 2 * math.pi):
            value = m2(replace(self.scn, beam=replace(beam, theta=theta)), 1, 5e3)
            self.assertAlmostEqual(value, reference, places=14)

    def test_alzer_approximation(self):
        for x in np.logspace(-3, 2, 40):
            self.assertAlmostEqual(alzer_bound(0, x), lower_incomplete_gamma(1.0, x), places=12)
        for k in range(1, 11):
            for x in np.logspace(-3, 2, 40):
                with self.subTest(k=k, x=x):
                    exact = lower_incomplete_gamma(k + 1.0, x)
                    self.assertLessEqual(alzer_bound(k, x), exact * (1 + 1e-12))


class LaplaceTransformTests(SimpleTestCase):
    def setUp(self):
        self.scn = default_scenario()

    def test_zero_argument(self):
        self.assertEqual(laplace_interference(self.scn, 0.0), 1.0)

    def test_monotone_and_bounded(self):
        values = [laplace_interference(self.scn, s) for s in np.logspace(0, 8, 41)]
        self.assertTrue(all(0 < v <= 1 for v in values))
        self.assertTrue(is_monotone(values, increasing=False))

    def test_a2_share(self):
        s = 3e3
        only_a1 = laplace_interference(self.scn, s, a2_share=0.0)
        self.assertAlmostEqual(only_a1, m2(self.scn, 1, s) ** 9, places=14)
        self.assertGreater(laplace_interference(self.scn, s, 0.25), laplace_interference(self.scn, s))
        self.assertEqual(a2_share_for(self.scn, ChannelPolicy.PER_CLUSTER_SHARE), 0.25)
        self.assertEqual(a2_share_for(self.scn, ChannelPolicy.ALL_ON_CHANNEL), 1.0)

    def test_matches_simulated_interference(self):
        interference = sample_interference(self.scn, 50_000, SEED)
        for s in (1e3, 3e3, 1e4):
            with self.subTest(s=s):
                empirical = np.exp(-s * interference).mean()
                analytic = laplace_interference(self.scn, s)
                self.assertLess(abs(empirical - analytic) / analytic, 0.015)


class OutageProbabilityTests(SimpleTestCase):
    def setUp(self):
        self.scn = default_scenario()

    def test_extreme_thresholds(self):
        self.assertLessEqual(outage_probability(self.scn, db_to_linear(-200.0)), 1e-6)
        self.assertGreaterEqual(outage_probability(self.scn, db_to_linear(100.0)), 1 - 1e-6)

    def test_invalid_threshold(self):
        for T in (0.0, -1.0):
            with self.assertRaises(InvalidThreshold):
                outage_probability(self.scn, T)

    def test_unit_shape_closed_form(self):
        T = db_to_linear(-18.0)
        s = s_value(self.scn, T, 0, 1)
        expected = 1 - math.exp(-s * self.scn.noise_power) * laplace_interference(self.scn, s)
        self.assertAlmostEqual(outage_probability(self.scn, T), expected, places=14)

    def test_no_interference_no_noise(self):
        for q in (1.0, 2.0, 5.0, 1.5):
            scn = replace(self.scn, sr=SRParams(0.158, q, 0.1), noise_power=0.0)
            with self.subTest(q=q):
                value = outage_probability(scn, db_to_linear(-18.0), laplace=lambda s: 1.0)
                self.assertAlmostEqual(value, 0.0, places=12)

    def test_integer_and_fractional_shapes(self):
        T = db_to_linear(-18.0)
        for sr in (SRParams(0.126, 5.0, 0.251), SRParams(0.063, 2.0, 0.0005), SRParams(0.158, 1.5, 0.1)):
            with self.subTest(sr=sr):
                value = outage_probability(replace(self.scn, sr=sr), T)
                self.assertTrue(0.0 <= value <= 1.0)

    def test_truncation_failure(self):
        scn = replace(self.scn, sr=SRParams(0.158, 1.5, 0.1))
        with self.assertRaises(TruncationNotConverged):
            outage_probability(scn, db_to_linear(-18.0), SeriesControl(k_max=0))

    def test_threshold_trend(self):
        thresholds = [db_to_linear(t) for t in range(-40, 1, 2)]
        curve = [p for _, p in outage_curve(self.scn, 'T', thresholds)]
        self.assertTrue(is_monotone(curve))

    def test_parameter_trends(self):
        T = db_to_linear(-18.0)
        cases = (
            ('p_m', [db_to_linear(v) for v in (10.0, 15.0, 20.0, 25.0, 30.0)], False),
            ('R1', [5_000.0, 10_000.0, 15_000.0], True),
            ('K', [1, 2, 4, 8], False),
            ('lambda1', [1e-12, 1e-11, 1e-10, 1e-9, 1e-8], True),
        )
        for param, values, increasing in cases:
            with self.subTest(param=param):
                curve = [p for _, p in outage_curve(self.scn, param, values, T=T)]
                self.assertTrue(is_monotone(curve, increasing))

    def test_saturation_in_candidate_density(self):
        T = db_to_linear(-18.0)
        curve = dict(outage_curve(self.scn, 'lambda1', [1e-9, 1e-8], T=T))
        self.assertLess(abs(curve[1e-8] - curve[1e-9]), 0.01)

    def test_sweep_needs_threshold(self):
        with self.assertRaises(InvalidThreshold):
            outage_curve(self.scn, 'K', [1, 2])


class ChannelAssignmentTests(SimpleTestCase):
    def realization(self, seed=1, lambda1=1e-10, n1=40):
        rng = np.random.default_rng(seed)
        region = Ball(ORIGIN, 10_000.0)
        bpp = sample_bpp(rng, n1, region)
        mhccp = sample_mhccp(rng, MhccpConfig(lambda1, 1_000.0, 5.0, region))
        return rng, bpp, mhccp

    def test_single_channel(self):
        rng, bpp, mhccp = self.realization()
        co_channel = assign_channels(rng, bpp, mhccp, 1)
        self.assertEqual(len(co_channel.a1), 40)
        self.assertEqual(len(co_channel.a2), len(mhccp.points))

    def test_one_bpp_node_per_channel(self):
        rng, bpp, mhccp = self.realization()
        self.assertEqual(len(assign_channels(rng, bpp, mhccp, 40).a1), 1)

    def test_indivisible_count(self):
        rng, bpp, mhccp = self.realization()
        with self.assertRaises(InvalidChannelCount):
            assign_channels(rng, bpp, mhccp, 7)

    def test_per_cluster_share_keeps_clusters_whole(self):
        for seed in range(20):
            rng, bpp, mhccp = self.realization(seed=seed)
            co_channel = assign_channels(rng, bpp, mhccp, 4, ChannelPolicy.PER_CLUSTER_SHARE)
            selected = {tuple(row) for row in co_channel.a2}
            sizes = mhccp.cluster_sizes()
            for parent in range(len(mhccp.parents)):
                members = {tuple(row) for row in mhccp.points[mhccp.parent_index == parent]}
                self.assertIn(len(members & selected), (0, len(members)))
            largest = sizes.max() if len(sizes) else 0
            self.assertLessEqual(abs(len(co_channel.a2) - len(mhccp.points) / 4), largest)


class SnapshotTests(SimpleTestCase):
    def test_lone_target_is_noise_limited(self):
        scn = quiet_scenario(k_channels=40)
        sinr = simulate_range(scn, SnapshotOptions(), SEED, 0, 20_000)
        scale = scn.p_m * target_gain(scn.beam) * scn.d0 ** -scn.alpha / scn.noise_power
        cdf = np.vectorize(lambda x: sr_cdf(scn.sr, x))
        self.assertGreater(stats.kstest(sinr / scale, cdf).pvalue, 0.01)

    def test_power_scaling_without_noise(self):
        scn = replace(default_scenario(), noise_power=0.0)
        louder = replace(scn, p_m=2 * scn.p_m, p1=2 * scn.p1, p2=2 * scn.p2)
        np.testing.assert_allclose(
            simulate_range(scn, SnapshotOptions(), SEED, 0, 2_000),
            simulate_range(louder, SnapshotOptions(), SEED, 0, 2_000),
            rtol=1e-12,
        )

    def test_common_distance(self):
        scn = default_scenario()
        positions = np.random.default_rng(3).normal(size=(5, 3)) * 1e4
        np.testing.assert_array_equal(_path_gains(scn, SnapshotOptions(), positions), scn.d0 ** -2)
        exact = _path_gains(scn, SnapshotOptions(DistanceMode.EXACT_GEOMETRY), positions)
        self.assertFalse(np.all(exact == scn.d0 ** -2))

    def test_empty_target_group(self):
        scn = quiet_scenario(target_group=TargetGroup.A2)
        with self.assertRaises(EmptyChannel):
            simulate_range(scn, SnapshotOptions(), SEED, 0, 1)


class EstimatorTests(SimpleTestCase):
    def test_estimate_fields(self):
        estimate = OutageEstimate.from_count(250, 1_000, 7)
        self.assertEqual(estimate.p_hat, 0.25)
        self.assertAlmostEqual(estimate.half_width_95, 1.96 * math.sqrt(0.25 * 0.75 / 1_000))
        self.assertEqual((estimate.n_iterations, estimate.seed), (1_000, 7))

    def test_replication_streams(self):
        a = replication_rng(SEED, 3).random(4)
        np.testing.assert_array_equal(a, replication_rng(SEED, 3).random(4))
        self.assertFalse(np.array_equal(a, replication_rng(SEED, 4).random(4)))

    def test_vanishing_threshold(self):
        estimate = estimate_outage(default_scenario(), db_to_linear(-200.0), 2_000, SEED)
        self.assertLessEqual(estimate.p_hat, 1e-3)

    def test_invalid_threshold(self):
        with self.assertRaises(InvalidThreshold):
            estimate_outage(default_scenario(), 0.0, 10, SEED)

    def test_deterministic_under_any_chunking(self):
        scn = default_scenario()
        T = db_to_linear(-18.0)
        first = estimate_outage(scn, T, 600, SEED, chunk_size=600)
        self.assertEqual(first, estimate_outage(scn, T, 600, SEED, chunk_size=600))
        self.assertEqual(first, estimate_outage(scn, T, 600, SEED, chunk_size=7))

    def test_celery_chunks_match_local(self):
        scn = default_scenario()
        local = sample_interference(scn, 40, SEED, chunk_size=40)
        remote = sample_interference(scn, 40, SEED, executor=celery_executor, chunk_size=15)
        np.testing.assert_array_equal(local, remote)

    def test_half_width_shrinks(self):
        scn = quiet_scenario(k_channels=1)
        T = float(np.median(simulate_range(scn, SnapshotOptions(), SEED, 0, 500)))
        widths = [estimate_outage(scn, T, n, SEED).half_width_95 for n in (1_000, 10_000, 100_000)]
        for wide, narrow in zip(widths, widths[1:]):
            self.assertAlmostEqual(wide / narrow, math.sqrt(10), delta=0.4)

    def test_exact_geometry_close_to_common_distance(self):
        scn = default_scenario()
        T = db_to_linear(-18.0)
        common = estimate_outage(scn, T, 5_000, SEED)
        exact = estimate_outage(scn, T, 5_000, SEED, SnapshotOptions(DistanceMode.EXACT_GEOMETRY, satellite_offset=3e5))
        self.assertLess(abs(common.p_hat - exact.p_hat), common.half_width_95 + exact.half_width_95)

    def test_cross_validation_against_series(self):
        scn = default_scenario()
        thresholds = [db_to_linear(t) for t in THRESHOLDS_DB]
        estimates = estimate_outage_curve(scn, thresholds, 50_000, SEED)
        for t_db, T, estimate in zip(THRESHOLDS_DB, thresholds, estimates):
            with self.subTest(T_dB=t_db):
                self.assertLessEqual(abs(outage_probability(scn, T) - estimate.p_hat), 0.01)


class ConfigParsingTests(SimpleTestCase):
    def test_empty_config_is_default(self):
        config = parse_config('')
        self.assertEqual(config.mode, 'both')
        self.assertEqual(config.n_iter, 50_000)
        self.assertEqual(config.seed, SEED)
        self.assertEqual(config.series, SeriesControl())
        self.assertEqual(config.snapshot, SnapshotOptions())
        self.assertIsNone(config.sweep_param)
        self.assertEqual(set(config.assumed_defaults), set(ASSUMED_DEFAULT_KEYS))

    def test_threshold_in_db(self):
        self.assertAlmostEqual(parse_config('T_dB = -18').threshold, 0.015849, places=6)

    def test_comments_and_blank_lines(self):
        text = "# scenario\n\nK = 8   # eight channels\nsr_q = 2\n"
        config = parse_config(text)
        self.assertEqual(config.scenario.k_channels, 8)
        self.assertEqual(config.scenario.sr.q, 2.0)
        self.assertNotIn('K', config.assumed_defaults)

    def test_divisibility_error(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_config('K = 7')
        self.assertIn('K', ctx.exception.detail)

    def test_every_violation_reported(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_config('alpha = 1\nsr_c = -1\ntheta = 9\nmode = fast')
        self.assertEqual(set(ctx.exception.detail), {'alpha', 'sr_c', 'theta', 'mode'})

    def test_cross_field_errors_survive_field_errors(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_config('alpha = 1\nK = 7\ng_t_dBi = 20')
        self.assertEqual(set(ctx.exception.detail), {'alpha', 'K', 'g_t_dBi'})

    def test_a1_target_without_a1_nodes(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_config('N1 = 0\nK = 1')
        self.assertIn('N1', ctx.exception.detail)
        config = parse_config('N1 = 0\nK = 1\ntarget_group = A2\nmode = analytic')
        self.assertEqual(config.scenario.n1_interferers, 0)

    def test_parse_errors_carry_location(self):
        cases = (
            ('K = 4\nnot a pair', 2, None),
            ('K = 4\nbogus = 1', 2, 'bogus'),
            ('K = 4\nK = 8', 2, 'K'),
            ('T_dB =', 1, 'T_dB'),
        )
        for text, line, key in cases:
            with self.subTest(text=text), self.assertRaises(ConfigParseError) as ctx:
                parse_config(text)
            self.assertEqual(ctx.exception.line, line)
            self.assertEqual(ctx.exception.key, key)
            self.assertTrue(str(ctx.exception).startswith(f"line {line}"))

    def test_sweep_values_in_config_units(self):
        config = parse_config('sweep_param = R1\nsweep_values = 5, 10, 15')
        self.assertEqual(config.sweep_points(), [(5.0, 5_000.0), (10.0, 10_000.0), (15.0, 15_000.0)])
        with self.assertRaises(ValidationError):
            parse_config('sweep_param = K\nsweep_values = 1, 3')
        with self.assertRaises(ValidationError):
            parse_config('sweep_param = T')

    def test_overrides(self):
        config = parse_config('mode = analytic', {'mode': 'montecarlo', 'seed': '11'})
        self.assertEqual((config.mode, config.seed), ('montecarlo', 11))

    def test_noise_bandwidth(self):
        config = parse_config('noise_dBm = -160\nbandwidth_hz = 1e6')
        self.assertAlmostEqual(config.scenario.noise_power / 1e-13, 1.0)


class RunnerTests(SimpleTestCase):
    def test_threshold_sweep_analytic(self):
        config = parse_config('mode = analytic\nsweep_param = T\nsweep_values = -30,-25,-20,-15,-10,-5')
        rows = run(config)
        self.assertEqual(len(rows), 6)
        self.assertTrue(is_monotone([row.p_out_analytic for row in rows]))
        self.assertTrue(all(row.p_out_mc is None and row.mc_ci95 is None for row in rows))
        self.assertEqual({row.sweep_param for row in rows}, {'T'})

    def test_candidate_density_saturates(self):
        config = parse_config('mode = analytic\nsweep_param = lambda1\nsweep_values = 1e-11,1e-10,1e-9,1e-8')
        rows = run(config)
        self.assertLess(abs(rows[-1].p_out_analytic - rows[-2].p_out_analytic), 0.01)

    def test_both_modes_agree(self):
        rows = run(parse_config('n_iter = 20000'))
        self.assertEqual(len(rows), 1)
        row = rows[0]
        self.assertLessEqual(abs(row.p_out_analytic - row.p_out_mc), row.mc_ci95 + 0.01)
        self.assertIsNotNone(row.runtime_ms)

    def test_cluster_share_policy_in_analysis(self):
        config = parse_config('mode = analytic\na2_channel_policy = per-cluster-share')
        expected = outage_probability(config.scenario, config.threshold, config.series, a2_share=0.25)
        self.assertEqual(run(config)[0].p_out_analytic, expected)

    def test_montecarlo_threshold_sweep_is_repeatable(self):
        config = parse_config('mode = montecarlo\nn_iter = 300\nsweep_param = T\nsweep_values = -20,-10')
        first, second = run(config, timing=False), run(config, timing=False)
        self.assertEqual(first, second)
        self.assertIsNone(first[0].runtime_ms)
        self.assertLessEqual(first[0].p_out_mc, first[1].p_out_mc)


class CsvOutputTests(SimpleTestCase):
    def test_header_only(self):
        stream = io.StringIO()
        emit_csv([], stream)
        self.assertEqual(stream.getvalue(), ','.join(CSV_COLUMNS) + '\n')

    def test_analytic_only_row(self):
        stream = io.StringIO()
        emit_csv([ResultRow(p_out_analytic=0.25)], stream)
        line = stream.getvalue().splitlines()[1]
        self.assertEqual(line, ',,0.25,,,')

    def test_values_survive_parsing(self):
        row = ResultRow('T', -18.0, 0.2186412345678901, 0.21934, 0.00362637841, 12.5)
        stream = io.StringIO()
        emit_csv([row], stream)
        parsed = list(csv.DictReader(io.StringIO(stream.getvalue())))[0]
        for column in CSV_COLUMNS[1:]:
            self.assertAlmostEqual(float(parsed[column]), getattr(row, column), places=12)
        self.assertEqual(parsed['sweep_param'], 'T')


class CommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_config(self, text, name='scenario.cfg'):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as stream:
            stream.write(text)
        return path

    def test_validate(self):
        out = io.StringIO()
        call_command('outage', 'validate', self.write_config('K = 8\n'), stdout=out)
        self.assertIn('is valid', out.getvalue())

    def test_validation_exit_status(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('outage', 'validate', self.write_config('K = 7\n'))
        self.assertEqual(ctx.exception.returncode, 1)
        with self.assertRaises(CommandError) as ctx:
            call_command('outage', 'validate', self.write_config('nonsense\n'))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_numeric_failure_exit_status(self):
        path = self.write_config('mode = analytic\nsr_q = 1.5\nk_max = 0\n')
        with self.assertRaises(CommandError) as ctx:
            call_command('outage', 'run', path)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_run_writes_identical_csv_and_metadata(self):
        path = self.write_config('mode = both\nn_iter = 200\n')
        outputs = []
        for name in ('a.csv', 'b.csv'):
            out = os.path.join(self.tmp.name, name)
            call_command('outage', 'run', path, '--out', out, '--no-timing', '--seed', '5', stderr=io.StringIO())
            with open(out, 'rb') as stream:
                outputs.append(stream.read())
        self.assertEqual(outputs[0], outputs[1])
        self.assertTrue(outputs[0].startswith(b'sweep_param,sweep_value,'))

        with open(os.path.join(self.tmp.name, 'a.csv.meta.json'), encoding='utf-8') as stream:
            metadata = json.load(stream)
        self.assertIn('G_t_dBi', metadata['assumed_defaults'])
        self.assertEqual(OutageRun.objects.count(), 2)
        self.assertEqual(OutageRun.objects.first().seed, 5)

    def test_sweep_to_stdout(self):
        out = io.StringIO()
        path = self.write_config('mode = analytic\n')
        call_command('outage', 'sweep', path, '--param', 'K', '--values', '1,2,4,8', stdout=out)
        rows = list(csv.DictReader(io.StringIO(out.getvalue())))
        self.assertEqual([row['sweep_value'] for row in rows], ['1.0', '2.0', '4.0', '8.0'])
        curve = [float(row['p_out_analytic']) for row in rows]
        self.assertTrue(is_monotone(curve, increasing=False))
        self.assertEqual(OutageRun.objects.get().results.count(), 4)

    def test_dump(self):
        out = os.path.join(self.tmp.name, 'topology.csv')
        call_command('outage', 'dump', self.write_config(''), '--out', out, stderr=io.StringIO())
        with open(out, encoding='utf-8') as stream:
            rows = list(csv.DictReader(stream))
        self.assertEqual(sum(row['process'] == 'bpp' for row in rows), 40)


class OutageRunApiTests(TestCase):
    def setUp(self):
        user = get_user_model().objects.create_user(username='analyst', password='secret')
        self.client = APIClient()
        self.client.force_authenticate(user=user)

        config = parse_config('mode = analytic\nsweep_param = K\nsweep_values = 1,2,4')
        self.sweep_run = store_run(config, run(config, timing=False))
        single = parse_config('mode = analytic')
        self.single_run = store_run(single, run(single))

    def test_list_and_filter(self):
        response = self.client.get('/api/outage/runs/')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()['count'], 2)

        response = self.client.get('/api/outage/runs/', {'sweep_param': 'K'})
        ids = [item['id'] for item in response.json()['results']]
        self.assertEqual(ids, [str(self.sweep_run.id)])

    def test_detail(self):
        response = self.client.get(f'/api/outage/runs/{self.sweep_run.id}/')
        self.assertEqual(response.status_code, 200)
        data = response.json()
        self.assertEqual([row['sweep_value'] for row in data['results']], [1.0, 2.0, 4.0])
        self.assertIn('assumed_defaults', data['metadata'])

    def test_export(self):
        response = self.client.get(f'/api/outage/runs/{self.sweep_run.id}/export/')
        self.assertEqual(response.status_code, 200)
        lines = response.content.decode().splitlines()
        self.assertEqual(lines[0], ','.join(CSV_COLUMNS))
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[1].startswith('K,1.0,'))

    def test_authentication_required(self):
        response = APIClient().get('/api/outage/runs/')
        self.assertEqual(response.status_code, 401)
