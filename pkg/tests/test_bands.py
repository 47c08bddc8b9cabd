import math
import unittest

import numpy as np

from fdp_bands.bands.band_factory import BandFactory
from fdp_bands.bands.compare import compare_bands
from fdp_bands.bands.dmax import dmax_for_fdr, dmax_for_fdp
from fdp_bands.bands.fdp_bounds import FdpBounds, interpolate, vbar_from_xi
from fdp_bands.bands.kr_band import KRBand, kr_constant, xi_kr
from fdp_bands.bands.standardized_band import StandardizedBand, xi_sb
from fdp_bands.bands.uniform_band import UniformBand, xi_ub
from fdp_bands.calibration.quantile_table import QuantileTable, UbRow, lookup_ub_u
from fdp_bands.calibration.simulator import SimConfig, build_tables
from fdp_bands.core.band_base import BandKind, UbMode, XiBand
from fdp_bands.core.competition import CompetitionSequence
from fdp_bands.core.errors import TableCoverageError
from fdp_bands.core.params import BandParams
from fdp_bands.dist.negbin import NegBinSpec, nb_cdf, nb_quantile
from fdp_bands.simulate.mixture import MixtureConfig, gen_dataset, null_flags, null_process
from fdp_bands.procedures.multi_decoy import compete


def tdc_params(m=100, alpha=0.1, gamma=0.05, d_max=0):
    return BandParams.for_tdc(m=m, alpha=alpha, gamma=gamma, d_max=d_max)


def three_se(p: float, n: int) -> float:
    return 3 * math.sqrt(p * (1 - p) / n)


class TestClosedFormBands(unittest.TestCase):
    def test_kr_constant(self):
        self.assertAlmostEqual(kr_constant(0.05, 1.0), 4.48577, delta=1e-5)
        self.assertAlmostEqual(kr_constant(0.05, 1.0), -math.log(0.05) / math.log(1.95), places=12)

    def test_xi_kr_examples(self):
        band = xi_kr(tdc_params(d_max=100))
        self.assertEqual(band.value(0), 4)
        self.assertEqual(band.value(10), 49)
        self.assertTrue(np.all(np.diff(band.xi) >= 0))
        # defined past d_max as well
        self.assertEqual(band.value(200), math.floor(band.kr_constant * 201))

    def test_xi_sb_examples(self):
        self.assertEqual(xi_sb(tdc_params(d_max=9), 3.0).value(9), 21)
        self.assertEqual(xi_sb(tdc_params(d_max=5), 0.0).value(5), 5)
        third = BandParams(c=0.25, lam=0.25, m=100, alpha=0.1, gamma=0.05, d_max=9)
        self.assertAlmostEqual(third.B, 1 / 3)
        self.assertEqual(xi_sb(third, 3.0).value(9), 9)

    def test_xi_sb_nondecreasing_even_for_negative_z(self):
        band = xi_sb(tdc_params(d_max=50), -1.0)
        self.assertEqual(band.value(0), 0)
        self.assertTrue(np.all(np.diff(band.xi) >= 0))
        self.assertTrue(np.all(band.xi >= 0))

    def test_xi_ub_examples(self):
        band = xi_ub(tdc_params(d_max=2), 0.05)
        self.assertEqual(band.value(1), 4)
        self.assertEqual(band.value(2), 6)
        self.assertEqual(xi_ub(tdc_params(d_max=1), 1 - 1e-9).value(1), 0)

    def test_xi_ub_degenerate_u(self):
        params = tdc_params(m=40, d_max=3)
        self.assertTrue(np.all(xi_ub(params, 0.0).xi[1:] == 40))


class TestVbarConversion(unittest.TestCase):
    def band(self, xi, d_max, m=3, kind=BandKind.SB):
        return XiBand(kind=kind, xi=np.asarray(xi, dtype=np.int64), params=tdc_params(m=m, d_max=d_max))

    def test_hand_example(self):
        seq = CompetitionSequence.from_labels([1, -1, 1])
        bounds = vbar_from_xi(seq, self.band([0, 2, 3], 2))
        np.testing.assert_array_equal(bounds.vbar, [2, 2, 3])

    def test_all_decoy_wins(self):
        seq = CompetitionSequence.from_labels([-1] * 5)
        bounds = vbar_from_xi(seq, self.band([0, 1, 3, 4, 6, 7], 5, m=5))
        np.testing.assert_array_equal(bounds.vbar, [1, 3, 4, 6, 7])

    def test_zero_dmax_falls_back_to_T(self):
        seq = CompetitionSequence.from_labels([1, 1, -1, 1, 0])
        bounds = vbar_from_xi(seq, self.band([0], 0, m=5))
        np.testing.assert_array_equal(bounds.vbar, seq.T)

    def test_beyond_dmax_falls_back_to_T(self):
        seq = CompetitionSequence.from_labels([1, -1, 1, -1, 1])
        bounds = vbar_from_xi(seq, self.band([0, 5], 1, m=5))
        # D+1 = 2 > d_max at i = 3, D = 2 > d_max at i = 4
        np.testing.assert_array_equal(bounds.vbar, [5, 5, 2, 2, 3])

    def test_discarded_entries_use_target_branch(self):
        seq = CompetitionSequence.from_labels([0, -1, 0])
        bounds = vbar_from_xi(seq, self.band([0, 2, 3], 2))
        np.testing.assert_array_equal(bounds.vbar, [2, 2, 3])

    def test_kr_uses_decoy_count_everywhere(self):
        seq = CompetitionSequence.from_labels([1, 1, -1, 1])
        bounds = vbar_from_xi(seq, xi_kr(tdc_params(m=4, d_max=0)))
        np.testing.assert_array_equal(bounds.vbar, [4, 4, 8, 8])


class TestInterpolation(unittest.TestCase):
    def bounds(self, seq, vbar):
        vbar = np.asarray(vbar, dtype=np.int64)
        return FdpBounds(T=seq.T, vbar=vbar, qbar_raw=np.minimum(vbar / np.maximum(seq.T, 1), 1.0))

    def test_hand_example_one(self):
        seq = CompetitionSequence.from_labels([1, -1, 1])
        out = interpolate(seq, self.bounds(seq, [2, 2, 1]))
        np.testing.assert_array_equal(out.gbar, [0, 0, 1])
        np.testing.assert_allclose(out.qbar, [1.0, 1.0, 0.5])

    def test_hand_example_two(self):
        seq = CompetitionSequence.from_labels([1, 1, 1])
        out = interpolate(seq, self.bounds(seq, [0, 5, 5]))
        np.testing.assert_array_equal(out.gbar, [1, 1, 1])
        np.testing.assert_allclose(out.qbar, [0.0, 0.5, 2 / 3])
        self.assertAlmostEqual(out.at(2), 0.5)
        self.assertAlmostEqual(out.raw_at(2), 1.0)
        self.assertEqual(out.at(0), 0.0)

    def test_inert_when_bound_exceeds_T(self):
        seq = CompetitionSequence.from_labels([1, -1, 1, 1])
        out = interpolate(seq, self.bounds(seq, [3, 3, 4, 5]))
        np.testing.assert_array_equal(out.gbar, [0, 0, 0, 0])
        np.testing.assert_allclose(out.qbar, out.qbar_raw)

    def test_never_hurts(self):
        rng = np.random.default_rng(3)
        band = xi_kr(tdc_params(m=300, gamma=0.1))
        for _ in range(200):
            labels = rng.choice([1, -1, 0], size=300, p=[0.7, 0.25, 0.05])
            seq = CompetitionSequence.from_labels(labels)
            out = interpolate(seq, vbar_from_xi(seq, band))
            self.assertTrue(np.all(out.qbar <= out.qbar_raw))
            self.assertTrue(np.all(np.diff(out.gbar) >= 0))
            self.assertTrue(np.all((out.qbar >= 0) & (out.qbar <= 1)))
            self.assertTrue(np.all(out.interpolation_gain() >= 0))


class TestDmax(unittest.TestCase):
    def test_dmax_for_fdr_examples(self):
        self.assertEqual(dmax_for_fdr(tdc_params(m=2000, alpha=0.05)), 95)
        self.assertEqual(dmax_for_fdr(tdc_params(m=500, alpha=0.1)), 45)
        self.assertEqual(dmax_for_fdr(tdc_params(m=50, alpha=0.01)), 0)

    def test_dmax_for_fdp_kr_example(self):
        self.assertEqual(dmax_for_fdp(tdc_params(m=20, alpha=0.25), BandKind.KR), 0)
        # floor(4.48577 * 3) / 19 = 13/19 <= 0.9 while 17/18 > 0.9
        self.assertEqual(dmax_for_fdp(tdc_params(m=20, alpha=0.9), BandKind.KR), 2)

    def test_dmax_for_fdp_monotone_in_alpha(self):
        values = [dmax_for_fdp(tdc_params(m=400, alpha=a), "kr") for a in (0.05, 0.1, 0.2, 0.4, 0.8, 0.99)]
        self.assertTrue(all(a <= b for a, b in zip(values, values[1:])))
        self.assertLess(values[-1], 400)


class TestCalibratedBands(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cfg = SimConfig(n_paths=10000, d_ceiling=100, R=0.5, gammas=(0.1, 0.05), seed=21)
        sb, ub = build_tables(cfg)
        cls.n_paths = cfg.n_paths
        cls.tables = {BandKind.SB: sb, BandKind.UB: ub}

    def test_factory(self):
        self.assertIsInstance(BandFactory.create_band("kr"), KRBand)
        self.assertIsInstance(BandFactory.create_band(BandKind.SB, self.tables), StandardizedBand)
        self.assertIsInstance(BandFactory.create_band("ub", self.tables, UbMode.DETERMINISTIC), UniformBand)
        with self.assertRaises(TableCoverageError):
            BandFactory.create_band("sb", None)
        with self.assertRaises(ValueError):
            BandFactory.create_band("xx", self.tables)

    def test_kr_dominates_for_d_at_least_5(self):
        frame = compare_bands(tdc_params(m=100, d_max=100), self.tables)
        self.assertEqual(list(frame.columns), ["d", "xi_sb", "xi_ub", "xi_kr"])
        tail = frame[frame["d"] >= 5]
        self.assertTrue((tail["xi_ub"] <= tail["xi_kr"]).all())
        self.assertTrue((tail["xi_sb"] <= tail["xi_kr"]).all())

    def test_single_row_comparison(self):
        frame = compare_bands(tdc_params(m=1, d_max=1), self.tables)
        self.assertEqual(len(frame), 1)

    def test_monotone_in_dmax(self):
        for kind in (BandKind.SB, BandKind.UB):
            builder = BandFactory.create_band(kind, self.tables)
            previous = None
            for d_max in (5, 20, 50, 100):
                band = builder.build(tdc_params(d_max=d_max))
                if previous is not None:
                    self.assertTrue(np.all(previous.xi <= band.xi[:previous.xi.size]), msg=f"{kind} d_max={d_max}")
                previous = band

    def test_dmax_for_fdp_matches_brute_force(self):
        table = self.tables[BandKind.UB]
        for m, alpha in ((100, 0.2), (100, 0.4), (60, 0.5)):
            params = tdc_params(m=m, alpha=alpha)
            best = 0
            for d0 in range(1, min(m, 100) + 1):
                u = lookup_ub_u(table, 0.05, d0)
                xi = m if u <= 0 else nb_quantile(NegBinSpec(d0, 0.5), 1 - u)
                if xi / (m - d0 + 1) <= alpha:
                    best = d0
            with self.subTest(m=m, alpha=alpha):
                self.assertEqual(dmax_for_fdp(params, BandKind.UB, self.tables), best)

    def test_dmax_for_fdp_beyond_ceiling(self):
        with self.assertRaises(TableCoverageError):
            dmax_for_fdp(tdc_params(m=5000, alpha=0.1), BandKind.SB, self.tables)
        with self.assertRaises(TableCoverageError):
            dmax_for_fdp(tdc_params(m=50, alpha=0.1, gamma=0.01), BandKind.UB, self.tables)

    def test_coverage_on_pure_null_competitions(self):
        # labels iid with P(decoy win) = R; every target win is a false discovery
        n_sims, m, d_max = 3000, 400, 100
        params = tdc_params(m=m, gamma=0.05, d_max=d_max)
        rng = np.random.default_rng(77)
        bands = {kind: BandFactory.create_band(kind, self.tables).build(params) for kind in BandKind}
        hits = {kind: 0 for kind in BandKind}
        all_null = np.ones(m, dtype=bool)
        for _ in range(n_sims):
            labels = np.where(rng.random(m) < 0.5, -1, 1)
            seq = CompetitionSequence.from_labels(labels)
            N = null_process(seq, all_null, d_max)
            d = np.arange(1, d_max + 1)
            for kind, band in bands.items():
                if np.any(N > band.values(d)):
                    hits[kind] += 1
        for kind in BandKind:
            bound = 0.05 + three_se(0.05, n_sims) + three_se(0.05, self.n_paths)
            self.assertLessEqual(hits[kind] / n_sims, bound, msg=kind.name)

    def test_null_process_dominated_by_negative_binomial(self):
        # false-null decoy wins only delay the null target wins, so N_d is stochastically below NB(d, 1/2)
        reps, d_list = 4000, (1, 5, 10, 20)
        cfg = MixtureConfig(m=400, pi0=0.5, rho=3.0, seed=5)
        rng = np.random.default_rng(cfg.seed)
        samples = {d: np.zeros(reps, dtype=np.int64) for d in d_list}
        for rep in range(reps):
            data = gen_dataset(cfg, rng)
            seq = compete(data.targets, data.decoys, rng=rng)
            N = null_process(seq, null_flags(seq, data), max(d_list))
            for d in d_list:
                samples[d][rep] = N[d - 1]
        for d in d_list:
            spec = NegBinSpec(d, 0.5)
            k = nb_quantile(spec, 0.9)
            tail = 1 - nb_cdf(spec, k)
            with self.subTest(d=d):
                self.assertLessEqual(np.mean(samples[d] > k), tail + three_se(tail, reps))


class TestHandBuiltUbTable(unittest.TestCase):
    def test_uniform_band_from_row(self):
        table = QuantileTable(kind=BandKind.UB, R=0.5)
        table.rows[(0.05, 1)] = UbRow(rho=0.3, sigma=0.4, r=0.04, s=0.06)
        builder = UniformBand(table)
        band = builder.build(tdc_params(m=3, d_max=1))
        self.assertEqual(builder.last_u, 0.3)
        # 0.7 quantile of the geometric law: F(0) = 0.5, F(1) = 0.75
        np.testing.assert_array_equal(band.xi, [0, 1])
        self.assertEqual(builder.self_referential_value(tdc_params(m=3), 1), 1)
        self.assertEqual(builder.self_referential_value(tdc_params(m=3), 0), 0)


if __name__ == '__main__':
    unittest.main()
