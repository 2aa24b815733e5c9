import json

import numpy as np
import pytest

from cryptovar.backtest import (
    CampaignConfig,
    binomial_coverage,
    build_violations,
    christoffersen_lr,
    expost_realized_covariance,
    load_config,
    regression_independence_f,
    run_backtest_campaign,
    split_groups,
    weighted_average_statistic,
)
from cryptovar.errors import DomainError
from cryptovar.marketdata import DAY_MS, MINUTE_MS, log_returns
from cryptovar.synth.simulate import feed_ticks, make_universe, sv_index_paths
from cryptovar.tickengine import TickEngine

HOUR_MS = 3_600_000
START = 19_000 * DAY_MS  # some date in 2022, day-aligned


def small_feed(days=7, seed=42):
    paths = sv_index_paths(("BTC", "ETH"), days * 1440, seed=seed)
    universe = make_universe(START, options_per_underlying=0, maturities_days=(90,))
    return feed_ticks(paths, START, universe)


class TestCampaignRun:
    @staticmethod
    @pytest.fixture(scope="class")
    def result(tmp_path_factory):
        root = tmp_path_factory.mktemp("campaign")
        config = CampaignConfig(
            models=["EWMA", "REALIZED"],
            levels=[0.95],
            start_ms=START + int(5.5 * DAY_MS),
            end_ms=START + int(6.5 * DAY_MS),
            stride_ms=HOUR_MS,
            horizon_days=1 / 24,
            portfolio=[("BTC-" + "30MAR22", 1.0)],
            groups=6,
            persist_eod=True,
        )
        # resolve the real future id from the generated universe
        universe = make_universe(START, options_per_underlying=0, maturities_days=(90,))
        fut = next(u.id for u in universe if u.underlying == "BTC")
        config.portfolio = [(fut, 1.0)]
        return run_backtest_campaign(
            small_feed(), config, root / "hdb", out_dir=root / "out"
        ), root

    def test_sample_count(self, result):
        res, _ = result
        assert len(res.sample_times) == 24
        series = res.violations[("EWMA", 0.95)]
        assert len(series) == 24

    def test_tables_written(self, result):
        _, root = result
        out = root / "out"
        for name in ("coverage.tsv", "independence_lr.tsv", "independence_f.tsv", "summary.tsv", "campaign.jsonl"):
            assert (out / name).exists()
        coverage = (out / "coverage.tsv").read_text().strip().splitlines()
        assert coverage[0].startswith("level\tmodel")
        assert len(coverage) == 3  # header + EWMA + REALIZED

    def test_machine_log_parses(self, result):
        res, root = result
        lines = (root / "out" / "campaign.jsonl").read_text().strip().splitlines()
        records = [json.loads(line) for line in lines]
        assert all("t0" in r for r in records)
        assert sum(1 for r in records if "q_return" in r) >= 20

    def test_group_totals(self, result):
        res, _ = result
        series = res.violations[("EWMA", 0.95)]
        groups = split_groups(series, 6)
        assert sum(len(g) for g in groups) == len(series)

    def test_expost_model_present(self, result):
        res, _ = result
        assert ("REALIZED", 0.95) in res.violations


class TestExpostCovariance:
    def test_matches_marketdata_rcov(self, tmp_path):
        paths = sv_index_paths(("BTC", "ETH"), 2 * 1440, seed=3)
        engine = TickEngine(tmp_path / "hdb")
        engine.ingest(list(feed_ticks(paths, START)))
        t0 = START + 720 * MINUTE_MS
        horizon = 0.5  # 720 minutes
        forecast = expost_realized_covariance(engine, ("BTC", "ETH"), t0, horizon)

        r1 = log_returns(engine.query_twap("BTC", START, START + 2 * DAY_MS), 5, sym="BTC")
        r2 = log_returns(engine.query_twap("ETH", START, START + 2 * DAY_MS), 5, sym="ETH")
        window = lambda r: r.values[(r.timestamps > t0) & (r.timestamps <= t0 + int(horizon * DAY_MS))]
        v1, v2 = window(r1), window(r2)
        assert forecast.matrix[0, 0] == pytest.approx(float(v1 @ v1), rel=1e-10)
        assert forecast.matrix[0, 1] == pytest.approx(float(v1 @ v2), rel=1e-10)
        engine.close()

    def test_single_sym_rv(self, tmp_path):
        paths = sv_index_paths(("BTC",), 1440, seed=4)
        engine = TickEngine(tmp_path / "hdb")
        engine.ingest(list(feed_ticks(paths, START)))
        forecast = expost_realized_covariance(engine, ("BTC",), START + 60 * MINUTE_MS, 0.25)
        assert forecast.matrix.shape == (1, 1)
        assert forecast.matrix[0, 0] > 0
        engine.close()


class TestCampaignStatistics:
    """Statistical behavior of the test battery on controlled series."""

    def make_series(self, n, q_scale, seed):
        rng = np.random.default_rng(seed)
        sigma = 0.02
        realized = rng.normal(0, sigma, n)
        q_true = sigma * -1.6448536269514729
        stamps = np.arange(n) * HOUR_MS
        return build_violations(stamps, q_scale * q_true * np.ones(n), realized, 0.95)

    def test_true_quantile_accepts(self):
        accept = 0
        for seed in range(20):
            v = self.make_series(456, 1.0, seed)
            report = binomial_coverage(len(v), 0.05, v.violations)
            if report.decision == "accept":
                accept += 1
        assert accept >= 18

    def test_halved_var_rejected(self):
        v = self.make_series(456, 0.5, 11)
        report = binomial_coverage(len(v), 0.05, v.violations)
        assert report.decision == "reject"
        assert report.p_value < 0.001

    def test_weighted_average_conventions(self):
        v = self.make_series(456, 1.0, 3)
        groups = split_groups(v, 6)
        lr_reports = [christoffersen_lr(g.indicators, group=i) for i, g in enumerate(groups)]
        avg = weighted_average_statistic(lr_reports, na_as_zero=True)
        assert avg is not None and avg >= 0
        f_reports = [regression_independence_f(g.indicators, group=i) for i, g in enumerate(groups)]
        f_avg = weighted_average_statistic(f_reports)
        assert f_avg is None or f_avg >= 0


def test_empty_sample_window_rejected(tmp_path):
    config = CampaignConfig(
        models=["EWMA"],
        levels=[0.95],
        start_ms=100,
        end_ms=100,
        stride_ms=HOUR_MS,
        horizon_days=1.0,
    )
    with pytest.raises(DomainError):
        run_backtest_campaign(iter([]), config, tmp_path / "hdb")


def test_config_round_trip(tmp_path):
    raw = {
        "models": ["HAR", "EWMA"],
        "levels": [0.95, 0.99],
        "start": "2023-06-16T00:00:00Z",
        "end": "2023-06-17T00:00:00Z",
        "stride_minutes": 60,
        "horizon_days": 1.0,
        "portfolio": [["BTC-29DEC23", 2.0]],
        "portfolio_seed": 9,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    config = load_config(path)
    assert config.models == ["HAR", "EWMA"]
    assert config.stride_ms == HOUR_MS
    assert config.portfolio == [("BTC-29DEC23", 2.0)]
    assert config.end_ms - config.start_ms == DAY_MS
