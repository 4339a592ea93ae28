"""Tests for the Monte Carlo benchmark harness."""

import numpy as np
import pytest

from nete import (
    BenchmarkCell,
    EstimatorConfig,
    ExperimentConfig,
    SemiSynConfig,
    SyntheticConfig,
    derived_rng,
    run_mse_benchmark,
    run_semi_synthetic,
    synthetic_wavesurge,
)

FAST_CFG = EstimatorConfig(rf_params={"n_estimators": 5, "max_depth": 3})

SMALL = ExperimentConfig(
    configs=(SyntheticConfig(alpha=1.0, beta=2.5, d_z=5, d_u=3),),
    n_grid=(500,),
    repetitions=4,
    seed=0,
    estimators=("evt_ipw", "naive_ipw"),
)


class TestExperimentConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(configs=SMALL.configs, n_grid=(500, 400))
        with pytest.raises(ValueError):
            ExperimentConfig(configs=SMALL.configs, n_grid=(500,), repetitions=0)
        with pytest.raises(ValueError):
            ExperimentConfig(configs=SMALL.configs, n_grid=(500,), estimators=("huber",))

    def test_json_roundtrip(self):
        cfg = ExperimentConfig(
            configs=(
                SyntheticConfig(alpha=1.0, beta=1.5, d_z=50, d_u=10),
                SyntheticConfig(alpha=2.0, beta=2.5, noise_kind="mixture"),
            ),
            n_grid=(2000, 5000),
            repetitions=7,
            seed=11,
            estimators=("evt_dr",),
            estimator_cfg=EstimatorConfig(alpha=1.0, clip_c=1e-3, outcome_kind="linear"),
        )
        back = ExperimentConfig.from_json(cfg.to_json())
        assert back == cfg


class TestRunMseBenchmark:
    def test_metric_identities(self):
        result = run_mse_benchmark(SMALL)
        for cell in result.cells:
            assert cell.failure_count + (cell.repetitions - cell.failure_count) == 4
            if cell.failure_count < cell.repetitions:
                assert abs(cell.mse - (cell.bias**2 + cell.variance)) < 1e-9
                assert np.isfinite(cell.mean_theta)
            assert cell.ground_truth == pytest.approx(5.0 / 3.0, abs=1e-12)

    def test_single_repetition(self):
        cfg = ExperimentConfig(
            configs=SMALL.configs, n_grid=(500,), repetitions=1,
            estimators=("evt_ipw",), seed=1,
        )
        cell = run_mse_benchmark(cfg).cell(0, 500, "evt_ipw")
        assert cell.variance == 0.0
        assert cell.mse == pytest.approx(cell.bias**2, abs=1e-12)

    def test_deterministic(self):
        a = run_mse_benchmark(SMALL)
        b = run_mse_benchmark(SMALL)
        assert a == b

    def test_jobs_do_not_change_results(self):
        cfg = ExperimentConfig(
            configs=SMALL.configs, n_grid=(400,), repetitions=4, seed=2,
            estimators=("evt_dr", "naive_ipw"), estimator_cfg=FAST_CFG,
        )
        a = run_mse_benchmark(cfg, jobs=1)
        b = run_mse_benchmark(cfg, jobs=2)
        assert a == b

    def test_output_files(self, tmp_path):
        result = run_mse_benchmark(SMALL)
        csv_path = tmp_path / "out.csv"
        json_path = tmp_path / "out.json"
        result.to_long_csv(csv_path)
        result.to_summary_json(json_path)
        lines = csv_path.read_text().splitlines()
        assert lines[0].startswith("config_index,alpha,beta")
        # 1 config x 1 n x 2 methods x 6 metrics
        assert len(lines) == 1 + 12
        summary = result.summary()
        assert len(summary["cells"]) == 2
        assert "flagged_cells" in summary

    def test_cell_lookup_missing(self):
        result = run_mse_benchmark(SMALL)
        with pytest.raises(KeyError):
            result.cell(3, 500, "evt_ipw")


class TestBenchmarkCellFlag:
    def test_flagged(self):
        base = dict(
            config_index=0, alpha=1.0, beta=2.5, d_z=5, d_u=3, noise_kind="linear_pareto",
            n=500, method="evt_ipw", repetitions=5, mean_theta=1.0, bias=0.0,
            variance=0.0, mse=0.0, ground_truth=1.0,
        )
        assert not BenchmarkCell(failure_count=1, **base).flagged
        assert BenchmarkCell(failure_count=2, **base).flagged


class TestRunSemiSynthetic:
    def test_rows_and_determinism(self):
        raw = synthetic_wavesurge(derived_rng(2))
        configs = [SemiSynConfig(1.0, 1.0), SemiSynConfig(2.0, 2.0)]
        rows = run_semi_synthetic(configs, raw, seed=0, estimator_cfg=FAST_CFG)
        again = run_semi_synthetic(configs, raw, seed=0, estimator_cfg=FAST_CFG)
        assert rows == again
        assert [r["alpha1"] for r in rows] == [1.0, 2.0]
        for row in rows:
            assert set(row) == {
                "alpha1", "alpha2", "evt_ipw", "evt_dr", "naive_ipw", "naive_dr", "test_set",
            }
            assert all(np.isfinite(v) for v in row.values())
