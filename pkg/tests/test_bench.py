# File: s3rec/tests/test_bench.py
import asyncio
import math

import numpy as np
import pytest

from config.runs import ConfigManager
from src.core.config import RunConfig
from src.providers.pir.plain_backend import PlainPirBackend
from src.services.bench.harness import (
    CSV_COLUMNS,
    BenchKeys,
    BenchRow,
    check_sparsity_scaling,
    model_comparison,
    render_csv,
    render_table,
    run_case,
    scaling_r_squared,
    sparse_r_squared,
    sparsity_fixture,
    sparsity_grid,
)
from src.services.dataio.synth import synth
from src.utils.error_handling import ValidationError


@pytest.fixture
def plain_keys(protocol_keypair):
    return BenchKeys(protocol_keypair, PlainPirBackend())


def _row(protocol, t, rate, measured, distinct_rows=0):
    return BenchRow(protocol=protocol, k=2, m=8, t=t, mode=f"x@{rate}", measured_bytes=measured,
                    distinct_rows=distinct_rows)


class TestFixture:

    def test_partial_permutation(self):
        Y = sparsity_fixture(10, 6, seed=2)
        assert Y.t == 6
        assert len(np.unique(Y.row_idx)) == 6
        assert len(np.unique(Y.col_idx)) == 6

    def test_too_many_nonzeros(self):
        with pytest.raises(ValidationError):
            sparsity_fixture(4, 5, seed=0)


class TestRunCase:

    @pytest.mark.parametrize("name", ["dense", "insensitive"])
    def test_shared_protocols(self, name):
        Y = sparsity_fixture(6, 3, seed=1)
        row = asyncio.run(run_case(name, 2, Y, None, seed=4))
        assert row.measured_bytes == row.predicted_bytes
        assert row.offline_bytes > 0
        assert (row.protocol, row.mode, row.t) == (name, "-", 3)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["sensitive-pir", "sensitive-full-transfer"])
    def test_sensitive_protocols(self, name, plain_keys):
        Y = sparsity_fixture(6, 3, seed=1)
        row = asyncio.run(run_case(name, 2, Y, plain_keys, seed=4))
        assert row.measured_bytes == row.predicted_bytes
        assert row.offline_bytes > 0
        assert row.mode == name.split("-", 1)[1]

    @pytest.mark.slow
    def test_sensitive_bytes_shrink_with_sparsity(self, plain_keys):
        config = RunConfig(m=12, k=2, seed=0)
        rows = sparsity_grid(config, plain_keys, rates=(0.6, 1.0), quiet=True)
        sensitive = [row for row in rows if row.protocol == "sensitive"]
        dense = [row for row in rows if row.protocol == "dense"]
        _, social = synth(config.m, config.n, config.k_true, config.alpha_social, config.noise_sd,
                          config.seed, config.rating_density, config.communities)
        assert sensitive[1].t == social.count
        assert sensitive[0].t <= sensitive[1].t
        assert sensitive[0].measured_bytes <= sensitive[1].measured_bytes
        assert dense[0].measured_bytes == dense[1].measured_bytes

    @pytest.mark.slow
    def test_synthetic_grid_scales_linearly(self, plain_keys):
        rows = sparsity_grid(RunConfig(m=16, k=2, seed=0, alpha_social=0.2), plain_keys, quiet=True)
        assert len(rows) == 9
        fits = check_sparsity_scaling(rows)
        assert fits["insensitive"] > 0.999
        assert math.isnan(fits["sensitive"]) or fits["sensitive"] > 0.999


class TestRegression:

    def test_linear_bytes(self):
        rows = []
        for rate, t in ((0.4, 2), (0.6, 4), (0.8, 6)):
            rows.append(_row("insensitive", t, rate, 100 * t + 7))
            rows.append(_row("sensitive", t, rate, 50 * t + 3))
            rows.append(_row("dense", t, rate, 999))
        assert sparse_r_squared(rows) == pytest.approx(1.0)

    def test_single_sparsity_is_undefined(self):
        rows = [_row("insensitive", 3, 0.4, 10), _row("insensitive", 3, 0.6, 10)]
        assert math.isnan(sparse_r_squared(rows))

    def test_sensitive_fits_against_distinct_rows(self):
        rows = []
        for rate, t, distinct in ((0.4, 10, 6), (0.6, 15, 7), (0.8, 30, 8)):
            rows.append(_row("dense", t, rate, 999, distinct))
            rows.append(_row("insensitive", t, rate, 408 * t + 64, distinct))
            rows.append(_row("sensitive", t, rate, 5170 * distinct + 8, distinct))
        assert scaling_r_squared(rows, "sensitive", "distinct_rows") == pytest.approx(1.0)
        assert scaling_r_squared(rows, "sensitive", "t") < 0.999
        fits = check_sparsity_scaling(rows)
        assert fits == {"insensitive": pytest.approx(1.0), "sensitive": pytest.approx(1.0)}

    def test_varying_dense_bytes_fail(self):
        rows = [_row("dense", 2, 0.4, 999), _row("dense", 4, 0.6, 998)]
        with pytest.raises(ValidationError):
            check_sparsity_scaling(rows)

    def test_curved_insensitive_bytes_fail(self):
        rows = [_row("insensitive", t, rate, t * t) for rate, t in ((0.2, 1), (0.4, 4), (0.6, 9), (0.8, 16))]
        with pytest.raises(ValidationError) as info:
            check_sparsity_scaling(rows)
        assert "insensitive" in info.value.details["r_squared"]

    def test_saturated_rows_are_skipped(self):
        rows = []
        for rate, t in ((0.4, 10), (0.6, 15), (0.8, 20)):
            rows.append(_row("insensitive", t, rate, 408 * t + 64, 8))
            rows.append(_row("sensitive", t, rate, 5170 * 8 + 8, 8))
        assert math.isnan(check_sparsity_scaling(rows)["sensitive"])


class TestRendering:

    def test_csv(self):
        rows = [BenchRow(protocol="dense", k=2, m=4, t=1, mode="-", measured_bytes=10, predicted_bytes=10,
                         wall_ms=1.25)]
        text = render_csv(rows, "# seed = 0\nm = 4")
        lines = text.splitlines()
        assert lines[:2] == ["# seed = 0", "# m = 4"]
        assert lines[2] == ",".join(CSV_COLUMNS)
        assert lines[3] == "dense,2,4,1,-,10,10,0,1.2,"

    def test_table_lists_every_row(self):
        rows = [BenchRow(protocol="model:mf", k=2, m=4, t=0, mode="mf", rmse=0.5),
                BenchRow(protocol="model:soreg", k=2, m=4, t=0, mode="soreg", rmse=float("nan"))]
        table = render_table(rows)
        assert len(table.splitlines()) == 4
        assert "0.5000" in table


class TestModelComparison:

    def test_plain_models(self):
        config = RunConfig(m=10, n=12, k=2, epochs=5, theta=0.01, folds=3)
        rows = model_comparison(config, quiet=True)
        assert [row.mode for row in rows] == ["mf", "soreg"]
        assert all(row.rmse is not None and row.rmse > 0 for row in rows)

    @pytest.mark.slow
    def test_secure_row_bytes_match(self, plain_keys):
        config = RunConfig(m=6, n=10, k=2, epochs=2, theta=0.01, folds=3, gamma=0.3)
        rows = model_comparison(config, plain_keys, include_secure=True, quiet=True)
        assert rows[-1].protocol == "model:s3rec"
        assert rows[-1].measured_bytes == rows[-1].predicted_bytes > 0

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_social_regularisation_beats_mf(self, seed):
        config = ConfigManager().resolve(preset="social_benefit", overrides={"seed": seed}, environ={})
        mf, soreg = model_comparison(config, quiet=True)
        assert (mf.rmse - soreg.rmse) / mf.rmse >= 0.03
