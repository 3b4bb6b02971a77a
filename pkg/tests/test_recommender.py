# File: s3rec/tests/test_recommender.py
import asyncio

import numpy as np
import pytest

from src.core.config import TrainConfig
from src.linalg.sparse import SparseMatrix
from src.mpc.dealer import dealer_generate
from src.protocols.resources import ProtocolResources
from src.providers.pir.plain_backend import PlainPirBackend
from src.services.dataio.datasets import folds, make_training_data
from src.services.dataio.synth import synth
from src.services.recommender.model import LatentModel, init_model
from src.services.recommender.objective import (
    grad_u,
    grad_v,
    objective,
    social_penalty,
    social_term,
    symmetrise,
)
from src.services.recommender.secure_trainer import (
    run_rating_party,
    run_social_party,
    train_secure,
    triples_for_training,
)
from src.services.recommender.trainer import train_plain
from src.utils.error_handling import ConfigError, ParseError, ProtocolError, ShapeError, TrainingError

from .conftest import run_parties


@pytest.fixture(scope="module")
def small_data():
    ratings, social = synth(m=6, n=10, k_true=2, alpha_social=0.4, noise_sd=0.05, seed=3, rating_density=0.6)
    return make_training_data(ratings, social, folds(ratings.count, 5, seed=0), fold=0)


def _numeric_gradient(f, point, eps=1e-6):
    grad = np.zeros_like(point)
    for index in np.ndindex(point.shape):
        step = np.zeros_like(point)
        step[index] = eps
        grad[index] = (f(point + step) - f(point - step)) / (2 * eps)
    return grad


class TestObjective:

    @pytest.fixture(params=range(20), ids=lambda seed: f"seed{seed}")
    def problem(self, request):
        rng = np.random.default_rng(request.param)
        m, n, k = int(rng.integers(2, 7)), int(rng.integers(2, 9)), int(rng.integers(1, 5))
        R = rng.uniform(0, 5, size=(m, n))
        I = (rng.random((m, n)) < 0.6).astype(float)
        ties = rng.random((m, m)) < 0.5
        ties[0, 1] = True
        np.fill_diagonal(ties, False)
        rows, cols = np.nonzero(ties)
        S = symmetrise(SparseMatrix.from_coo(m, m, rows, cols, rng.uniform(0.5, 2.0, size=len(rows))))
        U, V = rng.normal(size=(k, m)), rng.normal(size=(k, n))
        return R, I, S, U, V

    def test_symmetrise(self):
        S = symmetrise(SparseMatrix.from_coo(3, 3, [0, 1], [1, 2], [2.0, 4.0]))
        np.testing.assert_array_equal(S.to_dense(), S.to_dense().T)
        assert S.to_dense()[1, 0] == 1.0

    def test_gradient_u_matches_finite_differences(self, problem):
        R, I, S, U, V = problem
        numeric = _numeric_gradient(lambda u: objective(R, I, S, u, V, 0.3, 0.7), U)
        np.testing.assert_allclose(grad_u(R, I, S, U, V, 0.3, 0.7), numeric, rtol=1e-5, atol=1e-6)

    def test_gradient_v_matches_finite_differences(self, problem):
        R, I, S, U, V = problem
        numeric = _numeric_gradient(lambda v: objective(R, I, S, U, v, 0.3, 0.7), V)
        np.testing.assert_allclose(grad_v(R, I, U, V, 0.3), numeric, rtol=1e-5, atol=1e-6)

    def test_social_term_sparse_and_dense_agree(self, problem):
        _, _, S, U, _ = problem
        np.testing.assert_allclose(social_term(U, S, 0.4), social_term(U, S.to_dense(), 0.4))
        assert social_penalty(S, U) == pytest.approx(social_penalty(S.to_dense(), U))

    def test_shape_checks(self, rng):
        R, I = rng.uniform(0, 5, size=(4, 5)), np.ones((4, 5))
        U, V = rng.normal(size=(2, 4)), rng.normal(size=(2, 5))
        S = SparseMatrix.zeros(4, 4)
        with pytest.raises(ShapeError):
            objective(R[:, :3], I, S, U, V, 0.1, 0.1)
        with pytest.raises(ShapeError):
            social_term(U, SparseMatrix.zeros(3, 3), 0.1)


class TestModel:

    def test_init_is_seeded_and_bounded(self):
        model = init_model(4, 6, 7, seed=9)
        np.testing.assert_array_equal(model.U, init_model(4, 6, 7, seed=9).U)
        assert model.U.min() >= 0 and model.U.max() < 0.5
        assert (model.k, model.m, model.n) == (4, 6, 7)

    def test_save_and_load(self, tmp_path):
        model = init_model(2, 3, 4, seed=1)
        model.save(tmp_path / "model.npz")
        loaded = LatentModel.load(tmp_path / "model.npz")
        np.testing.assert_array_equal(loaded.V, model.V)

    def test_load_garbage(self, tmp_path):
        path = tmp_path / "model.npz"
        path.write_bytes(b"not numpy")
        with pytest.raises(ParseError):
            LatentModel.load(path)

    def test_latent_dimension_must_agree(self):
        with pytest.raises(ShapeError):
            LatentModel(np.zeros((2, 3)), np.zeros((3, 4)))


class TestPlainTraining:

    def test_mf_fits_training_ratings(self, small_data):
        config = TrainConfig(k=3, lam=0.01, gamma=0.0, theta=0.02, epochs=300, mode="mf")
        _, history = train_plain(small_data, config, quiet=True)
        assert len(history) == 300
        assert history[-1].objective < history[0].objective
        assert history[-1].train_rmse < 0.6 * history[0].train_rmse

    def test_soreg_without_social_weight_is_mf(self, small_data):
        mf, _ = train_plain(small_data, TrainConfig(k=2, gamma=0.0, theta=0.01, epochs=20, mode="mf"), quiet=True)
        soreg, _ = train_plain(small_data, TrainConfig(k=2, gamma=0.0, theta=0.01, epochs=20, mode="soreg"),
                               quiet=True)
        np.testing.assert_array_equal(mf.U, soreg.U)
        np.testing.assert_array_equal(mf.V, soreg.V)

    def test_social_weight_pulls_friends_together(self, small_data):
        S = symmetrise(small_data.S)
        base, _ = train_plain(small_data, TrainConfig(k=2, gamma=0.0, theta=0.01, epochs=40, mode="soreg"),
                              quiet=True)
        social, _ = train_plain(small_data, TrainConfig(k=2, gamma=2.0, theta=0.01, epochs=40, mode="soreg"),
                                quiet=True)
        assert social_penalty(S, social.U) < social_penalty(S, base.U)

    def test_divergence_is_reported(self, small_data):
        config = TrainConfig(k=2, theta=50.0, epochs=30, mode="mf")
        with pytest.raises(TrainingError) as info:
            with np.errstate(all="ignore"):
                train_plain(small_data, config, quiet=True)
        assert info.value.epoch is not None

    def test_secure_mode_rejected(self, small_data):
        with pytest.raises(ConfigError):
            train_plain(small_data, TrainConfig(mode="s3rec", epochs=2))

    def test_metrics_callback(self, small_data):
        seen = []
        train_plain(small_data, TrainConfig(k=2, epochs=3, mode="soreg"), on_epoch=seen.append, quiet=True)
        assert [metrics.epoch for metrics in seen] == [1, 2, 3]
        assert all(metrics.test_rmse is not None for metrics in seen)


@pytest.mark.slow
class TestSecureTraining:

    def test_tracks_plaintext_soreg(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, gamma=0.5, theta=0.01, epochs=3, mode="s3rec")
        secure, history = asyncio.run(
            train_secure(small_data, config, keypair=protocol_keypair, pir_backend=PlainPirBackend())
        )
        plain, _ = train_plain(small_data, config.model_copy(update={"mode": "soreg"}), quiet=True)
        np.testing.assert_allclose(secure.U, plain.U, atol=1e-4)
        np.testing.assert_allclose(secure.V, plain.V, atol=1e-4)
        assert all(metrics.social_deviation < 1e-4 for metrics in history)
        assert all(metrics.payload_bytes["compute"] > 0 for metrics in history)

    def test_zero_social_weight_is_mf(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, gamma=0.0, theta=0.01, epochs=3, mode="s3rec")
        secure, history = asyncio.run(
            train_secure(small_data, config, keypair=protocol_keypair, pir_backend=PlainPirBackend())
        )
        plain, _ = train_plain(small_data, config.model_copy(update={"mode": "mf"}), quiet=True)
        np.testing.assert_array_equal(secure.U, plain.U)
        assert all(metrics.social_deviation is None for metrics in history)

    def test_epochs_must_stay_below_item_count(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, epochs=small_data.n, mode="s3rec")
        with pytest.raises(ConfigError):
            asyncio.run(train_secure(small_data, config, keypair=protocol_keypair, pir_backend=PlainPirBackend()))


class TestHandshake:

    def _run(self, data, S, config0, config1, keypair, triples0=None, triples1=None):
        resources0 = ProtocolResources(keypair=keypair, pir_backend_name="plain", triples=triples0)
        resources1 = ProtocolResources(pir_backend=PlainPirBackend(), pir_backend_name="plain", triples=triples1)
        return run_parties(
            lambda session: run_rating_party(session, data, config0, resources0, quiet=True),
            lambda session: run_social_party(session, S, config1, resources1),
        )

    def test_latent_dimension_mismatch(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, epochs=2, mode="s3rec")
        with pytest.raises(ConfigError):
            self._run(small_data, small_data.S, config, config.model_copy(update={"k": 3}), protocol_keypair)

    def test_user_count_mismatch(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, epochs=2, mode="s3rec")
        with pytest.raises(ProtocolError):
            self._run(small_data, SparseMatrix.zeros(small_data.m + 1, small_data.m + 1), config, config,
                      protocol_keypair)

    def test_dealer_files_on_one_side_only(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, epochs=2, mode="s3rec")
        store0, _ = dealer_generate(triples_for_training(2, small_data.m, 2), seed=1)
        with pytest.raises(ConfigError):
            self._run(small_data, small_data.S, config, config, protocol_keypair, triples0=store0)

    def test_social_party_skips_protocol_without_social_weight(self, small_data, protocol_keypair):
        config = TrainConfig(k=2, gamma=0.0, epochs=2, mode="s3rec")
        (_, history), served, _, session1 = self._run(small_data, small_data.S, config, config, protocol_keypair)
        assert served == 0
        assert len(history) == 2
        assert session1.stats.total_sent == 0
