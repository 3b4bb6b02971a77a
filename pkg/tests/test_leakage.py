# File: s3rec/tests/test_leakage.py
"""
What each party observes on the wire may depend on public counts only.

Transcripts are compared as (direction, message type, payload length)
sequences, which is everything a party sees besides ciphertexts and
uniformly distributed shares.
"""

import numpy as np
import pytest

from src.linalg.sparse import SparseMatrix
from src.mpc.dealer import dealer_generate
from src.mpc.ring import as_ring, random_ring
from src.protocols.matmul_insensitive import matmul_insensitive
from src.protocols.matmul_sensitive import matmul_sensitive
from src.protocols.resources import ProtocolResources, exchange_keys
from src.providers.pir.plain_backend import PlainPirBackend

from .conftest import run_parties


def _ring_sparse(m: int, rows, cols, values) -> SparseMatrix:
    return SparseMatrix.from_coo(m, m, rows, cols, values).map_values(lambda v: as_ring(v.astype(np.int64)))


def _transcript(session):
    return [(record.direction, record.msg_type, record.payload_len) for record in session.stats.frame_log]


def _sensitive_transcripts(keypair, client_backend, X, Y, mode, pad=None):
    k, m = X.shape
    resources0 = ProtocolResources(keypair=keypair, pir_backend_name=client_backend.name, query_pad_density=pad)
    resources1 = ProtocolResources(pir_backend=client_backend, pir_backend_name=client_backend.name,
                                   query_pad_density=pad)

    async def party0(session):
        await exchange_keys(session, resources0)
        return await matmul_sensitive(session, X, k=k, m=m, mode=mode, resources=resources0)

    async def party1(session):
        await exchange_keys(session, resources1)
        return await matmul_sensitive(session, Y=Y, k=k, m=m, mode=mode, resources=resources1)

    _, _, session0, session1 = run_parties(party0, party1)
    return _transcript(session0), _transcript(session1)


@pytest.mark.slow
class TestSensitiveTranscripts:

    def test_pir_view_depends_only_on_distinct_row_count(self, rng, protocol_keypair, ahe_pir_backend):
        m = 4
        X = random_ring(rng, (1, m))
        first = _ring_sparse(m, [0, 0, 2], [1, 3, 0], [5, 9, 1])
        second = _ring_sparse(m, [1, 3, 3], [2, 0, 1], [40, 2, 77])
        view_first, _ = _sensitive_transcripts(protocol_keypair, ahe_pir_backend, X, first, "pir")
        view_second, _ = _sensitive_transcripts(protocol_keypair, ahe_pir_backend, X, second, "pir")
        assert view_first == view_second

    def test_padding_hides_distinct_row_count(self, rng, protocol_keypair):
        m = 6
        X = random_ring(rng, (2, m))
        sparse = _ring_sparse(m, [4], [0], [3])
        denser = _ring_sparse(m, [0, 2, 5], [1, 1, 3], [1, 2, 3])
        view_sparse, _ = _sensitive_transcripts(protocol_keypair, PlainPirBackend(), X, sparse, "pir", pad=0.5)
        view_denser, _ = _sensitive_transcripts(protocol_keypair, PlainPirBackend(), X, denser, "pir", pad=0.5)
        assert view_sparse == view_denser

    def test_full_transfer_view_independent_of_support(self, rng, protocol_keypair):
        m = 5
        X = random_ring(rng, (2, m))
        single = _ring_sparse(m, [3], [3], [8])
        many = _ring_sparse(m, [0, 1, 2, 3, 4, 4], [4, 3, 2, 1, 0, 4], [1, 2, 3, 4, 5, 6])
        view_single, _ = _sensitive_transcripts(protocol_keypair, PlainPirBackend(), X, single, "full-transfer")
        view_many, _ = _sensitive_transcripts(protocol_keypair, PlainPirBackend(), X, many, "full-transfer")
        assert view_single == view_many

    def test_social_side_view_independent_of_x(self, rng, protocol_keypair):
        m = 4
        Y = _ring_sparse(m, [0, 2], [1, 3], [6, 7])
        _, view_first = _sensitive_transcripts(protocol_keypair, PlainPirBackend(), random_ring(rng, (2, m)), Y, "pir")
        _, view_second = _sensitive_transcripts(protocol_keypair, PlainPirBackend(), random_ring(rng, (2, m)), Y, "pir")
        assert view_first == view_second


class TestInsensitiveTranscripts:

    def _views(self, X, Y):
        k, m = X.shape
        store0, store1 = dealer_generate(k * Y.t, seed=0)

        async def party0(session):
            return await matmul_insensitive(session, X, k=k, m=m, pattern=Y, triples=store0)

        async def party1(session):
            return await matmul_insensitive(session, Y=Y, k=k, m=m, pattern=Y, triples=store1)

        _, _, session0, session1 = run_parties(party0, party1)
        return _transcript(session0), _transcript(session1)

    def test_views_independent_of_values(self, rng):
        m = 5
        pattern_rows, pattern_cols = [0, 1, 4], [2, 2, 0]
        first = _ring_sparse(m, pattern_rows, pattern_cols, [1, 2, 3])
        second = _ring_sparse(m, pattern_rows, pattern_cols, [900, 5, 61])
        views_first = self._views(random_ring(rng, (3, m)), first)
        views_second = self._views(random_ring(rng, (3, m)), second)
        assert views_first == views_second

    def test_shares_reveal_nothing_locally(self, rng):
        m = 4
        Y = _ring_sparse(m, [0, 3], [1, 2], [11, 12])
        X = random_ring(rng, (2, m))
        store0, store1 = dealer_generate(2 * Y.t, seed=0)

        async def party0(session):
            share, _ = await matmul_insensitive(session, X, k=2, m=m, pattern=Y, triples=store0)
            return share.value

        async def party1(session):
            share, _ = await matmul_insensitive(session, Y=Y, k=2, m=m, pattern=Y, triples=store1)
            return share.value

        z0, z1, _, _ = run_parties(party0, party1)
        expected = X[:, [0, 3]] * Y.val[None, :]
        assert not np.array_equal(z1[:, [1, 2]], expected)
        np.testing.assert_array_equal((z0 + z1)[:, [1, 2]], expected)
