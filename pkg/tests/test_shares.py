# File: s3rec/tests/test_shares.py
import asyncio

import numpy as np
import pytest
from scipy import stats

from src.mpc.dealer import (
    TripleStore,
    dealer_generate,
    provision_triples,
    read_triple_store,
    triples_required,
    verify_triple_stores,
    write_triple_store,
)
from src.mpc.ring import FixedPointCodec, as_ring, random_ring, to_signed, trunc_local
from src.mpc.shares import Share, add, add_public, input_share, mul, mul_public, neg, rec, recv_shr, shr, sub
from src.transport.framing import Phase
from src.utils.error_handling import ParseError, ShapeError, TripleExhaustedError, UsageError

from .conftest import run_parties


class TestDealer:

    def test_stores_reconstruct_valid_triples(self):
        store0, store1 = dealer_generate(64, seed=1)
        assert verify_triple_stores(store0, store1)
        a0, b0, c0 = store0.components()
        a1, b1, c1 = store1.components()
        np.testing.assert_array_equal((a0 + a1) * (b0 + b1), c0 + c1)

    def test_same_seed_same_stores(self):
        first, _ = dealer_generate(8, seed=4)
        second, _ = dealer_generate(8, seed=4)
        np.testing.assert_array_equal(first.components()[0], second.components()[0])

    def test_take_is_consume_once(self):
        store, _ = dealer_generate(10, seed=0)
        store.take(6)
        assert store.remaining == 4
        assert store.consumed == 6
        with pytest.raises(TripleExhaustedError) as info:
            store.take(5)
        assert info.value.details == {"requested": 5, "remaining": 4}

    def test_taken_batch_cannot_be_reused(self):
        store, _ = dealer_generate(2, seed=0)
        batch = store.take(2)
        batch.mark_consumed()
        x = Share(0, as_ring([1, 2]))
        with pytest.raises(UsageError):
            asyncio.run(mul(None, x, x, batch))

    def test_reshape_mismatch(self):
        store, _ = dealer_generate(4, seed=0)
        with pytest.raises(ShapeError):
            store.take(4, shape=(3, 2))

    def test_file_round_trip_keeps_only_unconsumed(self, tmp_path):
        store0, store1 = dealer_generate(12, seed=2)
        store0.take(2)
        store1.take(2)
        size = write_triple_store(tmp_path / "p0.s3tr", store0)
        write_triple_store(tmp_path / "p1.s3tr", store1)
        assert size == 4 + 8 + 10 * 24
        loaded0 = read_triple_store(tmp_path / "p0.s3tr", 0)
        loaded1 = read_triple_store(tmp_path / "p1.s3tr", 1)
        assert loaded0.capacity == 10
        assert verify_triple_stores(loaded0, loaded1)

    def test_bad_file_rejected(self, tmp_path):
        path = tmp_path / "junk.s3tr"
        path.write_bytes(b"NOPE" + bytes(8))
        with pytest.raises(ParseError):
            read_triple_store(path, 0)

    def test_sizing(self):
        assert triples_required(3, 5, protocol="dense") == 75
        assert triples_required(3, 5, t=7, protocol="insensitive") == 21
        assert triples_required(3, 5, protocol="sensitive-pir") == 0
        with pytest.raises(UsageError):
            triples_required(3, 5, protocol="insensitive")

    def test_provisioning_bytes(self):
        async def party0(session):
            return await provision_triples(session, 5)

        async def party1(session):
            return await provision_triples(session, 5)

        store0, store1, session0, _ = run_parties(party0, party1)
        assert verify_triple_stores(store0, store1)
        assert session0.stats.payload_sent["offline"] == 5 * 24

    def test_empty_store(self):
        store = TripleStore.empty(1)
        assert store.remaining == 0
        assert len(store) == 0


class TestSharing:

    def test_share_and_reconstruct(self, rng):
        secret = random_ring(rng, (3, 4))

        async def owner(session):
            share = await input_share(session, 0, secret)
            return await rec(session, share, to=0)

        async def other(session):
            share = await input_share(session, 0, shape=(3, 4))
            return await rec(session, share, to=0)

        opened, nothing, session0, session1 = run_parties(owner, other)
        np.testing.assert_array_equal(opened, secret)
        assert nothing is None
        assert session0.stats.payload_sent["input"] == 12 * 8
        assert session1.stats.payload_sent["output"] == 12 * 8

    def test_local_operations(self, rng):
        x, y = random_ring(rng, 6), random_ring(rng, 6)
        rx, ry = random_ring(rng, 6), random_ring(rng, 6)
        x0, x1 = Share(0, x - rx), Share(1, rx)
        y0, y1 = Share(0, y - ry), Share(1, ry)
        np.testing.assert_array_equal(add(x0, y0).value + add(x1, y1).value, x + y)
        np.testing.assert_array_equal(sub(x0, y0).value + sub(x1, y1).value, x - y)
        np.testing.assert_array_equal(neg(x0).value + neg(x1).value, np.negative(x))
        np.testing.assert_array_equal(mul_public(x0, 3).value + mul_public(x1, 3).value, x * np.uint64(3))
        np.testing.assert_array_equal(add_public(x0, 5).value + add_public(x1, 5).value, x + np.uint64(5))

    def test_scale_mismatch(self):
        with pytest.raises(UsageError):
            add(Share(0, as_ring([1]), 20), Share(0, as_ring([1]), 0))

    def test_beaver_multiplication(self, rng):
        x, y = random_ring(rng, 8), random_ring(rng, 8)
        store0, store1 = dealer_generate(8, seed=6)

        async def party(session, store):
            xs = await input_share(session, 0, x if session.party_id == 0 else None, shape=(8,))
            ys = await input_share(session, 1, y if session.party_id == 1 else None, shape=(8,))
            product = await mul(session, xs, ys, store.take(8))
            return await rec(session, product, to=0)

        opened, _, session0, _ = run_parties(
            lambda s: party(s, store0), lambda s: party(s, store1),
        )
        np.testing.assert_array_equal(opened, x * y)
        # one OPEN_BATCH of d and e per party
        assert session0.stats.payload_sent["compute"] == 2 * 8 * 8

    def test_fixed_point_product_with_truncation(self, rng):
        codec = FixedPointCodec(20)
        x, y = rng.uniform(-3, 3, 5), rng.uniform(-3, 3, 5)
        store0, store1 = dealer_generate(5, seed=8)

        async def party(session, store):
            xs = await input_share(session, 0, codec.encode(x) if session.party_id == 0 else None,
                                   shape=(5,), scale=20)
            ys = await input_share(session, 1, codec.encode(y) if session.party_id == 1 else None,
                                   shape=(5,), scale=20)
            product = await mul(session, xs, ys, store.take(5), phase=Phase.COMPUTE)
            truncated = Share(session.party_id, trunc_local(product.value, 20, session.party_id), 20)
            return await rec(session, truncated, to=0)

        opened, _, _, _ = run_parties(lambda s: party(s, store0), lambda s: party(s, store1))
        np.testing.assert_allclose(codec.decode(opened), x * y, atol=1e-4)
        assert np.all(np.abs(to_signed(opened)) < 2**40)

    def test_receiver_needs_shape(self):
        class Fake:
            party_id = 1

        async def receiver():
            await input_share(Fake(), 0)

        with pytest.raises(UsageError):
            asyncio.run(receiver())


class TestTranscriptUniformity:
    """The share a peer receives must look uniform whatever the secret is"""

    CASES = 100_000
    SIGNIFICANCE = 0.001

    def _assert_low_byte_uniform(self, values):
        low = (np.asarray(values, dtype=np.uint64) & np.uint64(0xFF)).astype(np.int64)
        counts = np.bincount(low, minlength=256)
        assert stats.chisquare(counts).pvalue > self.SIGNIFICANCE

    @pytest.mark.slow
    def test_repeated_sharing_of_a_fixed_secret(self):
        secret = as_ring([5])

        async def owner(session):
            for _ in range(self.CASES):
                await shr(session, secret)

        async def peer(session):
            received = np.empty(self.CASES, dtype=np.uint64)
            for index in range(self.CASES):
                received[index] = (await recv_shr(session, (1,))).value[0]
            return received

        _, received, _, _ = run_parties(owner, peer, seed=17, log_frames=False)
        self._assert_low_byte_uniform(received)

    @pytest.mark.parametrize("secret", [0, 1, 2**63])
    def test_batched_sharing_of_a_constant(self, secret):
        values = as_ring(np.full(self.CASES, secret, dtype=object))

        async def owner(session):
            return await shr(session, values)

        async def peer(session):
            return await recv_shr(session, values.shape)

        kept, received, _, _ = run_parties(owner, peer, seed=secret % 97, log_frames=False)
        self._assert_low_byte_uniform(received.value)
        np.testing.assert_array_equal(kept.value + received.value, values)
