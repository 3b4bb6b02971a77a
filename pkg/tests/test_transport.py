# File: s3rec/tests/test_transport.py
import asyncio
import socket

import numpy as np
import pytest

from src.mpc.dealer import dealer_generate
from src.mpc.ring import random_ring
from src.protocols.matmul_dense import matmul_dense
from src.transport.framing import HEADER_SIZE, MsgType, Phase, decode_header, encode_frame
from src.transport.channel_factory import ChannelFactory
from src.transport.inproc_channel import InProcChannel
from src.transport.session import PartySession, create_session_pair, run_pair
from src.transport.stats import ChannelStats
from src.utils.error_handling import ConfigError, ProtocolError, TransportError

from .conftest import run_parties


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class TestFraming:

    def test_header_layout(self):
        frame = encode_frame(MsgType.CONTROL, b"abc")
        assert len(frame) == HEADER_SIZE + 3
        assert frame[:4] == (3).to_bytes(4, "little")
        assert frame[4] == int(MsgType.CONTROL)
        assert decode_header(frame[:HEADER_SIZE]) == (3, MsgType.CONTROL)

    def test_unknown_type_rejected(self):
        with pytest.raises(ProtocolError):
            decode_header((0).to_bytes(4, "little") + bytes([99]))

    def test_short_header_rejected(self):
        with pytest.raises(ProtocolError):
            decode_header(b"\x00\x00")


class TestSessionAccounting:

    def test_frames_arrive_in_order_and_are_counted(self):
        async def sender(session):
            await session.send(Phase.INPUT, MsgType.SHARE_BATCH, b"x" * 16)
            await session.send(Phase.COMPUTE, MsgType.OPEN_BATCH, b"y" * 8)
            await session.send(Phase.OUTPUT, MsgType.CONTROL, b"")

        async def receiver(session):
            return [await session.recv() for _ in range(3)]

        _, frames, session0, session1 = run_parties(sender, receiver)
        assert frames == [(MsgType.SHARE_BATCH, b"x" * 16), (MsgType.OPEN_BATCH, b"y" * 8), (MsgType.CONTROL, b"")]
        assert session0.stats.payload_sent == {"offline": 0, "input": 16, "compute": 8, "output": 0}
        assert session0.stats.total_sent == 24 + 3 * HEADER_SIZE
        assert session1.stats.payload_received == 24
        assert session1.stats.bytes_received == 24 + 3 * HEADER_SIZE

    def test_expect_rejects_wrong_type(self):
        async def sender(session):
            await session.send(Phase.INPUT, MsgType.PIR_QUERY, b"q")

        async def receiver(session):
            await session.expect(MsgType.SHARE_BATCH)

        with pytest.raises(ProtocolError):
            run_parties(sender, receiver)

    def test_recv_after_peer_close(self):
        async def closer(session):
            await session.close()

        async def reader(session):
            await session.recv("input")

        with pytest.raises(TransportError):
            run_parties(closer, reader)

    def test_truncated_frame_is_a_protocol_error(self):
        async def main():
            left, right = InProcChannel.create_pair()
            session = PartySession(1, right)
            await left.write(encode_frame(MsgType.SHARE_BATCH, b"12345678")[:9])
            await left.close()
            await session.recv()

        with pytest.raises(ProtocolError):
            asyncio.run(main())

    def test_invalid_party_id(self):
        async def main():
            left, _ = InProcChannel.create_pair()
            PartySession(2, left)

        with pytest.raises(ConfigError):
            asyncio.run(main())

    def test_seeded_sessions_replay(self):
        async def main():
            first, _ = create_session_pair(rng_seed=7)
            second, _ = create_session_pair(rng_seed=7)
            return first.rng.integers(0, 1000, 5).tolist(), second.rng.integers(0, 1000, 5).tolist()

        left, right = asyncio.run(main())
        assert left == right

    def test_run_pair_cancels_the_blocked_peer(self):
        async def failing():
            raise ValueError("boom")

        async def blocked():
            await asyncio.sleep(3600)

        with pytest.raises(ValueError):
            asyncio.run(run_pair(failing(), blocked()))


class TestTcpChannel:

    def test_loopback_exchange(self):
        port = _free_port()

        async def party(party_id):
            channel = await ChannelFactory.create_tcp(party_id, {"host": "127.0.0.1", "port": port})
            session = PartySession(party_id, channel)
            try:
                if party_id == 0:
                    await session.send(Phase.INPUT, MsgType.SHARE_BATCH, b"z" * 4096)
                    return await session.expect(MsgType.CONTROL)
                payload = await session.expect(MsgType.SHARE_BATCH)
                await session.send(Phase.OUTPUT, MsgType.CONTROL, payload[:3])
                return len(payload)
            finally:
                await session.close()

        async def main():
            return await asyncio.wait_for(run_pair(party(1), party(0)), timeout=30)

        received, echoed = asyncio.run(main())
        assert received == 4096
        assert echoed == b"zzz"

    def test_connect_failure(self):
        port = _free_port()

        async def main():
            await ChannelFactory.create_tcp(0, {"host": "127.0.0.1", "port": port, "connect_retries": 1})

        with pytest.raises(TransportError):
            asyncio.run(main())

    def test_tcp_and_inproc_account_identically(self):
        k, m = 2, 4
        rng = np.random.default_rng(21)
        X, Y = random_ring(rng, (k, m)), random_ring(rng, (m, m))

        async def party(session):
            store = dealer_generate(k * m * m, seed=5)[session.party_id]
            x, y = (X, None) if session.party_id == 0 else (None, Y)
            await matmul_dense(session, x, y, k=k, m=m, triples=store)
            return session.stats

        _, _, inproc0, inproc1 = run_parties(party, party, seed=3)

        port = _free_port()

        async def tcp_party(party_id):
            channel = await ChannelFactory.create_tcp(party_id, {"host": "127.0.0.1", "port": port})
            session = PartySession(party_id, channel, 3, log_frames=True)
            try:
                return await party(session)
            finally:
                await session.close()

        async def main():
            return await asyncio.wait_for(run_pair(tcp_party(1), tcp_party(0)), timeout=30)

        tcp1, tcp0 = asyncio.run(main())
        for over_tcp, in_process in ((tcp0, inproc0.stats), (tcp1, inproc1.stats)):
            assert over_tcp.as_dict() == in_process.as_dict()
            assert over_tcp.frame_log == in_process.frame_log
            assert over_tcp.frames_received == in_process.frames_received


class TestChannelStats:

    def test_frame_log_is_off_by_default(self):
        stats = ChannelStats()
        for _ in range(1000):
            stats.record_sent("compute", MsgType.OPEN_BATCH, 16)
            stats.record_received(MsgType.OPEN_BATCH, 16)
        assert stats.frame_log == []
        assert stats.payload_sent["compute"] == 16000
        assert stats.frames_received[MsgType.OPEN_BATCH] == 1000

    def test_unlogged_sessions_keep_counters_only(self):
        async def sender(session):
            for _ in range(50):
                await session.send(Phase.COMPUTE, MsgType.OPEN_BATCH, b"x" * 8)

        async def receiver(session):
            for _ in range(50):
                await session.recv()

        _, _, session0, session1 = run_parties(sender, receiver, log_frames=False)
        assert session0.stats.frame_log == [] and session1.stats.frame_log == []
        assert session0.stats.payload_sent["compute"] == 400
        assert session1.stats.payload_received == 400

    def test_delta_slices_the_logged_transcript(self):
        stats = ChannelStats(log_frames=True)
        stats.record_sent("input", MsgType.SHARE_BATCH, 8)
        before = stats.snapshot()
        stats.record_sent("compute", MsgType.OPEN_BATCH, 16)
        delta = stats.delta(before)
        assert [record.payload_len for record in delta.frame_log] == [16]
        assert delta.payload_sent["compute"] == 16 and delta.payload_sent["input"] == 0
