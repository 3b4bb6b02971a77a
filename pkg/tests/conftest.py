# File: s3rec/tests/conftest.py
import asyncio

import numpy as np
import pytest

from src.mpc.dealer import dealer_generate
from src.providers.ahe.paillier_provider import keygen
from src.providers.pir.ahe_linear_backend import AheLinearPirBackend
from src.providers.ahe.paillier_provider import PaillierProvider
from src.transport.session import create_session_pair, run_pair


def run_parties(party0, party1, seed: int = 0, latency_ms: float = 0.0, log_frames: bool = True):
    """Run two party coroutine factories over a fresh in-process session pair

    Each factory receives its PartySession. Returns (result0, result1, session0, session1).
    Frame transcripts are kept by default so tests can inspect them.
    """
    async def main():
        session0, session1 = create_session_pair(seed, latency_ms, log_frames)
        try:
            result0, result1 = await run_pair(party0(session0), party1(session1))
        finally:
            await session0.close()
            await session1.close()
        return result0, result1, session0, session1

    return asyncio.run(main())


@pytest.fixture(scope="session")
def protocol_keypair():
    """P0's 2048-bit matrix-encryption key, fixed by seed"""
    return keygen(2048, seed=11)


@pytest.fixture(scope="session")
def pir_keypair():
    """P1's 2048-bit PIR client key, distinct from the protocol key"""
    return keygen(2048, seed=12)


@pytest.fixture
def ahe_pir_backend(pir_keypair):
    return AheLinearPirBackend(PaillierProvider(keypair=pir_keypair, seed=5))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def triple_stores():
    """Factory for a fresh pair of consistent dealer stores"""
    def make(count: int, seed: int = 3):
        return dealer_generate(count, seed)
    return make
