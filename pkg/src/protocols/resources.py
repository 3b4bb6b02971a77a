# File: s3rec/src/protocols/resources.py
import logging
from dataclasses import dataclass
from typing import Optional

from ..core.interfaces.pir_backend import PirBackend
from ..mpc.dealer import TripleStore
from ..providers.ahe.paillier_provider import (
    AheKeyPair,
    AheRandomness,
    PaillierProvider,
    deserialize_public_key,
    serialize_public_key,
)
from ..providers.pir.ahe_linear_backend import AheLinearPirBackend
from ..providers.pir.plain_backend import PlainPirBackend
from ..transport.framing import MsgType, Phase
from ..utils.error_handling import ConfigError, UsageError

logger = logging.getLogger("s3rec.protocols.resources")


@dataclass
class ProtocolResources:
    """Correlated randomness and keys one party brings to the protocols

    Party 0 holds the matrix-encryption key pair and, after
    ``exchange_keys``, a server-side PIR backend. Party 1 holds the PIR
    client backend and, after ``exchange_keys``, party 0's public key.
    """
    triples: Optional[TripleStore] = None
    keypair: Optional[AheKeyPair] = None
    pir_backend: Optional[PirBackend] = None
    pir_backend_name: str = "ahe-linear"
    query_pad_density: Optional[float] = None
    peer_public_key: object = None

    def require_triples(self) -> TripleStore:
        if self.triples is None:
            raise UsageError("This protocol needs a triple store")
        return self.triples


def session_randomness(session) -> AheRandomness:
    """Encryption randomness derived from the session generator"""
    return AheRandomness(int(session.rng.integers(0, 2**63)))


async def exchange_keys(session, resources: ProtocolResources) -> ProtocolResources:
    """Offline public-key exchange, once per session

    P0 sends its matrix-encryption public key. For the ahe-linear PIR
    backend P1 then sends its PIR client public key so P0 can answer queries.
    """
    if session.party_id == 0:
        if resources.keypair is None:
            raise UsageError("Party 0 needs an AHE key pair for the sensitive protocol")
        await session.send(Phase.OFFLINE, MsgType.CONTROL, serialize_public_key(resources.keypair.public_key))
        if resources.pir_backend_name == "ahe-linear":
            payload = await session.expect(MsgType.CONTROL, Phase.OFFLINE.value)
            client_key = AheKeyPair(deserialize_public_key(payload))
            resources.pir_backend = AheLinearPirBackend(PaillierProvider(keypair=client_key))
        elif resources.pir_backend_name == "plain":
            resources.pir_backend = PlainPirBackend()
        else:
            raise ConfigError(f"Unknown PIR backend '{resources.pir_backend_name}'")
    else:
        payload = await session.expect(MsgType.CONTROL, Phase.OFFLINE.value)
        resources.peer_public_key = deserialize_public_key(payload)
        if resources.pir_backend is None:
            raise UsageError("Party 1 needs a PIR client backend")
        if resources.pir_backend.name != resources.pir_backend_name:
            raise ConfigError(
                f"PIR backend '{resources.pir_backend.name}' does not match configured '{resources.pir_backend_name}'"
            )
        if isinstance(resources.pir_backend, AheLinearPirBackend):
            await session.send(Phase.OFFLINE, MsgType.CONTROL,
                               serialize_public_key(resources.pir_backend.keypair.public_key))
    session.context["keys_exchanged"] = True
    logger.info(f"P{session.party_id} completed key exchange ({resources.pir_backend_name} PIR)")
    return resources
