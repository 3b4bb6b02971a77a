# File: s3rec/src/mpc/dealer.py
"""
Trusted-dealer Beaver triples.

The dealer samples a, b uniformly, sets c = a*b mod 2^64 and hands each
party one additive share of every value. A store is consume-once: triples
leave it through ``take`` and a taken batch can feed exactly one
multiplication.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..transport.framing import MsgType, Phase
from ..utils.error_handling import (
    ParseError,
    ShapeError,
    TripleExhaustedError,
    UsageError,
)
from .ring import RING_DTYPE, RING_ELEMENT_BYTES, random_ring, ring_from_bytes, ring_to_bytes

logger = logging.getLogger("s3rec.mpc.dealer")

TRIPLE_FILE_MAGIC = b"S3TR"
TRIPLE_BYTES = 3 * RING_ELEMENT_BYTES
_COUNT = struct.Struct("<Q")


@dataclass
class BeaverTriple:
    """One party's shares of a batch of multiplication triples

    ``a``, ``b`` and ``c`` have the shape of the operands they will mask.
    """
    party_id: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    consumed: bool = False

    @property
    def size(self) -> int:
        return int(self.a.size)

    def reshaped(self, shape) -> "BeaverTriple":
        """View the batch with the operand shape; the original is marked consumed"""
        self.mark_consumed()
        try:
            return BeaverTriple(
                self.party_id,
                self.a.reshape(shape),
                self.b.reshape(shape),
                self.c.reshape(shape),
            )
        except ValueError as exc:
            raise ShapeError(f"Triple batch of {self.size} cannot take shape {shape}") from exc

    def mark_consumed(self) -> None:
        if self.consumed:
            raise UsageError("Beaver triple batch reused", details={"size": self.size})
        self.consumed = True


class TripleStore:
    """Consume-once supply of one party's triple shares"""

    def __init__(self, party_id: int, a: np.ndarray, b: np.ndarray, c: np.ndarray):
        if not (a.shape == b.shape == c.shape and a.ndim == 1):
            raise ShapeError("Triple store components must be equal-length vectors")
        self.party_id = party_id
        self._a = np.asarray(a, dtype=RING_DTYPE)
        self._b = np.asarray(b, dtype=RING_DTYPE)
        self._c = np.asarray(c, dtype=RING_DTYPE)
        self._cursor = 0
        self.logger = logging.getLogger("s3rec.mpc.triples")

    @classmethod
    def empty(cls, party_id: int) -> "TripleStore":
        zero = np.zeros(0, dtype=RING_DTYPE)
        return cls(party_id, zero, zero.copy(), zero.copy())

    @property
    def capacity(self) -> int:
        return int(self._a.size)

    @property
    def remaining(self) -> int:
        return self.capacity - self._cursor

    @property
    def consumed(self) -> int:
        return self._cursor

    def __len__(self) -> int:
        return self.remaining

    def take(self, count: int, shape=None) -> BeaverTriple:
        """Remove ``count`` triples from the store

        Args:
            count: Number of scalar triples
            shape: Optional operand shape for the returned batch

        Raises:
            TripleExhaustedError: If fewer than ``count`` remain
        """
        if count < 0:
            raise UsageError(f"Cannot take a negative number of triples ({count})")
        if count > self.remaining:
            raise TripleExhaustedError(requested=count, remaining=self.remaining)
        start, end = self._cursor, self._cursor + count
        self._cursor = end
        triple = BeaverTriple(self.party_id, self._a[start:end], self._b[start:end], self._c[start:end])
        if shape is not None:
            triple = triple.reshaped(shape)
        return triple

    def components(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unconsumed (a, b, c) share vectors"""
        start = self._cursor
        return self._a[start:], self._b[start:], self._c[start:]


def dealer_generate(count: int, seed) -> Tuple[TripleStore, TripleStore]:
    """Generate ``count`` triples and split them into both parties' stores

    Args:
        count: Number of scalar triples
        seed: Seed for the dealer's generator; equal seeds give equal stores

    Returns:
        (party 0 store, party 1 store)
    """
    if count < 0:
        raise UsageError(f"Triple count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    a = random_ring(rng, count)
    b = random_ring(rng, count)
    c = a * b
    a0, b0, c0 = random_ring(rng, count), random_ring(rng, count), random_ring(rng, count)
    logger.debug(f"Dealer generated {count} triples")
    return (
        TripleStore(0, a0, b0, c0),
        TripleStore(1, a - a0, b - b0, c - c0),
    )


def verify_triple_stores(store0: TripleStore, store1: TripleStore) -> bool:
    """Reconstruct every unconsumed triple and check a*b = c"""
    a0, b0, c0 = store0.components()
    a1, b1, c1 = store1.components()
    if a0.size != a1.size:
        return False
    return bool(np.array_equal((a0 + a1) * (b0 + b1), c0 + c1))


def _pack(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> bytes:
    return ring_to_bytes(np.stack([a, b, c], axis=1))


def _unpack(payload: bytes, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    grid = ring_from_bytes(payload, (count, 3))
    return grid[:, 0].copy(), grid[:, 1].copy(), grid[:, 2].copy()


async def provision_triples(session, count: int, seed=None) -> TripleStore:
    """Run the dealer at party 0 and ship party 1's shares over the channel

    Traffic lands in the offline phase: one SHARE_BATCH of 24 bytes per
    triple from party 0 to party 1.

    Args:
        session: This party's PartySession
        count: Number of triples (must agree at both parties)
        seed: Dealer seed (party 0 only; defaults to the session generator)

    Returns:
        This party's store
    """
    if session.party_id == 0:
        dealer_seed = seed if seed is not None else int(session.rng.integers(0, 2**63))
        store0, store1 = dealer_generate(count, dealer_seed)
        a1, b1, c1 = store1.components()
        await session.send(Phase.OFFLINE, MsgType.SHARE_BATCH, _pack(a1, b1, c1))
        logger.info(f"Provisioned {count} triples to P1 ({count * TRIPLE_BYTES} B offline)")
        return store0
    payload = await session.expect(MsgType.SHARE_BATCH, Phase.OFFLINE.value)
    if len(payload) != count * TRIPLE_BYTES:
        raise ParseError(f"Triple batch of {len(payload)} bytes does not hold {count} triples")
    return TripleStore(1, *_unpack(payload, count))


def triples_required(k: int, m: int, t: Optional[int] = None, protocol: str = "dense") -> int:
    """Triples consumed by one matrix product

    dense needs k*m^2, insensitive needs k*t, sensitive needs none.
    """
    if protocol == "dense":
        return k * m * m
    if protocol == "insensitive":
        if t is None:
            raise UsageError("The insensitive protocol needs t (nonzeros of Y) for sizing")
        return k * t
    if protocol.startswith("sensitive"):
        return 0
    raise UsageError(f"Unknown protocol for triple sizing: {protocol}")


def write_triple_store(path: Union[str, Path], store: TripleStore) -> int:
    """Write unconsumed triples as "S3TR" + count (8-byte LE) + count x (a, b, c)

    Returns:
        Number of bytes written
    """
    a, b, c = store.components()
    data = TRIPLE_FILE_MAGIC + _COUNT.pack(int(a.size)) + _pack(a, b, c)
    Path(path).write_bytes(data)
    logger.info(f"Wrote {a.size} triples for P{store.party_id} to {path}")
    return len(data)


def read_triple_store(path: Union[str, Path], party_id: int) -> TripleStore:
    """Read a triple file written by ``write_triple_store``

    Raises:
        ParseError: On a bad magic, header or body length
    """
    data = Path(path).read_bytes()
    header_size = len(TRIPLE_FILE_MAGIC) + _COUNT.size
    if len(data) < header_size or data[:4] != TRIPLE_FILE_MAGIC:
        raise ParseError("Not a triple store file", path=str(path))
    (count,) = _COUNT.unpack_from(data, 4)
    body = data[header_size:]
    if len(body) != count * TRIPLE_BYTES:
        raise ParseError(
            f"Triple store declares {count} triples but carries {len(body)} body bytes",
            path=str(path)
        )
    return TripleStore(party_id, *_unpack(body, count))
