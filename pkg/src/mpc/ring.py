# File: s3rec/src/mpc/ring.py
"""
Arithmetic in the ring of integers modulo 2^64 and the fixed-point codec
that maps reals onto it.

Ring elements are carried as ``numpy.uint64`` arrays; numpy array
arithmetic on that dtype wraps modulo 2^64, which is exactly the ring.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..utils.error_handling import RangeError

logger = logging.getLogger("s3rec.mpc.ring")

RING_BITS = 64
RING_MODULUS = 1 << RING_BITS
RING_DTYPE = np.uint64
RING_ELEMENT_BYTES = 8
DEFAULT_FRAC_BITS = 20

RingArray = np.ndarray
RealLike = Union[float, int, np.ndarray]


def as_ring(values) -> RingArray:
    """Coerce integers (any sign, any size) into ring residues

    Args:
        values: Python ints, numpy integer arrays or nested lists

    Returns:
        uint64 array holding ``values mod 2^64``
    """
    array = np.asarray(values)
    if array.dtype == RING_DTYPE:
        return array
    if array.dtype.kind == "i":
        return array.astype(np.int64).astype(RING_DTYPE)
    if array.dtype.kind in "ub":
        return array.astype(RING_DTYPE)
    if array.dtype == object:
        reduced = np.vectorize(lambda v: int(v) % RING_MODULUS, otypes=[object])(array)
        return np.asarray(reduced).astype(RING_DTYPE)
    raise RangeError(f"Cannot interpret dtype {array.dtype} as ring elements")


def to_signed(values: RingArray) -> np.ndarray:
    """Interpret residues as two's-complement integers in [-2^63, 2^63)"""
    return np.asarray(values, dtype=RING_DTYPE).astype(np.int64)


def random_ring(rng: np.random.Generator, shape) -> RingArray:
    """Draw uniform ring elements from a seeded generator"""
    return rng.integers(0, np.iinfo(np.uint64).max, size=shape, dtype=RING_DTYPE, endpoint=True)


def ring_to_bytes(values: RingArray) -> bytes:
    """Serialize ring elements as consecutive 8-byte little-endian words"""
    return np.ascontiguousarray(values, dtype=RING_DTYPE).astype("<u8").tobytes()


def ring_from_bytes(payload: bytes, shape=None) -> RingArray:
    """Inverse of ring_to_bytes

    Args:
        payload: Serialized words; length must be a multiple of 8
        shape: Optional target shape

    Returns:
        uint64 array
    """
    if len(payload) % RING_ELEMENT_BYTES:
        raise RangeError(f"Ring payload of {len(payload)} bytes is not a multiple of 8")
    values = np.frombuffer(payload, dtype="<u8").astype(RING_DTYPE)
    if shape is not None:
        values = values.reshape(shape)
    return values


@dataclass(frozen=True)
class FixedPointCodec:
    """Fixed-point encoding of reals into the 64-bit ring

    Attributes:
        frac_bits: Number of fractional bits f
    """
    frac_bits: int = DEFAULT_FRAC_BITS

    def __post_init__(self):
        if not 0 <= self.frac_bits < RING_BITS - 1:
            raise RangeError(f"frac_bits must lie in [0, {RING_BITS - 1}), got {self.frac_bits}")

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def int_bound(self) -> float:
        """Magnitude limit for encodable reals"""
        return float(1 << (RING_BITS - 1 - self.frac_bits))

    @property
    def ulp(self) -> float:
        return 1.0 / self.scale

    def encode(self, x: RealLike) -> RingArray:
        """Encode reals as round(x * 2^f) mod 2^64

        Args:
            x: Scalar or array of reals

        Returns:
            uint64 array with the shape of ``x``

        Raises:
            RangeError: If any |x| reaches int_bound or is not finite
        """
        reals = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(reals)):
            raise RangeError("Cannot encode non-finite values")
        if reals.size and np.max(np.abs(reals)) >= self.int_bound:
            raise RangeError(
                f"Value magnitude {np.max(np.abs(reals))} exceeds fixed-point bound {self.int_bound}",
                details={"frac_bits": self.frac_bits}
            )
        return np.round(reals * self.scale).astype(np.int64).astype(RING_DTYPE)

    def decode(self, e: RingArray, scale_bits: int = None) -> np.ndarray:
        """Decode residues as signed(e) / 2^f

        Args:
            e: Ring elements
            scale_bits: Fraction bits carried by ``e`` (defaults to f)

        Returns:
            float64 array
        """
        bits = self.frac_bits if scale_bits is None else scale_bits
        return to_signed(e).astype(np.float64) / float(1 << bits)


def trunc_local(e: RingArray, f: int, party_id: int) -> RingArray:
    """Local probabilistic truncation of one party's share by f bits

    Party 0 shifts its signed share arithmetically; party 1 negates,
    shifts and negates again. The reconstructed value equals the truncated
    secret up to one unit in the last place, except with probability about
    |x| / 2^63 for a secret x.

    Args:
        e: This party's share (scale 2f for a product of two encodings)
        f: Bits to drop
        party_id: 0 or 1

    Returns:
        Truncated share
    """
    signed = to_signed(e)
    if party_id == 0:
        return (signed >> f).astype(RING_DTYPE)
    negated = np.negative(np.asarray(e, dtype=RING_DTYPE)).astype(np.int64)
    return np.negative((negated >> f).astype(RING_DTYPE))
