# File: s3rec/src/providers/ahe/paillier_provider.py
"""
Paillier additively homomorphic encryption on top of python-paillier.

Only the raw integer layer of ``phe`` is used: plaintexts are integers in
[0, n) and ciphertexts integers in [0, n^2). Ring elements enter through
``lift`` and leave through ``lower``.
"""

import json
import logging
import os
import random
import secrets
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

from Crypto.Util import number
from phe import paillier
from phe.util import powmod

from ...mpc.ring import RING_MODULUS
from ...utils.error_handling import ConfigError, ParseError, ProtocolError, RangeError, UsageError

logger = logging.getLogger("s3rec.ahe.paillier")

SUPPORTED_KEY_BITS = (2048, 3072)
DEFAULT_KEY_BITS = 2048
_LENGTH = struct.Struct("<I")


def _byte_len(value: int) -> int:
    return (value.bit_length() + 7) // 8


@dataclass(frozen=True)
class AheKeyPair:
    """Paillier key pair; the public half is shareable, the private half never leaves its owner"""
    public_key: paillier.PaillierPublicKey
    private_key: Optional[paillier.PaillierPrivateKey] = None

    @property
    def n(self) -> int:
        return self.public_key.n

    @property
    def bits(self) -> int:
        return self.public_key.n.bit_length()

    def public_only(self) -> "AheKeyPair":
        return AheKeyPair(self.public_key)


@dataclass(frozen=True)
class AheCiphertext:
    value: int
    public_key: paillier.PaillierPublicKey

    def __eq__(self, other) -> bool:
        if not isinstance(other, AheCiphertext):
            return NotImplemented
        return self.value == other.value and self.public_key.n == other.public_key.n

    def __hash__(self) -> int:
        return hash((self.value, self.public_key.n))


class AheRandomness:
    """Source of encryption randomness r in [1, n)

    Seeded streams are reproducible and meant for tests; without a seed the
    operating system CSPRNG is used.
    """

    def __init__(self, seed=None):
        self.seed = seed
        self._random = random.Random(seed) if seed is not None else None

    def draw(self, n: int) -> int:
        if self._random is not None:
            return self._random.randrange(1, n)
        return secrets.randbelow(n - 1) + 1


def keygen(bits: int = DEFAULT_KEY_BITS, seed=None) -> AheKeyPair:
    """Generate a Paillier key pair

    Args:
        bits: Modulus size, 2048 or 3072
        seed: Optional seed; equal seeds give equal keys

    Returns:
        AheKeyPair

    Raises:
        ConfigError: For an unsupported modulus size
    """
    if bits not in SUPPORTED_KEY_BITS:
        raise ConfigError(f"AHE modulus must be one of {SUPPORTED_KEY_BITS} bits, got {bits}")
    randfunc = random.Random(seed).randbytes if seed is not None else None
    while True:
        p = number.getPrime(bits // 2, randfunc=randfunc)
        q = number.getPrime(bits // 2, randfunc=randfunc)
        if p != q and (p * q).bit_length() == bits:
            break
    public_key = paillier.PaillierPublicKey(p * q)
    private_key = paillier.PaillierPrivateKey(public_key, p, q)
    logger.info(f"Generated {bits}-bit Paillier key pair")
    return AheKeyPair(public_key, private_key)


def enc(public_key: paillier.PaillierPublicKey, m: int, randomness: AheRandomness = None) -> AheCiphertext:
    """Encrypt an integer plaintext in [0, n)

    Raises:
        RangeError: If ``m`` lies outside [0, n)
    """
    m = int(m)
    if not 0 <= m < public_key.n:
        raise RangeError("AHE plaintext outside [0, n)")
    source = randomness or AheRandomness()
    # g = n + 1, so g^m = 1 + m*n mod n^2
    nude = (1 + m * public_key.n) % public_key.nsquare
    obfuscator = powmod(source.draw(public_key.n), public_key.n, public_key.nsquare)
    return AheCiphertext((nude * obfuscator) % public_key.nsquare, public_key)


def enc_many(public_key: paillier.PaillierPublicKey, values: Iterable[int],
             randomness: AheRandomness = None) -> List[AheCiphertext]:
    source = randomness or AheRandomness()
    return [enc(public_key, value, source) for value in values]


def dec(keypair: AheKeyPair, c: AheCiphertext) -> int:
    """Decrypt to the integer plaintext in [0, n)"""
    if keypair.private_key is None:
        raise UsageError("Decryption needs the private key")
    if c.public_key.n != keypair.n:
        raise UsageError("Ciphertext was produced under a different public key")
    return keypair.private_key.raw_decrypt(c.value)


def c_add(x: AheCiphertext, y: AheCiphertext) -> AheCiphertext:
    """Homomorphic addition: dec(x ⊕ y) = x + y mod n"""
    if x.public_key.n != y.public_key.n:
        raise UsageError("Cannot add ciphertexts under different public keys")
    return AheCiphertext((x.value * y.value) % x.public_key.nsquare, x.public_key)


def p_mul(x: AheCiphertext, k: int) -> AheCiphertext:
    """Plaintext scaling: dec(x ⊗ k) = x * k mod n"""
    k = int(k)
    if not 0 <= k < x.public_key.n:
        raise RangeError("AHE scalar outside [0, n)")
    return AheCiphertext(powmod(x.value, k, x.public_key.nsquare), x.public_key)


def encrypted_zero(public_key: paillier.PaillierPublicKey) -> AheCiphertext:
    """Deterministic encryption of 0 (r = 1), the neutral element of c_add"""
    return AheCiphertext(1, public_key)


def lift(e) -> int:
    """Ring residue -> AHE plaintext in [0, 2^64)"""
    return int(e) % RING_MODULUS


def lower(m: int) -> int:
    """AHE plaintext -> ring residue"""
    return int(m) % RING_MODULUS


def ciphertext_size(public_key: paillier.PaillierPublicKey) -> int:
    """Serialized size in bytes of every ciphertext under ``public_key``"""
    return _LENGTH.size + _byte_len(public_key.nsquare)


def serialize_ciphertext(c: AheCiphertext) -> bytes:
    width = _byte_len(c.public_key.nsquare)
    return _LENGTH.pack(width) + c.value.to_bytes(width, "big")


def deserialize_ciphertext(public_key: paillier.PaillierPublicKey, data: bytes) -> AheCiphertext:
    """Parse one fixed-width ciphertext

    Raises:
        ProtocolError: On a wrong width or an out-of-range value
    """
    width = _byte_len(public_key.nsquare)
    if len(data) != _LENGTH.size + width:
        raise ProtocolError(f"Ciphertext of {len(data)} bytes, expected {_LENGTH.size + width}")
    (declared,) = _LENGTH.unpack_from(data)
    if declared != width:
        raise ProtocolError(f"Ciphertext declares width {declared}, expected {width}")
    value = int.from_bytes(data[_LENGTH.size:], "big")
    if value >= public_key.nsquare:
        raise ProtocolError("Ciphertext value outside [0, n^2)")
    return AheCiphertext(value, public_key)


def serialize_ciphertexts(cs: Iterable[AheCiphertext]) -> bytes:
    return b"".join(serialize_ciphertext(c) for c in cs)


def deserialize_ciphertexts(public_key: paillier.PaillierPublicKey, data: bytes,
                            count: Optional[int] = None) -> List[AheCiphertext]:
    size = ciphertext_size(public_key)
    if len(data) % size or (count is not None and len(data) != count * size):
        raise ProtocolError(f"Ciphertext batch of {len(data)} bytes does not split into {size}-byte ciphertexts")
    return [deserialize_ciphertext(public_key, data[i:i + size]) for i in range(0, len(data), size)]


def serialize_public_key(public_key: paillier.PaillierPublicKey) -> bytes:
    width = _byte_len(public_key.n)
    return _LENGTH.pack(width) + public_key.n.to_bytes(width, "big")


def deserialize_public_key(data: bytes) -> paillier.PaillierPublicKey:
    if len(data) < _LENGTH.size:
        raise ProtocolError("Public key payload too short")
    (width,) = _LENGTH.unpack_from(data)
    if len(data) != _LENGTH.size + width:
        raise ProtocolError(f"Public key payload of {len(data)} bytes, expected {_LENGTH.size + width}")
    n = int.from_bytes(data[_LENGTH.size:], "big")
    if n.bit_length() not in SUPPORTED_KEY_BITS:
        raise ProtocolError(f"Peer public key has unsupported size {n.bit_length()} bits")
    return paillier.PaillierPublicKey(n)


def save_keypair(path: Union[str, Path], keypair: AheKeyPair, include_private: bool = True) -> None:
    """Write a key file as JSON (hex integers)"""
    record = {"bits": keypair.bits, "n": format(keypair.n, "x")}
    if include_private and keypair.private_key is not None:
        record["p"] = format(keypair.private_key.p, "x")
        record["q"] = format(keypair.private_key.q, "x")
    Path(path).write_text(json.dumps(record, indent=2))
    logger.info(f"Wrote {'private' if 'p' in record else 'public'} {keypair.bits}-bit key to {path}")


def load_keypair(path: Union[str, Path]) -> AheKeyPair:
    """Read a key file written by ``save_keypair``

    Raises:
        ParseError: If the file is not a key file
    """
    try:
        record = json.loads(Path(path).read_text())
        public_key = paillier.PaillierPublicKey(int(record["n"], 16))
        if "p" in record:
            p, q = int(record["p"], 16), int(record["q"], 16)
            if p * q != public_key.n:
                raise ParseError("Key file factors do not match the modulus", path=str(path))
            return AheKeyPair(public_key, paillier.PaillierPrivateKey(public_key, p, q))
        return AheKeyPair(public_key)
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"Malformed key file: {exc}", path=str(path)) from exc


class PaillierProvider:
    """Paillier operations bound to one key pair and one randomness stream"""

    def __init__(self, keypair: AheKeyPair = None, bits: int = None, seed=None):
        """Initialize the provider

        Args:
            keypair: Existing keys (generated from ``bits``/``seed`` when None)
            bits: Modulus size (defaults to S3REC_AHE_BITS or 2048)
            seed: Seed for keygen and encryption randomness; None is true-random
        """
        if keypair is None:
            bits = bits or int(os.getenv("S3REC_AHE_BITS", str(DEFAULT_KEY_BITS)))
            keypair = keygen(bits, seed)
        self.keypair = keypair
        self.randomness = AheRandomness(None if seed is None else f"{seed}:enc")
        self.logger = logging.getLogger("s3rec.ahe.provider")
        self.logger.debug(f"Initialized Paillier provider with a {keypair.bits}-bit key")

    @property
    def public_key(self) -> paillier.PaillierPublicKey:
        return self.keypair.public_key

    @property
    def ciphertext_size(self) -> int:
        return ciphertext_size(self.public_key)

    def encrypt(self, m: int) -> AheCiphertext:
        return enc(self.public_key, m, self.randomness)

    def encrypt_many(self, values: Iterable[int]) -> List[AheCiphertext]:
        return enc_many(self.public_key, values, self.randomness)

    def decrypt(self, c: AheCiphertext) -> int:
        return dec(self.keypair, c)
