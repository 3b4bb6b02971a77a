# File: s3rec/src/providers/ahe/__init__.py
"""
Additively homomorphic encryption providers.

Currently supports:
- Paillier on python-paillier raw integers, with seeded keygen for tests
"""

from .paillier_provider import (
    SUPPORTED_KEY_BITS,
    DEFAULT_KEY_BITS,
    AheKeyPair,
    AheCiphertext,
    AheRandomness,
    PaillierProvider,
    keygen,
    enc,
    enc_many,
    dec,
    c_add,
    p_mul,
    encrypted_zero,
    lift,
    lower,
    ciphertext_size,
    serialize_ciphertext,
    deserialize_ciphertext,
    serialize_ciphertexts,
    deserialize_ciphertexts,
    serialize_public_key,
    deserialize_public_key,
    save_keypair,
    load_keypair,
)

__all__ = [
    "SUPPORTED_KEY_BITS", "DEFAULT_KEY_BITS", "AheKeyPair", "AheCiphertext", "AheRandomness",
    "PaillierProvider", "keygen", "enc", "enc_many", "dec", "c_add", "p_mul", "encrypted_zero",
    "lift", "lower", "ciphertext_size", "serialize_ciphertext", "deserialize_ciphertext",
    "serialize_ciphertexts", "deserialize_ciphertexts", "serialize_public_key",
    "deserialize_public_key", "save_keypair", "load_keypair",
]
