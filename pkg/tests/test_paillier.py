# File: s3rec/tests/test_paillier.py
import pytest

from src.providers.ahe.paillier_provider import (
    AheRandomness,
    PaillierProvider,
    c_add,
    ciphertext_size,
    dec,
    deserialize_ciphertext,
    deserialize_public_key,
    enc,
    encrypted_zero,
    keygen,
    lift,
    load_keypair,
    lower,
    p_mul,
    save_keypair,
    serialize_ciphertext,
    serialize_public_key,
)
from src.utils.error_handling import ConfigError, ParseError, ProtocolError, RangeError, UsageError


class TestPaillier:

    def test_modulus_size(self, protocol_keypair):
        assert protocol_keypair.bits == 2048

    def test_unsupported_size(self):
        with pytest.raises(ConfigError):
            keygen(1024)

    def test_homomorphic_addition_and_scaling(self, protocol_keypair):
        pk = protocol_keypair.public_key
        randomness = AheRandomness(3)
        x, y = enc(pk, 41, randomness), enc(pk, 2**70, randomness)
        assert dec(protocol_keypair, c_add(x, y)) == 41 + 2**70
        assert dec(protocol_keypair, p_mul(x, 1000)) == 41000
        assert dec(protocol_keypair, c_add(x, encrypted_zero(pk))) == 41

    def test_addition_wraps_mod_n(self, protocol_keypair):
        pk = protocol_keypair.public_key
        x = enc(pk, pk.n - 1)
        assert dec(protocol_keypair, c_add(x, enc(pk, 2))) == 1

    def test_encryption_is_randomised(self, protocol_keypair):
        pk = protocol_keypair.public_key
        assert enc(pk, 5).value != enc(pk, 5).value

    def test_seeded_randomness_replays(self, protocol_keypair):
        pk = protocol_keypair.public_key
        assert enc(pk, 5, AheRandomness(1)) == enc(pk, 5, AheRandomness(1))

    def test_plaintext_range(self, protocol_keypair):
        pk = protocol_keypair.public_key
        with pytest.raises(RangeError):
            enc(pk, -1)
        with pytest.raises(RangeError):
            enc(pk, pk.n)

    def test_decrypt_needs_private_key(self, protocol_keypair):
        c = enc(protocol_keypair.public_key, 1)
        with pytest.raises(UsageError):
            dec(protocol_keypair.public_only(), c)

    def test_foreign_ciphertext_rejected(self, protocol_keypair, pir_keypair):
        with pytest.raises(UsageError):
            c_add(enc(protocol_keypair.public_key, 1), enc(pir_keypair.public_key, 1))

    def test_ring_lift_and_lower(self):
        assert lift(-1) == 2**64 - 1
        assert lower(2**64 + 7) == 7


class TestSerialisation:

    def test_ciphertext_width_is_fixed(self, protocol_keypair):
        pk = protocol_keypair.public_key
        blob = serialize_ciphertext(enc(pk, 1))
        assert len(blob) == ciphertext_size(pk) == 4 + 512
        assert dec(protocol_keypair, deserialize_ciphertext(pk, blob)) == 1

    def test_truncated_ciphertext_rejected(self, protocol_keypair):
        pk = protocol_keypair.public_key
        with pytest.raises(ProtocolError):
            deserialize_ciphertext(pk, serialize_ciphertext(enc(pk, 1))[:-1])

    def test_public_key_round_trip(self, protocol_keypair):
        restored = deserialize_public_key(serialize_public_key(protocol_keypair.public_key))
        assert restored.n == protocol_keypair.n

    def test_key_file(self, tmp_path, protocol_keypair):
        save_keypair(tmp_path / "key.json", protocol_keypair)
        loaded = load_keypair(tmp_path / "key.json")
        assert loaded.n == protocol_keypair.n
        assert dec(loaded, enc(loaded.public_key, 99)) == 99

    def test_public_only_key_file(self, tmp_path, protocol_keypair):
        save_keypair(tmp_path / "pub.json", protocol_keypair, include_private=False)
        assert load_keypair(tmp_path / "pub.json").private_key is None

    def test_malformed_key_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"bits": 2048}')
        with pytest.raises(ParseError):
            load_keypair(path)


class TestProvider:

    def test_provider_round_trip(self, pir_keypair):
        provider = PaillierProvider(keypair=pir_keypair, seed=2)
        assert provider.ciphertext_size == 516
        assert [provider.decrypt(c) for c in provider.encrypt_many([0, 1, 2])] == [0, 1, 2]
