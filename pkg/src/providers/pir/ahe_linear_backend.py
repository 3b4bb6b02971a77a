# File: s3rec/src/providers/pir/ahe_linear_backend.py
import logging
from typing import List

from phe.util import powmod

from ...core.interfaces.pir_backend import PirBackend
from ...utils.error_handling import ProtocolError, RangeError
from ..ahe.paillier_provider import (
    AheCiphertext,
    AheKeyPair,
    PaillierProvider,
    ciphertext_size,
    deserialize_ciphertexts,
    serialize_ciphertexts,
)
from .database import AHE_LINEAR_TAG, PirClientState, PirDatabase, PirQuery, PirResponse


class AheLinearPirBackend(PirBackend):
    """PIR from additively homomorphic encryption with linear query size

    The query is an encrypted indicator vector e_i under the client's own
    key. The server splits every entry into plaintext-sized chunks and, per
    chunk position, returns the homomorphic dot product of the query with
    that column of chunks.
    """

    def __init__(self, provider: PaillierProvider):
        """Initialize the backend

        Args:
            provider: Client-side Paillier provider; its key must differ from
                any key used to produce the database blobs
        """
        self.provider = provider
        self.logger = logging.getLogger("s3rec.pir.ahe_linear")

    @property
    def name(self) -> str:
        return "ahe-linear"

    @property
    def tag(self) -> int:
        return AHE_LINEAR_TAG

    @property
    def keypair(self) -> AheKeyPair:
        return self.provider.keypair

    @property
    def chunk_bytes(self) -> int:
        """Largest whole byte count guaranteed below n"""
        return (self.keypair.n.bit_length() + 7) // 8 - 1

    def chunk_count(self, entry_size: int) -> int:
        return max(1, -(-entry_size // self.chunk_bytes))

    def _chunks(self, blob: bytes) -> List[int]:
        width = self.chunk_bytes
        padded = blob.ljust(self.chunk_count(len(blob)) * width, b"\x00")
        return [int.from_bytes(padded[i:i + width], "big") for i in range(0, len(padded), width)]

    def new_client(self, count: int, entry_size: int) -> PirClientState:
        return PirClientState(count, entry_size)

    def query(self, state: PirClientState, index: int) -> PirQuery:
        if not 0 <= index < state.count:
            raise RangeError(f"PIR index {index} outside [0, {state.count})")
        state.index = index
        indicator = [1 if a == index else 0 for a in range(state.count)]
        return PirQuery(self.tag, serialize_ciphertexts(self.provider.encrypt_many(indicator)))

    def response(self, db: PirDatabase, query: PirQuery) -> PirResponse:
        if query.tag != self.tag:
            raise ProtocolError("Query was not produced by the ahe-linear backend")
        public_key = self.keypair.public_key
        selectors = deserialize_ciphertexts(public_key, query.payload)
        if len(selectors) != db.count:
            raise ProtocolError(f"Query carries {len(selectors)} selectors for a database of {db.count}")
        nsquare = public_key.nsquare
        chunk_table = [self._chunks(entry) for entry in db.entries]
        answers = []
        for position in range(self.chunk_count(db.entry_size)):
            accumulator = 1
            for selector, chunks in zip(selectors, chunk_table):
                if chunks[position]:
                    accumulator = (accumulator * powmod(selector.value, chunks[position], nsquare)) % nsquare
            answers.append(AheCiphertext(accumulator, public_key))
        self.logger.debug(f"Answered ahe-linear query over {db.count} entries, {len(answers)} chunks")
        return PirResponse(self.tag, serialize_ciphertexts(answers))

    def extract(self, state: PirClientState, response: PirResponse) -> bytes:
        if response.tag != self.tag:
            raise ProtocolError("Response was not produced by the ahe-linear backend")
        chunks = self.chunk_count(state.entry_size)
        try:
            answers = deserialize_ciphertexts(self.keypair.public_key, response.payload, count=chunks)
        except ProtocolError as exc:
            raise ProtocolError(f"ahe-linear response does not match the outstanding query: {exc.message}") from exc
        blob = b"".join(self.provider.decrypt(answer).to_bytes(self.chunk_bytes, "big") for answer in answers)
        return blob[:state.entry_size]

    def query_size(self, count: int, entry_size: int) -> int:
        return 1 + count * ciphertext_size(self.keypair.public_key)

    def response_size(self, count: int, entry_size: int) -> int:
        return 1 + self.chunk_count(entry_size) * ciphertext_size(self.keypair.public_key)
