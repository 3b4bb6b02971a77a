# File: s3rec/src/providers/pir/plain_backend.py
import logging
import struct

from ...core.interfaces.pir_backend import PirBackend
from ...utils.error_handling import ProtocolError, RangeError
from .database import PLAIN_TAG, PirClientState, PirDatabase, PirQuery, PirResponse

_INDEX = struct.Struct("<Q")


class PlainPirBackend(PirBackend):
    """Index-in-the-clear PIR

    INSECURE: the server sees the requested index. Used for functional tests
    and as the communication lower bound.
    """

    def __init__(self):
        self.logger = logging.getLogger("s3rec.pir.plain")

    @property
    def name(self) -> str:
        return "plain"

    @property
    def tag(self) -> int:
        return PLAIN_TAG

    def new_client(self, count: int, entry_size: int) -> PirClientState:
        return PirClientState(count, entry_size)

    def query(self, state: PirClientState, index: int) -> PirQuery:
        if not 0 <= index < state.count:
            raise RangeError(f"PIR index {index} outside [0, {state.count})")
        state.index = index
        return PirQuery(self.tag, _INDEX.pack(index))

    def response(self, db: PirDatabase, query: PirQuery) -> PirResponse:
        if query.tag != self.tag or len(query.payload) != _INDEX.size:
            raise ProtocolError("Malformed plain PIR query")
        (index,) = _INDEX.unpack(query.payload)
        if index >= db.count:
            raise ProtocolError(f"Plain PIR query for index {index} beyond database of {db.count}")
        return PirResponse(self.tag, db[index])

    def extract(self, state: PirClientState, response: PirResponse) -> bytes:
        if response.tag != self.tag or len(response.payload) != state.entry_size:
            raise ProtocolError("Plain PIR response does not match the outstanding query")
        return response.payload

    def query_size(self, count: int, entry_size: int) -> int:
        return 1 + _INDEX.size

    def response_size(self, count: int, entry_size: int) -> int:
        return 1 + entry_size
