# File: s3rec/src/core/interfaces/pir_backend.py
from abc import ABC, abstractmethod


class PirBackend(ABC):
    """Interface for single-server PIR schemes (Query / Response / Extract)"""

    @property
    @abstractmethod
    def name(self) -> str:
        """Backend identifier used in configuration"""
        pass

    @property
    @abstractmethod
    def tag(self) -> int:
        """First payload byte of every query and response of this backend"""
        pass

    @abstractmethod
    def new_client(self, count: int, entry_size: int) -> "PirClientState":
        """Create client state for a database with public ``count`` and ``entry_size``"""
        pass

    @abstractmethod
    def query(self, state: "PirClientState", index: int) -> "PirQuery":
        """Build the query for ``index``

        Raises:
            RangeError: If ``index`` is not below the database count
        """
        pass

    @abstractmethod
    def response(self, db: "PirDatabase", query: "PirQuery") -> "PirResponse":
        """Answer a query against the server's database

        Raises:
            ProtocolError: If the query is malformed for this backend
        """
        pass

    @abstractmethod
    def extract(self, state: "PirClientState", response: "PirResponse") -> bytes:
        """Recover the requested entry from a response"""
        pass

    @abstractmethod
    def query_size(self, count: int, entry_size: int) -> int:
        """Serialized query size in bytes (tag included)"""
        pass

    @abstractmethod
    def response_size(self, count: int, entry_size: int) -> int:
        """Serialized response size in bytes (tag included)"""
        pass
