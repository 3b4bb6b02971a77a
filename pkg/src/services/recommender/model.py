# File: s3rec/src/services/recommender/model.py
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from ...utils.error_handling import ParseError, ShapeError


@dataclass
class LatentModel:
    """User factors U (k x m) and item factors V (k x n)"""
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        if self.U.ndim != 2 or self.V.ndim != 2 or self.U.shape[0] != self.V.shape[0]:
            raise ShapeError(f"U {self.U.shape} and V {self.V.shape} must share the latent dimension")

    @property
    def k(self) -> int:
        return int(self.U.shape[0])

    @property
    def m(self) -> int:
        return int(self.U.shape[1])

    @property
    def n(self) -> int:
        return int(self.V.shape[1])

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.V)))

    def predict(self, users, items) -> np.ndarray:
        """Unclamped u_i . v_j for parallel index arrays"""
        return np.einsum("ki,ki->i", self.U[:, users], self.V[:, items])

    def copy(self) -> "LatentModel":
        return LatentModel(self.U.copy(), self.V.copy())

    def save(self, path: Union[str, Path]) -> None:
        """``.npz`` with U and V"""
        np.savez(path, U=self.U, V=self.V)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LatentModel":
        try:
            with np.load(path) as archive:
                return cls(archive["U"], archive["V"])
        except (OSError, KeyError, ValueError) as exc:
            raise ParseError(f"Cannot read model file: {exc}", path=str(path)) from exc


def init_model(k: int, m: int, n: int, seed: int) -> LatentModel:
    """Entries i.i.d. uniform in [0, 1/sqrt(k)), U drawn before V"""
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(k)
    U = rng.uniform(0.0, bound, size=(k, m))
    V = rng.uniform(0.0, bound, size=(k, n))
    return LatentModel(U, V)


class EpochMetrics(BaseModel):
    """One training epoch, streamed as a JSON line"""
    epoch: int
    mode: str
    objective: float
    train_rmse: float
    test_rmse: Optional[float] = None
    social_deviation: Optional[float] = None
    payload_bytes: Dict[str, int] = Field(default_factory=dict)
    bytes_received: int = 0

    def as_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True)
