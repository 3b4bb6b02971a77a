# File: s3rec/src/core/config.py
"""
Run configuration models.

``RunConfig`` is the flat ``key = value`` surface shared by every CLI
subcommand; ``TrainConfig`` is the subset the trainers consume.
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, ValidationError as PydanticValidationError, field_validator

from ..utils.error_handling import ConfigError

TRAIN_MODES = ("mf", "soreg", "s3rec")
SENSITIVE_MODES = ("pir", "full-transfer")
TRANSPORTS = ("inproc", "tcp")
PIR_BACKEND_NAMES = ("plain", "ahe-linear")
AHE_KEY_BITS = (2048, 3072)


class TrainConfig(BaseModel):
    """Hyper-parameters of one training run"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    k: int = 10
    lam: float = 0.1
    gamma: float = 0.1
    theta: float = 0.001
    epochs: int = 10
    frac_bits: int = 20
    seed: int = 0
    mode: str = "soreg"
    sensitive_mode: str = "pir"

    @field_validator("k", "epochs")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("lam", "gamma")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    @field_validator("theta")
    @classmethod
    def _learning_rate(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("frac_bits")
    @classmethod
    def _frac_bits(cls, value: int) -> int:
        if not 1 <= value <= 30:
            raise ValueError("must be in [1, 30]")
        return value

    @field_validator("mode")
    @classmethod
    def _mode(cls, value: str) -> str:
        if value not in TRAIN_MODES:
            raise ValueError(f"must be one of {TRAIN_MODES}")
        return value

    @field_validator("sensitive_mode")
    @classmethod
    def _sensitive_mode(cls, value: str) -> str:
        if value not in SENSITIVE_MODES:
            raise ValueError(f"must be one of {SENSITIVE_MODES}")
        return value

    def check_for_items(self, n: int) -> None:
        """Enforce T < n for secure training

        Each epoch reveals one social-term matrix to P0; with n or more of
        them P0 could solve for the social data.

        Raises:
            ConfigError: If mode is s3rec and epochs >= n
        """
        if self.mode == "s3rec" and self.epochs >= n:
            raise ConfigError(
                f"Secure training needs epochs < n items ({self.epochs} >= {n})",
                details={"epochs": self.epochs, "n": n}
            )


class RunConfig(TrainConfig):
    """Effective configuration of one CLI run"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    # transport
    transport: str = "inproc"
    host: str = "127.0.0.1"
    port: int = 9450
    latency_ms: float = 0.0
    deterministic: bool = False
    # cryptography
    ahe_bits: int = 2048
    pir_backend: str = "ahe-linear"
    pir_depth: int = 1
    query_pad_density: Optional[float] = None
    # data
    ratings_path: Optional[str] = None
    social_path: Optional[str] = None
    min_interactions: int = 15
    folds: int = 5
    fold: int = 0
    # synthetic data
    m: int = 20
    n: int = 30
    k_true: int = 4
    alpha_social: float = 0.1
    noise_sd: float = 0.1
    rating_density: float = 0.2
    communities: int = 4
    # outputs
    out_dir: str = "out"

    @field_validator("transport")
    @classmethod
    def _transport(cls, value: str) -> str:
        if value not in TRANSPORTS:
            raise ValueError(f"must be one of {TRANSPORTS}")
        return value

    @field_validator("ahe_bits")
    @classmethod
    def _ahe_bits(cls, value: int) -> int:
        if value not in AHE_KEY_BITS:
            raise ValueError(f"must be one of {AHE_KEY_BITS}")
        return value

    @field_validator("pir_backend")
    @classmethod
    def _pir_backend(cls, value: str) -> str:
        if value not in PIR_BACKEND_NAMES:
            raise ValueError(f"must be one of {PIR_BACKEND_NAMES}")
        return value

    @field_validator("query_pad_density")
    @classmethod
    def _pad_density(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0 < value <= 1:
            raise ValueError("must be in (0, 1]")
        return value

    @field_validator("alpha_social", "rating_density")
    @classmethod
    def _fraction(cls, value: float) -> float:
        if not 0 < value <= 1:
            raise ValueError("must be in (0, 1]")
        return value

    @field_validator("m", "n", "k_true", "folds", "communities", "pir_depth", "port")
    @classmethod
    def _counts(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("min_interactions", "fold")
    @classmethod
    def _non_negative_int(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    @field_validator("noise_sd", "latency_ms")
    @classmethod
    def _non_negative_real(cls, value: float) -> float:
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    def train_config(self) -> TrainConfig:
        """The trainer-facing subset of this configuration"""
        return TrainConfig(**{name: getattr(self, name) for name in TrainConfig.model_fields})

    def as_lines(self) -> str:
        """Sorted ``key = value`` block (None values rendered as ``none``)"""
        values = self.model_dump()
        return "\n".join(
            f"{key} = {'none' if values[key] is None else values[key]}" for key in sorted(values)
        )


def build_config(model: type, values: Dict[str, Any]):
    """Validate ``values`` into ``model``, mapping pydantic failures to ConfigError"""
    try:
        return model(**values)
    except PydanticValidationError as exc:
        problems = [
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        ]
        raise ConfigError(f"Invalid configuration: {'; '.join(problems)}", details={"errors": problems}) from exc
