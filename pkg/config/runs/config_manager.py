# File: s3rec/config/runs/config_manager.py
import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from src.core.config import RunConfig, build_config
from src.utils.error_handling import ConfigError, ParseError

ENV_PREFIX = "S3REC_"
NONE_VALUES = ("", "none", "null")


class ConfigManager:
    """Resolves the effective RunConfig from presets, files, env and flags"""

    def __init__(self, config_dir: str = None):
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).resolve().parent
        self.logger = logging.getLogger("s3rec.config")

    def presets(self) -> Dict[str, Path]:
        """Available preset files keyed by name"""
        if not self.config_dir.exists():
            self.logger.warning(f"Config directory not found: {self.config_dir}")
            return {}
        return {path.stem: path for path in sorted(self.config_dir.glob("*.conf"))}

    def load_file(self, path) -> Dict[str, str]:
        """Parse a ``key = value`` file

        Args:
            path: Config file path

        Returns:
            Raw string values keyed by name

        Raises:
            ParseError: For unreadable files or lines without ``=``
        """
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"Cannot read config file: {exc}", path=str(path)) from exc
        values: Dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"Expected 'key = value', got '{raw.strip()}'", line=number, path=str(path))
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ParseError("Empty key", line=number, path=str(path))
            values[key] = value
        self.logger.debug(f"Loaded {len(values)} keys from {path}")
        return values

    def load_preset(self, name: str) -> Dict[str, str]:
        presets = self.presets()
        if name not in presets:
            raise ConfigError(f"Unknown preset '{name}', expected one of {sorted(presets)}")
        return self.load_file(presets[name])

    def env_overrides(self, environ: Mapping[str, str] = None) -> Dict[str, str]:
        """Values of ``S3REC_<FIELD>`` variables for known RunConfig fields"""
        environ = os.environ if environ is None else environ
        values = {}
        for name in RunConfig.model_fields:
            key = f"{ENV_PREFIX}{name.upper()}"
            if key in environ:
                values[name] = environ[key]
        return values

    def resolve(self, preset: Optional[str] = None, config_path: Optional[str] = None,
                overrides: Optional[Dict[str, Any]] = None,
                environ: Mapping[str, str] = None) -> RunConfig:
        """Effective config: defaults < preset < config file < env < flags

        Raises:
            ConfigError: For unknown keys or invalid values
        """
        values: Dict[str, Any] = {}
        if preset:
            values.update(self.load_preset(preset))
        if config_path:
            values.update(self.load_file(config_path))
        values.update(self.env_overrides(environ))
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})
        for key, value in list(values.items()):
            if isinstance(value, str) and value.strip().lower() in NONE_VALUES:
                values[key] = None
        config = build_config(RunConfig, values)
        self.logger.info(f"Resolved config (preset={preset}, file={config_path}, {len(values)} explicit keys)")
        return config

    @staticmethod
    def echo(config: RunConfig) -> str:
        """Config block embedded as ``#`` comment lines in output artifacts"""
        return "\n".join(f"# {line}" for line in config.as_lines().splitlines())
