import os
import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

from .errors import ConfigError

logger = logging.getLogger("sadic-builder")

DEFAULT_CONFIG_NAME = "config.json"


@dataclass
class PipelineConfig:
    """Construction parameters."""
    scan_limit: int = 1_000_000
    telescope_horizon: int = 64  # original levels searched per telescoping window
    depth: int = 4


@dataclass
class VerificationConfig:
    """Brute-force verification parameters."""
    horizon: int = 1000  # N: p(n) is computed for n <= N
    recognizability_window: int = 4
    random_samples: int = 8
    random_length: int = 8
    seed: int = 0
    max_hole_density: str = "1/4"

    @property
    def hole_density(self) -> Fraction:
        return Fraction(self.max_hole_density)


@dataclass
class OutputConfig:
    max_explicit_image: int = 4096  # longer images are written as runs


@dataclass
class SadicConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    verification: VerificationConfig = field(default_factory=VerificationConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    log_level: Optional[str] = None


def _positive_int(section: str, key: str, value: Any, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{section}.{key} must be at least {minimum}, got {value}")
    return value


def _hole_density(value: Any) -> str:
    try:
        density = Fraction(str(value))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"verification.max_hole_density is not a fraction: {value!r}") from e
    if not 0 <= density < 1:
        raise ConfigError(f"verification.max_hole_density must lie in [0, 1), got {value}")
    return str(density)


# Minimum accepted value per integer key.
_SECTIONS = {
    "pipeline": {"scan_limit": 1, "telescope_horizon": 1, "depth": 1},
    "verification": {"horizon": 1, "recognizability_window": 1, "random_samples": 0, "random_length": 1, "seed": 0},
    "output": {"max_explicit_image": 1},
}


class ConfigLoader:
    """Load and manage configuration."""

    @staticmethod
    def default_path() -> str:
        return os.environ.get("SADIC_CONFIG") or os.path.join(os.getcwd(), DEFAULT_CONFIG_NAME)

    @staticmethod
    def load_config(config_path: str = None) -> SadicConfig:
        """Load settings from JSON, then apply environment overrides.

        Missing files give the defaults; invalid entries are logged and skipped.
        """
        if not config_path:
            config_path = ConfigLoader.default_path()

        config = SadicConfig()
        if not os.path.exists(config_path):
            logger.debug(f"No config file at {config_path}; using defaults")
        else:
            try:
                with open(config_path, "r") as f:
                    config_data = json.load(f)
                if not isinstance(config_data, dict):
                    raise ConfigError("top level must be a JSON object")
                ConfigLoader._apply(config, config_data)
            except (OSError, json.JSONDecodeError, ConfigError) as e:
                logger.error(f"Error loading config from {config_path}: {str(e)}")

        ConfigLoader._apply_environment(config)
        return config

    @staticmethod
    def _apply(config: SadicConfig, config_data: Dict[str, Any]):
        for section, minimums in _SECTIONS.items():
            values = config_data.get(section, {})
            if not isinstance(values, dict):
                logger.error(f"Config section '{section}' must be an object")
                continue
            target = getattr(config, section)
            for key, value in values.items():
                try:
                    if key in minimums:
                        value = _positive_int(section, key, value, minimums[key])
                    elif section == "verification" and key == "max_hole_density":
                        value = _hole_density(value)
                    else:
                        logger.warning(f"Unknown config key '{section}.{key}' ignored")
                        continue
                except ConfigError as e:
                    logger.error(f"{str(e)}; keeping {getattr(target, key)}")
                    continue
                setattr(target, key, value)
        if "log_level" in config_data:
            config.log_level = str(config_data["log_level"]).upper()

    @staticmethod
    def _apply_environment(config: SadicConfig):
        overrides = {
            "SADIC_SCAN_LIMIT": (config.pipeline, "scan_limit", 1),
            "SADIC_SEED": (config.verification, "seed", 0),
        }
        for name, (target, key, minimum) in overrides.items():
            raw = os.environ.get(name)
            if raw is None:
                continue
            try:
                value = _positive_int("env", name, int(raw), minimum)
            except (ValueError, ConfigError) as e:
                logger.error(f"Ignoring {name}={raw!r}: {str(e)}")
                continue
            setattr(target, key, value)
        if os.environ.get("SADIC_LOG_LEVEL"):
            config.log_level = os.environ["SADIC_LOG_LEVEL"].upper()

    @staticmethod
    def save_config(config: SadicConfig, config_path: str = None) -> bool:
        """Write the settings as JSON; returns False on I/O errors."""
        if not config_path:
            config_path = os.path.join(os.getcwd(), DEFAULT_CONFIG_NAME)
        data = {
            "pipeline": asdict(config.pipeline),
            "verification": asdict(config.verification),
            "output": asdict(config.output),
        }
        if config.log_level:
            data["log_level"] = config.log_level
        try:
            with open(config_path, "w") as f:
                json.dump(data, f, indent=2)
            logger.info(f"Saved config file at {config_path}")
            return True
        except OSError as e:
            logger.error(f"Failed to write config file: {str(e)}")
            return False
