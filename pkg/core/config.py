#!/usr/bin/env python3
"""
Configuration Manager for cechtool

Handles loading and saving of budgets, seeds and report settings, with
environment-variable overrides for the budgets.
"""

import copy
import os
import json
import logging
from contextlib import contextmanager
from typing import Dict, Any, Iterator, Optional

from .errors import FormatError

logger = logging.getLogger(__name__)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Environment variables that override a configuration key on every read.
ENV_OVERRIDES = {
    "budgets.enumeration": "CECHTOOL_BUDGET",
    "budgets.subdivision": "CECHTOOL_SUBDIVISION_BUDGET",
    "budgets.ml_cap": "CECHTOOL_ML_CAP",
    "budgets.faces": "CECHTOOL_FACE_BUDGET",
    "random.seed": "CECHTOOL_SEED",
}


class ConfigManager:
    """Manages toolkit configuration settings."""

    def __init__(self, config_dir: Optional[str] = None):
        """Initialize the configuration manager.

        Args:
            config_dir: Directory holding config.json. If None, uses the
                platform configuration location. Nothing is created until
                save() is called.
        """
        self._defaults = {
            "budgets": {
                "enumeration": 1_000_000,
                "subdivision": 3,
                "ml_cap": 64,
                "faces": 200_000,
            },
            "random": {
                "seed": 20240601,
            },
            "reports": {
                "format_version": "report v1",
            },
            "corpus": {
                "directory": os.path.join(REPO_ROOT, "corpus"),
            },
        }

        if config_dir is None:
            if os.name == 'nt':  # Windows
                app_data = os.environ.get('APPDATA', os.path.expanduser('~'))
                self.config_dir = os.path.join(app_data, 'cechtool')
            else:
                config_home = os.environ.get('XDG_CONFIG_HOME', os.path.expanduser('~/.config'))
                self.config_dir = os.path.join(config_home, 'cechtool')
        else:
            self.config_dir = config_dir

        self.config_file = os.path.join(self.config_dir, 'config.json')
        self.config = self._load_config()
        self._pinned: Dict[str, Any] = {}

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file, falling back to the defaults."""
        if os.path.exists(self.config_file):
            try:
                with open(self.config_file, 'r') as f:
                    loaded_config = json.load(f)
                logger.debug(f"Loaded configuration from {self.config_file}")
                return self._merge_configs(self._defaults, loaded_config)
            except (json.JSONDecodeError, IOError) as e:
                logger.warning(f"Error loading config file: {e}. Using default configuration.")
        return copy.deepcopy(self._defaults)

    def _merge_configs(self, default: Dict[str, Any], loaded: Dict[str, Any]) -> Dict[str, Any]:
        """Recursively merge loaded config with defaults."""
        result = copy.deepcopy(default)
        for key, value in loaded.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value
        return result

    def save(self) -> bool:
        """Save configuration to file."""
        try:
            os.makedirs(os.path.dirname(self.config_file), exist_ok=True)
            with open(self.config_file, 'w') as f:
                json.dump(self.config, f, indent=4, sort_keys=True)
            return True
        except (IOError, OSError) as e:
            logger.error(f"Error saving config file: {e}")
            return False

    def _env_override(self, key_path: str) -> Optional[int]:
        variable = ENV_OVERRIDES.get(key_path)
        if variable is None or variable not in os.environ:
            return None
        raw = os.environ[variable]
        try:
            value = int(raw)
        except ValueError:
            logger.warning(f"Ignoring {variable}={raw!r}: not an integer")
            return None
        if value < 0:
            logger.warning(f"Ignoring {variable}={raw!r}: negative")
            return None
        return value

    def get(self, key_path: str, default: Any = None) -> Any:
        """Get a configuration value by dot notation path."""
        if key_path in self._pinned:
            return self._pinned[key_path]
        override = self._env_override(key_path)
        if override is not None:
            return override

        value = self.config
        try:
            for key in key_path.split('.'):
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key_path: str, value: Any, save: bool = True) -> bool:
        """Set a configuration value by dot notation path."""
        keys = key_path.split('.')
        config = self.config

        for key in keys[:-1]:
            if key not in config or not isinstance(config[key], dict):
                config[key] = {}
            config = config[key]
        config[keys[-1]] = value

        if save:
            return self.save()
        return True

    def load_file(self, path: str) -> None:
        """Merge a JSON configuration file over the current settings."""
        try:
            with open(path, 'r') as f:
                loaded = json.load(f)
        except (json.JSONDecodeError, IOError, UnicodeDecodeError) as e:
            raise FormatError(f"cannot load configuration: {e}", None, path) from e
        if not isinstance(loaded, dict):
            raise FormatError("configuration must be a JSON object", None, path)
        self.config = self._merge_configs(self.config, loaded)
        logger.debug(f"Merged configuration from {path}")

    def reset(self) -> None:
        """Drop in-memory changes and return to the defaults."""
        self.config = copy.deepcopy(self._defaults)
        self._pinned = {}

    @contextmanager
    def overridden(self, values: Dict[str, Any]) -> Iterator[None]:
        """Pin keys above the file and environment settings inside a block.

        None values are skipped, so unset command-line flags leave the key alone.
        """
        saved = dict(self._pinned)
        self._pinned.update({k: v for k, v in values.items() if v is not None})
        try:
            yield
        finally:
            self._pinned = saved

    def enumeration_budget(self) -> int:
        return int(self.get('budgets.enumeration', 1_000_000))

    def subdivision_budget(self) -> int:
        return int(self.get('budgets.subdivision', 3))

    def ml_cap(self) -> int:
        return int(self.get('budgets.ml_cap', 64))

    def face_budget(self) -> int:
        return int(self.get('budgets.faces', 200_000))

    def seed(self) -> int:
        return int(self.get('random.seed', 20240601))


# Global configuration instance
config = ConfigManager()


def get_config() -> ConfigManager:
    """Get the global configuration instance."""
    return config
