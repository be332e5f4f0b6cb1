import json
import os
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ValidationError

from ..errors import ConfigError
from ..logs.core.logger_config import get_component_logger
from .run_config import COMMANDS, RunConfig


class ConfigManager:
    """Loads, validates and saves JSON run configurations."""

    def __init__(self, config_path: Optional[str] = None):
        self.config: Dict = {}
        self.default_path = os.path.join(os.path.dirname(__file__), 'defaults.json')
        self.config_path = config_path or self.default_path
        self.logger = get_component_logger('helmgrid.config')

    def load_config(self, path: Optional[str] = None) -> Dict:
        """
        Read the JSON document at ``path`` (or the configured path).

        Missing files and invalid JSON raise ConfigError.
        """
        path = path or self.config_path
        try:
            with open(path, 'r') as file:
                self.config = json.load(file)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file {path} does not exist") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(self.config, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        self.config_path = path
        self.logger.info(f"Loaded config from {path}")
        return self.config

    def validate_config(self, config: Dict) -> Tuple[bool, List[str]]:
        """(is_valid, errors); errors read 'section.field: message'."""
        if not isinstance(config, dict):
            return False, ["the config is not a JSON object"]
        try:
            RunConfig.model_validate(config)
        except ValidationError as exc:
            errors = []
            for error in exc.errors():
                location = '.'.join(str(part) for part in error['loc']) or '<root>'
                errors.append(f"{location}: {error['msg']}")
            return False, errors
        return True, []

    def parse(self, config: Optional[Dict] = None) -> RunConfig:
        """Validated RunConfig; raises ConfigError listing every problem."""
        config = self.config if config is None else config
        is_valid, errors = self.validate_config(config)
        if not is_valid:
            raise ConfigError("invalid run configuration", errors)
        return RunConfig.model_validate(config)

    def get_command_config(self, config: Dict, command: str) -> BaseModel:
        if command not in COMMANDS:
            raise ConfigError(f"unknown command '{command}'", [f"choose one of {', '.join(COMMANDS)}"])
        return getattr(self.parse(config), command)

    def save_config(self, config, path: Optional[str] = None) -> str:
        """Write a dict or RunConfig as 4-space indented JSON with sorted keys."""
        path = path or self.config_path
        if isinstance(config, BaseModel):
            config = config.model_dump(mode='json')
        with open(path, 'w') as file:
            json.dump(config, file, indent=4, sort_keys=True)
            file.write('\n')
        self.logger.info(f"Saved config to {path}")
        return path
