import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .core.errors import ConfigError
from .data.database import StoreMode
from .data.values import Mode

log = logging.getLogger(__name__)

DEFAULT_CONFIG = Path(__file__).parent / 'config' / 'config.default.yaml'


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class MigrationSettings(_Section):
    mode: Mode = Mode.STRICT
    store: StoreMode = StoreMode.AGGREGATE


class TargetEntry(_Section):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    module: str
    class_name: str = Field(alias='class')
    params: Dict[str, Any] = Field(default_factory=dict)


class CodegenSettings(_Section):
    mig_dir: str = './_mig/'
    stack: bool = True
    targets: Dict[str, TargetEntry] = Field(default_factory=dict)


class PropcheckSettings(_Section):
    seed: int = 0
    cases: int = Field(200, ge=1)
    max_types: int = Field(4, ge=1)
    max_variations: int = Field(3, ge=1)
    max_features: int = Field(6, ge=1)
    workers: int = Field(1, ge=1)


class Settings(_Section):
    log_level: str = 'INFO'
    migration: MigrationSettings = Field(default_factory=MigrationSettings)
    codegen: CodegenSettings = Field(default_factory=CodegenSettings)
    propcheck: PropcheckSettings = Field(default_factory=PropcheckSettings)

    def targets(self) -> Dict[str, Dict[str, Any]]:
        """Registry entries in the ``{module, class, params}`` shape."""
        out = {}
        for name, entry in self.codegen.targets.items():
            params = {'mig_dir': self.codegen.mig_dir, **entry.params}
            out[name] = {'module': entry.module, 'class': entry.class_name, 'params': params}
        return out


def config_path(path: Optional[os.PathLike] = None) -> Path:
    return Path(path or os.getenv('SCHEMAHUB_CONFIG') or DEFAULT_CONFIG)


def load_settings(path: Optional[os.PathLike] = None) -> Settings:
    cfg_path = config_path(path)
    try:
        raw = yaml.safe_load(cfg_path.read_text(encoding='utf-8')) or {}
    except OSError as e:
        raise ConfigError(f"cannot read configuration {cfg_path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"configuration {cfg_path} is not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"configuration {cfg_path} must be a mapping")
    try:
        settings = Settings.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration {cfg_path}: {e}") from e
    log.debug("loaded configuration from %s", cfg_path)
    return settings
