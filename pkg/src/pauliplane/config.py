"""Run configuration: YAML files with one mapping per command, overridden by command line flags."""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple

import yaml

from .enums import FamilyId, ModelKind
from .failures import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


def _family(value: Any) -> Optional[str]:
    if value is None:
        return None
    try:
        return FamilyId.from_string(str(value)).value
    except ValueError as e:
        raise ConfigError(str(e))


def _model(value: Any) -> str:
    try:
        return ModelKind(str(value)).value
    except ValueError:
        raise ConfigError("Unknown model %s, expected one of %s" % (value, ", ".join(m.value for m in ModelKind)))


def _optional(cast: Callable) -> Callable:
    return lambda value: None if value is None else cast(value)


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("1", "true", "yes", "on"):
        return True
    if str(value).lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError("Cannot read %r as a boolean" % value)


SECTIONS: Dict[str, Dict[str, Tuple[Callable, Any]]] = {
    "verify-catalog": {
        "family": (_family, None),
        "mu": (float, 1.0),
        "nu": (float, 0.5),
        "k": (float, 1.0),
        "delta": (int, 1),
        "c": (float, 1.0),
        "samples": (int, 200),
        "seed": (int, 0),
        "tolerance": (float, 1e-8),
        "probes": (int, 20),
        "mutation_controls": (_boolean, True),
        "output": (_optional(str), None),
        "database": (_optional(str), None),
        "quiet": (_boolean, False),
    },
    "spectrum": {
        "model": (_model, None),
        "alpha": (float, 2.0),
        "k": (float, 0.5),
        "mu": (float, 1.0),
        "eps": (int, 1),
        "levels": (int, 3),
        "rmax": (float, 60.0),
        "n": (_optional(int), None),
        "nu": (float, 0.0),
        "nmax": (int, 3),
        "omega": (float, 1.0),
        "cutoff": (int, 64),
        "kappa": (float, -3.0),
        "p": (float, -1.0),
        "lambda": (float, 1.0),
        "tolerance": (_optional(float), None),
        "output": (_optional(str), None),
        "convergence_log": (_optional(str), None),
        "bands": (_optional(str), None),
        "json": (_optional(str), None),
        "quiet": (_boolean, False),
    },
    "report": {
        "input": (_optional(str), None),
        "database": (_optional(str), None),
        "output": (_optional(str), None),
        "quiet": (_boolean, False),
    },
}
"""Accepted keys per command with their converter and default."""


def _normalize(key: str) -> str:
    return key.replace("-", "_")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """
    The fully resolved configuration of one command.

    :ivar command: The command the configuration belongs to.
    :ivar values: Every key of the command's section, defaults filled in.
    :ivar source: The configuration file, if any.
    """
    command: str
    values: Dict[str, Any]
    source: Optional[str] = None

    def __getitem__(self, key: str) -> Any:
        return self.values[_normalize(key)]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(_normalize(key), default)

    def to_json(self) -> Dict:
        return {"command": self.command, "values": dict(sorted(self.values.items()))}


def _convert(command: str, key: str, value: Any) -> Any:
    section = SECTIONS[command]
    if key not in section:
        raise ConfigError("Unknown key '%s' for command %s" % (key, command))
    converter, _ = section[key]
    try:
        return converter(value)
    except (TypeError, ValueError):
        raise ConfigError("Invalid value %r for key '%s' of command %s" % (value, key, command))


def load_file(path: str) -> Dict[str, Dict[str, Any]]:
    """
    Read a YAML configuration file.

    :raises ConfigError: If the file is missing, malformed or contains unknown sections or keys.
    """
    if not os.path.isfile(path):
        raise ConfigError("Configuration file %s does not exist" % path)
    with open(path, encoding="utf-8") as stream:
        try:
            content = yaml.safe_load(stream) or {}
        except yaml.YAMLError as e:
            raise ConfigError("Configuration file %s is not valid YAML: %s" % (path, e))
    if not isinstance(content, dict):
        raise ConfigError("Configuration file %s must contain a mapping of commands" % path)
    result = {}
    for command, section in content.items():
        if command not in SECTIONS:
            raise ConfigError("Unknown section '%s' in %s" % (command, path))
        if not isinstance(section, dict):
            raise ConfigError("Section '%s' in %s must be a mapping" % (command, path))
        result[command] = {_normalize(str(key)): _convert(command, _normalize(str(key)), value)
                           for key, value in section.items()}
    return result


def resolve(command: str, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Merge defaults, the command's section of the file at ``path`` and the ``overrides`` (flags that were
    given on the command line; None values are ignored), in that order.
    """
    if command not in SECTIONS:
        raise ConfigError("Unknown command %s" % command)
    values = {key: default for key, (_, default) in SECTIONS[command].items()}
    if path is not None:
        values.update(load_file(path).get(command, {}))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[_normalize(key)] = _convert(command, _normalize(key), value)
    logger.debug("Resolved configuration of %s: %s" % (command, values))
    return RunConfig(command, values, path)
