"""Strict JSON configuration parsing.

Unknown keys are rejected with the path of the offending key: silent
typos in a pmf would corrupt every downstream number.
"""

from __future__ import annotations

import hashlib
import json

from .channel import ChannelModel
from .errors import ConfigError

_FIELD_KEYS = {"p", "k", "modulus"}
_CHANNEL_BASE_KEYS = {"field", "T", "M", "N", "kind", "seed"}
_CHANNEL_KIND_KEYS = {
    "purely_random": set(),
    "full_rank": set(),
    "rank_uniform": {"rank_pmf"},
    "fixed": {"H"},
    "network": {"coeff_dist"},
    "z": {"p"},
}
_MATRIX_KEYS = {"rows", "cols", "data"}
_CODE_KEYS = {"type", "n", "k", "basis"}


def _require(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}.{key}", "missing required key")
    return cfg[key]


def _reject_unknown(cfg: dict, allowed: set, path: str):
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown key")


def _check_int(value, path: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def parse_field_config(cfg, path="field") -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError(path, "expected an object")
    _reject_unknown(cfg, _FIELD_KEYS, path)
    _check_int(_require(cfg, "p", path), f"{path}.p", 2)
    if "k" in cfg:
        _check_int(cfg["k"], f"{path}.k", 1)
    if "modulus" in cfg and not isinstance(cfg["modulus"], list):
        raise ConfigError(f"{path}.modulus", "expected a coefficient list")
    return cfg


def parse_channel_config(cfg, path="channel") -> ChannelModel:
    if not isinstance(cfg, dict):
        raise ConfigError(path, "expected an object")
    kind = _require(cfg, "kind", path)
    if kind not in _CHANNEL_KIND_KEYS:
        raise ConfigError(f"{path}.kind", f"unknown channel kind {kind!r}")
    allowed = _CHANNEL_BASE_KEYS | _CHANNEL_KIND_KEYS[kind]
    _reject_unknown(cfg, allowed, path)
    parse_field_config(_require(cfg, "field", path), f"{path}.field")
    for dim in ("T", "M", "N"):
        _check_int(_require(cfg, dim, path), f"{path}.{dim}", 1)
    if "seed" in cfg:
        _check_int(cfg["seed"], f"{path}.seed", 0)
    if kind == "rank_uniform":
        pmf = _require(cfg, "rank_pmf", path)
        if not isinstance(pmf, list) or not pmf:
            raise ConfigError(f"{path}.rank_pmf", "expected a nonempty list")
    if kind == "fixed":
        h = _require(cfg, "H", path)
        if not isinstance(h, dict):
            raise ConfigError(f"{path}.H", "expected a matrix literal")
        _reject_unknown(h, _MATRIX_KEYS, f"{path}.H")
        for key in _MATRIX_KEYS:
            _require(h, key, f"{path}.H")
    if kind == "z":
        p = _require(cfg, "p", path)
        if not isinstance(p, (int, float)) or not 0 <= p <= 1:
            raise ConfigError(f"{path}.p", "expected a probability in [0, 1]")
    try:
        return ChannelModel.from_config(cfg)
    except Exception as exc:  # domain-level validation
        raise ConfigError(path, str(exc)) from exc


def parse_code_config(cfg, path="code") -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError(path, "expected an object")
    _reject_unknown(cfg, _CODE_KEYS, path)
    kind = _require(cfg, "type", path)
    if kind != "gabidulin":
        raise ConfigError(f"{path}.type", f"unknown code type {kind!r}")
    _check_int(_require(cfg, "n", path), f"{path}.n", 1)
    _check_int(_require(cfg, "k", path), f"{path}.k", 1)
    if "basis" in cfg and not isinstance(cfg["basis"], list):
        raise ConfigError(f"{path}.basis", "expected a list of element indices")
    return cfg


def load_json(path: str, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(what, f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(what, f"invalid JSON in {path}: {exc}") from None


def config_digest(cfg) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:16]


def parse_int_range(text: str, path: str):
    """'A:B' inclusive, or a single integer; integers only."""
    parts = str(text).split(":")
    if len(parts) not in (1, 2):
        raise ConfigError(path, f"expected 'lo:hi' or a single integer, got {text!r}")
    out = []
    for part in parts:
        try:
            v = int(part)
        except ValueError:
            raise ConfigError(
                path, f"range endpoints must be integers, got {part!r}"
            ) from None
        if str(v) != part.strip():
            raise ConfigError(path, f"range endpoints must be integers, got {part!r}")
        out.append(v)
    lo = out[0]
    hi = out[-1]
    if hi < lo:
        raise ConfigError(path, "empty range")
    return lo, hi
