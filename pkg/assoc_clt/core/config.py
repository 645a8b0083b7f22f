"""
Loading, dumping and overriding experiment configurations.

Config files are JSON. The CLI accepts compact grammars for the family,
the n grid and the block rule; they are parsed here so that config files
and flags share one code path.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError

from .exceptions import ConfigError, InvalidSchemeError, UnknownComponentError
from .models import ExperimentConfig, FamilySpec, canonical_json
from .scheme import parse_block_rule
from .validation import validate_family

logger = logging.getLogger(__name__)

_DIST_KEYS = {"rate", "half_width"}

# alias -> (kind, fixed params)
_FAMILY_ALIASES: Dict[str, Any] = {
    "iid": ("iid", {}),
    "iid-normal": ("iid", {"dist": "normal"}),
    "iid-exp": ("iid", {"dist": "centered_exponential"}),
    "iid-uniform": ("iid", {"dist": "centered_uniform"}),
    "iid-rademacher": ("iid", {"dist": "rademacher"}),
    "geo-gauss": ("gaussian_cov", {}),
    "gauss": ("gaussian_cov", {}),
    "ma": ("moving_average", {}),
    "common-factor": ("common_factor", {"dist": "normal"}),
    "common-factor-exp": ("common_factor", {"dist": "centered_exponential"}),
    "markov": ("markov_two_state", {}),
    "monotone": ("monotone_transform", {}),
}


def list_family_aliases() -> List[str]:
    return sorted(_FAMILY_ALIASES)


def _parse_scalar(text: str) -> Any:
    text = text.strip()
    if "/" in text:
        return [_parse_scalar(part) for part in text.split("/")]
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _split_pairs(text: str) -> Dict[str, Any]:
    pairs: Dict[str, Any] = {}
    if not text:
        return pairs
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([f"family: expected key=value, got '{item}'"])
        pairs[key.strip()] = _parse_scalar(value)
    return pairs


def _build_family(alias: str, pairs: Dict[str, Any]) -> FamilySpec:
    if alias not in _FAMILY_ALIASES:
        raise UnknownComponentError("family", alias, list(_FAMILY_ALIASES))
    kind, fixed = _FAMILY_ALIASES[alias]
    params: Dict[str, Any] = dict(fixed)
    centered = bool(pairs.pop("centered", True))

    if kind in ("iid", "common_factor", "moving_average"):
        dist_params = {k: pairs.pop(k) for k in list(pairs) if k in _DIST_KEYS}
        if dist_params:
            params["dist_params"] = dist_params
        params.setdefault("dist", pairs.pop("dist", "normal"))
        if kind == "moving_average":
            weights = pairs.pop("weights", [1.0])
            params["weights"] = weights if isinstance(weights, list) else [weights]
    elif kind == "gaussian_cov":
        if "gamma" in pairs:
            gamma = pairs.pop("gamma")
            params["gamma"] = gamma if isinstance(gamma, list) else [gamma]
        else:
            params["rho"] = float(pairs.pop("rho", 0.5))
            params["variance"] = float(pairs.pop("variance", 1.0))
    elif kind == "markov_two_state":
        params["p_stay0"] = float(pairs.pop("p0", pairs.pop("p_stay0", 0.5)))
        params["p_stay1"] = float(pairs.pop("p1", pairs.pop("p_stay1", 0.5)))
    elif kind == "monotone_transform":
        base_pairs = {k[len("base."):]: pairs.pop(k) for k in list(pairs) if k.startswith("base.")}
        base_alias = str(pairs.pop("base", "iid-normal"))
        params["base"] = _build_family(base_alias, base_pairs).model_dump(mode="json")
        params["map"] = str(pairs.pop("map", "identity"))
        params["recenter"] = bool(pairs.pop("recenter", True))
        params["map_params"] = dict(pairs)
        pairs.clear()

    if pairs:
        raise ConfigError([f"family '{alias}': unexpected parameters {sorted(pairs)}"])
    return FamilySpec(kind=kind, params=params, centered=centered)


def parse_family(text: str) -> FamilySpec:
    """
    Parse the family shorthand grammar ``name:key=value,key=value``.

    Examples:
        "iid-normal", "geo-gauss:rho=0.5", "ma:weights=1/1",
        "markov:p0=0.9,p1=0.9", "monotone:map=tanh,scale=2,base=geo-gauss,base.rho=0.5"
    """
    alias, _, rest = text.strip().partition(":")
    return _build_family(alias.strip().lower(), _split_pairs(rest))


def parse_n_grid(text: Union[str, Sequence[int]]) -> List[int]:
    """
    Parse an n grid.

    Grammar:
        ``a:b:xk`` geometric (a, a*k, ... <= b), ``a:b:+k`` arithmetic,
        ``a,b,c`` explicit list, or a single integer.
    """
    if not isinstance(text, str):
        return [int(n) for n in text]
    text = text.strip()
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop = int(start_s), int(stop_s)
            grid: List[int] = []
            if step_s.startswith("x"):
                factor = int(step_s[1:])
                if factor < 2 or start < 1:
                    raise ValueError("geometric step must be >= 2 and start >= 1")
                n = start
                while n <= stop:
                    grid.append(n)
                    n *= factor
            elif step_s.startswith("+"):
                step = int(step_s[1:])
                if step < 1:
                    raise ValueError("arithmetic step must be >= 1")
                grid = list(range(start, stop + 1, step))
            else:
                raise ValueError(f"step must start with 'x' or '+', got '{step_s}'")
            if not grid:
                raise ValueError(f"grid '{text}' is empty")
            return grid
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError([f"n_grid: {e}"]) from e


def _format_validation_error(error: ValidationError) -> List[str]:
    return [
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
        for err in error.errors()
    ]


def _normalize(data: Dict[str, Any]) -> Dict[str, Any]:
    """Expand shorthand strings inside a raw config mapping."""
    data = dict(data)
    if isinstance(data.get("family"), str):
        data["family"] = parse_family(data["family"]).model_dump(mode="json")
    if isinstance(data.get("n_grid"), str):
        data["n_grid"] = parse_n_grid(data["n_grid"])
    if isinstance(data.get("block_rule"), str):
        data["block_rule"] = parse_block_rule(data["block_rule"]).model_dump(mode="json")
    if isinstance(data.get("t_grid"), str):
        data["t_grid"] = [float(t) for t in data["t_grid"].split(",") if t.strip()]
    return data


def build_config(data: Dict[str, Any], source: Optional[str] = None) -> ExperimentConfig:
    """
    Validate a raw mapping into an ExperimentConfig.

    Raises:
        ConfigError: With one line per offending field
    """
    try:
        config = ExperimentConfig.model_validate(_normalize(data))
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e), source) from e
    except (InvalidSchemeError, UnknownComponentError) as e:
        raise ConfigError([str(e)], source) from e
    violations = validate_family(config.family)
    if violations:
        raise ConfigError(
            [f"family.params.{v.parameter}: {v.constraint} ({v.detail})" for v in violations],
            source,
        )
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load an ExperimentConfig from a JSON file.

    Raises:
        ConfigError: On unreadable files, JSON syntax errors (with line and
            column) and schema errors (with dotted field paths)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([f"cannot read config: {e}"], str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"line {e.lineno}, column {e.colno}: {e.msg}"], str(path)) from e
    if not isinstance(data, dict):
        raise ConfigError(["top-level value must be an object"], str(path))
    logger.debug("Loaded config from %s", path)
    return build_config(data, str(path))


def dump_config(config: ExperimentConfig, path: Optional[Union[str, Path]] = None) -> str:
    """Canonical JSON text of a config; also written to ``path`` when given."""
    text = json.dumps(config.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _set_path(data: Dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        child = node.get(key)
        if not isinstance(child, dict):
            child = {}
            node[key] = child
        node = child
    node[keys[-1]] = value


def apply_overrides(config: ExperimentConfig, overrides: Sequence[str]) -> ExperimentConfig:
    """
    Apply ``key.path=value`` overrides to a config.

    Values are parsed as JSON literals when possible; ``family``, ``n_grid``,
    ``block_rule`` and ``t_grid`` accept their shorthand grammars.

    Raises:
        ConfigError: On malformed overrides or an invalid resulting config
    """
    if not overrides:
        return config
    data = config.model_dump(mode="json")
    for item in overrides:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError([f"override '{item}' is not key=value"])
        if key in ("family", "n_grid", "block_rule", "t_grid"):
            value: Any = raw
        else:
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
        _set_path(data, key, value)
        logger.debug("Override %s = %r", key, value)
    return build_config(data, "overrides")


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form."""
    return hashlib.sha256(canonical_json(config.model_dump(mode="json")).encode()).hexdigest()
