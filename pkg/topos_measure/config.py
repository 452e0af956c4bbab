"""Model file schema and run settings for topos-measure."""

import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic import ValidationError as SchemaError
from rich.console import Console

from .exceptions import ConfigError, ParseError, UsageError, ValidationError
from .serialization import parse_number

console = Console(stderr=True)

TERMINAL = "terminal"
SEED_ENV = "TOPOS_MEASURE_SEED"
DEFAULT_T_GRID = "-5:5:0.5"
MAX_T_GRID_POINTS = 10_000


class MorphismConfig(BaseModel):
    """One arrow of the groupoid."""
    name: str = Field(..., description="Morphism id")
    src: str = Field(..., description="Source object id")
    dst: str = Field(..., description="Target object id")

    @field_validator('name', 'src', 'dst')
    @classmethod
    def validate_not_empty(cls, v: str, info) -> str:
        if not v or not v.strip():
            raise ValueError(f"{info.field_name} cannot be empty")
        return v

    model_config = {'extra': 'forbid'}


class GroupoidConfig(BaseModel):
    """Composition-table presentation of a finite groupoid."""
    objects: List[str] = Field(default_factory=list, description="Object ids")
    morphisms: List[MorphismConfig] = Field(default_factory=list)
    compose: List[Tuple[str, str, str]] = Field(default_factory=list, description="[g, h, g∘h] rows")

    model_config = {'extra': 'forbid'}


class ActionConfig(BaseModel):
    """Fibers per object and a transport bijection per morphism."""
    fibers: Dict[str, List[str]] = Field(default_factory=dict)
    maps: Dict[str, Dict[str, str]] = Field(default_factory=dict, description="Identities may be omitted")

    model_config = {'extra': 'forbid'}


class MapConfig(BaseModel):
    """An equivariant map between two named actions."""
    source: str
    target: str
    assign: Dict[str, str] = Field(default_factory=dict)

    model_config = {'extra': 'forbid'}


class MeasureConfig(BaseModel):
    """Weights on the orbits of an action, or on components when ``on`` is "terminal"."""
    on: str = Field(..., description="Action name")
    weights: Dict[str, Any] = Field(default_factory=dict, description="Representative id → weight")

    @field_validator('weights')
    @classmethod
    def validate_weights(cls, v: Dict[str, Any]) -> Dict[str, Any]:
        """Accept numbers and "p/q" strings; reject infinities and NaN."""
        parsed = {}
        for key, value in v.items():
            try:
                number = parse_number(value)
            except ValueError as e:
                raise ValueError(f"weight for '{key}': {e}")
            if isinstance(number, float) and not math.isfinite(number):
                raise ValueError(f"weight for '{key}' is not finite")
            parsed[key] = number
        return parsed

    model_config = {'extra': 'forbid'}


class OperatorConfig(BaseModel):
    """A matrix on l²(carrier) as sparse ``[x, y, re, im]`` rows."""
    carrier: str
    entries: List[Tuple[str, str, float, float]] = Field(default_factory=list)

    model_config = {'extra': 'forbid'}


class ModelConfig(BaseModel):
    """Complete model file."""
    groupoid: GroupoidConfig
    actions: Dict[str, ActionConfig] = Field(default_factory=dict)
    equivariant_maps: Dict[str, MapConfig] = Field(default_factory=dict)
    measures: Dict[str, MeasureConfig] = Field(default_factory=dict)
    operators: Dict[str, Union[OperatorConfig, str]] = Field(default_factory=dict)

    @model_validator(mode='after')
    def validate_references(self) -> 'ModelConfig':
        """Every action name used by a map, measure or operator must be defined."""
        if TERMINAL in self.actions:
            raise ValidationError(f"'{TERMINAL}' is reserved for the terminal action", path=f"/actions/{TERMINAL}")
        known = set(self.actions) | {TERMINAL}
        for name, m in self.equivariant_maps.items():
            for end in ('source', 'target'):
                if getattr(m, end) not in known:
                    raise ValidationError(
                        f"map '{name}' refers to unknown action '{getattr(m, end)}'",
                        path=f"/equivariant_maps/{name}/{end}",
                    )
        for name, mu in self.measures.items():
            if mu.on not in known:
                raise ValidationError(f"measure '{name}' is on unknown action '{mu.on}'", path=f"/measures/{name}/on")
        for name, op in self.operators.items():
            if isinstance(op, OperatorConfig) and op.carrier not in known:
                raise ValidationError(
                    f"operator '{name}' acts on unknown action '{op.carrier}'", path=f"/operators/{name}/carrier",
                )
        return self

    model_config = {
        'extra': 'allow'  # unknown top-level keys are reported and ignored
    }


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer")
    if seed < 0:
        raise UsageError(f"{SEED_ENV} must be non-negative, got {seed}")
    return seed


def parse_t_grid(text: str) -> List[float]:
    """``a:b:step`` → [a, a+step, ..., b]."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected a:b:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"expected numbers in a:b:step, got {text!r}")
    if not all(math.isfinite(x) for x in (start, stop, step)):
        raise ValueError("t-grid bounds must be finite")
    if step <= 0:
        raise ValueError("t-grid step must be positive")
    if stop < start:
        raise ValueError("t-grid end lies before its start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > MAX_T_GRID_POINTS:
        raise ValueError(f"t-grid has {count} points, at most {MAX_T_GRID_POINTS} are allowed")
    return [round(start + k * step, 12) for k in range(count)]


class RunSettings(BaseModel):
    """Flags shared by every command."""
    seed: int = Field(default_factory=_default_seed, ge=0, description="Seed for sampled checks")
    tolerance: float = Field(1e-9, gt=0, description="Relative tolerance for float comparisons")
    t_grid: str = Field(DEFAULT_T_GRID, description="Modular parameters as a:b:step")
    output: Literal['json', 'text'] = 'json'
    debug: bool = False

    @field_validator('t_grid')
    @classmethod
    def validate_t_grid(cls, v: str) -> str:
        parse_t_grid(v)
        return v

    def grid(self) -> List[float]:
        return parse_t_grid(self.t_grid)


def json_pointer(loc: Tuple[Union[str, int], ...]) -> str:
    """A pydantic error location as a JSON pointer, dropping union-member tags."""
    parts = []
    for part in loc:
        if part in ('OperatorConfig', 'str'):
            continue
        parts.append(str(part).replace("~", "~0").replace("/", "~1"))
    return "/" + "/".join(parts) if parts else ""


def settings_from_args(**values: Any) -> RunSettings:
    """Build run settings from command-line values; ``None`` means "use the default"."""
    try:
        return RunSettings(**{k: v for k, v in values.items() if v is not None})
    except SchemaError as e:
        error = e.errors()[0]
        raise UsageError(f"--{'-'.join(str(p) for p in error['loc']).replace('_', '-')}: {error['msg']}")


def _read(path: Path) -> Any:
    text = path.read_text(encoding='utf-8')
    if not text.strip():
        raise ConfigError(f"Model file {path} is empty")
    if path.suffix.lower() in ('.yaml', '.yml'):
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ParseError(f"Error parsing model file {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Error parsing model file {path}: line {e.lineno} column {e.colno}: {e.msg}")


def load_operator_file(path: Path) -> OperatorConfig:
    """Read one ``{carrier, entries}`` operator file."""
    if not path.is_file():
        raise ConfigError(f"Operator file {path} not found!")
    data = _read(path)
    try:
        return OperatorConfig.model_validate(data)
    except SchemaError as e:
        error = e.errors()[0]
        raise ValidationError(f"{path.name}: {error['msg']}", path=json_pointer(error['loc']))


def load_config(config_path: Union[str, Path]) -> ModelConfig:
    """Load and validate a model file (JSON, or YAML by extension).

    Operator entries given as strings are read from files relative to the
    model file.

    Args:
        config_path: Path to the model file

    Returns:
        Validated ModelConfig with all operators inline

    Raises:
        ConfigError: If the file is missing or empty
        ParseError: If the file is not valid JSON/YAML or not a mapping
        ValidationError: If the schema or a cross-reference is violated
    """
    path = Path(config_path)
    if not path.is_file():
        raise ConfigError(f"Model file {path} not found!")
    data = _read(path)
    if not isinstance(data, dict):
        raise ParseError(f"Model file {path} must contain a mapping at the top level")

    try:
        config = ModelConfig.model_validate(data)
    except SchemaError as e:
        error = e.errors()[0]
        raise ValidationError(error['msg'], path=json_pointer(error['loc']))

    for key in sorted(config.model_extra or {}):
        console.print(f"[yellow]Warning: ignoring unknown key '{key}' in {path.name}[/yellow]")

    for name, op in list(config.operators.items()):
        if isinstance(op, str):
            try:
                config.operators[name] = load_operator_file(path.parent / op)
            except ValidationError as e:
                raise e.at(f"/operators/{name}")
            if config.operators[name].carrier not in set(config.actions) | {TERMINAL}:
                raise ValidationError(
                    f"operator '{name}' acts on unknown action '{config.operators[name].carrier}'",
                    path=f"/operators/{name}",
                )
    return config


def find_measure(config: ModelConfig, name: Optional[str], on: Optional[str] = None) -> str:
    """Resolve a measure name; without one, the unique measure (on ``on``, if given)."""
    if name is not None:
        if name not in config.measures:
            raise ConfigError(f"Measure '{name}' is not defined in the model")
        return name
    candidates = sorted(k for k, m in config.measures.items() if on is None or m.on in (on, TERMINAL))
    if len(candidates) != 1:
        raise UsageError(f"choose a measure with --measure ({', '.join(candidates) or 'none defined'})")
    return candidates[0]
