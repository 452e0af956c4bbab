"""Build domain objects from a validated model file."""

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Union

from .config import TERMINAL, ModelConfig, OperatorConfig, find_measure
from .exceptions import ConfigError, MeasureError, OperatorError, UsageError, ValidationError
from .groupoid import (
    EquivariantMap, FiniteAction, FiniteGroupoid, make_action, make_map, validate_groupoid,
)
from .invariant_measure import (
    ChiSection, InvariantMeasure, chi_section, invariant_measure, restrict, section_from_global,
)
from .modular import OperatorMatrix
from .serialization import decode_operator
from .valuation import Valuation, valuation


@contextmanager
def located(path: str) -> Iterator[None]:
    """Attach a JSON pointer to errors raised while building one part of the model."""
    try:
        yield
    except ValidationError as e:
        raise e.at(path)
    except (MeasureError, OperatorError) as e:
        raise ValidationError(str(e), path=path) from e


@dataclass
class Model:
    """Groupoid, actions, maps, measures and operators of one model file."""
    config: ModelConfig
    groupoid: FiniteGroupoid
    actions: Dict[str, FiniteAction] = field(default_factory=dict)
    maps: Dict[str, EquivariantMap] = field(default_factory=dict)
    measures: Dict[str, Union[InvariantMeasure, Valuation]] = field(default_factory=dict)
    operators: Dict[str, OperatorMatrix] = field(default_factory=dict)

    def action(self, name: str) -> FiniteAction:
        if name not in self.actions:
            raise ConfigError(f"Action '{name}' is not defined in the model")
        return self.actions[name]

    def map(self, name: str) -> EquivariantMap:
        if name not in self.maps:
            raise ConfigError(f"Map '{name}' is not defined in the model")
        return self.maps[name]

    def operator(self, name: str) -> OperatorMatrix:
        if name not in self.operators:
            raise ConfigError(f"Operator '{name}' is not defined in the model")
        return self.operators[name]

    def measure_name(self, name: Optional[str], on: Optional[FiniteAction] = None) -> str:
        return find_measure(self.config, name, on.name if on is not None else None)

    def global_measure(self, name: Optional[str]) -> InvariantMeasure:
        """A measure declared on the terminal action."""
        key = self.measure_name(name, self.actions[TERMINAL])
        mu = self.measures[key]
        if not isinstance(mu, InvariantMeasure):
            raise UsageError(f"measure '{key}' is not on '{TERMINAL}'")
        return mu

    def valuation(self, name: Optional[str], on: Optional[FiniteAction] = None) -> Valuation:
        """A measure as a valuation on Sub(X); global measures are restricted to ``on``."""
        key = self.measure_name(name, on)
        mu = self.measures[key]
        if isinstance(mu, InvariantMeasure):
            if on is None:
                return restrict(mu, self.actions[TERMINAL])
            return restrict(mu, on)
        if on is not None and mu.carrier != on:
            raise UsageError(f"measure '{key}' is not on {on.label}")
        return mu

    def section(self, name: Optional[str], on: Optional[FiniteAction] = None) -> ChiSection:
        """A measure as a section of χ; global measures are pulled back along ``on`` → 1."""
        key = self.measure_name(name, on)
        mu = self.measures[key]
        if isinstance(mu, InvariantMeasure):
            return section_from_global(mu, on if on is not None else self.actions[TERMINAL])
        if on is not None and mu.carrier != on:
            raise UsageError(f"measure '{key}' is not on {on.label}")
        with located(f"/measures/{key}/weights"):
            return chi_section(mu.carrier, mu.weights)

    def non_terminal_actions(self) -> List[FiniteAction]:
        return [self.actions[name] for name in sorted(self.actions) if name != TERMINAL]


def _operator(spec: OperatorConfig, X: FiniteAction) -> OperatorMatrix:
    return decode_operator({'entries': spec.entries}, X)


def build_model(config: ModelConfig) -> Model:
    """Run the domain validation of every section of the model file.

    Raises:
        ValidationError: With a JSON pointer to the offending part
    """
    with located("/groupoid"):
        G = validate_groupoid(config.groupoid.model_dump())
    model = Model(config, G)
    model.actions[TERMINAL] = G.terminal

    for name in sorted(config.actions):
        spec = config.actions[name]
        with located(f"/actions/{name}"):
            model.actions[name] = make_action(G, spec.fibers, spec.maps, name)

    for name in sorted(config.equivariant_maps):
        spec = config.equivariant_maps[name]
        with located(f"/equivariant_maps/{name}"):
            model.maps[name] = make_map(model.actions[spec.source], model.actions[spec.target], spec.assign, name)

    for name in sorted(config.measures):
        spec = config.measures[name]
        with located(f"/measures/{name}/weights"):
            if spec.on == TERMINAL:
                model.measures[name] = invariant_measure(G, spec.weights)
            else:
                model.measures[name] = valuation(model.actions[spec.on], spec.weights)

    for name in sorted(config.operators):
        spec = config.operators[name]
        with located(f"/operators/{name}"):
            model.operators[name] = _operator(spec, model.actions[spec.carrier])
    return model
