"""Type definitions for topos-measure."""

from typing import TypedDict, Optional, List, Dict, Any


class MorphismSpec(TypedDict):
    """One row of a groupoid's morphism list."""
    name: str
    src: str
    dst: str


class GroupoidSpec(TypedDict):
    """Raw composition-table data, as read from a model file."""
    objects: List[str]
    morphisms: List[MorphismSpec]
    compose: List[List[str]]


class FiberProfile(TypedDict):
    """Fiber cardinalities of an equivariant map."""
    is_finite: bool
    n_to_1: Optional[int]
    fiber_sizes: List[int]


class ChangeOfVariables(TypedDict):
    """Both sides of the change-of-variables formula."""
    lhs: Any  # real or complex
    rhs: Any


class Stratum(TypedDict):
    """The part of a map where every point has exactly n preimages."""
    n: int
    target_mass: Any
    source_mass: Any


class ExtensionOracle(TypedDict):
    """Extension value through two covers and through their fiber product."""
    via_first: Any
    via_second: Any
    via_fiber_product: Any


class CheckResult(TypedDict):
    """Outcome of a single verification."""
    name: str
    status: str  # "pass" | "fail" | "n/a"
    witness: Optional[Any]
    deviation: Optional[float]


class Report(TypedDict):
    """Machine-readable result of one CLI command."""
    command: str
    inputs: Dict[str, Any]
    checks: List[CheckResult]
    results: Dict[str, Any]
    seed: int
    tolerance: float
    wall_time: float


PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "n/a"


def check_result(name: str, passed: Optional[bool], witness: Any = None,
                 deviation: Optional[float] = None) -> CheckResult:
    """Build a CheckResult; ``passed=None`` marks the check as not applicable."""
    status = NOT_APPLICABLE if passed is None else (PASS if passed else FAIL)
    return {
        'name': name,
        'status': status,
        'witness': witness,
        'deviation': None if deviation is None else float(deviation),
    }
