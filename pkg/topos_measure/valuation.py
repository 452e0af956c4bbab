"""
Valuations on subobject algebras

A valuation on Sub(X) is stored by its values on the atoms (the orbits of X),
keyed by orbit representative. Everything else is derived: the set function,
integration of orbit-constant functions and the Radon–Nikodym derivative.
Integer and Fraction weights stay exact.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Mapping, Union

from .exceptions import (
    MissingOrbitWeight, UnknownOrbit, NegativeWeight, NonFiniteWeight, NotInvariant,
    CarrierMismatch, NotWellSupported, NotOrbitConstant,
)
from .groupoid import FiniteAction, Subobject, orbits

Real = Union[int, float, Fraction]
Scalar = Union[int, float, Fraction, complex]


def ratio(a: Scalar, b: Scalar) -> Scalar:
    """a / b, exact when both are rational."""
    if isinstance(a, Rational) and isinstance(b, Rational):
        return Fraction(a) / Fraction(b)
    return a / b


def is_close(a: Scalar, b: Scalar, tolerance: float) -> bool:
    """Exact equality for rationals, otherwise relative closeness."""
    if isinstance(a, Rational) and isinstance(b, Rational):
        return a == b
    return abs(a - b) <= tolerance * max(1.0, abs(a), abs(b))


def _check_finite(value: Scalar, where: str) -> None:
    if isinstance(value, Rational):
        return
    parts = (value.real, value.imag) if isinstance(value, complex) else (float(value),)
    if not all(math.isfinite(p) for p in parts):
        raise NonFiniteWeight(f"{where}: value {value!r} is not finite")


def _check_keys(X: FiniteAction, keys, kind: str) -> None:
    reps = [o.rep for o in orbits(X)]
    missing = [r for r in reps if r not in keys]
    if missing:
        raise MissingOrbitWeight(f"{kind} on {X.label} has no value for the orbit of '{missing[0]}'")
    extra = sorted(set(keys) - set(reps))
    if extra:
        hint = ""
        if extra[0] in X.orbit_index:
            hint = f" (its orbit is represented by '{X.orbit_index[extra[0]]}')"
        raise UnknownOrbit(f"{kind} on {X.label}: '{extra[0]}' is not an orbit representative{hint}")


@dataclass(frozen=True)
class OrbitFunction:
    """A function on X that is constant on orbits, keyed by orbit representative."""
    carrier: FiniteAction
    values: Dict[str, Scalar]

    def at(self, x: str) -> Scalar:
        """Value at an element."""
        return self.values[self.carrier.orbit_index[x]]

    def __add__(self, other: "OrbitFunction") -> "OrbitFunction":
        _same_carrier(self.carrier, other.carrier)
        return OrbitFunction(self.carrier, {r: v + other.values[r] for r, v in self.values.items()})

    def __mul__(self, other: Union["OrbitFunction", Scalar]) -> "OrbitFunction":
        if isinstance(other, OrbitFunction):
            _same_carrier(self.carrier, other.carrier)
            return OrbitFunction(self.carrier, {r: v * other.values[r] for r, v in self.values.items()})
        return OrbitFunction(self.carrier, {r: v * other for r, v in self.values.items()})

    __rmul__ = __mul__


def orbit_function(X: FiniteAction, values: Mapping[str, Scalar]) -> OrbitFunction:
    """Validate values keyed by orbit representative."""
    _check_keys(X, values, "function")
    for rep, value in values.items():
        _check_finite(value, f"function on {X.label} at '{rep}'")
    return OrbitFunction(X, dict(values))


def from_elements(X: FiniteAction, values: Mapping[str, Scalar],
                  tolerance: float = 0.0) -> OrbitFunction:
    """Collapse an element-level function, checking it is constant on orbits.

    Raises:
        NotOrbitConstant: If two elements of one orbit have different values
    """
    collapsed: Dict[str, Scalar] = {}
    for o in orbits(X):
        first = values[o.rep]
        for x in o:
            if not is_close(values[x], first, tolerance):
                raise NotOrbitConstant(
                    f"function on {X.label} takes {values[x]!r} at '{x}' but {first!r} at '{o.rep}'"
                )
        collapsed[o.rep] = first
    return OrbitFunction(X, collapsed)


def constant(X: FiniteAction, value: Scalar) -> OrbitFunction:
    return OrbitFunction(X, {o.rep: value for o in orbits(X)})


def indicator(S: Subobject) -> OrbitFunction:
    """1_S for an invariant subset S."""
    return OrbitFunction(S.carrier, {o.rep: (1 if o.rep in S else 0) for o in orbits(S.carrier)})


@dataclass(frozen=True)
class Valuation:
    """A finite valuation on Sub(X), stored on the orbits of X."""
    carrier: FiniteAction
    weights: Dict[str, Real]

    @property
    def total(self) -> Real:
        return sum(self.weights.values(), 0)

    @property
    def is_well_supported(self) -> bool:
        return all(w > 0 for w in self.weights.values())

    @property
    def is_finite(self) -> bool:
        # weights are validated finite
        return True

    def __call__(self, S: Subobject) -> Real:
        return measure_of(self, S)


def valuation(X: FiniteAction, weights: Mapping[str, Real]) -> Valuation:
    """Validate orbit weights and build a valuation on Sub(X).

    Raises:
        MissingOrbitWeight: If an orbit has no weight
        UnknownOrbit: If a key is not an orbit representative
        NegativeWeight: If a weight is below zero
        NonFiniteWeight: If a weight is infinite or NaN
    """
    _check_keys(X, weights, "valuation")
    for rep, w in weights.items():
        _check_finite(w, f"valuation on {X.label} at '{rep}'")
        if w < 0:
            raise NegativeWeight(f"valuation on {X.label} has weight {w!r} < 0 on the orbit of '{rep}'")
    return Valuation(X, dict(weights))


def _same_carrier(X: FiniteAction, Y: FiniteAction) -> None:
    if X is not Y and X != Y:
        raise CarrierMismatch(f"operands live on different actions ({X.label}, {Y.label})")


def measure_of(mu: Valuation, S: Subobject) -> Real:
    """μ(S): the sum of the weights of the orbits contained in S.

    Raises:
        CarrierMismatch: If S is a subset of another action
        NotInvariant: If S is not closed under transport
    """
    _same_carrier(mu.carrier, S.carrier)
    if not S.is_invariant():
        raise NotInvariant(f"subset {sorted(S.elements)} of {S.carrier.label} is not closed under transport")
    return sum((mu.weights[o.rep] for o in S.orbits()), 0)


def integrate(h: OrbitFunction, mu: Valuation) -> Scalar:
    """∫ h dμ = Σ over orbits of h(o)·μ(o)."""
    _same_carrier(h.carrier, mu.carrier)
    return sum((h.values[rep] * w for rep, w in mu.weights.items()), 0)


def radon_nikodym(mu: Valuation, nu: Valuation) -> OrbitFunction:
    """The unique positive f with μ(S) = ∫ f·1_S dν for every invariant S.

    Raises:
        CarrierMismatch: If μ and ν live on different actions
        NotWellSupported: If either valuation vanishes on some orbit
    """
    _same_carrier(mu.carrier, nu.carrier)
    for name, v in (("μ", mu), ("ν", nu)):
        zero = [rep for rep, w in v.weights.items() if w == 0]
        if zero:
            raise NotWellSupported(f"{name} vanishes on the orbit of '{zero[0]}'")
    return OrbitFunction(mu.carrier, {rep: ratio(mu.weights[rep], nu.weights[rep]) for rep in mu.weights})


def density_times(f: OrbitFunction, nu: Valuation) -> Valuation:
    """The valuation f·ν, with (f·ν)(S) = ∫ f·1_S dν."""
    _same_carrier(f.carrier, nu.carrier)
    return valuation(nu.carrier, {rep: f.values[rep] * w for rep, w in nu.weights.items()})


def scaled(mu: Valuation, c: Real) -> Valuation:
    return valuation(mu.carrier, {rep: c * w for rep, w in mu.weights.items()})


def counting_valuation(X: FiniteAction) -> Valuation:
    """Counts elements: weight |o| on each orbit. Nonzero iff X is nonempty."""
    return Valuation(X, {o.rep: len(o) for o in orbits(X)})
