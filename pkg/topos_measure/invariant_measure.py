"""
Invariant measures and the modular bundle χ

A global invariant measure on the topos of a finite groupoid is a positive
weight per component, with mass μ(X) = Σ_c |X|_c · w_c. Sections of χ over X
(maps X → χ) are invariant measures on the slice over X; since the components
of the action groupoid 𝒢⋉X are the orbits of X, a section is a positive value
per orbit. This module checks the axioms, the change-of-variables formula and
its consequences, and implements pullback, descent and the ℝ^>0 action on
sections.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from .exceptions import (
    GroupoidMismatch, MissingOrbitWeight, UnknownOrbit, NotPositive, NotEpi, NoCover, NotDownwardClosed,
    DescentFailure, CarrierMismatch,
)
from .groupoid import (
    FiniteAction, FiniteGroupoid, EquivariantMap, Subobject, fiber_profile, internal_cardinal,
    is_epi, orbits, outgoing_count, pullback, representable, stabilizer_order, sub_action, terminal_map,
)
from .types import ChangeOfVariables, CheckResult, ExtensionOracle, Stratum, check_result
from .valuation import (
    OrbitFunction, Real, Valuation, _check_finite, from_elements, integrate, is_close, ratio,
    valuation,
)

Mass = Callable[[FiniteAction], Real]

# exhaustive modularity check up to this many orbits, sampled pairs above
EXHAUSTIVE_ORBITS = 6
SAMPLED_PAIRS = 64


@dataclass(frozen=True)
class InvariantMeasure:
    """Positive weights on the components of a groupoid, keyed by component representative."""
    groupoid: FiniteGroupoid
    weights: Dict[str, Real]

    def __call__(self, X: FiniteAction) -> Real:
        return evaluate(self, X)


def invariant_measure(groupoid: FiniteGroupoid, weights: Mapping[str, Real]) -> InvariantMeasure:
    """Validate component weights.

    Raises:
        MissingOrbitWeight: If a component has no weight
        UnknownOrbit: If a key is not a component representative
        NotPositive: If a weight is not strictly positive
    """
    reps = groupoid.component_reps
    for rep in reps:
        if rep not in weights:
            raise MissingOrbitWeight(f"measure has no weight for the component of '{rep}'")
    for key, w in weights.items():
        if key not in reps:
            hint = ""
            if key in groupoid.component_of:
                hint = f" (its component is represented by '{groupoid.component_of[key]}')"
            raise UnknownOrbit(f"'{key}' is not a component representative{hint}")
        _check_finite(w, f"measure at '{key}'")
        if not w > 0:
            raise NotPositive(f"measure weight {w!r} on the component of '{key}' is not positive")
    return InvariantMeasure(groupoid, dict(weights))


def _same_groupoid(mu: InvariantMeasure, X: FiniteAction) -> None:
    if X.groupoid is not mu.groupoid and X.groupoid != mu.groupoid:
        raise GroupoidMismatch(f"{X.label} does not live over the measure's groupoid")


def evaluate(mu: InvariantMeasure, X: FiniteAction) -> Real:
    """μ(X) = Σ_c |X|_c · w_c."""
    _same_groupoid(mu, X)
    sizes = internal_cardinal(X)
    return sum((sizes[rep] * w for rep, w in mu.weights.items()), 0)


def restrict(mu: InvariantMeasure, X: FiniteAction) -> Valuation:
    """The valuation μ induces on Sub(X).

    An orbit o in component c gets w_c·|o|/n_c, where n_c counts the objects of c.
    """
    _same_groupoid(mu, X)
    G = X.groupoid
    weights = {}
    for o in orbits(X):
        rep = G.component_of[X.base[o.rep]]
        weights[o.rep] = ratio(mu.weights[rep] * len(o), G.component_size(rep))
    return Valuation(X, weights)


def stabilizer_mass(mu: InvariantMeasure, X: FiniteAction) -> Real:
    """μ(X) through stabilizers: Σ over orbits of w_c·#{g : src(g) = s}/(n_c·|Stab(x)|).

    For a one-object groupoid with w = 1/|G| this is Σ_{x ∈ X/G} 1/|Stab(x)|.
    """
    _same_groupoid(mu, X)
    G = X.groupoid
    total: Real = 0
    for o in orbits(X):
        s = X.base[o.rep]
        rep = G.component_of[s]
        total += ratio(mu.weights[rep] * outgoing_count(G, s), G.component_size(rep) * stabilizer_order(X, o.rep))
    return total


def _modularity_pairs(atoms: List[Subobject], rng: np.random.Generator):
    if len(atoms) <= EXHAUSTIVE_ORBITS:
        subs = []
        for mask in range(1 << len(atoms)):
            subs.append(frozenset().union(*(o.elements for i, o in enumerate(atoms) if mask >> i & 1)))
        yield from itertools.product(subs, repeat=2)
        return
    for _ in range(SAMPLED_PAIRS):
        picks = rng.integers(0, 2, size=(2, len(atoms)))
        yield tuple(
            frozenset().union(*(o.elements for i, o in enumerate(atoms) if row[i]))
            for row in picks
        )


def _sub_mass(mass: Mass, X: FiniteAction, elements) -> Real:
    return mass(sub_action(X, Subobject(X, frozenset(elements))))


def check_axioms(mu: Union[InvariantMeasure, Mass], actions: Sequence[FiniteAction],
                 maps: Sequence[EquivariantMap], groupoid: Optional[FiniteGroupoid] = None,
                 tolerance: float = 1e-9, seed: int = 0) -> List[CheckResult]:
    """Re-verify the invariant-measure axioms for a candidate mass function.

    Args:
        mu: An InvariantMeasure, or any callable giving the mass of an action
        actions: Objects whose subobject algebras are checked for finite additivity
        maps: Maps checked for division of mass along n-to-1 maps; the maps
            X → 1 of every sampled action are added
        groupoid: Base groupoid for the representable family (defaults to the measure's)
        tolerance: Relative tolerance for float masses
        seed: Seed for sampling subobject pairs on large algebras

    Returns:
        One check per action (finite valuation), representable (well-supported)
        and map (mass divides by n), plus the n=∞ case reported as not applicable

    Raises:
        ValueError: If a bare mass function comes with no actions, maps or groupoid
    """
    if isinstance(mu, InvariantMeasure):
        groupoid = groupoid or mu.groupoid
        mass: Mass = mu.__call__
    else:
        mass = mu
    if groupoid is None:
        if actions:
            groupoid = actions[0].groupoid
        elif maps:
            groupoid = maps[0].source.groupoid
        else:
            raise ValueError("a mass function with no actions or maps needs an explicit groupoid")
    rng = np.random.default_rng(seed)
    results: List[CheckResult] = []

    for X in actions:
        results.append(_check_valuation(mass, X, tolerance, rng))

    for s in groupoid.objects:
        Y = representable(groupoid, s)
        zero = [o.rep for o in orbits(Y) if not _sub_mass(mass, Y, o.elements) > 0]
        results.append(check_result(
            f"well-supported:{Y.label}", not zero, witness=zero[0] if zero else None,
        ))

    all_maps = list(maps) + [terminal_map(X) for X in actions]
    for f in all_maps:
        results.append(_check_division(mass, f, tolerance))
    results.append(check_result("divides:n=inf", None, witness="infinite maps do not occur in finite models"))
    return results


def _check_valuation(mass: Mass, X: FiniteAction, tolerance: float, rng) -> CheckResult:
    name = f"valuation:{X.label}"
    empty = _sub_mass(mass, X, ())
    if not is_close(empty, 0, tolerance):
        return check_result(name, False, witness="mass of the empty subobject", deviation=abs(empty))
    values = {}
    atoms = orbits(X)
    worst = 0.0
    for U, V in _modularity_pairs(atoms, rng):
        for S in (U, V, U | V, U & V):
            if S not in values:
                values[S] = _sub_mass(mass, X, S)
                if values[S] < 0:
                    return check_result(name, False, witness=sorted(S), deviation=abs(values[S]))
        lhs = values[U] + values[V]
        rhs = values[U | V] + values[U & V]
        if not is_close(lhs, rhs, tolerance):
            return check_result(
                name, False, witness=[min(U, default=None), min(V, default=None)], deviation=abs(lhs - rhs),
            )
        worst = max(worst, float(abs(lhs - rhs)))
        if U <= V and values[U] > values[V] and not is_close(values[U], values[V], tolerance):
            return check_result(name, False, witness=[min(U, default=None), min(V, default=None)], deviation=values[U] - values[V])
    return check_result(name, True, deviation=worst)


def _check_division(mass: Mass, f: EquivariantMap, tolerance: float) -> CheckResult:
    name = f"divides:{f.name or f.source.label + '→' + f.target.label}"
    profile = fiber_profile(f)
    n = profile['n_to_1']
    if not n:
        sizes = sorted(set(profile['fiber_sizes']))
        return check_result(name, None, witness=f"fiber sizes {sizes}")
    expected = ratio(mass(f.source), n)
    actual = mass(f.target)
    return check_result(
        name, is_close(actual, expected, tolerance),
        witness=None if is_close(actual, expected, tolerance) else f.name or "map",
        deviation=abs(actual - expected),
    )


def change_of_variables(f: EquivariantMap, h: OrbitFunction, mu: InvariantMeasure,
                        tolerance: float = 0.0) -> ChangeOfVariables:
    """Both sides of ∫_Y h dμ = ∫_X (Σ_{f(y)=x} h(y)) dμ for f: Y → X.

    Raises:
        CarrierMismatch: If h does not live on the source of f
        NotOrbitConstant: If the fiberwise sum is not constant on orbits
    """
    if h.carrier != f.source:
        raise CarrierMismatch("the integrand must live on the source of the map")
    Y, X = f.source, f.target
    pushed = {x: sum((h.at(y) for y in f.preimage(x)), 0) for x in X.elements}
    g = from_elements(X, pushed, tolerance)
    return {
        'lhs': integrate(h, restrict(mu, Y)),
        'rhs': integrate(g, restrict(mu, X)),
    }


def stratify(f: EquivariantMap, mu: InvariantMeasure) -> List[Stratum]:
    """Split the target into X_n (exactly n preimages) and the source into f⁻¹(X_n).

    Each stratum satisfies μ(f⁻¹X_n) = n·μ(X_n).
    """
    Y, X = f.source, f.target
    by_size: Dict[int, List[str]] = {}
    for x in X.elements:
        by_size.setdefault(len(f.preimage(x)), []).append(x)
    strata: List[Stratum] = []
    for n in sorted(by_size):
        X_n = Subobject(X, frozenset(by_size[n]))
        Y_n = Subobject(Y, frozenset(y for x in X_n.elements for y in f.preimage(x)))
        strata.append({
            'n': n,
            'target_mass': evaluate(mu, sub_action(X, X_n)),
            'source_mass': evaluate(mu, sub_action(Y, Y_n)),
        })
    return strata


def _cover_integral(f: EquivariantMap, nu: Valuation) -> Real:
    """∫_C 1/|f⁻¹(f(c))| dν for f: C → X."""
    return sum(
        (ratio(w, len(f.preimage(f(rep)))) for rep, w in nu.weights.items()),
        0,
    )


def epi_mass(f: EquivariantMap, mu: InvariantMeasure) -> Real:
    """μ(X) computed from an epimorphism f: Y ↠ X as ∫_Y 1/|f⁻¹(f(y))| dμ.

    Raises:
        NotEpi: If f is not surjective
    """
    if not is_epi(f):
        raise NotEpi(f"{f.name or 'map'} is not surjective")
    return _cover_integral(f, restrict(mu, f.source))


def _member(X: FiniteAction, measured: Sequence[Valuation]) -> Optional[Valuation]:
    for nu in measured:
        if nu.carrier is X or nu.carrier == X:
            return nu
    return None


def extend_from_class(measured: Sequence[Valuation], maps: Sequence[EquivariantMap],
                      target: FiniteAction) -> Real:
    """Extend a measure known on a class of objects to an object it covers.

    Args:
        measured: The class, each object with its valuation on Sub(C)
        maps: Sample maps; covers of ``target`` are taken from here, and maps into
            the class are used to check downward closure
        target: The object to measure

    Returns:
        μ(target) = ∫_C 1/|f⁻¹f(c)| dμ for the first cover f: C ↠ target

    Raises:
        NotDownwardClosed: If a sample map lands in the class from outside it
        NoCover: If no object of the class maps onto the target
    """
    for m in maps:
        if _member(m.target, measured) is not None and _member(m.source, measured) is None:
            raise NotDownwardClosed(
                f"{m.source.label} maps into the class member {m.target.label} but is not in the class"
            )
    own = _member(target, measured)
    if own is not None:
        return own.total
    for m in maps:
        if m.target != target:
            continue
        nu = _member(m.source, measured)
        if nu is not None and is_epi(m):
            return _cover_integral(m, nu)
    raise NoCover(f"no object of the class maps onto {target.label}")


def extension_oracle(mu: InvariantMeasure, f: EquivariantMap, g: EquivariantMap) -> ExtensionOracle:
    """The extension through two covers f: C ↠ X, g: C′ ↠ X and through P = C ×_X C′.

    On P, h(c, c′) = 1/|f⁻¹f(c)| · 1/|g⁻¹g(c′)| and ∫_P h dμ agrees with both
    cover integrals.
    """
    for m in (f, g):
        if not is_epi(m):
            raise NotEpi(f"{m.name or 'map'} is not surjective")
    P, p1, p2 = pullback(f, g)
    h = {
        pid: ratio(Fraction(1, len(f.preimage(f(p1(pid))))), len(g.preimage(g(p2(pid)))))
        for pid in P.elements
    }
    on_P = from_elements(P, h)
    return {
        'via_first': _cover_integral(f, restrict(mu, f.source)),
        'via_second': _cover_integral(g, restrict(mu, g.source)),
        'via_fiber_product': integrate(on_P, restrict(mu, P)),
    }


@dataclass(frozen=True)
class ChiSection:
    """A map X → χ: a positive value per orbit of X, keyed by orbit representative."""
    carrier: FiniteAction
    values: Dict[str, Real]

    def at(self, x: str) -> Real:
        return self.values[self.carrier.orbit_index[x]]


def chi_section(X: FiniteAction, values: Mapping[str, Real]) -> ChiSection:
    """Validate section values.

    Raises:
        MissingOrbitWeight: If an orbit has no value
        UnknownOrbit: If a key is not an orbit representative
        NotPositive: If a value is not strictly positive
    """
    reps = [o.rep for o in orbits(X)]
    for rep in reps:
        if rep not in values:
            raise MissingOrbitWeight(f"section on {X.label} has no value for the orbit of '{rep}'")
    for key, value in values.items():
        if key not in reps:
            raise UnknownOrbit(f"section on {X.label}: '{key}' is not an orbit representative")
        _check_finite(value, f"section on {X.label} at '{key}'")
        if isinstance(value, complex) or not value > 0:
            raise NotPositive(f"section on {X.label} has non-positive value {value!r} at '{key}'")
    return ChiSection(X, dict(values))


def as_valuation(section: ChiSection) -> Valuation:
    """The section's values read as orbit weights on Sub(X)."""
    return valuation(section.carrier, section.values)


def slice_measure(section: ChiSection, p: EquivariantMap) -> Real:
    """The measure of an object p: Y → X of the slice topos: Σ_o |p⁻¹(x_o)|·λ(o)."""
    if p.target != section.carrier:
        raise CarrierMismatch("the slice object must map into the section's carrier")
    return sum((len(p.preimage(rep)) * value for rep, value in section.values.items()), 0)


def chi_to_slice_measure(section: ChiSection) -> InvariantMeasure:
    """Hom(X, χ) → M(X): the section as a measure on the topos of 𝒢⋉X."""
    return InvariantMeasure(section.carrier.slice_groupoid, dict(section.values))


def slice_measure_to_chi(mu: InvariantMeasure, X: FiniteAction) -> ChiSection:
    """M(X) → Hom(X, χ): read off one value per component of 𝒢⋉X, i.e. per orbit of X."""
    H = X.slice_groupoid
    if mu.groupoid is not H and mu.groupoid != H:
        raise GroupoidMismatch(f"measure does not live over the slice groupoid of {X.label}")
    return ChiSection(X, dict(mu.weights))


def global_section(mu: InvariantMeasure) -> ChiSection:
    """A global measure as a section over the terminal object (Hom(1, χ) = M(1))."""
    return ChiSection(mu.groupoid.terminal, dict(mu.weights))


def pullback_measure(f: EquivariantMap, section: ChiSection) -> ChiSection:
    """f*λ for f: Y → X, defined by slice_measure(f*λ, q) = slice_measure(λ, f∘q).

    On an orbit o′ of Y: (f*λ)(o′) = λ(f(o′))·|o′|/|f(o′)|.
    """
    if f.target != section.carrier:
        raise CarrierMismatch("the section must live on the target of the map")
    X = f.target
    values = {}
    for o in orbits(f.source):
        image_orbit = X.orbit_of(f(o.rep))
        values[o.rep] = ratio(section.values[image_orbit.rep] * len(o), len(image_orbit))
    return ChiSection(f.source, values)


def glue_measures(f: EquivariantMap, section: ChiSection, tolerance: float = 1e-12) -> ChiSection:
    """Descend a section along an epimorphism f: X ↠ Y.

    Raises:
        NotEpi: If f is not surjective
        DescentFailure: If the two pullbacks to X ×_Y X differ; the witness is
            the representative of an orbit of the fiber product where they do
    """
    if f.source != section.carrier:
        raise CarrierMismatch("the section must live on the source of the map")
    if not is_epi(f):
        raise NotEpi(f"{f.name or 'map'} is not surjective")
    P, p1, p2 = pullback(f, f)
    first = pullback_measure(p1, section)
    second = pullback_measure(p2, section)
    for rep in sorted(first.values):
        if not is_close(first.values[rep], second.values[rep], tolerance):
            raise DescentFailure(
                f"pullbacks differ on the orbit of {rep}: {first.values[rep]!r} vs {second.values[rep]!r}",
                witness=rep,
            )
    X, Y = f.source, f.target
    values = {}
    for o in orbits(Y):
        over = X.orbit_of(f.preimage(o.rep)[0])
        values[o.rep] = ratio(section.values[over.rep] * len(o), len(over))
    return ChiSection(Y, values)


def section_from_global(mu: InvariantMeasure, X: FiniteAction) -> ChiSection:
    """The pullback of a global measure along X → 1; its density is constant on components."""
    return pullback_measure(terminal_map(X), global_section(mu))


def principal_action(section: ChiSection, f: OrbitFunction) -> ChiSection:
    """f·λ for a positive orbit function f.

    Raises:
        CarrierMismatch: If f lives on another action
        NotPositive: If f is not strictly positive
    """
    if f.carrier != section.carrier:
        raise CarrierMismatch("the scaling function must live on the section's carrier")
    for rep, value in f.values.items():
        if isinstance(value, complex) or not value > 0:
            raise NotPositive(f"scaling value {value!r} at '{rep}' is not positive")
    return ChiSection(section.carrier, {rep: f.values[rep] * v for rep, v in section.values.items()})


def principal_ratio(section: ChiSection, other: ChiSection) -> OrbitFunction:
    """The unique positive f with f·λ = λ′."""
    if section.carrier != other.carrier:
        raise CarrierMismatch("sections live on different actions")
    return OrbitFunction(
        section.carrier, {rep: ratio(other.values[rep], v) for rep, v in section.values.items()},
    )


def section_sum(section: ChiSection, other: ChiSection) -> ChiSection:
    """Pointwise addition on χ; there is no zero section."""
    if section.carrier != other.carrier:
        raise CarrierMismatch("sections live on different actions")
    return ChiSection(section.carrier, {rep: v + other.values[rep] for rep, v in section.values.items()})


def restrict_section(section: ChiSection, S: Subobject) -> ChiSection:
    """Pullback along the inclusion of an invariant subset: the values are kept."""
    X = section.carrier
    sub = sub_action(X, S)
    return ChiSection(sub, {o.rep: section.values[o.rep] for o in orbits(sub)})

