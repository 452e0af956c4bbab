"""
Finite groupoids and their actions

A finite groupoid given by an explicit composition table, together with the
category of its actions on finite sets. This category is the boolean topos every
other module works in: objects are actions, arrows are equivariant maps, the
subobject algebra of an action is generated by its orbits and the components of
the groupoid play the part of the subobjects of the terminal object.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as cartesian
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    DanglingEndpoint, IncompleteComposition, MissingIdentity, NonAssociative, MissingInverse,
    ActionError, NotBijective, NotFunctorial, NotNatural, GroupoidMismatch, UnknownElement,
)
from .types import FiberProfile, GroupoidSpec


# characters that delimit generated pair and slice ids; escaped with a backslash inside components
_DELIMITERS = "\\(),@"


def _escape(name: str) -> str:
    return "".join("\\" + c if c in _DELIMITERS else c for c in name)


def pair_id(x: str, y: str) -> str:
    """Id of the pair (x, y); distinct pairs get distinct ids whatever the characters in x and y."""
    return f"({_escape(x)},{_escape(y)})"


def lift_id(g: str, x: str) -> str:
    """Id of the slice arrow g@x: x → g·x."""
    return f"{_escape(g)}@{_escape(x)}"


class _UnionFind:
    """Disjoint sets over a finite collection of hashable ids."""

    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in self.parent}

    def find(self, x: str) -> str:
        y = self.parent[x]
        if self.parent[y] != y:
            y = self.parent[x] = self.find(y)
        return y

    def union(self, x: str, y: str) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def classes(self) -> List[Tuple[str, ...]]:
        """Equivalence classes, each sorted, ordered by least member."""
        groups: Dict[str, List[str]] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return sorted((tuple(sorted(members)) for members in groups.values()), key=lambda c: c[0])


@dataclass(frozen=True)
class Morphism:
    """An arrow src → dst of a groupoid."""
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class FiniteGroupoid:
    """A validated finite groupoid.

    ``table[(g, h)]`` is g∘h and is defined exactly when dst(h) == src(g).
    Build instances with :func:`validate_groupoid`.
    """
    objects: Tuple[str, ...]
    morphisms: Dict[str, Morphism]
    table: Dict[Tuple[str, str], str]
    identities: Dict[str, str] = field(compare=False)
    inverses: Dict[str, str] = field(compare=False)
    component_of: Dict[str, str] = field(compare=False)

    def src(self, g: str) -> str:
        return self.morphisms[g].src

    def dst(self, g: str) -> str:
        return self.morphisms[g].dst

    def compose(self, g: str, h: str) -> str:
        """g∘h (apply h first)."""
        return self.table[(g, h)]

    def hom(self, s: str, t: str) -> List[str]:
        return [g for g in sorted(self.morphisms) if self.morphisms[g].src == s and self.morphisms[g].dst == t]

    def morphisms_from(self, s: str) -> List[str]:
        return [g for g in sorted(self.morphisms) if self.morphisms[g].src == s]

    def endomorphisms(self, s: str) -> List[str]:
        return self.hom(s, s)

    @cached_property
    def components(self) -> List[Tuple[str, ...]]:
        """Partition of the objects by reachability, ordered by representative."""
        groups: Dict[str, List[str]] = {}
        for obj in self.objects:
            groups.setdefault(self.component_of[obj], []).append(obj)
        return [tuple(sorted(groups[rep])) for rep in sorted(groups)]

    @property
    def component_reps(self) -> List[str]:
        return [c[0] for c in self.components]

    def component_size(self, rep: str) -> int:
        """Number of objects in the component represented by ``rep``."""
        return sum(1 for obj in self.objects if self.component_of[obj] == rep)

    @cached_property
    def terminal(self) -> "FiniteAction":
        return terminal(self)

    def to_spec(self) -> GroupoidSpec:
        return {
            'objects': list(self.objects),
            'morphisms': [
                {'name': m.name, 'src': m.src, 'dst': m.dst}
                for m in sorted(self.morphisms.values(), key=lambda m: m.name)
            ],
            'compose': [[g, h, gh] for (g, h), gh in sorted(self.table.items())],
        }


def _assemble(objects: Sequence[str], morphisms: Dict[str, Morphism], table: Dict[Tuple[str, str], str],
              identities: Dict[str, str], inverses: Dict[str, str]) -> FiniteGroupoid:
    uf = _UnionFind(objects)
    for m in morphisms.values():
        uf.union(m.src, m.dst)
    component_of = {}
    for members in uf.classes():
        for obj in members:
            component_of[obj] = members[0]
    return FiniteGroupoid(
        objects=tuple(sorted(objects)),
        morphisms=morphisms,
        table=table,
        identities=identities,
        inverses=inverses,
        component_of=component_of,
    )


def validate_groupoid(spec: Mapping) -> FiniteGroupoid:
    """Validate raw composition-table data and build a groupoid.

    Args:
        spec: Mapping with ``objects`` (ids), ``morphisms`` (``name``/``src``/``dst``
            mappings) and ``compose`` (``[g, h, g∘h]`` triples)

    Returns:
        Validated groupoid with its components computed

    Raises:
        DanglingEndpoint: If a morphism or table entry names something undefined
        IncompleteComposition: If the table is not a total composition on composable pairs
        MissingIdentity: If an object has no neutral endomorphism
        NonAssociative: If a composable triple does not associate
        MissingInverse: If a morphism has no two-sided inverse
    """
    objects = list(spec.get('objects', []))
    seen = set()
    for i, obj in enumerate(objects):
        if obj in seen:
            raise DanglingEndpoint(f"Object '{obj}' is listed twice", path=f"/objects/{i}")
        seen.add(obj)

    morphisms: Dict[str, Morphism] = {}
    for k, row in enumerate(spec.get('morphisms', [])):
        name, src, dst = row['name'], row['src'], row['dst']
        if name in morphisms:
            raise DanglingEndpoint(f"Morphism '{name}' is listed twice", path=f"/morphisms/{k}")
        for end, value in (('src', src), ('dst', dst)):
            if value not in seen:
                raise DanglingEndpoint(
                    f"Morphism '{name}' has {end} '{value}' which is not an object",
                    path=f"/morphisms/{k}",
                )
        morphisms[name] = Morphism(name, src, dst)

    table: Dict[Tuple[str, str], str] = {}
    for k, entry in enumerate(spec.get('compose', [])):
        if len(entry) != 3:
            raise IncompleteComposition(f"Entry must be [g, h, g∘h], got {list(entry)}", path=f"/compose/{k}")
        g, h, gh = entry
        for name in (g, h, gh):
            if name not in morphisms:
                raise DanglingEndpoint(f"Entry names unknown morphism '{name}'", path=f"/compose/{k}")
        if morphisms[h].dst != morphisms[g].src:
            raise IncompleteComposition(
                f"'{g}'∘'{h}' is not composable: dst({h}) = {morphisms[h].dst}, src({g}) = {morphisms[g].src}",
                path=f"/compose/{k}",
            )
        if morphisms[gh].src != morphisms[h].src or morphisms[gh].dst != morphisms[g].dst:
            raise IncompleteComposition(
                f"'{g}'∘'{h}' = '{gh}' has endpoints {morphisms[gh].src} → {morphisms[gh].dst}, "
                f"expected {morphisms[h].src} → {morphisms[g].dst}",
                path=f"/compose/{k}",
            )
        if table.get((g, h), gh) != gh:
            raise IncompleteComposition(
                f"'{g}'∘'{h}' is given twice with different values ('{table[(g, h)]}', '{gh}')",
                path=f"/compose/{k}",
            )
        table[(g, h)] = gh

    for g, h in cartesian(sorted(morphisms), repeat=2):
        if morphisms[h].dst == morphisms[g].src and (g, h) not in table:
            raise IncompleteComposition(f"Composite '{g}'∘'{h}' is missing from the table", path="/compose")

    identities: Dict[str, str] = {}
    for obj in objects:
        for e in sorted(morphisms):
            m = morphisms[e]
            if m.src != obj or m.dst != obj:
                continue
            neutral = all(
                table[(e, h)] == h for h in morphisms if morphisms[h].dst == obj
            ) and all(
                table[(g, e)] == g for g in morphisms if morphisms[g].src == obj
            )
            if neutral:
                identities[obj] = e
                break
        else:
            raise MissingIdentity(f"Object '{obj}' has no identity morphism", path="/morphisms")

    outgoing: Dict[str, List[str]] = {obj: [] for obj in objects}
    for name in sorted(morphisms):
        outgoing[morphisms[name].src].append(name)
    triples = (
        (f_, g, h)
        for h in sorted(morphisms)
        for g in outgoing[morphisms[h].dst]
        for f_ in outgoing[morphisms[g].dst]
    )
    for f_, g, h in triples:
        if table[(table[(f_, g)], h)] != table[(f_, table[(g, h)])]:
            raise NonAssociative(
                f"({f_}∘{g})∘{h} = {table[(table[(f_, g)], h)]} but {f_}∘({g}∘{h}) = {table[(f_, table[(g, h)])]}",
                path="/compose",
            )

    inverses: Dict[str, str] = {}
    for g in sorted(morphisms):
        m = morphisms[g]
        for h in sorted(morphisms):
            n = morphisms[h]
            if n.src != m.dst or n.dst != m.src:
                continue
            if table[(g, h)] == identities[m.dst] and table[(h, g)] == identities[m.src]:
                inverses[g] = h
                break
        else:
            raise MissingInverse(f"Morphism '{g}' has no two-sided inverse", path="/morphisms")

    return _assemble(objects, morphisms, table, identities, inverses)


@dataclass(frozen=True)
class FiniteAction:
    """An action of a finite groupoid on finite sets: an object of the topos.

    Build instances with :func:`make_action`.
    """
    groupoid: FiniteGroupoid
    fibers: Dict[str, Tuple[str, ...]]
    transport: Dict[str, Dict[str, str]]
    name: str = field(default="", compare=False)

    @cached_property
    def base(self) -> Dict[str, str]:
        """Element id → object id of its fiber."""
        return {x: obj for obj, xs in self.fibers.items() for x in xs}

    @cached_property
    def elements(self) -> Tuple[str, ...]:
        return tuple(sorted(self.base))

    def fiber(self, obj: str) -> Tuple[str, ...]:
        return self.fibers.get(obj, ())

    def base_of(self, x: str) -> str:
        try:
            return self.base[x]
        except KeyError:
            raise UnknownElement(f"'{x}' is not an element of {self.label}")

    def act(self, g: str, x: str) -> str:
        """g·x for x in the fiber over src(g)."""
        return self.transport[g][x]

    @property
    def label(self) -> str:
        return self.name or "action"

    def __len__(self) -> int:
        return len(self.base)

    @cached_property
    def _orbits(self) -> List["Subobject"]:
        uf = _UnionFind(self.elements)
        for mapping in self.transport.values():
            for x, y in mapping.items():
                uf.union(x, y)
        return [Subobject(self, frozenset(members)) for members in uf.classes()]

    @cached_property
    def orbit_index(self) -> Dict[str, str]:
        """Element id → representative (least element) of its orbit."""
        return {x: o.rep for o in self._orbits for x in o.elements}

    def orbit_of(self, x: str) -> "Subobject":
        rep = self.orbit_index.get(x)
        if rep is None:
            raise UnknownElement(f"'{x}' is not an element of {self.label}")
        return next(o for o in self._orbits if o.rep == rep)

    @cached_property
    def _slice(self) -> Tuple[FiniteGroupoid, Dict[str, Tuple[str, str]]]:
        return _slice_groupoid(self)

    @property
    def slice_groupoid(self) -> FiniteGroupoid:
        return self._slice[0]

    @cached_property
    def index(self) -> Dict[str, int]:
        """Element id → position in ``elements``; the coordinates of l²(X)."""
        return {x: i for i, x in enumerate(self.elements)}

    def subobject(self, elements: Iterable[str]) -> "Subobject":
        elements = frozenset(elements)
        unknown = sorted(elements - set(self.base))
        if unknown:
            raise UnknownElement(f"'{unknown[0]}' is not an element of {self.label}")
        return Subobject(self, elements)

    @property
    def whole(self) -> "Subobject":
        return Subobject(self, frozenset(self.base))

    @property
    def empty(self) -> "Subobject":
        return Subobject(self, frozenset())


@dataclass(frozen=True)
class Subobject:
    """A subset of the elements of an action; invariant when closed under transport."""
    carrier: FiniteAction
    elements: FrozenSet[str]

    @property
    def rep(self) -> Optional[str]:
        return min(self.elements) if self.elements else None

    def is_invariant(self) -> bool:
        X = self.carrier
        for g, mapping in X.transport.items():
            for x in X.fiber(X.groupoid.src(g)):
                if x in self.elements and mapping[x] not in self.elements:
                    return False
        return True

    def orbits(self) -> List["Subobject"]:
        """Orbits of the carrier contained in this subset."""
        return [o for o in self.carrier._orbits if o.elements <= self.elements]

    def union(self, other: "Subobject") -> "Subobject":
        return Subobject(self.carrier, self.elements | other.elements)

    def intersection(self, other: "Subobject") -> "Subobject":
        return Subobject(self.carrier, self.elements & other.elements)

    def complement(self) -> "Subobject":
        return Subobject(self.carrier, frozenset(self.carrier.base) - self.elements)

    def __contains__(self, x: str) -> bool:
        return x in self.elements

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)


def make_action(groupoid: FiniteGroupoid, fibers: Mapping[str, Iterable[str]],
                transport: Mapping[str, Mapping[str, str]], name: str = "") -> FiniteAction:
    """Validate fibers and transport bijections and build an action.

    Transport for identity morphisms may be omitted; every other morphism needs
    a map. Objects missing from ``fibers`` get an empty fiber.

    Raises:
        ActionError: If an element id repeats or a fiber names an unknown object
        NotBijective: If a transport map is not a bijection fiber(src) → fiber(dst)
        NotFunctorial: If transport does not respect composition and identities
    """
    label = name or "action"
    fiber_map: Dict[str, Tuple[str, ...]] = {}
    seen: Dict[str, str] = {}
    for obj, xs in fibers.items():
        if obj not in groupoid.component_of:
            raise ActionError(f"{label}: fiber over unknown object '{obj}'", path=f"/fibers/{obj}")
        xs = tuple(xs)
        for x in xs:
            if x in seen:
                raise ActionError(
                    f"{label}: element '{x}' appears over both '{seen[x]}' and '{obj}'",
                    path=f"/fibers/{obj}",
                )
            seen[x] = obj
        fiber_map[obj] = tuple(sorted(xs))
    for obj in groupoid.objects:
        fiber_map.setdefault(obj, ())

    maps: Dict[str, Dict[str, str]] = {}
    identity_of = {e: obj for obj, e in groupoid.identities.items()}
    for g in sorted(groupoid.morphisms):
        m = groupoid.morphisms[g]
        if g not in transport:
            if g in identity_of:
                maps[g] = {x: x for x in fiber_map[m.src]}
                continue
            raise NotBijective(f"{label}: no transport map for morphism '{g}'", path=f"/maps/{g}")
        mapping = dict(transport[g])
        if set(mapping) != set(fiber_map[m.src]):
            raise NotBijective(
                f"{label}: transport '{g}' must be defined exactly on the fiber over '{m.src}'",
                path=f"/maps/{g}",
            )
        if sorted(mapping.values()) != sorted(fiber_map[m.dst]):
            raise NotBijective(
                f"{label}: transport '{g}' is not a bijection onto the fiber over '{m.dst}'",
                path=f"/maps/{g}",
            )
        maps[g] = mapping
    unknown = sorted(set(transport) - set(groupoid.morphisms))
    if unknown:
        raise ActionError(f"{label}: transport given for unknown morphism '{unknown[0]}'", path=f"/maps/{unknown[0]}")

    for obj, e in groupoid.identities.items():
        if any(maps[e][x] != x for x in fiber_map[obj]):
            raise NotFunctorial(f"{label}: identity '{e}' does not act trivially", path=f"/maps/{e}")
    for (g, h), gh in groupoid.table.items():
        for x in fiber_map[groupoid.src(h)]:
            if maps[gh][x] != maps[g][maps[h][x]]:
                raise NotFunctorial(
                    f"{label}: transport({gh}) differs from transport({g})∘transport({h}) at '{x}'",
                    path=f"/maps/{gh}",
                )
    return FiniteAction(groupoid, fiber_map, maps, name)


@dataclass(frozen=True)
class EquivariantMap:
    """An arrow of the topos: fiber-preserving and natural for transport."""
    source: FiniteAction
    target: FiniteAction
    assignment: Dict[str, str]
    name: str = field(default="", compare=False)

    def __call__(self, x: str) -> str:
        return self.assignment[x]

    @cached_property
    def fibers(self) -> Dict[str, Tuple[str, ...]]:
        """Target element → its preimage."""
        pre: Dict[str, List[str]] = {y: [] for y in self.target.elements}
        for x, y in self.assignment.items():
            pre[y].append(x)
        return {y: tuple(sorted(xs)) for y, xs in pre.items()}

    def preimage(self, y: str) -> Tuple[str, ...]:
        return self.fibers[y]


def _same_groupoid(*actions: FiniteAction) -> None:
    first = actions[0].groupoid
    for X in actions[1:]:
        if X.groupoid is not first and X.groupoid != first:
            raise GroupoidMismatch(f"{actions[0].label} and {X.label} live over different groupoids")


def make_map(source: FiniteAction, target: FiniteAction, assignment: Mapping[str, str],
             name: str = "") -> EquivariantMap:
    """Validate and build an equivariant map.

    Raises:
        GroupoidMismatch: If source and target live over different groupoids
        UnknownElement: If an element is unassigned or mapped outside the target
        NotNatural: If the map moves an element to another fiber or breaks naturality
    """
    _same_groupoid(source, target)
    label = name or "map"
    assignment = dict(assignment)
    for x in source.elements:
        if x not in assignment:
            raise UnknownElement(f"{label}: source element '{x}' is not assigned", path=f"/assign/{x}")
    for x, y in assignment.items():
        if x not in source.base:
            raise UnknownElement(f"{label}: '{x}' is not an element of {source.label}", path=f"/assign/{x}")
        if y not in target.base:
            raise UnknownElement(f"{label}: '{y}' is not an element of {target.label}", path=f"/assign/{x}")
        if source.base[x] != target.base[y]:
            raise NotNatural(f"{label}: '{x}' and '{y}' lie over different objects", path=f"/assign/{x}")
    for g in source.groupoid.morphisms:
        for x in source.fiber(source.groupoid.src(g)):
            if assignment[source.act(g, x)] != target.act(g, assignment[x]):
                raise NotNatural(f"{label}: does not commute with transport '{g}' at '{x}'", path=f"/assign/{x}")
    return EquivariantMap(source, target, assignment, name)


def identity_map(X: FiniteAction) -> EquivariantMap:
    return EquivariantMap(X, X, {x: x for x in X.elements}, "id")


def compose(f: EquivariantMap, g: EquivariantMap) -> EquivariantMap:
    """f∘g (apply g first)."""
    if g.target != f.source:
        raise GroupoidMismatch("maps are not composable: target of the first is not the source of the second")
    return EquivariantMap(g.source, f.target, {x: f(g(x)) for x in g.source.elements})


def orbits(X: FiniteAction) -> List[Subobject]:
    """Atoms of Sub(X), ordered by least element id."""
    return list(X._orbits)


def stabilizer_order(X: FiniteAction, x: str) -> int:
    """Number of endomorphisms at the base object of ``x`` that fix ``x``."""
    obj = X.base_of(x)
    return sum(1 for g in X.groupoid.endomorphisms(obj) if X.act(g, x) == x)


def internal_cardinal(X: FiniteAction) -> Dict[str, int]:
    """|X| as a function on components: the common fiber size over each component."""
    return {rep: len(X.fiber(rep)) for rep in X.groupoid.component_reps}


def fiber_profile(f: EquivariantMap) -> FiberProfile:
    sizes = sorted(len(xs) for xs in f.fibers.values())
    n_to_1 = sizes[0] if sizes and sizes[0] == sizes[-1] else None
    return {'is_finite': True, 'n_to_1': n_to_1, 'fiber_sizes': sizes}


def image(f: EquivariantMap) -> Subobject:
    return Subobject(f.target, frozenset(f.assignment.values()))


def is_epi(f: EquivariantMap) -> bool:
    return all(f.fibers.values())


def is_mono(f: EquivariantMap) -> bool:
    return all(len(xs) <= 1 for xs in f.fibers.values())


def terminal(groupoid: FiniteGroupoid) -> FiniteAction:
    """The terminal action: one point over each object, named by the object id."""
    return FiniteAction(
        groupoid,
        {obj: (obj,) for obj in groupoid.objects},
        {g: {m.src: m.dst} for g, m in groupoid.morphisms.items()},
        "terminal",
    )


def terminal_map(X: FiniteAction) -> EquivariantMap:
    return EquivariantMap(X, X.groupoid.terminal, dict(X.base), f"{X.label}→1")


def representable(groupoid: FiniteGroupoid, s: str) -> FiniteAction:
    """Hom(s, -): fiber over t is Hom(s, t), transport by post-composition."""
    fibers = {t: tuple(groupoid.hom(s, t)) for t in groupoid.objects}
    transport = {
        g: {h: groupoid.compose(g, h) for h in fibers[m.src]}
        for g, m in groupoid.morphisms.items()
    }
    return FiniteAction(groupoid, fibers, transport, f"y({s})")


def is_generated_by_finite_objects(groupoid: FiniteGroupoid) -> Tuple[bool, List[FiniteAction]]:
    """Every finite groupoid's topos is generated by its (finite) representables."""
    return True, [representable(groupoid, s) for s in groupoid.objects]


def pullback(f: EquivariantMap, g: EquivariantMap) -> Tuple[FiniteAction, EquivariantMap, EquivariantMap]:
    """Fiber product X ×_Z Y with its two projections; elements are named ``(x,y)``."""
    _same_groupoid(f.source, g.source, f.target)
    if f.target != g.target:
        raise GroupoidMismatch("pullback needs maps with a common codomain")
    X, Y = f.source, g.source
    fibers: Dict[str, Tuple[str, ...]] = {}
    pairs: Dict[str, Tuple[str, str]] = {}
    for obj in X.groupoid.objects:
        ids = []
        for x in X.fiber(obj):
            for y in g.preimage(f(x)):
                pid = pair_id(x, y)
                pairs[pid] = (x, y)
                ids.append(pid)
        fibers[obj] = tuple(sorted(ids))
    transport = {
        h: {
            pid: pair_id(X.act(h, pairs[pid][0]), Y.act(h, pairs[pid][1]))
            for pid in fibers[m.src]
        }
        for h, m in X.groupoid.morphisms.items()
    }
    P = FiniteAction(X.groupoid, fibers, transport, f"{X.label}×{Y.label}")
    p1 = EquivariantMap(P, X, {pid: xy[0] for pid, xy in pairs.items()}, "π1")
    p2 = EquivariantMap(P, Y, {pid: xy[1] for pid, xy in pairs.items()}, "π2")
    return P, p1, p2


def product(X: FiniteAction, Y: FiniteAction) -> FiniteAction:
    return pullback(terminal_map(X), terminal_map(Y))[0]


def product_with_projections(X: FiniteAction, Y: FiniteAction) -> Tuple[FiniteAction, EquivariantMap, EquivariantMap]:
    return pullback(terminal_map(X), terminal_map(Y))


def coproduct(*actions: FiniteAction) -> Tuple[FiniteAction, List[EquivariantMap]]:
    """Disjoint sum; the copy of ``x`` from the i-th summand is named ``x#i``."""
    _same_groupoid(*actions)
    G = actions[0].groupoid
    fibers = {
        obj: tuple(sorted(f"{x}#{i}" for i, X in enumerate(actions) for x in X.fiber(obj)))
        for obj in G.objects
    }
    transport = {
        g: {f"{x}#{i}": f"{X.act(g, x)}#{i}" for i, X in enumerate(actions) for x in X.fiber(m.src)}
        for g, m in G.morphisms.items()
    }
    S = FiniteAction(G, fibers, transport, "+".join(X.label for X in actions))
    injections = [
        EquivariantMap(X, S, {x: f"{x}#{i}" for x in X.elements}, f"in{i}")
        for i, X in enumerate(actions)
    ]
    return S, injections


def fold(X: FiniteAction, copies: int) -> EquivariantMap:
    """The codiagonal from ``copies`` disjoint copies of X onto X."""
    S, _ = coproduct(*([X] * copies))
    return EquivariantMap(S, X, {y: y.rsplit("#", 1)[0] for y in S.elements}, "fold")


def sub_action(X: FiniteAction, S: Subobject) -> FiniteAction:
    """The action restricted to an invariant subset."""
    fibers = {obj: tuple(x for x in X.fiber(obj) if x in S.elements) for obj in X.groupoid.objects}
    transport = {
        g: {x: y for x, y in mapping.items() if x in S.elements}
        for g, mapping in X.transport.items()
    }
    return FiniteAction(X.groupoid, fibers, transport, f"{X.label}|{S.rep}")


def inclusion(X: FiniteAction, S: Subobject) -> EquivariantMap:
    sub = sub_action(X, S)
    return EquivariantMap(sub, X, {x: x for x in sub.elements}, "incl")


def restrict_map(f: EquivariantMap, S: Subobject) -> EquivariantMap:
    """f restricted to the invariant subset S of its source, onto f(S)."""
    source = sub_action(f.source, S)
    target = sub_action(f.target, Subobject(f.target, frozenset(f(x) for x in S.elements)))
    return EquivariantMap(source, target, {x: f(x) for x in source.elements})


def subobject_lattice(X: FiniteAction) -> Iterator[Subobject]:
    """Every invariant subset of X, one per set of orbits (2^orbits in total)."""
    atoms = orbits(X)
    for mask in range(1 << len(atoms)):
        members = frozenset().union(*(o.elements for i, o in enumerate(atoms) if mask >> i & 1))
        yield Subobject(X, members)


def _slice_groupoid(X: FiniteAction) -> Tuple[FiniteGroupoid, Dict[str, Tuple[str, str]]]:
    G = X.groupoid
    morphisms: Dict[str, Morphism] = {}
    lift: Dict[Tuple[str, str], str] = {}
    for g, m in G.morphisms.items():
        for x in X.fiber(m.src):
            name = lift_id(g, x)
            morphisms[name] = Morphism(name, x, X.act(g, x))
            lift[(g, x)] = name
    table = {}
    for (g, h), gh in G.table.items():
        for x in X.fiber(G.src(h)):
            table[(lift[(g, X.act(h, x))], lift[(h, x)])] = lift[(gh, x)]
    identities = {x: lift[(G.identities[X.base[x]], x)] for x in X.elements}
    inverses = {
        lift[(g, x)]: lift[(G.inverses[g], X.act(g, x))]
        for (g, x) in lift
    }
    lifted = {name: gx for gx, name in lift.items()}
    return _assemble(X.elements, morphisms, table, identities, inverses), lifted


def slice_groupoid(X: FiniteAction) -> FiniteGroupoid:
    """The action groupoid 𝒢⋉X, whose actions model the slice topos over X.

    Objects are the elements of X, morphisms are ``g@x``: x → g·x; the
    components are the orbits of X.
    """
    return X.slice_groupoid


def slice_action(p: EquivariantMap) -> FiniteAction:
    """An object p: Y → X of the slice topos, as an action of 𝒢⋉X."""
    X, Y = p.target, p.source
    H, lifted = X._slice
    fibers = {x: p.preimage(x) for x in X.elements}
    transport = {}
    for name, m in H.morphisms.items():
        g = lifted[name][0]
        transport[name] = {y: Y.act(g, y) for y in fibers[m.src]}
    return FiniteAction(H, fibers, transport, f"{Y.label}/{X.label}")


def outgoing_count(groupoid: FiniteGroupoid, s: str) -> int:
    """#{g : src(g) = s}, the orbit–stabilizer total at s."""
    return len(groupoid.morphisms_from(s))
