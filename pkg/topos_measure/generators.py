"""
Seeded random finite models

Connected components are pair groupoids on a few objects times a small group
H given by its Cayley table. Actions are disjoint unions of coset spaces H/K
spread over the objects of a component, which makes every transitive action
reachable; maps between them come from inclusions of subgroups K ⊆ K′, folds and
product projections. All randomness goes through a ``numpy.random.Generator``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .groupoid import (
    EquivariantMap, FiniteAction, FiniteGroupoid, fold, make_action, orbits, product_with_projections,
    validate_groupoid,
)
from .invariant_measure import ChiSection, InvariantMeasure
from .modular import DensitySection, OperatorMatrix, commutant_basis, density
from .types import GroupoidSpec
from .valuation import OrbitFunction, Real

MAX_ELEMENTS = 12


@dataclass(frozen=True)
class Group:
    """A finite group as a Cayley table on named elements."""
    name: str
    elements: Tuple[str, ...]
    table: Dict[Tuple[str, str], str]

    @property
    def identity(self) -> str:
        return next(e for e in self.elements if all(self.table[(e, g)] == g for g in self.elements))

    def mul(self, a: str, b: str) -> str:
        return self.table[(a, b)]

    def inverse(self, a: str) -> str:
        e = self.identity
        return next(b for b in self.elements if self.table[(a, b)] == e)

    def generated(self, gens: Sequence[str]) -> FrozenSet[str]:
        """The subgroup generated by ``gens``."""
        found = {self.identity}
        frontier = list(found)
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = self.mul(a, g)
                if b not in found:
                    found.add(b)
                    frontier.append(b)
        return frozenset(found)

    def subgroups(self) -> List[FrozenSet[str]]:
        """Cyclic subgroups and the whole group, smallest first."""
        subs = {self.generated([g]) for g in self.elements} | {frozenset(self.elements)}
        return sorted(subs, key=lambda s: (len(s), sorted(s)))


def cyclic_group(n: int) -> Group:
    elements = tuple(f"r{k}" for k in range(n))
    table = {(f"r{a}", f"r{b}"): f"r{(a + b) % n}" for a in range(n) for b in range(n)}
    return Group(f"C{n}", elements, table)


def klein_group() -> Group:
    elements = ("e", "a", "b", "c")
    bits = {"e": 0, "a": 1, "b": 2, "c": 3}
    names = {v: k for k, v in bits.items()}
    table = {(x, y): names[bits[x] ^ bits[y]] for x in elements for y in elements}
    return Group("K4", elements, table)


def symmetric_group(n: int = 3) -> Group:
    perms = list(permutations(range(n)))
    name = {p: "".join(map(str, p)) for p in perms}
    table = {
        (name[p], name[q]): name[tuple(p[q[i]] for i in range(n))]
        for p in perms for q in perms
    }
    return Group(f"S{n}", tuple(name[p] for p in perms), table)


GROUPS = [cyclic_group(1), cyclic_group(2), cyclic_group(3), cyclic_group(4), klein_group(), symmetric_group(3)]


@dataclass(frozen=True)
class Block:
    """One connected component: the pair groupoid on ``size`` objects times ``group``."""
    prefix: str
    group: Group
    size: int

    @property
    def objects(self) -> List[str]:
        return [f"{self.prefix}{i}" for i in range(self.size)]

    def morphism(self, i: int, j: int, h: str) -> str:
        return f"{self.prefix}{i}{j}.{h}"


def block_spec(blocks: Sequence[Block]) -> GroupoidSpec:
    """Composition table of the disjoint union of the blocks."""
    spec: GroupoidSpec = {'objects': [], 'morphisms': [], 'compose': []}
    for b in blocks:
        spec['objects'].extend(b.objects)
        n, H = b.size, b.group
        for i, j, h in product(range(n), range(n), H.elements):
            spec['morphisms'].append({'name': b.morphism(i, j, h), 'src': b.objects[i], 'dst': b.objects[j]})
        for i, j, k in product(range(n), repeat=3):
            for h, g in product(H.elements, repeat=2):
                # (j→k, g) ∘ (i→j, h) = (i→k, g·h)
                spec['compose'].append([b.morphism(j, k, g), b.morphism(i, j, h), b.morphism(i, k, H.mul(g, h))])
    return spec


def block_groupoid(blocks: Sequence[Block]) -> FiniteGroupoid:
    return validate_groupoid(block_spec(blocks))


@dataclass(frozen=True)
class CosetPiece:
    """The coset space H/K of one block, copied over each of its objects."""
    tag: str
    block: Block
    subgroup: FrozenSet[str]

    @property
    def cosets(self) -> List[FrozenSet[str]]:
        H = self.block.group
        found: List[FrozenSet[str]] = []
        for a in H.elements:
            coset = frozenset(H.mul(a, k) for k in self.subgroup)
            if coset not in found:
                found.append(coset)
        return sorted(found, key=lambda c: sorted(c))

    def point(self, coset_index: int, obj_index: int) -> str:
        return f"{self.tag}{coset_index}.{self.block.objects[obj_index]}"

    def act(self, h: str, coset_index: int) -> int:
        cosets = self.cosets
        H = self.block.group
        image = frozenset(H.mul(h, c) for c in cosets[coset_index])
        return cosets.index(image)

    def __len__(self) -> int:
        return len(self.cosets) * self.block.size


def pieces_action(groupoid: FiniteGroupoid, pieces: Sequence[CosetPiece], name: str = "") -> FiniteAction:
    fibers: Dict[str, List[str]] = {obj: [] for obj in groupoid.objects}
    transport: Dict[str, Dict[str, str]] = {g: {} for g in groupoid.morphisms}
    for piece in pieces:
        b = piece.block
        count = len(piece.cosets)
        for i in range(b.size):
            fibers[b.objects[i]].extend(piece.point(c, i) for c in range(count))
        for i, j, h in product(range(b.size), range(b.size), b.group.elements):
            g = b.morphism(i, j, h)
            for c in range(count):
                transport[g][piece.point(c, i)] = piece.point(piece.act(h, c), j)
    return make_action(groupoid, fibers, transport, name)


def coarsening_map(source: FiniteAction, target: FiniteAction, pieces: Sequence[CosetPiece],
                   coarser: Sequence[CosetPiece], name: str = "") -> EquivariantMap:
    """aK ↦ aK′ piece by piece, for K ⊆ K′; [K′:K]-to-1 on each piece."""
    assignment = {}
    for fine, coarse in zip(pieces, coarser):
        H = fine.block.group
        fine_cosets, coarse_cosets = fine.cosets, coarse.cosets
        for c, coset in enumerate(fine_cosets):
            a = min(coset)
            image = frozenset(H.mul(a, k) for k in coarse.subgroup)
            d = coarse_cosets.index(image)
            for i in range(fine.block.size):
                assignment[fine.point(c, i)] = coarse.point(d, i)
    return EquivariantMap(source, target, assignment, name)


@dataclass
class RandomModel:
    """A random groupoid with sample actions, maps and an invariant measure."""
    groupoid: FiniteGroupoid
    blocks: List[Block]
    actions: List[FiniteAction] = field(default_factory=list)
    maps: List[EquivariantMap] = field(default_factory=list)
    measure: Optional[InvariantMeasure] = None


def random_blocks(rng: np.random.Generator, max_components: int = 2) -> List[Block]:
    blocks = []
    for k in range(int(rng.integers(1, max_components + 1))):
        group = GROUPS[int(rng.integers(len(GROUPS)))]
        size = int(rng.integers(1, 3)) if len(group.elements) <= 4 else 1
        blocks.append(Block(chr(ord("A") + k), group, size))
    return blocks


def random_pieces(rng: np.random.Generator, blocks: Sequence[Block], tag: str,
                  max_elements: int = MAX_ELEMENTS) -> List[CosetPiece]:
    """One or two coset spaces per block, keeping the total at most ``max_elements``."""
    pieces: List[CosetPiece] = []
    budget = max_elements
    for b in blocks:
        subgroups = b.group.subgroups()
        for n in range(int(rng.integers(1, 3))):
            K = subgroups[int(rng.integers(len(subgroups)))]
            piece = CosetPiece(f"{tag}{b.prefix}{n}_", b, K)
            if len(piece) <= budget:
                pieces.append(piece)
                budget -= len(piece)
    return pieces


def random_weight(rng: np.random.Generator, rational: bool) -> Real:
    if rational:
        return Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
    return float(rng.uniform(0.1, 5.0))


def random_measure(rng: np.random.Generator, groupoid: FiniteGroupoid, rational: bool = True) -> InvariantMeasure:
    return InvariantMeasure(groupoid, {rep: random_weight(rng, rational) for rep in groupoid.component_reps})


def random_model(rng: np.random.Generator, rational: bool = True,
                 max_elements: int = MAX_ELEMENTS) -> RandomModel:
    """A model with an action X, a coarsening X → X′ and a fold 2X → X.

    When it stays small, a product X × X′ with its first projection is added.
    """
    blocks = random_blocks(rng)
    G = block_groupoid(blocks)
    model = RandomModel(G, blocks, measure=random_measure(rng, G, rational))

    pieces = random_pieces(rng, blocks, "x", max_elements)
    X = pieces_action(G, pieces, "X")
    coarse = []
    for piece in pieces:
        bigger = [K for K in piece.block.group.subgroups() if piece.subgroup <= K]
        coarse.append(CosetPiece(f"y{piece.tag[1:]}", piece.block, bigger[int(rng.integers(len(bigger)))]))
    X2 = pieces_action(G, coarse, "X'")
    model.actions.extend([X, X2])
    model.maps.append(coarsening_map(X, X2, pieces, coarse, "coarsen"))

    f = fold(X, 2)
    model.actions.append(f.source)
    model.maps.append(f)
    if len(X) * len(X2) <= 2 * max_elements:
        P, p1, _ = product_with_projections(X, X2)
        model.actions.append(P)
        model.maps.append(EquivariantMap(P, X, p1.assignment, "project"))
    return model


def random_orbit_function(rng: np.random.Generator, X: FiniteAction, kind: str = "real") -> OrbitFunction:
    """Random values per orbit; ``kind`` is "real", "complex", "indicator" or "rational"."""
    values = {}
    for o in orbits(X):
        if kind == "indicator":
            values[o.rep] = int(rng.integers(0, 2))
        elif kind == "rational":
            values[o.rep] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
        elif kind == "complex":
            values[o.rep] = complex(rng.normal(), rng.normal())
        else:
            values[o.rep] = float(rng.normal())
    return OrbitFunction(X, values)


def random_section(rng: np.random.Generator, X: FiniteAction, rational: bool = False,
                   low: float = 0.1, high: float = 5.0) -> ChiSection:
    values: Dict[str, Real] = {}
    for o in orbits(X):
        values[o.rep] = random_weight(rng, True) if rational else float(rng.uniform(low, high))
    return ChiSection(X, values)


def random_density(rng: np.random.Generator, X: FiniteAction, low: float = 0.5,
                   high: float = 2.0) -> DensitySection:
    return density(random_section(rng, X, low=low, high=high))


def random_block_matrix(rng: np.random.Generator, X: FiniteAction) -> OperatorMatrix:
    """A random complex matrix supported on the fiber blocks of X."""
    n = len(X)
    data = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    bases = [X.base[x] for x in X.elements]
    mask = np.array([[bx == by for by in bases] for bx in bases], dtype=bool).reshape(n, n)
    return OperatorMatrix(X, np.where(mask, data, 0))


def random_commutant_element(rng: np.random.Generator, X: FiniteAction) -> OperatorMatrix:
    """A random complex combination of the orbital basis of A."""
    basis = commutant_basis(X)
    data = np.zeros((len(X), len(X)), dtype=complex)
    for b in basis:
        data = data + complex(rng.normal(), rng.normal()) * b.data
    return OperatorMatrix(X, data)
