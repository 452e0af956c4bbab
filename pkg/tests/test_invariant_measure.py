"""
Tests for invariant measures, change of variables and the modular bundle
"""

from fractions import Fraction

import pytest

from topos_measure.exceptions import (
    DescentFailure, MissingOrbitWeight, NoCover, NotDownwardClosed, NotEpi, NotPositive, UnknownOrbit,
)
from topos_measure.generators import (
    Block, block_groupoid, cyclic_group, random_model, random_orbit_function, random_section,
)
from topos_measure.groupoid import (
    compose, coproduct, fold, inclusion, is_epi, make_action, make_map, orbits, slice_action, terminal_map,
)
from topos_measure.invariant_measure import (
    as_valuation, change_of_variables, check_axioms, chi_section, chi_to_slice_measure, epi_mass, evaluate,
    extend_from_class, extension_oracle, global_section, glue_measures, invariant_measure, principal_action,
    principal_ratio, pullback_measure, restrict, restrict_section, section_from_global, section_sum,
    slice_measure, slice_measure_to_chi, stabilizer_mass, stratify,
)
from topos_measure.types import FAIL, NOT_APPLICABLE, PASS
from topos_measure.valuation import constant, counting_valuation, indicator, integrate, is_close, orbit_function


@pytest.fixture
def half(z2):
    """w = 1/|ℤ/2| on the single component"""
    return invariant_measure(z2, {'s': Fraction(1, 2)})


@pytest.fixture
def pair(z2):
    """Two free ℤ/2 orbits"""
    return make_action(
        z2, {'s': ['u0', 'u1', 'w0', 'w1']}, {'g': {'u0': 'u1', 'u1': 'u0', 'w0': 'w1', 'w1': 'w0'}}, "pair",
    )


@pytest.fixture
def fold_map(pair, z2_regular):
    return make_map(pair, z2_regular, {'u0': 'g0', 'u1': 'g1', 'w0': 'g0', 'w1': 'g1'}, "fold")


@pytest.fixture
def swap_map(pair, z2_regular):
    return make_map(pair, z2_regular, {'u0': 'g1', 'u1': 'g0', 'w0': 'g0', 'w1': 'g1'}, "swap")


def _statuses(results):
    return {r['name']: r['status'] for r in results}


class TestInvariantMeasure:
    """Test evaluating and validating global measures"""

    def test_masses(self, half, z2_abc, z2_regular, z2):
        """Test μ(X) = Σ |X|_c·w_c"""
        assert evaluate(half, z2_abc) == Fraction(3, 2)
        assert evaluate(half, z2_regular) == 1
        assert evaluate(half, z2.terminal) == Fraction(1, 2)

    def test_restrict_splits_by_orbit_size(self, half, z2_abc):
        assert restrict(half, z2_abc).weights == {'a': 1, 'c': Fraction(1, 2)}

    def test_stabilizer_mass(self, half, z2_abc):
        """Test Σ 1/|Stab| over orbits for w = 1/|G|"""
        assert stabilizer_mass(half, z2_abc) == Fraction(3, 2)

    def test_pair_groupoid_divides_by_objects(self):
        G = block_groupoid([Block("A", cyclic_group(1), 2)])
        X = make_action(G, {'A0': ['x0'], 'A1': ['x1']}, {'A01.r0': {'x0': 'x1'}, 'A10.r0': {'x1': 'x0'}})
        mu = invariant_measure(G, {'A0': 3})
        assert evaluate(mu, X) == 3
        assert restrict(mu, X).weights == {'x0': 3}

    def test_weight_validation(self, z2):
        with pytest.raises(MissingOrbitWeight):
            invariant_measure(z2, {})
        with pytest.raises(NotPositive):
            invariant_measure(z2, {'s': 0})
        with pytest.raises(UnknownOrbit):
            invariant_measure(z2, {'s': 1, 't': 1})


class TestAxioms:
    """Test the re-verification of the measure axioms"""

    def test_measure_passes(self, half, z2_abc, z2_regular, fold_map):
        results = _statuses(check_axioms(half, [z2_abc, z2_regular], [fold_map]))
        assert results['valuation:X'] == PASS
        assert results['well-supported:y(s)'] == PASS
        assert results['divides:fold'] == PASS
        assert results['divides:n=inf'] == NOT_APPLICABLE
        assert FAIL not in results.values()

    def test_orbit_count_is_not_a_measure(self, z2_regular):
        """Test a mass that ignores division along n-to-1 maps"""
        collapse = terminal_map(z2_regular)
        results = _statuses(check_axioms(lambda X: len(orbits(X)), [z2_regular], [collapse]))
        assert results['valuation:G'] == PASS
        assert results[f"divides:{collapse.name}"] == FAIL

    def test_squared_cardinal_is_not_additive(self, z2_abc):
        results = _statuses(check_axioms(lambda X: len(X) ** 2, [z2_abc], []))
        assert results['valuation:X'] == FAIL

    def test_uneven_map_is_not_applicable(self, points, trivial):
        X, Y = points('a', 'b', 'c', name="X"), points('a2', 'c2', name="Y")
        f = make_map(X, Y, {'a': 'a2', 'b': 'a2', 'c': 'c2'}, "collapse")
        mu = invariant_measure(trivial, {'s': 1})
        assert _statuses(check_axioms(mu, [X, Y], [f]))['divides:collapse'] == NOT_APPLICABLE

    def test_bare_mass_needs_a_groupoid(self, trivial):
        """Test a callable mass checked against nothing must name its groupoid"""
        with pytest.raises(ValueError, match="groupoid"):
            check_axioms(lambda X: len(X), [], [])
        results = _statuses(check_axioms(lambda X: len(X), [], [], groupoid=trivial))
        assert results['divides:n=inf'] == NOT_APPLICABLE
        assert set(results.values()) == {PASS, NOT_APPLICABLE}


class TestChangeOfVariables:
    """Test ∫_Y h dμ = ∫_X Σ_{f(y)=x} h(y) dμ and its consequences"""

    def test_collapse(self, points, trivial):
        """Test the uneven collapse {a, b, c} → {a′, c′}"""
        X, Y = points('a', 'b', 'c', name="X"), points('a2', 'c2', name="Y")
        f = make_map(X, Y, {'a': 'a2', 'b': 'a2', 'c': 'c2'}, "collapse")
        mu = invariant_measure(trivial, {'s': 5})
        h = orbit_function(X, {'a': 1, 'b': 2, 'c': 7})
        sides = change_of_variables(f, h, mu)
        assert sides['lhs'] == sides['rhs'] == 50
        assert stratify(f, mu) == [
            {'n': 1, 'target_mass': 5, 'source_mass': 5},
            {'n': 2, 'target_mass': 5, 'source_mass': 10},
        ]
        assert epi_mass(f, mu) == evaluate(mu, Y)

    def test_epi_mass_needs_epi(self, half, z2_regular):
        incl = coproduct(z2_regular, z2_regular)[1][0]
        with pytest.raises(NotEpi):
            epi_mass(incl, half)

    def test_indicator_gives_preimage_mass(self, half, fold_map):
        for o in orbits(fold_map.source):
            sides = change_of_variables(fold_map, indicator(o), half)
            assert sides['lhs'] == sides['rhs'] == 1

    def test_random_models(self, rng):
        """Test the formula for random models, maps and integrands"""
        checked = 0
        for _ in range(100):
            model = random_model(rng)
            for f in model.maps:
                for kind in ("rational", "indicator", "real", "complex"):
                    h = random_orbit_function(rng, f.source, kind)
                    sides = change_of_variables(f, h, model.measure, tolerance=1e-12)
                    assert is_close(sides['lhs'], sides['rhs'], 1e-12)
                    checked += 1
                for s in stratify(f, model.measure):
                    assert s['source_mass'] == s['n'] * s['target_mass']
                assert epi_mass(f, model.measure) == evaluate(model.measure, f.target)
        assert checked >= 200

    def test_random_axioms(self, rng):
        """Test generated measures satisfy every axiom"""
        for _ in range(100):
            model = random_model(rng)
            results = check_axioms(model.measure, model.actions, model.maps)
            assert all(r['status'] in (PASS, NOT_APPLICABLE) for r in results), results
            for X in model.actions:
                assert stabilizer_mass(model.measure, X) == evaluate(model.measure, X)
                assert counting_valuation(X).total > 0


class TestExtension:
    """Test extending a measure from a class of covering objects"""

    def test_extend_through_cover(self, half, pair, fold_map, z2_regular):
        value = extend_from_class([restrict(half, pair)], [fold_map], z2_regular)
        assert value == evaluate(half, z2_regular) == 1

    def test_member_of_class(self, half, pair):
        assert extend_from_class([restrict(half, pair)], [], pair) == 2

    def test_no_cover(self, half, pair, fold_map, z2_abc):
        with pytest.raises(NoCover):
            extend_from_class([restrict(half, pair)], [fold_map], z2_abc)

    def test_not_downward_closed(self, half, z2_regular, fold_map):
        with pytest.raises(NotDownwardClosed):
            extend_from_class([restrict(half, z2_regular)], [fold_map], z2_regular)

    def test_two_covers_agree(self, half, fold_map, swap_map):
        oracle = extension_oracle(half, fold_map, swap_map)
        assert oracle == {'via_first': 1, 'via_second': 1, 'via_fiber_product': 1}

    def test_random_covers_agree(self, rng):
        """Test two distinct covers and their fiber product give one value"""
        for _ in range(50):
            model = random_model(rng)
            X = model.actions[0]
            first = fold(X, 2)
            project = [f for f in model.maps if f.name == "project"]
            second = project[0] if project else fold(X, 3)
            oracle = extension_oracle(model.measure, first, second)
            expected = evaluate(model.measure, X)
            assert oracle['via_first'] == oracle['via_second'] == oracle['via_fiber_product'] == expected


class TestChiBundle:
    """Test sections of χ, pullback and gluing"""

    def test_section_validation(self, z2_abc):
        with pytest.raises(NotPositive):
            chi_section(z2_abc, {'a': 0, 'c': 1})
        with pytest.raises(MissingOrbitWeight):
            chi_section(z2_abc, {'a': 1})

    def test_section_from_global(self, half, z2_abc):
        """Test the pullback of μ along X → 1"""
        section = section_from_global(half, z2_abc)
        assert section.values == {'a': 1, 'c': Fraction(1, 2)}
        assert as_valuation(section).weights == restrict(half, z2_abc).weights

    def test_slice_measure(self, z2_abc):
        section = chi_section(z2_abc, {'a': 2, 'c': 1})
        assert slice_measure(section, fold(z2_abc, 2)) == 6

    def test_slice_round_trip(self, z2_abc):
        """Test Hom(X, χ) → M(X) → Hom(X, χ) is the identity"""
        section = chi_section(z2_abc, {'a': Fraction(2, 3), 'c': 5})
        on_slice = chi_to_slice_measure(section)
        assert on_slice.groupoid == z2_abc.slice_groupoid
        assert slice_measure_to_chi(on_slice, z2_abc).values == section.values

    def test_pullback_matches_slice_measure(self, z2_abc, z2_regular):
        """Test f*λ measures q as λ measures f∘q"""
        f = make_map(z2_regular, z2_abc, {'g0': 'a', 'g1': 'b'})
        section = chi_section(z2_abc, {'a': 4, 'c': 1})
        pulled = pullback_measure(f, section)
        assert pulled.values == {'g0': 4}
        q = inclusion(z2_regular, z2_regular.whole)
        assert slice_measure(pulled, q) == slice_measure(section, compose(f, q))

    def test_glue_along_fold(self, pair, fold_map):
        section = chi_section(pair, {'u0': 3, 'w0': 3})
        glued = glue_measures(fold_map, section)
        assert glued.values == {'g0': 3}
        assert pullback_measure(fold_map, glued).values == section.values

    def test_descent_failure_has_witness(self, pair, fold_map):
        """Test unequal values on the two sheets cannot glue"""
        with pytest.raises(DescentFailure) as e:
            glue_measures(fold_map, chi_section(pair, {'u0': 3, 'w0': 5}))
        assert e.value.witness == "(u0,w0)"

    def test_glue_needs_epi(self, z2_regular):
        S, (incl, _) = coproduct(z2_regular, z2_regular)
        with pytest.raises(NotEpi):
            glue_measures(incl, chi_section(z2_regular, {'g0': 1}))

    def test_principal_action(self, z2_abc):
        """Test ℝ^>0 acts freely and transitively"""
        first = chi_section(z2_abc, {'a': 2, 'c': 1})
        second = chi_section(z2_abc, {'a': 3, 'c': 7})
        f = principal_ratio(first, second)
        assert principal_action(first, f).values == second.values
        assert principal_ratio(first, first).values == {'a': 1, 'c': 1}
        with pytest.raises(NotPositive):
            principal_action(first, constant(z2_abc, -1))

    def test_sum_and_restriction(self, z2_abc):
        first = chi_section(z2_abc, {'a': 2, 'c': 1})
        assert section_sum(first, first).values == {'a': 4, 'c': 2}
        restricted = restrict_section(first, z2_abc.subobject(['c']))
        assert restricted.values == {'c': 1}

    def test_global_section(self, half, z2):
        assert global_section(half).carrier == z2.terminal

    def test_random_descent(self, rng):
        """Test sections pulled back along an epi glue back to themselves"""
        for _ in range(100):
            model = random_model(rng)
            f = model.maps[0]
            assert is_epi(f)
            nu = random_section(rng, f.target, rational=True)
            glued = glue_measures(f, pullback_measure(f, nu))
            assert glued.values == nu.values

    def test_random_glue_then_pullback(self, rng):
        """Test a section that descends is the pullback of its descent"""
        for _ in range(100):
            model = random_model(rng)
            f = model.maps[0]
            pulled = pullback_measure(f, random_section(rng, f.target, rational=True))
            assert pullback_measure(f, glue_measures(f, pulled)).values == pulled.values

            section = random_section(rng, f.source, rational=True)
            try:
                glued = glue_measures(f, section)
            except DescentFailure:
                continue
            assert pullback_measure(f, glued).values == section.values

    def test_random_slice_round_trip(self, rng):
        """Test Hom(X, χ) ≅ M(𝒯/X) in both directions"""
        for _ in range(100):
            p = random_model(rng).maps[0]
            X = p.target
            section = random_section(rng, X, rational=True)
            on_slice = chi_to_slice_measure(section)
            assert slice_measure_to_chi(on_slice, X).values == section.values
            assert chi_to_slice_measure(slice_measure_to_chi(on_slice, X)).weights == on_slice.weights
            assert evaluate(on_slice, slice_action(p)) == slice_measure(section, p)

    def test_random_principal(self, rng):
        """Test ℝ^>0 acts transitively and freely on random sections"""
        for _ in range(100):
            model = random_model(rng)
            X = model.actions[0]
            first, second = random_section(rng, X, rational=True), random_section(rng, X, rational=True)
            f = principal_ratio(first, second)
            assert principal_action(first, f).values == second.values
            assert principal_ratio(first, principal_action(first, f)).values == f.values
            if any(v != 1 for v in f.values.values()):
                assert principal_action(first, f).values != first.values

    def test_integral_against_section(self, half, z2_abc):
        section = section_from_global(half, z2_abc)
        assert integrate(constant(z2_abc, 1), as_valuation(section)) == evaluate(half, z2_abc)
