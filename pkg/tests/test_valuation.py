"""
Tests for valuations, integration and Radon–Nikodym derivatives
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topos_measure.exceptions import (
    CarrierMismatch, MissingOrbitWeight, NegativeWeight, NonFiniteWeight, NotInvariant, NotOrbitConstant,
    NotWellSupported, UnknownOrbit,
)
from topos_measure.groupoid import make_action, subobject_lattice, validate_groupoid
from topos_measure.valuation import (
    constant, counting_valuation, density_times, from_elements, indicator, integrate, measure_of, orbit_function,
    radon_nikodym, scaled, valuation,
)

from .conftest import TRIVIAL_SPEC

weights = st.fractions(min_value=0, max_value=10, max_denominator=12)
positive = st.fractions(min_value=Fraction(1, 12), max_value=10, max_denominator=12)


def _points(n: int):
    """n points under the trivial group: every subset is invariant"""
    return make_action(validate_groupoid(TRIVIAL_SPEC), {'s': [f"p{i}" for i in range(n)]}, {}, "P")


class TestValuation:
    """Test building and evaluating valuations"""

    def test_orbit_weights(self, z2_abc):
        """Test μ on the invariant subsets of ℤ/2 acting on {a, b, c}"""
        mu = valuation(z2_abc, {'a': 2, 'c': 1})
        assert mu(z2_abc.whole) == 3
        assert mu(z2_abc.subobject(['a', 'b'])) == 2
        assert mu(z2_abc.empty) == 0
        assert mu.total == 3
        assert measure_of(mu, z2_abc.subobject(['c'])) == 1

    def test_pointwise_weights(self, points):
        X = points('a', 'b', 'c')
        mu = valuation(X, {'a': 1, 'b': 2, 'c': 0})
        assert mu(X.subobject(['a', 'b'])) == 3
        assert not mu.is_well_supported

    def test_missing_orbit(self, z2_abc):
        with pytest.raises(MissingOrbitWeight):
            valuation(z2_abc, {'a': 1})

    def test_weight_on_non_representative(self, z2_abc):
        """Test the error names the orbit representative"""
        with pytest.raises(UnknownOrbit, match="represented by 'a'"):
            valuation(z2_abc, {'a': 1, 'b': 1, 'c': 1})

    def test_negative_weight(self, z2_abc):
        with pytest.raises(NegativeWeight):
            valuation(z2_abc, {'a': -1, 'c': 1})

    def test_infinite_weight(self, z2_abc):
        with pytest.raises(NonFiniteWeight):
            valuation(z2_abc, {'a': float('inf'), 'c': 1})

    def test_non_invariant_subset(self, z2_abc):
        mu = valuation(z2_abc, {'a': 2, 'c': 1})
        with pytest.raises(NotInvariant):
            mu(z2_abc.subobject(['a']))

    def test_other_carrier(self, z2_abc, z2_regular):
        mu = valuation(z2_abc, {'a': 2, 'c': 1})
        with pytest.raises(CarrierMismatch):
            mu(z2_regular.whole)

    def test_counting_valuation(self, z2_abc):
        counting = counting_valuation(z2_abc)
        assert counting.weights == {'a': 2, 'c': 1}
        assert counting.total == len(z2_abc)

    def test_scaled(self, z2_abc):
        mu = scaled(valuation(z2_abc, {'a': 2, 'c': 1}), Fraction(1, 2))
        assert mu.weights == {'a': 1, 'c': Fraction(1, 2)}


class TestIntegration:
    """Test integrals of orbit-constant functions"""

    def test_constant_integrates_to_total(self, z2_abc):
        mu = valuation(z2_abc, {'a': 2, 'c': 1})
        assert integrate(constant(z2_abc, 1), mu) == mu.total

    def test_indicator(self, z2_abc):
        mu = valuation(z2_abc, {'a': 2, 'c': 1})
        S = z2_abc.subobject(['c'])
        assert integrate(indicator(S), mu) == 1

    def test_complex_integrand(self, points):
        X = points('p', 'q')
        mu = valuation(X, {'p': 1, 'q': 2})
        h = orbit_function(X, {'p': 3, 'q': 4j})
        assert integrate(h, mu) == 3 + 8j

    def test_from_elements_requires_orbit_constant(self, z2_abc):
        with pytest.raises(NotOrbitConstant):
            from_elements(z2_abc, {'a': 1, 'b': 2, 'c': 3})
        f = from_elements(z2_abc, {'a': 1.0, 'b': 1.0 + 1e-15, 'c': 3.0}, tolerance=1e-12)
        assert f.values == {'a': 1.0, 'c': 3.0}


class TestRadonNikodym:
    """Test the Radon–Nikodym derivative"""

    def test_two_point_example(self, points):
        """Test μ = (2, 6), ν = (1, 2) gives f = (2, 3)"""
        X = points('p', 'q')
        mu, nu = valuation(X, {'p': 2, 'q': 6}), valuation(X, {'p': 1, 'q': 2})
        f = radon_nikodym(mu, nu)
        assert f.values == {'p': 2, 'q': 3}
        assert all(isinstance(v, Fraction) for v in f.values.values())
        assert density_times(f, nu).weights == mu.weights

    def test_orbit_example(self, z2_abc):
        mu, nu = valuation(z2_abc, {'a': 2, 'c': 6}), valuation(z2_abc, {'a': 1, 'c': 2})
        assert radon_nikodym(mu, nu).values == {'a': 2, 'c': 3}

    def test_not_well_supported(self, points):
        X = points('p', 'q')
        with pytest.raises(NotWellSupported):
            radon_nikodym(valuation(X, {'p': 1, 'q': 1}), valuation(X, {'p': 1, 'q': 0}))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(positive, positive, positive), min_size=1, max_size=6))
    def test_reproduces_mu_on_every_subobject(self, rows):
        """Test μ(S) = ∫ f·1_S dν on the whole lattice"""
        X = _points(len(rows))
        mu = valuation(X, {f"p{i}": r[0] for i, r in enumerate(rows)})
        nu = valuation(X, {f"p{i}": r[1] for i, r in enumerate(rows)})
        f = radon_nikodym(mu, nu)
        for S in subobject_lattice(X):
            assert mu(S) == integrate(f * indicator(S), nu)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(positive, positive, positive), min_size=1, max_size=6))
    def test_chain_rule(self, rows):
        X = _points(len(rows))
        mu, nu, rho = (valuation(X, {f"p{i}": r[k] for i, r in enumerate(rows)}) for k in range(3))
        assert (radon_nikodym(mu, nu) * radon_nikodym(nu, rho)).values == radon_nikodym(mu, rho).values


class TestValuationLaws:
    """Property checks of the valuation laws"""

    @settings(max_examples=50, deadline=None)
    @given(st.lists(weights, min_size=1, max_size=6))
    def test_modular_and_monotone(self, ws):
        """Test μ(U) + μ(V) = μ(U∪V) + μ(U∩V) and monotonicity"""
        X = _points(len(ws))
        mu = valuation(X, {f"p{i}": w for i, w in enumerate(ws)})
        lattice = list(subobject_lattice(X))
        for U in lattice:
            for V in lattice:
                assert mu(U) + mu(V) == mu(U.union(V)) + mu(U.intersection(V))
                if U.elements <= V.elements:
                    assert mu(U) <= mu(V)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(weights, min_size=1, max_size=6), st.data())
    def test_directed_supremum(self, ws, data):
        """Test μ of the union of an increasing chain is the largest μ(S_i)"""
        X = _points(len(ws))
        mu = valuation(X, {f"p{i}": w for i, w in enumerate(ws)})
        order = data.draw(st.permutations(range(len(ws))))
        cuts = sorted(set(data.draw(st.lists(st.integers(0, len(ws)), min_size=1, max_size=4))))
        chain = [X.subobject(f"p{i}" for i in order[:k]) for k in cuts]
        union = chain[0]
        for S in chain[1:]:
            assert S.elements >= union.elements
            union = union.union(S)
        masses = [mu(S) for S in chain]
        assert masses == sorted(masses)
        assert mu(union) == max(masses)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(weights, min_size=1, max_size=6), st.lists(weights, min_size=6, max_size=6))
    def test_integral_is_linear(self, ws, hs):
        X = _points(len(ws))
        mu = valuation(X, {f"p{i}": w for i, w in enumerate(ws)})
        h = orbit_function(X, {f"p{i}": hs[i] for i in range(len(ws))})
        k = constant(X, Fraction(1, 3))
        assert integrate(h + k * 2, mu) == integrate(h, mu) + 2 * integrate(k, mu)
