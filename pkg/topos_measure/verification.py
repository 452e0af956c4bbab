"""Verification commands: each builds one report from a model and run settings."""

import math
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from .config import RunSettings, load_operator_file
from .exceptions import ConfigError, DescentFailure, NoCover, NotDownwardClosed, NotWellSupported, UsageError
from .generators import random_commutant_element, random_orbit_function, random_section
from .groupoid import (
    EquivariantMap, FiniteAction, compose, fiber_profile, inclusion, internal_cardinal, is_epi, is_mono,
    is_generated_by_finite_objects, orbits, outgoing_count, restrict_map, slice_action, stabilizer_order,
    subobject_lattice,
)
from .invariant_measure import (
    InvariantMeasure, as_valuation, chi_to_slice_measure, change_of_variables, check_axioms, epi_mass, evaluate,
    extend_from_class, extension_oracle, glue_measures, principal_action, principal_ratio, pullback_measure,
    restrict, restrict_section, section_sum, slice_measure, slice_measure_to_chi, stabilizer_mass, stratify,
)
from .model import Model, located
from .modular import (
    LineBundleChar, OperatorMatrix, commutant_basis, commutant_dimension_nullspace, density, density_weight,
    identity, is_in_algebra, kms_check, kms_function, measure_from_state, modular_unitary,
    state_axioms, state_from_measure, tensor_char, theta, theta_oracle, trace_check,
)
from .serialization import decode_operator, encode_operator, to_jsonable
from .types import FAIL, PASS, CheckResult, Report, check_result
from .valuation import (
    constant, counting_valuation, density_times, indicator, integrate, is_close, radon_nikodym,
)

console = Console()

COMMANDS = (
    "validate", "orbits", "measure-check", "change-of-vars", "extend", "glue", "chi", "rn",
    "modular-flow", "kms", "trace", "state",
)
MODULAR_COMMANDS = ("modular-flow", "kms", "trace")

# exhaustive Radon–Nikodym check up to 2^10 invariant subsets
EXHAUSTIVE_SUBSETS = 10
SAMPLED_SUBSETS = 256


def _relative(a, b) -> float:
    return float(abs(a - b)) / max(1.0, float(abs(a)), float(abs(b)))


class VerificationRunner:
    """Runs verification commands against one model."""

    def __init__(self, model: Model, settings: RunSettings, config_path: str = ""):
        """Initialize the runner.

        Args:
            model: Validated model
            settings: Seed, tolerance and t-grid
            config_path: Model file path, echoed into the report inputs
        """
        self.model = model
        self.settings = settings
        self.config_path = config_path
        self.tolerance = settings.tolerance
        self.rng = np.random.default_rng(settings.seed)

    def run(self, command: str, options: Optional[Dict[str, Any]] = None) -> Report:
        """Run one command and assemble its report.

        Raises:
            UsageError: If the command is unknown or its flags do not fit the model
        """
        if command not in COMMANDS:
            raise UsageError(f"unknown command '{command}'")
        options = dict(options or {})
        handler = getattr(self, "_" + command.replace("-", "_"))
        started = time.perf_counter()
        checks, results = handler(**options)
        inputs: Dict[str, Any] = {'config': self.config_path}
        inputs.update({k: v for k, v in sorted(options.items()) if v is not None})
        if command in MODULAR_COMMANDS:
            inputs['t_grid'] = self.settings.t_grid
        return {
            'command': command,
            'inputs': inputs,
            'checks': sorted(checks, key=lambda c: c['name']),
            'results': to_jsonable(results),
            'seed': self.settings.seed,
            'tolerance': self.tolerance,
            'wall_time': round(time.perf_counter() - started, 6),
        }

    # -- helpers -----------------------------------------------------------

    def _single_map(self, maps: Optional[Sequence[str]]) -> EquivariantMap:
        if not maps or len(maps) != 1:
            raise UsageError("exactly one --map is required")
        return self.model.map(maps[0])

    def _carrier(self, measure: Optional[str], obj: Optional[str], operator: Optional[str] = None) -> FiniteAction:
        """The action a modular command works on."""
        if operator is not None:
            return self._load_operator(operator).carrier
        if obj is not None:
            return self.model.action(obj)
        mu = self.model.measures[self.model.measure_name(measure)]
        if isinstance(mu, InvariantMeasure):
            raise UsageError("a measure on 'terminal' needs --object to choose an action")
        return mu.carrier

    def _load_operator(self, ref: str) -> OperatorMatrix:
        """An operator by model name, or from a ``{carrier, entries}`` file."""
        if ref in self.model.operators:
            return self.model.operators[ref]
        candidates = [Path(ref)]
        if self.config_path:
            candidates.append(Path(self.config_path).parent / ref)
        for path in candidates:
            if path.is_file():
                spec = load_operator_file(path)
                X = self.model.action(spec.carrier)
                with located(f"/{path.name}"):
                    return decode_operator({'entries': spec.entries}, X)
        raise ConfigError(f"Operator '{ref}' is neither defined in the model nor a file")

    def _samples(self, X: FiniteAction, count: int) -> List[OperatorMatrix]:
        """The orbital basis of A plus ``count`` seeded random elements."""
        basis = commutant_basis(X)
        if not basis:
            return []
        return basis + [random_commutant_element(self.rng, X) for _ in range(count)]

    # -- commands ----------------------------------------------------------

    def _validate(self) -> Tuple[List[CheckResult], Dict[str, Any]]:
        G = self.model.groupoid
        checks = [check_result("groupoid", True)]
        checks += [check_result(f"action:{X.label}", True) for X in self.model.non_terminal_actions()]
        checks += [check_result(f"map:{name}", True) for name in sorted(self.model.maps)]
        checks += [check_result(f"measure:{name}", True) for name in sorted(self.model.measures)]
        checks += [check_result(f"operator:{name}", True) for name in sorted(self.model.operators)]
        generated, witnesses = is_generated_by_finite_objects(G)
        checks.append(check_result(
            "generated-by-finite-objects", generated, witness=[Y.label for Y in witnesses],
        ))
        results = {
            'objects': len(G.objects),
            'morphisms': len(G.morphisms),
            'components': [list(c) for c in G.components],
            'actions': {
                X.label: {'elements': len(X), 'orbits': len(orbits(X))}
                for X in self.model.non_terminal_actions()
            },
            'operators': {
                name: {'carrier': a.carrier.label, 'in_algebra': is_in_algebra(a, self.tolerance)}
                for name, a in sorted(self.model.operators.items())
            },
        }
        return checks, results

    def _orbits(self, obj: Optional[str] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        G = self.model.groupoid
        actions = [self.model.action(obj)] if obj else self.model.non_terminal_actions()
        checks: List[CheckResult] = []
        results: Dict[str, Any] = {'actions': {}, 'maps': {}}
        for X in actions:
            atoms = orbits(X)
            covered = [x for o in atoms for x in o.elements]
            partition = (
                sorted(covered) == list(X.elements)
                and len(covered) == len(set(covered))
                and all(o.is_invariant() for o in atoms)
            )
            checks.append(check_result(f"orbit-partition:{X.label}", partition))

            broken = [
                x for o in atoms for x in o
                if len(o) * stabilizer_order(X, x) != outgoing_count(G, X.base[x])
            ]
            checks.append(check_result(f"orbit-stabilizer:{X.label}", not broken, witness=broken[0] if broken else None))

            sizes = internal_cardinal(X)
            uneven = [s for s in G.objects if len(X.fiber(s)) != sizes[G.component_of[s]]]
            checks.append(check_result(f"cardinal-constant:{X.label}", not uneven, witness=uneven[0] if uneven else None))

            results['actions'][X.label] = {
                'orbits': [
                    {'rep': o.rep, 'elements': sorted(o.elements), 'stabilizer': stabilizer_order(X, o.rep)}
                    for o in atoms
                ],
                'internal_cardinal': sizes,
                'slice_components': len(X.slice_groupoid.components),
            }

        for name in sorted(self.model.maps):
            f = self.model.maps[name]
            if obj and self.model.action(obj) not in (f.source, f.target):
                continue
            profile = fiber_profile(f)
            n = profile['n_to_1']
            results['maps'][name] = {**profile, 'epi': is_epi(f), 'mono': is_mono(f)}
            if is_epi(f) and n:
                source, target = internal_cardinal(f.source), internal_cardinal(f.target)
                off = [c for c in G.component_reps if source[c] != n * target[c]]
                checks.append(check_result(f"epi-cardinal:{name}", not off, witness=off[0] if off else None))
        return checks, results

    def _measure_check(self, measure: Optional[str] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        mu = self.model.global_measure(measure)
        actions = self.model.non_terminal_actions()
        maps = [self.model.maps[name] for name in sorted(self.model.maps)]
        checks = check_axioms(mu, actions, maps, tolerance=self.tolerance, seed=self.settings.seed)
        masses = {}
        for X in actions:
            value = evaluate(mu, X)
            masses[X.label] = value
            alternative = stabilizer_mass(mu, X)
            checks.append(check_result(
                f"stabilizer-mass:{X.label}", is_close(value, alternative, self.tolerance),
                deviation=_relative(value, alternative),
            ))
            if len(X):
                counting = counting_valuation(X)
                checks.append(check_result(f"integrability:{X.label}", counting.total > 0 and counting.is_finite))
            else:
                checks.append(check_result(f"integrability:{X.label}", None, witness="empty object"))
        return checks, {'weights': mu, 'mass': masses, 'terminal_mass': evaluate(mu, self.model.groupoid.terminal)}

    def _change_of_vars(self, measure: Optional[str] = None, maps: Optional[List[str]] = None,
                        samples: int = 4) -> Tuple[List[CheckResult], Dict[str, Any]]:
        mu = self.model.global_measure(measure)
        f = self._single_map(maps)
        Y, X = f.source, f.target
        integrands = [("constant", constant(Y, 1))]
        integrands += [(f"indicator:{o.rep}", indicator(o)) for o in orbits(Y)]
        kinds = ("rational", "real", "complex")
        integrands += [(f"random:{kinds[k % 3]}:{k}", random_orbit_function(self.rng, Y, kinds[k % 3]))
                       for k in range(samples)]

        rows, worst, first_bad = [], 0.0, None
        for label, h in integrands:
            sides = change_of_variables(f, h, mu, self.tolerance)
            deviation = _relative(sides['lhs'], sides['rhs'])
            worst = max(worst, deviation)
            if first_bad is None and not is_close(sides['lhs'], sides['rhs'], self.tolerance):
                first_bad = label
            rows.append({'integrand': label, **sides})
        checks = [check_result("change-of-variables", first_bad is None, witness=first_bad, deviation=worst)]

        strata = stratify(f, mu)
        for s in strata:
            checks.append(check_result(
                f"stratum:n={s['n']}", is_close(s['source_mass'], s['n'] * s['target_mass'], self.tolerance),
                deviation=_relative(s['source_mass'], s['n'] * s['target_mass']),
            ))
        if is_epi(f):
            via_cover, direct = epi_mass(f, mu), evaluate(mu, X)
            checks.append(check_result(
                "epi-mass", is_close(via_cover, direct, self.tolerance), deviation=_relative(via_cover, direct),
            ))
        else:
            checks.append(check_result("epi-mass", None, witness="map is not surjective"))
        return checks, {'map': f.name, 'integrals': rows, 'strata': strata}

    def _extend(self, measure: Optional[str] = None, obj: Optional[str] = None,
                maps: Optional[List[str]] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        mu = self.model.global_measure(measure)
        if not maps:
            raise UsageError("extend needs at least one --map cover")
        covers = [self.model.map(name) for name in maps]
        X = self.model.action(obj) if obj else covers[0].target
        for f in covers:
            if f.target != X:
                raise UsageError(f"map '{f.name}' does not land in {X.label}")

        measured, seen = [], []
        for f in covers:
            if f.source not in seen:
                seen.append(f.source)
                measured.append(restrict(mu, f.source))
        checks: List[CheckResult] = []
        try:
            value = extend_from_class(measured, covers, X)
        except (NoCover, NotDownwardClosed) as e:
            checks.append(check_result("cover", False, witness=str(e)))
            return checks, {'target': X.label}
        checks.append(check_result("cover", True))

        expected = evaluate(mu, X)
        checks.append(check_result(
            "extension-matches-measure", is_close(value, expected, self.tolerance),
            deviation=_relative(value, expected),
        ))
        per_cover = {}
        for f in covers:
            if is_epi(f):
                per_cover[f.name] = epi_mass(f, mu)
            else:
                checks.append(check_result(f"cover:{f.name}", False, witness="not surjective"))
        results: Dict[str, Any] = {'target': X.label, 'value': value, 'expected': expected, 'covers': per_cover}

        epis = [f for f in covers if is_epi(f)]
        if len(epis) >= 2:
            oracle = extension_oracle(mu, epis[0], epis[1])
            checks.append(check_result(
                "covers-agree", is_close(oracle['via_first'], oracle['via_second'], self.tolerance),
                deviation=_relative(oracle['via_first'], oracle['via_second']),
            ))
            checks.append(check_result(
                "fiber-product-oracle",
                is_close(oracle['via_fiber_product'], oracle['via_first'], self.tolerance),
                deviation=_relative(oracle['via_fiber_product'], oracle['via_first']),
            ))
            results['oracle'] = oracle
        else:
            checks.append(check_result("covers-agree", None, witness="needs two surjective covers"))
        return checks, results

    def _glue(self, measure: Optional[str] = None,
              maps: Optional[List[str]] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        f = self._single_map(maps)
        section = self.model.section(measure, on=f.source)
        results: Dict[str, Any] = {'map': f.name, 'section': section}
        if not is_epi(f):
            return [check_result("epi", False, witness=f.name)], results
        checks = [check_result("epi", True)]
        try:
            glued = glue_measures(f, section, self.tolerance)
        except DescentFailure as e:
            checks.append(check_result("descent", False, witness=e.witness))
            return checks, results
        checks.append(check_result("descent", True))

        back = pullback_measure(f, glued)
        worst = max((_relative(back.values[r], v) for r, v in section.values.items()), default=0.0)
        exact = all(is_close(back.values[r], v, self.tolerance) for r, v in section.values.items())
        checks.append(check_result("pullback-of-glued", exact, deviation=worst))
        results['glued'] = glued
        return checks, results

    def _chi(self, measure: Optional[str] = None, obj: Optional[str] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        if measure is None and obj is None:
            raise UsageError("chi needs --object or --measure")
        X = self._carrier(measure, obj)
        section = self.model.section(measure, on=X) if measure else random_section(self.rng, X, rational=True)
        other = random_section(self.rng, X, rational=True)

        components = [frozenset(c) for c in X.slice_groupoid.components]
        checks = [check_result(
            "slice-components-are-orbits", components == [o.elements for o in orbits(X)],
        )]

        on_slice = chi_to_slice_measure(section)
        forward = slice_measure_to_chi(on_slice, X)
        backward = chi_to_slice_measure(slice_measure_to_chi(on_slice, X))
        checks.append(check_result(
            "chi-round-trip", forward.values == section.values and backward.weights == on_slice.weights,
        ))

        unit = principal_ratio(section, section)
        checks.append(check_result("principal-free", all(v == 1 for v in unit.values.values())))
        moved = principal_action(section, principal_ratio(section, other))
        worst = max((_relative(moved.values[r], v) for r, v in other.values.items()), default=0.0)
        checks.append(check_result(
            "principal-transitive",
            all(is_close(moved.values[r], v, self.tolerance) for r, v in other.values.items()),
            deviation=worst,
        ))

        for name in sorted(self.model.maps):
            f = self.model.maps[name]
            if f.target != X:
                continue
            pulled = pullback_measure(f, section)
            gaps = []
            for o in orbits(f.source):
                S = f.source.subobject(o.elements)
                q = inclusion(f.source, S)
                lhs, rhs = slice_measure(pulled, q), slice_measure(section, compose(f, q))
                g = restrict_map(f, S)
                local = pullback_measure(g, restrict_section(section, X.subobject(g.target.elements)))
                if not is_close(lhs, rhs, self.tolerance) or local.values != restrict_section(pulled, S).values:
                    gaps.append(o.rep)
            checks.append(check_result(f"naturality:{name}", not gaps, witness=gaps[0] if gaps else None))

            on_slice_object = evaluate(chi_to_slice_measure(section), slice_action(f))
            expected = slice_measure(section, f)
            checks.append(check_result(
                f"slice-measure:{name}", is_close(on_slice_object, expected, self.tolerance),
                deviation=_relative(on_slice_object, expected),
            ))

            summed = pullback_measure(f, section_sum(section, other))
            apart = section_sum(pulled, pullback_measure(f, other))
            checks.append(check_result(
                f"pullback-additive:{name}",
                all(is_close(summed.values[r], v, self.tolerance) for r, v in apart.values.items()),
            ))

        H = X.slice_groupoid
        return checks, {
            'section': section,
            'slice_groupoid': {'objects': len(H.objects), 'morphisms': len(H.morphisms), 'components': len(components)},
        }

    def _rn(self, mu: Optional[str] = None, nu: Optional[str] = None,
            obj: Optional[str] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        if mu is None or nu is None:
            raise UsageError("rn needs --mu and --nu")
        X = self.model.action(obj) if obj else None
        first = self.model.valuation(mu, on=X)
        second = self.model.valuation(nu, on=X if X is not None else first.carrier)
        results: Dict[str, Any] = {'mu': first, 'nu': second}
        try:
            f = radon_nikodym(first, second)
        except NotWellSupported as e:
            return [check_result("well-supported", False, witness=str(e))], results
        checks = [check_result("well-supported", True)]
        checks.append(check_result("derivative-positive", all(v > 0 for v in f.values.values())))

        rebuilt = density_times(f, second)
        atoms = orbits(first.carrier)
        pairs = [(first(S), rebuilt(S)) for S in (first.carrier.subobject(o.elements) for o in atoms)]
        checks.append(check_result(
            "density-times-nu", all(is_close(a, b, self.tolerance) for a, b in pairs),
            deviation=max((_relative(a, b) for a, b in pairs), default=0.0),
        ))

        if len(atoms) <= EXHAUSTIVE_SUBSETS:
            subsets = list(subobject_lattice(first.carrier))
        else:
            picks = self.rng.integers(0, 2, size=(SAMPLED_SUBSETS, len(atoms)))
            subsets = [
                first.carrier.subobject(x for i, o in enumerate(atoms) if row[i] for x in o.elements)
                for row in picks
            ]
        worst, bad = 0.0, None
        for S in subsets:
            lhs, rhs = first(S), integrate(f * indicator(S), second)
            worst = max(worst, _relative(lhs, rhs))
            if bad is None and not is_close(lhs, rhs, self.tolerance):
                bad = sorted(S.elements)
        checks.append(check_result("rn-reproduces-mu", bad is None, witness=bad, deviation=worst))
        results['derivative'] = f
        results['subsets_checked'] = len(subsets)
        return checks, results

    def _modular_flow(self, measure: Optional[str] = None, obj: Optional[str] = None,
                      operator: Optional[str] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        X = self._carrier(measure, obj, operator)
        lam = density(self.model.section(measure, on=X))
        grid = self.settings.grid()
        ops = [self._load_operator(operator)] if operator else self._samples(X, 2)
        tol = self.tolerance

        basis_dim, null_dim = len(commutant_basis(X)), commutant_dimension_nullspace(X)
        checks = [check_result(
            "commutant-dimension", basis_dim == null_dim, witness={'basis': basis_dim, 'nullspace': null_dim},
        )]

        oracle = zero = law = auto = 0.0
        invariance = 0.0
        escaped = None
        coarse = grid[::max(1, len(grid) // 6)]
        for a in ops:
            scale = max(1.0, a.norm())
            zero = max(zero, float(np.abs(theta(a, 0.0, lam).data - a.data).max(initial=0.0)))
            for t in grid:
                flowed = theta(a, t, lam)
                oracle = max(oracle, float(np.abs(flowed.data - theta_oracle(a, t, lam).data).max(initial=0.0)) / scale)
                invariance = max(invariance, abs(density_weight(flowed, lam) - density_weight(a, lam)) / scale)
                adjoint = np.abs(theta(a.dag(), t, lam).data - flowed.dag().data).max(initial=0.0)
                auto = max(auto, float(adjoint) / scale)
                if escaped is None and is_in_algebra(a, tol) and not is_in_algebra(flowed, tol):
                    escaped = t
            for s in coarse:
                for t in coarse:
                    twice = theta(theta(a, t, lam), s, lam)
                    law = max(law, float(np.abs(twice.data - theta(a, s + t, lam).data).max(initial=0.0)) / scale)
        for a in ops[:4]:
            for b in ops[:4]:
                product_scale = max(1.0, a.norm() * b.norm() * len(X))
                for t in coarse:
                    gap = theta(a @ b, t, lam).data - (theta(a, t, lam) @ theta(b, t, lam)).data
                    auto = max(auto, float(np.abs(gap).max(initial=0.0)) / product_scale)

        checks.append(check_result("theta-at-zero", zero == 0.0, deviation=zero))
        checks.append(check_result("theta-oracle", oracle <= tol, deviation=oracle))
        checks.append(check_result("group-law", law <= tol, deviation=law))
        checks.append(check_result("automorphism", auto <= tol, deviation=auto))
        checks.append(check_result("weight-invariance", invariance <= tol, deviation=invariance))
        in_algebra = [a for a in ops if is_in_algebra(a, tol)]
        checks.append(check_result(
            "preserves-algebra", (escaped is None) if in_algebra else None,
            witness=None if escaped is None else {'t': escaped},
        ))

        cocycle = 0.0
        one = identity(X)
        for s in coarse:
            for t in coarse:
                gap = (modular_unitary(s, lam) @ modular_unitary(t, lam)).data - modular_unitary(s + t, lam).data
                cocycle = max(cocycle, float(np.abs(gap).max(initial=0.0)))
        for t in grid:
            U = modular_unitary(t, lam)
            cocycle = max(cocycle, float(np.abs((U @ modular_unitary(-t, lam)).data - one.data).max(initial=0.0)))
            for a in ops:
                cocycle = max(cocycle, float(np.abs((U.dag() @ a @ U).data - theta(a, t, lam).data).max(initial=0.0))
                              / max(1.0, a.norm()))
        checks.append(check_result("unitary-cocycle", cocycle <= tol, deviation=cocycle))

        bundle_ok = True
        for s in coarse:
            for t in coarse:
                F = tensor_char(LineBundleChar(s, lam), LineBundleChar(t, lam))
                bundle_ok = bundle_ok and math.isclose(F.t, s + t, rel_tol=0.0, abs_tol=1e-12)
                bundle_ok = bundle_ok and F.is_equivariant(F.section, 1.5, 2.0, tol)
        checks.append(check_result("line-bundle-tensor", bundle_ok))

        results: Dict[str, Any] = {
            'carrier': X.label,
            'density': lam,
            'commutant_dimension': basis_dim,
            'operators': len(ops),
            't_grid': grid,
        }
        if operator:
            results['flowed'] = {'t': grid[-1], 'operator': encode_operator(theta(ops[0], grid[-1], lam), X.label)}
        return checks, results

    def _kms(self, u: Optional[str] = None, v: Optional[str] = None,
             measure: Optional[str] = None) -> Tuple[List[CheckResult], Dict[str, Any]]:
        if u is None or v is None:
            raise UsageError("kms needs --u and --v")
        first, second = self._load_operator(u), self._load_operator(v)
        X = first.carrier
        if second.carrier != X:
            raise UsageError("--u and --v act on different actions")
        section = self.model.section(measure, on=X)
        lam, mu = density(section), as_valuation(section)
        grid = self.settings.grid()
        checks = kms_check(first, second, grid, lam, mu, self.tolerance)
        results: Dict[str, Any] = {'carrier': X.label, 'density': lam, 't_grid': grid}
        deviations = [c['deviation'] for c in checks if c['name'].startswith("kms-") and c['deviation'] is not None]
        results['max_deviation'] = max(deviations, default=0.0)
        if is_in_algebra(first, 1e-9) and is_in_algebra(second, 1e-9):
            results['F(0)'] = kms_function(first, second, 0.0, lam, mu)
            results['F(-i)'] = kms_function(first, second, -1j, lam, mu)
        return checks, results

    def _trace(self, measure: Optional[str] = None, obj: Optional[str] = None, samples: int = 4,
               strict: bool = False) -> Tuple[List[CheckResult], Dict[str, Any]]:
        X = self._carrier(measure, obj)
        lam = density(self.model.section(measure, on=X))
        ops = self._samples(X, samples)
        checks = trace_check(lam, ops, self.settings.grid(), self.tolerance, strict=strict)
        return checks, {
            'carrier': X.label,
            'density': lam,
            'component_constant': lam.is_component_constant(1e-12),
            'samples': len(ops),
        }

    def _state(self, measure: Optional[str] = None, obj: Optional[str] = None,
               samples: int = 4) -> Tuple[List[CheckResult], Dict[str, Any]]:
        X = self._carrier(measure, obj)
        mu = self.model.valuation(measure, on=X)
        total = float(mu.total)
        results: Dict[str, Any] = {'carrier': X.label, 'measure': mu}
        if total <= 0:
            return [check_result("nonzero-measure", False, witness=X.label)], results
        checks = [check_result("nonzero-measure", True)]

        vectors = np.eye(len(X), dtype=complex) / math.sqrt(total)
        eta = state_from_measure(X, vectors, mu, tolerance=max(self.tolerance, 1e-12))
        recovered = measure_from_state(eta, X, tolerance=max(self.tolerance, 1e-12))
        worst = max((abs(recovered.weights[r] - float(w) / total) for r, w in mu.weights.items()), default=0.0)
        checks.append(check_result("state-round-trip", worst <= self.tolerance, deviation=worst))
        checks += state_axioms(eta, X, self._samples(X, samples), self.tolerance)
        results['normalization'] = mu.total
        results['recovered'] = recovered
        return checks, results


def exit_code(report: Report) -> int:
    """1 when any check failed; not-applicable checks never count."""
    return 1 if any(c['status'] == FAIL for c in report['checks']) else 0


def render_text(report: Report) -> None:
    """Print a report as a rich table."""
    table = Table(title=f"topos-measure {report['command']}")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Deviation", justify="right")
    table.add_column("Witness", style="dim")
    colors = {PASS: "green", FAIL: "red"}
    for c in report['checks']:
        color = colors.get(c['status'], "yellow")
        deviation = "" if c['deviation'] is None else f"{c['deviation']:.3g}"
        witness = "" if c['witness'] is None else str(to_jsonable(c['witness']))
        table.add_row(c['name'], f"[{color}]{c['status']}[/{color}]", deviation, witness)
    console.print(table)
    console.print(f"[dim]seed {report['seed']} · tolerance {report['tolerance']} · {report['wall_time']:.3f}s[/dim]")
    if exit_code(report):
        console.print("[red]✗ Some checks failed[/red]")
    else:
        console.print("[green]✓ All checks passed[/green]")
