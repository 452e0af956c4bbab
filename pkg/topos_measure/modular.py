"""
Operators on l²(X), modular flow and the KMS condition

Matrices are indexed by the sorted element ids of an action and stored as
a[x, y] = ⟨e_x, a e_y⟩. The algebra A is the commutant of the transport maps:
block-diagonal matrices with a[g·x, g·y] = a[x, y]. A density λ̂ (a positive
value per element, constant on orbits) drives the modular flow

    θ_t(a)[x, y] = (λ̂(x)/λ̂(y))^{-it} · a[x, y]

whose KMS function relative to a valuation μ is

    F(z) = Σ_{x,y} m(x) · (λ̂(y)/λ̂(x))^{iz} · u[x, y] · v[y, x],   m = density of μ.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, null_space

from .exceptions import (
    CarrierMismatch, DomainError, GroupoidMismatch, NotBlockDiagonal, NotComponentConstant, NotEquivariant,
    NotInAlgebra, NotNormalized, NotOrbitConstant, NotPositive, UnknownElement,
)
from .groupoid import FiniteAction, Subobject, _UnionFind, orbits
from .invariant_measure import ChiSection
from .types import CheckResult, check_result
from .valuation import Valuation, valuation

# central-difference step for the holomorphy residual
CR_STEP = 1e-4
CR_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A complex matrix on l²(X), block-diagonal over the fibers of X."""
    carrier: FiniteAction
    data: np.ndarray

    @property
    def index(self) -> Dict[str, int]:
        return self.carrier.index

    def entry(self, x: str, y: str) -> complex:
        """⟨e_x, a e_y⟩."""
        idx = self.index
        return complex(self.data[idx[x], idx[y]])

    def dag(self) -> "OperatorMatrix":
        """Hermitian conjugate."""
        return OperatorMatrix(self.carrier, self.data.conj().T)

    def transpose(self) -> "OperatorMatrix":
        return OperatorMatrix(self.carrier, self.data.T.copy())

    def tr(self) -> complex:
        return complex(np.trace(self.data))

    def _coerce(self, other: "OperatorMatrix") -> np.ndarray:
        if other.carrier is not self.carrier and other.carrier != self.carrier:
            raise CarrierMismatch("operators act on different spaces")
        return other.data

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.carrier, self.data + self._coerce(other))

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.carrier, self.data - self._coerce(other))

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.carrier, self.data @ self._coerce(other))

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.carrier, self.data * scalar)

    __rmul__ = __mul__

    def allclose(self, other: "OperatorMatrix", tolerance: float = 1e-12) -> bool:
        return bool(np.allclose(self.data, self._coerce(other), rtol=0.0, atol=tolerance * max(1.0, self.norm())))

    def norm(self) -> float:
        return float(np.abs(self.data).max(initial=0.0))


def _block_mask(X: FiniteAction) -> np.ndarray:
    bases = [X.base[x] for x in X.elements]
    return np.array([[bx == by for by in bases] for bx in bases], dtype=bool).reshape(len(bases), len(bases))


def operator(X: FiniteAction, data, tolerance: float = 0.0) -> OperatorMatrix:
    """Wrap a matrix, checking shape and block structure.

    Raises:
        NotBlockDiagonal: If an entry couples elements over different objects
    """
    n = len(X)
    matrix = np.asarray(data, dtype=complex)
    if n == 0 and matrix.size == 0:
        matrix = np.zeros((0, 0), dtype=complex)
    if matrix.shape != (n, n):
        raise NotBlockDiagonal(f"expected a {n}×{n} matrix on {X.label}, got {matrix.shape}")
    off = np.abs(matrix[~_block_mask(X)]) if n else np.zeros(0)
    if off.size and off.max() > tolerance:
        i, j = np.argwhere((np.abs(matrix) > tolerance) & ~_block_mask(X))[0]
        raise NotBlockDiagonal(
            f"entry ({X.elements[i]}, {X.elements[j]}) couples different fibers of {X.label}"
        )
    return OperatorMatrix(X, matrix)


def from_entries(X: FiniteAction, entries: Sequence[Sequence]) -> OperatorMatrix:
    """Build an operator from ``[x, y, re, im]`` rows; omitted entries are zero."""
    idx = X.index
    matrix = np.zeros((len(X), len(X)), dtype=complex)
    for row in entries:
        x, y, re, im = row
        for element in (x, y):
            if element not in idx:
                raise UnknownElement(f"'{element}' is not an element of {X.label}")
        matrix[idx[x], idx[y]] += complex(re, im)
    return operator(X, matrix)


def identity(X: FiniteAction) -> OperatorMatrix:
    return OperatorMatrix(X, np.eye(len(X), dtype=complex))


def matrix_unit(X: FiniteAction, x: str, y: str) -> OperatorMatrix:
    """E_xy: sends e_y to e_x."""
    return from_entries(X, [[x, y, 1.0, 0.0]])


def projection(S: Subobject) -> OperatorMatrix:
    """P_S: e_x ↦ e_x for x in S, 0 otherwise."""
    X = S.carrier
    return OperatorMatrix(X, np.diag([1.0 + 0j if x in S else 0j for x in X.elements]))


def transport_matrix(X: FiniteAction, g: str) -> np.ndarray:
    """ρ(g) = Σ_{x over src(g)} E_{g·x, x}, a partial isometry on l²(X)."""
    idx = X.index
    rho = np.zeros((len(X), len(X)), dtype=complex)
    for x in X.fiber(X.groupoid.src(g)):
        rho[idx[X.act(g, x)], idx[x]] = 1.0
    return rho


def is_in_algebra(a: OperatorMatrix, tolerance: float = 1e-12) -> bool:
    """Block-diagonal and commuting with every ρ(g)."""
    X = a.carrier
    if len(X) and np.abs(a.data[~_block_mask(X)]).max(initial=0.0) > tolerance:
        return False
    scale = tolerance * max(1.0, a.norm())
    for g in X.groupoid.morphisms:
        rho = transport_matrix(X, g)
        if np.abs(a.data @ rho - rho @ a.data).max(initial=0.0) > scale:
            return False
    return True


def orbitals(X: FiniteAction) -> List[Tuple[Tuple[str, str], ...]]:
    """Orbits of same-fiber pairs (x, y) under (x, y) ↦ (g·x, g·y), ordered by least pair."""
    pairs = [(x, y) for obj in X.groupoid.objects for x in X.fiber(obj) for y in X.fiber(obj)]
    key = {p: f"{p[0]}\x00{p[1]}" for p in pairs}
    uf = _UnionFind(key.values())
    for g in X.groupoid.morphisms:
        for x in X.fiber(X.groupoid.src(g)):
            for y in X.fiber(X.groupoid.src(g)):
                uf.union(key[(x, y)], key[(X.act(g, x), X.act(g, y))])
    return [tuple(tuple(k.split("\x00")) for k in cls) for cls in uf.classes()]


def commutant_basis(X: FiniteAction) -> List[OperatorMatrix]:
    """Indicator matrices of the orbitals of X: a basis of A."""
    idx = X.index
    basis = []
    for orbital in orbitals(X):
        matrix = np.zeros((len(X), len(X)), dtype=complex)
        for x, y in orbital:
            matrix[idx[x], idx[y]] = 1.0
        basis.append(OperatorMatrix(X, matrix))
    return basis


def commutant_dimension_nullspace(X: FiniteAction) -> int:
    """dim A from the null space of the linear constraints aρ(g) − ρ(g)a = 0 on block-diagonal a."""
    idx = X.index
    n = len(X)
    slots = [(idx[x], idx[y]) for obj in X.groupoid.objects for x in X.fiber(obj) for y in X.fiber(obj)]
    if not slots:
        return 0
    rhos = [transport_matrix(X, g) for g in sorted(X.groupoid.morphisms)]
    if not rhos:
        return len(slots)
    columns = []
    for i, j in slots:
        unit = np.zeros((n, n), dtype=complex)
        unit[i, j] = 1.0
        columns.append(np.concatenate([(unit @ rho - rho @ unit).ravel() for rho in rhos]))
    constraints = np.stack(columns, axis=1)
    return int(null_space(constraints).shape[1])


@dataclass(frozen=True)
class DensitySection:
    """Positive values per element of X; a density when constant on orbits."""
    carrier: FiniteAction
    values: Dict[str, float]

    def vector(self) -> np.ndarray:
        return np.array([float(self.values[x]) for x in self.carrier.elements], dtype=float)

    def is_orbit_constant(self, tolerance: float = 0.0) -> bool:
        return all(
            abs(self.values[x] - self.values[o.rep]) <= tolerance * abs(self.values[o.rep])
            for o in orbits(self.carrier) for x in o
        )

    def is_component_constant(self, tolerance: float = 0.0) -> bool:
        return _component_violation(self, tolerance) is None


def _component_violation(lam: DensitySection, tolerance: float) -> Optional[Tuple[str, str]]:
    X = lam.carrier
    first: Dict[str, str] = {}
    for x in X.elements:
        rep = X.groupoid.component_of[X.base[x]]
        y = first.setdefault(rep, x)
        if abs(lam.values[x] - lam.values[y]) > tolerance * abs(lam.values[y]):
            return y, x
    return None


def density_section(X: FiniteAction, values: Mapping[str, float], require_orbit_constant: bool = True,
                    tolerance: float = 0.0) -> DensitySection:
    """Validate element values.

    Raises:
        UnknownElement: If an element has no value or a key is not an element
        NotPositive: If a value is not strictly positive
        NotOrbitConstant: If required and the values vary along an orbit
    """
    for x in X.elements:
        if x not in values:
            raise UnknownElement(f"density on {X.label} has no value at '{x}'")
    for x, value in values.items():
        if x not in X.base:
            raise UnknownElement(f"'{x}' is not an element of {X.label}")
        if not float(value) > 0:
            raise NotPositive(f"density value {value!r} at '{x}' is not positive")
    lam = DensitySection(X, {x: float(v) for x, v in values.items()})
    if require_orbit_constant and not lam.is_orbit_constant(tolerance):
        raise NotOrbitConstant(f"density on {X.label} is not constant on orbits")
    return lam


def density(section: ChiSection) -> DensitySection:
    """λ̂(x) = λ(orbit of x)/|orbit of x|."""
    X = section.carrier
    values = {}
    for o in orbits(X):
        for x in o:
            values[x] = float(section.values[o.rep]) / len(o)
    return DensitySection(X, values)


def valuation_density(mu: Valuation) -> DensitySection:
    """The element-level density m(x) = μ(orbit of x)/|orbit of x| of a valuation."""
    X = mu.carrier
    return DensitySection(X, {x: float(mu.weights[o.rep]) / len(o) for o in orbits(X) for x in o})


def weight(a: OperatorMatrix, mu: Valuation, tolerance: float = 1e-12) -> complex:
    """μ(a) = Σ over orbits of μ(o)·a[x_o, x_o].

    Raises:
        NotEquivariant: If the diagonal of a is not constant on orbits
    """
    if a.carrier != mu.carrier:
        raise CarrierMismatch("operator and valuation live on different actions")
    X = a.carrier
    idx = X.index
    diagonal = np.diag(a.data)
    total = 0j
    for o in orbits(X):
        d = diagonal[idx[o.rep]]
        for x in o:
            if abs(diagonal[idx[x]] - d) > tolerance * max(1.0, abs(d)):
                raise NotEquivariant(f"diagonal of the operator differs between '{o.rep}' and '{x}'")
        total += float(mu.weights[o.rep]) * d
    return complex(total)


def density_weight(a: OperatorMatrix, lam: DensitySection) -> complex:
    """Σ_x λ̂(x)·a[x, x]."""
    return complex(np.dot(lam.vector(), np.diag(a.data)))


def _log_ratios(lam: DensitySection) -> np.ndarray:
    """L[x, y] = log λ̂(x) − log λ̂(y)."""
    logs = np.log(lam.vector())
    return logs[:, None] - logs[None, :]


def theta(a: OperatorMatrix, t: float, lam: DensitySection) -> OperatorMatrix:
    """θ_t(a)[x, y] = (λ̂(x)/λ̂(y))^{-it}·a[x, y]."""
    return OperatorMatrix(a.carrier, np.exp(-1j * t * _log_ratios(lam)) * a.data)


def theta_oracle(a: OperatorMatrix, t: float, lam: DensitySection) -> OperatorMatrix:
    """diag(λ̂)^{-it}·a·diag(λ̂)^{it} through dense matrix exponentials."""
    generator = np.diag(np.log(lam.vector())).astype(complex)
    return OperatorMatrix(a.carrier, expm(-1j * t * generator) @ a.data @ expm(1j * t * generator))


def modular_unitary(t: float, lam: DensitySection) -> OperatorMatrix:
    """U_t = diag(λ̂^{it}); θ_t(a) = U_t* a U_t and U_t U_s = U_{t+s}."""
    return OperatorMatrix(lam.carrier, np.diag(np.exp(1j * t * np.log(lam.vector()))))


@dataclass(frozen=True)
class LineBundleChar:
    """The line bundle F_t of functions f on χ with f(r·α) = r^{-it}·f(α)."""
    t: float
    reference: Optional[DensitySection] = None

    def phase(self, r: float) -> complex:
        """r^{-it}."""
        return complex(np.exp(-1j * self.t * np.log(r)))

    def section(self, alpha: float) -> complex:
        """The canonical generator α ↦ α^{-it}."""
        return self.phase(alpha)

    def is_equivariant(self, f: Callable[[float], complex], alpha: float, r: float,
                       tolerance: float = 1e-12) -> bool:
        return abs(f(r * alpha) - self.phase(r) * f(alpha)) <= tolerance * max(1.0, abs(f(alpha)))


def tensor_char(first: LineBundleChar, second: LineBundleChar) -> LineBundleChar:
    """F_t ⊗ F_s = F_{t+s}."""
    if first.reference is not None and second.reference is not None and first.reference != second.reference:
        raise CarrierMismatch("line bundles are built on different densities")
    return LineBundleChar(first.t + second.t, first.reference or second.reference)


def _require_algebra(*operators: OperatorMatrix) -> None:
    for a in operators:
        if not is_in_algebra(a, 1e-9):
            raise NotInAlgebra("operator does not commute with the transport maps")


def _kms_terms(u: OperatorMatrix, v: OperatorMatrix, lam: DensitySection, mu: Valuation):
    """Coefficients c and log-ratios L with F(z) = Σ c·exp(iz·L)."""
    m = valuation_density(mu).vector()
    coeff = m[:, None] * u.data * v.data.T
    return coeff, -_log_ratios(lam)


def kms_function(u: OperatorMatrix, v: OperatorMatrix, z: complex, lam: DensitySection,
                 mu: Valuation) -> complex:
    """F(z) = Σ m(x)·(λ̂(y)/λ̂(x))^{iz}·u[x, y]·v[y, x] on the strip −1 ≤ Im z ≤ 0.

    Raises:
        DomainError: If Im z is outside [−1, 0]
        NotInAlgebra: If u or v does not commute with transport
    """
    if not -1.0 <= complex(z).imag <= 0.0:
        raise DomainError(f"Im(z) = {complex(z).imag} is outside [-1, 0]")
    _require_algebra(u, v)
    return _kms_eval(u, v, z, lam, mu)


def _kms_eval(u, v, z, lam, mu) -> complex:
    coeff, logs = _kms_terms(u, v, lam, mu)
    return complex(np.sum(coeff * np.exp(1j * z * logs)))


def _element_weight(a: OperatorMatrix, mu: Valuation) -> complex:
    return density_weight(a, valuation_density(mu))


def _scale(u: OperatorMatrix, v: OperatorMatrix, lam: DensitySection, mu: Valuation) -> float:
    coeff, logs = _kms_terms(u, v, lam, mu)
    return max(1.0, float(np.sum(np.abs(coeff) * np.maximum(1.0, np.exp(logs)))))


def holomorphy_residual(u: OperatorMatrix, v: OperatorMatrix, lam: DensitySection, mu: Valuation,
                        grid: Sequence[float]) -> Tuple[float, float]:
    """Largest Cauchy–Riemann residual |∂F/∂y − i·∂F/∂x| inside the strip, and its bound.

    The central-difference truncation error grows like |log r|³, so the bound
    is scaled by the largest log-ratio that carries weight.
    """
    coeff, logs = _kms_terms(u, v, lam, mu)
    live = np.abs(coeff) > 0
    spread = float(np.abs(logs[live]).max(initial=0.0))
    bound = CR_TOLERANCE * _scale(u, v, lam, mu) * (1.0 + spread) ** 3
    h = CR_STEP
    worst = 0.0
    for t in grid:
        for s in (-0.75, -0.5, -0.25):
            z = complex(t, s)
            dx = (_kms_eval(u, v, z + h, lam, mu) - _kms_eval(u, v, z - h, lam, mu)) / (2 * h)
            dy = (_kms_eval(u, v, z + 1j * h, lam, mu) - _kms_eval(u, v, z - 1j * h, lam, mu)) / (2 * h)
            worst = max(worst, abs(dy - 1j * dx))
    return worst, bound


def kms_check(u: OperatorMatrix, v: OperatorMatrix, grid: Sequence[float], lam: DensitySection,
              mu: Valuation, tolerance: float = 1e-9) -> List[CheckResult]:
    """Verify flow invariance of the weight and both KMS boundary identities on a t-grid.

    Deviations are relative to Σ|m(x)·u[x, y]·v[y, x]|·max(1, λ̂(y)/λ̂(x)).
    """
    scale = _scale(u, v, lam, mu)
    results = [
        check_result("density-orbit-constant", lam.is_orbit_constant(1e-12)),
        check_result("operands-in-algebra", is_in_algebra(u, 1e-9) and is_in_algebra(v, 1e-9)),
    ]

    invariance, real_edge, shifted_edge = 0.0, 0.0, 0.0
    escaped = None
    for t in grid:
        flowed = theta(u, t, lam)
        invariance = max(invariance, abs(_element_weight(flowed, mu) - _element_weight(u, mu)))
        real_edge = max(real_edge, abs(_kms_eval(u, v, t, lam, mu) - _element_weight(flowed @ v, mu)))
        shifted_edge = max(shifted_edge, abs(_kms_eval(u, v, t - 1j, lam, mu) - _element_weight(v @ flowed, mu)))
        if escaped is None and not is_in_algebra(flowed, 1e-9):
            escaped = t

    results.append(check_result("weight-flow-invariance", invariance / scale <= tolerance,
                                deviation=invariance / scale))
    results.append(check_result("kms-real-boundary", real_edge / scale <= tolerance, deviation=real_edge / scale))
    results.append(check_result("kms-shifted-boundary", shifted_edge / scale <= tolerance,
                                witness=None if shifted_edge / scale <= tolerance else "F(t-i) != mu(v theta_t(u))",
                                deviation=shifted_edge / scale))
    results.append(check_result("flow-preserves-algebra", escaped is None,
                                witness=None if escaped is None else {'t': escaped}))
    residual, bound = holomorphy_residual(u, v, lam, mu, grid)
    results.append(check_result("holomorphy", residual <= bound, witness={'bound': bound}, deviation=residual))
    return results


def find_trace_violation(lam: DensitySection) -> Optional[Tuple[OperatorMatrix, OperatorMatrix, float]]:
    """A pair (u, uᵀ) in A with Σλ̂·diag(uv) ≠ Σλ̂·diag(vu), when λ̂ varies inside a fiber.

    u is the orbital indicator of a same-fiber pair (x, y) with λ̂(x) ≠ λ̂(y).
    """
    X = lam.carrier
    for orbital, u in zip(orbitals(X), commutant_basis(X)):
        x, y = orbital[0]
        if lam.values[x] != lam.values[y]:
            v = u.transpose()
            deviation = abs(density_weight(u @ v, lam) - density_weight(v @ u, lam))
            return u, v, deviation
    return None


def trace_check(lam: DensitySection, samples: Sequence[OperatorMatrix], grid: Sequence[float],
                tolerance: float = 1e-9, strict: bool = True) -> List[CheckResult]:
    """Check that a component-constant density gives a trace with trivial flow.

    Raises:
        NotComponentConstant: If ``strict`` and λ̂ varies inside a component

    With ``strict=False`` a varying density is reported as a failed check,
    together with an explicit non-trace witness pair when one exists.
    """
    violation = _component_violation(lam, 1e-12)
    results: List[CheckResult] = []
    if violation is not None:
        if strict:
            raise NotComponentConstant(
                f"density differs between '{violation[0]}' and '{violation[1]}' of one component"
            )
        results.append(check_result("density-component-constant", False, witness=list(violation)))
        found = find_trace_violation(lam)
        if found is not None:
            u, v, deviation = found
            witness = {
                'u': sorted(p for p in _support(u)),
                'v': sorted(p for p in _support(v)),
            }
            results.append(check_result("trace-witness", deviation <= tolerance, witness=witness,
                                        deviation=deviation))
    else:
        results.append(check_result("density-component-constant", True))

    flow = 0.0
    for a in samples:
        for t in grid:
            flow = max(flow, float(np.abs(theta(a, t, lam).data - a.data).max(initial=0.0)))
    results.append(check_result("flow-is-identity", flow <= tolerance, deviation=flow))

    trace = 0.0
    for u in samples:
        for v in samples:
            gap = abs(density_weight(u @ v, lam) - density_weight(v @ u, lam))
            trace = max(trace, gap / max(1.0, u.norm() * v.norm() * float(lam.vector().max(initial=1.0))))
    results.append(check_result("trace-property", trace <= tolerance, deviation=trace))
    return results


def _support(a: OperatorMatrix) -> List[List[str]]:
    X = a.carrier
    return [[X.elements[i], X.elements[j]] for i, j in np.argwhere(np.abs(a.data) > 0)]


@dataclass(frozen=True, eq=False)
class State:
    """η(h) = Σ over orbits of X of μ(o)·⟨v(x_o), h v(x_o)⟩ on operators of l²(Y)."""
    space: FiniteAction
    vectors: np.ndarray  # column x is v(x)
    measure: Valuation

    def __call__(self, h: OperatorMatrix) -> complex:
        if h.carrier != self.space:
            raise CarrierMismatch("operator does not act on the state's space")
        idx = self.measure.carrier.index
        total = 0j
        for rep, w in self.measure.weights.items():
            vec = self.vectors[:, idx[rep]]
            total += float(w) * np.vdot(vec, h.data @ vec)
        return complex(total)


def state_from_measure(space: FiniteAction, vectors, mu: Valuation, tolerance: float = 1e-12) -> State:
    """The vector state of an equivariant family v: X → l²(Y) against μ on Sub(X).

    Args:
        space: Y
        vectors: |Y|×|X| array; column x is v(x), supported over the base of x
        mu: Valuation on X

    Raises:
        NotEquivariant: If v(g·x) ≠ ρ(g)v(x) or v(x) leaves the fiber over x's object
        NotNormalized: If Σ μ(o)‖v(x_o)‖² ≠ 1
    """
    X = mu.carrier
    if space.groupoid != X.groupoid:
        raise GroupoidMismatch("the vector family must map between actions of one groupoid")
    V = np.asarray(vectors, dtype=complex).reshape(len(space), len(X))
    idx_x, idx_y = X.index, space.index
    for x in X.elements:
        outside = [idx_y[y] for y in space.elements if space.base[y] != X.base[x]]
        if outside and np.abs(V[outside, idx_x[x]]).max() > tolerance:
            raise NotEquivariant(f"v({x}) has components outside the fiber over '{X.base[x]}'")
    for g in X.groupoid.morphisms:
        rho = transport_matrix(space, g)
        for x in X.fiber(X.groupoid.src(g)):
            if np.abs(V[:, idx_x[X.act(g, x)]] - rho @ V[:, idx_x[x]]).max(initial=0.0) > tolerance:
                raise NotEquivariant(f"v does not commute with transport '{g}' at '{x}'")
    norm = sum(float(w) * float(np.vdot(V[:, idx_x[rep]], V[:, idx_x[rep]]).real) for rep, w in mu.weights.items())
    if abs(norm - 1.0) > tolerance:
        raise NotNormalized(f"Σ μ(o)‖v(x_o)‖² = {norm!r}, expected 1")
    return State(space, V, mu)


def measure_from_state(eta: Callable[[OperatorMatrix], complex], X: FiniteAction,
                       tolerance: float = 1e-12) -> Valuation:
    """μ(o) = η(P_o) for each orbit o of X.

    Raises:
        NotNormalized: If η(1) ≠ 1
        NotPositive: If η is negative on an orbit projection
    """
    total = eta(identity(X))
    if abs(total - 1.0) > tolerance:
        raise NotNormalized(f"η(1) = {total!r}, expected 1")
    weights = {}
    for o in orbits(X):
        value = eta(projection(o)).real
        if value < -tolerance:
            raise NotPositive(f"η(P) = {value!r} < 0 on the orbit of '{o.rep}'")
        weights[o.rep] = max(value, 0.0)
    return valuation(X, weights)


def state_axioms(eta: Callable[[OperatorMatrix], complex], X: FiniteAction,
                 samples: Sequence[OperatorMatrix], tolerance: float = 1e-12) -> List[CheckResult]:
    """Positivity on a*a, η(1) = 1, and monotonicity along a chain of orbit projections."""
    positivity = min((eta(a.dag() @ a).real for a in samples), default=0.0)
    scale = max([1.0] + [a.norm() ** 2 for a in samples])
    normalization = abs(eta(identity(X)) - 1.0)
    chain, growing = X.empty, True
    previous = 0.0
    for o in orbits(X)[:8]:
        chain = chain.union(o)
        value = eta(projection(chain)).real
        growing = growing and value >= previous - tolerance
        previous = value
    return [
        check_result("state-positivity", positivity >= -tolerance * scale, deviation=min(positivity, 0.0)),
        check_result("state-normalization", normalization <= tolerance, deviation=normalization),
        check_result("state-monotone", growing),
    ]
