"""Custom exceptions for topos-measure."""

from typing import Optional


class ToposMeasureError(Exception):
    """Base exception for all topos-measure errors."""
    pass


class ConfigError(ToposMeasureError):
    """Configuration-related errors.

    Raised when:
    - Model file is missing
    - Model file is empty
    - A name given on the command line is not defined in the model
    """
    pass


class ParseError(ConfigError):
    """Model file cannot be parsed.

    Raised when:
    - JSON syntax is invalid
    - YAML syntax is invalid
    - The top level is not a mapping
    """
    pass


class ValidationError(ToposMeasureError):
    """Model validation errors.

    Raised when:
    - The model schema is violated
    - A cross-reference does not resolve
    - A groupoid, action or map breaks its laws

    ``path`` is a JSON pointer into the model file, when one is known.
    """

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.path = path

    def at(self, prefix: str) -> "ValidationError":
        """Prefix the JSON pointer with the enclosing section."""
        self.path = prefix + (self.path or "")
        return self

    def __str__(self) -> str:
        if self.path:
            return f"{self.path}: {self.message}"
        return self.message


class GroupoidError(ValidationError):
    """Composition table is not a groupoid."""
    pass


class DanglingEndpoint(GroupoidError):
    """A morphism or table entry names an object or morphism that does not exist."""
    pass


class IncompleteComposition(GroupoidError):
    """A composable pair has no entry, or an entry has the wrong endpoints."""
    pass


class MissingIdentity(GroupoidError):
    """An object has no neutral endomorphism."""
    pass


class NonAssociative(GroupoidError):
    """(f∘g)∘h differs from f∘(g∘h) for some composable triple."""
    pass


class MissingInverse(GroupoidError):
    """A morphism has no two-sided inverse."""
    pass


class ActionError(ValidationError):
    """Action or equivariant map errors.

    Raised when:
    - A transport map is not a bijection between fibers
    - Transport does not respect composition or identities
    - A map does not commute with transport
    - Two actions live over different groupoids
    """
    pass


class NotBijective(ActionError):
    """A transport map is not a bijection fiber(src) → fiber(dst)."""
    pass


class NotFunctorial(ActionError):
    """transport(g∘h) differs from transport(g)∘transport(h)."""
    pass


class NotNatural(ActionError):
    """An equivariant map does not commute with transport."""
    pass


class GroupoidMismatch(ActionError):
    """Operands live over different groupoids, or maps do not share a codomain."""
    pass


class UnknownElement(ActionError):
    """An element id is not in any fiber of the action."""
    pass


class MeasureError(ToposMeasureError):
    """Valuation, invariant measure and section errors.

    Raised when:
    - Weights do not match the orbits of the carrier
    - A weight is negative or not finite
    - A hypothesis of an operation (well-supported, epi, invariant) fails
    - The descent condition fails when gluing sections
    """
    pass


class MissingOrbitWeight(MeasureError):
    """An orbit of the carrier has no weight."""
    pass


class UnknownOrbit(MeasureError):
    """A weight is keyed by something that is not an orbit representative."""
    pass


class NegativeWeight(MeasureError):
    """A valuation weight is negative."""
    pass


class NonFiniteWeight(MeasureError):
    """A valuation weight is infinite or NaN."""
    pass


class NotInvariant(MeasureError):
    """A subset is not closed under transport."""
    pass


class CarrierMismatch(MeasureError):
    """Operands are defined on different actions."""
    pass


class NotWellSupported(MeasureError):
    """A valuation gives zero mass to a nonzero subobject."""
    pass


class NotOrbitConstant(MeasureError):
    """A pushed-forward function is not constant on orbits."""
    pass


class NotEpi(MeasureError):
    """A map required to be an epimorphism is not surjective."""
    pass


class NoCover(MeasureError):
    """No object of the measured class covers the target."""
    pass


class NotDownwardClosed(MeasureError):
    """The measured class contains the target of a map but not its source."""
    pass


class DescentFailure(MeasureError):
    """The two pullbacks of a section to the fiber product differ.

    ``witness`` is the representative of an orbit of the fiber product on
    which they disagree.
    """

    def __init__(self, message: str, witness: Optional[str] = None):
        super().__init__(message)
        self.witness = witness


class NotPositive(MeasureError):
    """A section or ratio value is not strictly positive."""
    pass


class OperatorError(ToposMeasureError):
    """Operator algebra errors.

    Raised when:
    - A matrix couples elements of different fibers
    - An operator does not commute with transport
    - A density is not of the required shape
    - A state is not normalized
    """
    pass


class NotBlockDiagonal(OperatorError):
    """A matrix has entries between elements of different fibers."""
    pass


class NotEquivariant(OperatorError):
    """A diagonal or vector field is not compatible with transport."""
    pass


class NotInAlgebra(OperatorError):
    """An operator does not commute with every transport map."""
    pass


class DomainError(OperatorError):
    """A KMS argument lies outside the strip -1 <= Im(z) <= 0."""
    pass


class NotComponentConstant(OperatorError):
    """A density is not constant on the elements of a component."""
    pass


class NotNormalized(OperatorError):
    """A state candidate does not have total mass one."""
    pass


class UsageError(ToposMeasureError):
    """Command line misuse.

    Raised when:
    - A required flag is missing
    - A flag value cannot be parsed
    """
    pass
