"""Catalog of magnetic field families with their symmetry operators.

Every family is a closed-form field B(x) built from sympy expressions, so
derivatives of any order are exact. Families of the first table admit Lie
symmetries only, those of the second table admit higher (matrix valued) first
order symmetries as well. Equivalence transformations act on fields and on
operators consistently: a symmetry of B transforms into a symmetry of the
transformed field.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import dataclasses
import logging
import math
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from .determining import FirstOrderOperator, lie_reduction_check
from .enums import Domain, FamilyId, OperatorId, SymmetryKind
from .failures import AdmissibilityError, DomainError, InvalidRegimeError, NoRealRootError
from .jet import ANGLE, RADIUS, X1, X2, ExprJet, as_points

logger = logging.getLogger(__name__)

PUNCTURE_RADIUS = 1e-6
"""Points closer than this to a singular center are outside the domain."""

DEFAULT_ANNULUS = (0.2, 3.0)

Profile = Callable[[sympy.Expr], sympy.Expr]


def gaussian_profile(s: sympy.Expr) -> sympy.Expr:
    return sympy.exp(-s ** 2 / 4)


def ring_profile(s: sympy.Expr) -> sympy.Expr:
    return s * sympy.exp(-s ** 2 / 5) / 2


def lorentz_profile(s: sympy.Expr) -> sympy.Expr:
    return 1 / (1 + s ** 2)


def saddle_profile(u: sympy.Expr, v: sympy.Expr) -> sympy.Expr:
    return sympy.exp(-(u ** 2 + 2 * v ** 2) / 5) * (1 + u * v / 3)


@dataclasses.dataclass(frozen=True)
class FieldParams:
    """
    Parameters and free profile functions of a field family.

    Profiles are callables mapping a sympy expression (r, x1 or x2) to a sympy
    expression; ``plane_profile`` takes (x1, x2). ``potential`` fills the scalar
    potential slot compatible with the family's Lie symmetries and is called
    with the same variables.
    """
    mu: float = 1.0
    nu: float = 0.5
    k: float = 1
    delta: int = 1
    c: float = 1.0
    branch: int = 1
    omega: float = 0.0
    f1: Profile = gaussian_profile
    f2: Profile = ring_profile
    f3: Profile = lorentz_profile
    plane_profile: Callable[[sympy.Expr, sympy.Expr], sympy.Expr] = saddle_profile
    potential: Optional[Callable] = None

    def replace(self, **changes) -> FieldParams:
        return dataclasses.replace(self, **changes)

    def to_json(self) -> Dict:
        """Numeric parameters and the names of the profile functions."""
        result = {name: getattr(self, name) for name in ("mu", "nu", "k", "delta", "c", "branch", "omega")}
        for name in ("f1", "f2", "f3", "plane_profile", "potential"):
            profile = getattr(self, name)
            result[name] = getattr(profile, "__name__", repr(profile)) if profile is not None else None
        return result


@dataclasses.dataclass(frozen=True)
class SymmetryDescriptor:
    """A symmetry operator attached to a family together with its printed form."""

    operator_id: OperatorId
    operator: FirstOrderOperator
    printed_form: str
    note: str = ""
    parameters: Tuple[Tuple[str, float], ...] = ()

    def to_json(self) -> Dict:
        return {"operator": self.operator_id.value, "printed_form": self.printed_form}

    @property
    def kind(self) -> SymmetryKind:
        return lie_reduction_check(self.operator)

    @property
    def constants(self) -> Dict[str, float]:
        result = dict(self.parameters)
        try:
            result.update(self.operator.reduced_constants().to_json())
        except InvalidRegimeError:
            pass
        return result


class FieldFamily:
    """
    A closed-form magnetic field B(x) = (B¹, B², B³) together with its symmetry operators.

    :ivar family_id: The catalog entry this field was built from.
    :ivar components: The three sympy expressions of the field.
    :ivar center: The singular center for punctured domains or the center of a disc domain.
    :ivar radial_bounds: Allowed distances (lower, upper) from the center.
    """

    def __init__(self, family_id: FamilyId, params: FieldParams, components: Sequence[sympy.Expr],
                 operators: Sequence[SymmetryDescriptor], domain: Domain = Domain.PLANE,
                 center: Tuple[float, float] = (0.0, 0.0), radial_bounds: Tuple[float, float] = (0.0, math.inf),
                 potential_variable: str = "none", divergence_free_claim: bool = False, note: str = ""):
        self.family_id = family_id
        self.params = params
        self.components = tuple(sympy.sympify(c) for c in components)
        self.operators = tuple(operators)
        self.domain = domain
        self.center = (float(center[0]), float(center[1]))
        self.radial_bounds = (float(radial_bounds[0]), float(radial_bounds[1]))
        self.potential_variable = potential_variable
        self.divergence_free_claim = divergence_free_claim
        self.note = note

    @cached_property
    def _jets(self) -> Tuple[ExprJet, ...]:
        return tuple(ExprJet(component) for component in self.components)

    def __repr__(self):
        return "FieldFamily(%s)" % self.family_id.value

    @property
    def name(self) -> str:
        return self.family_id.value

    def to_json(self) -> Dict:
        return {"family": self.name, "params": self.params.to_json()}

    def domain_mask(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        distance = np.hypot(x1 - self.center[0], x2 - self.center[1])
        lower, upper = self.radial_bounds
        return (distance >= lower) & (distance < upper)

    def check_domain(self, x1, x2):
        x1, x2, _ = as_points(x1, x2)
        inside = self.domain_mask(x1, x2)
        if not np.all(inside):
            index = int(np.argmin(inside))
            raise DomainError("Field %s is not defined at (%g, %g): allowed distance from %s is [%g, %g)"
                              % (self.name, x1[index], x2[index], self.center, *self.radial_bounds))

    def value(self, x1, x2) -> np.ndarray:
        """B(x) with shape (3, P)."""
        x1, x2, _ = as_points(x1, x2)
        self.check_domain(x1, x2)
        values = np.stack([jet.evaluate(x1, x2) for jet in self._jets])
        if not np.all(np.isfinite(values)):
            raise DomainError("Field %s is not finite at some of the requested points" % self.name)
        return values.real

    def jacobian(self, x1, x2) -> np.ndarray:
        """∂_bB^k with shape (3, 2, P)."""
        x1, x2, _ = as_points(x1, x2)
        self.check_domain(x1, x2)
        return np.stack([np.stack([jet.evaluate(x1, x2, (1, 0)), jet.evaluate(x1, x2, (0, 1))])
                         for jet in self._jets]).real

    def __call__(self, x1: float, x2: float) -> np.ndarray:
        """B at a single point."""
        return self.value(x1, x2)[:, 0]

    def divergence(self, x1, x2) -> np.ndarray:
        jacobian = self.jacobian(x1, x2)
        return jacobian[0, 0] + jacobian[1, 1]

    def sampling_annulus(self) -> Tuple[float, float]:
        """Radii (around the center) used for random sampling, kept away from singular sets."""
        lower = max(DEFAULT_ANNULUS[0], 10 * self.radial_bounds[0])
        upper = min(DEFAULT_ANNULUS[1], 0.95 * self.radial_bounds[1])
        if upper <= lower:
            lower = 0.25 * upper
        return lower, upper

    def potential_expression(self) -> Optional[sympy.Expr]:
        """The scalar potential V compatible with the Lie symmetries, or None when no potential was given."""
        if self.params.potential is None:
            return None
        variables = {"r": (RADIUS,), "x1": (X1,), "x2": (X2,), "any": (X1, X2)}.get(self.potential_variable)
        if variables is None:
            raise DomainError("Family %s has no compatible scalar potential slot" % self.name)
        return sympy.sympify(self.params.potential(*variables))

    def operator(self, operator_id: OperatorId) -> SymmetryDescriptor:
        for descriptor in self.operators:
            if descriptor.operator_id == operator_id:
                return descriptor
        raise DomainError("Family %s has no operator %s" % (self.name, operator_id.value))

    def transformed(self, components: Sequence[sympy.Expr], operators: Sequence[SymmetryDescriptor],
                    center: Tuple[float, float], radial_bounds: Tuple[float, float]) -> FieldFamily:
        return FieldFamily(self.family_id, self.params, components, operators, self.domain, center, radial_bounds,
                           self.potential_variable, self.divergence_free_claim, self.note)


def _operator(name: str, rotation=(0, 0, 0, 0), translation=((0, 0), (0, 0), (0, 0), (0, 0)),
              omega=(0, 0, 0, 0)) -> FirstOrderOperator:
    return FirstOrderOperator(rotation=rotation, translation=translation, omega=omega, name=name)


def _require_integer(value: float, name: str, family: FamilyId) -> int:
    if not float(value).is_integer():
        raise AdmissibilityError("%s of family %s must be an integer, got %s" % (name, family.value, value),
                                 condition="single-valuedness (%s integer)" % name)
    return int(value)


def solve_phi(r, mu: float, nu: float, c: float, branch: int = 1) -> np.ndarray:
    """
    Root of (μ²r² + 1)φ² + 2νφ - c = 0 on the chosen branch.

    The branch +1 is (-ν + √D)/(μ²r² + 1), the branch -1 is (-ν - √D)/(μ²r² + 1), D = ν² + c(μ²r² + 1).
    The cancellation free form is used on each branch.

    :raises NoRealRootError: Where D < 0.
    """
    if branch not in (1, -1):
        raise DomainError("Branch must be +1 or -1, got %s" % branch)
    r = np.asarray(r, dtype=float)
    leading = mu ** 2 * r ** 2 + 1
    discriminant = nu ** 2 + c * leading
    if np.any(discriminant < 0):
        index = int(np.argmin(discriminant))
        raise NoRealRootError("No real root of the profile equation at r = %g (discriminant %g)"
                              % (np.ravel(r)[index], np.ravel(discriminant)[index]))
    root = np.sqrt(discriminant)
    direct = (-nu + branch * root) / leading
    # -ν ± √D cancels when ν and the branch sign agree
    denominator = nu + branch * root
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = np.where(denominator != 0, c / np.where(denominator != 0, denominator, 1.0), direct)
    cancels = np.sign(nu) == branch
    result = np.where(cancels & (denominator != 0), stable, direct)
    return result if result.ndim else float(result)


def _phi_expression(params: FieldParams, radius: sympy.Expr) -> sympy.Expr:
    mu, nu, c = params.mu, params.nu, params.c
    leading = mu ** 2 * radius ** 2 + 1
    return (-nu + params.branch * sympy.sqrt(nu ** 2 + c * leading)) / leading


def _t2_4_disc_radius(params: FieldParams) -> float:
    if params.c >= 0:
        if params.nu ** 2 + params.c < 0:
            raise NoRealRootError("Profile equation of T2.4 has no real root")
        return math.inf
    squared = (params.nu ** 2 / (-params.c) - 1) / params.mu ** 2 if params.mu != 0 else math.inf
    if squared <= 0:
        raise NoRealRootError("Profile equation of T2.4 has no real root for ν = %g, c = %g" % (params.nu, params.c))
    return math.sqrt(squared)


def build_family(family_id: Union[FamilyId, str], params: FieldParams = FieldParams()) -> FieldFamily:
    """
    Construct a catalog field with its symmetry operators.

    :raises AdmissibilityError: For non-integer winding numbers or δ ∉ {0, 1}.
    """
    if isinstance(family_id, str):
        family_id = FamilyId.from_string(family_id)
    builder = _BUILDERS[family_id]
    family = builder(params)
    logger.debug("Built field family %s with %d symmetry operators" % (family.name, len(family.operators)))
    return family


def _t1_1(p: FieldParams) -> FieldFamily:
    k = _require_integer(p.k, "k", FamilyId.T1_1)
    c, s = sympy.cos(k * ANGLE), sympy.sin(k * ANGLE)
    f1, f2, f3 = p.f1(RADIUS), p.f2(RADIUS), p.f3(RADIUS)
    rotation = SymmetryDescriptor(OperatorId.Q1_TILDE, _operator("Q̃1", rotation=(1, 0, 0, 0),
                                                                 omega=(0, 0, 0, sympy.Rational(-k, 2))),
                                  "L + (k/2)σ3", "spin term enters with -k/2 for this orientation",
                                  (("k", k),))
    return FieldFamily(FamilyId.T1_1, p, (c * f1 + s * f2, c * f2 - s * f1, f3), (rotation,),
                       Domain.PUNCTURED_PLANE, radial_bounds=(PUNCTURE_RADIUS, math.inf), potential_variable="r")


def _t1_2(p: FieldParams) -> FieldFamily:
    k = _require_integer(p.k, "k", FamilyId.T1_2)
    decay = RADIUS ** (-k)
    rotation = SymmetryDescriptor(OperatorId.Q1_TILDE, _operator("Q̃1", rotation=(1, 0, 0, 0),
                                                                 omega=(0, 0, 0, sympy.Rational(k, 2))),
                                  "L + (k/2)σ3", parameters=(("k", k), ("mu", p.mu)))
    return FieldFamily(FamilyId.T1_2, p, (p.mu * sympy.cos(k * ANGLE) * decay, p.mu * sympy.sin(k * ANGLE) * decay,
                                          p.f3(RADIUS)), (rotation,), Domain.PUNCTURED_PLANE,
                       radial_bounds=(PUNCTURE_RADIUS, math.inf), potential_variable="r", divergence_free_claim=True)


def _t1_3(p: FieldParams) -> FieldFamily:
    rotation = SymmetryDescriptor(OperatorId.Q1, _operator("Q1", rotation=(1, 0, 0, 0),
                                                           omega=(0, 0, 0, sympy.Rational(1, 2))),
                                  "L + (1/2)σ3", parameters=(("mu", p.mu),))
    f1 = p.f1(RADIUS)
    return FieldFamily(FamilyId.T1_3, p, (p.mu * sympy.cos(ANGLE) * f1, p.mu * sympy.sin(ANGLE) * f1,
                                          p.f2(RADIUS)), (rotation,), Domain.PUNCTURED_PLANE,
                       radial_bounds=(PUNCTURE_RADIUS, math.inf), potential_variable="r",
                       note="divergence free only for f1 ∝ 1/r")


def _t1_4(p: FieldParams) -> FieldFamily:
    if p.delta not in (0, 1):
        raise AdmissibilityError("δ of family T1.4 must be 0 or 1, got %s" % p.delta, condition="δ ∈ {0, 1}")
    delta = int(p.delta)
    c, s = sympy.cos(delta * X1), sympy.sin(delta * X1)
    f1, f2, f3 = p.f1(X2), p.f2(X2), p.f3(X2)
    translation = SymmetryDescriptor(OperatorId.Q2_TILDE,
                                     _operator("Q̃2", translation=((1, 0), (0, 0), (0, 0), (0, 0)),
                                               omega=(0, 0, 0, sympy.Rational(-delta, 2))),
                                     "P1 - (δ/2)σ3", parameters=(("delta", delta),))
    return FieldFamily(FamilyId.T1_4, p, (c * f1 + s * f2, c * f2 - s * f1, f3), (translation,),
                       potential_variable="x2")


def _t1_5(p: FieldParams) -> FieldFamily:
    translation = SymmetryDescriptor(OperatorId.Q2, _operator("Q2", translation=((1, 0), (0, 0), (0, 0), (0, 0)),
                                                              omega=(0, 0, 0, sympy.Rational(-1, 2))),
                                     "P1 - (1/2)σ3", parameters=(("mu", p.mu),))
    decay = sympy.exp(-X2)
    return FieldFamily(FamilyId.T1_5, p, (p.mu * decay * sympy.cos(X1), -p.mu * decay * sympy.sin(X1), p.f3(X2)),
                       (translation,), potential_variable="x2", divergence_free_claim=True)


def _sigma3() -> SymmetryDescriptor:
    return SymmetryDescriptor(OperatorId.SIGMA3, _operator("σ3", omega=(0, 0, 0, 1)), "σ3")


def _t1_6(p: FieldParams) -> FieldFamily:
    return FieldFamily(FamilyId.T1_6, p, (0, 0, p.plane_profile(X1, X2)), (_sigma3(),), potential_variable="any",
                       note="decoupled: the spin components separate")


def _t1_7(p: FieldParams) -> FieldFamily:
    translation = SymmetryDescriptor(OperatorId.P2, _operator("P2", translation=((0, 1), (0, 0), (0, 0), (0, 0))),
                                     "P2")
    return FieldFamily(FamilyId.T1_7, p, (0, 0, p.f1(X1)), (translation, _sigma3()), potential_variable="x1",
                       note="decoupled: the spin components separate")


def _t1_8(p: FieldParams) -> FieldFamily:
    rotation = SymmetryDescriptor(OperatorId.L, _operator("L", rotation=(1, 0, 0, 0)), "L")
    return FieldFamily(FamilyId.T1_8, p, (0, 0, p.f1(RADIUS)), (rotation, _sigma3()), Domain.PUNCTURED_PLANE,
                       radial_bounds=(PUNCTURE_RADIUS, math.inf), potential_variable="r",
                       note="decoupled: the spin components separate")


def _t2_1(p: FieldParams) -> FieldFamily:
    mu, nu = p.mu, p.nu
    q2 = SymmetryDescriptor(OperatorId.Q2, _operator("Q2", translation=((1, 0), (0, 0), (0, 0), (0, 0)),
                                                     omega=(0, 0, 0, sympy.Rational(1, 2))),
                            "P1 - (1/2)σ3", "the field winds as e^{+ix1}, so the spin term enters with +1/2")
    p2 = SymmetryDescriptor(OperatorId.P2, _operator("P2", translation=((0, 1), (0, 0), (0, 0), (0, 0))), "P2")
    q3 = SymmetryDescriptor(OperatorId.Q3, _operator("Q3", translation=((0, 0), (0, 0), (0, 0), (1, 0)),
                                                     omega=(0, -mu * sympy.cos(X1), -mu * sympy.sin(X1), -nu)),
                            "σ3(P1 - ν) - μ(σ1 cos x1 + σ2 sin x1)", parameters=(("mu", mu), ("nu", nu)))
    return FieldFamily(FamilyId.T2_1, p, (mu * sympy.cos(X1), mu * sympy.sin(X1), nu), (q2, p2, q3))


def _t2_2(p: FieldParams) -> FieldFamily:
    k = _require_integer(p.k, "k", FamilyId.T2_2)
    mu, nu = p.mu, p.nu
    c, s = sympy.cos(k * ANGLE), sympy.sin(k * ANGLE)
    rotation = SymmetryDescriptor(OperatorId.Q1_TILDE, _operator("Q̃1", rotation=(1, 0, 0, 0),
                                                                 omega=(0, 0, 0, sympy.Rational(k, 2))),
                                  "L + (k/2)σ3", parameters=(("k", k),))
    q4 = SymmetryDescriptor(OperatorId.Q4, _operator("Q4", rotation=(0, 0, 0, 1),
                                                     omega=(sympy.Rational(k, 2), -mu * s, mu * c, -nu)),
                            "σ3(Q̃1 + ν) - μ(σ1 sin kθ - σ2 cos kθ)", "ν enters with a minus sign",
                            (("k", k), ("mu", mu), ("nu", nu)))
    inverse_square = RADIUS ** -2
    return FieldFamily(FamilyId.T2_2, p, (mu * k * s * inverse_square, -mu * k * c * inverse_square,
                                          k * nu * inverse_square), (rotation, q4), Domain.PUNCTURED_PLANE,
                       radial_bounds=(PUNCTURE_RADIUS, math.inf))


def _t2_3(p: FieldParams) -> FieldFamily:
    mu, nu = p.mu, p.nu
    if mu == 0 or nu == 0:
        raise AdmissibilityError("Family T2.3 needs μ ≠ 0 and ν ≠ 0, got μ = %g, ν = %g" % (mu, nu),
                                 condition="non-empty disc |x| < |ν/μ|")
    root = sympy.sqrt(nu ** 2 - mu ** 2 * RADIUS ** 2)
    q1 = SymmetryDescriptor(OperatorId.Q1, _operator("Q1", rotation=(1, 0, 0, 0),
                                                     omega=(0, 0, 0, sympy.Rational(1, 2))), "L + (1/2)σ3")
    q5 = SymmetryDescriptor(OperatorId.Q5, _operator("Q5", translation=((0, 0), (1, 0), (0, 1), (0, 0)),
                                                     omega=(0, -mu * X2 / 2, mu * X1 / 2, -root / 2)),
                            "σ1P1 + σ2P2 - (μ/2)(σ1x2 - σ2x1) - (1/2)σ3 √(ν² - μ²r²)",
                            parameters=(("mu", mu), ("nu", nu)))
    return FieldFamily(FamilyId.T2_3, p, (mu ** 2 * X2 / (2 * root), -mu ** 2 * X1 / (2 * root), mu / 2), (q1, q5),
                       Domain.DISC, radial_bounds=(0.0, abs(nu / mu)))


def _t2_4(p: FieldParams) -> FieldFamily:
    mu, nu = p.mu, p.nu
    disc_radius = _t2_4_disc_radius(p)
    rho = sympy.Symbol("rho", positive=True)
    phi_of_rho = _phi_expression(p, rho)
    phi = phi_of_rho.subs(rho, RADIUS)
    phi_prime = sympy.diff(phi_of_rho, rho).subs(rho, RADIUS)
    radial_derivative = sympy.diff(rho * phi_of_rho, rho).subs(rho, RADIUS)
    q1 = SymmetryDescriptor(OperatorId.Q1, _operator("Q1", rotation=(1, 0, 0, 0),
                                                     omega=(0, 0, 0, sympy.Rational(1, 2))), "L + (1/2)σ3")
    q6 = SymmetryDescriptor(OperatorId.Q6, _operator("Q6", rotation=(0, 0, 0, mu),
                                                     translation=((0, 0), (1, 0), (0, 1), (0, 0)),
                                                     omega=(mu / 2, mu * X2 * phi, -mu * X1 * phi, phi + nu)),
                            "σ1P1 + σ2P2 + μ(σ3Q1 + σ1x2φ - σ2x1φ) + σ3(φ + ν)",
                            parameters=(("mu", mu), ("nu", nu), ("c", p.c)))
    domain = Domain.PLANE if math.isinf(disc_radius) else Domain.DISC
    return FieldFamily(FamilyId.T2_4, p, (X2 * phi_prime / RADIUS, -X1 * phi_prime / RADIUS,
                                          -mu * radial_derivative), (q1, q6), domain,
                       radial_bounds=(0.0, disc_radius))


_BUILDERS = {FamilyId.T1_1: _t1_1, FamilyId.T1_2: _t1_2, FamilyId.T1_3: _t1_3, FamilyId.T1_4: _t1_4,
             FamilyId.T1_5: _t1_5, FamilyId.T1_6: _t1_6, FamilyId.T1_7: _t1_7, FamilyId.T1_8: _t1_8,
             FamilyId.T2_1: _t2_1, FamilyId.T2_2: _t2_2, FamilyId.T2_3: _t2_3, FamilyId.T2_4: _t2_4}


def eval_field(family: FieldFamily, x1: float, x2: float) -> np.ndarray:
    """B(x) at one point as a 3-vector."""
    return family(x1, x2)


def symmetry_operators(family: FieldFamily) -> List[SymmetryDescriptor]:
    return list(family.operators)


def divergence(family: FieldFamily, x1, x2) -> np.ndarray:
    """∂₁B¹ + ∂₂B²."""
    return family.divergence(x1, x2)


def compatible_potential(family: FieldFamily) -> str:
    """The variable a scalar potential may depend on without breaking the Lie symmetries."""
    return family.potential_variable


def printed_variants(mu: float, strength: float) -> Dict[str, Tuple[sympy.Expr, sympy.Expr, sympy.Expr]]:
    """
    The two cosh-profile specializations of T2.4 as printed, with r = sinh(ρ)/μ.

    ``cosh3`` belongs to c = strength², ν = 0 and ``cosh4`` to c = 0, ν = -4·strength.
    """
    rho = sympy.asinh(mu * RADIUS)
    sine, cosine = sympy.sin(ANGLE), sympy.cos(ANGLE)
    variants = {}
    for label, power in (("cosh3", 3), ("cosh4", 4)):
        scale = strength / sympy.cosh(rho) ** power
        variants[label] = (-scale * sine * sympy.sinh(rho), scale * cosine * sympy.sinh(rho), scale)
    return variants


def variant_params(mu: float, strength: float, label: str) -> FieldParams:
    """The generic T2.4 parameters a printed specialization claims to reproduce."""
    if label == "cosh3":
        return FieldParams(mu=mu, nu=0.0, c=strength ** 2, branch=1 if strength >= 0 else -1)
    if label == "cosh4":
        return FieldParams(mu=mu, nu=-4 * strength, c=0.0, branch=1 if strength >= 0 else -1)
    raise DomainError("Unknown printed variant %s" % label)


def variant_discrepancy(mu: float, strength: float, label: str, x1, x2) -> float:
    """Largest difference between a printed cosh specialization and the generic T2.4 field."""
    variant = printed_variants(mu, strength)[label]
    family = build_family(FamilyId.T2_4, variant_params(mu, strength, label))
    x1, x2, _ = as_points(x1, x2)
    generic = family.value(x1, x2)
    printed = np.stack([ExprJet(component).evaluate(x1, x2).real for component in variant])
    return float(np.max(np.abs(generic - printed)))


@dataclasses.dataclass(frozen=True)
class Shift:
    """B'(x) = B(x + offset)."""
    offset: Tuple[float, float]


@dataclasses.dataclass(frozen=True)
class PlaneRotation:
    """B'(x) = B(Rᵀx) for the rotation R by ``angle``."""
    angle: float

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])


@dataclasses.dataclass(frozen=True)
class SpinRotation:
    """B' = R̂B for a proper rotation R̂ of spin space."""
    matrix: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (3, 3) or not np.allclose(matrix @ matrix.T, np.eye(3), atol=1e-12) \
                or not np.isclose(np.linalg.det(matrix), 1.0, atol=1e-12):
            raise DomainError("Spin rotation must be orthogonal with determinant +1, got %s" % matrix.tolist())
        object.__setattr__(self, "matrix", tuple(tuple(float(v) for v in row) for row in matrix))


@dataclasses.dataclass(frozen=True)
class Scaling:
    """B'(x) = λ⁻²B(x/λ)."""
    factor: float

    def __post_init__(self):
        if self.factor == 0 or not math.isfinite(self.factor):
            raise DomainError("Scaling factor must be finite and non-zero, got %s" % self.factor)


Transform = Union[Shift, PlaneRotation, SpinRotation, Scaling]


def _substitute(expressions: Sequence[sympy.Expr], new_x1: sympy.Expr, new_x2: sympy.Expr) -> Tuple[sympy.Expr, ...]:
    return tuple(sympy.sympify(e).subs({X1: new_x1, X2: new_x2}, simultaneous=True) for e in expressions)


def _transform_operator(transform: Transform, operator: FirstOrderOperator) -> FirstOrderOperator:
    rotation = np.array(operator.rotation)
    translation = np.array(operator.translation)
    omega = operator.omega
    if isinstance(transform, Shift):
        c = np.asarray(transform.offset, dtype=float)
        # Λ(x + c) = C^μ ε^{ba}(x_b + c_b) + C^{μa}
        translation = translation + rotation[:, None] * np.array([-c[1], c[0]])[None, :]
        omega = _substitute(omega, X1 + c[0], X2 + c[1])
    elif isinstance(transform, PlaneRotation):
        r = transform.matrix
        translation = translation @ r.T
        omega = _substitute(omega, r[0, 0] * X1 + r[1, 0] * X2, r[0, 1] * X1 + r[1, 1] * X2)
    elif isinstance(transform, SpinRotation):
        r = np.asarray(transform.matrix)
        rotation = np.concatenate([rotation[:1], r @ rotation[1:]])
        translation = np.concatenate([translation[:1], r @ translation[1:]])
        spatial = sympy.Matrix(r) * sympy.Matrix(omega[1:])
        omega = (omega[0],) + tuple(spatial)
    elif isinstance(transform, Scaling):
        translation = transform.factor * translation
        omega = _substitute(omega, X1 / transform.factor, X2 / transform.factor)
    else:
        raise DomainError("Unknown equivalence transformation %r" % (transform,))
    return FirstOrderOperator(tuple(rotation), tuple(tuple(pair) for pair in translation), omega, operator.name)


def _transform_field(transform: Transform, family: FieldFamily) -> FieldFamily:
    components = family.components
    center = np.asarray(family.center)
    bounds = family.radial_bounds
    if isinstance(transform, Shift):
        c = transform.offset
        components = _substitute(components, X1 + c[0], X2 + c[1])
        center = center - np.asarray(c)
    elif isinstance(transform, PlaneRotation):
        r = transform.matrix
        components = _substitute(components, r[0, 0] * X1 + r[1, 0] * X2, r[0, 1] * X1 + r[1, 1] * X2)
        center = r @ center
    elif isinstance(transform, SpinRotation):
        components = tuple(sympy.Matrix(transform.matrix) * sympy.Matrix(components))
    elif isinstance(transform, Scaling):
        factor = transform.factor
        components = tuple(c / factor ** 2 for c in _substitute(components, X1 / factor, X2 / factor))
        center = factor * center
        bounds = (abs(factor) * bounds[0], abs(factor) * bounds[1])
    else:
        raise DomainError("Unknown equivalence transformation %r" % (transform,))
    operators = [dataclasses.replace(d, operator=_transform_operator(transform, d.operator))
                 for d in family.operators]
    return family.transformed(components, operators, (float(center[0]), float(center[1])), bounds)


def apply_equivalence(transform: Transform, target):
    """
    Apply an equivalence transformation to a field family (including its operators), an operator or a descriptor.
    """
    if isinstance(target, FieldFamily):
        return _transform_field(transform, target)
    if isinstance(target, FirstOrderOperator):
        return _transform_operator(transform, target)
    if isinstance(target, SymmetryDescriptor):
        return dataclasses.replace(target, operator=_transform_operator(transform, target.operator))
    raise DomainError("Cannot apply an equivalence transformation to %r" % (target,))
